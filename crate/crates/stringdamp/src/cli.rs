//! Scenario configuration, runners, and report emission for the `stringdamp`
//! binary.
//!
//! Configuration is plain text with `[section]` headers and `key = value`
//! lines; numbers are decimal with optional exponent. Outputs are UTF-8 CSV
//! with a header row and a fixed column order, so identical configs and
//! seeds produce byte-identical files.

use crate::duals::DualVector;
use crate::friction::{self, PhiTrack};
use crate::pwlin::PiecewiseLinear;
use crate::reach::{self, Problem};
use crate::spectral::{self, SpectralSet};
use crate::verify::{self, Suite};
use crate::{energy, Error};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::f64::consts::TAU;

/// Failure modes of a CLI run, each with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments → exit 2.
    Config(String),
    /// An invariant violated during a run, by name → exit 3.
    Invariant(String),
    /// One or more verification checks failed → exit 1.
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::ChecksFailed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Invariant(name) => write!(f, "invariant violated: {name}"),
            CliError::ChecksFailed(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

// ───────────────────────────── config parsing ──────────────────────────────

/// Parsed `[section] / key = value` file.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            if current.is_empty() {
                return Err(CliError::Config(format!(
                    "line {}: key outside any [section]",
                    lineno + 1
                )));
            }
            sections
                .get_mut(&current)
                .unwrap()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { sections })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    fn section_keys(&self, section: &str) -> Vec<&str> {
        self.sections
            .get(section)
            .map(|s| s.keys().map(String::as_str).collect())
            .unwrap_or_default()
    }

    fn number(&self, section: &str, key: &str) -> CliResult<Option<f64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::Config(format!("{section}.{key}: bad number {v:?}"))),
        }
    }

    fn number_list(&self, section: &str, key: &str) -> CliResult<Option<Vec<f64>>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map(Some)
                .map_err(|_| CliError::Config(format!("{section}.{key}: bad number list"))),
        }
    }

    /// Overlay `other` on top of this config (command-line overrides).
    pub fn merged_with(mut self, other: ConfigFile) -> ConfigFile {
        for (section, entries) in other.sections {
            let target = self.sections.entry(section).or_default();
            for (key, value) in entries {
                target.insert(key, value);
            }
        }
        self
    }
}

/// A fully validated simulation scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub problem: Problem,
    pub horizon: f64,
    pub stride: f64,
    pub seed: u64,
    pub initial: PiecewiseLinear,
    pub out_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn from_file(file: &ConfigFile, base: &Path) -> CliResult<Self> {
        let problem = match file.get("scenario", "problem") {
            None => Problem::StopMoving,
            Some(p) => Problem::from_str(p)
                .map_err(|e| CliError::Config(e.to_string()))
                .and_then(|p| match p {
                    Problem::CompleteStop => Err(CliError::Config(
                        "simulation supports stop-moving and damping only".into(),
                    )),
                    other => Ok(other),
                })?,
        };
        let horizon = file
            .number("scenario", "horizon")?
            .ok_or_else(|| CliError::Config("scenario.horizon is required".into()))?;
        if !(horizon > 0.0) {
            return Err(CliError::Config(format!("horizon must be positive, got {horizon}")));
        }
        let stride = file.number("scenario", "stride")?.unwrap_or(TAU / 8.0);
        if !(stride > 0.0) {
            return Err(CliError::Config(format!("stride must be positive, got {stride}")));
        }
        let seed = file.number("scenario", "seed")?.unwrap_or(verify::DEFAULT_SEED as f64) as u64;
        let initial = load_initial(file, base)?;
        let out_dir = PathBuf::from(file.get("output", "dir").unwrap_or("out"));
        Ok(Self { problem, horizon, stride, seed, initial, out_dir })
    }
}

/// Loads the initial field from exactly one of the `[initial]` sources:
/// `pwl` (exchange-format file), `breakpoints` (inline `x:y` interpolation
/// nodes), or `cosine` (coefficients, sampled onto a 512-node interpolant).
fn load_initial(file: &ConfigFile, base: &Path) -> CliResult<PiecewiseLinear> {
    let keys = file.section_keys("initial");
    let sources: Vec<&str> = keys
        .into_iter()
        .filter(|k| ["pwl", "breakpoints", "cosine"].contains(k))
        .collect();
    if sources.len() != 1 {
        return Err(CliError::Config(format!(
            "[initial] needs exactly one of pwl / breakpoints / cosine, found {}",
            sources.len()
        )));
    }
    match sources[0] {
        "pwl" => {
            let rel = file.get("initial", "pwl").unwrap();
            let path = base.join(rel);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            Ok(PiecewiseLinear::from_text(&text)?)
        }
        "breakpoints" => {
            let list = file.get("initial", "breakpoints").unwrap();
            let mut nodes = Vec::new();
            for item in list.split(',') {
                let (x, y) = item
                    .split_once(':')
                    .ok_or_else(|| CliError::Config(format!("bad breakpoint item {item:?}")))?;
                let x: f64 = x.trim().parse().map_err(|_| {
                    CliError::Config(format!("bad breakpoint abscissa {x:?}"))
                })?;
                let y: f64 = y.trim().parse().map_err(|_| {
                    CliError::Config(format!("bad breakpoint value {y:?}"))
                })?;
                nodes.push((x, y));
            }
            Ok(PiecewiseLinear::interpolant(TAU, true, &nodes)?)
        }
        "cosine" => {
            let coeffs = file
                .number_list("initial", "cosine")?
                .ok_or_else(|| CliError::Config("initial.cosine missing".into()))?;
            let n = 512usize;
            let nodes: Vec<(f64, f64)> = (0..n)
                .map(|i| {
                    let x = TAU * i as f64 / n as f64;
                    let y: f64 = coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, &c)| c * (k as f64 * x).cos())
                        .sum();
                    (x, y)
                })
                .collect();
            Ok(PiecewiseLinear::interpolant(TAU, true, &nodes)?)
        }
        _ => unreachable!(),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

// ──────────────────────────────── simulate ─────────────────────────────────

/// Post-run invariant audit; any failure is named and aborts with exit 3.
fn audit_track(track: &PhiTrack, initial: &PiecewiseLinear) -> CliResult<()> {
    let samples = 512usize;
    let mut running: Vec<&PiecewiseLinear> = Vec::new();
    for interval in track.intervals() {
        if interval.v.sup_norm(false) > 1.0 + 1e-12 {
            return Err(CliError::Invariant("sign bound |v| <= 1".into()));
        }
        for k in 0..samples {
            let s = TAU * (k as f64 + 0.5) / samples as f64;
            let phi = interval.phi.at(s);
            let v = interval.v.at(s);
            let sum: f64 = running.iter().map(|vj| vj.at(s)).sum();
            if (phi + 0.5 * v + sum - initial.at(s)).abs() > 1e-12 {
                return Err(CliError::Invariant(
                    "residual identity phi + v/2 + sum v_j = G".into(),
                ));
            }
            if phi.abs() > initial.at(s).abs() + 1e-12 {
                return Err(CliError::Invariant("pointwise bound |phi| <= |G|".into()));
            }
        }
        running.push(&interval.v);
    }
    Ok(())
}

/// Runs a damping scenario: writes `flow.csv`, `energy.csv`, optional
/// snapshots, and prints a short summary.
pub fn run_simulate(config: &ScenarioConfig, snapshots: &[f64]) -> CliResult<()> {
    let track = friction::solve_track(&config.initial, config.horizon)?;
    audit_track(&track, &config.initial)?;

    let mut times = Vec::new();
    let mut t = 0.0;
    while t < config.horizon - 1e-12 {
        times.push(t);
        t += config.stride;
    }
    times.push(config.horizon);

    let mut flow_csv = String::from("t,rho,phi_at_0,u\n");
    let mut energy_csv = String::from("t,E,uptick\n");
    let mut prev_sup_rho = f64::INFINITY;
    let mut prev_energy: Option<f64> = None;
    for &t in &times {
        let field = friction::flow_map(&config.initial, t)?;
        let rho = reach::field_rho(&field, config.problem)?;
        // Monotonicity is guaranteed pointwise in t for the sup-norm rho
        // only; the quotient norm can rise transiently while a kick has
        // reached part of the circle, and is monotone at period boundaries.
        let sup_rho = reach::field_rho(&field, Problem::StopMoving)?;
        if sup_rho > prev_sup_rho + 1e-10 {
            return Err(CliError::Invariant("rho is nonincreasing along the flow".into()));
        }
        prev_sup_rho = sup_rho;
        let e = energy::energy_first_order(&field);
        let uptick = prev_energy.map_or(0.0, |p| (e - p).max(0.0));
        prev_energy = Some(e);
        let query_t = if t >= track.horizon() { track.horizon() - 1e-9 } else { t };
        let phi = track.phi_at(query_t)?;
        let u = track.control_at(query_t)?;
        writeln!(flow_csv, "{t},{rho},{phi},{u}").unwrap();
        writeln!(energy_csv, "{t},{e},{uptick}").unwrap();
    }
    let flow_path = write_file(&config.out_dir, "flow.csv", &flow_csv)?;
    write_file(&config.out_dir, "energy.csv", &energy_csv)?;

    for &ts in snapshots {
        if ts < 0.0 || ts > config.horizon + 1e-9 {
            return Err(CliError::Config(format!("snapshot time {ts} outside [0, horizon]")));
        }
        let field = friction::flow_map(&config.initial, ts)?;
        write_file(&config.out_dir, &format!("snapshot_t{ts}.pwl"), &field.to_text())?;
    }

    let report = friction::decay_report(&config.initial, config.horizon, config.problem)?;
    println!(
        "simulated {} over T = {} (problem: {})",
        flow_path.display(),
        config.horizon,
        config.problem
    );
    println!(
        "rho(0) = {:.12}  rho(T) = {:.12}  rate = {:.12}",
        report.rho_start, report.rho_end, report.rate
    );
    Ok(())
}

// ──────────────────────────────── reachable ────────────────────────────────

/// Loads the dual vector of a `reachable` scenario from `[dual]`:
/// `file = <dual text>` or inline `phi = …` / `psi = …` coefficient lists.
fn load_dual(file: &ConfigFile, base: &Path) -> CliResult<DualVector> {
    if let Some(rel) = file.get("dual", "file") {
        let path = base.join(rel);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        return Ok(DualVector::from_text(&text)?);
    }
    let phi = file.number_list("dual", "phi")?.unwrap_or_default();
    let psi = file.number_list("dual", "psi")?.unwrap_or_default();
    if phi.is_empty() && psi.is_empty() {
        return Err(CliError::Config(
            "[dual] needs either file = … or phi = … / psi = …".into(),
        ));
    }
    Ok(DualVector::new(phi, psi)?)
}

/// Scans support functions over horizons and writes `support_scan.csv`.
pub fn run_reachable(file: &ConfigFile, base: &Path) -> CliResult<()> {
    let horizon = file
        .number("scenario", "horizon")?
        .ok_or_else(|| CliError::Config("scenario.horizon is required".into()))?;
    let stride = file.number("scenario", "stride")?.unwrap_or(TAU);
    if !(horizon > 0.0) || !(stride > 0.0) {
        return Err(CliError::Config("horizon and stride must be positive".into()));
    }
    let xi = load_dual(file, base)?;
    let reduced = xi.reduced_projection();
    let out_dir = PathBuf::from(file.get("output", "dir").unwrap_or("out"));

    let limit = reach::limit_support_full(&xi);
    let mut csv = String::from("T,H_full,H_reduced,H_normalized,H_limit\n");
    let mut t = stride;
    while t <= horizon + 1e-9 {
        let full = reach::support_full(&xi, t)?;
        let red = reach::support_reduced(&reduced, t)?;
        let norm = reach::support_normalized(&xi, t)?;
        writeln!(csv, "{t},{full},{red},{norm},{limit}").unwrap();
        t += stride;
    }
    let path = write_file(&out_dir, "support_scan.csv", &csv)?;
    println!("wrote {} (limit shape support = {:.12})", path.display(), limit);
    Ok(())
}

// ──────────────────────────────── spectral ─────────────────────────────────

/// Truncation scan (`secular.csv`) plus optional singular-arc report for a
/// mode set given as `[spectral] set = <file>`.
pub fn run_spectral(file: &ConfigFile, base: &Path) -> CliResult<()> {
    let truncations: Vec<usize> = file
        .number_list("spectral", "truncations")?
        .unwrap_or_else(|| vec![10.0, 20.0, 40.0, 80.0])
        .into_iter()
        .map(|v| v as usize)
        .collect();
    let k_max = file.number("spectral", "k_max")?.unwrap_or(3.0) as usize;
    if truncations.is_empty() || k_max == 0 {
        return Err(CliError::Config("need at least one truncation and k_max >= 1".into()));
    }
    let out_dir = PathBuf::from(file.get("output", "dir").unwrap_or("out"));

    let rows = spectral::secular_gap_scan(&truncations, k_max)?;
    let mut csv = String::from("N,k,mu_N,mu_limit,gap\n");
    for row in rows {
        writeln!(csv, "{},{},{},{},{}", row.n, row.k, row.mu_n, row.mu_limit, row.gap).unwrap();
    }
    let path = write_file(&out_dir, "secular.csv", &csv)?;
    println!("wrote {}", path.display());

    if let Some(rel) = file.get("spectral", "set") {
        let set_path = base.join(rel);
        let text = std::fs::read_to_string(&set_path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", set_path.display())))?;
        let set = SpectralSet::from_text(&text)?;
        let t_grid: Vec<f64> = (0..1024).map(|i| 2.0 * TAU * i as f64 / 1024.0).collect();
        let x_grid: Vec<f64> = (0..128).map(|i| TAU * i as f64 / 128.0).collect();
        let adm = set.admissibility(&t_grid)?;
        println!(
            "admissibility: max |sum Re(R e^(i mu t))| = {:.12} → {}",
            adm.max_abs,
            if adm.admissible { "admissible" } else { "NOT admissible" }
        );
        // Same coefficients on the finite-truncation roots, for comparison
        // with the half-integer limit form (reported, never asserted equal).
        if let Some(&n) = truncations.iter().max() {
            match set.at_truncation(n) {
                Ok(finite) => {
                    let fadm = finite.admissibility(&t_grid)?;
                    println!(
                        "admissibility at truncation N={n}: max = {:.12} (gap {:.3e})",
                        fadm.max_abs,
                        (fadm.max_abs - adm.max_abs).abs()
                    );
                }
                Err(e) => println!("no finite-truncation comparison: {e}"),
            }
        }
        let report = spectral::singular_field_check(&set, &t_grid, &x_grid)?;
        println!(
            "singular arc: antiperiodic residual {:.3e}, boundary residual {:.3e}, sup |u| = {:.6}",
            report.antiperiodic_residual, report.boundary_residual, report.control_sup
        );
    }
    Ok(())
}

// ───────────────────────────────── verify ──────────────────────────────────

/// Runs a verification suite, writes `verify.json`, prints one line per
/// check, and fails (exit 1) when any check fails.
pub fn run_verify(suite: &str, seed: Option<u64>, out_dir: &Path) -> CliResult<()> {
    let suite =
        Suite::from_str(suite).map_err(|e| CliError::Config(e.to_string()))?;
    let seed = seed.unwrap_or(verify::DEFAULT_SEED);
    let results = verify::run_suite(suite, seed);
    for check in &results {
        println!("{}", check.summary_line());
    }
    let json = serde_json::to_string_pretty(&results).expect("results serialize");
    let path = write_file(out_dir, "verify.json", &json)?;
    let failed = results.iter().filter(|c| !c.passed).count();
    println!(
        "{} checks, {} failed (seed {seed}); report at {}",
        results.len(),
        failed,
        path.display()
    );
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}
