//! Support functions of reachable sets, their limit shapes, the dual norm
//! `ρ`, extremal states, and reachability membership margins.
//!
//! The reachable set `D(T)` of the point-loaded string is convex and closed,
//! so it is determined by its support function, which reduces to a weighted
//! `L₁` norm of the dual boundary trace. Three problems differ only in which
//! dual vectors are admissible and which sup-type norm of the field
//! `g = ∂f₀/∂x + f₁` plays the role of `ρ`:
//!
//! * complete stop — full traces with drift; no finite `ρ` formula here,
//! * stop moving — `ρ = 2π · sup |g|`,
//! * damping — `ρ = 2π · ½(sup g − inf g)` (constants are the target).

use crate::duals::DualVector;
use crate::pwlin::{IntegralKind, PiecewiseLinear};
use crate::quad;
use crate::{Error, Result};
use std::f64::consts::TAU;

/// Terminal manifold selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    /// `𝒞 = 0`: complete stop at a given point.
    CompleteStop,
    /// `𝒞 = ℝ × 0`: stop moving.
    StopMoving,
    /// `𝒞 = ℝ²`: oscillation damping.
    Damping,
}

impl std::str::FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete-stop" => Ok(Problem::CompleteStop),
            "stop-moving" => Ok(Problem::StopMoving),
            "damping" => Ok(Problem::Damping),
            _ => Err(Error::Parse(format!("unknown problem {s:?}"))),
        }
    }
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Problem::CompleteStop => "complete-stop",
            Problem::StopMoving => "stop-moving",
            Problem::Damping => "damping",
        })
    }
}

/// A reachability question: which terminal manifold, at which horizon.
#[derive(Debug, Clone, Copy)]
pub struct ReachQuery {
    pub problem: Problem,
    pub horizon: f64,
}

impl ReachQuery {
    pub fn new(problem: Problem, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::BadHorizon(horizon));
        }
        Ok(Self { problem, horizon })
    }
}

/// A string state `(f₀, f₁)` with its derived field `g = ∂f₀/∂x + f₁`.
#[derive(Debug, Clone)]
pub struct StringState {
    f0: PiecewiseLinear,
    f1: PiecewiseLinear,
    g: PiecewiseLinear,
}

impl StringState {
    /// Builds a state from displacement `f₀` (continuous) and velocity `f₁`.
    pub fn new(f0: PiecewiseLinear, f1: PiecewiseLinear) -> Result<Self> {
        if !f0.is_periodic() || !f1.is_periodic() {
            return Err(Error::NotPeriodic);
        }
        // f₀ must be continuous across its breakpoints and the wrap.
        for i in 0..f0.segment_count() {
            let (b, v, _) = f0.segment(i);
            let prev = if i == 0 {
                let (bl, vl, ml) = f0.segment(f0.segment_count() - 1);
                vl + ml * (f0.domain_length() - bl)
            } else {
                let (bl, vl, ml) = f0.segment(i - 1);
                vl + ml * (b - bl)
            };
            if (v - prev).abs() > 1e-9 {
                return Err(Error::Parse(format!(
                    "displacement jumps by {} at breakpoint {b}",
                    v - prev
                )));
            }
        }
        let g = f0.derivative().combine(&f1, 1.0, 1.0)?;
        Ok(Self { f0, f1, g })
    }

    /// Recovers the state carried by a field `g`: the even part becomes the
    /// velocity, the odd part integrates to the displacement (zero mean).
    ///
    /// The odd part must be piecewise constant, otherwise the displacement
    /// leaves the piecewise-linear class.
    pub fn from_field(g: &PiecewiseLinear) -> Result<Self> {
        let (even, odd) = g.even_odd_parts()?;
        let f0 = odd.cumulative()?;
        Self::new(f0, even)
    }

    pub fn f0(&self) -> &PiecewiseLinear {
        &self.f0
    }

    pub fn f1(&self) -> &PiecewiseLinear {
        &self.f1
    }

    pub fn field(&self) -> &PiecewiseLinear {
        &self.g
    }
}

fn require_reduced(xi: &DualVector) -> Result<()> {
    if !xi.is_reduced() {
        return Err(Error::NonzeroZeroModes { phi0: xi.phi(0), psi0: xi.psi(0) });
    }
    Ok(())
}

/// Support function `H_{D(T)}(ξ) = ∫₀ᵀ |ξ₁(0,t)| dt` of the full problem.
pub fn support_full(xi: &DualVector, horizon: f64) -> Result<f64> {
    if !(horizon > 0.0) {
        return Err(Error::BadHorizon(horizon));
    }
    let p = xi.zeta_profile();
    Ok(quad::integrate_abs(&|t| p.zeta(t), 0.0, horizon, p.degree()))
}

/// Support function of the reduced problems, `∫₀ᵀ |ζ(t)| dt` for dual
/// vectors with vanishing zero modes.
pub fn support_reduced(xi: &DualVector, horizon: f64) -> Result<f64> {
    if !(horizon > 0.0) {
        return Err(Error::BadHorizon(horizon));
    }
    require_reduced(xi)?;
    let p = xi.zeta_profile();
    Ok(quad::integrate_abs(&|t| p.zeta(t), 0.0, horizon, p.degree()))
}

/// Support function of the normalized reachable set `C(T)D(T)`:
/// the drift is rescaled by `1/T` and the integral averaged.
pub fn support_normalized(xi: &DualVector, horizon: f64) -> Result<f64> {
    if !(horizon > 0.0) {
        return Err(Error::BadHorizon(horizon));
    }
    let p = xi.zeta_profile();
    let scale = 1.0 / horizon;
    Ok(quad::integrate_abs(&|t| p.value_with_drift_scale(t, scale), 0.0, horizon, p.degree())
        / horizon)
}

/// Limit of `H_{C(T)D(T)}` as `T → ∞`: the double average of
/// `|w(t) + φ₀τ|` over one period and the drift parameter `τ ∈ [0, 1]`.
///
/// The integrand is linear in `τ`, so the `τ`-average has a closed form for
/// each `t` (a trapezoid, or two triangles when the sign flips inside).
/// What remains is a piecewise-smooth `t`-integrand with kinks where
/// `w(t) = 0` or `w(t) = −φ₀`, handled by root isolation.
pub fn limit_support_full(xi: &DualVector) -> f64 {
    let p = xi.zeta_profile();
    let drift = p.drift();
    let degree = p.degree();
    let w = |t: f64| p.value_with_drift_scale(t, 0.0);
    if drift == 0.0 {
        return quad::integrate_abs(&w, 0.0, TAU, degree) / TAU;
    }
    let tau_average = move |t: f64| {
        let a = w(t);
        let crossing = -a / drift;
        if crossing > 0.0 && crossing < 1.0 {
            (a * a + (a + drift) * (a + drift)) / (2.0 * drift.abs())
        } else {
            (a + 0.5 * drift).abs()
        }
    };
    let mut kinks = quad::isolate_sign_changes(&w, 0.0, TAU, degree);
    kinks.extend(quad::isolate_sign_changes(&|t| w(t) + drift, 0.0, TAU, degree));
    quad::integrate_with_kinks(&tau_average, &kinks, 0.0, TAU, degree) / TAU
}

/// Limit shape of the reduced problems: `(1/2π) ∫₀^{2π} |ζ(t)| dt`.
pub fn limit_support_reduced(xi: &DualVector) -> Result<f64> {
    require_reduced(xi)?;
    let p = xi.zeta_profile();
    Ok(quad::integrate_abs(&|t| p.zeta(t), 0.0, TAU, p.degree()) / TAU)
}

/// The dual norm `ρ` of a field: `2π` times the sup norm of `g`, plain for
/// stop-moving, modulo constants for damping.
pub fn field_rho(g: &PiecewiseLinear, problem: Problem) -> Result<f64> {
    match problem {
        Problem::StopMoving => Ok(TAU * g.sup_norm(false)),
        Problem::Damping => Ok(TAU * g.sup_norm(true)),
        Problem::CompleteStop => Err(Error::UnsupportedProblem("complete-stop")),
    }
}

/// `ρ` of a string state (see [`field_rho`]).
pub fn rho_norm(state: &StringState, problem: Problem) -> Result<f64> {
    field_rho(state.field(), problem)
}

/// Pairing `⟨f, ξ⟩ = ∫₀^{2π} (f₀ξ₀ + f₁ξ₁) dx`, exact per segment.
///
/// A piecewise-linear factor times `cos nx` has the closed antiderivative
/// `(v + m(x−b)) sin(nx)/n + m cos(nx)/n²`, so no grid is involved.
pub fn pairing(state: &StringState, xi: &DualVector) -> f64 {
    moment_sum(state.f0(), xi.phi_coeffs()) + moment_sum(state.f1(), xi.psi_coeffs())
}

fn moment_sum(f: &PiecewiseLinear, coeffs: &[f64]) -> f64 {
    let mut acc = 0.0;
    if let Some(&c0) = coeffs.first() {
        if c0 != 0.0 {
            acc += c0 * f.integrate(0.0, f.domain_length(), IntegralKind::Plain).unwrap();
        }
    }
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        if c == 0.0 {
            continue;
        }
        let n = k as f64;
        let mut moment = 0.0;
        for i in 0..f.segment_count() {
            let (b, v, m) = f.segment(i);
            let e = if i + 1 < f.segment_count() {
                f.breakpoints()[i + 1]
            } else {
                f.domain_length()
            };
            let anti = |x: f64| (v + m * (x - b)) * (n * x).sin() / n + m * (n * x).cos() / (n * n);
            moment += anti(e) - anti(b);
        }
        acc += c * moment;
    }
    acc
}

/// The state attaining `⟨f, ξ⟩ = ρ(f) · H_Ω(ξ)`: the sign profile of `ζ`
/// split into parity components.
///
/// The velocity is the even part of `sign ζ`; the displacement slope is
/// minus the odd part, which is what the maximization of the pairing over
/// `ρ ≤ 2π` forces once the `f₀` factor is integrated by parts.
pub fn extremal_state(xi: &DualVector, problem: Problem) -> Result<StringState> {
    match problem {
        Problem::Damping => require_reduced(xi)?,
        Problem::StopMoving => {
            if xi.phi(0) != 0.0 {
                return Err(Error::NonzeroZeroModes { phi0: xi.phi(0), psi0: xi.psi(0) });
            }
        }
        Problem::CompleteStop => return Err(Error::UnsupportedProblem("complete-stop")),
    }
    let p = xi.zeta_profile();
    extremal_state_from_zeta(&|t| p.zeta(t), p.degree())
}

/// Variant of [`extremal_state`] taking the profile `ζ` directly.
pub fn extremal_state_from_zeta(
    zeta: &dyn Fn(f64) -> f64,
    degree: usize,
) -> Result<StringState> {
    let samples = 64 * (degree + 1);
    let scale = (0..samples)
        .map(|i| zeta(TAU * i as f64 / samples as f64).abs())
        .fold(0.0f64, f64::max);
    if scale < 1e-13 {
        return Err(Error::IdenticallyZeroProfile);
    }
    let roots = quad::isolate_sign_changes(zeta, 0.0, TAU, degree);
    let mut cuts = vec![0.0];
    cuts.extend(roots);
    let mut steps = Vec::with_capacity(cuts.len());
    for (i, &c) in cuts.iter().enumerate() {
        let end = cuts.get(i + 1).copied().unwrap_or(TAU);
        let mid = 0.5 * (c + end);
        let s = if zeta(mid) >= 0.0 { 1.0 } else { -1.0 };
        steps.push((c, s));
    }
    let sign_fn = PiecewiseLinear::piecewise_constant(TAU, true, &steps)?;
    let (even, odd) = sign_fn.even_odd_parts()?;
    let f0 = odd.scale(-1.0).cumulative()?;
    StringState::new(f0, even)
}

/// Largest violation `⟨f, ξ⟩ − H(ξ, T)` over a sample of dual vectors.
///
/// A nonpositive margin is consistent with `f ∈ D(T)`; the certificate is
/// one-sided because the true criterion quantifies over all duals.
pub fn membership_margin(
    state: &StringState,
    query: &ReachQuery,
    sample: &[DualVector],
) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut worst = f64::NEG_INFINITY;
    for xi in sample {
        let support = match query.problem {
            Problem::CompleteStop => support_full(xi, query.horizon)?,
            Problem::StopMoving | Problem::Damping => support_reduced(xi, query.horizon)?,
        };
        worst = worst.max(pairing(state, xi) - support);
    }
    Ok(worst)
}
