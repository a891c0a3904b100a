//! The exact dry-friction semiflow.
//!
//! Writing `g = ∂f₀/∂x + f₁` turns the controlled string into a first-order
//! transport equation with a point source at the loaded point, and the
//! feedback `u = −sign g(0, t)` into the functional equation
//!
//! ```text
//! φ(t) + ½ sign φ(t) + Σ_{k≠0, 2kπ ∈ [−t,0)} sign φ(t + 2kπ) = G(t)
//! ```
//!
//! for the boundary history `φ(t) = g(0, t)`. On each period `[2πm, 2π(m+1))`
//! this is a scalar soft-threshold inversion of `x ↦ x + ½ sign x`, with the
//! sign regarded as multivalued on the dead zone `|rhs| ≤ ½`, where the
//! equation itself forces the selection `v = 2·rhs`. The whole flow is then
//! solved by breakpoint algebra alone: refine at the levels `±½`, pick the
//! branch per segment, subtract, repeat.

use crate::pwlin::PiecewiseLinear;
use crate::reach::{self, Problem};
use crate::{Error, Result};
use std::f64::consts::TAU;

const PERIOD_TOL: f64 = 1e-9;

/// Scalar soft-threshold resolvent of `φ + ½ sign φ = y`.
///
/// Returns `(φ, v)` with `φ + ½v = y` and `v ∈ sign(φ)` under the
/// multivalued convention `sign 0 = [−1, 1]`; on the dead zone the unique
/// admissible selection is `v = 2y`.
pub fn scalar_resolvent(y: f64) -> (f64, f64) {
    if y > 0.5 {
        (y - 0.5, 1.0)
    } else if y < -0.5 {
        (y + 0.5, -1.0)
    } else {
        (0.0, 2.0 * y)
    }
}

/// Piecewise resolvent: refines the right-hand side at `±½` and applies the
/// scalar branch on each sign-constant segment.
///
/// `phi` is continuous wherever `rhs` is; `v` is piecewise linear with
/// `|v| ≤ 1`.
pub fn pw_resolvent(rhs: &PiecewiseLinear) -> (PiecewiseLinear, PiecewiseLinear) {
    let refined = rhs.refine_crossings(0.5).function;
    let mut phi_segs = Vec::with_capacity(refined.segment_count());
    let mut v_segs = Vec::with_capacity(refined.segment_count());
    for i in 0..refined.segment_count() {
        let (b, val, slope) = refined.segment(i);
        let end = if i + 1 < refined.segment_count() {
            refined.breakpoints()[i + 1]
        } else {
            refined.domain_length()
        };
        let mid = val + slope * 0.5 * (end - b);
        if mid > 0.5 {
            phi_segs.push((b, val - 0.5, slope));
            v_segs.push((b, 1.0, 0.0));
        } else if mid < -0.5 {
            phi_segs.push((b, val + 0.5, slope));
            v_segs.push((b, -1.0, 0.0));
        } else {
            phi_segs.push((b, 0.0, 0.0));
            v_segs.push((b, 2.0 * val, 2.0 * slope));
        }
    }
    let p = refined.domain_length();
    let periodic = refined.is_periodic();
    (
        PiecewiseLinear::new(p, periodic, phi_segs).expect("refined breakpoints are valid"),
        PiecewiseLinear::new(p, periodic, v_segs).expect("refined breakpoints are valid"),
    )
}

/// One solved period of the boundary history.
#[derive(Debug, Clone)]
pub struct TrackInterval {
    /// `φ_m` on `[0, 2π)` — the boundary value of the field.
    pub phi: PiecewiseLinear,
    /// `v_m = sign φ_m` (resolved selection); the control is `u = −v`.
    pub v: PiecewiseLinear,
}

/// The solved boundary history of the dry-friction flow from initial field `G`.
#[derive(Debug, Clone)]
pub struct PhiTrack {
    initial: PiecewiseLinear,
    intervals: Vec<TrackInterval>,
    horizon: f64,
}

impl PhiTrack {
    pub fn initial_field(&self) -> &PiecewiseLinear {
        &self.initial
    }

    pub fn intervals(&self) -> &[TrackInterval] {
        &self.intervals
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn interval_of(&self, t: f64) -> Result<(usize, f64)> {
        if t < 0.0 || t >= self.horizon + PERIOD_TOL {
            return Err(Error::TimeOutOfRange { t, horizon: self.horizon });
        }
        let mut m = (t / TAU).floor() as usize;
        if m >= self.intervals.len() {
            // t landed on the solved right edge.
            m = self.intervals.len() - 1;
        }
        // Clamp just inside the period so the right edge reads the last
        // interval's end value instead of wrapping around to its start.
        let s = (t - TAU * m as f64).min(TAU - 1e-12);
        Ok((m, s))
    }

    /// Boundary value `φ(t)` for global time `t ∈ [0, horizon)`.
    pub fn phi_at(&self, t: f64) -> Result<f64> {
        let (m, s) = self.interval_of(t)?;
        Ok(self.intervals[m].phi.at(s))
    }

    /// The feedback control `u(t) = −v_m(t − 2πm)`, bounded by 1.
    pub fn control_at(&self, t: f64) -> Result<f64> {
        let (m, s) = self.interval_of(t)?;
        Ok(-self.intervals[m].v.at(s))
    }

    /// The control as a single piecewise-linear function on the solved range.
    pub fn control_function(&self) -> PiecewiseLinear {
        let mut segs = Vec::new();
        for (m, interval) in self.intervals.iter().enumerate() {
            let off = TAU * m as f64;
            for i in 0..interval.v.segment_count() {
                let (b, val, slope) = interval.v.segment(i);
                segs.push((off + b, -val, -slope));
            }
        }
        let len = TAU * self.intervals.len() as f64;
        PiecewiseLinear::new(len, false, segs).expect("interval segments are ordered")
    }
}

/// Solves the interval recursion for the boundary history of the flow.
///
/// For `m = 0, 1, …` the right-hand side is `G − Σ_{j<m} v_j` and
/// `(φ_m, v_m)` comes from [`pw_resolvent`]; enough whole periods are solved
/// to cover the horizon.
pub fn solve_track(initial: &PiecewiseLinear, horizon: f64) -> Result<PhiTrack> {
    require_torus(initial)?;
    if !(horizon > 0.0) {
        return Err(Error::BadHorizon(horizon));
    }
    let periods = ((horizon / TAU) - PERIOD_TOL).ceil().max(1.0) as usize;
    let mut intervals = Vec::with_capacity(periods);
    let mut rhs = initial.clone();
    for _ in 0..periods {
        let (phi, v) = pw_resolvent(&rhs);
        rhs = rhs.combine(&v, 1.0, -1.0)?;
        intervals.push(TrackInterval { phi, v });
    }
    Ok(PhiTrack { initial: initial.clone(), intervals, horizon: TAU * periods as f64 })
}

/// Snaps times that are within [`PERIOD_TOL`] of a whole number of periods
/// onto the period grid, so that the solved track and the transport windows
/// agree about how many kicks a characteristic has received.
fn snap_to_period_grid(t: f64) -> f64 {
    let snapped = TAU * (t / TAU).round();
    if (t - snapped).abs() <= PERIOD_TOL {
        snapped
    } else {
        t
    }
}

fn require_torus(g: &PiecewiseLinear) -> Result<()> {
    if !g.is_periodic() {
        return Err(Error::NotPeriodic);
    }
    if (g.domain_length() - TAU).abs() > PERIOD_TOL {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

fn check_control(u: &PiecewiseLinear, needed: f64) -> Result<()> {
    if u.is_periodic() {
        return Err(Error::DomainMismatch);
    }
    if u.domain_length() < needed - PERIOD_TOL {
        return Err(Error::ControlNotCovering { needed, available: u.domain_length() });
    }
    let sup = u.sup_norm(false);
    if sup > 1.0 + 1e-12 {
        return Err(Error::ControlBound { sup });
    }
    Ok(())
}

/// Transports the initial field under an arbitrary bounded control:
///
/// ```text
/// g(z, t) = G(z + t  mod 2π) + Σ_{k: z+2kπ ∈ [−t, 0)} u(z + t + 2kπ)
/// ```
///
/// Each `k` contributes the control value at the moment the characteristic
/// through `z` crossed the loaded point. The half-open window fixes the
/// measure-zero convention.
pub fn reconstruct(
    initial: &PiecewiseLinear,
    control: &PiecewiseLinear,
    t: f64,
) -> Result<PiecewiseLinear> {
    require_torus(initial)?;
    if t < 0.0 {
        return Err(Error::BadHorizon(t));
    }
    let t = snap_to_period_grid(t);
    check_control(control, t)?;
    let mut field = initial.shift(t)?;
    let mut k = 1usize;
    loop {
        let offset = t - TAU * k as f64;
        let z_lo = (-offset).max(0.0);
        // Windows narrower than the period tolerance are rounding phantoms:
        // after the grid snap no genuine kick window is that thin, and a
        // phantom would plant a spurious O(1) value on a hairline sliver.
        if z_lo >= TAU - PERIOD_TOL {
            break;
        }
        let term = windowed_shift(control, offset, z_lo)?;
        field = field.combine(&term, 1.0, 1.0)?;
        k += 1;
    }
    Ok(field)
}

/// `h(z) = u(z + offset)` on `[z_lo, 2π)`, zero before `z_lo`.
fn windowed_shift(u: &PiecewiseLinear, offset: f64, z_lo: f64) -> Result<PiecewiseLinear> {
    let mut segs: Vec<(f64, f64, f64)> = Vec::new();
    if z_lo > 1e-15 {
        segs.push((0.0, 0.0, 0.0));
    }
    let start = if z_lo > 1e-15 { z_lo } else { 0.0 };
    let (v0, m0) = u.union_value_slope(start + offset);
    segs.push((start, v0, m0));
    for i in 0..u.segment_count() {
        let (b, v, m) = u.segment(i);
        let z = b - offset;
        if z > start + 1e-12 && z < TAU - 1e-12 {
            segs.push((z, v, m));
        }
    }
    PiecewiseLinear::new(TAU, true, segs)
}

/// The dry-friction flow `Φ_t(G)`: solve the track, rebuild the field.
pub fn flow_map(initial: &PiecewiseLinear, t: f64) -> Result<PiecewiseLinear> {
    require_torus(initial)?;
    if t < 0.0 {
        return Err(Error::BadHorizon(t));
    }
    let t = snap_to_period_grid(t);
    if t == 0.0 {
        return Ok(initial.clone());
    }
    let track = solve_track(initial, t)?;
    reconstruct(initial, &track.control_function(), t)
}

/// Open-loop transport with a supplied control, for optimality comparisons.
pub fn apply_control(
    initial: &PiecewiseLinear,
    control: &PiecewiseLinear,
    horizon: f64,
) -> Result<PiecewiseLinear> {
    if !(horizon >= 0.0) {
        return Err(Error::BadHorizon(horizon));
    }
    reconstruct(initial, control, horizon)
}

/// Decay trace of `ρ` along the dry-friction flow.
#[derive(Debug, Clone)]
pub struct DecayReport {
    pub rho_start: f64,
    pub rho_end: f64,
    /// `(ρ(0) − ρ(T)) / T`.
    pub rate: f64,
    /// Snapshots `(t, ρ(Φ_t G))` at stride 2π plus the final horizon.
    pub trace: Vec<(f64, f64)>,
}

/// Runs the flow to `horizon` and reports the decay of `ρ` at period
/// boundaries (plus the final time when it is not a multiple of 2π).
pub fn decay_report(
    initial: &PiecewiseLinear,
    horizon: f64,
    problem: Problem,
) -> Result<DecayReport> {
    require_torus(initial)?;
    if !(horizon > 0.0) {
        return Err(Error::BadHorizon(horizon));
    }
    let mut times = Vec::new();
    let mut t = 0.0;
    while t < horizon - PERIOD_TOL {
        times.push(t);
        t += TAU;
    }
    times.push(horizon);
    let mut trace = Vec::with_capacity(times.len());
    for &t in &times {
        let rho = reach::field_rho(&flow_map(initial, t)?, problem)?;
        trace.push((t, rho));
    }
    let rho_start = trace.first().unwrap().1;
    let rho_end = trace.last().unwrap().1;
    Ok(DecayReport { rho_start, rho_end, rate: (rho_start - rho_end) / horizon, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn torus_constant(c: f64) -> PiecewiseLinear {
        PiecewiseLinear::constant(c, TAU, true)
    }

    #[test]
    fn scalar_resolvent_branches() {
        assert_eq!(scalar_resolvent(1.0), (0.5, 1.0));
        assert_eq!(scalar_resolvent(0.3), (0.0, 0.6));
        assert_eq!(scalar_resolvent(-2.0), (-1.5, -1.0));
        // Branch boundary is continuous.
        assert_eq!(scalar_resolvent(0.5), (0.0, 1.0));
        assert_eq!(scalar_resolvent(-0.5), (0.0, -1.0));
    }

    #[test]
    fn pw_resolvent_constant_and_ramp() {
        let (phi, v) = pw_resolvent(&torus_constant(2.0));
        assert_eq!(phi.at(1.0), 1.5);
        assert_eq!(v.at(1.0), 1.0);

        let (phi, v) = pw_resolvent(&torus_constant(-0.3));
        assert_eq!(phi.at(1.0), 0.0);
        assert!((v.at(1.0) + 0.6).abs() < 1e-15);

        // Ramp 0 → 1: dead zone up to the crossing at π, then φ climbs to ½.
        let ramp = PiecewiseLinear::new(TAU, true, vec![(0.0, 0.0, 1.0 / TAU)]).unwrap();
        let (phi, v) = pw_resolvent(&ramp);
        assert!(phi.at(PI / 2.0).abs() < 1e-15);
        assert!((v.at(PI / 2.0) - 2.0 * 0.25).abs() < 1e-15);
        assert!((phi.at(3.0 * PI / 2.0) - 0.25).abs() < 1e-15);
        assert_eq!(v.at(3.0 * PI / 2.0), 1.0);
        // φ continuous at the crossing.
        assert!(phi.at(PI).abs() < 1e-12);
    }

    #[test]
    fn track_of_large_constant() {
        let track = solve_track(&torus_constant(2.0), 3.0 * TAU).unwrap();
        let v: Vec<f64> = track.intervals().iter().map(|i| i.v.at(1.0)).collect();
        assert_eq!(v, vec![1.0, 1.0, 0.0]);
        let sup: Vec<f64> =
            track.intervals().iter().map(|i| i.phi.sup_norm(false)).collect();
        assert_eq!(sup, vec![1.5, 0.5, 0.0]);
    }

    #[test]
    fn track_of_dead_zone_constant_alternates() {
        let track = solve_track(&torus_constant(0.3), 4.0 * TAU).unwrap();
        for (m, interval) in track.intervals().iter().enumerate() {
            assert_eq!(interval.phi.sup_norm(false), 0.0);
            let want = if m % 2 == 0 { 0.6 } else { -0.6 };
            assert!((interval.v.at(2.0) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn track_of_zero_is_zero() {
        let track = solve_track(&torus_constant(0.0), TAU).unwrap();
        assert_eq!(track.intervals()[0].phi.sup_norm(false), 0.0);
        assert_eq!(track.intervals()[0].v.sup_norm(false), 0.0);
        assert_eq!(track.control_at(1.0).unwrap(), 0.0);
    }

    #[test]
    fn control_values_match_hand_recursion() {
        let track = solve_track(&torus_constant(2.0), 3.0 * TAU).unwrap();
        assert_eq!(track.control_at(PI).unwrap(), -1.0);

        let track = solve_track(&torus_constant(0.3), 2.0 * TAU).unwrap();
        assert!((track.control_at(3.0 * PI).unwrap() - 0.6).abs() < 1e-15);

        // The solved right edge reads the end of the last interval, not the
        // wrap back to its start.
        assert!((track.control_at(2.0 * TAU).unwrap() - 0.6).abs() < 1e-12);

        assert!(matches!(
            track.control_at(5.0 * TAU),
            Err(Error::TimeOutOfRange { .. })
        ));
    }

    #[test]
    fn track_invariants_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let g = random_field(&mut rng, 3.0);
            let track = solve_track(&g, 4.0 * TAU).unwrap();
            let mut running: Vec<&PiecewiseLinear> = Vec::new();
            for interval in track.intervals() {
                assert!(interval.v.sup_norm(false) <= 1.0 + 1e-12);
                for k in 0..500 {
                    let s = TAU * (k as f64 + 0.5) / 500.0;
                    let phi = interval.phi.at(s);
                    let v = interval.v.at(s);
                    let sum: f64 = running.iter().map(|vj| vj.at(s)).sum();
                    // Residual identity of the functional equation.
                    assert!((phi + 0.5 * v + sum - g.at(s)).abs() < 1e-12);
                    // v = sign φ away from the dead zone.
                    if phi.abs() > 1e-12 {
                        assert_eq!(v, phi.signum());
                    }
                    // |φ| ≤ |G| pointwise.
                    assert!(phi.abs() <= g.at(s).abs() + 1e-12);
                }
                running.push(&interval.v);
            }
        }
    }

    #[test]
    fn reconstruct_closed_forms() {
        // Zero field, unit control, one period: exactly one kick everywhere.
        let u = PiecewiseLinear::constant(1.0, TAU, false);
        let g = reconstruct(&torus_constant(0.0), &u, TAU).unwrap();
        for k in 0..50 {
            assert!((g.at(0.12 * k as f64) - 1.0).abs() < 1e-15);
        }

        // No control: free transport.
        let z = PiecewiseLinear::constant(0.0, 3.0 * TAU, false);
        let hat = PiecewiseLinear::new(TAU, true, vec![(0.0, 0.0, 1.0), (PI, PI, -1.0)])
            .unwrap();
        let g = reconstruct(&hat, &z, 2.5).unwrap();
        for k in 0..50 {
            let x = 0.12 * k as f64;
            assert!((g.at(x) - hat.at(x + 2.5)).abs() < 1e-13);
        }
    }

    #[test]
    fn flow_damps_constant_two_in_two_periods() {
        let g = flow_map(&torus_constant(2.0), 2.0 * TAU).unwrap();
        for k in 0..50 {
            assert!(g.at(0.12 * k as f64).abs() < 1e-15);
        }
        // t = 0 is the identity.
        let id = flow_map(&torus_constant(2.0), 0.0).unwrap();
        assert_eq!(id.at(1.0), 2.0);
    }

    #[test]
    fn near_target_flow_alternates() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..5 {
            let g = random_field(&mut rng, 0.45);
            for k in 0..4 {
                let t = TAU * k as f64;
                let flowed = flow_map(&g, t).unwrap();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                for j in 0..200 {
                    let x = TAU * (j as f64 + 0.37) / 200.0;
                    assert!((flowed.at(x) - sign * g.at(x)).abs() < 1e-12);
                }
            }
            // Fractional times follow the antiperiodic extension of G(x+t).
            let t = 0.7 * TAU;
            let flowed = flow_map(&g, t).unwrap();
            for j in 0..200 {
                let x = TAU * (j as f64 + 0.41) / 200.0;
                let wraps = ((x + t) / TAU).floor();
                let sign = if (wraps as i64) % 2 == 0 { 1.0 } else { -1.0 };
                assert!((flowed.at(x) - sign * g.at(x + t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decay_report_rates() {
        // ‖G‖ = 5 decays at exactly rate 1 over 4 periods (stop-moving).
        let report = decay_report(&torus_constant(5.0), 4.0 * TAU, Problem::StopMoving).unwrap();
        assert!((report.rate - 1.0).abs() < 1e-12);
        assert!((report.rho_start - TAU * 5.0).abs() < 1e-12);
        assert!((report.rho_end - TAU).abs() < 1e-12);

        // Dead-zone initial data: ρ never moves (up to rounding in the
        // kick bookkeeping).
        let report = decay_report(&torus_constant(0.3), 2.0 * TAU, Problem::StopMoving).unwrap();
        assert!(report.rate.abs() < 1e-12);
    }

    #[test]
    fn rho_decay_is_monotone_under_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = random_field(&mut rng, 2.0);
        let mut prev = f64::INFINITY;
        let mut t = 0.0;
        while t <= 2.0 * TAU + 1e-9 {
            let rho = reach::field_rho(&flow_map(&g, t).unwrap(), Problem::StopMoving).unwrap();
            assert!(rho <= prev + 1e-10, "uptick at t={t}: {rho} > {prev}");
            prev = rho;
            t += PI / 8.0;
        }
    }

    #[test]
    fn semigroup_at_period_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let g = random_field(&mut rng, 1.7);
        let once = flow_map(&flow_map(&g, TAU).unwrap(), 2.0 * TAU).unwrap();
        let direct = flow_map(&g, 3.0 * TAU).unwrap();
        for k in 0..500 {
            let x = TAU * (k as f64 + 0.29) / 500.0;
            assert!((once.at(x) - direct.at(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn apply_control_saturates_a_priori_bound() {
        let u = PiecewiseLinear::constant(1.0, TAU, false);
        let g = apply_control(&torus_constant(0.0), &u, TAU).unwrap();
        let rho = reach::field_rho(&g, Problem::StopMoving).unwrap();
        assert!((rho - TAU).abs() < 1e-12);

        // Free motion preserves ρ.
        let z = PiecewiseLinear::constant(0.0, TAU, false);
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let g0 = random_field(&mut rng, 1.0);
        let g = apply_control(&g0, &z, TAU).unwrap();
        let before = reach::field_rho(&g0, Problem::StopMoving).unwrap();
        let after = reach::field_rho(&g, Problem::StopMoving).unwrap();
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn flow_at_period_multiples_equals_track_recursion() {
        // At t = 2πm the field is exactly G − Σ_{j<m} v_j, even far from
        // the target and over many periods.
        let segs: Vec<(f64, f64, f64)> = (0..10)
            .map(|i| {
                let x = TAU * i as f64 / 10.0;
                (x, ((i * 7 + 3) % 11) as f64 - 5.0, 0.3 * ((i % 5) as f64 - 2.0))
            })
            .collect();
        let g = PiecewiseLinear::new(TAU, true, segs).unwrap().scale(8.0);
        let track = solve_track(&g, 40.0 * TAU).unwrap();
        let mut rhs = g.clone();
        for (m, interval) in track.intervals().iter().enumerate().take(40) {
            if [1usize, 7, 25, 39].contains(&m) {
                let flowed = flow_map(&g, TAU * m as f64).unwrap();
                for i in 0..1000 {
                    let x = TAU * (i as f64 + 0.41) / 1000.0;
                    assert!(
                        (flowed.at(x) - rhs.at(x)).abs() < 1e-10,
                        "m={m}: flow({x}) = {}, recursion says {}",
                        flowed.at(x),
                        rhs.at(x)
                    );
                }
                let sup_flow = flowed.sup_norm(false);
                let sup_rhs = rhs.sup_norm(false);
                assert!((sup_flow - sup_rhs).abs() < 1e-10, "m={m}: {sup_flow} vs {sup_rhs}");
            }
            rhs = rhs.combine(&interval.v, 1.0, -1.0).unwrap();
        }
        // Once everything sits in the dead zone the field stays within ½.
        let late = flow_map(&g, 40.0 * TAU).unwrap();
        assert!(late.sup_norm(false) <= 0.5 + 1e-10);
    }

    #[test]
    fn reconstruct_matches_bruteforce_transport() {
        // Independent oracle: evaluate the kick sum directly from its
        // definition at off-breakpoint samples, for sloped controls and
        // fractional times.
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for _ in 0..10 {
            let g = random_field(&mut rng, 1.5);
            let horizon = 3.0 * TAU;
            let nodes: Vec<(f64, f64)> = (0..8)
                .map(|i| (horizon * i as f64 / 8.0, rng.gen_range(-0.9..0.9)))
                .collect();
            let u = PiecewiseLinear::interpolant(horizon, false, &nodes).unwrap();
            for t in [0.37, 4.0, TAU, 9.1, 2.5 * TAU, 3.0 * TAU] {
                let field = reconstruct(&g, &u, t).unwrap();
                for i in 0..300 {
                    let z = TAU * (i as f64 + 0.29) / 300.0;
                    let mut brute = g.at(z + t);
                    let mut j = 1;
                    loop {
                        let arg = z + t - TAU * j as f64;
                        if arg < 0.0 {
                            break;
                        }
                        brute += u.at(arg);
                        j += 1;
                    }
                    assert!(
                        (field.at(z) - brute).abs() < 1e-12,
                        "t={t} z={z}: {} vs {brute}",
                        field.at(z)
                    );
                }
            }
        }
    }

    #[test]
    fn controlled_velocity_stays_near_free_motion() {
        // |f₁ − f̃₁|∞ ≤ T/2π where f̃ is control-free from the same state.
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for periods in [1usize, 2, 4] {
            let horizon = TAU * periods as f64;
            let g0 = random_field(&mut rng, 1.5);
            let u = {
                let steps: Vec<(f64, f64)> = (0..6)
                    .map(|i| (horizon * i as f64 / 6.0, rng.gen_range(-1.0..1.0)))
                    .collect();
                PiecewiseLinear::piecewise_constant(horizon, false, &steps).unwrap()
            };
            let moved = apply_control(&g0, &u, horizon).unwrap();
            let free = g0.shift(horizon).unwrap();
            let diff = moved.combine(&free, 1.0, -1.0).unwrap();
            let (velocity_gap, _) = diff.even_odd_parts().unwrap();
            assert!(velocity_gap.sup_norm(false) <= horizon / TAU + 1e-9);
        }
    }

    #[test]
    fn apply_control_rejects_bad_controls() {
        let over = PiecewiseLinear::constant(1.5, TAU, false);
        assert!(matches!(
            apply_control(&torus_constant(0.0), &over, TAU),
            Err(Error::ControlBound { .. })
        ));
        let short = PiecewiseLinear::constant(1.0, 1.0, false);
        assert!(matches!(
            apply_control(&torus_constant(0.0), &short, TAU),
            Err(Error::ControlNotCovering { .. })
        ));
    }

    pub(crate) fn random_field(rng: &mut ChaCha8Rng, sup_target: f64) -> PiecewiseLinear {
        let n = rng.gen_range(2..7usize);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..TAU - 0.05)).collect();
        xs.push(0.0);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup_by(|a, b| (*a - *b).abs() < 0.02);
        let segs: Vec<(f64, f64, f64)> = xs
            .iter()
            .map(|&x| (x, rng.gen_range(-1.0..1.0), rng.gen_range(-0.3..0.3)))
            .collect();
        let raw = PiecewiseLinear::new(TAU, true, segs).unwrap();
        raw.scale(sup_target / raw.sup_norm(false))
    }
}

