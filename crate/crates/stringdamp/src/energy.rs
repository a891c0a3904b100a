//! Energy functionals and empirical contraction diagnostics.
//!
//! The first-order form carries the energy `E(g) = ½ ∫ g²`; the second-order
//! form carries `E(f) = ½‖f₁‖² + ½‖∂f₀/∂x‖²` evaluated by Parseval in
//! coefficient space. Whether the dry-friction flow is contracting with
//! respect to these norms is only known formally, so contraction here is
//! measured, never assumed: any uptick beyond tolerance is surfaced in the
//! report.

use crate::friction;
use crate::pwlin::{IntegralKind, PiecewiseLinear};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Upticks below this are rounding noise, not contraction failures.
pub const UPTICK_TOL: f64 = 1e-10;

/// `E(g) = ½ ∫₀^{2π} g(x)² dx`, closed-form per segment.
pub fn energy_first_order(g: &PiecewiseLinear) -> f64 {
    assert!(g.is_periodic(), "energy is defined for torus fields");
    0.5 * g.integrate(0.0, g.domain_length(), IntegralKind::Square).unwrap()
}

/// `E(f) = ½‖f₁‖² + ½‖∂f₀/∂x‖²` from cosine coefficients:
/// `π·b₀² + ½π·Σ_{n≥1}(bₙ² + n²aₙ²)` with the `L₂(0, 2π)` normalization.
pub fn energy_second_order(f0_coeffs: &[f64], f1_coeffs: &[f64]) -> f64 {
    let mut e = 0.0;
    if let Some(&b0) = f1_coeffs.first() {
        e += PI * b0 * b0;
    }
    for &b in f1_coeffs.iter().skip(1) {
        e += 0.5 * PI * b * b;
    }
    for (n, &a) in f0_coeffs.iter().enumerate().skip(1) {
        let nf = n as f64;
        e += 0.5 * PI * nf * nf * a * a;
    }
    e
}

/// Energy of the difference of two flow trajectories over a time grid.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// True when no consecutive pair rises by more than [`UPTICK_TOL`].
    pub monotone: bool,
    /// Largest `E(t₊) − E(t)` over consecutive pairs.
    pub max_uptick: f64,
}

/// Tracks `E(Φ_t G₁ − Φ_t G₂)` along the dry-friction flow.
pub fn contraction_series(
    g1: &PiecewiseLinear,
    g2: &PiecewiseLinear,
    times: &[f64],
) -> Result<EnergyReport> {
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::UnsortedTimes);
    }
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let a = friction::flow_map(g1, t)?;
        let b = friction::flow_map(g2, t)?;
        values.push(energy_first_order(&a.combine(&b, 1.0, -1.0)?));
    }
    let max_uptick = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    Ok(EnergyReport { times: times.to_vec(), values, monotone: max_uptick <= UPTICK_TOL, max_uptick })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    #[test]
    fn first_order_closed_forms() {
        let c = PiecewiseLinear::constant(2.0, TAU, true);
        assert!((energy_first_order(&c) - 4.0 * PI).abs() < 1e-12);
        let z = PiecewiseLinear::constant(0.0, TAU, true);
        assert_eq!(energy_first_order(&z), 0.0);
        // Sawtooth x − π.
        let s = PiecewiseLinear::new(TAU, true, vec![(0.0, -PI, 1.0)]).unwrap();
        assert!((energy_first_order(&s) - PI.powi(3) / 3.0).abs() < 1e-9);
    }

    #[test]
    fn second_order_parseval() {
        // f₁ = cos x.
        assert!((energy_second_order(&[], &[0.0, 1.0]) - PI / 2.0).abs() < 1e-15);
        // f₀ = cos x (slope −sin x).
        assert!((energy_second_order(&[0.0, 1.0], &[]) - PI / 2.0).abs() < 1e-15);
        assert_eq!(energy_second_order(&[0.0, 0.0], &[0.0]), 0.0);
    }

    #[test]
    fn integration_by_parts_cancels_term_by_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let n = rng.gen_range(1..9usize);
            let u: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            // ⟨v, Δu⟩ = −π Σ n²uₙvₙ and ⟨v′, u′⟩ = +π Σ n²uₙvₙ: summed in the
            // same order the cancellation is exact.
            let mut total = 0.0;
            for k in 1..=n {
                let nf = (k * k) as f64;
                let term = PI * nf * (u[k] * v[k]);
                total += -term + term;
            }
            assert_eq!(total, 0.0);
        }
    }

    #[test]
    fn contraction_of_constants() {
        let g1 = PiecewiseLinear::constant(2.0, TAU, true);
        let g2 = PiecewiseLinear::constant(0.3, TAU, true);
        let report = contraction_series(&g1, &g2, &[0.0, TAU]).unwrap();
        assert!((report.values[0] - PI * 1.7 * 1.7).abs() < 1e-12);
        assert!((report.values[1] - PI * 1.3 * 1.3).abs() < 1e-12);
        assert!(report.monotone);
    }

    #[test]
    fn identical_fields_have_zero_energy() {
        let g = PiecewiseLinear::constant(1.1, TAU, true);
        let report = contraction_series(&g, &g, &[0.0, 1.0, 7.0]).unwrap();
        assert!(report.values.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn contraction_toward_target_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let zero = PiecewiseLinear::constant(0.0, TAU, true);
        for _ in 0..10 {
            let g = random_field(&mut rng);
            let times: Vec<f64> = (0..=16).map(|k| k as f64 * PI / 2.0).collect();
            let report = contraction_series(&g, &zero, &times).unwrap();
            assert!(
                report.monotone,
                "uptick {} for energies {:?}",
                report.max_uptick, report.values
            );
        }
    }

    #[test]
    fn rejects_unsorted_times() {
        let g = PiecewiseLinear::constant(0.0, TAU, true);
        assert!(matches!(
            contraction_series(&g, &g, &[1.0, 0.5]),
            Err(Error::UnsortedTimes)
        ));
        assert!(matches!(
            contraction_series(&g, &g, &[-1.0, 0.5]),
            Err(Error::UnsortedTimes)
        ));
    }

    fn random_field(rng: &mut ChaCha8Rng) -> PiecewiseLinear {
        let n = rng.gen_range(2..6usize);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..TAU - 0.05)).collect();
        xs.push(0.0);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup_by(|a, b| (*a - *b).abs() < 0.02);
        let segs: Vec<(f64, f64, f64)> = xs
            .iter()
            .map(|&x| (x, rng.gen_range(-2.0..2.0), rng.gen_range(-0.4..0.4)))
            .collect();
        PiecewiseLinear::new(TAU, true, segs).unwrap()
    }
}
