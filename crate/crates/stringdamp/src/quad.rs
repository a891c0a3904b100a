//! Quadrature of piecewise-smooth oscillatory integrands.
//!
//! `|f|` for a trigonometric polynomial `f` is smooth away from the sign
//! changes, so the rule here is: sample densely enough to isolate every sign
//! change, bisect each bracket down to 1e-13, then apply a composite 16-point
//! Gauss rule on the sign-constant pieces with panels short enough for the
//! highest mode.

use std::sync::OnceLock;

/// Sample density per period and mode, from the support-function contract.
const SAMPLES_PER_PERIOD_PER_MODE: usize = 64;

/// Bisection width for root refinement.
const ROOT_TOL: f64 = 1e-13;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre recurrence; accurate to
/// machine precision and deterministic.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gauss16() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// ∫ f over [a, b] by composite Gauss with panels short on the mode scale.
pub(crate) fn integrate_smooth(f: &dyn Fn(f64) -> f64, a: f64, b: f64, degree: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let len = b - a;
    let panels = ((len * degree.max(1) as f64 / 1.5).ceil() as usize).max(1);
    let h = len / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for &(x, w) in gauss16() {
            s += w * f(mid + 0.5 * h * x);
        }
        acc += s * 0.5 * h;
    }
    acc
}

/// Interior sign changes of `f` on `(a, b)`, isolated by dense sampling
/// (≥ 64·(degree+1) points per period) and refined by bisection.
pub(crate) fn isolate_sign_changes(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    degree: usize,
) -> Vec<f64> {
    let mut roots = Vec::new();
    if b <= a {
        return roots;
    }
    let len = b - a;
    let per_period = SAMPLES_PER_PERIOD_PER_MODE * (degree + 1);
    let m = ((per_period as f64 * len / std::f64::consts::TAU).ceil() as usize).max(16);
    let h = len / m as f64;
    let mut x0 = a;
    let mut v0 = f(x0);
    for i in 1..=m {
        let x1 = if i == m { b } else { a + i as f64 * h };
        let v1 = f(x1);
        if v0 == 0.0 {
            if x0 > a {
                roots.push(x0);
            }
        } else if v1 != 0.0 && v0.signum() != v1.signum() {
            let (mut lo, mut hi) = (x0, x1);
            let mut vlo = v0;
            for _ in 0..200 {
                if hi - lo <= ROOT_TOL {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let vm = f(mid);
                if vm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if vm.signum() == vlo.signum() {
                    lo = mid;
                    vlo = vm;
                } else {
                    hi = mid;
                }
            }
            let r = 0.5 * (lo + hi);
            if r > a && r < b {
                roots.push(r);
            }
        }
        x0 = x1;
        v0 = v1;
    }
    roots.dedup_by(|p, q| (*p - *q).abs() < ROOT_TOL);
    roots
}

/// ∫ |f| over [a, b] for a piecewise-smooth oscillatory integrand.
pub(crate) fn integrate_abs(f: &dyn Fn(f64) -> f64, a: f64, b: f64, degree: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let roots = isolate_sign_changes(f, a, b, degree);
    let mut cuts = Vec::with_capacity(roots.len() + 2);
    cuts.push(a);
    cuts.extend(roots);
    cuts.push(b);
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        acc += integrate_smooth(f, w[0], w[1], degree).abs();
    }
    acc
}

/// ∫ g over [a, b] where `g` is smooth except for kinks at the given
/// interior points; each kink-free piece gets the composite Gauss rule.
pub(crate) fn integrate_with_kinks(
    g: &dyn Fn(f64) -> f64,
    kinks: &[f64],
    a: f64,
    b: f64,
    degree: usize,
) -> f64 {
    let mut cuts = Vec::with_capacity(kinks.len() + 2);
    cuts.push(a);
    cuts.extend(kinks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        acc += integrate_smooth(g, w[0], w[1], degree);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn gauss_rule_integrates_polynomials() {
        // 16-point Gauss is exact through degree 31.
        let f = |x: f64| x.powi(20) + 3.0 * x.powi(7) - x;
        let exact = 2.0 / 21.0;
        let got: f64 = gauss16().iter().map(|&(x, w)| w * f(x)).sum();
        assert!((got - exact).abs() < 1e-14);
    }

    #[test]
    fn abs_cos_over_period() {
        let got = integrate_abs(&|t: f64| t.cos(), 0.0, TAU, 1);
        assert!((got - 4.0).abs() < 1e-12);
    }

    #[test]
    fn abs_high_mode() {
        // ∫₀^{2π} |sin 9t| dt = 36/9 = 4.
        let got = integrate_abs(&|t: f64| (9.0 * t).sin(), 0.0, TAU, 9);
        assert!((got - 4.0).abs() < 1e-11);
    }

    #[test]
    fn roots_of_cos_are_isolated() {
        let roots = isolate_sign_changes(&|t: f64| t.cos(), 0.0, TAU, 1);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - PI / 2.0).abs() < 1e-12);
        assert!((roots[1] - 3.0 * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn tangency_keeps_integral_accurate() {
        // 1 + cos touches zero at π without a sign change.
        let got = integrate_abs(&|t: f64| 1.0 + t.cos(), 0.0, TAU, 1);
        assert!((got - TAU).abs() < 1e-12);
    }

    #[test]
    fn drifted_trace_integral() {
        // ∫₀^T |t| for the pure drift trace.
        let t_end = 5.0;
        let got = integrate_abs(&|t: f64| t, 0.0, t_end, 0);
        assert!((got - 12.5).abs() < 1e-12);
    }
}
