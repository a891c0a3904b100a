//! Cosine-series dual vectors and their boundary traces.
//!
//! A dual state `ξ = (ξ₀, ξ₁)` of even distributions is carried by the real
//! cosine coefficients `φ₀..φ_N` of `ξ₀` and `ψ₀..ψ_N` of `ξ₁`. Everything
//! downstream consumes `ξ` through the closed-form boundary trace
//!
//! ```text
//! ξ₁(0, t) = Σ_{n≠0} (ψₙ cos nt + (φₙ/n) sin nt) + ψ₀ + φ₀ t
//! ```
//!
//! and the profile `ζ(t) = ξ₁(t) + ∫₀ᵗ ξ₀(x) dx`, which is given by the same
//! trigonometric sum. Only finite trigonometric polynomials are supported;
//! the cutoff `N` is the caller's modeling choice and evaluation is by direct
//! summation.

use crate::{Error, Result};

/// Cosine-coefficient pair representing an even dual state.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVector {
    phi: Vec<f64>,
    psi: Vec<f64>,
}

impl DualVector {
    /// Builds a dual vector from the cosine coefficients of `ξ₀` (`phi`) and
    /// `ξ₁` (`psi`). Shorter of the two is zero-padded.
    pub fn new(mut phi: Vec<f64>, mut psi: Vec<f64>) -> Result<Self> {
        if phi.is_empty() && psi.is_empty() {
            return Err(Error::Parse("empty dual vector".into()));
        }
        if phi.iter().chain(psi.iter()).any(|c| !c.is_finite()) {
            return Err(Error::Parse("non-finite dual coefficient".into()));
        }
        let n = phi.len().max(psi.len()).max(1);
        phi.resize(n, 0.0);
        psi.resize(n, 0.0);
        Ok(Self { phi, psi })
    }

    /// Dual vector with a single `φ_n` or `ψ_n` coefficient set to `c`.
    pub fn unit(psi_mode: Option<usize>, phi_mode: Option<usize>, c: f64) -> Self {
        let n = psi_mode.unwrap_or(0).max(phi_mode.unwrap_or(0));
        let mut phi = vec![0.0; n + 1];
        let mut psi = vec![0.0; n + 1];
        if let Some(k) = phi_mode {
            phi[k] = c;
        }
        if let Some(k) = psi_mode {
            psi[k] = c;
        }
        Self { phi, psi }
    }

    /// Highest stored mode index `N`.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn phi(&self, n: usize) -> f64 {
        self.phi.get(n).copied().unwrap_or(0.0)
    }

    pub fn psi(&self, n: usize) -> f64 {
        self.psi.get(n).copied().unwrap_or(0.0)
    }

    pub fn phi_coeffs(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi_coeffs(&self) -> &[f64] {
        &self.psi
    }

    /// True when both zero-mode coefficients vanish (the reduced-problem class).
    pub fn is_reduced(&self) -> bool {
        self.phi[0] == 0.0 && self.psi[0] == 0.0
    }

    /// `λ·ξ`.
    pub fn scale(&self, lambda: f64) -> Self {
        Self {
            phi: self.phi.iter().map(|c| c * lambda).collect(),
            psi: self.psi.iter().map(|c| c * lambda).collect(),
        }
    }

    /// Copy with the zero modes dropped.
    pub fn reduced_projection(&self) -> Self {
        let mut out = self.clone();
        out.phi[0] = 0.0;
        out.psi[0] = 0.0;
        out
    }

    /// The boundary trace `ξ₁(0, t)` of the dual wave evolution, in
    /// agreement with the d'Alembert formula.
    pub fn boundary_trace(&self, t: f64) -> f64 {
        self.zeta_profile().zeta(t)
    }

    /// The profile `ζ(t) = ξ₁(t) + ∫₀ᵗ ξ₀` backing every support function.
    pub fn zeta_profile(&self) -> DualProfile {
        let n = self.degree();
        DualProfile {
            psi0: self.psi[0],
            drift: self.phi[0],
            cos_coef: (1..=n).map(|k| self.psi[k]).collect(),
            sin_coef: (1..=n).map(|k| self.phi[k] / k as f64).collect(),
        }
    }

    /// Serializes to the dual-vector text format: header `#dual N=<n>`,
    /// then lines `n,phi_n,psi_n`.
    pub fn to_text(&self) -> String {
        let mut out = format!("#dual N={}\n", self.degree());
        for n in 0..=self.degree() {
            out.push_str(&format!("{},{:.16e},{:.16e}\n", n, self.phi[n], self.psi[n]));
        }
        out
    }

    /// Parses the dual-vector text format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty dual text".into()))?;
        let n: usize = header
            .strip_prefix("#dual N=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse("missing #dual header".into()))?;
        let mut phi = vec![0.0; n + 1];
        let mut psi = vec![0.0; n + 1];
        for line in lines {
            let mut parts = line.trim().split(',');
            let idx: usize = parts
                .next()
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad dual line {line:?}")))?;
            if idx > n {
                return Err(Error::Parse(format!("mode {idx} beyond N={n}")));
            }
            let p: f64 = parts
                .next()
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad dual line {line:?}")))?;
            let q: f64 = parts
                .next()
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad dual line {line:?}")))?;
            phi[idx] = p;
            psi[idx] = q;
        }
        Self::new(phi, psi)
    }
}

/// The solved boundary history of a dual vector: `ζ`, its odd integral part
/// `η`, and the drift coefficient `φ₀` of the linear-in-t term.
#[derive(Debug, Clone)]
pub struct DualProfile {
    psi0: f64,
    drift: f64,
    cos_coef: Vec<f64>,
    sin_coef: Vec<f64>,
}

impl DualProfile {
    /// `ζ(t) = Σ_{n≠0}(ψₙ cos nt + (φₙ/n) sin nt) + ψ₀ + φ₀ t`.
    pub fn zeta(&self, t: f64) -> f64 {
        self.value_with_drift_scale(t, 1.0)
    }

    /// `η(t) = ∫₀ᵗ ξ₀ = Σ (φₙ/n) sin nt + φ₀ t`; `η(0) = 0`.
    pub fn eta(&self, t: f64) -> f64 {
        let mut s = self.drift * t;
        for (k, &c) in self.sin_coef.iter().enumerate() {
            s += c * ((k + 1) as f64 * t).sin();
        }
        s
    }

    /// The even component `ξ₁(t) = Σ ψₙ cos nt + ψ₀`.
    pub fn xi1(&self, t: f64) -> f64 {
        let mut s = self.psi0;
        for (k, &c) in self.cos_coef.iter().enumerate() {
            s += c * ((k + 1) as f64 * t).cos();
        }
        s
    }

    /// Coefficient `φ₀` of the linear-in-t term.
    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Highest mode index, used to size quadrature sampling.
    pub fn degree(&self) -> usize {
        self.cos_coef.len()
    }

    /// `ζ` with the drift term rescaled: the periodic part plus
    /// `φ₀·scale·t`. `scale = 1` is `ζ` itself; `scale = 1/T` is the
    /// normalized-support integrand.
    pub fn value_with_drift_scale(&self, t: f64, scale: f64) -> f64 {
        let mut s = self.psi0 + self.drift * scale * t;
        for (k, &c) in self.cos_coef.iter().enumerate() {
            let n = (k + 1) as f64;
            s += c * (n * t).cos();
        }
        for (k, &c) in self.sin_coef.iter().enumerate() {
            let n = (k + 1) as f64;
            s += c * (n * t).sin();
        }
        s
    }
}
