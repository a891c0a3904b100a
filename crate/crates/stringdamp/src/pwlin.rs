//! Exact algebra of piecewise-linear functions.
//!
//! A [`PiecewiseLinear`] function lives on `[0, P)` (periodic) or `[0, P]`
//! (a track segment). Segments are half-open and left-closed: the segment
//! starting at breakpoint `b_i` owns `[b_i, b_{i+1})`, and evaluation at a
//! breakpoint returns that segment's left value. Discontinuous functions are
//! first-class — sign selections and controls jump by construction.
//!
//! All operations are exact per piece: combination unions breakpoints,
//! level-crossing refinement solves each linear piece in closed form, and
//! integration uses the per-segment antiderivative. The only tolerances are
//! the breakpoint dedup width [`BREAK_TOL`] and ordinary f64 rounding.

use crate::{Error, Result};

/// Absolute tolerance for breakpoint deduplication.
pub const BREAK_TOL: f64 = 1e-12;

/// Slack allowed when checking non-periodic evaluation bounds.
const DOMAIN_SLACK: f64 = 1e-9;

/// A possibly discontinuous piecewise-linear real function.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    domain_length: f64,
    periodic: bool,
    breaks: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

/// What [`PiecewiseLinear::integrate`] integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralKind {
    Plain,
    Abs,
    Square,
}

/// Result of [`PiecewiseLinear::refine_crossings`].
#[derive(Debug, Clone)]
pub struct CrossingRefinement {
    /// The same function with breakpoints inserted at every interior
    /// solution of `f(x) = ±level`.
    pub function: PiecewiseLinear,
    /// True when some zero-slope segment sits identically at `+level` or
    /// `-level`; such segments map to the multivalued branch of the
    /// dry-friction resolvent.
    pub touches_level: bool,
}

impl PiecewiseLinear {
    /// Builds a function from `(breakpoint, left_value, slope)` triples.
    ///
    /// Breakpoints must be finite, strictly increasing, start at exactly 0,
    /// and stay below `domain_length`.
    pub fn new(
        domain_length: f64,
        periodic: bool,
        segments: Vec<(f64, f64, f64)>,
    ) -> Result<Self> {
        if !(domain_length.is_finite() && domain_length > 0.0) {
            return Err(Error::Parse(format!("bad domain length {domain_length}")));
        }
        if segments.is_empty() {
            return Err(Error::Parse("no segments".into()));
        }
        if segments[0].0 != 0.0 {
            return Err(Error::Parse(format!(
                "first breakpoint must be 0, got {}",
                segments[0].0
            )));
        }
        let mut breaks = Vec::with_capacity(segments.len());
        let mut values = Vec::with_capacity(segments.len());
        let mut slopes = Vec::with_capacity(segments.len());
        for &(b, v, m) in &segments {
            if !(b.is_finite() && v.is_finite() && m.is_finite()) {
                return Err(Error::Parse("non-finite segment data".into()));
            }
            if let Some(&prev) = breaks.last() {
                if b <= prev {
                    return Err(Error::Parse(format!(
                        "breakpoints not strictly increasing at {b}"
                    )));
                }
            }
            if b >= domain_length {
                return Err(Error::Parse(format!(
                    "breakpoint {b} not below the domain length {domain_length}"
                )));
            }
            breaks.push(b);
            values.push(v);
            slopes.push(m);
        }
        Ok(Self { domain_length, periodic, breaks, values, slopes })
    }

    /// The constant function `c`.
    pub fn constant(c: f64, domain_length: f64, periodic: bool) -> Self {
        Self::new(domain_length, periodic, vec![(0.0, c, 0.0)]).expect("constant is valid")
    }

    /// Continuous interpolant through `(x, y)` nodes.
    ///
    /// Nodes must start at `x = 0` and be strictly increasing. On a periodic
    /// domain the last segment closes back to the first node's value; on a
    /// non-periodic domain `(x, y)` pairs with `x = domain_length` pin the
    /// right endpoint, otherwise the last slope is zero.
    pub fn interpolant(
        domain_length: f64,
        periodic: bool,
        nodes: &[(f64, f64)],
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Parse("no interpolation nodes".into()));
        }
        let mut inner: Vec<(f64, f64)> = Vec::new();
        let mut right_end: Option<f64> = None;
        for &(x, y) in nodes {
            if x >= domain_length {
                if (x - domain_length).abs() <= BREAK_TOL {
                    right_end = Some(y);
                    continue;
                }
                return Err(Error::Parse(format!("node {x} outside the domain")));
            }
            inner.push((x, y));
        }
        let mut segs = Vec::with_capacity(inner.len());
        for i in 0..inner.len() {
            let (x, y) = inner[i];
            let (x_next, y_next) = if i + 1 < inner.len() {
                inner[i + 1]
            } else if periodic {
                (domain_length, inner[0].1)
            } else if let Some(y_end) = right_end {
                (domain_length, y_end)
            } else {
                (domain_length, y)
            };
            let slope = (y_next - y) / (x_next - x);
            segs.push((x, y, slope));
        }
        Self::new(domain_length, periodic, segs)
    }

    /// Piecewise-constant function with value `v` on `[x_i, x_{i+1})`.
    pub fn piecewise_constant(
        domain_length: f64,
        periodic: bool,
        steps: &[(f64, f64)],
    ) -> Result<Self> {
        Self::new(
            domain_length,
            periodic,
            steps.iter().map(|&(x, v)| (x, v, 0.0)).collect(),
        )
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn segment_count(&self) -> usize {
        self.breaks.len()
    }

    /// `(breakpoint, left_value, slope)` of segment `i`.
    pub fn segment(&self, i: usize) -> (f64, f64, f64) {
        (self.breaks[i], self.values[i], self.slopes[i])
    }

    /// Right end of segment `i` (the domain length for the last segment).
    fn segment_end(&self, i: usize) -> f64 {
        if i + 1 < self.breaks.len() { self.breaks[i + 1] } else { self.domain_length }
    }

    /// Value just left of the right end of segment `i`.
    fn right_limit(&self, i: usize) -> f64 {
        self.values[i] + self.slopes[i] * (self.segment_end(i) - self.breaks[i])
    }

    /// Index of the segment whose half-open interval contains `x ∈ [0, P)`.
    fn segment_index(&self, x: f64) -> usize {
        self.breaks.partition_point(|&b| b <= x).saturating_sub(1)
    }

    /// Reduces `x` into `[0, P)` for a periodic function.
    fn wrap(&self, x: f64) -> f64 {
        let p = self.domain_length;
        let mut r = x % p;
        if r < 0.0 {
            r += p;
        }
        if r >= p {
            // The += above can round up to exactly p.
            r = 0.0;
        }
        r
    }

    /// Evaluates the function, wrapping periodic arguments.
    ///
    /// Non-periodic functions reject arguments outside `[0, P]`; at `x = P`
    /// the last segment's right limit is returned.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let xr = if self.periodic {
            self.wrap(x)
        } else {
            if x < -DOMAIN_SLACK || x > self.domain_length + DOMAIN_SLACK {
                return Err(Error::OutOfDomain { x, domain_length: self.domain_length });
            }
            x.clamp(0.0, self.domain_length)
        };
        if xr >= self.domain_length {
            return Ok(self.right_limit(self.breaks.len() - 1));
        }
        let i = self.segment_index(xr);
        Ok(self.values[i] + self.slopes[i] * (xr - self.breaks[i]))
    }

    /// Shorthand for `eval` where the argument is known to be in range.
    pub fn at(&self, x: f64) -> f64 {
        self.eval(x).expect("argument within domain")
    }

    /// Slope of the segment containing `x`.
    pub fn slope_at(&self, x: f64) -> f64 {
        let xr = if self.periodic { self.wrap(x) } else { x.clamp(0.0, self.domain_length) };
        if xr >= self.domain_length {
            return self.slopes[self.breaks.len() - 1];
        }
        self.slopes[self.segment_index(xr)]
    }

    /// Left-closed `(value, slope)` at `x`, treating anything within
    /// [`BREAK_TOL`] of a breakpoint as that breakpoint.
    ///
    /// Breakpoints of different functions that describe the same point can
    /// land a few ulps apart; naive evaluation at the cluster representative
    /// would then read the wrong side of a jump. Off-breakpoint arguments
    /// evaluate normally.
    pub(crate) fn union_value_slope(&self, x: f64) -> (f64, f64) {
        let xr = if self.periodic { self.wrap(x) } else { x.clamp(0.0, self.domain_length) };
        if xr >= self.domain_length {
            let i = self.breaks.len() - 1;
            return (self.right_limit(i), self.slopes[i]);
        }
        let i = self.segment_index(xr);
        if xr - self.breaks[i] <= BREAK_TOL {
            return (self.values[i], self.slopes[i]);
        }
        let next = self.segment_end(i);
        if next - xr <= BREAK_TOL {
            if i + 1 < self.breaks.len() {
                return (self.values[i + 1], self.slopes[i + 1]);
            }
            if self.periodic {
                return (self.values[0], self.slopes[0]);
            }
        }
        (self.values[i] + self.slopes[i] * (xr - self.breaks[i]), self.slopes[i])
    }

    /// Exact linear combination `a·self + b·other` on the breakpoint union.
    pub fn combine(&self, other: &Self, a: f64, b: f64) -> Result<Self> {
        if self.periodic != other.periodic
            || (self.domain_length - other.domain_length).abs() > BREAK_TOL
        {
            return Err(Error::DomainMismatch);
        }
        let mut union = Vec::with_capacity(self.breaks.len() + other.breaks.len());
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.breaks.len() || j < other.breaks.len() {
            let x = match (self.breaks.get(i), other.breaks.get(j)) {
                (Some(&bi), Some(&bj)) => {
                    if bi <= bj {
                        i += 1;
                        if (bj - bi).abs() <= BREAK_TOL {
                            j += 1;
                        }
                        bi
                    } else {
                        j += 1;
                        bj
                    }
                }
                (Some(&bi), None) => {
                    i += 1;
                    bi
                }
                (None, Some(&bj)) => {
                    j += 1;
                    bj
                }
                (None, None) => unreachable!(),
            };
            if union.last().is_none_or(|&last| x - last > BREAK_TOL) {
                union.push(x);
            }
        }
        let segs = union
            .iter()
            .map(|&x| {
                let (vf, mf) = self.union_value_slope(x);
                let (vg, mg) = other.union_value_slope(x);
                (x, a * vf + b * vg, a * mf + b * mg)
            })
            .collect();
        Self::new(self.domain_length, self.periodic, segs)
    }

    /// `a·self`, exact per segment.
    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= a;
        }
        for m in &mut out.slopes {
            *m *= a;
        }
        out
    }

    /// `self + c`, exact per segment.
    pub fn offset(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v += c;
        }
        out
    }

    /// Reflection `x ↦ f((P − x) mod P)` of a periodic function.
    ///
    /// Left-closed breakpoint values become right limits under reflection, so
    /// the result agrees with the reflected function at all non-breakpoint
    /// points (the usual measure-zero convention).
    pub fn reflect(&self) -> Result<Self> {
        if !self.periodic {
            return Err(Error::NotPeriodic);
        }
        let p = self.domain_length;
        let n = self.breaks.len();
        let mut segs = Vec::with_capacity(n);
        for i in (0..n).rev() {
            let e = self.segment_end(i);
            let z = if i == n - 1 { 0.0 } else { p - e };
            segs.push((z, self.right_limit(i), -self.slopes[i]));
        }
        Self::new(p, true, segs)
    }

    /// Even and odd parts `½(f(x) ± f(−x))` of a periodic function.
    pub fn even_odd_parts(&self) -> Result<(Self, Self)> {
        let r = self.reflect()?;
        let even = self.combine(&r, 0.5, 0.5)?;
        let odd = self.combine(&r, 0.5, -0.5)?;
        Ok((even, odd))
    }

    /// Sup-type norm, exact on the segment endpoints.
    ///
    /// Plain: `max |f|`. With `quotient_constants`, constants are null and the
    /// norm is `½(sup f − inf f)`.
    pub fn sup_norm(&self, quotient_constants: bool) -> f64 {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for i in 0..self.breaks.len() {
            for v in [self.values[i], self.right_limit(i)] {
                hi = hi.max(v);
                lo = lo.min(v);
            }
        }
        if quotient_constants {
            0.5 * (hi - lo)
        } else {
            hi.abs().max(lo.abs())
        }
    }

    /// Inserts breakpoints at every interior solution of `f(x) = ±level`.
    ///
    /// On each output segment `f − level` and `f + level` keep a constant
    /// sign or vanish identically; identically-at-level zero-slope segments
    /// are kept and flagged.
    pub fn refine_crossings(&self, level: f64) -> CrossingRefinement {
        let mut touches = false;
        let mut segs: Vec<(f64, f64, f64)> = Vec::with_capacity(self.breaks.len());
        let levels: &[f64] = if level == 0.0 { &[0.0] } else { &[level, -level] };
        for i in 0..self.breaks.len() {
            let (b, v, m) = (self.breaks[i], self.values[i], self.slopes[i]);
            let e = self.segment_end(i);
            segs.push((b, v, m));
            if m == 0.0 {
                if levels.contains(&v) {
                    touches = true;
                }
                continue;
            }
            let mut roots: Vec<(f64, f64)> = Vec::new();
            for &l in levels {
                let x = b + (l - v) / m;
                if x - b > BREAK_TOL && e - x > BREAK_TOL {
                    roots.push((x, l));
                }
            }
            roots.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
            for (x, l) in roots {
                // The left value at a crossing is the level itself.
                segs.push((x, l, m));
            }
        }
        let function = Self::new(self.domain_length, self.periodic, segs)
            .expect("refinement keeps breakpoints ordered");
        CrossingRefinement { function, touches_level: touches }
    }

    /// Closed-form integral of `f`, `|f|`, or `f²` over `[a, b]`.
    ///
    /// Periodic functions allow any bounds with `b − a ≤ P` (unwrapped
    /// across the period); non-periodic ones require `0 ≤ a ≤ b ≤ P`.
    pub fn integrate(&self, a: f64, b: f64, kind: IntegralKind) -> Result<f64> {
        if b < a {
            return Err(Error::InvertedBounds { a, b });
        }
        let p = self.domain_length;
        if self.periodic {
            if b - a > p + DOMAIN_SLACK {
                return Err(Error::InvertedBounds { a, b });
            }
        } else if a < -DOMAIN_SLACK || b > p + DOMAIN_SLACK {
            return Err(Error::OutOfDomain { x: if a < 0.0 { a } else { b }, domain_length: p });
        }

        if kind == IntegralKind::Abs {
            let refined = self.refine_crossings(0.0).function;
            return refined.integrate_signed_pieces(a, b);
        }

        let (lo, hi) = if self.periodic {
            let s = self.wrap(a);
            (s, s + (b - a))
        } else {
            (a.max(0.0), b.min(p))
        };
        let mut acc = 0.0;
        // At most one wrap because b − a ≤ P.
        let mut x0 = lo;
        while x0 < hi {
            let (xr, shift) = if x0 >= p { (x0 - p, p) } else { (x0, 0.0) };
            let i = self.segment_index(xr.min(p * (1.0 - f64::EPSILON)));
            let seg_end = self.segment_end(i) + shift;
            let x1 = seg_end.min(hi);
            let h = x1 - x0;
            if h > 0.0 {
                let v0 = self.values[i] + self.slopes[i] * (xr - self.breaks[i]);
                let m = self.slopes[i];
                acc += match kind {
                    IntegralKind::Plain => h * (v0 + 0.5 * m * h),
                    IntegralKind::Square => {
                        h * (v0 * v0 + v0 * m * h + m * m * h * h / 3.0)
                    }
                    IntegralKind::Abs => unreachable!(),
                };
            }
            if x1 <= x0 {
                break;
            }
            x0 = x1;
        }
        Ok(acc)
    }

    /// Plain integration of a sign-refined function, accumulating `|piece|`.
    fn integrate_signed_pieces(&self, a: f64, b: f64) -> Result<f64> {
        let p = self.domain_length;
        let (lo, hi) = if self.periodic {
            let s = self.wrap(a);
            (s, s + (b - a))
        } else {
            (a.max(0.0), b.min(p))
        };
        let mut acc = 0.0;
        let mut x0 = lo;
        while x0 < hi {
            let (xr, shift) = if x0 >= p { (x0 - p, p) } else { (x0, 0.0) };
            let i = self.segment_index(xr.min(p * (1.0 - f64::EPSILON)));
            let seg_end = self.segment_end(i) + shift;
            let x1 = seg_end.min(hi);
            let h = x1 - x0;
            if h > 0.0 {
                let v0 = self.values[i] + self.slopes[i] * (xr - self.breaks[i]);
                acc += (h * (v0 + 0.5 * self.slopes[i] * h)).abs();
            }
            if x1 <= x0 {
                break;
            }
            x0 = x1;
        }
        Ok(acc)
    }

    /// Mean value over the domain.
    pub fn mean(&self) -> f64 {
        self.integrate(0.0, self.domain_length, IntegralKind::Plain).unwrap()
            / self.domain_length
    }

    /// The periodic shift `x ↦ f(x + dt)`.
    pub fn shift(&self, dt: f64) -> Result<Self> {
        if !self.periodic {
            return Err(Error::NotPeriodic);
        }
        let p = self.domain_length;
        let s = self.wrap(dt);
        if s == 0.0 {
            return Ok(self.clone());
        }
        let mut segs: Vec<(f64, f64, f64)> = Vec::with_capacity(self.breaks.len() + 1);
        let (v0, m0) = self.union_value_slope(s);
        segs.push((0.0, v0, m0));
        for i in 0..self.breaks.len() {
            let mut z = self.breaks[i] - s;
            if z < 0.0 {
                z += p;
            }
            if z <= BREAK_TOL || z >= p - BREAK_TOL {
                continue;
            }
            segs.push((z, self.values[i], self.slopes[i]));
        }
        segs.sort_by(|u, w| u.0.partial_cmp(&w.0).unwrap());
        Self::new(p, true, segs)
    }

    /// Piecewise-constant derivative (slopes become values).
    ///
    /// Jumps of `f` are ignored; the derivative is taken segment by segment.
    pub fn derivative(&self) -> Self {
        let segs = self
            .breaks
            .iter()
            .zip(&self.slopes)
            .map(|(&b, &m)| (b, m, 0.0))
            .collect();
        Self::new(self.domain_length, self.periodic, segs).expect("same breakpoints")
    }

    /// Zero-mean antiderivative of a piecewise-constant function.
    ///
    /// Only piecewise-constant inputs keep the result piecewise linear;
    /// sloped segments are rejected.
    pub fn cumulative(&self) -> Result<Self> {
        if self.slopes.iter().any(|&m| m.abs() > BREAK_TOL) {
            return Err(Error::NotPiecewiseConstant);
        }
        let mut segs = Vec::with_capacity(self.breaks.len());
        let mut running = 0.0;
        for i in 0..self.breaks.len() {
            segs.push((self.breaks[i], running, self.values[i]));
            running += self.values[i] * (self.segment_end(i) - self.breaks[i]);
        }
        let f = Self::new(self.domain_length, self.periodic, segs)?;
        let mean = f.mean();
        Ok(f.offset(-mean))
    }

    /// Serializes to the PWL exchange format.
    ///
    /// One line per segment, `breakpoint,left_value,slope`, after a header
    /// `#pwl period=<P> periodic=<0|1>`. 17 significant digits round-trip
    /// f64 bit-exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "#pwl period={:.16e} periodic={}\n",
            self.domain_length,
            if self.periodic { 1 } else { 0 }
        );
        for i in 0..self.breaks.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                self.breaks[i], self.values[i], self.slopes[i]
            ));
        }
        out
    }

    /// Parses the PWL exchange format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty PWL text".into()))?;
        let header = header
            .strip_prefix("#pwl ")
            .ok_or_else(|| Error::Parse("missing #pwl header".into()))?;
        let mut period = None;
        let mut periodic = None;
        for field in header.split_whitespace() {
            if let Some(v) = field.strip_prefix("period=") {
                period = Some(parse_f64(v)?);
            } else if let Some(v) = field.strip_prefix("periodic=") {
                periodic = Some(match v {
                    "1" => true,
                    "0" => false,
                    _ => return Err(Error::Parse(format!("bad periodic flag {v}"))),
                });
            }
        }
        let period = period.ok_or_else(|| Error::Parse("header missing period".into()))?;
        let periodic = periodic.ok_or_else(|| Error::Parse("header missing periodic".into()))?;
        let mut segs = Vec::new();
        for line in lines {
            let mut parts = line.trim().split(',');
            let b = parse_f64(parts.next().unwrap_or(""))?;
            let v = parse_f64(parts.next().ok_or_else(|| Error::Parse(line.into()))?)?;
            let m = parse_f64(parts.next().ok_or_else(|| Error::Parse(line.into()))?)?;
            segs.push((b, v, m));
        }
        Self::new(period, periodic, segs)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn hat() -> PiecewiseLinear {
        // min(x, 2π−x): rises 0→π with slope 1, falls back with slope −1.
        PiecewiseLinear::new(TAU, true, vec![(0.0, 0.0, 1.0), (PI, PI, -1.0)]).unwrap()
    }

    #[test]
    fn eval_constant_and_linear() {
        let c = PiecewiseLinear::constant(2.0, TAU, true);
        assert_eq!(c.at(PI), 2.0);

        let f = PiecewiseLinear::new(
            TAU,
            true,
            vec![(0.0, 0.0, 1.0 / PI), (PI, 1.0, -1.0 / PI)],
        )
        .unwrap();
        assert!((f.at(PI / 2.0) - 0.5).abs() < 1e-15);
        // Left-closed convention: x = π belongs to the segment starting there.
        assert_eq!(f.at(PI), 1.0);
    }

    #[test]
    fn eval_outside_nonperiodic_domain_fails() {
        let f = PiecewiseLinear::constant(1.0, TAU, false);
        assert!(matches!(f.eval(7.0), Err(Error::OutOfDomain { .. })));
        assert_eq!(f.eval(TAU).unwrap(), 1.0);
    }

    #[test]
    fn combine_constants_and_cancellation() {
        let f = PiecewiseLinear::constant(2.0, TAU, true);
        let g = PiecewiseLinear::constant(0.5, TAU, true);
        let h = f.combine(&g, 1.0, -1.0).unwrap();
        assert_eq!(h.at(1.0), 1.5);

        let z = hat().combine(&hat(), 1.0, -1.0).unwrap();
        for k in 0..20 {
            assert_eq!(z.at(0.3 * k as f64), 0.0);
        }
    }

    #[test]
    fn combine_unions_breakpoints() {
        let f = PiecewiseLinear::constant(2.0, TAU, true);
        let h = f.combine(&hat(), 1.0, 1.0).unwrap();
        assert_eq!(h.breakpoints(), &[0.0, PI]);
    }

    #[test]
    fn combine_domain_mismatch() {
        let f = PiecewiseLinear::constant(1.0, TAU, true);
        let g = PiecewiseLinear::constant(1.0, 1.0, true);
        assert!(matches!(f.combine(&g, 1.0, 1.0), Err(Error::DomainMismatch)));
        let g = PiecewiseLinear::constant(1.0, TAU, false);
        assert!(matches!(f.combine(&g, 1.0, 1.0), Err(Error::DomainMismatch)));
    }

    #[test]
    fn even_odd_of_constant_and_hat() {
        let c = PiecewiseLinear::constant(3.0, TAU, true);
        let (even, odd) = c.even_odd_parts().unwrap();
        assert_eq!(even.at(1.0), 3.0);
        assert_eq!(odd.at(1.0), 0.0);

        let (even, odd) = hat().even_odd_parts().unwrap();
        for k in 1..40 {
            let x = 0.15 * k as f64;
            assert!((even.at(x) - hat().at(x)).abs() < 1e-14);
            assert!(odd.at(x).abs() < 1e-14);
        }
    }

    #[test]
    fn even_odd_of_step() {
        // 1 on [0,π), 0 on [π,2π): even part ½, odd part ±½.
        let f =
            PiecewiseLinear::piecewise_constant(TAU, true, &[(0.0, 1.0), (PI, 0.0)]).unwrap();
        let (even, odd) = f.even_odd_parts().unwrap();
        for k in 1..40 {
            let x = 0.15 * k as f64;
            if (x - PI).abs() < 1e-9 {
                continue;
            }
            assert!((even.at(x) - 0.5).abs() < 1e-15);
            assert!((odd.at(x).abs() - 0.5).abs() < 1e-15);
            // Parity at mirrored samples.
            assert!((even.at(TAU - x) - even.at(x)).abs() < 1e-15);
            assert!((odd.at(TAU - x) + odd.at(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn even_odd_requires_periodic() {
        let f = PiecewiseLinear::constant(1.0, TAU, false);
        assert!(matches!(f.even_odd_parts(), Err(Error::NotPeriodic)));
    }

    #[test]
    fn sup_norms() {
        let c = PiecewiseLinear::constant(-2.5, TAU, true);
        assert_eq!(c.sup_norm(false), 2.5);
        assert_eq!(c.sup_norm(true), 0.0);

        // Hat from 0 to 1.
        let f = PiecewiseLinear::new(
            TAU,
            true,
            vec![(0.0, 0.0, 1.0 / PI), (PI, 1.0, -1.0 / PI)],
        )
        .unwrap();
        assert_eq!(f.sup_norm(true), 0.5);
        assert_eq!(f.sup_norm(false), 1.0);
    }

    #[test]
    fn quotient_norm_ignores_constants() {
        let f = hat();
        let g = f.offset(17.25);
        assert!((f.sup_norm(true) - g.sup_norm(true)).abs() < 1e-12);
    }

    #[test]
    fn refine_crossings_inserts_interior_roots() {
        // Linear 0→2 over [0,2π): crossings of ±½ inside the segment happen
        // only at x = π/2 (the −½ solution lies outside the piece).
        let f = PiecewiseLinear::new(TAU, true, vec![(0.0, 0.0, 2.0 / TAU)]).unwrap();
        let r = f.refine_crossings(0.5);
        assert!(!r.touches_level);
        assert_eq!(r.function.breakpoints().len(), 2);
        assert!((r.function.breakpoints()[1] - PI / 2.0).abs() < 1e-12);
        assert_eq!(r.function.at(PI / 2.0), 0.5);
    }

    #[test]
    fn refine_crossings_degenerate_cases() {
        let f = PiecewiseLinear::constant(2.0, TAU, true);
        let r = f.refine_crossings(0.5);
        assert_eq!(r.function.breakpoints(), &[0.0]);
        assert!(!r.touches_level);

        let f = PiecewiseLinear::constant(0.5, TAU, true);
        let r = f.refine_crossings(0.5);
        assert_eq!(r.function.breakpoints(), &[0.0]);
        assert!(r.touches_level);
    }

    #[test]
    fn integrate_closed_forms() {
        let f = PiecewiseLinear::constant(2.0, TAU, true);
        assert!((f.integrate(0.0, TAU, IntegralKind::Abs).unwrap() - 2.0 * TAU).abs() < 1e-12);

        // Sawtooth x − π: |∫| = π² (two triangles), ∫ = 0, ∫² = 2π³/3.
        let s = PiecewiseLinear::new(TAU, true, vec![(0.0, -PI, 1.0)]).unwrap();
        assert!((s.integrate(0.0, TAU, IntegralKind::Abs).unwrap() - PI * PI).abs() < 1e-10);
        assert!(s.integrate(0.0, TAU, IntegralKind::Plain).unwrap().abs() < 1e-10);
        assert!(
            (s.integrate(0.0, TAU, IntegralKind::Square).unwrap() - 2.0 * PI.powi(3) / 3.0)
                .abs()
                < 1e-9
        );

        let c = PiecewiseLinear::constant(-1.5, TAU, true);
        assert!(
            (c.integrate(0.0, TAU, IntegralKind::Square).unwrap() - TAU * 2.25).abs() < 1e-12
        );
    }

    #[test]
    fn integrate_rejects_inverted_bounds() {
        let f = PiecewiseLinear::constant(1.0, TAU, true);
        assert!(matches!(
            f.integrate(2.0, 1.0, IntegralKind::Plain),
            Err(Error::InvertedBounds { .. })
        ));
    }

    #[test]
    fn integrate_unwraps_periodic_window() {
        let s = PiecewiseLinear::new(TAU, true, vec![(0.0, -PI, 1.0)]).unwrap();
        // Window crossing the wrap: ∫ over [3π/2, 2π + π/2].
        let direct = s.integrate(3.0 * PI / 2.0, TAU, IntegralKind::Plain).unwrap()
            + s.integrate(0.0, PI / 2.0, IntegralKind::Plain).unwrap();
        let wrapped =
            s.integrate(3.0 * PI / 2.0, TAU + PI / 2.0, IntegralKind::Plain).unwrap();
        assert!((direct - wrapped).abs() < 1e-12);
    }

    #[test]
    fn shift_matches_pointwise() {
        let f = hat();
        let g = f.shift(1.3).unwrap();
        for k in 0..50 {
            let x = 0.11 * k as f64;
            assert!((g.at(x) - f.at(x + 1.3)).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn shifts_compose(seed in 0u64..300) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = random_pwl(&mut rng);
            let a = rng.gen_range(0.0..TAU);
            let b = rng.gen_range(0.0..TAU);
            let two_step = f.shift(a).unwrap().shift(b).unwrap();
            let one_step = f.shift(a + b).unwrap();
            for _ in 0..300 {
                let x: f64 = rng.gen_range(0.0..TAU);
                if near_breakpoint(&two_step, x) || near_breakpoint(&one_step, x) {
                    continue;
                }
                prop_assert!((two_step.at(x) - one_step.at(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cumulative_of_step_is_continuous() {
        let f = PiecewiseLinear::piecewise_constant(TAU, true, &[(0.0, 1.0), (PI, -1.0)])
            .unwrap();
        let g = f.cumulative().unwrap();
        // Continuity at the interior breakpoint and across the wrap.
        assert!((g.at(PI - 1e-9) - g.at(PI)).abs() < 1e-8);
        assert!((g.at(TAU - 1e-9) - g.at(0.0)).abs() < 1e-8);
        assert!(g.mean().abs() < 1e-14);
        // Slope equals the integrand.
        assert_eq!(g.slope_at(1.0), 1.0);
        assert_eq!(g.slope_at(4.0), -1.0);
    }

    #[test]
    fn text_roundtrip_is_bit_exact() {
        let f = PiecewiseLinear::new(
            TAU,
            true,
            vec![(0.0, 1.0 / 3.0, -0.12345678912345678), (PI / 3.0, -2.0 / 7.0, 0.25)],
        )
        .unwrap();
        let g = PiecewiseLinear::from_text(&f.to_text()).unwrap();
        assert_eq!(f.breakpoints(), g.breakpoints());
        for i in 0..f.segment_count() {
            assert_eq!(f.segment(i), g.segment(i));
        }
        assert_eq!(f.domain_length().to_bits(), g.domain_length().to_bits());
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(PiecewiseLinear::new(TAU, true, vec![(0.1, 0.0, 0.0)]).is_err());
        assert!(
            PiecewiseLinear::new(TAU, true, vec![(0.0, 0.0, 0.0), (0.0, 1.0, 0.0)]).is_err()
        );
        assert!(PiecewiseLinear::new(TAU, true, vec![(0.0, 0.0, 0.0), (TAU, 1.0, 0.0)]).is_err());
    }

    proptest! {
        #[test]
        fn combine_is_pointwise(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = random_pwl(&mut rng);
            let g = random_pwl(&mut rng);
            let a = rng.gen_range(-2.0..2.0);
            let b = rng.gen_range(-2.0..2.0);
            let h = f.combine(&g, a, b).unwrap();
            for _ in 0..1000 {
                let x: f64 = rng.gen_range(0.0..TAU);
                if near_breakpoint(&h, x) {
                    continue;
                }
                let want = a * f.at(x) + b * g.at(x);
                prop_assert!((h.at(x) - want).abs() < 1e-12);
            }
        }

        #[test]
        fn refine_preserves_eval(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = random_pwl(&mut rng);
            let level = rng.gen_range(0.0..1.0);
            let r = f.refine_crossings(level).function;
            for _ in 0..1000 {
                let x: f64 = rng.gen_range(0.0..TAU);
                prop_assert!((r.at(x) - f.at(x)).abs() < 1e-12);
            }
        }

        #[test]
        fn abs_integral_dominates_plain(seed in 0u64..500) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = random_pwl(&mut rng);
            let plain = f.integrate(0.0, TAU, IntegralKind::Plain).unwrap();
            let abs = f.integrate(0.0, TAU, IntegralKind::Abs).unwrap();
            let square = f.integrate(0.0, TAU, IntegralKind::Square).unwrap();
            prop_assert!(abs + 1e-12 >= plain.abs());
            prop_assert!(square >= 0.0);
        }

        #[test]
        fn even_plus_odd_reconstructs(seed in 0u64..300) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = random_pwl(&mut rng);
            let (even, odd) = f.even_odd_parts().unwrap();
            for _ in 0..500 {
                let x: f64 = rng.gen_range(0.0..TAU);
                if near_breakpoint(&even, x) || near_breakpoint(&even, TAU - x) {
                    continue;
                }
                prop_assert!((even.at(x) + odd.at(x) - f.at(x)).abs() < 1e-12);
                prop_assert!((even.at(TAU - x) - even.at(x)).abs() < 1e-12);
                prop_assert!((odd.at(TAU - x) + odd.at(x)).abs() < 1e-12);
            }
        }
    }

    fn near_breakpoint(f: &PiecewiseLinear, x: f64) -> bool {
        f.breakpoints().iter().any(|&b| (b - x).abs() < 1e-9 || (TAU - x).abs() < 1e-9)
    }

    fn random_pwl(rng: &mut rand_chacha::ChaCha8Rng) -> PiecewiseLinear {
        use rand::Rng;
        let n = rng.gen_range(1..8usize);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..TAU - 0.01)).collect();
        xs.push(0.0);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let segs = xs
            .iter()
            .map(|&x| (x, rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5)))
            .collect();
        PiecewiseLinear::new(TAU, true, segs).unwrap()
    }
}
