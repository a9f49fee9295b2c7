//! Univariate polynomial arithmetic and certified extremum/root search on
//! closed intervals.
//!
//! Everything downstream (mergability tests, compression certificates,
//! verification) reduces to computing the exact supremum of |p| on an
//! interval, which in turn reduces to locating the real roots of p'. Roots
//! of degree <= 2 use closed forms; higher degrees recurse on the derivative
//! to obtain monotone segments and bisect sign changes, with a short Newton
//! polish so reported roots satisfy |p(x)| <= max-coeff * tol.

use crate::error::{Error, Result};
use crate::{DEFAULT_ROOT_TOL, MAX_BISECTION_ITERS};
use serde::{Deserialize, Serialize};

/// Univariate real polynomial in the monomial basis, constant term first.
///
/// The canonical form has no trailing zero coefficients; the zero polynomial
/// is the empty coefficient list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

/// Closed interval `[lo, hi]` with `lo <= hi`.
///
/// A degenerate interval (`lo == hi`) is permitted as an evaluation point but
/// never as a spline region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Result of a root search: either the polynomial is identically zero (every
/// point is a root, reported as a distinguished outcome instead of an
/// infinite set) or a finite list of located roots in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub enum RootSearch {
    IdenticallyZero,
    Roots(Vec<f64>),
}

impl RootSearch {
    /// The located roots, with the identically-zero outcome mapped to none.
    pub fn into_points(self) -> Vec<f64> {
        match self {
            RootSearch::IdenticallyZero => Vec::new(),
            RootSearch::Roots(r) => r,
        }
    }
}

/// A certified extremum of |p| on an interval: the value and a witness point
/// attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub argmax: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::invalid(format!(
                "interval bounds must be finite with lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `n` Chebyshev points of this interval, strictly interior, ascending.
    pub fn chebyshev_points(&self, n: usize) -> Vec<f64> {
        let (a, b) = (self.lo, self.hi);
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        (0..n)
            .map(|i| {
                let theta = std::f64::consts::PI * (2.0 * (n - i) as f64 - 1.0) / (2.0 * n as f64);
                c + h * theta.cos()
            })
            .collect()
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

impl Polynomial {
    /// Builds a polynomial from coefficients (constant first), trimming
    /// trailing zeros so the leading coefficient is nonzero or the list is
    /// empty.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Polynomial {
            coeffs: vec![0.0, 1.0],
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the canonical form; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Coefficient-wise sum.
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(0.0)
                    + other.coeffs.get(i).copied().unwrap_or(0.0)
            })
            .collect();
        Polynomial::new(coeffs)
    }

    /// Coefficient-wise difference, canonicalized.
    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(0.0)
                    - other.coeffs.get(i).copied().unwrap_or(0.0)
            })
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, factor: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Formal derivative, canonicalized.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        Polynomial::new(coeffs)
    }

    /// Substitutes x -> a*x + b, returning p(a*x + b) expanded in the
    /// monomial basis (Horner-style composition).
    pub fn compose_affine(&self, a: f64, b: f64) -> Polynomial {
        let mut acc = Polynomial::zero();
        for &c in self.coeffs.iter().rev() {
            // acc = acc * (a x + b) + c
            let mut next = vec![0.0; acc.coeffs.len() + 1];
            for (k, &ac) in acc.coeffs.iter().enumerate() {
                next[k] += ac * b;
                next[k + 1] += ac * a;
            }
            next[0] += c;
            acc = Polynomial::new(next);
        }
        acc
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// All real roots of the canonical polynomial inside `iv`, each located
    /// to within `tol`. Closed forms handle degree <= 2; higher degrees
    /// recurse on the derivative to split `iv` into monotone segments whose
    /// sign changes are bisected and Newton-polished.
    ///
    /// The identically-zero polynomial yields [`RootSearch::IdenticallyZero`].
    pub fn roots_in(&self, iv: &Interval, tol: f64) -> Result<RootSearch> {
        if tol <= 0.0 {
            return Err(Error::invalid(format!(
                "root tolerance must be > 0, got {tol}"
            )));
        }
        if self.is_zero() {
            return Ok(RootSearch::IdenticallyZero);
        }
        let scale = self.max_coeff_magnitude();
        let near_zero = |v: f64| v.abs() <= scale * tol;
        let roots = match self.degree() {
            0 => Vec::new(),
            1 => {
                let r = -self.coeffs[0] / self.coeffs[1];
                if iv.lo - tol <= r && r <= iv.hi + tol {
                    vec![iv.clamp(r)]
                } else {
                    Vec::new()
                }
            }
            2 => {
                let (c, b, a) = (self.coeffs[0], self.coeffs[1], self.coeffs[2]);
                quadratic_roots(a, b, c)
                    .into_iter()
                    .filter(|r| iv.lo - tol <= *r && *r <= iv.hi + tol)
                    .map(|r| iv.clamp(r))
                    .collect()
            }
            _ => {
                let deriv = self.derivative();
                let crit = deriv.roots_in(iv, tol)?.into_points();
                let mut cuts = Vec::with_capacity(crit.len() + 2);
                cuts.push(iv.lo);
                for c in crit {
                    if c > iv.lo && c < iv.hi {
                        cuts.push(c);
                    }
                }
                cuts.push(iv.hi);
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();

                let mut roots = Vec::new();
                let values: Vec<f64> = cuts.iter().map(|&x| self.eval(x)).collect();
                for (i, &x) in cuts.iter().enumerate() {
                    // Cut points themselves can be roots (endpoints or
                    // even-multiplicity roots sitting at critical points).
                    if near_zero(values[i]) {
                        roots.push(x);
                    }
                }
                for i in 0..cuts.len() - 1 {
                    // The polynomial is monotone between consecutive cuts, so
                    // each segment holds at most one root; if an endpoint
                    // already qualified, the segment root coincides with it.
                    if near_zero(values[i]) || near_zero(values[i + 1]) {
                        continue;
                    }
                    if values[i].signum() * values[i + 1].signum() < 0.0 {
                        roots.push(self.bisect_root(cuts[i], cuts[i + 1], values[i], tol, scale));
                    }
                }
                roots
            }
        };
        let mut roots: Vec<f64> = roots;
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 4.0 * tol);
        Ok(RootSearch::Roots(roots))
    }

    /// Bisection on a bracketing segment followed by a safeguarded Newton
    /// polish, so the reported point has both |x - root| <= tol and a small
    /// residual.
    fn bisect_root(&self, mut a: f64, mut b: f64, fa: f64, tol: f64, scale: f64) -> f64 {
        let (lo, hi) = (a, b);
        let sign_a = fa.signum();
        let mut iters = 0usize;
        while b - a > tol && iters < MAX_BISECTION_ITERS {
            let m = 0.5 * (a + b);
            let fm = self.eval(m);
            if fm == 0.0 {
                return m;
            }
            if fm.signum() == sign_a {
                a = m;
            } else {
                b = m;
            }
            iters += 1;
        }
        let deriv = self.derivative();
        let mut x = 0.5 * (a + b);
        for _ in 0..32 {
            let f = self.eval(x);
            if f.abs() <= 0.25 * scale * tol {
                break;
            }
            let d = deriv.eval(x);
            if d == 0.0 {
                break;
            }
            let next = x - f / d;
            if !next.is_finite() || next < lo - tol || next > hi + tol {
                break;
            }
            x = next;
        }
        x.clamp(lo, hi)
    }

    /// Certified maximum of |p| over `iv`: the max of |p| at the interval
    /// endpoints and at the roots of p' inside it, with a witness point.
    pub fn sup_abs_on(&self, iv: &Interval) -> Extremum {
        let (min, max) = self.range_on(iv);
        if max.value.abs() >= min.value.abs() {
            Extremum {
                value: max.value.abs(),
                argmax: max.argmax,
            }
        } else {
            Extremum {
                value: min.value.abs(),
                argmax: min.argmax,
            }
        }
    }

    /// Certified (min, max) of p over `iv`, each with its witness point.
    pub fn range_on(&self, iv: &Interval) -> (Extremum, Extremum) {
        if self.is_zero() {
            let at = Extremum {
                value: 0.0,
                argmax: iv.lo,
            };
            return (at, at);
        }
        let mut candidates = vec![iv.lo, iv.hi];
        if !iv.is_degenerate() && self.degree() >= 2 {
            let crit = self
                .derivative()
                .roots_in(iv, DEFAULT_ROOT_TOL)
                .expect("positive tolerance")
                .into_points();
            candidates.extend(crit.into_iter().filter(|x| iv.contains(*x)));
        }
        let mut min = Extremum {
            value: f64::INFINITY,
            argmax: iv.lo,
        };
        let mut max = Extremum {
            value: f64::NEG_INFINITY,
            argmax: iv.lo,
        };
        for x in candidates {
            let v = self.eval(x);
            if v < min.value {
                min = Extremum {
                    value: v,
                    argmax: x,
                };
            }
            if v > max.value {
                max = Extremum {
                    value: v,
                    argmax: x,
                };
            }
        }
        (min, max)
    }
}

/// Real roots of a*x^2 + b*x + c using the numerically stable form; `a` is
/// nonzero for canonical quadratics.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if b == 0.0 {
        let r = (-c / a).sqrt();
        return vec![-r, r];
    }
    let mut roots = vec![q / a, c / q];
    roots.sort_by(f64::total_cmp);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(coeffs: &[f64]) -> Polynomial {
        Polynomial::new(coeffs.to_vec())
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    /// Naive power-sum evaluation, the independent counterpart to Horner.
    fn eval_naive(p: &Polynomial, x: f64) -> f64 {
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c * x.powi(k as i32))
            .sum()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(poly(&[0.0, 0.0, 1.0]).eval(3.0), 9.0);
        assert_eq!(Polynomial::zero().eval(17.5), 0.0);
        // 2 + 3x - x^3 at x = 2: 2 + 6 - 8 = 0
        assert_eq!(poly(&[2.0, 3.0, 0.0, -1.0]).eval(2.0), 0.0);
    }

    #[test]
    fn subtract_examples() {
        let x2 = poly(&[0.0, 0.0, 1.0]);
        assert!(x2.sub(&x2).is_zero());
        assert_eq!(poly(&[1.0, 1.0]).sub(&poly(&[1.0])), poly(&[0.0, 1.0]));
        assert_eq!(
            poly(&[0.0, 0.0, 0.0, 1.0]).sub(&poly(&[0.0, 1.0])),
            poly(&[0.0, -1.0, 0.0, 1.0])
        );
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            poly(&[0.0, 0.0, 0.0, 1.0]).derivative(),
            poly(&[0.0, 0.0, 3.0])
        );
        assert!(poly(&[5.0]).derivative().is_zero());
        assert_eq!(poly(&[2.0, 0.0, 4.0]).derivative(), poly(&[0.0, 8.0]));
    }

    #[test]
    fn canonicalization_trims_trailing_zeros() {
        let p = poly(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.coeffs(), &[1.0, 2.0]);
        assert_eq!(p.degree(), 1);
        assert!(poly(&[0.0, 0.0]).is_zero());
    }

    #[test]
    fn roots_quadratic_in_interval() {
        let p = poly(&[-1.0, 0.0, 1.0]); // x^2 - 1
        let r = p.roots_in(&iv(0.0, 2.0), 1e-12).unwrap().into_points();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn roots_zero_polynomial_is_distinguished() {
        let out = Polynomial::zero().roots_in(&iv(0.0, 1.0), 1e-12).unwrap();
        assert_eq!(out, RootSearch::IdenticallyZero);
    }

    #[test]
    fn roots_cubic() {
        let p = poly(&[0.0, -1.0, 0.0, 1.0]); // x^3 - x
        let r = p.roots_in(&iv(-2.0, 2.0), 1e-12).unwrap().into_points();
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-10, "root {got} vs {want}");
        }
    }

    #[test]
    fn roots_double_root_found_via_critical_point() {
        // (x - 1)^2 (x + 2) = x^3 - 3x + 2 has a double root at 1.
        let p = poly(&[2.0, -3.0, 0.0, 1.0]);
        let r = p.roots_in(&iv(0.0, 3.0), 1e-12).unwrap().into_points();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn roots_reject_nonpositive_tolerance() {
        let p = poly(&[1.0, 1.0]);
        assert!(p.roots_in(&iv(0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn sup_abs_linear_and_parabola() {
        let e = poly(&[0.0, 1.0]).sup_abs_on(&iv(0.0, 1.0));
        assert_eq!(e.value, 1.0);
        assert_eq!(e.argmax, 1.0);

        // x^2 - x on [0,1]: max |.| = 1/4 at x = 1/2.
        let e = poly(&[0.0, -1.0, 1.0]).sup_abs_on(&iv(0.0, 1.0));
        assert!((e.value - 0.25).abs() < 1e-14);
        assert!((e.argmax - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sup_abs_degree_five_matches_dense_grid() {
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            // splitmix64, good enough for fixed test coefficients
            rng_state = rng_state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = rng_state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            let u = ((z >> 11) as f64) / ((1u64 << 53) as f64);
            20.0 * u - 10.0
        };
        let domain = iv(-1.0, 1.0);
        for _ in 0..20 {
            let p = Polynomial::new((0..6).map(|_| next()).collect());
            let cert = p.sup_abs_on(&domain);
            let n = 1_000_000usize;
            let mut grid_max = 0.0f64;
            for i in 0..=n {
                let x = -1.0 + 2.0 * (i as f64) / (n as f64);
                grid_max = grid_max.max(p.eval(x).abs());
            }
            assert!(
                (cert.value - grid_max).abs() <= 1e-9,
                "certified {} vs grid max {}",
                cert.value,
                grid_max
            );
            assert!((p.eval(cert.argmax).abs() - cert.value).abs() <= 1e-12);
        }
    }

    #[test]
    fn compose_affine_matches_pointwise() {
        let p = poly(&[1.0, -2.0, 0.5, 3.0]);
        let q = p.compose_affine(2.0, -1.0);
        for i in 0..=20 {
            let x = -2.0 + 0.2 * i as f64;
            let want = p.eval(2.0 * x - 1.0);
            assert!((q.eval(x) - want).abs() <= 1e-10 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(2.0, 2.0).unwrap().is_degenerate());
    }

    #[test]
    fn chebyshev_points_interior_and_ascending() {
        let pts = iv(1.0, 3.0).chebyshev_points(7);
        assert_eq!(pts.len(), 7);
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(pts[0] > 1.0 && pts[6] < 3.0);
    }

    proptest! {
        #[test]
        fn horner_matches_naive(coeffs in prop::collection::vec(-10.0f64..10.0, 0..11), x in -3.0f64..3.0) {
            let p = Polynomial::new(coeffs);
            let h = p.eval(x);
            let n = eval_naive(&p, x);
            let scale = 1.0f64.max(h.abs()).max(n.abs());
            prop_assert!((h - n).abs() <= 1e-10 * scale);
        }

        #[test]
        fn derivative_commutes_with_subtraction(
            a in prop::collection::vec(-10.0f64..10.0, 0..8),
            b in prop::collection::vec(-10.0f64..10.0, 0..8),
        ) {
            let p = Polynomial::new(a);
            let q = Polynomial::new(b);
            let lhs = p.sub(&q).derivative();
            let rhs = p.derivative().sub(&q.derivative());
            prop_assert_eq!(lhs.degree(), rhs.degree());
            for (l, r) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                // k*(a-b) and k*a - k*b may differ in the final ulp
                prop_assert!((l - r).abs() <= 1e-13 * (1.0 + l.abs().max(r.abs())));
            }
        }

        #[test]
        fn sup_abs_dominates_samples(
            coeffs in prop::collection::vec(-10.0f64..10.0, 1..7),
            lo in -5.0f64..4.0,
            width in 0.01f64..3.0,
        ) {
            let p = Polynomial::new(coeffs);
            let domain = Interval::new(lo, lo + width).unwrap();
            let cert = p.sup_abs_on(&domain);
            for i in 0..=10_000usize {
                let x = domain.lo + domain.length() * (i as f64) / 10_000.0;
                prop_assert!(cert.value >= p.eval(x).abs() - 1e-12);
            }
        }

        #[test]
        fn located_roots_have_small_residual(
            coeffs in prop::collection::vec(-10.0f64..10.0, 2..7),
            lo in -3.0f64..2.0,
            width in 0.1f64..4.0,
        ) {
            let p = Polynomial::new(coeffs);
            let domain = Interval::new(lo, lo + width).unwrap();
            let tol = 1e-12;
            if let RootSearch::Roots(roots) = p.roots_in(&domain, tol).unwrap() {
                let scale = p.max_coeff_magnitude();
                for r in roots {
                    prop_assert!(domain.contains(r));
                    prop_assert!(p.eval(r).abs() <= scale * tol,
                        "residual {} at {} exceeds {}", p.eval(r).abs(), r, scale * tol);
                }
            }
        }
    }
}
