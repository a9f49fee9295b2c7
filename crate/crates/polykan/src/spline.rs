//! Exact piecewise-polynomial splines and conversion from clamped B-spline
//! form.
//!
//! A [`PiecewiseSpline`] stores a strictly increasing knot sequence
//! `t_0 < ... < t_k` and one polynomial per inter-knot region. Evaluation at
//! an interior knot uses the right piece (half-open regions, last region
//! closed); for continuous splines the choice is invisible, but it makes
//! evaluation deterministic and testable either way.
//!
//! Conversion from a clamped [`BsplineDescriptor`] is exact: on each
//! non-empty knot span the B-spline restricts to a single degree-d
//! polynomial, recovered by interpolating de Boor evaluations at d+1
//! Chebyshev points of the span.

use crate::error::{Error, Result};
use crate::poly::{Interval, Polynomial};

/// Piecewise polynomial on `[t_0, t_k]`: `pieces[i]` is defined on
/// `[knots[i], knots[i+1]]` and has degree at most the declared cap.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSpline {
    knots: Vec<f64>,
    pieces: Vec<Polynomial>,
    degree: usize,
}

/// Clamped B-spline: nondecreasing knot vector with multiplicity `degree+1`
/// at both ends, and `knot_vector.len() - degree - 1` control points.
#[derive(Debug, Clone, PartialEq)]
pub struct BsplineDescriptor {
    knot_vector: Vec<f64>,
    control_points: Vec<f64>,
    degree: usize,
}

impl PiecewiseSpline {
    pub fn new(knots: Vec<f64>, pieces: Vec<Polynomial>, degree: usize) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::invalid("a spline needs at least two knots"));
        }
        if pieces.len() + 1 != knots.len() {
            return Err(Error::invalid(format!(
                "knot/piece mismatch: {} knots require {} pieces, got {}",
                knots.len(),
                knots.len() - 1,
                pieces.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::invalid("knots must be finite"));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("knots must be strictly increasing"));
        }
        if let Some(p) = pieces.iter().find(|p| p.degree() > degree && !p.is_zero()) {
            return Err(Error::invalid(format!(
                "piece degree {} exceeds declared degree {}",
                p.degree(),
                degree
            )));
        }
        Ok(PiecewiseSpline {
            knots,
            pieces,
            degree,
        })
    }

    /// Single polynomial viewed as a one-piece spline on `iv`.
    pub fn from_polynomial(p: Polynomial, iv: Interval, degree: usize) -> Result<Self> {
        if iv.is_degenerate() {
            return Err(Error::invalid("spline domain must be non-degenerate"));
        }
        PiecewiseSpline::new(vec![iv.lo, iv.hi], vec![p], degree)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn knot_count(&self) -> usize {
        self.knots.len()
    }

    pub fn domain(&self) -> Interval {
        Interval {
            lo: self.knots[0],
            hi: *self.knots.last().unwrap(),
        }
    }

    /// Region index owning `x` under the half-open convention: region `i`
    /// covers `[t_i, t_{i+1})` except the last, which is closed.
    pub fn piece_index(&self, x: f64) -> Result<usize> {
        let dom = self.domain();
        if !dom.contains(x) {
            return Err(Error::OutOfDomain {
                x,
                lo: dom.lo,
                hi: dom.hi,
            });
        }
        if x == dom.hi {
            return Ok(self.pieces.len() - 1);
        }
        // partition_point counts the knots <= x; x sits in the region
        // starting at the last such knot.
        let idx = self.knots.partition_point(|t| *t <= x);
        Ok(idx - 1)
    }

    /// Evaluates the spline at `x`; rejects points outside `[t_0, t_k]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.pieces[self.piece_index(x)?].eval(x))
    }

    /// Evaluation with `x` clamped into the domain first.
    pub fn eval_clamped(&self, x: f64) -> f64 {
        let dom = self.domain();
        self.eval(dom.clamp(x)).expect("clamped point is in domain")
    }

    /// Evaluation extending the first/last piece beyond the domain.
    pub fn eval_extrapolated(&self, x: f64) -> f64 {
        let dom = self.domain();
        if x < dom.lo {
            self.pieces[0].eval(x)
        } else if x > dom.hi {
            self.pieces[self.pieces.len() - 1].eval(x)
        } else {
            self.eval(x).expect("point is in domain")
        }
    }

    /// Indices `(lo_idx, hi_idx)` of the knots equal to `iv.lo` and `iv.hi`.
    /// Fails when either bound is not a knot (within 1e-12).
    pub fn aligned_span(&self, iv: &Interval) -> Result<(usize, usize)> {
        let find = |v: f64| {
            self.knots
                .iter()
                .position(|t| (t - v).abs() <= 1e-12)
                .ok_or_else(|| {
                    Error::invalid(format!("interval bound {v} is not a knot of the spline"))
                })
        };
        let lo = find(iv.lo)?;
        let hi = find(iv.hi)?;
        if lo >= hi {
            return Err(Error::invalid("interval must span at least one region"));
        }
        Ok((lo, hi))
    }

    /// Sub-spline on a knot-aligned interval, keeping the original pieces.
    pub fn restrict(&self, iv: &Interval) -> Result<PiecewiseSpline> {
        let (lo, hi) = self.aligned_span(iv)?;
        PiecewiseSpline::new(
            self.knots[lo..=hi].to_vec(),
            self.pieces[lo..hi].to_vec(),
            self.degree,
        )
    }

    /// Worst derivative jump across interior knots, maximized over
    /// differentiation orders `0..=order`.
    pub fn continuity_defect(&self, order: usize) -> Result<f64> {
        if order > self.degree {
            return Err(Error::invalid(format!(
                "order {order} exceeds spline degree {}",
                self.degree
            )));
        }
        let mut worst = 0.0f64;
        for m in 1..self.pieces.len() {
            let mut diff = self.pieces[m].sub(&self.pieces[m - 1]);
            let t = self.knots[m];
            for _ in 0..=order {
                worst = worst.max(diff.eval(t).abs());
                diff = diff.derivative();
            }
        }
        Ok(worst)
    }

    /// Exact range of the spline over its domain (min, max), via certified
    /// per-piece extrema.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, p) in self.pieces.iter().enumerate() {
            let region = Interval {
                lo: self.knots[i],
                hi: self.knots[i + 1],
            };
            let (min, max) = p.range_on(&region);
            lo = lo.min(min.value);
            hi = hi.max(max.value);
        }
        (lo, hi)
    }

    /// Certified sup of |s'| over the domain (a Lipschitz constant).
    pub fn derivative_sup(&self) -> f64 {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let region = Interval {
                    lo: self.knots[i],
                    hi: self.knots[i + 1],
                };
                p.derivative().sup_abs_on(&region).value
            })
            .fold(0.0, f64::max)
    }

    /// Exact piecewise form of a clamped B-spline; the result domain is
    /// `[first clamped knot, last clamped knot]`.
    pub fn from_bspline(b: &BsplineDescriptor) -> Result<PiecewiseSpline> {
        let d = b.degree;
        let mut breaks: Vec<f64> = Vec::new();
        for &t in &b.knot_vector {
            if breaks.last() != Some(&t) {
                breaks.push(t);
            }
        }
        if breaks.len() < 2 {
            return Err(Error::invalid("B-spline domain is empty"));
        }
        let mut pieces = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let span = Interval { lo: w[0], hi: w[1] };
            let nodes = span.chebyshev_points(d + 1);
            let values: Vec<f64> = nodes.iter().map(|&x| b.eval_de_boor(x)).collect();
            pieces.push(interpolate_exact(&nodes, &values, &span)?);
        }
        PiecewiseSpline::new(breaks, pieces, d)
    }
}

impl BsplineDescriptor {
    pub fn new(knot_vector: Vec<f64>, control_points: Vec<f64>, degree: usize) -> Result<Self> {
        let n = knot_vector.len();
        if control_points.len() + degree + 1 != n {
            return Err(Error::invalid(format!(
                "control point count must be knots - degree - 1 = {}, got {}",
                n as isize - degree as isize - 1,
                control_points.len()
            )));
        }
        if knot_vector.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("knot vector must be finite"));
        }
        if knot_vector.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("knot vector must be nondecreasing"));
        }
        if n < 2 * (degree + 1) {
            return Err(Error::invalid("knot vector too short for clamping"));
        }
        let first = knot_vector[0];
        let last = knot_vector[n - 1];
        if knot_vector[degree] != first || knot_vector[n - degree - 1] != last {
            return Err(Error::invalid(
                "knot vector must be clamped with multiplicity degree+1 at both ends",
            ));
        }
        if first >= last {
            return Err(Error::invalid("B-spline domain is empty"));
        }
        // Interior multiplicity above degree+1 would make regions vanish.
        let mut run = 1usize;
        for i in 1..n {
            if knot_vector[i] == knot_vector[i - 1] {
                run += 1;
                if run > degree + 1 {
                    return Err(Error::invalid(format!(
                        "knot {} has multiplicity above degree+1",
                        knot_vector[i]
                    )));
                }
            } else {
                run = 1;
            }
        }
        Ok(BsplineDescriptor {
            knot_vector,
            control_points,
            degree,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knot_vector(&self) -> &[f64] {
        &self.knot_vector
    }

    pub fn control_points(&self) -> &[f64] {
        &self.control_points
    }

    pub fn domain(&self) -> Interval {
        Interval {
            lo: self.knot_vector[0],
            hi: *self.knot_vector.last().unwrap(),
        }
    }

    /// de Boor evaluation; `x` is clamped into the domain.
    pub fn eval_de_boor(&self, x: f64) -> f64 {
        let d = self.degree;
        let t = &self.knot_vector;
        let n = self.control_points.len();
        let x = self.domain().clamp(x);
        // Non-empty span t[k] <= x < t[k+1] with d <= k <= n-1; the right
        // domain end lands in the last non-empty span.
        let mut k = t.partition_point(|v| *v <= x).saturating_sub(1);
        k = k.clamp(d, n - 1);
        while t[k] == t[k + 1] {
            k -= 1;
        }
        let mut pts: Vec<f64> = (0..=d).map(|j| self.control_points[k - d + j]).collect();
        for r in 1..=d {
            for j in (r..=d).rev() {
                let i = k - d + j;
                let denom = t[i + d - r + 1] - t[i];
                let alpha = if denom == 0.0 {
                    0.0
                } else {
                    (x - t[i]) / denom
                };
                pts[j] = (1.0 - alpha) * pts[j - 1] + alpha * pts[j];
            }
        }
        pts[d]
    }
}

/// Interpolates the unique degree <= n-1 polynomial through `n` nodes.
/// Solved in the span-normalized coordinate for conditioning, then mapped
/// back to the global coordinate.
fn interpolate_exact(nodes: &[f64], values: &[f64], span: &Interval) -> Result<Polynomial> {
    use nalgebra::{DMatrix, DVector};
    let n = nodes.len();
    let c = span.midpoint();
    let h = 0.5 * span.length();
    let mut vand = DMatrix::zeros(n, n);
    for (r, &x) in nodes.iter().enumerate() {
        let u = (x - c) / h;
        let mut pw = 1.0;
        for col in 0..n {
            vand[(r, col)] = pw;
            pw *= u;
        }
    }
    let rhs = DVector::from_row_slice(values);
    let solved = vand
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::invalid("degenerate interpolation nodes"))?;
    let in_u = Polynomial::new(solved.iter().copied().collect());
    // u = (x - c)/h
    Ok(in_u.compose_affine(1.0 / h, -c / h))
}
