//! Polynomial fitting over merged knot spans and the certified mergability
//! test.
//!
//! Mergability is defined existentially (a single polynomial within eps of
//! every piece on the span); this module makes it constructive. The default
//! route is least squares on per-piece Chebyshev grids, optionally refined
//! by Remez exchange towards the minimax fit. Either way the resulting
//! certificate is sound unconditionally: the error is computed exactly
//! (per-piece polynomial extrema, not sampling) and inflated by
//! [`CERTIFICATION_SLACK`](crate::CERTIFICATION_SLACK) before any comparison
//! against an error budget. A weak fit can only produce a false
//! "infeasible", never a false certificate.
//!
//! Minimax-certified errors nest across intervals (the sup over a superset
//! cannot shrink, and Remez tracks the minimax closely); least-squares
//! certified errors carry no such guarantee, since enlarging the span moves
//! the fit itself.

use crate::error::{Error, Result};
use crate::poly::{Extremum, Interval, Polynomial};
use crate::spline::PiecewiseSpline;
use crate::CERTIFICATION_SLACK;
use nalgebra::{DMatrix, DVector};

/// How a merged polynomial is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum FitMethod {
    /// Least squares over Chebyshev sample grids, `samples_per_piece` points
    /// per original piece (`None` means `8 * (degree + 1)`). With
    /// `pin_endpoints` the fit is constrained to reproduce the spline's
    /// values at the span ends, trading error for continuity of the
    /// compressed result; degree-0 fits ignore the pin (a constant cannot
    /// match two endpoint values).
    LeastSquares {
        samples_per_piece: Option<usize>,
        pin_endpoints: bool,
    },
    /// Remez exchange towards the minimax fit, starting from the
    /// least-squares solution and exchanging against certified extrema of
    /// the residual until equioscillation within 1e-6 relative or the
    /// iteration cap. The best certified iterate is returned, so the result
    /// is never worse than the starting fit.
    Remez { max_iterations: usize },
}

impl Default for FitMethod {
    fn default() -> Self {
        FitMethod::LeastSquares {
            samples_per_piece: None,
            pin_endpoints: false,
        }
    }
}

impl FitMethod {
    pub fn remez() -> Self {
        FitMethod::Remez { max_iterations: 30 }
    }

    /// Short name used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            FitMethod::LeastSquares {
                pin_endpoints: false,
                ..
            } => "least_squares_chebyshev_grid",
            FitMethod::LeastSquares {
                pin_endpoints: true,
                ..
            } => "least_squares_pinned",
            FitMethod::Remez { .. } => "remez_minimax",
        }
    }
}

/// Proof that one polynomial approximates a spline span within a certified
/// sup-norm error, together with a witness point attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeCertificate {
    pub merged_poly: Polynomial,
    pub certified_error: f64,
    pub witness_x: f64,
}

/// Fits a single degree-`degree` polynomial to the spline over the
/// knot-aligned interval `iv`.
pub fn fit_poly(
    s: &PiecewiseSpline,
    iv: &Interval,
    degree: usize,
    method: &FitMethod,
) -> Result<Polynomial> {
    let (lo, hi) = s.aligned_span(iv)?;
    match method {
        FitMethod::LeastSquares {
            samples_per_piece,
            pin_endpoints,
        } => {
            let spp = resolve_spp(*samples_per_piece, degree)?;
            if *pin_endpoints {
                fit_pinned(s, lo, hi, degree, spp)
            } else {
                fit_least_squares(s, lo, hi, degree, spp)
            }
        }
        FitMethod::Remez { max_iterations } => {
            if *max_iterations == 0 {
                return Err(Error::invalid("remez iteration cap must be at least 1"));
            }
            let spp = resolve_spp(None, degree)?;
            let start = fit_least_squares(s, lo, hi, degree, spp)?;
            Ok(remez_refine(s, lo, hi, degree, start, *max_iterations))
        }
    }
}

/// Exact sup of |s - p| over the knot-aligned interval `iv`: per-piece
/// certified extrema of the difference polynomials. The returned value is
/// the raw supremum; callers comparing against a budget add the
/// certification slack.
pub fn certified_sup_error(s: &PiecewiseSpline, p: &Polynomial, iv: &Interval) -> Result<Extremum> {
    let (lo, hi) = s.aligned_span(iv)?;
    let knots = s.knots();
    let mut worst = Extremum {
        value: -1.0,
        argmax: iv.lo,
    };
    for j in lo..hi {
        let region = Interval {
            lo: knots[j],
            hi: knots[j + 1],
        };
        let diff = s.pieces()[j].sub(p);
        let e = diff.sup_abs_on(&region);
        if e.value > worst.value {
            worst = e;
        }
    }
    Ok(worst)
}

/// Certified mergability: fits a polynomial and returns a certificate iff
/// the certified error plus slack fits inside `eps`.
pub fn try_merge(
    s: &PiecewiseSpline,
    iv: &Interval,
    degree: usize,
    eps: f64,
    method: &FitMethod,
) -> Result<Option<MergeCertificate>> {
    if eps <= 0.0 {
        return Err(Error::invalid(format!("eps must be > 0, got {eps}")));
    }
    let p = fit_poly(s, iv, degree, method)?;
    let e = certified_sup_error(s, &p, iv)?;
    if e.value + CERTIFICATION_SLACK <= eps {
        Ok(Some(MergeCertificate {
            merged_poly: p,
            certified_error: e.value,
            witness_x: e.argmax,
        }))
    } else {
        Ok(None)
    }
}

fn resolve_spp(samples_per_piece: Option<usize>, degree: usize) -> Result<usize> {
    let spp = samples_per_piece.unwrap_or(8 * (degree + 1));
    if spp < degree + 1 {
        return Err(Error::invalid(format!(
            "samples_per_piece {spp} below degree + 1 = {}",
            degree + 1
        )));
    }
    Ok(spp)
}

/// Chebyshev sample grid over the pieces `lo..hi`, with values taken from
/// each region's own polynomial (so boundary attribution never matters).
fn sample_grid(s: &PiecewiseSpline, lo: usize, hi: usize, spp: usize) -> Vec<(f64, f64)> {
    let knots = s.knots();
    let mut samples = Vec::with_capacity((hi - lo) * spp);
    for j in lo..hi {
        let region = Interval {
            lo: knots[j],
            hi: knots[j + 1],
        };
        for x in region.chebyshev_points(spp) {
            samples.push((x, s.pieces()[j].eval(x)));
        }
    }
    samples
}

/// Affine map onto [-1, 1] for the span, used to keep the design matrices
/// well conditioned; returns (scale, offset) with u = scale * x + offset.
fn unit_map(lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    (1.0 / h, -c / h)
}

fn fit_least_squares(
    s: &PiecewiseSpline,
    lo: usize,
    hi: usize,
    degree: usize,
    spp: usize,
) -> Result<Polynomial> {
    let samples = sample_grid(s, lo, hi, spp);
    let (a, b) = (s.knots()[lo], s.knots()[hi]);
    let (scale, offset) = unit_map(a, b);
    let m = samples.len();
    let n = degree + 1;
    let mut design = DMatrix::zeros(m, n);
    let mut rhs = DVector::zeros(m);
    for (r, &(x, y)) in samples.iter().enumerate() {
        let u = scale * x + offset;
        let mut pw = 1.0;
        for col in 0..n {
            design[(r, col)] = pw;
            pw *= u;
        }
        rhs[r] = y;
    }
    let svd = design.svd(true, true);
    if svd.rank(1e-10) < n {
        return Err(Error::invalid(
            "rank-deficient sample system; samples must exceed the degree",
        ));
    }
    let solved = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::invalid(format!("least-squares solve failed: {e}")))?;
    let in_u = Polynomial::new(solved.iter().copied().collect());
    Ok(in_u.compose_affine(scale, offset))
}

/// Least squares constrained to interpolate the spline at the span ends.
/// The fit is `L + w * q` where L is the endpoint line, w(x) = (x-a)(x-b)
/// and q is the unconstrained degree-(d-2) least-squares correction.
fn fit_pinned(
    s: &PiecewiseSpline,
    lo: usize,
    hi: usize,
    degree: usize,
    spp: usize,
) -> Result<Polynomial> {
    let (a, b) = (s.knots()[lo], s.knots()[hi]);
    let ya = s.pieces()[lo].eval(a);
    let yb = s.pieces()[hi - 1].eval(b);
    if degree == 0 {
        return fit_least_squares(s, lo, hi, degree, spp);
    }
    let slope = (yb - ya) / (b - a);
    let line = Polynomial::new(vec![ya - slope * a, slope]);
    if degree == 1 {
        return Ok(line);
    }
    let samples = sample_grid(s, lo, hi, spp);
    let (scale, offset) = unit_map(a, b);
    let m = samples.len();
    let n = degree - 1;
    let mut design = DMatrix::zeros(m, n);
    let mut rhs = DVector::zeros(m);
    for (r, &(x, y)) in samples.iter().enumerate() {
        let u = scale * x + offset;
        let w = (x - a) * (x - b);
        let mut pw = w;
        for col in 0..n {
            design[(r, col)] = pw;
            pw *= u;
        }
        rhs[r] = y - line.eval(x);
    }
    let svd = design.svd(true, true);
    if svd.rank(1e-10) < n {
        return Err(Error::invalid("rank-deficient pinned sample system"));
    }
    let solved = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::invalid(format!("least-squares solve failed: {e}")))?;
    let q_in_u = Polynomial::new(solved.iter().copied().collect());
    let q = q_in_u.compose_affine(scale, offset);
    // w(x) = x^2 - (a+b) x + ab
    let w = Polynomial::new(vec![a * b, -(a + b), 1.0]);
    let mut correction = Polynomial::zero();
    for (k, &c) in q.coeffs().iter().enumerate() {
        let mut term = w.scale(c);
        for _ in 0..k {
            term = mul_by_x(&term);
        }
        correction = correction.add(&term);
    }
    Ok(line.add(&correction))
}

fn mul_by_x(p: &Polynomial) -> Polynomial {
    if p.is_zero() {
        return Polynomial::zero();
    }
    let mut coeffs = vec![0.0];
    coeffs.extend_from_slice(p.coeffs());
    Polynomial::new(coeffs)
}

/// One signed residual extremum candidate: the target value comes from a
/// specific piece, so a discontinuity knot legitimately contributes two
/// candidates at the same x.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    x: f64,
    target: f64,
    residual: f64,
}

/// All certified local extrema of the residual s - p over the span, in
/// ascending x (ties resolved in piece order).
fn residual_extrema(s: &PiecewiseSpline, lo: usize, hi: usize, p: &Polynomial) -> Vec<Candidate> {
    let knots = s.knots();
    let mut cands = Vec::new();
    for j in lo..hi {
        let region = Interval {
            lo: knots[j],
            hi: knots[j + 1],
        };
        let piece = &s.pieces()[j];
        let diff = piece.sub(p);
        let mut xs = vec![region.lo, region.hi];
        if diff.degree() >= 2 {
            let crit = diff
                .derivative()
                .roots_in(&region, crate::DEFAULT_ROOT_TOL)
                .expect("positive tolerance")
                .into_points();
            xs.extend(crit.into_iter().filter(|x| region.contains(*x)));
        }
        xs.sort_by(f64::total_cmp);
        for x in xs {
            cands.push(Candidate {
                x,
                target: piece.eval(x),
                residual: diff.eval(x),
            });
        }
    }
    cands
}

/// Builds an alternating reference of exactly `len` points from residual
/// extrema, or returns None when the residual does not alternate enough.
fn build_reference(cands: &[Candidate], len: usize) -> Option<Vec<Candidate>> {
    // Compress same-sign runs, keeping the largest |residual| of each run.
    let mut alt: Vec<Candidate> = Vec::new();
    for &c in cands {
        if c.residual == 0.0 {
            continue;
        }
        match alt.last() {
            Some(last) if last.residual.signum() == c.residual.signum() => {
                if c.residual.abs() > last.residual.abs() {
                    *alt.last_mut().unwrap() = c;
                }
            }
            _ => alt.push(c),
        }
    }
    if alt.len() < len {
        return None;
    }
    let global_max = |v: &[Candidate]| {
        v.iter()
            .enumerate()
            .max_by(|a, b| a.1.residual.abs().total_cmp(&b.1.residual.abs()))
            .map(|(i, _)| i)
            .unwrap()
    };
    // Trim while keeping alternation and the global maximum.
    while alt.len() > len {
        if alt.len() == len + 1 {
            let first = alt.first().unwrap().residual.abs();
            let last = alt.last().unwrap().residual.abs();
            if first <= last {
                alt.remove(0);
            } else {
                alt.pop();
            }
        } else {
            let gm = global_max(&alt);
            let mut best_pair = None;
            let mut best_score = f64::INFINITY;
            for i in 0..alt.len() - 1 {
                if i == gm || i + 1 == gm {
                    continue;
                }
                let score = alt[i].residual.abs().max(alt[i + 1].residual.abs());
                if score < best_score {
                    best_score = score;
                    best_pair = Some(i);
                }
            }
            match best_pair {
                Some(i) => {
                    alt.drain(i..=i + 1);
                }
                None => {
                    alt.pop();
                }
            }
        }
    }
    Some(alt)
}

fn remez_refine(
    s: &PiecewiseSpline,
    lo: usize,
    hi: usize,
    degree: usize,
    start: Polynomial,
    max_iterations: usize,
) -> Polynomial {
    let span = Interval {
        lo: s.knots()[lo],
        hi: s.knots()[hi],
    };
    let certify = |p: &Polynomial| {
        certified_sup_error(s, p, &span)
            .expect("span is knot-aligned")
            .value
    };
    let mut best = start.clone();
    let mut best_err = certify(&best);
    if best_err <= CERTIFICATION_SLACK {
        return best;
    }
    let (scale, offset) = unit_map(span.lo, span.hi);
    let n_ref = degree + 2;
    let mut current = start;
    for _ in 0..max_iterations {
        let cands = residual_extrema(s, lo, hi, &current);
        let Some(reference) = build_reference(&cands, n_ref) else {
            break;
        };
        // Solve p(x_i) + (-1)^i E = y_i on the reference.
        let mut mat = DMatrix::zeros(n_ref, n_ref);
        let mut rhs = DVector::zeros(n_ref);
        for (i, c) in reference.iter().enumerate() {
            let u = scale * c.x + offset;
            let mut pw = 1.0;
            for col in 0..=degree {
                mat[(i, col)] = pw;
                pw *= u;
            }
            mat[(i, n_ref - 1)] = if i % 2 == 0 { 1.0 } else { -1.0 };
            rhs[i] = c.target;
        }
        let Some(solved) = mat.lu().solve(&rhs) else {
            break;
        };
        let level = solved[n_ref - 1].abs();
        let in_u = Polynomial::new(solved.iter().take(degree + 1).copied().collect());
        let p_new = in_u.compose_affine(scale, offset);
        let err_new = certify(&p_new);
        if err_new < best_err {
            best_err = err_new;
            best = p_new.clone();
        }
        // Equioscillation reached: certified error matches the level.
        if err_new <= level * (1.0 + 1e-6) {
            break;
        }
        current = p_new;
    }
    best
}
