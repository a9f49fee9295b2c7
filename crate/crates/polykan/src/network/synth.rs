//! Synthetic model generation for tests, benchmarks and demos.
//!
//! Generation is deterministic for a fixed seed. Edge splines start life as
//! clamped B-splines on uniformly spaced knots and are converted to exact
//! piecewise form; control points are either drawn uniformly or fitted by
//! least squares to a named univariate target. Inner-layer domains are sized
//! to the exact output range of the preceding layer plus a 10% margin, so
//! forward evaluation stays in-domain.

use super::{KanLayer, KanNetwork, OutOfDomainPolicy};
use crate::error::{Error, Result};
use crate::poly::Interval;
use crate::spline::{BsplineDescriptor, PiecewiseSpline};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Univariate targets edge splines can be fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedTarget {
    Sin,
    Exp,
    GaussianBump,
    Ramp,
}

impl NamedTarget {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "sin" => Ok(NamedTarget::Sin),
            "exp" => Ok(NamedTarget::Exp),
            "gauss" | "gaussian" => Ok(NamedTarget::GaussianBump),
            "ramp" => Ok(NamedTarget::Ramp),
            other => Err(Error::invalid(format!(
                "unknown target {other:?} (expected sin|exp|gauss|ramp)"
            ))),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            NamedTarget::Sin => x.sin(),
            NamedTarget::Exp => x.exp(),
            NamedTarget::GaussianBump => (-x * x).exp(),
            NamedTarget::Ramp => x.max(0.0),
        }
    }

    /// Natural input box for the target when the caller does not supply one.
    pub fn default_domain(&self) -> Interval {
        match self {
            NamedTarget::Sin => Interval {
                lo: 0.0,
                hi: 2.0 * std::f64::consts::PI,
            },
            NamedTarget::Exp => Interval { lo: 0.0, hi: 2.0 },
            NamedTarget::GaussianBump => Interval { lo: -3.0, hi: 3.0 },
            NamedTarget::Ramp => Interval { lo: -1.0, hi: 1.0 },
        }
    }
}

/// What the generated edge splines should represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthTarget {
    /// Control points drawn uniformly from [-1, 1].
    RandomControls,
    /// Control points least-squares fitted to a named function over each
    /// spline's own domain.
    Fit(NamedTarget),
}

/// Recipe for a synthetic network.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub architecture: Vec<usize>,
    pub degree: usize,
    /// Distinct knots per spline (so `knots_per_spline - 1` pieces).
    pub knots_per_spline: usize,
    pub seed: u64,
    pub target: SynthTarget,
    /// Domain for every input coordinate; defaults to [-1, 1] for random
    /// controls and to the named target's natural domain otherwise.
    pub input_domain: Option<Interval>,
}

/// Deterministically generates a network from the spec.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<KanNetwork> {
    if spec.architecture.len() < 2 {
        return Err(Error::invalid("architecture needs at least [n_in, n_out]"));
    }
    if spec.architecture.contains(&0) {
        return Err(Error::invalid("architecture entries must be positive"));
    }
    if spec.knots_per_spline < 2 {
        return Err(Error::invalid("knots_per_spline must be at least 2"));
    }
    let input_domain = spec.input_domain.unwrap_or(match spec.target {
        SynthTarget::RandomControls => Interval { lo: -1.0, hi: 1.0 },
        SynthTarget::Fit(f) => f.default_domain(),
    });
    if input_domain.is_degenerate() {
        return Err(Error::invalid("input domain must be non-degenerate"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut domains = vec![input_domain; spec.architecture[0]];
    let mut layers = Vec::with_capacity(spec.architecture.len() - 1);
    for l in 0..spec.architecture.len() - 1 {
        let (n_in, n_out) = (spec.architecture[l], spec.architecture[l + 1]);
        let mut grid = Vec::with_capacity(n_out);
        for _j in 0..n_out {
            let mut row = Vec::with_capacity(n_in);
            for domain in domains.iter().take(n_in) {
                row.push(make_spline(spec, domain, &mut rng)?);
            }
            grid.push(row);
        }
        let layer = KanLayer::new(grid)?;
        domains = next_domains(&layer);
        layers.push(layer);
    }
    KanNetwork::new(
        layers,
        vec![input_domain; spec.architecture[0]],
        OutOfDomainPolicy::Clamp,
    )
}

/// Exact output range of each node plus a 10% margin on both sides.
fn next_domains(layer: &KanLayer) -> Vec<Interval> {
    (0..layer.fan_out())
        .map(|j| {
            let mut lo = 0.0;
            let mut hi = 0.0;
            for i in 0..layer.fan_in() {
                let (a, b) = layer.spline(j, i).value_range();
                lo += a;
                hi += b;
            }
            let width = hi - lo;
            let margin = if width > 0.0 { 0.1 * width } else { 0.5 };
            Interval {
                lo: lo - margin,
                hi: hi + margin,
            }
        })
        .collect()
}

fn make_spline(
    spec: &SynthSpec,
    domain: &Interval,
    rng: &mut ChaCha8Rng,
) -> Result<PiecewiseSpline> {
    let d = spec.degree;
    let k = spec.knots_per_spline;
    let mut knot_vector = vec![domain.lo; d + 1];
    for i in 1..k - 1 {
        knot_vector.push(domain.lo + domain.length() * (i as f64) / ((k - 1) as f64));
    }
    knot_vector.extend(std::iter::repeat_n(domain.hi, d + 1));
    let n_ctrl = knot_vector.len() - d - 1;
    let controls = match spec.target {
        SynthTarget::RandomControls => (0..n_ctrl).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        SynthTarget::Fit(f) => fit_controls(f, &knot_vector, d, n_ctrl, domain)?,
    };
    let descriptor = BsplineDescriptor::new(knot_vector, controls, d)?;
    PiecewiseSpline::from_bspline(&descriptor)
}

/// Least-squares B-spline fit to the target over the domain.
fn fit_controls(
    target: NamedTarget,
    knot_vector: &[f64],
    degree: usize,
    n_ctrl: usize,
    domain: &Interval,
) -> Result<Vec<f64>> {
    let samples = (4 * n_ctrl).max(64);
    let mut design = DMatrix::zeros(samples, n_ctrl);
    let mut rhs = DVector::zeros(samples);
    for r in 0..samples {
        let x = domain.lo + domain.length() * (r as f64) / ((samples - 1) as f64);
        let (start, basis) = bspline_basis(knot_vector, degree, x);
        for (offset, b) in basis.iter().enumerate() {
            design[(r, start + offset)] = *b;
        }
        rhs[r] = target.eval(x);
    }
    let svd = design.svd(true, true);
    let solved = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::invalid(format!("B-spline fit failed: {e}")))?;
    Ok(solved.iter().copied().collect())
}

/// Nonzero B-spline basis values at `x`: returns the first contributing
/// control index and the `degree + 1` basis values (Cox-de Boor triangle).
fn bspline_basis(t: &[f64], degree: usize, x: f64) -> (usize, Vec<f64>) {
    let n_ctrl = t.len() - degree - 1;
    let x = x.clamp(t[0], t[t.len() - 1]);
    let mut k = t.partition_point(|v| *v <= x).saturating_sub(1);
    k = k.clamp(degree, n_ctrl - 1);
    while t[k] == t[k + 1] {
        k -= 1;
    }
    let mut basis = vec![0.0; degree + 1];
    basis[0] = 1.0;
    let mut left = vec![0.0; degree + 1];
    let mut right = vec![0.0; degree + 1];
    for j in 1..=degree {
        left[j] = x - t[k + 1 - j];
        right[j] = t[k + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            let denom = right[r + 1] + left[j - r];
            let temp = if denom == 0.0 { 0.0 } else { basis[r] / denom };
            basis[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        basis[j] = saved;
    }
    (k - degree, basis)
}
