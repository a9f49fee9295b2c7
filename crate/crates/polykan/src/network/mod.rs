//! The spline-network model: layers of edge splines summed at nodes,
//! forward evaluation, polyhedral region statistics, JSON persistence and
//! synthetic model generation.
//!
//! A layer maps x in R^n to y in R^m by `y_j = sum_i s_{j,i}(x_i)`. All
//! region boundaries induced by the splines are axis-aligned, so the first
//! layer partitions the input box into a grid of rectangles; the exact
//! count of that partition and the whole-network product bound are both
//! computed here.

mod io;
mod synth;

pub use io::{load_model, save_model};
pub use synth::{generate_synthetic, NamedTarget, SynthSpec, SynthTarget};

use crate::error::{Error, Result};
use crate::poly::Interval;
use crate::spline::PiecewiseSpline;
use crate::KNOT_MERGE_TOL;
use num_bigint::BigUint;

/// What happens when an activation leaves a spline's domain during forward
/// evaluation. Inner-layer inputs can drift outside the domains the splines
/// were built on; the policy makes evaluation total (or strict).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutOfDomainPolicy {
    /// Clamp the input into the domain (default).
    Clamp,
    /// Evaluate the first/last piece's polynomial beyond the domain.
    Extrapolate,
    /// Reject with a domain error.
    Error,
}

impl OutOfDomainPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutOfDomainPolicy::Clamp => "clamp",
            OutOfDomainPolicy::Extrapolate => "extrapolate",
            OutOfDomainPolicy::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "clamp" => Ok(OutOfDomainPolicy::Clamp),
            "extrapolate" => Ok(OutOfDomainPolicy::Extrapolate),
            "error" => Ok(OutOfDomainPolicy::Error),
            other => Err(Error::invalid(format!(
                "unknown out-of-domain policy {other:?} (expected clamp|extrapolate|error)"
            ))),
        }
    }
}

/// One layer: a complete `fan_out x fan_in` grid of splines, indexed
/// `[out][in]`. All splines reading the same input share that input's
/// domain interval.
#[derive(Debug, Clone, PartialEq)]
pub struct KanLayer {
    splines: Vec<Vec<PiecewiseSpline>>,
}

impl KanLayer {
    pub fn new(splines: Vec<Vec<PiecewiseSpline>>) -> Result<Self> {
        if splines.is_empty() || splines[0].is_empty() {
            return Err(Error::invalid("layer grid must be non-empty"));
        }
        let fan_in = splines[0].len();
        if splines.iter().any(|row| row.len() != fan_in) {
            return Err(Error::invalid("layer grid must be complete (equal rows)"));
        }
        for i in 0..fan_in {
            let dom = splines[0][i].domain();
            for (j, row) in splines.iter().enumerate() {
                if row[i].domain() != dom {
                    return Err(Error::invalid(format!(
                        "splines reading input {i} disagree on domain (out 0 vs out {j})"
                    )));
                }
            }
        }
        Ok(KanLayer { splines })
    }

    pub fn fan_in(&self) -> usize {
        self.splines[0].len()
    }

    pub fn fan_out(&self) -> usize {
        self.splines.len()
    }

    pub fn spline(&self, out: usize, inp: usize) -> &PiecewiseSpline {
        &self.splines[out][inp]
    }

    pub fn splines(&self) -> &[Vec<PiecewiseSpline>] {
        &self.splines
    }

    /// Domain interval of each input coordinate.
    pub fn input_domains(&self) -> Vec<Interval> {
        (0..self.fan_in())
            .map(|i| self.splines[0][i].domain())
            .collect()
    }

    pub fn knot_total(&self) -> usize {
        self.splines.iter().flatten().map(|s| s.knot_count()).sum()
    }

    pub fn forward(&self, x: &[f64], policy: OutOfDomainPolicy) -> Result<Vec<f64>> {
        if x.len() != self.fan_in() {
            return Err(Error::ShapeMismatch(format!(
                "layer expects {} inputs, got {}",
                self.fan_in(),
                x.len()
            )));
        }
        let mut out = Vec::with_capacity(self.fan_out());
        for row in &self.splines {
            let mut acc = 0.0;
            for (s, &xi) in row.iter().zip(x) {
                acc += match policy {
                    OutOfDomainPolicy::Clamp => s.eval_clamped(xi),
                    OutOfDomainPolicy::Extrapolate => s.eval_extrapolated(xi),
                    OutOfDomainPolicy::Error => s.eval(xi)?,
                };
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// A full network: chained layers plus the input box the model is defined
/// on.
#[derive(Debug, Clone, PartialEq)]
pub struct KanNetwork {
    layers: Vec<KanLayer>,
    input_domain: Vec<Interval>,
    policy: OutOfDomainPolicy,
}

/// Polyhedral region statistics for a network.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionStats {
    /// Product over all splines of (knot count - 1); exact integer.
    pub bound: BigUint,
    /// Exact number of rectangles in the first layer's input partition.
    pub exact_first_layer: u128,
    /// Deduplicated interior-knot count per input dimension.
    pub per_dim_knot_counts: Vec<usize>,
}

impl KanNetwork {
    pub fn new(
        layers: Vec<KanLayer>,
        input_domain: Vec<Interval>,
        policy: OutOfDomainPolicy,
    ) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("network needs at least one layer"));
        }
        for w in layers.windows(2) {
            if w[0].fan_out() != w[1].fan_in() {
                return Err(Error::ShapeMismatch(format!(
                    "layer fan-out {} does not chain into next fan-in {}",
                    w[0].fan_out(),
                    w[1].fan_in()
                )));
            }
        }
        if input_domain.len() != layers[0].fan_in() {
            return Err(Error::ShapeMismatch(format!(
                "input domain has {} coordinates, first layer expects {}",
                input_domain.len(),
                layers[0].fan_in()
            )));
        }
        if input_domain.iter().any(|iv| iv.is_degenerate()) {
            return Err(Error::invalid("input domain must be non-degenerate"));
        }
        let first = layers[0].input_domains();
        for (i, (a, b)) in input_domain.iter().zip(&first).enumerate() {
            if a != b {
                return Err(Error::invalid(format!(
                    "input domain [{}, {}] of coordinate {i} does not match first-layer spline domain [{}, {}]",
                    a.lo, a.hi, b.lo, b.hi
                )));
            }
        }
        Ok(KanNetwork {
            layers,
            input_domain,
            policy,
        })
    }

    pub fn layers(&self) -> &[KanLayer] {
        &self.layers
    }

    pub fn input_domain(&self) -> &[Interval] {
        &self.input_domain
    }

    pub fn policy(&self) -> OutOfDomainPolicy {
        self.policy
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().fan_out()
    }

    /// `[n_0, n_1, ..., n_L]`.
    pub fn architecture(&self) -> Vec<usize> {
        let mut arch = vec![self.input_dim()];
        arch.extend(self.layers.iter().map(|l| l.fan_out()));
        arch
    }

    /// Total knot count per layer.
    pub fn layer_knot_totals(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.knot_total()).collect()
    }

    pub fn knot_total(&self) -> usize {
        self.layer_knot_totals().iter().sum()
    }

    pub fn spline_count(&self) -> usize {
        self.layers.iter().map(|l| l.fan_in() * l.fan_out()).sum()
    }

    /// Layer-by-layer evaluation of `y_j = sum_i s_{j,i}(x_i)`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::ShapeMismatch(format!(
                "network expects {} inputs, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        let mut cur = x.to_vec();
        for layer in &self.layers {
            cur = layer.forward(&cur, self.policy)?;
        }
        Ok(cur)
    }

    /// Same network with the layer grid replaced (domains and policy kept),
    /// used to assemble compression outputs.
    pub fn with_layers(&self, layers: Vec<KanLayer>) -> Result<KanNetwork> {
        KanNetwork::new(layers, self.input_domain.clone(), self.policy)
    }

    /// Product over every spline of (knot count - 1), in exact integer
    /// arithmetic: an upper bound on the number of linear regions of the
    /// whole network.
    pub fn region_bound(&self) -> BigUint {
        let mut bound = BigUint::from(1u32);
        for layer in &self.layers {
            for row in layer.splines() {
                for s in row {
                    bound *= BigUint::from(s.knot_count() - 1);
                }
            }
        }
        bound
    }

    /// Exact first-layer partition: per input coordinate, the union of the
    /// interior knots of every spline reading it (deduplicated within
    /// [`KNOT_MERGE_TOL`]); the partition is the product of the per-axis
    /// interval subdivisions, so its size is the product of interval counts
    /// and every region is a rectangle.
    pub fn exact_first_layer_partition(&self) -> RegionStats {
        let first = &self.layers[0];
        let mut per_dim = Vec::with_capacity(first.fan_in());
        let mut exact: u128 = 1;
        for i in 0..first.fan_in() {
            let mut cuts: Vec<f64> = Vec::new();
            for j in 0..first.fan_out() {
                let knots = first.spline(j, i).knots();
                cuts.extend_from_slice(&knots[1..knots.len() - 1]);
            }
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|a, b| (*a - *b).abs() <= KNOT_MERGE_TOL);
            per_dim.push(cuts.len());
            exact = exact
                .checked_mul((cuts.len() + 1) as u128)
                .expect("first-layer region count overflows u128");
        }
        RegionStats {
            bound: self.region_bound(),
            exact_first_layer: exact,
            per_dim_knot_counts: per_dim,
        }
    }

    /// Per-axis union of first-layer knots (domain ends included), used for
    /// boundary-adjacent probing during verification.
    pub fn first_layer_axis_knots(&self) -> Vec<Vec<f64>> {
        let first = &self.layers[0];
        (0..first.fan_in())
            .map(|i| {
                let mut cuts: Vec<f64> = Vec::new();
                for j in 0..first.fan_out() {
                    cuts.extend_from_slice(first.spline(j, i).knots());
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup_by(|a, b| (*a - *b).abs() <= KNOT_MERGE_TOL);
                cuts
            })
            .collect()
    }
}
