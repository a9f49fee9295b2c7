//! Knot-count compression: optimal per-spline dynamic programming and
//! layered whole-network compression under a global error budget.
//!
//! The per-spline dynamic program examines every knot span `[t_j, t_i]`
//! once, asks the mergability kernel for a certificate, and backtracks the
//! minimal piece count. Optimality is relative to the feasibility relation
//! the configured fit method induces: a stronger fit can only merge more.
//!
//! For networks, the global budget eps is split into per-layer budgets
//! `eps_l`, and every spline in layer l is compressed with `eps_l / fan_in`.
//! Since a layer output is a sum of `fan_in` spline values, per-spline
//! errors add to at most `eps_l` per layer map. The budget divisor is the
//! layer's fan-in: the propagation bound sums one error term per input.

use crate::approx::{self, FitMethod, MergeCertificate};
use crate::error::{Error, Result};
use crate::network::{KanLayer, KanNetwork};
use crate::poly::Interval;
use crate::report::{CompressionReport, ReportTotals, SplineRecord};
use crate::spline::PiecewiseSpline;
use rayon::prelude::*;
use std::time::Instant;

/// How the global error budget is split across layers.
#[derive(Debug, Clone, PartialEq)]
pub enum BudgetPolicy {
    /// eps / L per layer.
    Uniform,
    /// Proportional to each layer's total knot count.
    KnotWeighted,
    /// Caller-provided budgets; must be positive and sum to eps.
    Explicit(Vec<f64>),
}

impl BudgetPolicy {
    pub fn label(&self) -> String {
        match self {
            BudgetPolicy::Uniform => "uniform".to_string(),
            BudgetPolicy::KnotWeighted => "knot_weighted".to_string(),
            BudgetPolicy::Explicit(_) => "explicit".to_string(),
        }
    }
}

/// Settings for a compression run.
#[derive(Debug, Clone)]
pub struct CompressionConfig {
    pub eps: f64,
    pub budget_policy: BudgetPolicy,
    pub fit: FitMethod,
    /// Cap on the fitted degree; `None` keeps each spline's own degree.
    pub degree_cap: Option<usize>,
}

impl CompressionConfig {
    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::invalid(format!("eps must be > 0, got {eps}")));
        }
        Ok(CompressionConfig {
            eps,
            budget_policy: BudgetPolicy::Uniform,
            fit: FitMethod::default(),
            degree_cap: None,
        })
    }

    pub fn with_policy(mut self, policy: BudgetPolicy) -> Self {
        self.budget_policy = policy;
        self
    }

    pub fn with_fit(mut self, fit: FitMethod) -> Self {
        self.fit = fit;
        self
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = Some(cap);
        self
    }
}

/// The dynamic-programming table: `dp[i]` is the minimal piece count
/// covering `[t_0, t_i]` (`dp[0] = 0`), `prev[i]` the split index the
/// optimum extends (valid for `i >= 1`, always `prev[i] < i`).
#[derive(Debug, Clone)]
pub struct DpTable {
    pub dp: Vec<usize>,
    pub prev: Vec<usize>,
}

/// Result of compressing one spline.
#[derive(Debug, Clone)]
pub struct SplineCompression {
    pub spline: PiecewiseSpline,
    /// Certified sup error per output piece, in piece order.
    pub piece_errors: Vec<f64>,
    /// Maximum certified error across pieces.
    pub certified_error: f64,
    /// Mergability checks performed: always k(k+1)/2 for k input pieces.
    pub feasibility_calls: usize,
    pub table: DpTable,
    pub elapsed_ms: f64,
}

/// Mergability kernel shared by the dynamic program and the brute-force
/// oracle: a certificate for the span from knot `j` to knot `i`.
///
/// A single-piece span (`j + 1 == i`) keeps its original polynomial: that
/// replacement is exact, so it is certified with error 0 for any eps > 0
/// without going through the fit path. Everything else defers to
/// [`approx::try_merge`].
pub fn segment_certificate(
    s: &PiecewiseSpline,
    j: usize,
    i: usize,
    degree: usize,
    eps: f64,
    fit: &FitMethod,
) -> Result<Option<MergeCertificate>> {
    if eps <= 0.0 {
        return Err(Error::invalid(format!("eps must be > 0, got {eps}")));
    }
    let knots = s.knots();
    if j + 1 == i {
        return Ok(Some(MergeCertificate {
            merged_poly: s.pieces()[j].clone(),
            certified_error: 0.0,
            witness_x: 0.5 * (knots[j] + knots[i]),
        }));
    }
    let iv = Interval {
        lo: knots[j],
        hi: knots[i],
    };
    approx::try_merge(s, &iv, degree, eps, fit)
}

/// Optimal compression of one spline: the minimal number of pieces over all
/// knot subsets whose induced segments the fit method can certify within
/// `eps`. Worst case the spline is returned unchanged.
pub fn compress_spline(
    s: &PiecewiseSpline,
    eps: f64,
    cfg: &CompressionConfig,
) -> Result<SplineCompression> {
    if eps <= 0.0 {
        return Err(Error::invalid(format!("eps must be > 0, got {eps}")));
    }
    let start = Instant::now();
    let k = s.piece_count();
    let degree = cfg.degree_cap.map_or(s.degree(), |c| c.min(s.degree()));
    let mut certs: Vec<Vec<Option<MergeCertificate>>> = vec![vec![None; k + 1]; k + 1];
    let mut dp = vec![usize::MAX; k + 1];
    let mut prev = vec![0usize; k + 1];
    dp[0] = 0;
    let mut calls = 0usize;
    for i in 1..=k {
        for j in 0..i {
            calls += 1;
            let cert = segment_certificate(s, j, i, degree, eps, &cfg.fit)?;
            if let Some(c) = cert {
                // strict improvement keeps the smallest feasible j on ties,
                // i.e. the longest last segment
                if dp[j] != usize::MAX && dp[j] + 1 < dp[i] {
                    dp[i] = dp[j] + 1;
                    prev[i] = j;
                }
                certs[j][i] = Some(c);
            }
        }
    }
    debug_assert!(
        dp[k] != usize::MAX,
        "single-piece segments are always feasible"
    );

    // Backtrack the chosen segments.
    let mut boundary = Vec::with_capacity(dp[k] + 1);
    let mut at = k;
    boundary.push(k);
    while at > 0 {
        at = prev[at];
        boundary.push(at);
    }
    boundary.reverse();

    let mut knots = Vec::with_capacity(boundary.len());
    let mut pieces = Vec::with_capacity(boundary.len() - 1);
    let mut piece_errors = Vec::with_capacity(boundary.len() - 1);
    knots.push(s.knots()[boundary[0]]);
    for w in boundary.windows(2) {
        let (j, i) = (w[0], w[1]);
        let cert = certs[j][i]
            .as_ref()
            .expect("backtracked segment has a cached certificate");
        knots.push(s.knots()[i]);
        pieces.push(cert.merged_poly.clone());
        piece_errors.push(cert.certified_error);
    }
    let spline = PiecewiseSpline::new(knots, pieces, s.degree())?;
    let certified_error = piece_errors.iter().copied().fold(0.0, f64::max);
    Ok(SplineCompression {
        spline,
        piece_errors,
        certified_error,
        feasibility_calls: calls,
        table: DpTable { dp, prev },
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Splits `eps` into per-layer budgets. `layer_knots` carries each layer's
/// total knot count (used by the knot-weighted policy; its length fixes L).
pub fn allocate_budgets(
    eps: f64,
    layer_knots: &[usize],
    policy: &BudgetPolicy,
) -> Result<Vec<f64>> {
    if eps <= 0.0 {
        return Err(Error::invalid(format!("eps must be > 0, got {eps}")));
    }
    let layers = layer_knots.len();
    if layers == 0 {
        return Err(Error::invalid(
            "cannot allocate budgets for an empty network",
        ));
    }
    let budgets = match policy {
        BudgetPolicy::Uniform => vec![eps / layers as f64; layers],
        BudgetPolicy::KnotWeighted => {
            let total: usize = layer_knots.iter().sum();
            if total == 0 {
                return Err(Error::invalid("knot-weighted policy needs knots"));
            }
            layer_knots
                .iter()
                .map(|&k| eps * (k as f64) / (total as f64))
                .collect()
        }
        BudgetPolicy::Explicit(given) => {
            if given.len() != layers {
                return Err(Error::invalid(format!(
                    "explicit budgets have {} entries, network has {layers} layers",
                    given.len()
                )));
            }
            if given.iter().any(|&b| b <= 0.0) {
                return Err(Error::invalid("explicit budgets must be positive"));
            }
            let sum: f64 = given.iter().sum();
            if (sum - eps).abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "explicit budgets sum to {sum}, expected eps = {eps}"
                )));
            }
            given.clone()
        }
    };
    debug_assert!((budgets.iter().sum::<f64>() - eps).abs() <= 1e-12);
    Ok(budgets)
}

/// Compresses every spline of the network layer by layer. Layer l receives
/// budget `eps_l`; each of its splines is compressed with `eps_l / fan_in`,
/// which bounds the layer map perturbation by `eps_l`. Distinct splines are
/// compressed in parallel; records are ordered by (layer, out, in)
/// regardless of scheduling.
pub fn compress_network(
    net: &KanNetwork,
    cfg: &CompressionConfig,
) -> Result<(KanNetwork, CompressionReport)> {
    let budgets = allocate_budgets(cfg.eps, &net.layer_knot_totals(), &cfg.budget_policy)?;
    let mut jobs = Vec::new();
    for (l, layer) in net.layers().iter().enumerate() {
        let spline_budget = budgets[l] / layer.fan_in() as f64;
        for j in 0..layer.fan_out() {
            for i in 0..layer.fan_in() {
                jobs.push((l, j, i, layer.spline(j, i), spline_budget));
            }
        }
    }
    let compressed: Vec<(usize, usize, usize, f64, SplineCompression)> = jobs
        .into_par_iter()
        .map(|(l, j, i, s, budget)| compress_spline(s, budget, cfg).map(|c| (l, j, i, budget, c)))
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(compressed.len());
    let mut timings = Vec::with_capacity(compressed.len());
    let mut layers = Vec::with_capacity(net.layers().len());
    let mut cursor = compressed.into_iter();
    for layer in net.layers() {
        let mut grid = Vec::with_capacity(layer.fan_out());
        for _ in 0..layer.fan_out() {
            let mut row = Vec::with_capacity(layer.fan_in());
            for _ in 0..layer.fan_in() {
                let (l, j, i, budget, c) = cursor.next().expect("one result per job");
                records.push(SplineRecord {
                    layer: l,
                    out_index: j,
                    in_index: i,
                    knots_before: layer.spline(j, i).knot_count(),
                    knots_after: c.spline.knot_count(),
                    certified_error: c.certified_error,
                    budget,
                    feasibility_calls: c.feasibility_calls,
                });
                timings.push(c.elapsed_ms);
                row.push(c.spline);
            }
            grid.push(row);
        }
        layers.push(KanLayer::new(grid)?);
    }
    let out = net.with_layers(layers)?;
    let knots_before = net.knot_total();
    let knots_after = out.knot_total();
    let report = CompressionReport {
        format: crate::REPORT_FORMAT.to_string(),
        eps: cfg.eps,
        budget_policy: cfg.budget_policy.label(),
        fit_method: cfg.fit.label().to_string(),
        layer_budgets: budgets,
        totals: ReportTotals {
            knots_before,
            knots_after,
            compression_ratio: knots_after as f64 / knots_before as f64,
            max_certified_error: records
                .iter()
                .map(|r| r.certified_error)
                .fold(0.0, f64::max),
        },
        records,
        timings_ms: None,
    };
    // timings stay in memory unless explicitly attached
    let _ = timings;
    Ok((out, report))
}

/// Deterministic sampling plan for empirical sup-norm estimation.
#[derive(Debug, Clone, Copy)]
pub struct SamplingSpec {
    /// Per-axis resolution of the tensor grid (used for up to 3 inputs).
    pub points_per_dim: usize,
    /// Number of low-discrepancy (Halton) samples.
    pub halton_points: usize,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            points_per_dim: 33,
            halton_points: 4096,
        }
    }
}

/// Empirical sup-norm gap between two networks over their shared input box:
/// deterministic Halton samples plus knot-adjacent probe points. For
/// multivariate inputs this is an estimate (a lower bound on the true sup);
/// exact certification exists per spline, not per network.
pub fn verify_equivalence(
    a: &KanNetwork,
    b: &KanNetwork,
    sampling: &SamplingSpec,
) -> Result<(f64, Vec<f64>)> {
    if a.input_dim() != b.input_dim() {
        return Err(Error::ShapeMismatch(format!(
            "input dims differ: {} vs {}",
            a.input_dim(),
            b.input_dim()
        )));
    }
    if a.output_dim() != b.output_dim() {
        return Err(Error::ShapeMismatch(format!(
            "output dims differ: {} vs {}",
            a.output_dim(),
            b.output_dim()
        )));
    }
    if a.input_domain() != b.input_domain() {
        return Err(Error::ShapeMismatch(
            "input domain boxes differ".to_string(),
        ));
    }
    let dim = a.input_dim();
    let box_: Vec<Interval> = a.input_domain().to_vec();

    // Per-axis probe coordinates: uniform grid plus knot +/- 1e-9 from both
    // networks, clamped into the box.
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let knots_a = a.first_layer_axis_knots();
    let knots_b = b.first_layer_axis_knots();
    for d in 0..dim {
        let iv = box_[d];
        let mut coords = Vec::new();
        let n = sampling.points_per_dim.max(2);
        for i in 0..n {
            coords.push(iv.lo + iv.length() * (i as f64) / ((n - 1) as f64));
        }
        for src in [&knots_a[d], &knots_b[d]] {
            for &t in src {
                coords.push(iv.clamp(t - 1e-9));
                coords.push(iv.clamp(t + 1e-9));
            }
        }
        coords.sort_by(f64::total_cmp);
        coords.dedup();
        axes.push(coords);
    }

    let mut worst = (0.0f64, vec![0.0; dim]);
    let mut check = |x: &[f64]| -> Result<()> {
        let ya = a.forward(x)?;
        let yb = b.forward(x)?;
        let gap = ya
            .iter()
            .zip(&yb)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        if gap > worst.0 {
            worst = (gap, x.to_vec());
        }
        Ok(())
    };

    if dim <= 3 {
        let mut idx = vec![0usize; dim];
        let mut x = vec![0.0; dim];
        loop {
            for d in 0..dim {
                x[d] = axes[d][idx[d]];
            }
            check(&x)?;
            let mut d = 0;
            loop {
                if d == dim {
                    break;
                }
                idx[d] += 1;
                if idx[d] < axes[d].len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == dim {
                break;
            }
        }
    } else {
        // Axis sweeps through the box midpoint keep knot-adjacent coverage
        // affordable in higher dimensions.
        let mid: Vec<f64> = box_.iter().map(|iv| iv.midpoint()).collect();
        let mut x = mid.clone();
        for d in 0..dim {
            for &v in &axes[d] {
                x[d] = v;
                check(&x)?;
            }
            x[d] = mid[d];
        }
    }
    let mut x = vec![0.0; dim];
    for s in 0..sampling.halton_points {
        for d in 0..dim {
            let u = halton(s as u64 + 1, PRIMES[d % PRIMES.len()]);
            x[d] = box_[d].lo + box_[d].length() * u;
        }
        check(&x)?;
    }
    Ok(worst)
}

/// Per-spline re-certification of a compressed network against its
/// original.
#[derive(Debug, Clone)]
pub struct SplineRecert {
    pub layer: usize,
    pub out_index: usize,
    pub in_index: usize,
    pub certified_error: f64,
}

/// Recomputes, from scratch, the exact sup error of every compressed spline
/// against the original. Requires the compressed knots to be a subset of
/// the original knots (which knot elimination guarantees); returns `None`
/// when any spline pair does not align.
pub fn recertify_splines(
    original: &KanNetwork,
    compressed: &KanNetwork,
) -> Result<Option<Vec<SplineRecert>>> {
    if original.architecture() != compressed.architecture() {
        return Err(Error::ShapeMismatch(
            "architectures differ; cannot re-certify".to_string(),
        ));
    }
    let mut out = Vec::new();
    for (l, (la, lb)) in original
        .layers()
        .iter()
        .zip(compressed.layers())
        .enumerate()
    {
        for j in 0..la.fan_out() {
            for i in 0..la.fan_in() {
                let so = la.spline(j, i);
                let sc = lb.spline(j, i);
                let aligned = sc
                    .knots()
                    .iter()
                    .all(|t| so.knots().iter().any(|u| (t - u).abs() <= 1e-12));
                if !aligned || so.domain() != sc.domain() {
                    return Ok(None);
                }
                let mut worst = 0.0f64;
                for (p, w) in sc.pieces().iter().zip(sc.knots().windows(2)) {
                    let iv = Interval { lo: w[0], hi: w[1] };
                    let e = approx::certified_sup_error(so, p, &iv)?;
                    worst = worst.max(e.value);
                }
                out.push(SplineRecert {
                    layer: l,
                    out_index: j,
                    in_index: i,
                    certified_error: worst,
                });
            }
        }
    }
    Ok(Some(out))
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical-inverse (Halton) sequence member in [0, 1).
fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{generate_synthetic, SynthSpec, SynthTarget};
    use crate::poly::Polynomial;

    fn poly(coeffs: &[f64]) -> Polynomial {
        Polynomial::new(coeffs.to_vec())
    }

    fn step_spline() -> PiecewiseSpline {
        PiecewiseSpline::new(vec![0.0, 1.0, 2.0], vec![poly(&[0.0]), poly(&[1.0])], 0).unwrap()
    }

    fn cfg(eps: f64) -> CompressionConfig {
        CompressionConfig::new(eps).unwrap()
    }

    #[test]
    fn split_global_polynomial_collapses_to_one_piece() {
        let p = poly(&[0.3, -1.2, 0.8, 0.1]);
        let s = PiecewiseSpline::new(
            vec![0.0, 0.4, 1.0, 1.7, 2.5, 3.0],
            vec![p.clone(), p.clone(), p.clone(), p.clone(), p],
            3,
        )
        .unwrap();
        for eps in [1e-6, 0.1, 1e6] {
            let c = compress_spline(&s, eps, &cfg(eps)).unwrap();
            assert_eq!(c.spline.piece_count(), 1, "eps {eps}");
            assert_eq!(c.spline.knot_count(), 2);
            assert!(c.certified_error <= 1e-9);
        }
    }

    #[test]
    fn infeasible_step_is_returned_unchanged() {
        let s = step_spline();
        let c = compress_spline(&s, 0.4, &cfg(0.4)).unwrap();
        assert_eq!(c.spline, s);
        assert_eq!(c.feasibility_calls, 3); // k = 2 pieces: 2*3/2
        assert_eq!(c.certified_error, 0.0); // identity segments are exact
    }

    #[test]
    fn feasible_step_merges() {
        let s = step_spline();
        let c = compress_spline(&s, 0.6, &cfg(0.6)).unwrap();
        assert_eq!(c.spline.piece_count(), 1);
        assert!((c.certified_error - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn dp_table_invariants() {
        let s = PiecewiseSpline::new(
            vec![0.0, 1.0, 2.0, 3.0, 4.0],
            vec![poly(&[0.0]), poly(&[0.3]), poly(&[0.9]), poly(&[1.0])],
            0,
        )
        .unwrap();
        let c = compress_spline(&s, 0.35, &cfg(0.35)).unwrap();
        let dp = &c.table.dp;
        assert_eq!(dp[0], 0);
        for i in 1..dp.len() {
            assert!(dp[i] <= dp[i - 1] + 1, "dp grows by at most one piece");
            assert!(c.table.prev[i] < i);
        }
        assert_eq!(c.feasibility_calls, 4 * 5 / 2);
        // every output piece stays within budget
        for e in &c.piece_errors {
            assert!(*e <= 0.35);
        }
    }

    #[test]
    fn idempotent_on_own_output() {
        for seed in 0..6u64 {
            let net = generate_synthetic(&SynthSpec {
                architecture: vec![1, 1],
                degree: 3,
                knots_per_spline: 9,
                seed,
                target: SynthTarget::RandomControls,
                input_domain: None,
            })
            .unwrap();
            let s = net.layers()[0].spline(0, 0);
            let eps = 0.05;
            let once = compress_spline(s, eps, &cfg(eps)).unwrap();
            let twice = compress_spline(&once.spline, eps, &cfg(eps)).unwrap();
            assert_eq!(once.spline, twice.spline, "seed {seed}");
        }
    }

    #[test]
    fn budget_allocation_examples() {
        let b = allocate_budgets(0.3, &[10, 10, 10], &BudgetPolicy::Uniform).unwrap();
        for x in &b {
            assert!((x - 0.1).abs() <= 1e-15);
        }
        assert!((b.iter().sum::<f64>() - 0.3).abs() <= 1e-12);
        let b = allocate_budgets(0.3, &[10], &BudgetPolicy::KnotWeighted).unwrap();
        assert_eq!(b, vec![0.3]);
        let b = allocate_budgets(0.4, &[30, 10], &BudgetPolicy::KnotWeighted).unwrap();
        assert!((b[0] - 0.3).abs() <= 1e-15 && (b[1] - 0.1).abs() <= 1e-15);
        assert!(allocate_budgets(0.3, &[], &BudgetPolicy::Uniform).is_err());
        assert!(allocate_budgets(0.3, &[5, 5], &BudgetPolicy::Explicit(vec![0.1, 0.1])).is_err());
        let b = allocate_budgets(0.3, &[5, 5], &BudgetPolicy::Explicit(vec![0.1, 0.2])).unwrap();
        assert_eq!(b, vec![0.1, 0.2]);
    }

    #[test]
    fn network_compression_respects_budgets() {
        let net = generate_synthetic(&SynthSpec {
            architecture: vec![3, 1],
            degree: 3,
            knots_per_spline: 8,
            seed: 5,
            target: SynthTarget::RandomControls,
            input_domain: None,
        })
        .unwrap();
        let (out, report) = compress_network(&net, &cfg(0.03)).unwrap();
        assert_eq!(report.layer_budgets, vec![0.03]);
        for r in &report.records {
            assert!((r.budget - 0.01).abs() <= 1e-15, "budget is eps / fan_in");
            assert!(r.certified_error <= r.budget);
            assert!(r.knots_after <= r.knots_before);
        }
        // layer-map gap bounded by sum of per-spline errors
        let (gap, _) = verify_equivalence(&net, &out, &SamplingSpec::default()).unwrap();
        assert!(gap <= 0.03 + 1e-8, "measured {gap}");
        assert!(out.region_bound() <= net.region_bound());
    }

    #[test]
    fn dp_tie_break_prefers_longest_last_segment() {
        // constants 0, 0.5, 1.0 with eps 0.3: adjacent pairs merge (error
        // 0.25), the whole span does not (error 0.5). Two 2-piece covers
        // exist; the smaller-j rule picks the one with the longer last
        // segment, i.e. knots [0, 1, 3].
        let s = PiecewiseSpline::new(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![poly(&[0.0]), poly(&[0.5]), poly(&[1.0])],
            0,
        )
        .unwrap();
        let c = compress_spline(&s, 0.3, &cfg(0.3)).unwrap();
        assert_eq!(c.spline.piece_count(), 2);
        assert_eq!(c.spline.knots(), &[0.0, 1.0, 3.0]);
    }

    #[test]
    fn compression_of_continuous_spline_bounds_continuity_defect() {
        // Each output piece stays within eps of the continuous original, so
        // value jumps at output knots are at most 2 * eps.
        let eps = 0.1;
        for seed in 0..5u64 {
            let net = generate_synthetic(&SynthSpec {
                architecture: vec![1, 1],
                degree: 3,
                knots_per_spline: 12,
                seed: 700 + seed,
                target: SynthTarget::RandomControls,
                input_domain: None,
            })
            .unwrap();
            let s = net.layers()[0].spline(0, 0);
            let c = compress_spline(s, eps, &cfg(eps)).unwrap();
            let defect = c.spline.continuity_defect(0).unwrap();
            assert!(
                defect <= 2.0 * eps + 1e-9,
                "seed {seed}: defect {defect} above 2*eps"
            );
        }
    }

    #[test]
    fn huge_eps_collapses_every_spline() {
        let net = generate_synthetic(&SynthSpec {
            architecture: vec![2, 2, 1],
            degree: 2,
            knots_per_spline: 7,
            seed: 9,
            target: SynthTarget::RandomControls,
            input_domain: None,
        })
        .unwrap();
        let (out, _) = compress_network(&net, &cfg(1e6)).unwrap();
        for layer in out.layers() {
            for row in layer.splines() {
                for s in row {
                    assert_eq!(s.piece_count(), 1);
                }
            }
        }
    }

    #[test]
    fn verify_equivalence_self_and_shifted() {
        let net = generate_synthetic(&SynthSpec {
            architecture: vec![2, 2],
            degree: 2,
            knots_per_spline: 5,
            seed: 2,
            target: SynthTarget::RandomControls,
            input_domain: None,
        })
        .unwrap();
        let (gap, _) = verify_equivalence(&net, &net, &SamplingSpec::default()).unwrap();
        assert!(gap <= 1e-12);

        // shift one edge spline by a constant 0.05
        let mut layers = net.layers().to_vec();
        let mut grid = layers[0].splines().to_vec();
        let s = &grid[0][1];
        let shifted: Vec<Polynomial> = s
            .pieces()
            .iter()
            .map(|p| p.add(&Polynomial::constant(0.05)))
            .collect();
        grid[0][1] = PiecewiseSpline::new(s.knots().to_vec(), shifted, s.degree()).unwrap();
        layers[0] = KanLayer::new(grid).unwrap();
        let other = net.with_layers(layers).unwrap();
        let (gap, _) = verify_equivalence(&net, &other, &SamplingSpec::default()).unwrap();
        assert!((gap - 0.05).abs() <= 1e-9, "measured {gap}");
    }

    #[test]
    fn verify_rejects_shape_mismatch() {
        let a = generate_synthetic(&SynthSpec {
            architecture: vec![2, 1],
            degree: 1,
            knots_per_spline: 4,
            seed: 0,
            target: SynthTarget::RandomControls,
            input_domain: None,
        })
        .unwrap();
        let b = generate_synthetic(&SynthSpec {
            architecture: vec![3, 1],
            degree: 1,
            knots_per_spline: 4,
            seed: 0,
            target: SynthTarget::RandomControls,
            input_domain: None,
        })
        .unwrap();
        assert!(matches!(
            verify_equivalence(&a, &b, &SamplingSpec::default()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn recertification_matches_recorded_errors() {
        let net = generate_synthetic(&SynthSpec {
            architecture: vec![2, 2],
            degree: 3,
            knots_per_spline: 9,
            seed: 21,
            target: SynthTarget::RandomControls,
            input_domain: None,
        })
        .unwrap();
        let (out, report) = compress_network(&net, &cfg(0.08)).unwrap();
        let recerts = recertify_splines(&net, &out).unwrap().expect("aligned");
        assert_eq!(recerts.len(), report.records.len());
        for (rec, rep) in recerts.iter().zip(&report.records) {
            assert!(
                (rec.certified_error - rep.certified_error).abs() <= 1e-9,
                "recertified {} vs recorded {}",
                rec.certified_error,
                rep.certified_error
            );
        }
    }

    #[test]
    fn piece_count_monotone_in_eps_with_remez() {
        let net = generate_synthetic(&SynthSpec {
            architecture: vec![1, 1],
            degree: 3,
            knots_per_spline: 9,
            seed: 31,
            target: SynthTarget::RandomControls,
            input_domain: None,
        })
        .unwrap();
        let s = net.layers()[0].spline(0, 0);
        let mut last = usize::MAX;
        for eps in [0.01, 0.05, 0.25, 1.25] {
            let c = compress_spline(s, eps, &cfg(eps).with_fit(FitMethod::remez())).unwrap();
            assert!(c.spline.piece_count() <= last);
            last = c.spline.piece_count();
        }
    }

    #[test]
    fn rejects_nonpositive_eps() {
        assert!(CompressionConfig::new(0.0).is_err());
        assert!(CompressionConfig::new(-1.0).is_err());
        let s = step_spline();
        assert!(compress_spline(&s, -0.5, &cfg(1.0)).is_err());
    }
}
