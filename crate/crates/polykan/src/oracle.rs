//! Independent brute-force and dense-sampling oracles.
//!
//! These deliberately avoid the dynamic program's search structure: subset
//! enumeration checks every interior-knot subset against the same
//! mergability kernel, dense grids bound sup norms from below, and region
//! counting classifies grid points by raw piece-index signatures. The
//! compressor is certified against them, not the other way around.

use crate::approx::FitMethod;
use crate::compressor::{self, CompressionConfig};
use crate::error::{Error, Result};
use crate::network::KanNetwork;
use crate::poly::Interval;
use crate::spline::PiecewiseSpline;
use std::collections::BTreeSet;

/// Outcome of exhaustive knot-subset search, with the layered algorithm's
/// knot count compared against the optimum (same eps, same fit method).
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub optimum_piece_count: usize,
    /// Interior-knot indices (into the original knot list) kept by a
    /// witness optimal subset.
    pub optimal_subset: Vec<usize>,
    /// ALG / OPT on knot counts; 1.0 when the dynamic program matches the
    /// optimum.
    pub alg_over_opt: f64,
}

/// Maximum interior knots the exhaustive search accepts (2^14 subsets).
pub const BRUTE_FORCE_CAP: usize = 14;

/// Enumerates every interior-knot subset of `s`; a subset is feasible when
/// every induced segment has a merge certificate within `eps`. Returns the
/// minimal piece count, a witness subset, and the ALG/OPT ratio against
/// [`compressor::compress_spline`].
pub fn brute_force_compress(
    s: &PiecewiseSpline,
    eps: f64,
    fit: &FitMethod,
) -> Result<OracleResult> {
    let k = s.piece_count();
    let interior = k - 1;
    if interior > BRUTE_FORCE_CAP {
        return Err(Error::invalid(format!(
            "{interior} interior knots exceed the brute-force cap of {BRUTE_FORCE_CAP}"
        )));
    }
    let degree = s.degree();
    // Pairwise feasibility via the shared kernel.
    let mut feasible = vec![vec![false; k + 1]; k + 1];
    for i in 1..=k {
        for (j, row) in feasible.iter_mut().enumerate().take(i) {
            row[i] = compressor::segment_certificate(s, j, i, degree, eps, fit)?.is_some();
        }
    }

    let mut best_count = usize::MAX;
    let mut best_mask = 0u32;
    for mask in 0..(1u32 << interior) {
        let count = mask.count_ones() as usize + 1;
        if count >= best_count {
            continue;
        }
        let mut prev = 0usize;
        let mut ok = true;
        for b in 0..interior {
            if mask & (1 << b) != 0 {
                let idx = b + 1;
                if !feasible[prev][idx] {
                    ok = false;
                    break;
                }
                prev = idx;
            }
        }
        if ok && feasible[prev][k] {
            best_count = count;
            best_mask = mask;
        }
    }
    debug_assert!(best_count != usize::MAX, "keeping all knots is feasible");

    let cfg = CompressionConfig::new(eps)?.with_fit(fit.clone());
    let alg = compressor::compress_spline(s, eps, &cfg)?;
    let alg_knots = alg.spline.knot_count() as f64;
    let opt_knots = (best_count + 1) as f64;
    Ok(OracleResult {
        optimum_piece_count: best_count,
        optimal_subset: (0..interior)
            .filter(|b| best_mask & (1 << b) != 0)
            .map(|b| b + 1)
            .collect(),
        alg_over_opt: alg_knots / opt_knots,
    })
}

/// Max |f - g| over a tensor grid of `points_per_dim` per axis, augmented
/// with probe coordinates `probe +/- 1e-9` per axis (pass breakpoint
/// locations to sharpen the estimate near region boundaries). Both
/// functions map a point to an output vector; the gap is the max over
/// output coordinates. Returns the gap and a witness point.
pub fn dense_sup_gap<F, G>(
    f: F,
    g: G,
    box_: &[Interval],
    points_per_dim: usize,
    axis_probes: &[Vec<f64>],
) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let dim = box_.len();
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for (d, &iv) in box_.iter().enumerate() {
        let n = points_per_dim.max(2);
        let mut coords: Vec<f64> = (0..n)
            .map(|i| iv.lo + iv.length() * (i as f64) / ((n - 1) as f64))
            .collect();
        if let Some(probes) = axis_probes.get(d) {
            for &t in probes {
                coords.push(iv.clamp(t - 1e-9));
                coords.push(iv.clamp(t + 1e-9));
            }
        }
        coords.sort_by(f64::total_cmp);
        coords.dedup();
        axes.push(coords);
    }
    let mut worst = (0.0f64, vec![0.0; dim]);
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    loop {
        for d in 0..dim {
            x[d] = axes[d][idx[d]];
        }
        let fa = f(&x);
        let fb = g(&x);
        let gap = fa
            .iter()
            .zip(&fb)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        if gap > worst.0 {
            worst = (gap, x.clone());
        }
        let mut d = 0;
        loop {
            if d == dim {
                return worst;
            }
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Counts distinct first-layer piece-index signatures over a uniform grid.
/// Matches the exact first-layer partition count once the grid resolves
/// every inter-knot interval (roughly twice the per-dim knot count).
pub fn grid_region_count(net: &KanNetwork, points_per_dim: usize) -> Result<usize> {
    let dim = net.input_dim();
    if dim > 3 {
        return Err(Error::invalid(
            "grid region counting is limited to 3 input dimensions",
        ));
    }
    if points_per_dim < 2 {
        return Err(Error::invalid("points_per_dim must be at least 2"));
    }
    let first = &net.layers()[0];
    let box_ = net.input_domain();
    let mut signatures: BTreeSet<Vec<u16>> = BTreeSet::new();
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    loop {
        for d in 0..dim {
            x[d] = box_[d].lo + box_[d].length() * (idx[d] as f64) / ((points_per_dim - 1) as f64);
        }
        let mut sig = Vec::with_capacity(first.fan_out() * first.fan_in());
        for j in 0..first.fan_out() {
            for (d, &xi) in x.iter().enumerate() {
                sig.push(first.spline(j, d).piece_index(xi)? as u16);
            }
        }
        signatures.insert(sig);
        let mut d = 0;
        loop {
            if d == dim {
                return Ok(signatures.len());
            }
            idx[d] += 1;
            if idx[d] < points_per_dim {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{generate_synthetic, SynthSpec, SynthTarget};
    use crate::poly::Polynomial;

    fn poly(coeffs: &[f64]) -> Polynomial {
        Polynomial::new(coeffs.to_vec())
    }

    #[test]
    fn split_polynomial_optimum_is_one() {
        let p = poly(&[0.1, 0.4, -0.2]);
        let s = PiecewiseSpline::new(vec![0.0, 1.0, 2.0, 3.0], vec![p.clone(), p.clone(), p], 2)
            .unwrap();
        let r = brute_force_compress(&s, 0.5, &FitMethod::default()).unwrap();
        assert_eq!(r.optimum_piece_count, 1);
        assert!(r.optimal_subset.is_empty());
        assert_eq!(r.alg_over_opt, 1.0);
    }

    #[test]
    fn step_below_threshold_needs_two_pieces() {
        let s =
            PiecewiseSpline::new(vec![0.0, 1.0, 2.0], vec![poly(&[0.0]), poly(&[1.0])], 0).unwrap();
        let r = brute_force_compress(&s, 0.4, &FitMethod::default()).unwrap();
        assert_eq!(r.optimum_piece_count, 2);
        assert_eq!(r.alg_over_opt, 1.0);
    }

    #[test]
    fn cap_enforced() {
        let knots: Vec<f64> = (0..=16).map(|i| i as f64).collect();
        let pieces = (0..16).map(|_| poly(&[1.0])).collect();
        let s = PiecewiseSpline::new(knots, pieces, 0).unwrap();
        assert!(brute_force_compress(&s, 0.1, &FitMethod::default()).is_err());
    }

    #[test]
    fn dp_matches_brute_force_on_random_splines() {
        use rand::{Rng, SeedableRng};
        for seed in 0..15u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let pieces = rng.gen_range(4..=8usize);
            let degree = rng.gen_range(0..=3usize);
            let knots: Vec<f64> = (0..=pieces).map(|i| i as f64 / pieces as f64).collect();
            let ps = (0..pieces)
                .map(|_| Polynomial::new((0..=degree).map(|_| rng.gen_range(-1.5..1.5)).collect()))
                .collect();
            let s = PiecewiseSpline::new(knots, ps, degree).unwrap();
            let eps = 10f64.powf(rng.gen_range(-2.0..0.0));
            let r = brute_force_compress(&s, eps, &FitMethod::default()).unwrap();
            assert_eq!(r.alg_over_opt, 1.0, "seed {seed} eps {eps}");
        }
    }

    #[test]
    fn dense_gap_trivial_cases() {
        let box_ = vec![Interval::new(0.0, 1.0).unwrap(); 2];
        let f = |x: &[f64]| vec![x[0] + x[1]];
        let same = |x: &[f64]| vec![x[0] + x[1]];
        let (gap, _) = dense_sup_gap(f, same, &box_, 11, &[]);
        assert_eq!(gap, 0.0);
        let shifted = |x: &[f64]| vec![x[0] + x[1] + 0.05];
        let (gap, _) = dense_sup_gap(f, shifted, &box_, 11, &[]);
        assert!((gap - 0.05).abs() <= 1e-15);
    }

    #[test]
    fn dense_gap_never_exceeds_the_certificate() {
        use crate::approx::{certified_sup_error, fit_poly};
        for seed in 0..6u64 {
            let net = generate_synthetic(&SynthSpec {
                architecture: vec![1, 1],
                degree: 3,
                knots_per_spline: 7,
                seed: 300 + seed,
                target: SynthTarget::RandomControls,
                input_domain: None,
            })
            .unwrap();
            let s = net.layers()[0].spline(0, 0).clone();
            let iv = s.domain();
            let p = fit_poly(&s, &iv, 3, &FitMethod::default()).unwrap();
            let e = certified_sup_error(&s, &p, &iv).unwrap();
            let s2 = s.clone();
            let p2 = p.clone();
            let (gap, _) = dense_sup_gap(
                move |x: &[f64]| vec![s.eval(x[0]).unwrap()],
                move |x: &[f64]| vec![p.eval(x[0])],
                &[iv],
                5000,
                &[s2.knots().to_vec()],
            );
            assert!(
                gap <= e.value + 1e-8,
                "seed {seed}: dense gap {gap} above certified {}",
                e.value
            );
            // with knot probes the scan comes close to the certificate
            assert!(gap >= e.value - 1e-4, "seed {seed}: scan too loose");
            let _ = p2;
        }
    }

    #[test]
    fn region_count_examples() {
        // single-piece splines: one region
        let net = generate_synthetic(&SynthSpec {
            architecture: vec![2, 2],
            degree: 1,
            knots_per_spline: 2,
            seed: 0,
            target: SynthTarget::RandomControls,
            input_domain: None,
        })
        .unwrap();
        assert_eq!(grid_region_count(&net, 9).unwrap(), 1);

        // knots {1/3} on x1 and {1/2, 2/3} on x2: 2 x 3 regions
        let mk = |interior: &[f64]| {
            let mut knots = vec![0.0];
            knots.extend_from_slice(interior);
            knots.push(1.0);
            let pieces = (0..knots.len() - 1)
                .map(|i| Polynomial::constant(i as f64))
                .collect();
            PiecewiseSpline::new(knots, pieces, 0).unwrap()
        };
        let layer =
            crate::network::KanLayer::new(vec![vec![mk(&[1.0 / 3.0]), mk(&[0.5, 2.0 / 3.0])]])
                .unwrap();
        let net = KanNetwork::new(
            vec![layer],
            vec![Interval::new(0.0, 1.0).unwrap(); 2],
            crate::network::OutOfDomainPolicy::Clamp,
        )
        .unwrap();
        assert_eq!(grid_region_count(&net, 25).unwrap(), 6);
        assert_eq!(net.exact_first_layer_partition().exact_first_layer, 6);
    }

    #[test]
    fn region_count_matches_exact_partition_on_random_nets() {
        for seed in 0..10u64 {
            let net = generate_synthetic(&SynthSpec {
                architecture: vec![2, 4],
                degree: 2,
                knots_per_spline: 5,
                seed,
                target: SynthTarget::RandomControls,
                input_domain: None,
            })
            .unwrap();
            let exact = net.exact_first_layer_partition().exact_first_layer;
            let grid = grid_region_count(&net, 33).unwrap();
            assert_eq!(grid as u128, exact, "seed {seed}");
        }
    }
}
