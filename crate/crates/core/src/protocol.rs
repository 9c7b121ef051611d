//! Detection by Bell post-selection and a fixed readout.
//!
//! The input `ρ` sits on layer 1. Each layer-1 site is Bell-measured jointly
//! with its layer-2 partner of the network, and only the all-`φ₀₀` outcome is
//! kept. The surviving layer-3 state is read out in the basis defined by the
//! network's readout circuit; outcome `0…0` estimates the overlap with the
//! readout state, which is compared with η.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::bell_basis_matrix;
use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::network::{bell_readout_circuit, NetworkState};
use crate::random::substream;
use crate::tensor::{kron, kron_all, overlap, partial_trace, ComplexMatrix, ZERO};
use crate::tolerance;
use crate::witness::Witness;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Shots drawn per RNG substream.
pub const SHOT_BATCH: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub struct FilterOutcome {
    pub success_prob: f64,
    pub out: DensityOperator,
}

/// `tr₁₂[ρ ⊗ N · P^(12)]` by direct index contraction.
///
/// With `P^(12)` the product of `P₀₀` over every (layer 1, layer 2) pair,
/// the result is `X[r,s] = (1/R) Σ_{a,a'} ρ[a,a'] N[(a,r),(a',s)]` where `R`
/// is the side of one layer. Cost `O(R⁴)`; the `R³`-sided protocol space is
/// never formed.
pub fn teleport_unnormalized(rho: &ComplexMatrix, net: &NetworkState) -> Result<ComplexMatrix> {
    if rho.dims() != net.layer_dims() {
        return Err(Error::DimensionMismatch(format!(
            "input dims {:?} do not match network layer {:?}",
            rho.dims(),
            net.layer_dims()
        )));
    }
    let side = net.layer_side();
    let n = net.state().as_matrix();
    let mut out = ComplexMatrix::zeros(net.layer_dims())?;
    let norm = 1.0 / side as f64;
    for a in 0..side {
        for b in 0..side {
            let w = rho[(a, b)];
            if w == ZERO {
                continue;
            }
            let w = w * norm;
            for r in 0..side {
                let row = (a * side + r) * n.side() + b * side;
                let src = &n.data()[row..row + side];
                for (s, v) in src.iter().enumerate() {
                    out[(r, s)] += w * v;
                }
            }
        }
    }
    Ok(out)
}

/// `Λ^(1→3)(ρ)` together with the post-selection probability.
pub fn filtering_channel(rho: &DensityOperator, net: &NetworkState) -> Result<FilterOutcome> {
    let x = teleport_unnormalized(rho.as_matrix(), net)?;
    let success_prob = x.trace().re;
    if success_prob <= tolerance::MIN_SUCCESS_PROB {
        return Err(Error::VanishingPostSelection(success_prob));
    }
    let sym = (&x + &x.adjoint()).scale(0.5 / success_prob);
    Ok(FilterOutcome {
        success_prob,
        out: DensityOperator::new(sym)?,
    })
}

/// `⟨φ₀₀|σ|φ₀₀⟩`.
pub fn singlet_fraction(sigma: &DensityOperator) -> Result<f64> {
    let dims = sigma.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::DimensionMismatch(format!(
            "singlet fraction needs a d⊗d state, got {dims:?}"
        )));
    }
    Ok(overlap(&crate::bell::phi_plus(dims[0]), sigma.as_matrix())?.re)
}

/// Outcome distribution after undoing `circuit`: `p_x = ⟨x|V†σV|x⟩`.
pub fn readout_probs(sigma: &ComplexMatrix, circuit: &ComplexMatrix) -> Result<Vec<f64>> {
    let rotated = circuit.adjoint().matmul(sigma)?.matmul(circuit)?;
    Ok((0..rotated.side())
        .map(|i| rotated[(i, i)].re.max(0.0))
        .collect())
}

/// `p[j][k]` for computational outcome `(j, k)` after `(H† ⊗ 𝟙) U_CNOT†`.
/// Outcome `(j, k)` corresponds to the Bell label `(s, t) = (k, j)`.
pub fn measurement_circuit_probs(sigma: &DensityOperator) -> Result<Vec<Vec<f64>>> {
    let dims = sigma.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::DimensionMismatch(format!(
            "measurement circuit needs a d⊗d state, got {dims:?}"
        )));
    }
    let d = dims[0];
    let flat = readout_probs(sigma.as_matrix(), &bell_readout_circuit(d)?)?;
    Ok(flat.chunks(d).map(|c| c.to_vec()).collect())
}

/// Joint distribution of all Bell outcomes on the (layer 1, layer 2) pairs.
/// Entry index composes `(s, t)` per pair, first pair most significant, so
/// index 0 is the post-selected all-`φ₀₀` outcome.
pub fn bell_outcome_probs(rho: &DensityOperator, net: &NetworkState) -> Result<Vec<f64>> {
    let layer = net.layer_dims().to_vec();
    if rho.dims() != layer.as_slice() {
        return Err(Error::DimensionMismatch(format!(
            "input dims {:?} do not match network layer {layer:?}",
            rho.dims()
        )));
    }
    let n = layer.len();
    let keep: Vec<usize> = (0..n).collect();
    let marginal = partial_trace(net.state().as_matrix(), &keep)?;
    let joint = kron(rho.as_matrix(), &marginal);
    let mut perm = Vec::with_capacity(2 * n);
    for k in 0..n {
        perm.push(k);
        perm.push(n + k);
    }
    let paired = joint.permute_factors(&perm)?;
    let bases: Vec<ComplexMatrix> = layer
        .iter()
        .map(|&d| bell_basis_matrix(d))
        .collect::<Result<_>>()?;
    let basis = kron_all(bases.iter()).expect("at least one pair");
    readout_probs(&paired, &basis)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Detected,
    NotDetected,
    Inconclusive,
}

/// Finite-shot statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotSummary {
    pub seed: u64,
    pub n_total: u64,
    pub n_postselected: u64,
    /// Post-selected shots whose readout was `0…0`.
    pub n_hits: u64,
    pub postselect_rate: f64,
    /// Binomial standard error of the post-selection rate.
    pub postselect_std: f64,
    pub estimate: Option<f64>,
    pub std_error: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// Whether the 95% interval excludes η.
    pub significant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub network_family: String,
    pub witness_family: String,
    pub layer_dims: Vec<usize>,
    pub success_prob: f64,
    /// Normalized overlap of the filtered state with the readout state.
    pub singlet_fraction: f64,
    pub eta: f64,
    /// `singlet_fraction − η`.
    pub margin: f64,
    pub verdict: Verdict,
    /// Exact `tr[ρW]`.
    pub witness_expectation: f64,
    /// `R · ⟨r|tr₁₂[ρ⊗N P^(12)]|r⟩`, `R` the side of one layer.
    pub bell_signal: f64,
    /// `R · η · success_prob`; detection iff `bell_signal > bell_threshold`.
    pub bell_threshold: f64,
    pub recon_constant: f64,
    pub shots: Option<ShotSummary>,
}

/// Exact detection run. Errors if the readout verdict disagrees with the sign
/// of `tr[ρW]` outside the boundary band.
pub fn detect_exact(
    rho: &DensityOperator,
    net: &NetworkState,
    w: &Witness,
) -> Result<DetectionReport> {
    if w.dims() != net.layer_dims() {
        return Err(Error::DimensionMismatch(format!(
            "witness dims {:?} do not match network layer {:?}",
            w.dims(),
            net.layer_dims()
        )));
    }
    let x = teleport_unnormalized(rho.as_matrix(), net)?;
    let success_prob = x.trace().re;
    if success_prob <= tolerance::MIN_SUCCESS_PROB {
        return Err(Error::VanishingPostSelection(success_prob));
    }
    let raw = overlap(&net.readout_state(), &x)?.re;
    let fraction = raw / success_prob;
    let eta = net.eta();
    let margin = fraction - eta;
    let expectation = w.expectation(rho)?;
    let disagree = (margin > tolerance::VERDICT_BAND && expectation >= 0.0)
        || (margin < -tolerance::VERDICT_BAND && expectation < 0.0);
    if disagree {
        return Err(Error::VerdictMismatch {
            fraction,
            eta,
            expectation,
        });
    }
    let side = net.layer_side() as f64;
    Ok(DetectionReport {
        network_family: net.family().to_string(),
        witness_family: w.family().to_string(),
        layer_dims: net.layer_dims().to_vec(),
        success_prob,
        singlet_fraction: fraction,
        eta,
        margin,
        verdict: if fraction > eta {
            Verdict::Detected
        } else {
            Verdict::NotDetected
        },
        witness_expectation: expectation,
        bell_signal: side * raw,
        bell_threshold: side * eta * success_prob,
        recon_constant: net.recon_constant(),
        shots: None,
    })
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Copy, Default)]
struct Counts {
    post: u64,
    hits: u64,
}

fn weighted(probs: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(probs.iter().map(|p| p.max(0.0)))
        .map_err(|e| Error::InvalidArgument(format!("sampling weights: {e}")))
}

/// Finite-shot run. Every shot draws the full Bell outcome on all pairs from
/// the exact joint distribution; post-selected shots then draw a readout
/// outcome. Batches of [`SHOT_BATCH`] shots use RNG substreams and run in
/// parallel, so results depend only on `seed`.
pub fn detect_shots(
    rho: &DensityOperator,
    net: &NetworkState,
    w: &Witness,
    shots: u64,
    seed: u64,
) -> Result<DetectionReport> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut report = detect_exact(rho, net, w)?;
    let bell = weighted(&bell_outcome_probs(rho, net)?)?;
    let filtered = filtering_channel(rho, net)?;
    let readout = weighted(&readout_probs(
        filtered.out.as_matrix(),
        net.readout_circuit(),
    )?)?;

    let batches = shots.div_ceil(SHOT_BATCH);
    let counts = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, b);
            let n = SHOT_BATCH.min(shots - b * SHOT_BATCH);
            let mut c = Counts::default();
            for _ in 0..n {
                if bell.sample(&mut rng) == 0 {
                    c.post += 1;
                    if readout.sample(&mut rng) == 0 {
                        c.hits += 1;
                    }
                }
            }
            c
        })
        .reduce(Counts::default, |a, b| Counts {
            post: a.post + b.post,
            hits: a.hits + b.hits,
        });

    let rate = counts.post as f64 / shots as f64;
    let eta = report.eta;
    let (estimate, std_error, ci_low, ci_high, verdict, significant) = if counts.post == 0 {
        (None, None, None, None, Verdict::Inconclusive, false)
    } else {
        let p = counts.hits as f64 / counts.post as f64;
        let se = (p * (1.0 - p) / counts.post as f64).sqrt();
        let (lo, hi) = wilson_interval(counts.hits, counts.post, Z95);
        let verdict = if p > eta {
            Verdict::Detected
        } else {
            Verdict::NotDetected
        };
        (
            Some(p),
            Some(se),
            Some(lo),
            Some(hi),
            verdict,
            lo > eta || hi < eta,
        )
    };
    report.verdict = verdict;
    report.shots = Some(ShotSummary {
        seed,
        n_total: shots,
        n_postselected: counts.post,
        n_hits: counts.hits,
        postselect_rate: rate,
        postselect_std: (report.success_prob * (1.0 - report.success_prob) / shots as f64).sqrt(),
        estimate,
        std_error,
        ci_low,
        ci_high,
        significant,
    });
    Ok(report)
}

/// Materializes the protocol space and contracts with explicit projectors.
/// Reference implementation for small sizes; cost `O(R⁹)`.
pub fn teleport_materialized(rho: &ComplexMatrix, net: &NetworkState) -> Result<ComplexMatrix> {
    let layer = net.layer_dims().to_vec();
    let n = layer.len();
    let full = kron(rho, net.state().as_matrix());
    let dims = full.dims().to_vec();
    let mut post = ComplexMatrix::identity(&dims)?;
    for (k, &d) in layer.iter().enumerate() {
        let p = crate::bell::p00(d)?;
        let e = crate::tensor::embed(&p, &[k, n + k], &dims)?;
        post = post.matmul(&e)?;
    }
    let keep: Vec<usize> = (2 * n..3 * n).collect();
    partial_trace(&full.matmul(&post)?, &keep)
}
