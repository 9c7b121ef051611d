//! Seesaw minimization of `⟨a₁⊗…⊗a_m| W |a₁⊗…⊗a_m⟩` over unit product kets.
//!
//! Each sweep fixes all parties but one and replaces that party's ket by the
//! lowest eigenvector of the conditioned `d_k × d_k` operator, so the value
//! never increases. Restarts use independent RNG substreams and run in
//! parallel; the lowest value wins (ties go to the lower restart index).

use rayon::prelude::*;

use crate::eigen::hermitian_eigen;
use crate::error::{Error, Result};
use crate::random::{random_ket, substream};
use crate::tensor::{digits, kron_ket, ComplexMatrix, Ket, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub iters: usize,
    /// Stop a restart once a full sweep lowers the value by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            iters: 200,
            tol: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub value: f64,
    /// Optimal local kets, one per tensor factor.
    pub kets: Vec<Ket>,
    pub restart: usize,
}

/// Lowest product-state expectation found for a Hermitian `w`.
pub fn sep_floor_estimate(w: &ComplexMatrix, cfg: SeesawConfig) -> Result<SeesawResult> {
    if cfg.restarts == 0 || cfg.iters == 0 {
        return Err(Error::InvalidArgument(
            "seesaw needs restarts >= 1 and iters >= 1".into(),
        ));
    }
    let defect = w.hermiticity_defect();
    if defect > 1e-8 {
        return Err(Error::NotHermitian(defect));
    }
    let runs: Vec<Result<SeesawResult>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| single_restart(w, cfg, r))
        .collect();
    let mut best: Option<SeesawResult> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn single_restart(w: &ComplexMatrix, cfg: SeesawConfig, restart: usize) -> Result<SeesawResult> {
    let dims = w.dims().to_vec();
    let mut rng = substream(cfg.seed, restart as u64);
    let mut kets: Vec<Ket> = dims.iter().map(|&d| random_ket(&mut rng, d)).collect();
    let mut value = product_value(w, &kets);
    for _ in 0..cfg.iters {
        for k in 0..dims.len() {
            let cond = conditioned(w, &kets, k)?;
            let eig = hermitian_eigen(&cond)?;
            kets[k] = eig.vectors.column(0);
        }
        let next = product_value(w, &kets);
        let improved = value - next;
        value = next;
        if improved.abs() < cfg.tol {
            break;
        }
    }
    Ok(SeesawResult {
        value,
        kets,
        restart,
    })
}

fn product_value(w: &ComplexMatrix, kets: &[Ket]) -> f64 {
    let full = kets[1..]
        .iter()
        .fold(kets[0].clone(), |acc, k| kron_ket(&acc, k));
    crate::tensor::overlap(&full, w)
        .expect("ket length matches")
        .re
}

/// `(⊗_{j≠k} ⟨a_j|) W (⊗_{j≠k} |a_j⟩)` as a `d_k × d_k` matrix.
fn conditioned(w: &ComplexMatrix, kets: &[Ket], k: usize) -> Result<ComplexMatrix> {
    let dims = w.dims();
    let n = w.side();
    let dk = dims[k];
    let mut local = vec![0usize; n];
    let mut amp = vec![ZERO; n];
    let mut dig = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut dig);
        local[i] = dig[k];
        amp[i] = dig
            .iter()
            .enumerate()
            .filter(|&(f, _)| f != k)
            .map(|(f, &x)| kets[f][x])
            .product();
    }
    let mut out = vec![ZERO; dk * dk];
    for i in 0..n {
        let ai = amp[i].conj();
        if ai == ZERO {
            continue;
        }
        for j in 0..n {
            out[local[i] * dk + local[j]] += ai * w[(i, j)] * amp[j];
        }
    }
    let m = ComplexMatrix::from_vec(&[dk], out)?;
    // re-symmetrize against round-off
    Ok((&m + &m.adjoint()).scale(C64::new(0.5, 0.0)))
}
