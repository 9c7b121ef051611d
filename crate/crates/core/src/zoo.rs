//! Test states: isotropic, Bell-diagonal, random separable, and a search for
//! PPT entangled qutrit states seen by the Choi witness.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{bell_projector, p00, BellIndex};
use crate::density::DensityOperator;
use crate::eigen::min_eigenvalue;
use crate::error::{Error, Result};
use crate::random::{random_ket, random_simplex, rng_from_seed};
use crate::tensor::{kron_ket, partial_transpose, ComplexMatrix};
use crate::witness::LambdaVec;

/// `F P₀₀ + (1 − F)(𝟙 − P₀₀)/(d² − 1)`.
pub fn isotropic_state(d: usize, f: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidArgument(format!(
            "fidelity {f} outside [0, 1]"
        )));
    }
    let phi = p00(d)?;
    let id = ComplexMatrix::identity(&[d, d])?;
    let rest = (&id - &phi).scale((1.0 - f) / (d * d - 1) as f64);
    DensityOperator::new(&phi.scale(f) + &rest)
}

/// `Σ_st p_st P_st`, with `p` indexed by `s·d + t`.
pub fn bell_diagonal_state(d: usize, p: &[f64]) -> Result<DensityOperator> {
    if p.len() != d * d {
        return Err(Error::InvalidArgument(format!(
            "expected {} Bell weights, got {}",
            d * d,
            p.len()
        )));
    }
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::InvalidArgument(
            "Bell weights must be non-negative".into(),
        ));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("Bell weights sum to {sum}")));
    }
    let mut m = ComplexMatrix::zeros(&[d, d])?;
    for idx in BellIndex::all(d) {
        let w = p[idx.s() * d + idx.t()];
        if w != 0.0 {
            m += &bell_projector(idx).scale(w);
        }
    }
    DensityOperator::new(m)
}

/// `tr[W(λ) ρ]` for a Bell-diagonal `ρ`: `Σ_s λ_s Σ_t p_st − p₀₀`.
pub fn bell_diagonal_expectation(lv: &LambdaVec, p: &[f64]) -> f64 {
    let d = lv.d();
    let mut v = -p[0];
    for (s, l) in lv.as_slice().iter().enumerate() {
        v += l * p[s * d..(s + 1) * d].iter().sum::<f64>();
    }
    v
}

/// Convex mixture of `terms` random product pure states with random weights.
pub fn random_separable(d: usize, terms: usize, seed: u64) -> Result<DensityOperator> {
    if terms == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    let mut rng = rng_from_seed(seed);
    let weights = random_simplex(&mut rng, terms);
    let mut m = ComplexMatrix::zeros(&[d, d])?;
    for w in weights {
        let a = random_ket(&mut rng, d);
        let b = random_ket(&mut rng, d);
        m += &ComplexMatrix::projector(&kron_ket(&a, &b), &[d, d])?.scale(w);
    }
    DensityOperator::new(m)
}

/// Feasibility floor for the partial transpose spectrum.
pub const PPT_SEARCH_FLOOR: f64 = -1e-12;
/// Required depth below zero for `tr[W_Choi ρ]`.
pub const CHOI_SEARCH_DEPTH: f64 = -1e-4;

#[derive(Clone, Debug, Serialize)]
pub struct ChoiCandidate {
    /// Bell weights indexed by `s·d + t`.
    pub p: Vec<f64>,
    pub tr_w: f64,
    pub min_pt_eig: f64,
    #[serde(skip)]
    pub rho: DensityOperator,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChoiScan {
    pub found: bool,
    pub resolution: usize,
    pub seed: u64,
    pub grid_points: usize,
    pub feasible_points: usize,
    pub refinement_moves: usize,
    pub best: Option<ChoiCandidate>,
}

fn evaluate(p: &[f64]) -> Result<(f64, f64)> {
    let rho = bell_diagonal_state(3, p)?;
    let pt = partial_transpose(rho.as_matrix(), &[1])?;
    Ok((
        bell_diagonal_expectation(&LambdaVec::choi(), p),
        min_eigenvalue(&pt)?,
    ))
}

/// Slice `(p₀₀, p₀₁ = p₀₂, p₁ₜ, p₂ₜ)` weights `(a, b, c, e)` expanded to 9.
fn slice_point(a: f64, b: f64, c: f64, e: f64) -> Vec<f64> {
    vec![
        a,
        b / 2.0,
        b / 2.0,
        c / 3.0,
        c / 3.0,
        c / 3.0,
        e / 3.0,
        e / 3.0,
        e / 3.0,
    ]
}

/// Grid search plus local refinement over Bell-diagonal qutrit states for
/// `min eig(ρ^Γ) ≥ −1e−12` and `tr[W_Choi ρ] ≤ −1e−4`.
///
/// The grid covers the four-weight slice `(P₀₀, rest of Π₀, Π₁, Π₂)` with
/// step `1/resolution`. The best feasible point is then refined over all
/// nine weights by mass transfers between pairs, deterministic sweeps first
/// and seeded random moves after, halving the step down to `1e−9`.
pub fn find_choi_detected_ppt(resolution: usize, seed: u64) -> Result<ChoiScan> {
    if resolution == 0 {
        return Err(Error::InvalidArgument(
            "resolution must be at least 1".into(),
        ));
    }
    let r = resolution;
    let mut cells = Vec::new();
    for a in 0..=r {
        for b in 0..=r - a {
            for c in 0..=r - a - b {
                cells.push((a, b, c, r - a - b - c));
            }
        }
    }
    let rf = r as f64;
    let evaluated: Vec<Option<(f64, usize, Vec<f64>)>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(a, b, c, e))| {
            let p = slice_point(a as f64 / rf, b as f64 / rf, c as f64 / rf, e as f64 / rf);
            let (tr_w, lo) = evaluate(&p).ok()?;
            (lo >= PPT_SEARCH_FLOOR).then_some((tr_w, i, p))
        })
        .collect();
    let feasible = evaluated.iter().flatten().count();
    let start = evaluated
        .into_iter()
        .flatten()
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let Some((mut best_val, _, mut p)) = start else {
        return Ok(ChoiScan {
            found: false,
            resolution,
            seed,
            grid_points: cells.len(),
            feasible_points: 0,
            refinement_moves: 0,
            best: None,
        });
    };

    let mut rng = rng_from_seed(seed);
    let mut moves = 0;
    let mut step = 1.0 / rf;
    while step > 1e-9 {
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..9 {
                for j in 0..9 {
                    if i != j && try_move(&mut p, &mut best_val, i, j, step)? {
                        improved = true;
                        moves += 1;
                    }
                }
            }
        }
        for _ in 0..64 {
            let i = rng.random_range(0..9);
            let j = rng.random_range(0..9);
            let amount = step * rng.random::<f64>();
            if i != j && try_move(&mut p, &mut best_val, i, j, amount)? {
                moves += 1;
            }
        }
        step /= 2.0;
    }

    let (tr_w, min_pt_eig) = evaluate(&p)?;
    let found = tr_w <= CHOI_SEARCH_DEPTH && min_pt_eig >= PPT_SEARCH_FLOOR;
    let rho = bell_diagonal_state(3, &p)?;
    Ok(ChoiScan {
        found,
        resolution,
        seed,
        grid_points: cells.len(),
        feasible_points: feasible,
        refinement_moves: moves,
        best: Some(ChoiCandidate {
            p,
            tr_w,
            min_pt_eig,
            rho,
        }),
    })
}

/// Moves `amount` of weight from entry `i` to entry `j` if the result stays
/// PPT and lowers the Choi expectation.
fn try_move(p: &mut [f64], best: &mut f64, i: usize, j: usize, amount: f64) -> Result<bool> {
    if p[i] < amount || amount <= 0.0 {
        return Ok(false);
    }
    let mut q = p.to_vec();
    q[i] -= amount;
    q[j] += amount;
    let (val, lo) = evaluate(&q)?;
    if lo >= PPT_SEARCH_FLOOR && val < *best {
        p.copy_from_slice(&q);
        *best = val;
        return Ok(true);
    }
    Ok(false)
}
