//! Entanglement witness families.
//!
//! Matrices are kept exactly as the constructions define them (no trace
//! normalization), so reconstruction constants stay literal.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{bell_state, flip_prime, p00, pi_s, BellIndex};
use crate::density::DensityOperator;
use crate::eigen::min_eigenvalue;
use crate::error::{Error, Result};
use crate::random::rng_from_seed;
use crate::seesaw::{sep_floor_estimate, SeesawConfig, SeesawResult};
use crate::tensor::{partial_transpose, ComplexMatrix};
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessFamily {
    TwoQubitPt,
    Decomposable,
    BellDiagonal,
    Reduction,
    Choi,
    BreuerHall,
    Ghz,
    Graph,
}

impl fmt::Display for WitnessFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WitnessFamily::TwoQubitPt => "two-qubit-pt",
            WitnessFamily::Decomposable => "decomposable",
            WitnessFamily::BellDiagonal => "bell-diagonal",
            WitnessFamily::Reduction => "reduction",
            WitnessFamily::Choi => "choi",
            WitnessFamily::BreuerHall => "breuer-hall",
            WitnessFamily::Ghz => "ghz",
            WitnessFamily::Graph => "graph",
        };
        f.write_str(s)
    }
}

/// Probability vector `(λ₀, …, λ_{d−1})` weighting the `Π_s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LambdaVec(Vec<f64>);

impl LambdaVec {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidLambda(format!(
                "need at least two entries, got {}",
                entries.len()
            )));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidLambda(format!(
                "negative or non-finite entry {x}"
            )));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidLambda(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self(entries))
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![1.0 / d as f64; d])
    }

    /// `(2/3, 1/3, 0)`.
    pub fn choi() -> Self {
        Self(vec![2.0 / 3.0, 1.0 / 3.0, 0.0])
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn lambda0(&self) -> f64 {
        self.0[0]
    }
}

impl TryFrom<Vec<f64>> for LambdaVec {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        LambdaVec::new(v)
    }
}

impl From<LambdaVec> for Vec<f64> {
    fn from(l: LambdaVec) -> Self {
        l.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    mat: ComplexMatrix,
    family: WitnessFamily,
    eta: f64,
    lambda: Option<LambdaVec>,
}

impl Witness {
    /// Checks hermiticity and that at least one eigenvalue is negative.
    pub fn new(
        mat: ComplexMatrix,
        family: WitnessFamily,
        eta: f64,
        lambda: Option<LambdaVec>,
    ) -> Result<Self> {
        let defect = mat.hermiticity_defect();
        if defect > tolerance::STRUCTURAL {
            return Err(Error::NotHermitian(defect));
        }
        let lo = min_eigenvalue(&mat)?;
        if lo >= -tolerance::STRUCTURAL {
            return Err(Error::NotAWitness(lo));
        }
        Ok(Self {
            mat,
            family,
            eta,
            lambda,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn family(&self) -> WitnessFamily {
        self.family
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn lambda(&self) -> Option<&LambdaVec> {
        self.lambda.as_ref()
    }

    pub fn dims(&self) -> &[usize] {
        self.mat.dims()
    }

    /// `tr[ρ W]`.
    pub fn expectation(&self, rho: &DensityOperator) -> Result<f64> {
        rho.expectation(&self.mat)
    }

    pub fn sep_floor(&self, cfg: SeesawConfig) -> Result<SeesawResult> {
        sep_floor_estimate(&self.mat, cfg)
    }

    pub fn descriptor(&self) -> WitnessDescriptor {
        WitnessDescriptor {
            family: self.family,
            d: self.mat.dims()[0],
            eta: self.eta,
            lambda: self.lambda.as_ref().map(|l| l.0.clone()),
            matrix: self.mat.clone(),
        }
    }
}

/// JSON form `{family, d, eta, lambda, matrix}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessDescriptor {
    pub family: WitnessFamily,
    pub d: usize,
    pub eta: f64,
    pub lambda: Option<Vec<f64>>,
    pub matrix: ComplexMatrix,
}

/// `W = |φ⁺⟩⟨φ⁺|^Γ = ½𝟙 − |ψ⁻⟩⟨ψ⁻|`, η = 1/2.
pub fn two_qubit_pt_witness() -> Witness {
    let mat = partial_transpose(&p00(2).expect("d = 2"), &[1]).expect("two factors");
    Witness::new(mat, WitnessFamily::TwoQubitPt, 0.5, None).expect("valid witness")
}

/// `W = Q^Γ` (partial transpose on the second factor), η = 1/d.
pub fn decomposable_witness(q: &DensityOperator) -> Result<Witness> {
    let dims = q.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::DimensionMismatch(format!(
            "decomposable witness needs Q on d⊗d, got {dims:?}"
        )));
    }
    let d = dims[0];
    let mat = partial_transpose(q.as_matrix(), &[1])?;
    Witness::new(mat, WitnessFamily::Decomposable, 1.0 / d as f64, None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclicCheck {
    pub pass: bool,
    /// Largest left-hand side seen (`+∞` for a vanishing denominator).
    pub worst: f64,
    /// `d − worst`; non-negative on pass.
    pub margin: f64,
    pub samples: usize,
    pub worst_t: Vec<f64>,
}

/// `Σ_j t_j² / Σ_s λ_s t_{j+s}²`, with `0/0` terms skipped and `x/0 = +∞`.
pub fn cyclic_lhs(lambda: &[f64], t: &[f64]) -> f64 {
    let d = lambda.len();
    let mut total = 0.0;
    for j in 0..d {
        let num = t[j] * t[j];
        if num == 0.0 {
            continue;
        }
        let den: f64 = (0..d).map(|s| lambda[s] * t[(j + s) % d].powi(2)).sum();
        if den <= 0.0 {
            return f64::INFINITY;
        }
        total += num / den;
    }
    total
}

/// Randomized falsifier for the cyclic inequalities: corner cases (basis
/// vectors, all-ones) plus `trials` random non-negative `t`, a third of
/// their coordinates zeroed at random. Passing is evidence, not proof.
pub fn cyclic_inequality_check(lv: &LambdaVec, trials: usize, seed: u64) -> Result<CyclicCheck> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "cyclic check needs trials >= 1".into(),
        ));
    }
    let d = lv.d();
    let lambda = lv.as_slice();
    let mut candidates: Vec<Vec<f64>> = (0..d)
        .map(|k| (0..d).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
        .collect();
    candidates.push(vec![1.0; d]);
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let t: Vec<f64> = (0..d)
            .map(|_| {
                if rng.random::<f64>() < 1.0 / 3.0 {
                    0.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        candidates.push(t);
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_t = Vec::new();
    for t in &candidates {
        let v = cyclic_lhs(lambda, t);
        if v > worst {
            worst = v;
            worst_t = t.clone();
        }
    }
    let bound = d as f64;
    Ok(CyclicCheck {
        pass: worst <= bound + tolerance::CYCLIC_SLACK,
        worst,
        margin: bound - worst,
        samples: candidates.len(),
        worst_t,
    })
}

/// Number of random `t` vectors used when a Bell-diagonal witness is built.
pub const DEFAULT_CYCLIC_TRIALS: usize = 10_000;

/// `W[λ] = Σ_s λ_s Π_s − P₀₀`, η = λ₀. Refuses λ failing the cyclic check.
pub fn bell_diagonal_witness(lv: &LambdaVec) -> Result<Witness> {
    let check = cyclic_inequality_check(lv, DEFAULT_CYCLIC_TRIALS, 0)?;
    if !check.pass {
        return Err(Error::CyclicInequality {
            worst: check.worst,
            bound: lv.d() as f64,
        });
    }
    let d = lv.d();
    let mat = bell_diagonal_operator(lv)?;
    let family = if lv
        .as_slice()
        .iter()
        .all(|&x| (x - 1.0 / d as f64).abs() < 1e-15)
    {
        WitnessFamily::Reduction
    } else if d == 3 && *lv == LambdaVec::choi() {
        WitnessFamily::Choi
    } else {
        WitnessFamily::BellDiagonal
    };
    Witness::new(mat, family, lv.lambda0(), Some(lv.clone()))
}

/// `Σ_s λ_s Π_s − P₀₀` without the witness checks.
pub fn bell_diagonal_operator(lv: &LambdaVec) -> Result<ComplexMatrix> {
    let d = lv.d();
    let mut mat = -&p00(d)?;
    for (s, &l) in lv.as_slice().iter().enumerate() {
        if l != 0.0 {
            mat += &pi_s(d, s)?.scale(l);
        }
    }
    Ok(mat)
}

/// `W_Choi = ⅔Π₀ + ⅓Π₁ − P₀₀` on 3⊗3, η = 2/3.
pub fn choi_witness() -> Witness {
    bell_diagonal_witness(&LambdaVec::choi()).expect("Choi λ is valid")
}

/// `W_red = 𝟙/d − P₀₀`, η = 1/d.
pub fn reduction_witness(d: usize) -> Result<Witness> {
    let mat = &ComplexMatrix::identity(&[d, d])?.scale(1.0 / d as f64) - &p00(d)?;
    Witness::new(
        mat,
        WitnessFamily::Reduction,
        1.0 / d as f64,
        Some(LambdaVec::uniform(d)?),
    )
}

fn check_bh_dimension(d: usize) -> Result<()> {
    if !d.is_multiple_of(2) {
        return Err(Error::OddDimension(d));
    }
    if d < 4 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// `(1/d)(𝟙 − 𝔽′) − P₀₀`: the Breuer–Hall operator without the `1/(d−2)`
/// prefactor. This is the operator the BH network reconstructs with
/// constant `c₀/d²`.
pub fn breuer_hall_operator(d: usize) -> Result<ComplexMatrix> {
    check_bh_dimension(d)?;
    let id = ComplexMatrix::identity(&[d, d])?;
    let fp = flip_prime(d)?;
    Ok(&(&id - &fp).scale(1.0 / d as f64) - &p00(d)?)
}

/// `W_BH = (1/(d−2)) (𝟙/d − P₀₀ − 𝔽′/d)` for even `d ≥ 4`, η = 1/d.
pub fn breuer_hall_witness(d: usize) -> Result<Witness> {
    let mat = breuer_hall_operator(d)?.scale(1.0 / (d as f64 - 2.0));
    Witness::new(mat, WitnessFamily::BreuerHall, 1.0 / d as f64, None)
}

/// `|ψ⁻⟩ = (|01⟩ − |10⟩)/√2`.
pub fn psi_minus() -> Vec<crate::tensor::C64> {
    bell_state(BellIndex::new(2, 1, 1).expect("valid label"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::hermitian_eigenvalues;
    use crate::random::random_pure_state;

    #[test]
    fn two_qubit_witness_matches_singlet_form() {
        let w = two_qubit_pt_witness();
        let id = ComplexMatrix::identity(&[2, 2]).unwrap();
        let singlet = ComplexMatrix::projector(&psi_minus(), &[2, 2]).unwrap();
        let expected = &id.scale(0.5) - &singlet;
        assert!(w.matrix().max_abs_diff(&expected) < 1e-15);
        assert_eq!(w.eta(), 0.5);

        let rho = DensityOperator::pure(&psi_minus(), &[2, 2]).unwrap();
        assert!((w.expectation(&rho).unwrap() + 0.5).abs() < 1e-15);
        let mixed = DensityOperator::maximally_mixed(&[2, 2]).unwrap();
        assert!((w.expectation(&mixed).unwrap() - 0.25).abs() < 1e-15);

        let vals = hermitian_eigenvalues(w.matrix()).unwrap();
        for (v, want) in vals.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn decomposable_examples() {
        let q = DensityOperator::new(p00(2).unwrap()).unwrap();
        let w = decomposable_witness(&q).unwrap();
        let f = crate::bell::flip_operator(2).unwrap().scale(0.5);
        assert!(w.matrix().max_abs_diff(&f) < 1e-15);

        let mixed = DensityOperator::maximally_mixed(&[3, 3]).unwrap();
        assert!(matches!(
            decomposable_witness(&mixed),
            Err(Error::NotAWitness(_))
        ));

        let mut rng = rng_from_seed(5);
        let pure = random_pure_state(&mut rng, &[3, 3]).unwrap();
        let w = decomposable_witness(&pure).unwrap();
        assert!(min_eigenvalue(w.matrix()).unwrap() < 0.0);
    }

    #[test]
    fn choi_and_reduction() {
        let w = choi_witness();
        assert_eq!(w.family(), WitnessFamily::Choi);
        assert!((w.eta() - 2.0 / 3.0).abs() < 1e-15);
        let mixed = DensityOperator::maximally_mixed(&[3, 3]).unwrap();
        assert!((w.expectation(&mixed).unwrap() - 2.0 / 9.0).abs() < 1e-14);
        assert!(w.matrix().transpose().max_abs_diff(w.matrix()) < 1e-12);

        for d in 2..=4 {
            let uni = bell_diagonal_witness(&LambdaVec::uniform(d).unwrap()).unwrap();
            assert_eq!(uni.family(), WitnessFamily::Reduction);
            let red = reduction_witness(d).unwrap();
            assert!(uni.matrix().max_abs_diff(red.matrix()) < 1e-12);
        }
    }

    #[test]
    fn invalid_lambda_rejected() {
        assert!(LambdaVec::new(vec![0.5, 0.6]).is_err());
        assert!(LambdaVec::new(vec![1.2, -0.2]).is_err());
        assert!(LambdaVec::new(vec![1.0]).is_err());
        let bad = LambdaVec::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            bell_diagonal_witness(&bad),
            Err(Error::CyclicInequality { .. })
        ));
    }

    #[test]
    fn cyclic_check_examples() {
        let uni = cyclic_inequality_check(&LambdaVec::uniform(3).unwrap(), 200, 1).unwrap();
        assert!(uni.pass);
        assert!(uni.margin.abs() < 1e-12);

        let choi = cyclic_inequality_check(&LambdaVec::choi(), 10_000, 2).unwrap();
        assert!(choi.pass && choi.margin >= -1e-9);
        assert_eq!(choi.samples, 10_000 + 4);

        let bad =
            cyclic_inequality_check(&LambdaVec::new(vec![0.0, 1.0, 0.0]).unwrap(), 10, 3).unwrap();
        assert!(!bad.pass);
        assert!(bad.worst.is_infinite());
    }

    #[test]
    fn cyclic_lhs_skips_zero_over_zero() {
        // t = e₀ with λ = (0,1,0): the j = 0 term is 1/0, the rest are 0/0
        assert!(cyclic_lhs(&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]).is_infinite());
        assert_eq!(cyclic_lhs(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn breuer_hall_basics() {
        let w = breuer_hall_witness(4).unwrap();
        assert!(w.matrix().is_hermitian(1e-12));
        // tr 𝔽′ = d, so tr W_BH = (1/2)(16/4 − 1 − 1) = 1
        assert!((w.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(min_eigenvalue(w.matrix()).unwrap() < 0.0);
        assert!(matches!(
            breuer_hall_witness(3),
            Err(Error::OddDimension(3))
        ));
        assert!(matches!(
            breuer_hall_witness(2),
            Err(Error::InvalidDimension(2))
        ));
    }

    #[test]
    fn descriptor_json_shape() {
        let w = choi_witness();
        let v = serde_json::to_value(w.descriptor()).unwrap();
        assert_eq!(v["family"], "choi");
        assert_eq!(v["d"], 3);
        assert_eq!(v["lambda"].as_array().unwrap().len(), 3);
        assert_eq!(v["matrix"]["dims"], serde_json::json!([3, 3]));
    }
}
