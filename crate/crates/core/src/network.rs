//! Network states: multipartite resources that, after Bell post-selection
//! and a single fixed readout, realize a witness measurement.
//!
//! A network lives on two layers of sites. Layer 2 is the half that gets
//! Bell-measured together with the input; layer 3 carries the output. For the
//! bipartite families the layers are `(A₂,B₂)` and `(A₃,B₃)`, each of
//! dimension `d`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{bell_projector, cnot, dft, flip_operator, flip_prime, p00, phi_plus, BellIndex};
use crate::density::DensityOperator;
use crate::eigen::{hermitian_eigen, hermitian_eigenvalues, min_eigenvalue};
use crate::error::{Error, Result};
use crate::tensor::{kron, partial_transpose, ComplexMatrix, Ket, C64, ZERO};
use crate::tolerance;
use crate::witness::{
    bell_diagonal_operator, breuer_hall_operator, decomposable_witness, psi_minus, LambdaVec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkFamily {
    TwoQubit,
    Decomposable,
    Flip,
    Pbd,
    Reduction,
    BreuerHall,
    General,
    Ghz,
    Graph,
}

impl fmt::Display for NetworkFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NetworkFamily::TwoQubit => "two-qubit",
            NetworkFamily::Decomposable => "decomposable",
            NetworkFamily::Flip => "flip",
            NetworkFamily::Pbd => "pbd",
            NetworkFamily::Reduction => "reduction",
            NetworkFamily::BreuerHall => "breuer-hall",
            NetworkFamily::General => "general",
            NetworkFamily::Ghz => "ghz",
            NetworkFamily::Graph => "graph",
        };
        f.write_str(s)
    }
}

/// A prepared network together with everything needed to read it out.
#[derive(Clone, Debug)]
pub struct NetworkState {
    state: DensityOperator,
    layer_dims: Vec<usize>,
    readout_circuit: ComplexMatrix,
    eta: f64,
    recon_constant: f64,
    target: ComplexMatrix,
    family: NetworkFamily,
}

impl NetworkState {
    /// `readout_circuit` is a unitary `V` on one layer with `V|0…0⟩` equal
    /// to the readout state. `target` is the operator `W` with
    /// `tr₃[N(η𝟙 − |r⟩⟨r|)] = recon_constant · Wᵀ`.
    pub fn new(
        state: DensityOperator,
        layer_dims: Vec<usize>,
        readout_circuit: ComplexMatrix,
        eta: f64,
        recon_constant: f64,
        target: ComplexMatrix,
        family: NetworkFamily,
    ) -> Result<Self> {
        let mut expected = layer_dims.clone();
        expected.extend_from_slice(&layer_dims);
        if state.dims() != expected.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "network dims {:?} do not match two layers of {:?}",
                state.dims(),
                layer_dims
            )));
        }
        if readout_circuit.dims() != layer_dims.as_slice() || target.dims() != layer_dims.as_slice()
        {
            return Err(Error::DimensionMismatch(
                "readout circuit and target must act on one layer".into(),
            ));
        }
        if recon_constant.is_nan() || recon_constant <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "reconstruction constant must be positive, got {recon_constant}"
            )));
        }
        Ok(Self {
            state,
            layer_dims,
            readout_circuit,
            eta,
            recon_constant,
            target,
            family,
        })
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    /// Side of one layer.
    pub fn layer_side(&self) -> usize {
        self.layer_dims.iter().product()
    }

    pub fn readout_circuit(&self) -> &ComplexMatrix {
        &self.readout_circuit
    }

    pub fn readout_state(&self) -> Ket {
        self.readout_circuit.column(0)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn recon_constant(&self) -> f64 {
        self.recon_constant
    }

    pub fn target(&self) -> &ComplexMatrix {
        &self.target
    }

    pub fn family(&self) -> NetworkFamily {
        self.family
    }

    /// Local dimension for the bipartite families.
    pub fn d(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn descriptor(&self) -> NetworkDescriptor {
        NetworkDescriptor {
            family: self.family,
            d: self.d(),
            eta: self.eta,
            recon_constant: self.recon_constant,
            state: self.state.as_matrix().clone(),
        }
    }
}

/// JSON form `{family, d, eta, recon_constant, state}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkDescriptor {
    pub family: NetworkFamily,
    pub d: usize,
    pub eta: f64,
    pub recon_constant: f64,
    pub state: ComplexMatrix,
}

/// `U_CNOT (H ⊗ 𝟙)`, which sends `|00⟩` to `|φ₀₀⟩`.
pub fn bell_readout_circuit(d: usize) -> Result<ComplexMatrix> {
    let h = dft(d)?;
    let id = ComplexMatrix::identity(&[d])?;
    cnot(d)?.matmul(&kron(&h, &id))
}

fn bipartite(
    state: ComplexMatrix,
    d: usize,
    eta: f64,
    recon_constant: f64,
    target: ComplexMatrix,
    family: NetworkFamily,
) -> Result<NetworkState> {
    NetworkState::new(
        DensityOperator::new(state)?,
        vec![d, d],
        bell_readout_circuit(d)?,
        eta,
        recon_constant,
        target,
        family,
    )
}

/// `¼|ψ⁻⟩⟨ψ⁻| ⊗ P_{φ⁺} + (1/12)(𝟙 − |ψ⁻⟩⟨ψ⁻|) ⊗ (𝟙 − P_{φ⁺})`, η = 1/2.
pub fn two_qubit_network() -> NetworkState {
    let singlet = ComplexMatrix::projector(&psi_minus(), &[2, 2]).expect("qubits");
    let id = ComplexMatrix::identity(&[2, 2]).expect("qubits");
    let phi = p00(2).expect("qubits");
    let n = &kron(&singlet, &phi).scale(0.25)
        + &kron(&(&id - &singlet), &(&id - &phi)).scale(1.0 / 12.0);
    let target = &id.scale(0.5) - &singlet;
    bipartite(n, 2, 0.5, 0.25, target, NetworkFamily::TwoQubit).expect("valid network")
}

/// One summand `a_j W(j)` of `Wᵀ` paired with the layer-3 operator `Π(j)`.
#[derive(Clone, Debug)]
pub struct DecompositionTerm {
    pub a: f64,
    /// Positive semidefinite, unit trace.
    pub w: ComplexMatrix,
    /// Positive semidefinite, unit trace.
    pub pi: ComplexMatrix,
}

impl DecompositionTerm {
    /// Accepts any PSD `w`; its trace is folded into `a`.
    pub fn new(a: f64, w: ComplexMatrix, pi: ComplexMatrix) -> Result<Self> {
        let (tw, w) = unit_trace_psd(w)?;
        let (tp, pi) = unit_trace_psd(pi)?;
        if (tp - 1.0).abs() > tolerance::STRUCTURAL {
            return Err(Error::InvalidTrace(tp));
        }
        Ok(Self { a: a * tw, w, pi })
    }
}

fn unit_trace_psd(m: ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
    let defect = m.hermiticity_defect();
    if defect > tolerance::STRUCTURAL {
        return Err(Error::NotHermitian(defect));
    }
    let lo = min_eigenvalue(&m)?;
    if lo < -tolerance::STRUCTURAL {
        return Err(Error::NotPositive(lo));
    }
    let tr = m.trace().re;
    if tr <= tolerance::STRUCTURAL {
        return Err(Error::InvalidTrace(tr));
    }
    Ok((tr, m.scale(1.0 / tr)))
}

/// Solution of `a_j = k c_j (η − ⟨φ₀₀|Π(j)|φ₀₀⟩)` with `Σ c_j = 1`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub terms: Vec<DecompositionTerm>,
    pub c: Vec<f64>,
    pub k: f64,
    pub eta: f64,
}

impl Decomposition {
    /// `N = Σ_j c_j W(j) ⊗ Π(j)`, reconstructing `target` with constant `1/k`.
    pub fn network(&self, target: &ComplexMatrix) -> Result<NetworkState> {
        let d = target.dims()[0];
        let mut n = ComplexMatrix::zeros(&[d, d, d, d])?;
        for (t, &c) in self.terms.iter().zip(&self.c) {
            n += &kron(&t.w, &t.pi).scale(c);
        }
        bipartite(
            n,
            d,
            self.eta,
            1.0 / self.k,
            target.clone(),
            NetworkFamily::General,
        )
    }
}

/// Splits `Wᵀ` into its negative and positive eigenspace parts and pairs them
/// with `pi_choices[0]` and `pi_choices[1]`. An empty positive part is dropped.
pub fn eigen_split_terms(
    w: &ComplexMatrix,
    pi_choices: &[ComplexMatrix],
) -> Result<Vec<DecompositionTerm>> {
    if pi_choices.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "eigen split needs two Π choices, got {}",
            pi_choices.len()
        )));
    }
    let wt = w.transpose();
    let eig = hermitian_eigen(&wt)?;
    let dims = wt.dims().to_vec();
    let mut neg = ComplexMatrix::zeros(&dims)?;
    let mut pos = ComplexMatrix::zeros(&dims)?;
    for (i, &v) in eig.values.iter().enumerate() {
        if v.abs() <= tolerance::STRUCTURAL {
            continue;
        }
        let col = eig.vectors.column(i);
        let p = ComplexMatrix::projector(&col, &dims)?.scale(v.abs());
        if v < 0.0 {
            neg += &p;
        } else {
            pos += &p;
        }
    }
    let mut terms = Vec::with_capacity(2);
    if neg.trace().re <= tolerance::STRUCTURAL {
        return Err(Error::NotAWitness(eig.values[0]));
    }
    terms.push(DecompositionTerm::new(-1.0, neg, pi_choices[0].clone())?);
    if pos.trace().re > tolerance::STRUCTURAL {
        terms.push(DecompositionTerm::new(1.0, pos, pi_choices[1].clone())?);
    }
    Ok(terms)
}

/// Default layer-3 choices `(P₀₀, (𝟙 − P₀₀)/(d² − 1))`.
pub fn default_pi_choices(d: usize) -> Result<Vec<ComplexMatrix>> {
    let phi = p00(d)?;
    let id = ComplexMatrix::identity(&[d, d])?;
    let rest = (&id - &phi).scale(1.0 / (d * d - 1) as f64);
    Ok(vec![phi, rest])
}

/// Solves for `(c, k)` given explicit terms. `target` must equal `Σ a_j W(j)ᵀ`
/// up to transpose, i.e. `Σ a_j W(j) = targetᵀ`.
pub fn solve_with_terms(
    target: &ComplexMatrix,
    eta: f64,
    terms: Vec<DecompositionTerm>,
) -> Result<Decomposition> {
    let d = target.dims()[0];
    if target.dims() != [d, d] {
        return Err(Error::DimensionMismatch(format!(
            "target must live on d⊗d, got {:?}",
            target.dims()
        )));
    }
    if !(eta >= 1.0 / d as f64 - 1e-15 && eta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "η = {eta} outside [1/d, 1)"
        )));
    }
    if terms.is_empty() {
        return Err(Error::DegenerateDecomposition);
    }
    let mut sum = ComplexMatrix::zeros(target.dims())?;
    for t in &terms {
        sum += &t.w.scale(t.a);
    }
    if sum.max_abs_diff(&target.transpose()) > tolerance::RECONSTRUCTION {
        return Err(Error::DegenerateDecomposition);
    }
    let phi = phi_plus(d);
    let mut ratios = Vec::with_capacity(terms.len());
    for (j, t) in terms.iter().enumerate() {
        let f = crate::tensor::overlap(&phi, &t.pi)?.re;
        let gap = eta - f;
        let ok = (t.a > 0.0 && gap > 0.0) || (t.a < 0.0 && gap < 0.0);
        if !ok {
            let reason = if t.a > 0.0 {
                format!("a = {} > 0 needs ⟨φ₀₀|Π|φ₀₀⟩ = {f} < η = {eta}", t.a)
            } else if t.a < 0.0 {
                format!("a = {} < 0 needs ⟨φ₀₀|Π|φ₀₀⟩ = {f} > η = {eta}", t.a)
            } else {
                "a = 0 carries no weight".to_string()
            };
            return Err(Error::InfeasibleTerm { index: j, reason });
        }
        ratios.push(t.a / gap);
    }
    let k: f64 = ratios.iter().sum();
    let c = ratios.iter().map(|r| r / k).collect();
    Ok(Decomposition { terms, c, k, eta })
}

/// Eigen-split decomposition of `Wᵀ` with the given two layer-3 operators
/// (negative part first).
pub fn solve_decomposition(
    w: &ComplexMatrix,
    eta: f64,
    pi_choices: &[ComplexMatrix],
) -> Result<Decomposition> {
    let terms = eigen_split_terms(w, pi_choices)?;
    solve_with_terms(w, eta, terms)
}

/// Constants `(λ, c₁, c₂, recon)` of the decomposable construction for `W = Q^Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecomposableConstants {
    pub lambda: f64,
    pub c1: f64,
    pub c2: f64,
    pub recon: f64,
}

pub fn decomposable_constants(d: usize, lambda: f64) -> DecomposableConstants {
    let df = d as f64;
    let den = df.powi(3) * lambda + df - 2.0;
    DecomposableConstants {
        lambda,
        c1: (df * df * lambda - 1.0) / den,
        c2: (df - 1.0) * (df * df * lambda + 1.0) / den,
        recon: 2.0 * (df - 1.0) / (df * den),
    }
}

/// Network for `W = Q^Γ`, η = 1/d. Layer 2 carries `(Q^Γ)ᵀ` so that the
/// readout reproduces `tr[ρ Q^Γ]` for complex `Q` as well.
pub fn decomposable_network(q: &DensityOperator) -> Result<NetworkState> {
    let w = decomposable_witness(q)?;
    let d = w.dims()[0];
    let vals = hermitian_eigenvalues(w.matrix())?;
    let lambda = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dd = (d * d) as f64;
    if (lambda * dd - 1.0).abs() <= tolerance::STRUCTURAL {
        return Err(Error::DegenerateDecomposition);
    }
    let k = decomposable_constants(d, lambda);
    let id = ComplexMatrix::identity(&[d, d])?;
    let wt = w.matrix().transpose();
    let minus = (&id.scale(lambda) - &wt).scale(1.0 / (lambda * dd - 1.0));
    let plus = (&id.scale(lambda) + &wt).scale(1.0 / (lambda * dd + 1.0));
    let phi = p00(d)?;
    let rest = (&id - &phi).scale(1.0 / (dd - 1.0));
    let n = &kron(&minus, &phi).scale(k.c1) + &kron(&plus, &rest).scale(k.c2);
    bipartite(
        n,
        d,
        1.0 / d as f64,
        k.recon,
        w.matrix().clone(),
        NetworkFamily::Decomposable,
    )
}

/// Network for `W = 𝔽/d`:
/// `(1/(d+2)) A_d/tr A_d ⊗ P₀₀ + ((d+1)/(d+2)) S_d/tr S_d ⊗ (𝟙 − P₀₀)/(d² − 1)`.
pub fn flip_network(d: usize) -> Result<NetworkState> {
    let df = d as f64;
    let id = ComplexMatrix::identity(&[d, d])?;
    let f = flip_operator(d)?;
    let anti = (&id - &f).scale(1.0 / (df * df - df));
    let sym = (&id + &f).scale(1.0 / (df * df + df));
    let phi = p00(d)?;
    let rest = (&id - &phi).scale(1.0 / (df * df - 1.0));
    let n = &kron(&anti, &phi).scale(1.0 / (df + 2.0))
        + &kron(&sym, &rest).scale((df + 1.0) / (df + 2.0));
    let recon = 2.0 / (df * (df + 2.0));
    bipartite(
        n,
        d,
        1.0 / df,
        recon,
        f.scale(1.0 / df),
        NetworkFamily::Flip,
    )
}

/// `Σ_s λ_s (1/d) Σ_t P_st ⊗ P_st`, η = λ₀, reconstruction constant λ₀/d.
pub fn pbd_network(lv: &LambdaVec) -> Result<NetworkState> {
    let d = lv.d();
    let l0 = lv.lambda0();
    if l0 == 0.0 {
        return Err(Error::ZeroThreshold);
    }
    let n = paired_bell_sum(d, |s| lv.as_slice()[s] / d as f64)?;
    let uniform = lv
        .as_slice()
        .iter()
        .all(|&x| (x - 1.0 / d as f64).abs() < 1e-15);
    let family = if uniform {
        NetworkFamily::Reduction
    } else {
        NetworkFamily::Pbd
    };
    bipartite(n, d, l0, l0 / d as f64, bell_diagonal_operator(lv)?, family)
}

/// Uniform PBD state `(1/d²) Σ_st P_st ⊗ P_st`, the Smolin state at `d = 2`.
pub fn reduction_network(d: usize) -> Result<NetworkState> {
    pbd_network(&LambdaVec::uniform(d)?)
}

/// `Σ_st weight(s) P_st ⊗ P_st`.
fn paired_bell_sum(d: usize, weight: impl Fn(usize) -> f64) -> Result<ComplexMatrix> {
    let mut n = ComplexMatrix::zeros(&[d, d, d, d])?;
    for idx in BellIndex::all(d) {
        let w = weight(idx.s());
        if w == 0.0 {
            continue;
        }
        let p = bell_projector(idx);
        n += &kron(&p, &p).scale(w);
    }
    Ok(n)
}

/// `(c₀, c₁, c₂)` with `K = 3d² − 3d + 2`: `(2d² − 2d, d + 1, (d − 1)²)/K`.
/// The numerators are integers summing to `K`, so the weights sum to one
/// before conversion.
pub fn bh_coefficients(d: usize) -> Result<[f64; 3]> {
    if !d.is_multiple_of(2) {
        return Err(Error::OddDimension(d));
    }
    if d < 4 {
        return Err(Error::InvalidDimension(d));
    }
    let d = d as u64;
    let k = 3 * d * d - 3 * d + 2;
    let num = [2 * d * d - 2 * d, d + 1, (d - 1) * (d - 1)];
    debug_assert_eq!(num.iter().sum::<u64>(), k);
    Ok(num.map(|x| x as f64 / k as f64))
}

/// Breuer–Hall network for even `d ≥ 4`, η = 1/d. The target operator is
/// `(1/d)(𝟙 − 𝔽′) − P₀₀`, reconstructed with constant `c₀/d²`.
pub fn bh_network(d: usize) -> Result<NetworkState> {
    let [c0, c1, c2] = bh_coefficients(d)?;
    let df = d as f64;
    let id = ComplexMatrix::identity(&[d, d])?;
    let fp = flip_prime(d)?;
    let sym = (&id + &fp).scale(1.0 / (df * df + df));
    let anti = (&id - &fp).scale(1.0 / (df * df - df));
    let phi = p00(d)?;
    let rest = (&id - &phi).scale(1.0 / (df * df - 1.0));
    let mut n = paired_bell_sum(d, |_| c0 / (df * df))?;
    n += &kron(&sym, &phi).scale(c1);
    n += &kron(&anti, &rest).scale(c2);
    bipartite(
        n,
        d,
        1.0 / df,
        c0 / (df * df),
        breuer_hall_operator(d)?,
        NetworkFamily::BreuerHall,
    )
}

/// `tr₃[N (η𝟙 − |r⟩⟨r|)]` where `|r⟩` is the network's readout state.
pub fn reconstruct_witness(net: &NetworkState, eta: f64) -> Result<ComplexMatrix> {
    let r = net.readout_state();
    let layer = net.layer_dims().to_vec();
    let side = net.layer_side();
    let mut y = ComplexMatrix::projector(&r, &layer)?.scale(-1.0);
    for i in 0..side {
        y[(i, i)] += C64::new(eta, 0.0);
    }
    let n = net.state().as_matrix();
    let mut out = ComplexMatrix::zeros(&layer)?;
    for a in 0..side {
        for b in 0..side {
            let mut acc = ZERO;
            for m in 0..side {
                for k in 0..side {
                    acc += n[(a * side + m, b * side + k)] * y[(k, m)];
                }
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Minimum eigenvalue of the partial transpose across one bipartition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PptCut {
    /// e.g. `A2A3:B2B3`.
    pub label: String,
    /// Factors on the side containing factor 0.
    pub side: Vec<usize>,
    pub min_eig: f64,
}

impl PptCut {
    pub fn is_ppt(&self) -> bool {
        self.min_eig >= tolerance::PPT_FLOOR
    }
}

fn site_names(n: usize) -> Vec<String> {
    if n == 4 {
        ["A2", "B2", "A3", "B3"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        (0..n).map(|i| format!("S{i}")).collect()
    }
}

/// Partial-transpose spectrum floor across every bipartition of the factors
/// (the 7 cuts of four sites). Eigensolves run in parallel.
pub fn ppt_report(state: &DensityOperator) -> Result<Vec<PptCut>> {
    let n = state.dims().len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "bipartitions need at least two factors".into(),
        ));
    }
    let names = site_names(n);
    let cuts: Vec<Vec<usize>> = (0..(1usize << (n - 1)))
        .map(|mask| (mask << 1) | 1)
        .filter(|&full| full != (1 << n) - 1)
        .map(|full| (0..n).filter(|i| full >> i & 1 == 1).collect())
        .collect();
    let mut out: Vec<PptCut> = cuts
        .into_par_iter()
        .map(|side| -> Result<PptCut> {
            let pt = partial_transpose(state.as_matrix(), &side)?;
            let min_eig = min_eigenvalue(&pt)?;
            let left: String = side.iter().map(|&i| names[i].as_str()).collect();
            let right: String = (0..n)
                .filter(|i| !side.contains(i))
                .map(|i| names[i].as_str())
                .collect();
            Ok(PptCut {
                label: format!("{left}:{right}"),
                side,
                min_eig,
            })
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.side.len().cmp(&b.side.len()).then(a.side.cmp(&b.side)));
    Ok(out)
}

/// Looks up one cut by label.
pub fn cut<'a>(report: &'a [PptCut], label: &str) -> Option<&'a PptCut> {
    report.iter().find(|c| c.label == label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::pi_s;
    use crate::random::{random_density, random_pure_state, random_simplex, rng_from_seed};
    use crate::witness::{breuer_hall_witness, choi_witness, two_qubit_pt_witness};

    fn recon_error(net: &NetworkState) -> f64 {
        let got = reconstruct_witness(net, net.eta()).unwrap();
        let want = net.target().transpose().scale(net.recon_constant());
        got.max_abs_diff(&want)
    }

    #[test]
    fn two_qubit_network_spectrum_and_reconstruction() {
        let net = two_qubit_network();
        assert!((net.state().as_matrix().trace().re - 1.0).abs() < 1e-15);
        let vals = hermitian_eigenvalues(net.state().as_matrix()).unwrap();
        let zeros = vals.iter().filter(|v| v.abs() < 1e-12).count();
        let twelfth = vals
            .iter()
            .filter(|v| (*v - 1.0 / 12.0).abs() < 1e-12)
            .count();
        let quarter = vals.iter().filter(|v| (*v - 0.25).abs() < 1e-12).count();
        assert_eq!((zeros, twelfth, quarter), (6, 9, 1));
        assert!(recon_error(&net) < 1e-12);
        let w = two_qubit_pt_witness();
        assert!(net.target().max_abs_diff(w.matrix()) < 1e-15);
    }

    #[test]
    fn general_solver_reproduces_two_qubit_network() {
        let w = two_qubit_pt_witness();
        let dec = solve_decomposition(w.matrix(), 0.5, &default_pi_choices(2).unwrap()).unwrap();
        assert!((dec.c[0] - 0.25).abs() < 1e-12);
        assert!((dec.c[1] - 0.75).abs() < 1e-12);
        assert!((dec.k - 4.0).abs() < 1e-12);
        let net = dec.network(w.matrix()).unwrap();
        let reference = two_qubit_network();
        assert!(
            net.state()
                .as_matrix()
                .max_abs_diff(reference.state().as_matrix())
                < 1e-12
        );
    }

    #[test]
    fn solver_rejects_sign_contradiction() {
        let w = two_qubit_pt_witness();
        let phi = p00(2).unwrap();
        let err = solve_decomposition(w.matrix(), 0.5, &[phi.clone(), phi]).unwrap_err();
        assert!(matches!(err, Error::InfeasibleTerm { index: 1, .. }));

        let singlet = ComplexMatrix::projector(&psi_minus(), &[2, 2]).unwrap();
        let id = ComplexMatrix::identity(&[2, 2]).unwrap();
        let terms = vec![
            DecompositionTerm::new(0.5, id.scale(0.25), p00(2).unwrap()).unwrap(),
            DecompositionTerm::new(0.5, singlet, p00(2).unwrap()).unwrap(),
        ];
        let target = &id.scale(0.125)
            + &ComplexMatrix::projector(&psi_minus(), &[2, 2])
                .unwrap()
                .scale(0.5);
        let err = solve_with_terms(&target, 0.5, terms).unwrap_err();
        assert!(matches!(err, Error::InfeasibleTerm { index: 0, .. }));
    }

    #[test]
    fn solver_on_random_decomposable_witness() {
        let mut rng = rng_from_seed(17);
        for d in 2..=3 {
            let q = random_pure_state(&mut rng, &[d, d]).unwrap();
            let w = decomposable_witness(&q).unwrap();
            let dec =
                solve_decomposition(w.matrix(), 1.0 / d as f64, &default_pi_choices(d).unwrap())
                    .unwrap();
            assert!(dec.c.iter().all(|&c| c >= 0.0));
            assert!((dec.c.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let net = dec.network(w.matrix()).unwrap();
            assert!(recon_error(&net) < 1e-9);
        }
    }

    #[test]
    fn decomposable_network_p00_matches_symmetric_form() {
        let q = DensityOperator::new(p00(3).unwrap()).unwrap();
        let net = decomposable_network(&q).unwrap();
        let flip = flip_network(3).unwrap();
        assert!(
            net.state()
                .as_matrix()
                .max_abs_diff(flip.state().as_matrix())
                < 1e-12
        );
        assert!((net.recon_constant() - flip.recon_constant()).abs() < 1e-15);
    }

    #[test]
    fn decomposable_network_random_q() {
        let mut rng = rng_from_seed(3);
        for d in 2..=4 {
            let q = random_density(&mut rng, &[d, d]).unwrap();
            match decomposable_network(&q) {
                Ok(net) => {
                    assert!((net.state().as_matrix().trace().re - 1.0).abs() < 1e-12);
                    assert!(recon_error(&net) < 1e-10);
                }
                // full-rank random Q is often PPT, hence no witness
                Err(Error::NotAWitness(_)) => {}
                Err(e) => panic!("{e}"),
            }
            let pure = random_pure_state(&mut rng, &[d, d]).unwrap();
            let net = decomposable_network(&pure).unwrap();
            assert!(recon_error(&net) < 1e-10);
        }
    }

    #[test]
    fn pbd_examples() {
        let smolin = reduction_network(2).unwrap();
        assert_eq!(smolin.family(), NetworkFamily::Reduction);
        assert!(recon_error(&smolin) < 1e-12);

        let choi = pbd_network(&LambdaVec::choi()).unwrap();
        let mut want = ComplexMatrix::zeros(&[3, 3, 3, 3]).unwrap();
        for t in 0..3 {
            let p0 = bell_projector(BellIndex::new(3, 0, t).unwrap());
            let p1 = bell_projector(BellIndex::new(3, 1, t).unwrap());
            want += &kron(&p0, &p0).scale(2.0 / 9.0);
            want += &kron(&p1, &p1).scale(1.0 / 9.0);
        }
        assert!(choi.state().as_matrix().max_abs_diff(&want) < 1e-14);
        assert!(choi.target().max_abs_diff(choi_witness().matrix()) < 1e-14);
        assert!((choi.recon_constant() - 2.0 / 9.0).abs() < 1e-15);

        let mut rng = rng_from_seed(8);
        let lv = LambdaVec::new(random_simplex(&mut rng, 3)).unwrap();
        let net = pbd_network(&lv).unwrap();
        assert!(min_eigenvalue(net.state().as_matrix()).unwrap() > -1e-12);
        assert!(recon_error(&net) < 1e-12);

        let zero = LambdaVec::new(vec![0.0, 0.5, 0.5]).unwrap();
        assert!(matches!(pbd_network(&zero), Err(Error::ZeroThreshold)));
    }

    #[test]
    fn uniform_pbd_reconstructs_reduction_witness() {
        for d in 2..=3 {
            let net = reduction_network(d).unwrap();
            let got = reconstruct_witness(&net, 1.0 / d as f64).unwrap();
            let id = ComplexMatrix::identity(&[d, d]).unwrap();
            let red = &id.scale(1.0 / d as f64) - &p00(d).unwrap();
            let want = red.transpose().scale(1.0 / (d * d) as f64);
            assert!(got.max_abs_diff(&want) < 1e-12);
        }
    }

    #[test]
    fn product_network_reconstructs_negative_operator() {
        let mut rng = rng_from_seed(4);
        let sigma = random_density(&mut rng, &[2, 2]).unwrap();
        let n = kron(sigma.as_matrix(), &p00(2).unwrap());
        let net = NetworkState::new(
            DensityOperator::new(n).unwrap(),
            vec![2, 2],
            bell_readout_circuit(2).unwrap(),
            0.9,
            1.0,
            sigma.as_matrix().clone(),
            NetworkFamily::General,
        )
        .unwrap();
        let got = reconstruct_witness(&net, 0.9).unwrap();
        let want = sigma.as_matrix().scale(-0.1);
        assert!(got.max_abs_diff(&want) < 1e-12);
        assert!(hermitian_eigenvalues(&got)
            .unwrap()
            .iter()
            .all(|&v| v <= 1e-12));
    }

    #[test]
    fn breuer_hall_network() {
        let c = bh_coefficients(4).unwrap();
        for (got, want) in c.iter().zip([24.0 / 38.0, 5.0 / 38.0, 9.0 / 38.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        let net = bh_network(4).unwrap();
        assert!(min_eigenvalue(net.state().as_matrix()).unwrap() > -1e-10);
        assert!((net.state().as_matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(recon_error(&net) < 1e-10);
        // the target is the main-text witness scaled by d − 2
        let w = breuer_hall_witness(4).unwrap();
        assert!(net.target().max_abs_diff(&w.matrix().scale(2.0)) < 1e-14);
        assert!(matches!(bh_network(5), Err(Error::OddDimension(5))));
    }

    #[test]
    fn ppt_reports() {
        let smolin = reduction_network(2).unwrap();
        let rep = ppt_report(smolin.state()).unwrap();
        assert_eq!(rep.len(), 7);
        // PPT across the three 2:2 cuts; a single qubit against the rest sees
        // 𝟙 + XXXX − YYYY + ZZZZ, whose spectrum reaches −2/16
        for c in &rep {
            if c.side.len() == 2 {
                assert!(c.min_eig >= -1e-10, "{c:?}");
            } else {
                assert!((c.min_eig + 0.125).abs() < 1e-12, "{c:?}");
            }
        }

        let red3 = reduction_network(3).unwrap();
        let rep = ppt_report(red3.state()).unwrap();
        assert!(cut(&rep, "A2A3:B2B3").unwrap().min_eig < -1e-6);

        let flip = flip_network(3).unwrap();
        let rep = ppt_report(flip.state()).unwrap();
        assert!(cut(&rep, "A2A3:B2B3").unwrap().is_ppt());

        let choi = pbd_network(&LambdaVec::choi()).unwrap();
        let rep = ppt_report(choi.state()).unwrap();
        assert!(rep.iter().any(|c| c.min_eig < -1e-6));

        let mut rng = rng_from_seed(1);
        let kets: Vec<_> = (0..4)
            .map(|_| crate::random::random_ket(&mut rng, 2))
            .collect();
        let prod = kets[1..]
            .iter()
            .fold(kets[0].clone(), |a, k| crate::tensor::kron_ket(&a, k));
        let rho = DensityOperator::pure(&prod, &[2, 2, 2, 2]).unwrap();
        assert!(ppt_report(&rho).unwrap().iter().all(|c| c.is_ppt()));
    }

    #[test]
    fn smolin_is_permutation_invariant() {
        let smolin = reduction_network(2).unwrap();
        let m = smolin.state().as_matrix();
        let mut perm = [0usize, 1, 2, 3];
        // Heap's algorithm over all 24 orderings
        let mut c = [0usize; 4];
        let mut count = 1;
        assert!(m.permute_factors(&perm).unwrap().max_abs_diff(m) < 1e-12);
        let mut i = 0;
        while i < 4 {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                assert!(
                    m.permute_factors(&perm).unwrap().max_abs_diff(m) < 1e-12,
                    "{perm:?}"
                );
                count += 1;
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn pi_choices_are_unit_trace() {
        for d in 2..=4 {
            for p in default_pi_choices(d).unwrap() {
                assert!((p.trace().re - 1.0).abs() < 1e-12);
            }
        }
        let _ = pi_s(2, 0);
    }

    #[test]
    fn descriptor_shape() {
        let v = serde_json::to_value(flip_network(2).unwrap().descriptor()).unwrap();
        assert_eq!(v["family"], "flip");
        assert_eq!(v["state"]["dims"], serde_json::json!([2, 2, 2, 2]));
    }
}
