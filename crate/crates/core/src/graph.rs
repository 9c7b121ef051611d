//! Graph states, their witnesses and network states.
//!
//! Vertices are labelled `1..=n`; vertex 1 is the most significant qubit.
//! Basis states are `|x⟩_G = ∏ Z_i^{x_i} |0…0⟩_G`, with `|0…0⟩_G` produced by
//! `H^{⊗n}` followed by a controlled-Z on every edge. All amplitudes are real.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::network::{NetworkFamily, NetworkState};
use crate::protocol::readout_probs;
use crate::tensor::{kron, ComplexMatrix, Ket, C64, ONE, ZERO};
use crate::witness::{Witness, WitnessFamily};

/// Largest vertex count for exact protocol runs (3n qubits in total).
pub const MAX_PROTOCOL_VERTICES: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        let edges = raw.edges.into_iter().map(|[i, j]| (i, j)).collect();
        Graph::new(raw.n, edges).map_err(serde::de::Error::custom)
    }
}

impl Graph {
    /// Edges `(i, j)` need `1 ≤ i < j ≤ n`, without duplicates.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 || n > 16 {
            return Err(Error::InvalidGraph(format!(
                "vertex count {n} outside 1..=16"
            )));
        }
        let mut seen = BTreeSet::new();
        for &(i, j) in &edges {
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            if !(1 <= i && i < j && j <= n) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i},{j}) needs 1 <= i < j <= {n}"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i},{j})")));
            }
        }
        Ok(Self { n, edges })
    }

    /// Linear four-vertex cluster `1–2–3–4`.
    pub fn cl4() -> Self {
        Self::new(4, vec![(1, 2), (2, 3), (3, 4)]).expect("valid graph")
    }

    /// Star on three vertices centred at 1, locally equivalent to GHZ.
    pub fn star3() -> Self {
        Self::new(3, vec![(1, 2), (1, 3)]).expect("valid graph")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn side(&self) -> usize {
        1 << self.n
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    fn bit(&self, index: usize, vertex: usize) -> usize {
        (index >> (self.n - vertex)) & 1
    }

    fn dims(&self) -> Vec<usize> {
        vec![2; self.n]
    }
}

/// Bit vector `x ∈ {0,1}ⁿ`, written most significant vertex first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphLabel(Vec<u8>);

impl GraphLabel {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidLabelSet(format!("bad label {bits:?}")));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    fn as_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl FromStr for GraphLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidLabelSet(format!(
                    "label {s:?} is not a bitstring"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        GraphLabel::new(bits)
    }
}

impl fmt::Display for GraphLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl Serialize for GraphLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GraphLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The twelve labels of the four-vertex cluster witness.
pub fn cl4_label_set() -> Vec<GraphLabel> {
    [
        "0000", "0001", "0010", "0011", "0100", "0101", "0110", "0111", "1000", "1010", "1100",
        "1110",
    ]
    .iter()
    .map(|s| s.parse().expect("bitstring"))
    .collect()
}

fn check_vertex(g: &Graph, i: usize) -> Result<()> {
    if i == 0 || i > g.n {
        return Err(Error::InvalidArgument(format!(
            "vertex {i} outside 1..={}",
            g.n
        )));
    }
    Ok(())
}

/// `g_i = X_i ∏_{j ∈ N(i)} Z_j`.
pub fn generator(g: &Graph, i: usize) -> Result<ComplexMatrix> {
    check_vertex(g, i)?;
    let nb = g.neighbors(i);
    let side = g.side();
    let flip = 1 << (g.n - i);
    let mut m = ComplexMatrix::zeros(&g.dims())?;
    for col in 0..side {
        let parity: usize = nb.iter().map(|&j| g.bit(col, j)).sum();
        let sign = if parity.is_multiple_of(2) { ONE } else { -ONE };
        m[(col ^ flip, col)] = sign;
    }
    Ok(m)
}

/// `γ_i^(k) = (𝟙 + (−1)^k g_i)/2`.
pub fn gamma(g: &Graph, i: usize, k: u8) -> Result<ComplexMatrix> {
    let gi = generator(g, i)?;
    let id = ComplexMatrix::identity(&g.dims())?;
    let signed = if k == 0 { gi } else { gi.scale(-1.0) };
    Ok((&id + &signed).scale(0.5))
}

/// `∏_e CZ_e · H^{⊗n} |0…0⟩`.
pub fn graph_state_circuit(g: &Graph) -> Ket {
    graph_basis_state_unchecked(g, 0)
}

fn graph_basis_state_unchecked(g: &Graph, x: usize) -> Ket {
    let side = g.side();
    let amp = 1.0 / (side as f64).sqrt();
    (0..side)
        .map(|b| {
            let cz: usize = g
                .edges
                .iter()
                .map(|&(i, j)| g.bit(b, i) & g.bit(b, j))
                .sum();
            let z = (x & b).count_ones() as usize;
            if (cz + z).is_multiple_of(2) {
                C64::new(amp, 0.0)
            } else {
                C64::new(-amp, 0.0)
            }
        })
        .collect()
}

/// `|x⟩_G = ∏ Z_i^{x_i} |0…0⟩_G`.
pub fn graph_basis_state(g: &Graph, x: &GraphLabel) -> Result<Ket> {
    if x.len() != g.n {
        return Err(Error::InvalidLabelSet(format!(
            "label {x} has length {}, graph has {} vertices",
            x.len(),
            g.n
        )));
    }
    Ok(graph_basis_state_unchecked(g, x.as_index()))
}

/// `V = ∏_e CZ_e · H^{⊗n}`; column `x` is `|x⟩_G`.
pub fn graph_circuit_unitary(g: &Graph) -> Result<ComplexMatrix> {
    let side = g.side();
    let mut v = ComplexMatrix::zeros(&g.dims())?;
    for x in 0..side {
        for (row, a) in graph_basis_state_unchecked(g, x).into_iter().enumerate() {
            v[(row, x)] = a;
        }
    }
    Ok(v)
}

/// Probability of reading `0…0` after undoing the graph circuit on `σ`.
pub fn graph_measurement_circuit(g: &Graph, sigma: &DensityOperator) -> Result<f64> {
    if sigma.dims() != g.dims().as_slice() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {:?} do not match {} qubits",
            sigma.dims(),
            g.n
        )));
    }
    Ok(readout_probs(sigma.as_matrix(), &graph_circuit_unitary(g)?)?[0])
}

fn validate_label_set(g: &Graph, s: &[GraphLabel]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidLabelSet("label set is empty".into()));
    }
    let mut seen = BTreeSet::new();
    for x in s {
        if x.len() != g.n {
            return Err(Error::InvalidLabelSet(format!(
                "label {x} has length {}, graph has {} vertices",
                x.len(),
                g.n
            )));
        }
        if !seen.insert(x.clone()) {
            return Err(Error::InvalidLabelSet(format!("duplicate label {x}")));
        }
    }
    if !s.iter().any(GraphLabel::is_zero) {
        return Err(Error::InvalidLabelSet("label set must contain 0…0".into()));
    }
    Ok(())
}

fn projector_sum(g: &Graph, s: &[GraphLabel]) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(&g.dims())?;
    for x in s {
        m += &ComplexMatrix::projector(&graph_basis_state(g, x)?, &g.dims())?;
    }
    Ok(m)
}

/// `W_G = ½ Σ_{x∈S} |x⟩⟨x|_G − |0⟩⟨0|_G`, threshold ½.
pub fn graph_witness(g: &Graph, s: &[GraphLabel]) -> Result<Witness> {
    validate_label_set(g, s)?;
    let zero = ComplexMatrix::projector(&graph_state_circuit(g), &g.dims())?;
    let mat = &projector_sum(g, s)?.scale(0.5) - &zero;
    Witness::new(mat, WitnessFamily::Graph, 0.5, None)
}

/// `N^(G) = (1/|S|) Σ_{x∈S} |x⟩⟨x|_G ⊗ |x⟩⟨x|_G`, reconstruction constant `1/|S|`.
pub fn graph_network(g: &Graph, s: &[GraphLabel]) -> Result<NetworkState> {
    if g.n > MAX_PROTOCOL_VERTICES {
        return Err(Error::InvalidGraph(format!(
            "exact protocol runs are limited to {MAX_PROTOCOL_VERTICES} vertices"
        )));
    }
    let w = graph_witness(g, s)?;
    let dims = g.dims();
    let weight = 1.0 / s.len() as f64;
    let mut n = ComplexMatrix::zeros(&[dims.clone(), dims.clone()].concat())?;
    for x in s {
        let p = ComplexMatrix::projector(&graph_basis_state(g, x)?, &dims)?;
        n += &kron(&p, &p).scale(weight);
    }
    NetworkState::new(
        DensityOperator::new(n)?,
        dims,
        graph_circuit_unitary(g)?,
        0.5,
        weight,
        w.matrix().clone(),
        NetworkFamily::Graph,
    )
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz_state() -> Ket {
    let mut v = vec![ZERO; 8];
    let a = C64::new(0.5f64.sqrt(), 0.0);
    v[0] = a;
    v[7] = a;
    v
}

/// `Z^a ⊗ X^b ⊗ X^c |GHZ⟩`.
pub fn ghz_family(a: u8, b: u8, c: u8) -> Result<Ket> {
    if a > 1 || b > 1 || c > 1 {
        return Err(Error::InvalidArgument(format!(
            "GHZ label ({a},{b},{c}) not binary"
        )));
    }
    let psi = ghz_state();
    let mut out = vec![ZERO; 8];
    for (i, amp) in psi.iter().enumerate() {
        if *amp == ZERO {
            continue;
        }
        let first = (i >> 2) & 1;
        let sign = if a == 1 && first == 1 { -1.0 } else { 1.0 };
        let j = i ^ ((b as usize) << 1) ^ (c as usize);
        out[j] = amp * sign;
    }
    Ok(out)
}

/// Unitary whose column `4a + 2b + c` is `|ψ_abc⟩`.
pub fn ghz_basis_unitary() -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(&[2, 2, 2]).expect("qubits");
    for idx in 0..8u8 {
        let ket = ghz_family(idx >> 2 & 1, idx >> 1 & 1, idx & 1).expect("binary");
        for (row, a) in ket.into_iter().enumerate() {
            v[(row, idx as usize)] = a;
        }
    }
    v
}

/// `W = ½𝟙 − |GHZ⟩⟨GHZ|`, threshold ½.
pub fn ghz_witness() -> Witness {
    let id = ComplexMatrix::identity(&[2, 2, 2]).expect("qubits");
    let p = ComplexMatrix::projector(&ghz_state(), &[2, 2, 2]).expect("qubits");
    Witness::new(&id.scale(0.5) - &p, WitnessFamily::Ghz, 0.5, None).expect("valid witness")
}

/// `N = (1/8) Σ_abc ψ_abc ⊗ ψ_abc` on six qubits, reconstruction constant 1/8.
pub fn ghz_network() -> NetworkState {
    let dims = vec![2, 2, 2];
    let mut n = ComplexMatrix::zeros(&[2; 6]).expect("qubits");
    let v = ghz_basis_unitary();
    for idx in 0..8 {
        let p = ComplexMatrix::projector(&v.column(idx), &dims).expect("qubits");
        n += &kron(&p, &p).scale(0.125);
    }
    NetworkState::new(
        DensityOperator::new(n).expect("valid state"),
        dims,
        v,
        0.5,
        0.125,
        ghz_witness().matrix().clone(),
        NetworkFamily::Ghz,
    )
    .expect("valid network")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::reconstruct_witness;
    use crate::protocol::detect_exact;
    use crate::random::{random_density, rng_from_seed};
    use crate::tensor::inner;

    fn all_labels(n: usize) -> Vec<GraphLabel> {
        (0..1usize << n)
            .map(|x| GraphLabel::new((0..n).rev().map(|k| (x >> k & 1) as u8).collect()).unwrap())
            .collect()
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(3, vec![(1, 1)]).is_err());
        assert!(Graph::new(3, vec![(2, 1)]).is_err());
        assert!(Graph::new(3, vec![(1, 4)]).is_err());
        assert!(Graph::new(3, vec![(1, 2), (1, 2)]).is_err());
        let g: Graph = serde_json::from_str(r#"{"n":4,"edges":[[1,2],[2,3],[3,4]]}"#).unwrap();
        assert_eq!(g, Graph::cl4());
    }

    #[test]
    fn single_vertex_and_path_generators() {
        let g1 = Graph::new(1, vec![]).unwrap();
        let x = ComplexMatrix::from_real_rows(&[2], &[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(generator(&g1, 1).unwrap(), x);
        let z = ComplexMatrix::diagonal(&[2], &[1.0, -1.0]).unwrap();
        let path = Graph::new(2, vec![(1, 2)]).unwrap();
        let a = generator(&path, 1).unwrap();
        let b = generator(&path, 2).unwrap();
        assert!(a.max_abs_diff(&kron(&x, &z)) < 1e-15);
        assert!(b.max_abs_diff(&kron(&z, &x)) < 1e-15);
        let comm = &a.matmul(&b).unwrap() - &b.matmul(&a).unwrap();
        assert_eq!(comm.max_abs(), 0.0);
        assert!(generator(&path, 3).is_err());
        assert!(generator(&path, 0).is_err());
    }

    #[test]
    fn cl4_generators_square_to_identity_and_commute() {
        let g = Graph::cl4();
        let id = ComplexMatrix::identity(&[2; 4]).unwrap();
        let gens: Vec<_> = (1..=4).map(|i| generator(&g, i).unwrap()).collect();
        for a in &gens {
            assert!(a.matmul(a).unwrap().max_abs_diff(&id) < 1e-15);
            assert!(a.is_hermitian(0.0));
            for b in &gens {
                let comm = &a.matmul(b).unwrap() - &b.matmul(a).unwrap();
                assert_eq!(comm.max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn stabilizer_and_gamma_relations() {
        let graphs = [
            Graph::new(1, vec![]).unwrap(),
            Graph::new(2, vec![(1, 2)]).unwrap(),
            Graph::star3(),
            Graph::new(3, vec![(1, 2), (2, 3), (1, 3)]).unwrap(),
            Graph::cl4(),
            Graph::new(4, vec![(1, 2), (1, 3), (1, 4), (2, 4)]).unwrap(),
        ];
        for g in &graphs {
            for x in all_labels(g.n()) {
                let ket = graph_basis_state(g, &x).unwrap();
                for i in 1..=g.n() {
                    let xi = x.bits()[i - 1];
                    let gv = generator(g, i).unwrap().apply(&ket).unwrap();
                    let sign = if xi == 0 { 1.0 } else { -1.0 };
                    for (u, v) in gv.iter().zip(&ket) {
                        assert!((u - v * sign).norm() < 1e-12);
                    }
                    for k in 0..2u8 {
                        let gk = gamma(g, i, k).unwrap().apply(&ket).unwrap();
                        let keep = if xi == k { 1.0 } else { 0.0 };
                        for (u, v) in gk.iter().zip(&ket) {
                            assert!((u - v * keep).norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basis_states_match_gamma_products() {
        let g = Graph::cl4();
        for x in all_labels(4) {
            let mut p = ComplexMatrix::identity(&[2; 4]).unwrap();
            for i in 1..=4 {
                p = p.matmul(&gamma(&g, i, x.bits()[i - 1]).unwrap()).unwrap();
            }
            let ket = graph_basis_state(&g, &x).unwrap();
            let want = ComplexMatrix::projector(&ket, &[2; 4]).unwrap();
            assert!(p.max_abs_diff(&want) < 1e-12);
        }
    }

    #[test]
    fn cl4_basis_is_orthonormal() {
        let g = Graph::cl4();
        let kets: Vec<_> = all_labels(4)
            .iter()
            .map(|x| graph_basis_state(&g, x).unwrap())
            .collect();
        for (a, u) in kets.iter().enumerate() {
            for (b, v) in kets.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((inner(u, v).re - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn circuit_examples() {
        let empty = Graph::new(2, vec![]).unwrap();
        for a in graph_state_circuit(&empty) {
            assert!((a.re - 0.5).abs() < 1e-15);
        }
        let edge = Graph::new(2, vec![(1, 2)]).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, w) in graph_state_circuit(&edge).iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15);
        }
        let plus =
            graph_basis_state(&Graph::new(1, vec![]).unwrap(), &GraphLabel::zeros(1)).unwrap();
        assert!(
            (plus[0].re - 0.5f64.sqrt()).abs() < 1e-15
                && (plus[1].re - 0.5f64.sqrt()).abs() < 1e-15
        );
    }

    #[test]
    fn measurement_circuit_examples() {
        let g = Graph::cl4();
        let cluster = DensityOperator::pure(&graph_state_circuit(&g), &[2; 4]).unwrap();
        assert!((graph_measurement_circuit(&g, &cluster).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityOperator::maximally_mixed(&[2; 4]).unwrap();
        assert!((graph_measurement_circuit(&g, &mixed).unwrap() - 1.0 / 16.0).abs() < 1e-12);
        let x: GraphLabel = "0110".parse().unwrap();
        let other = DensityOperator::pure(&graph_basis_state(&g, &x).unwrap(), &[2; 4]).unwrap();
        assert!(graph_measurement_circuit(&g, &other).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ghz_family_is_orthonormal() {
        let v = ghz_basis_unitary();
        let vv = v.adjoint().matmul(&v).unwrap();
        assert!(vv.max_abs_diff(&ComplexMatrix::identity(&[2, 2, 2]).unwrap()) < 1e-15);
        let p000 = ghz_family(0, 0, 0).unwrap();
        let p100 = ghz_family(1, 0, 0).unwrap();
        assert!(inner(&p000, &p100).norm() < 1e-15);
        assert_eq!(p000, ghz_state());
        assert!(ghz_family(2, 0, 0).is_err());
    }

    #[test]
    fn ghz_identity() {
        let net = ghz_network();
        let w = ghz_witness();
        let mut rng = rng_from_seed(31);
        for _ in 0..20 {
            let rho = random_density(&mut rng, &[2, 2, 2]).unwrap();
            let r = detect_exact(&rho, &net, &w).unwrap();
            let want = 1.0 / 16.0 - r.witness_expectation / 8.0;
            assert!((r.bell_signal - want).abs() < 1e-12);
        }
        let ghz = DensityOperator::pure(&ghz_state(), &[2, 2, 2]).unwrap();
        let r = detect_exact(&ghz, &net, &w).unwrap();
        assert!((r.bell_signal - 0.125).abs() < 1e-14);
        assert_eq!(r.verdict, crate::protocol::Verdict::Detected);
        let recon = reconstruct_witness(&net, 0.5).unwrap();
        assert!(recon.max_abs_diff(&w.matrix().transpose().scale(0.125)) < 1e-14);
    }

    #[test]
    fn cl4_witness_values() {
        let g = Graph::cl4();
        let s = cl4_label_set();
        let w = graph_witness(&g, &s).unwrap();
        let cluster = DensityOperator::pure(&graph_state_circuit(&g), &[2; 4]).unwrap();
        assert!((w.expectation(&cluster).unwrap() + 0.5).abs() < 1e-12);
        let mixed = DensityOperator::maximally_mixed(&[2; 4]).unwrap();
        assert!((w.expectation(&mixed).unwrap() - 5.0 / 16.0).abs() < 1e-12);
        let net = graph_network(&g, &s).unwrap();
        let recon = reconstruct_witness(&net, 0.5).unwrap();
        assert!(recon.max_abs_diff(&w.matrix().transpose().scale(1.0 / 12.0)) < 1e-13);
    }

    #[test]
    fn label_set_validation() {
        let g = Graph::cl4();
        assert!(graph_witness(&g, &[]).is_err());
        let no_zero: Vec<GraphLabel> = vec!["0001".parse().unwrap()];
        assert!(graph_witness(&g, &no_zero).is_err());
        let dup: Vec<GraphLabel> = vec!["0000".parse().unwrap(), "0000".parse().unwrap()];
        assert!(graph_witness(&g, &dup).is_err());
        assert!("01a".parse::<GraphLabel>().is_err());
        let big = Graph::new(5, vec![(1, 2)]).unwrap();
        assert!(graph_network(&big, &[GraphLabel::zeros(5)]).is_err());
    }
}
