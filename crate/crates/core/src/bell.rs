//! Generalized Bell states on `d ⊗ d` and the operators built from them.
//!
//! `|φ_st⟩ = d^{-1/2} Σ_j ω^{tj} |j⟩|j+s mod d⟩` with `ω = e^{2πi/d}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tensor::{partial_transpose, ComplexMatrix, Ket, C64, ONE, ZERO};

/// Label `(s, t)` of a generalized Bell state in dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BellIndex {
    d: usize,
    s: usize,
    t: usize,
}

impl BellIndex {
    pub fn new(d: usize, s: usize, t: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if s >= d || t >= d {
            return Err(Error::InvalidArgument(format!(
                "Bell label ({s},{t}) out of range for d = {d}"
            )));
        }
        Ok(Self { d, s, t })
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn t(&self) -> usize {
        self.t
    }

    /// All `d²` labels, `s` major.
    pub fn all(d: usize) -> impl Iterator<Item = BellIndex> {
        (0..d).flat_map(move |s| (0..d).map(move |t| BellIndex { d, s, t }))
    }
}

/// `ω^k` for `ω = e^{2πi/d}`.
pub fn omega_pow(d: usize, k: usize) -> C64 {
    let k = k % d;
    C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)
}

pub fn bell_state(idx: BellIndex) -> Ket {
    let d = idx.d;
    let amp = 1.0 / (d as f64).sqrt();
    let mut v = vec![ZERO; d * d];
    for j in 0..d {
        v[j * d + (j + idx.s) % d] = omega_pow(d, idx.t * j) * amp;
    }
    v
}

/// `|φ₀₀⟩ = Σ_j |jj⟩ / √d`.
pub fn phi_plus(d: usize) -> Ket {
    bell_state(BellIndex { d, s: 0, t: 0 })
}

pub fn bell_projector(idx: BellIndex) -> ComplexMatrix {
    ComplexMatrix::projector(&bell_state(idx), &[idx.d, idx.d]).expect("d >= 2")
}

/// `P₀₀`.
pub fn p00(d: usize) -> Result<ComplexMatrix> {
    Ok(bell_projector(BellIndex::new(d, 0, 0)?))
}

/// `Π_s = Σ_t P_st`: the projector onto `span{|j, j+s⟩}`.
pub fn pi_s(d: usize, s: usize) -> Result<ComplexMatrix> {
    BellIndex::new(d, s, 0)?;
    let mut m = ComplexMatrix::zeros(&[d, d])?;
    for t in 0..d {
        m += &bell_projector(BellIndex { d, s, t });
    }
    Ok(m)
}

/// `𝔽|i⟩|j⟩ = |j⟩|i⟩`.
pub fn flip_operator(d: usize) -> Result<ComplexMatrix> {
    let mut f = ComplexMatrix::zeros(&[d, d])?;
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = ONE;
        }
    }
    Ok(f)
}

/// `(S_d, A_d) = ((𝟙+𝔽)/2, (𝟙−𝔽)/2)`.
pub fn sym_antisym(d: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let id = ComplexMatrix::identity(&[d, d])?;
    let f = flip_operator(d)?;
    Ok(((&id + &f).scale(0.5), (&id - &f).scale(0.5)))
}

/// `𝔽` obtained as `d · P₀₀^Γ`.
pub fn flip_from_bell(d: usize) -> Result<ComplexMatrix> {
    Ok(partial_transpose(&p00(d)?, &[1])?.scale(d as f64))
}

/// `U = ⊕ [[0, 1], [−1, 0]]`: real, unitary and skew-symmetric.
pub fn skew_unitary(d: usize) -> Result<ComplexMatrix> {
    if !d.is_multiple_of(2) {
        return Err(Error::OddDimension(d));
    }
    let mut u = ComplexMatrix::zeros(&[d])?;
    for b in (0..d).step_by(2) {
        u[(b, b + 1)] = ONE;
        u[(b + 1, b)] = -ONE;
    }
    Ok(u)
}

/// `𝔽′ = (𝟙 ⊗ U) 𝔽 (𝟙 ⊗ U†)`.
pub fn flip_prime(d: usize) -> Result<ComplexMatrix> {
    let u = skew_unitary(d)?;
    let id = ComplexMatrix::identity(&[d])?;
    let lu = crate::tensor::kron(&id, &u);
    let f = flip_operator(d)?;
    lu.matmul(&f)?.matmul(&lu.adjoint())
}

/// Unitary DFT `H = d^{-1/2} Σ_{jk} ω^{jk} |j⟩⟨k|`.
pub fn dft(d: usize) -> Result<ComplexMatrix> {
    let amp = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(&[d], |j, k| omega_pow(d, j * k) * amp)
}

/// `U_CNOT = Σ_j |j⟩⟨j| ⊗ Σ_k |k+j⟩⟨k|`.
pub fn cnot(d: usize) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(&[d, d])?;
    for j in 0..d {
        for k in 0..d {
            m[(j * d + (k + j) % d, j * d + k)] = ONE;
        }
    }
    Ok(m)
}

/// Unitary whose column `s·d + t` is `|φ_st⟩`.
pub fn bell_basis_matrix(d: usize) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(&[d, d])?;
    for idx in BellIndex::all(d) {
        let col = idx.s * d + idx.t;
        for (row, v) in bell_state(idx).into_iter().enumerate() {
            m[(row, col)] = v;
        }
    }
    Ok(m)
}
