//! Dense complex matrices with tensor-factor bookkeeping.
//!
//! Composite indices are row-major with the leftmost factor most
//! significant: for dims `[d₁, d₂, …, d_m]` the basis state `|i₁ i₂ … i_m⟩`
//! sits at `((i₁·d₂ + i₂)·d₃ + i₃)…`. Every partial trace, partial transpose
//! and embedding in this crate follows that convention.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A state vector. Its factor structure is supplied by the caller.
pub type Ket = Vec<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix acting on `⊗ₖ ℂ^{dims[k]}`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dims: Vec<usize>,
    side: usize,
    data: Vec<C64>,
}

fn validate_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidDims(dims.to_vec()));
    }
    Ok(dims.iter().product())
}

/// Mixed-radix digits of `index` (leftmost most significant).
pub(crate) fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

pub(crate) fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

impl ComplexMatrix {
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        let side = validate_dims(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            side,
            data: vec![ZERO; side * side],
        })
    }

    pub fn identity(dims: &[usize]) -> Result<Self> {
        let mut m = Self::zeros(dims)?;
        for i in 0..m.side {
            m.data[i * m.side + i] = ONE;
        }
        Ok(m)
    }

    pub fn from_vec(dims: &[usize], data: Vec<C64>) -> Result<Self> {
        let side = validate_dims(dims)?;
        if data.len() != side * side {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for side {}",
                data.len(),
                side
            )));
        }
        Ok(Self {
            dims: dims.to_vec(),
            side,
            data,
        })
    }

    pub fn from_fn(dims: &[usize], mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let side = validate_dims(dims)?;
        let mut data = Vec::with_capacity(side * side);
        for i in 0..side {
            for j in 0..side {
                data.push(f(i, j));
            }
        }
        Ok(Self {
            dims: dims.to_vec(),
            side,
            data,
        })
    }

    /// Real matrix from nested rows; convenient for small literals.
    pub fn from_real_rows(dims: &[usize], rows: &[&[f64]]) -> Result<Self> {
        let side = validate_dims(dims)?;
        if rows.len() != side || rows.iter().any(|r| r.len() != side) {
            return Err(Error::DimensionMismatch("row literal shape".into()));
        }
        Self::from_fn(dims, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diagonal(dims: &[usize], diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(dims)?;
        if diag.len() != m.side {
            return Err(Error::DimensionMismatch("diagonal length".into()));
        }
        for (i, &x) in diag.iter().enumerate() {
            m.data[i * m.side + i] = C64::new(x, 0.0);
        }
        Ok(m)
    }

    /// `|v⟩⟨v|`.
    pub fn projector(ket: &[C64], dims: &[usize]) -> Result<Self> {
        Self::outer(ket, ket, dims)
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64], dims: &[usize]) -> Result<Self> {
        let side = validate_dims(dims)?;
        if u.len() != side || v.len() != side {
            return Err(Error::DimensionMismatch(format!(
                "kets of length {}/{} for side {}",
                u.len(),
                v.len(),
                side
            )));
        }
        Self::from_fn(dims, |i, j| u[i] * v[j].conj())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    /// Same entries under a different factorization of the same side.
    pub fn with_dims(mut self, dims: &[usize]) -> Result<Self> {
        let side = validate_dims(dims)?;
        if side != self.side {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} do not factor side {}",
                dims, self.side
            )));
        }
        self.dims = dims.to_vec();
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.side;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Self {
            dims: self.dims.clone(),
            side: n,
            data,
        }
    }

    /// Full transpose in the computational basis.
    pub fn transpose(&self) -> Self {
        let n = self.side;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self {
            dims: self.dims.clone(),
            side: n,
            data,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            side: self.side,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.side).map(|i| self.data[i * self.side + i]).sum()
    }

    pub fn scale(&self, s: impl Into<C64>) -> Self {
        let s = s.into();
        Self {
            dims: self.dims.clone(),
            side: self.side,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_{ij} |a_ij − b_ij|`; sides must match.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.side, other.side, "side mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.side;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.side != rhs.side {
            return Err(Error::DimensionMismatch(format!(
                "matmul of sides {} and {}",
                self.side, rhs.side
            )));
        }
        let n = self.side;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (r, b) in row.iter_mut().zip(brow) {
                    *r += a * b;
                }
            }
        }
        Ok(Self {
            dims: self.dims.clone(),
            side: n,
            data,
        })
    }

    pub fn apply(&self, ket: &[C64]) -> Result<Ket> {
        if ket.len() != self.side {
            return Err(Error::DimensionMismatch(format!(
                "ket of length {} for side {}",
                ket.len(),
                self.side
            )));
        }
        let n = self.side;
        Ok((0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(ket)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if self.side != other.side {
            return Err(Error::DimensionMismatch("trace_product".into()));
        }
        let n = self.side;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc)
    }

    /// Column `j` as a ket.
    pub fn column(&self, j: usize) -> Ket {
        (0..self.side)
            .map(|i| self.data[i * self.side + j])
            .collect()
    }

    /// Reorders tensor factors: factor `k` of the result is factor `perm[k]`
    /// of `self`. Pure entry permutation.
    pub fn permute_factors(&self, perm: &[usize]) -> Result<Self> {
        let m = self.dims.len();
        let mut seen = vec![false; m];
        if perm.len() != m {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        for &p in perm {
            if p >= m || seen[p] {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let map = index_permutation(&self.dims, perm);
        let n = self.side;
        let mut data = vec![ZERO; n * n];
        for (i, &oi) in map.iter().enumerate() {
            for (j, &oj) in map.iter().enumerate() {
                data[i * n + j] = self.data[oi * n + oj];
            }
        }
        Ok(Self {
            dims: new_dims,
            side: n,
            data,
        })
    }
}

/// For each composite index of the permuted layout, the matching index in
/// the original layout.
fn index_permutation(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let m = dims.len();
    let side: usize = dims.iter().product();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut nd = vec![0; m];
    let mut od = vec![0; m];
    (0..side)
        .map(|i| {
            digits(i, &new_dims, &mut nd);
            for k in 0..m {
                od[perm[k]] = nd[k];
            }
            compose(&od, dims)
        })
        .collect()
}

/// Permutes the amplitudes of a ket the same way
/// [`ComplexMatrix::permute_factors`] permutes a matrix.
pub fn permute_ket(ket: &[C64], dims: &[usize], perm: &[usize]) -> Ket {
    index_permutation(dims, perm)
        .into_iter()
        .map(|o| ket[o])
        .collect()
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.side + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.side + j]
    }
}

macro_rules! elementwise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.side, rhs.side, "side mismatch");
                ComplexMatrix {
                    dims: self.dims.clone(),
                    side: self.side,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                (&self).$method(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.side, rhs.side, "side mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("side mismatch in matrix product")
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix dims={:?}", self.dims)?;
        for i in 0..self.side {
            let row: Vec<String> = (0..self.side)
                .map(|j| {
                    let z = self.data[i * self.side + j];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product; `dims = a.dims ++ b.dims`, left factor most significant.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.side, b.side);
    let n = na * nb;
    let mut data = vec![ZERO; n * n];
    for i1 in 0..na {
        for j1 in 0..na {
            let x = a.data[i1 * na + j1];
            if x == ZERO {
                continue;
            }
            for i2 in 0..nb {
                let row = (i1 * nb + i2) * n + j1 * nb;
                let brow = &b.data[i2 * nb..(i2 + 1) * nb];
                for (dst, y) in data[row..row + nb].iter_mut().zip(brow) {
                    *dst = x * y;
                }
            }
        }
    }
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    ComplexMatrix {
        dims,
        side: n,
        data,
    }
}

/// Kronecker product of a list of matrices (left to right).
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> Option<ComplexMatrix> {
    let mut it = factors.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, m| kron(&acc, m)))
}

pub fn kron_ket(a: &[C64], b: &[C64]) -> Ket {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn check_factor_set(set: &[usize], factors: usize) -> Result<Vec<bool>> {
    let mut mask = vec![false; factors];
    for &k in set {
        if k >= factors {
            return Err(Error::FactorOutOfRange { index: k, factors });
        }
        mask[k] = true;
    }
    Ok(mask)
}

/// Traces out every factor not in `keep`; kept factors retain their order.
pub fn partial_trace(m: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let mask = check_factor_set(keep, m.dims.len())?;
    let kept_dims: Vec<usize> = m
        .dims
        .iter()
        .zip(&mask)
        .filter_map(|(&d, &k)| k.then_some(d))
        .collect();
    let traced_dims: Vec<usize> = m
        .dims
        .iter()
        .zip(&mask)
        .filter_map(|(&d, &k)| (!k).then_some(d))
        .collect();
    let nk: usize = kept_dims.iter().product();
    let nt: usize = traced_dims.iter().product();

    // rows[t][k] = full index with traced part t and kept part k
    let mut rows = vec![0usize; nt * nk];
    let mut dig = vec![0; m.dims.len()];
    let mut kd = Vec::with_capacity(kept_dims.len());
    let mut td = Vec::with_capacity(traced_dims.len());
    for i in 0..m.side {
        digits(i, &m.dims, &mut dig);
        kd.clear();
        td.clear();
        for (f, &x) in dig.iter().enumerate() {
            if mask[f] {
                kd.push(x);
            } else {
                td.push(x);
            }
        }
        let k = compose(&kd, &kept_dims);
        let t = compose(&td, &traced_dims);
        rows[t * nk + k] = i;
    }

    let n = m.side;
    let mut data = vec![ZERO; nk * nk];
    for t in 0..nt {
        let idx = &rows[t * nk..(t + 1) * nk];
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                data[a * nk + b] += m.data[ia * n + ib];
            }
        }
    }
    ComplexMatrix::from_vec(&kept_dims, data)
}

/// Transposes the listed factors (computational basis) and leaves the rest.
pub fn partial_transpose(m: &ComplexMatrix, subset: &[usize]) -> Result<ComplexMatrix> {
    let mask = check_factor_set(subset, m.dims.len())?;
    let f = m.dims.len();
    let n = m.side;
    let digs: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut d = vec![0; f];
            digits(i, &m.dims, &mut d);
            d
        })
        .collect();
    let mut out = vec![ZERO; n * n];
    let mut di = vec![0; f];
    let mut dj = vec![0; f];
    for i in 0..n {
        for j in 0..n {
            for k in 0..f {
                if mask[k] {
                    di[k] = digs[j][k];
                    dj[k] = digs[i][k];
                } else {
                    di[k] = digs[i][k];
                    dj[k] = digs[j][k];
                }
            }
            out[compose(&di, &m.dims) * n + compose(&dj, &m.dims)] = m.data[i * n + j];
        }
    }
    ComplexMatrix::from_vec(&m.dims, out)
}

/// Places `op` on `targets` (in the given order) of a register with
/// `full_dims`, identity elsewhere. Entries are copied, never combined.
pub fn embed(op: &ComplexMatrix, targets: &[usize], full_dims: &[usize]) -> Result<ComplexMatrix> {
    let f = full_dims.len();
    let mask = check_factor_set(targets, f)?;
    if targets.len() != op.dims.len() || mask.iter().filter(|&&b| b).count() != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "targets {:?} for operator with dims {:?}",
            targets, op.dims
        )));
    }
    for (&t, &d) in targets.iter().zip(&op.dims) {
        if full_dims[t] != d {
            return Err(Error::DimensionMismatch(format!(
                "factor {t} has dimension {} but operator expects {d}",
                full_dims[t]
            )));
        }
    }
    let mut out = ComplexMatrix::zeros(full_dims)?;
    let n = out.side;
    let rest: Vec<usize> = (0..f).filter(|k| !mask[*k]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&k| full_dims[k]).collect();
    let mut dig = vec![0; f];
    let mut sub = vec![0; targets.len()];
    let mut rd = vec![0; rest.len()];
    // (op index, rest index) of every composite index
    let split: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            digits(i, full_dims, &mut dig);
            for (s, &t) in sub.iter_mut().zip(targets) {
                *s = dig[t];
            }
            for (r, &k) in rd.iter_mut().zip(&rest) {
                *r = dig[k];
            }
            (compose(&sub, &op.dims), compose(&rd, &rest_dims))
        })
        .collect();
    for (i, &(oi, ri)) in split.iter().enumerate() {
        for (j, &(oj, rj)) in split.iter().enumerate() {
            if ri == rj {
                out.data[i * n + j] = op.data[oi * op.side + oj];
            }
        }
    }
    Ok(out)
}

/// `⟨v|m|v⟩`.
pub fn overlap(v: &[C64], m: &ComplexMatrix) -> Result<C64> {
    let mv = m.apply(v)?;
    Ok(v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn ket_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Computational basis ket `|index⟩` in a space of dimension `side`.
pub fn basis_ket(side: usize, index: usize) -> Ket {
    let mut k = vec![ZERO; side];
    k[index] = ONE;
    k
}

/// Wire format: `{dims, re, im}` with row-major entries.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dims: Vec<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            dims: self.dims.clone(),
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        if j.re.len() != j.im.len() {
            return Err(serde::de::Error::custom("re/im length mismatch"));
        }
        let data =
            j.re.iter()
                .zip(&j.im)
                .map(|(&r, &i)| C64::new(r, i))
                .collect();
        ComplexMatrix::from_vec(&j.dims, data).map_err(serde::de::Error::custom)
    }
}
