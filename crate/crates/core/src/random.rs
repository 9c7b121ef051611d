//! Seeded sampling of kets, states and Hermitian matrices.
//!
//! Pure states come from normalized complex-normal vectors (unitarily
//! invariant measure); mixed states from the Hilbert–Schmidt (Ginibre)
//! ensemble `G G† / tr(G G†)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::density::DensityOperator;
use crate::error::Result;
use crate::tensor::{ComplexMatrix, Ket, C64};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `stream` of the generator seeded with `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn normal_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_ket<R: Rng + ?Sized>(rng: &mut R, side: usize) -> Ket {
    let mut v: Ket = (0..side).map(|_| normal_c64(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
    v
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<DensityOperator> {
    let side = dims.iter().product();
    DensityOperator::pure(&random_ket(rng, side), dims)
}

/// Hilbert–Schmidt random mixed state (full rank with probability one).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<DensityOperator> {
    let g = ComplexMatrix::from_fn(dims, |_, _| normal_c64(rng))?;
    DensityOperator::normalized(g.matmul(&g.adjoint())?)
}

/// Random Hermitian matrix with complex-normal entries (GUE-like scaling).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Result<ComplexMatrix> {
    let g = ComplexMatrix::from_fn(dims, |_, _| normal_c64(rng))?;
    Ok((&g + &g.adjoint()).scale(0.5))
}

/// Uniform random point on the probability simplex with `n` vertices.
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
        .collect();
    let s: f64 = x.iter().sum();
    for v in x.iter_mut() {
        *v /= s;
    }
    x
}
