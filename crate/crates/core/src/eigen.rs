//! Hermitian eigensolver.
//!
//! Householder reduction of the Hermitian matrix to a complex tridiagonal
//! form, a diagonal phase change that makes the off-diagonal real, then the
//! implicit QL iteration with Wilkinson shifts on the real symmetric
//! tridiagonal matrix. Eigenvalues come back ascending; eigenvectors are
//! the columns of `vectors`.

use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, C64, ZERO};
use crate::tolerance;

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let (values, vectors) = solve(m, true)?;
    Ok(HermitianEigen {
        values,
        vectors: vectors.expect("vectors requested"),
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(solve(m, false)?.0)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

fn solve(m: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let defect = m.hermiticity_defect();
    if defect > tolerance::EIGEN_HERMITIAN {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.side();
    // symmetrize so that round-off in the input does not leak into the reduction
    let mut a: Vec<C64> = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }

    let mut q: Vec<C64> = if want_vectors {
        let mut q = vec![ZERO; n * n];
        for i in 0..n {
            q[i * n + i] = C64::new(1.0, 0.0);
        }
        q
    } else {
        Vec::new()
    };

    tridiagonalize(&mut a, n, if want_vectors { Some(&mut q) } else { None });

    let mut diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut off = vec![0.0; n];
    let mut phase = vec![C64::new(1.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        let e = a[(k + 1) * n + k];
        let r = e.norm();
        off[k] = r;
        phase[k + 1] = if r > 0.0 {
            phase[k] * (e / r)
        } else {
            phase[k]
        };
    }

    let mut z = if want_vectors {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    } else {
        Vec::new()
    };
    tql2(
        &mut diag,
        &mut off,
        if want_vectors { Some(&mut z) } else { None },
        n,
    )?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();

    if !want_vectors {
        return Ok((values, None));
    }
    // V = Q · diag(phase) · Z
    for i in 0..n {
        for k in 0..n {
            q[i * n + k] *= phase[k];
        }
    }
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        let qrow = &q[i * n..(i + 1) * n];
        let vrow = &mut v[i * n..(i + 1) * n];
        for (k, qik) in qrow.iter().enumerate() {
            if *qik == ZERO {
                continue;
            }
            let zrow = &z[k * n..(k + 1) * n];
            for (dst, &zk) in vrow.iter_mut().zip(zrow) {
                *dst += qik * zk;
            }
        }
    }
    let sorted = ComplexMatrix::from_fn(m.dims(), |i, j| v[i * n + order[j]])?;
    Ok((values, Some(sorted)))
}

/// In-place Householder reduction; afterwards `a` is Hermitian tridiagonal
/// and, when given, `q` holds the accumulated unitary with `A = Q T Q†`.
fn tridiagonalize(a: &mut [C64], n: usize, mut q: Option<&mut Vec<C64>>) {
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n - 2 {
        let lo = k + 1;
        let len = n - lo;
        let xnorm = (lo..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[lo * n + k];
        let unit = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -unit * xnorm;
        for i in 0..len {
            v[i] = a[(lo + i) * n + k];
        }
        v[0] -= alpha;
        let vnorm = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v[..len].iter_mut() {
            *z /= vnorm;
        }

        // p = A22 v
        for i in 0..len {
            let row = &a[(lo + i) * n + lo..(lo + i) * n + n];
            p[i] = row.iter().zip(&v[..len]).map(|(x, y)| x * y).sum();
        }
        let kappa: C64 = v[..len]
            .iter()
            .zip(&p[..len])
            .map(|(x, y)| x.conj() * y)
            .sum();
        for i in 0..len {
            p[i] -= v[i] * kappa.re;
        }
        // A22 -= 2 v p† + 2 p v†
        for i in 0..len {
            let vi2 = v[i] * 2.0;
            let pi2 = p[i] * 2.0;
            let row = &mut a[(lo + i) * n + lo..(lo + i) * n + n];
            for (j, dst) in row.iter_mut().enumerate() {
                *dst -= vi2 * p[j].conj() + pi2 * v[j].conj();
            }
        }
        a[lo * n + k] = alpha;
        a[k * n + lo] = alpha.conj();
        for i in lo + 1..n {
            a[i * n + k] = ZERO;
            a[k * n + i] = ZERO;
        }

        if let Some(q) = q.as_deref_mut() {
            // Q[:, lo..] -= 2 (Q v) v†
            for r in 0..n {
                let row = &mut q[r * n + lo..r * n + n];
                let qv: C64 = row.iter().zip(&v[..len]).map(|(x, y)| x * y).sum::<C64>() * 2.0;
                for (dst, vj) in row.iter_mut().zip(&v[..len]) {
                    *dst -= qv * vj.conj();
                }
            }
        }
    }
}

/// Implicit QL on the symmetric tridiagonal matrix with diagonal `d` and
/// sub-diagonal `e` (`e[i]` couples rows `i` and `i+1`).
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<f64>>, n: usize) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::InvalidArgument(
                        "eigensolver failed to converge".into(),
                    ));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk = &mut z[k * n..(k + 1) * n];
                            h = zk[i + 1];
                            zk[i + 1] = s * zk[i] + c * h;
                            zk[i] = c * zk[i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
