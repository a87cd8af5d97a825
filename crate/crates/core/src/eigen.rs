//! Right eigenvectors of a general complex matrix from its Schur form.

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::C64;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    /// Unit-norm right eigenvectors as columns.
    pub vectors: DMatrix<C64>,
    pub inverse: DMatrix<C64>,
    /// 1-norm condition number of the eigenvector matrix.
    pub condition: f64,
}

pub fn eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let t = schur(m)?.1;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

fn schur(m: &DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let s = Schur::try_new(m.clone(), f64::EPSILON, 100 * m.nrows().max(10))
        .ok_or_else(|| Error::Analysis("Schur iteration did not converge".into()))?;
    Ok(s.unpack())
}

fn norm1(m: &DMatrix<C64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn decompose(m: &DMatrix<C64>) -> Result<EigenDecomposition> {
    let n = m.nrows();
    let (q, t) = schur(m)?;
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * scale;

    // back-substitution on (T - t_kk) x = 0 with x_k = 1
    let mut x = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for k in 0..n {
        let lambda = t[(k, k)];
        x[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                acc += t[(i, j)] * x[(j, k)];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            x[(i, k)] = -acc / denom;
        }
    }
    let mut vectors = q * x;
    for mut col in vectors.column_iter_mut() {
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            col /= C64::new(norm, 0.0);
        }
    }
    let inverse = vectors
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::IllConditioned { condition: f64::INFINITY, threshold: f64::INFINITY })?;
    let condition = norm1(&vectors) * norm1(&inverse);
    let values = (0..n).map(|i| t[(i, i)]).collect();
    Ok(EigenDecomposition { values, vectors, inverse, condition })
}
