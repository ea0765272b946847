use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::{SkylineCholesky, SparseSymmetricMatrix};
use crate::error::{Error, Result};

/// Problems with fewer unknowns are solved densely.
pub const DENSE_LIMIT: usize = 2000;

const BLOCK: usize = 4;
const SHIFT: f64 = 1.0;
const MAX_ITER: usize = 500;
const TOL: f64 = 1e-10;
const SEED: u64 = 0x5eed_f00d;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Dense,
    SubspaceIteration,
}

#[derive(Debug, Clone)]
pub struct NeumannEigen {
    pub mu: f64,
    /// `‖A u − μ Mρ u‖₂ / ‖u‖₂`.
    pub residual: f64,
    /// Mρ-orthogonal to constants, unit Euclidean norm.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub method: EigenMethod,
}

fn residual(a: &SparseSymmetricMatrix, m: &SparseSymmetricMatrix, mu: f64, u: &[f64]) -> f64 {
    let au = a.mul_vec(u);
    let mu_ = m.mul_vec(u);
    let r: f64 = au.iter().zip(&mu_).map(|(x, y)| (x - mu * y).powi(2)).sum();
    let n: f64 = u.iter().map(|x| x * x).sum();
    (r / n).sqrt()
}

/// Removes the constant component in the Mρ inner product.
fn deflate(u: &mut [f64], m_one: &[f64], one_m_one: f64) {
    let c: f64 = u.iter().zip(m_one).map(|(x, y)| x * y).sum::<f64>() / one_m_one;
    u.iter_mut().for_each(|x| *x -= c);
}

fn normalize(mut u: Vec<f64>) -> Vec<f64> {
    let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    u.iter_mut().for_each(|x| *x /= n);
    u
}

/// Smallest eigenvalue of `A u = μ Mρ u` on `{u : 1ᵀ Mρ u = 0}`.
pub fn first_nonzero_neumann(a: &SparseSymmetricMatrix, m: &SparseSymmetricMatrix) -> Result<NeumannEigen> {
    if a.dim() != m.dim() || a.dim() < 3 {
        return Err(crate::error::param("stiffness and mass must be square of the same size >= 3"));
    }
    if a.dim() < DENSE_LIMIT {
        dense(a, m)
    } else {
        subspace(a, m)
    }
}

fn dense(a: &SparseSymmetricMatrix, m: &SparseSymmetricMatrix) -> Result<NeumannEigen> {
    let n = a.dim();
    let chol = m.to_dense().cholesky().ok_or(Error::Solver { iterations: 0, residual: f64::NAN })?;
    let l = chol.l();
    // C = L⁻¹ A L⁻ᵀ
    let x = l.solve_lower_triangular(&a.to_dense()).ok_or(Error::Solver { iterations: 0, residual: f64::NAN })?;
    let c = l.solve_lower_triangular(&x.transpose()).ok_or(Error::Solver { iterations: 0, residual: f64::NAN })?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    // Lᵀ·1 spans the kernel in the transformed coordinates.
    let k = (l.transpose() * DVector::from_element(n, 1.0)).normalize();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let idx = order
        .into_iter()
        .find(|&i| eig.eigenvectors.column(i).dot(&k).abs() < 0.5)
        .ok_or(Error::Solver { iterations: 0, residual: f64::NAN })?;
    let mu = eig.eigenvalues[idx];
    let v = eig.eigenvectors.column(idx).into_owned();
    let u = l.transpose().solve_upper_triangular(&v).ok_or(Error::Solver { iterations: 0, residual: f64::NAN })?;
    let mut u: Vec<f64> = u.iter().copied().collect();
    let m_one = m.mul_vec(&vec![1.0; n]);
    let one_m_one: f64 = m_one.iter().sum();
    deflate(&mut u, &m_one, one_m_one);
    let u = normalize(u);
    let res = residual(a, m, mu, &u);
    Ok(NeumannEigen { mu, residual: res, vector: u, iterations: 1, method: EigenMethod::Dense })
}

/// Block shift-invert subspace iteration with Rayleigh–Ritz, constants
/// deflated in every step.
pub(crate) fn subspace(a: &SparseSymmetricMatrix, m: &SparseSymmetricMatrix) -> Result<NeumannEigen> {
    let n = a.dim();
    let k = a.add_scaled(SHIFT, m);
    let fac = SkylineCholesky::factor(&k)?;
    let m_one = m.mul_vec(&vec![1.0; n]);
    let one_m_one: f64 = m_one.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut block: Vec<Vec<f64>> = (0..BLOCK)
        .map(|_| {
            let mut u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            deflate(&mut u, &m_one, one_m_one);
            u
        })
        .collect();
    let mut last_res = f64::INFINITY;
    for it in 1..=MAX_ITER {
        for u in block.iter_mut() {
            let mut w = fac.solve(&m.mul_vec(u));
            deflate(&mut w, &m_one, one_m_one);
            *u = w;
        }
        let (vals, ritz) = rayleigh_ritz(a, m, &block)?;
        block = ritz;
        let mu = vals[0];
        let u = normalize(block[0].clone());
        let res = residual(a, m, mu, &u);
        last_res = res;
        if res <= TOL * (1.0 + mu) {
            return Ok(NeumannEigen {
                mu,
                residual: res,
                vector: u,
                iterations: it,
                method: EigenMethod::SubspaceIteration,
            });
        }
    }
    Err(Error::Solver { iterations: MAX_ITER, residual: last_res })
}

/// Ritz values (ascending) and Mρ-orthonormal Ritz vectors of the block.
fn rayleigh_ritz(
    a: &SparseSymmetricMatrix,
    m: &SparseSymmetricMatrix,
    block: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let p = block.len();
    let ax: Vec<Vec<f64>> = block.iter().map(|u| a.mul_vec(u)).collect();
    let mx: Vec<Vec<f64>> = block.iter().map(|u| m.mul_vec(u)).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let ar = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&block[i], &ax[j]) + dot(&block[j], &ax[i])));
    let mr = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&block[i], &mx[j]) + dot(&block[j], &mx[i])));
    let fail = || Error::Solver { iterations: 0, residual: f64::NAN };
    let l = mr.cholesky().ok_or_else(fail)?.l();
    let x = l.solve_lower_triangular(&ar).ok_or_else(fail)?;
    let c = l.solve_lower_triangular(&x.transpose()).ok_or_else(fail)?;
    let eig = SymmetricEigen::new((&c + c.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let q = l.transpose().solve_upper_triangular(&eig.eigenvectors).ok_or_else(fail)?;
    let n = block[0].len();
    let vecs = order
        .iter()
        .map(|&c| {
            let mut v = vec![0.0; n];
            for (j, u) in block.iter().enumerate() {
                let s = q[(j, c)];
                v.iter_mut().zip(u).for_each(|(vi, ui)| *vi += s * ui);
            }
            v
        })
        .collect();
    Ok((order.iter().map(|&i| eig.eigenvalues[i]).collect(), vecs))
}
