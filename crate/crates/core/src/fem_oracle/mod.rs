//! Finite-element reference for the first nonzero Neumann eigenvalue of
//! `−Δu = μ ρ u` on Ω = φ(𝔻), and the exact disk value from Bessel roots.

mod bessel;
mod eigen;
mod mesh;
mod sparse;
mod trial;

use num_complex::Complex64;

use crate::conformal::{ConformalMap, DensityField};
use crate::error::Result;

pub use bessel::{bessel_j0, bessel_j1, bessel_j1_prime, j1_prime_first_zero, mu_disk_reference};
pub use eigen::{first_nonzero_neumann, EigenMethod, NeumannEigen, DENSE_LIMIT};
pub use mesh::{mesh_from_map, TriMesh, MAX_LEVEL};
pub use sparse::{SkylineCholesky, SparseSymmetricMatrix};
pub use trial::{b_m2_disk_estimate, BM2Estimate};

/// P1 stiffness `A` and consistent mass `Mρ`, with ρ taken at each
/// triangle's centroid in Ω.
pub fn assemble(mesh: &TriMesh, rho: &DensityField) -> Result<(SparseSymmetricMatrix, SparseSymmetricMatrix)> {
    let n = mesh.vertices().len();
    let mut a = Vec::with_capacity(9 * mesh.triangles().len());
    let mut m = Vec::with_capacity(9 * mesh.triangles().len());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = tri.map(|v| mesh.vertices()[v]);
        let area = mesh.triangle_area(t);
        // ∇λ_k = (b_k, c_k) / (2A)
        let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
        let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
        let centroid = Complex64::new((p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0);
        let hint = tri.iter().map(|&v| mesh.preimages()[v]).sum::<Complex64>() / 3.0;
        let rho_c = rho.at_point(mesh.map(), centroid, Some(hint))?;
        for i in 0..3 {
            for j in 0..3 {
                a.push((tri[i], tri[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area)));
                let mass = if i == j { 2.0 } else { 1.0 };
                m.push((tri[i], tri[j], rho_c * area * mass / 12.0));
            }
        }
    }
    Ok((SparseSymmetricMatrix::from_triplets(n, a), SparseSymmetricMatrix::from_triplets(n, m)))
}

/// `(4 μ_fine − μ_coarse) / 3`, for an `O(h²)` error with h halved.
pub fn richardson(mu_coarse: f64, mu_fine: f64) -> f64 {
    (4.0 * mu_fine - mu_coarse) / 3.0
}

#[derive(Debug, Clone)]
pub struct FemReference {
    pub levels: Vec<u32>,
    pub mu: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Richardson value from the two finest levels.
    pub extrapolated: f64,
}

impl FemReference {
    /// Ratios of successive level differences; ≈ 4 for `O(h²)` convergence.
    pub fn convergence_factors(&self) -> Vec<f64> {
        self.mu.windows(3).map(|w| (w[1] - w[0]) / (w[2] - w[1])).collect()
    }
}

/// Solves on each level in `levels` (ascending) and extrapolates the top two.
pub fn fem_reference(map: &ConformalMap, rho: &DensityField, levels: &[u32]) -> Result<FemReference> {
    let mut mu = Vec::with_capacity(levels.len());
    let mut residuals = Vec::with_capacity(levels.len());
    for &level in levels {
        let mesh = mesh_from_map(map, level)?;
        let (a, m) = assemble(&mesh, rho)?;
        let eig = first_nonzero_neumann(&a, &m)?;
        mu.push(eig.mu);
        residuals.push(eig.residual);
    }
    let extrapolated = match mu.len() {
        0 => return Err(crate::error::param("fem_reference needs at least one level")),
        1 => mu[0],
        k => richardson(mu[k - 2], mu[k - 1]),
    };
    Ok(FemReference { levels: levels.to_vec(), mu, residuals, extrapolated })
}

#[cfg(test)]
mod tests;
