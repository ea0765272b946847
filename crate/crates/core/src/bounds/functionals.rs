use std::sync::Arc;

use num_complex::Complex64;

use crate::conformal::{ConformalMap, DensityField, DiskQuadrature};
use crate::error::{param, Result};
use crate::logspace::log_sum_exp;
use crate::orlicz::{luxemburg_norm, SampledFunction};
use crate::youngfn::{YoungFunction, YoungKind};

/// Grid maxima of `ρ(φ(y)) J_φ(y)` on three successively refined disk
/// rules, with an Aitken extrapolation of the sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EsssupEstimate {
    /// The value used downstream: the larger of the finest grid maximum and
    /// the extrapolated limit.
    pub value: f64,
    pub grid_maxima: [f64; 3],
    /// `None` when the last two differences vanish or the sequence does not contract.
    pub aitken: Option<f64>,
    /// The last grid step changed the maximum by more than `1e-3` relative
    /// and did not contract the previous step.
    pub stalled: bool,
}

fn grid_max(map: &ConformalMap, rho: &DensityField, nodes: &[Complex64]) -> Result<f64> {
    let mut m = f64::NEG_INFINITY;
    for &z in nodes {
        m = m.max(rho.at_preimage(map, z)? * map.jacobian_unchecked(z));
    }
    Ok(m)
}

/// `esssup_Ω ρ / J_{φ⁻¹} = esssup_𝔻 ρ(φ) J_φ`, estimated from below by grid
/// maxima on `quad` and on two refinements with doubled orders.
pub fn k_esssup(map: &ConformalMap, rho: &DensityField, quad: &DiskQuadrature) -> Result<EsssupEstimate> {
    let (n_r, n_t) = quad.orders();
    let x0 = grid_max(map, rho, quad.nodes())?;
    let x1 = grid_max(map, rho, DiskQuadrature::new(2 * n_r, 2 * n_t)?.nodes())?;
    let x2 = grid_max(map, rho, DiskQuadrature::new(4 * n_r, 4 * n_t)?.nodes())?;
    let (d1, d2) = (x1 - x0, x2 - x1);
    let settled = d2.abs() <= 1e-12 * x2.abs();
    let contracting = d2.abs() < d1.abs();
    let aitken = if !settled && contracting {
        let a = x2 - d2 * d2 / (d2 - d1);
        a.is_finite().then_some(a)
    } else {
        None
    };
    let stalled = !settled && !contracting && d2.abs() > 1e-3 * x2.abs();
    let value = aitken.map_or(x2, |a| a.max(x2));
    Ok(EsssupEstimate { value, grid_maxima: [x0, x1, x2], aitken, stalled })
}

/// `ln Σ wᵢ J_φ(zᵢ) ρ(φ(zᵢ))^s / s`, i.e. `ln ‖ρ‖_{L^s(Ω)}` by pullback.
pub fn log_rho_norm(map: &ConformalMap, rho: &DensityField, s: f64, quad: &DiskQuadrature) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(param(format!("L^s exponent must be finite and positive, got {s}")));
    }
    let terms = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .map(|(&z, &w)| Ok(w.ln() + map.jacobian_unchecked(z).ln() + s * rho.log_at_preimage(map, z)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(log_sum_exp(terms) / s)
}

/// `K_q = ‖ρ / J_{φ⁻¹}^{2/q}‖_{L^{q/(q−2)}(Ω)} = (Σ wᵢ (ρ(φ(zᵢ)) J_φ(zᵢ))^{q/(q−2)})^{(q−2)/q}`,
/// accumulated in log space.
pub fn k_q(map: &ConformalMap, rho: &DensityField, q: f64, quad: &DiskQuadrature) -> Result<f64> {
    if !(q > 2.0 && q.is_finite()) {
        return Err(param(format!("K_q needs finite q > 2, got {q}")));
    }
    let r = q / (q - 2.0);
    let terms = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .map(|(&z, &w)| Ok(w.ln() + r * (rho.log_at_preimage(map, z)? + map.jacobian_unchecked(z).ln())))
        .collect::<Result<Vec<_>>>()?;
    Ok((log_sum_exp(terms) / r).exp())
}

/// `K_Φ = ‖ρ / (J_{φ⁻¹} Φ⁻¹(1/J_{φ⁻¹}))‖_{L^Φ(Ω)}`, pulled back to the disk:
/// integrand `ρ(φ) J_φ / Φ⁻¹(J_φ)` against `J_φ dy`.
pub fn k_phi(map: &ConformalMap, rho: &DensityField, phi: &YoungFunction, quad: &DiskQuadrature) -> Result<f64> {
    if !matches!(phi.kind(), YoungKind::LogLinear | YoungKind::LogPow { .. }) {
        return Err(param("K_Phi is defined for the u log^eps(u + e) family only"));
    }
    let mut g = Vec::with_capacity(quad.len());
    let mut jac = Vec::with_capacity(quad.len());
    for &z in quad.nodes() {
        let j = map.jacobian_unchecked(z);
        g.push(rho.at_preimage(map, z)? * j / phi.inverse(j)?);
        jac.push(j);
    }
    let id = format!("{}*J[{}]", quad.measure().id(), map.label());
    let measure = Arc::new(quad.measure().reweighted(id, &jac)?);
    luxemburg_norm(&SampledFunction::new(g, measure)?, phi)
}
