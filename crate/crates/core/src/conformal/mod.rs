//! Conformal maps of the unit disk, disk quadrature and densities pulled back
//! to the disk.

mod density;
mod quadrature;

use num_complex::Complex64;

use crate::error::{domain, param, Error, Result};
use crate::orlicz::SampledFunction;

pub use density::{DensityField, DensityTable};
pub use quadrature::{build_disk_quadrature, gauss_legendre, DiskQuadrature};

#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    Identity,
    /// `z + (c/k) z^k`.
    PerturbedPower {
        c: Complex64,
        k: u32,
    },
    /// `Σ a_j z^j`, `coeffs[j] = a_j`.
    Polynomial {
        coeffs: Vec<Complex64>,
    },
    /// `(z + a) / (1 + ā z)`.
    MoebiusDisk {
        a: Complex64,
    },
}

/// A univalent analytic map of the closed unit disk, certified by
/// `Re φ′ > 0` on the boundary circle.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMap {
    kind: MapKind,
    min_re_derivative: f64,
}

const CERT_SAMPLES: usize = 8192;

impl ConformalMap {
    pub fn identity() -> Self {
        Self { kind: MapKind::Identity, min_re_derivative: 1.0 }
    }

    pub fn perturbed_power(c: Complex64, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(param(format!("PerturbedPower needs k >= 2, got {k}")));
        }
        Self::certified(MapKind::PerturbedPower { c, k })
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 || coeffs.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(param("polynomial map needs finite coefficients a_0, a_1, ..."));
        }
        Self::certified(MapKind::Polynomial { coeffs })
    }

    pub fn moebius_disk(a: Complex64) -> Result<Self> {
        if !(a.norm() < 1.0) {
            return Err(param(format!("MoebiusDisk needs |a| < 1, got {}", a.norm())));
        }
        Self::certified(MapKind::MoebiusDisk { a })
    }

    pub fn from_kind(kind: MapKind) -> Result<Self> {
        match kind {
            MapKind::Identity => Ok(Self::identity()),
            MapKind::PerturbedPower { c, k } => Self::perturbed_power(c, k),
            MapKind::Polynomial { coeffs } => Self::polynomial(coeffs),
            MapKind::MoebiusDisk { a } => Self::moebius_disk(a),
        }
    }

    /// Re φ′ is harmonic, so its minimum over the closed disk sits on the
    /// boundary. Sampling the circle with spacing h and subtracting
    /// `sup|φ″|·h/2` gives a rigorous lower bound.
    fn certified(kind: MapKind) -> Result<Self> {
        let mut map = Self { kind, min_re_derivative: 0.0 };
        let h = std::f64::consts::TAU / CERT_SAMPLES as f64;
        let sampled = (0..CERT_SAMPLES)
            .map(|j| map.derivative(Complex64::from_polar(1.0, h * j as f64)).re)
            .fold(f64::INFINITY, f64::min);
        let lower = sampled - map.sup_second_derivative() * h / 2.0;
        if !(lower > 0.0) {
            return Err(param(format!(
                "univalence certificate failed for {}: min Re φ′ on |z|=1 is {sampled:.6e}",
                map.label()
            )));
        }
        map.min_re_derivative = lower;
        Ok(map)
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// Certified lower bound for `Re φ′` on the closed disk.
    pub fn min_re_derivative(&self) -> f64 {
        self.min_re_derivative
    }

    pub fn label(&self) -> String {
        match &self.kind {
            MapKind::Identity => "Identity".into(),
            MapKind::PerturbedPower { c, k } => {
                format!("PerturbedPower(c={},{};k={k})", c.re, c.im)
            }
            MapKind::Polynomial { coeffs } => {
                let parts: Vec<String> = coeffs.iter().map(|a| format!("{},{}", a.re, a.im)).collect();
                format!("Polynomial({})", parts.join(";"))
            }
            MapKind::MoebiusDisk { a } => format!("MoebiusDisk(a={},{})", a.re, a.im),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            MapKind::Identity => z,
            MapKind::PerturbedPower { c, k } => z + c / (*k as f64) * z.powu(*k),
            MapKind::Polynomial { coeffs } => coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a),
            MapKind::MoebiusDisk { a } => (z + a) / (1.0 + a.conj() * z),
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            MapKind::Identity => Complex64::new(1.0, 0.0),
            MapKind::PerturbedPower { c, k } => 1.0 + c * z.powu(k - 1),
            MapKind::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, (j, a)| acc * z + a * j as f64),
            MapKind::MoebiusDisk { a } => {
                let d = 1.0 + a.conj() * z;
                (1.0 - a.norm_sqr()) / (d * d)
            }
        }
    }

    /// `|φ′(z)|²` without the domain check; valid wherever φ is analytic.
    pub fn jacobian_unchecked(&self, z: Complex64) -> f64 {
        self.derivative(z).norm_sqr()
    }

    /// `J_φ(z) = |φ′(z)|²` for `|z| < 1`.
    pub fn jacobian(&self, z: Complex64) -> Result<f64> {
        if !(z.norm() < 1.0) {
            return Err(domain(format!("jacobian needs |z| < 1, got |z| = {}", z.norm())));
        }
        Ok(self.jacobian_unchecked(z))
    }

    /// Exact area of φ(𝔻) where a closed form exists.
    pub fn closed_form_area(&self) -> Option<f64> {
        use std::f64::consts::PI;
        match &self.kind {
            MapKind::Identity | MapKind::MoebiusDisk { .. } => Some(PI),
            MapKind::PerturbedPower { c, k } => Some(PI * (1.0 + c.norm_sqr() / *k as f64)),
            MapKind::Polynomial { coeffs } => {
                Some(PI * coeffs.iter().enumerate().map(|(j, a)| j as f64 * a.norm_sqr()).sum::<f64>())
            }
        }
    }

    /// Analytic upper bound for `sup_𝔻 |φ′|`.
    pub fn sup_derivative(&self) -> f64 {
        match &self.kind {
            MapKind::Identity => 1.0,
            MapKind::PerturbedPower { c, .. } => 1.0 + c.norm(),
            MapKind::Polynomial { coeffs } => coeffs.iter().enumerate().map(|(j, a)| j as f64 * a.norm()).sum(),
            MapKind::MoebiusDisk { a } => (1.0 + a.norm()) / (1.0 - a.norm()),
        }
    }

    fn sup_second_derivative(&self) -> f64 {
        match &self.kind {
            MapKind::Identity => 0.0,
            MapKind::PerturbedPower { c, k } => c.norm() * (*k as f64 - 1.0),
            MapKind::Polynomial { coeffs } => {
                coeffs.iter().enumerate().map(|(j, a)| (j * j.saturating_sub(1)) as f64 * a.norm()).sum()
            }
            MapKind::MoebiusDisk { a } => {
                let r = a.norm();
                2.0 * r * (1.0 - r * r) / (1.0 - r).powi(3)
            }
        }
    }

    /// Solves `φ(z) = w` by damped Newton from `start`.
    pub fn inverse_from(&self, w: Complex64, start: Complex64) -> Result<Complex64> {
        match &self.kind {
            MapKind::Identity => return Ok(w),
            MapKind::MoebiusDisk { a } => return Ok((w - a) / (1.0 - a.conj() * w)),
            _ => {}
        }
        let scale = 1.0 + w.norm();
        let mut z = start;
        let mut res = self.eval(z) - w;
        for _ in 0..100 {
            if res.norm() <= 4.0 * f64::EPSILON * scale {
                return Ok(z);
            }
            let step = res / self.derivative(z);
            let mut t = 1.0;
            loop {
                let cand = z - step * t;
                let r = self.eval(cand) - w;
                if r.norm() < res.norm() || t < 1e-6 {
                    z = cand;
                    res = r;
                    break;
                }
                t *= 0.5;
            }
        }
        if res.norm() <= 1e-12 * scale {
            Ok(z)
        } else {
            Err(Error::Convergence(format!("inverse map did not converge at w = {w} (residual {:e})", res.norm())))
        }
    }

    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        let start = match &self.kind {
            MapKind::Polynomial { coeffs } => (w - coeffs[0]) / coeffs[1],
            _ => w,
        };
        self.inverse_from(w, start)
    }
}

/// `Σ wᵢ J_φ(zᵢ)`.
pub fn image_area(map: &ConformalMap, quad: &DiskQuadrature) -> f64 {
    quad.integrate(|z| map.jacobian_unchecked(z))
}

pub fn jacobian(map: &ConformalMap, z: Complex64) -> Result<f64> {
    map.jacobian(z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRegularity {
    /// `∫_𝔻 |φ′|^α`.
    pub value: f64,
    /// `π sup|φ′|^α`.
    pub analytic_bound: f64,
}

pub fn alpha_regularity_integral(map: &ConformalMap, alpha: f64, quad: &DiskQuadrature) -> Result<AlphaRegularity> {
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(param(format!("alpha-regularity needs finite alpha > 2, got {alpha}")));
    }
    let value = quad.integrate(|z| map.jacobian_unchecked(z).powf(alpha / 2.0));
    let analytic_bound = std::f64::consts::PI * map.sup_derivative().powf(alpha);
    Ok(AlphaRegularity { value, analytic_bound })
}

/// Samples of `ρ(φ(zᵢ))` at the quadrature nodes.
pub fn pullback_density(rho: &DensityField, map: &ConformalMap, quad: &DiskQuadrature) -> Result<SampledFunction> {
    let values = quad.nodes().iter().map(|&z| rho.at_preimage(map, z)).collect::<Result<Vec<_>>>()?;
    SampledFunction::new(values, quad.measure().clone())
}

/// Samples of `ρ(φ(zᵢ)) J_φ(zᵢ)`, the pullback of `ρ / J_{φ⁻¹}`.
pub fn pullback_weighted_density(
    rho: &DensityField,
    map: &ConformalMap,
    quad: &DiskQuadrature,
) -> Result<SampledFunction> {
    let values = quad
        .nodes()
        .iter()
        .map(|&z| Ok(rho.at_preimage(map, z)? * map.jacobian_unchecked(z)))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(values, quad.measure().clone())
}
