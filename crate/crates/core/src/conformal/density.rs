use num_complex::Complex64;

use super::ConformalMap;
use crate::error::{param, Error, Result};
use crate::youngfn::log_pow_inverse;

/// Bilinear interpolation table over a rectangle in Ω coordinates. Points
/// outside the rectangle are clamped to its edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `values[j * nx + i]` at `(x_i, y_j)`.
    pub values: Vec<f64>,
}

impl DensityTable {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if nx < 2 || ny < 2 || values.len() != nx * ny {
            return Err(param(format!(
                "density table needs nx, ny >= 2 and nx*ny values, got {nx}x{ny} with {}",
                values.len()
            )));
        }
        if !(x_range.1 > x_range.0 && y_range.1 > y_range.0) {
            return Err(param("density table ranges must be increasing"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Density(format!("density table value must be positive, got {v}")));
        }
        Ok(Self { x_range, y_range, nx, ny, values })
    }

    pub fn eval(&self, x: Complex64) -> f64 {
        let locate = |v: f64, (a, b): (f64, f64), n: usize| -> (usize, f64) {
            let s = ((v - a) / (b - a)).clamp(0.0, 1.0) * (n - 1) as f64;
            let i = (s.floor() as usize).min(n - 2);
            (i, s - i as f64)
        };
        let (i, fx) = locate(x.re, self.x_range, self.nx);
        let (j, fy) = locate(x.im, self.y_range, self.ny);
        let v = |i: usize, j: usize| self.values[j * self.nx + i];
        (1.0 - fy) * ((1.0 - fx) * v(i, j) + fx * v(i + 1, j)) + fy * ((1.0 - fx) * v(i, j + 1) + fx * v(i + 1, j + 1))
    }
}

/// A positive density ρ on Ω = φ(𝔻).
///
/// Some kinds are defined through the map itself and are evaluated at a
/// preimage `y ∈ 𝔻`; evaluating them at a point of Ω inverts the map first.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityField {
    Constant(f64),
    /// `e^{-n|x|²}`.
    Gaussian {
        n: f64,
    },
    /// `ρ(φ(y)) = J_φ(y)^{-γ}`; `γ = 1` is `J_{φ⁻¹}`.
    PullbackJacobianPower {
        gamma: f64,
    },
    /// `ρ(φ(y)) = Φ_ε⁻¹(J_φ(y)) / J_φ(y)`, which makes the `K_Φ` integrand
    /// identically one.
    PullbackOrliczCanceling {
        eps: f64,
    },
    Tabulated(DensityTable),
    Scaled {
        factor: f64,
        inner: Box<DensityField>,
    },
}

impl DensityField {
    pub fn scaled(self, factor: f64) -> Self {
        DensityField::Scaled { factor, inner: Box::new(self) }
    }

    pub fn label(&self) -> String {
        match self {
            DensityField::Constant(c) => format!("Constant({c})"),
            DensityField::Gaussian { n } => format!("Gaussian(n={n})"),
            DensityField::PullbackJacobianPower { gamma } => {
                format!("PullbackJacobianPower({gamma})")
            }
            DensityField::PullbackOrliczCanceling { eps } => {
                format!("PullbackOrliczCanceling(eps={eps})")
            }
            DensityField::Tabulated(t) => format!("Tabulated({}x{})", t.nx, t.ny),
            DensityField::Scaled { factor, inner } => format!("{factor}*{}", inner.label()),
        }
    }

    fn is_pullback(&self) -> bool {
        match self {
            DensityField::PullbackJacobianPower { .. } | DensityField::PullbackOrliczCanceling { .. } => true,
            DensityField::Scaled { inner, .. } => inner.is_pullback(),
            _ => false,
        }
    }

    fn raw(&self, map: &ConformalMap, y: Complex64, x: Complex64) -> f64 {
        match self {
            DensityField::Constant(c) => *c,
            DensityField::Gaussian { n } => (-n * x.norm_sqr()).exp(),
            DensityField::PullbackJacobianPower { gamma } => map.jacobian_unchecked(y).powf(-gamma),
            DensityField::PullbackOrliczCanceling { eps } => {
                let j = map.jacobian_unchecked(y);
                log_pow_inverse(*eps, j) / j
            }
            DensityField::Tabulated(t) => t.eval(x),
            DensityField::Scaled { factor, inner } => factor * inner.raw(map, y, x),
        }
    }

    fn checked(v: f64, at: Complex64) -> Result<f64> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Density(format!("density is {v} at {at}; it must be positive and finite")))
        }
    }

    /// `ρ(φ(y))`.
    pub fn at_preimage(&self, map: &ConformalMap, y: Complex64) -> Result<f64> {
        Self::checked(self.raw(map, y, map.eval(y)), y)
    }

    /// `ln ρ(φ(y))`, analytic for the Gaussian so that sharply peaked
    /// densities do not underflow away from the peak.
    pub fn log_at_preimage(&self, map: &ConformalMap, y: Complex64) -> Result<f64> {
        match self {
            DensityField::Gaussian { n } if *n >= 0.0 && n.is_finite() => Ok(-n * map.eval(y).norm_sqr()),
            DensityField::Scaled { factor, inner } if *factor > 0.0 && factor.is_finite() => {
                Ok(factor.ln() + inner.log_at_preimage(map, y)?)
            }
            _ => Ok(self.at_preimage(map, y)?.ln()),
        }
    }

    /// `ρ(x)` for `x ∈ Ω`; `hint` is a starting guess for `φ⁻¹(x)` and is
    /// only used by map-defined densities.
    pub fn at_point(&self, map: &ConformalMap, x: Complex64, hint: Option<Complex64>) -> Result<f64> {
        let y = if self.is_pullback() {
            match hint {
                Some(h) => map.inverse_from(x, h)?,
                None => map.inverse(x)?,
            }
        } else {
            x
        };
        Self::checked(self.raw(map, y, x), x)
    }
}
