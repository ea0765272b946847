use std::f64::consts::{LN_10, PI};

use super::{check_alpha_k, BoundFlag};
use crate::error::{param, Result};
use crate::logspace::log_abs_one_minus_exp;

fn kappa_checked(p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite() && q >= p && q.is_finite()) {
        return Err(param(format!("need finite 1 <= p <= q, got p = {p}, q = {q}")));
    }
    let kappa = 1.0 / p - 1.0 / q;
    if !(0.0..0.5).contains(&kappa) {
        return Err(param(format!("kappa = 1/p - 1/q must lie in [0, 1/2), got {kappa}")));
    }
    Ok(kappa)
}

/// Upper estimate `2/π^κ · ((1−κ)/(1/2−κ))^{1−κ}` of the disk
/// Poincaré–Sobolev constant `B_{q,p}(𝔻)`, `κ = 1/p − 1/q`.
pub fn b_qp_disk(p: f64, q: f64) -> Result<f64> {
    let kappa = kappa_checked(p, q)?;
    Ok(2.0 / PI.powf(kappa) * ((1.0 - kappa) / (0.5 - kappa)).powf(1.0 - kappa))
}

/// `(B^{−p}, 2^p B^{−p})` around `μ_{p,q}(𝔻)` with `B = b_qp_disk(p, q)`.
pub fn mu_pq_disk_bracket(p: f64, q: f64) -> Result<(f64, f64)> {
    let b = b_qp_disk(p, q)?;
    let lo = b.powf(-p);
    Ok((lo, 2f64.powf(p) * lo))
}

/// `ln C_J(α, K, |Ω|)` with every additive term kept for auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct LogCJ {
    pub value: f64,
    /// `ln ν`, `ν = 10^{4α} (α−2)/(α−1) (24π²K²)^α`.
    pub log_nu: f64,
    /// `ln C_α`, `C_α = 10⁶ / [(α−1)|1−ν|]^{1/α}`.
    pub log_c_alpha: f64,
    /// `(name, term)` in summation order; they add up to `value`.
    pub terms: Vec<(&'static str, f64)>,
    pub flags: Vec<BoundFlag>,
}

impl LogCJ {
    /// Sum of the logged terms in their stored order.
    pub fn recompose(&self) -> f64 {
        self.terms.iter().map(|t| t.1).sum()
    }
}

/// `ln C_J = 2 ln C_α + 2 ln K + (2/α − 1) ln π − ln 4 + K²π²(2+π⁴)²/(2 ln 3) + ln|Ω|`.
///
/// `ν ≥ 1` for every admissible `(α, K)`, so `1 − ν` is replaced by `|1 − ν|`
/// and [`BoundFlag::NuGeOne`] is raised.
pub fn log_c_j(alpha: f64, k: f64, area: f64) -> Result<LogCJ> {
    check_alpha_k(alpha, k)?;
    if !(area > 0.0 && area.is_finite()) {
        return Err(param(format!("area must be finite and positive, got {area}")));
    }
    let log_nu = 4.0 * alpha * LN_10 + ((alpha - 2.0) / (alpha - 1.0)).ln() + alpha * (24.0 * PI * PI * k * k).ln();
    let mut flags = Vec::new();
    if log_nu >= 0.0 {
        flags.push(BoundFlag::NuGeOne);
    }
    let log_one_minus_nu = log_abs_one_minus_exp(log_nu);
    if !log_one_minus_nu.is_finite() {
        return Err(param("nu = 1 exactly; C_alpha is undefined"));
    }
    let log_c_alpha = 6.0 * LN_10 - ((alpha - 1.0).ln() + log_one_minus_nu) / alpha;
    let pi4 = PI.powi(4);
    let terms = vec![
        ("2_log_C_alpha", 2.0 * log_c_alpha),
        ("2_log_K", 2.0 * k.ln()),
        ("log_pi_power", (2.0 / alpha - 1.0) * PI.ln()),
        ("minus_log_4", -(4f64.ln())),
        ("exp_term", k * k * PI * PI * (2.0 + pi4).powi(2) / (2.0 * 3f64.ln())),
        ("log_area", area.ln()),
    ];
    let value = terms.iter().map(|t| t.1).sum();
    Ok(LogCJ { value, log_nu, log_c_alpha, terms, flags })
}
