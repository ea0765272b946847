//! Lower bounds for the first nonzero Neumann eigenvalue `μ_ρ(Ω)` of the
//! Laplacian with density on `Ω = φ(𝔻)`.
//!
//! Every bound is assembled as a natural logarithm. The quasidisc constants
//! are far outside the `f64` range, and the Orlicz quasidisc route needs an
//! iterated logarithm on top of that.

mod constants;
mod functionals;
mod lower;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{param, Error, Result};

pub use constants::{b_qp_disk, log_c_j, mu_pq_disk_bracket, LogCJ};
pub use functionals::{k_esssup, k_phi, k_q, log_rho_norm, EsssupEstimate};
pub use lower::{
    gaussian_sweep, log_c_tilde_j, mu_lower_esssup, mu_lower_kq, mu_lower_orlicz, mu_lower_orlicz_quasidisc,
    mu_lower_quasidisc, sweep_slope, LogCTildeJ,
};

/// Exponents and constants shared by the bound formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    /// Quasiconformality constant of the domain.
    pub k: f64,
    pub eps: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self { p: 1.5, q: 4.0, alpha: 12.0, k: 1.05, eps: 1.5 }
    }
}

impl ScenarioParams {
    /// Checks `1 ≤ p < 2`, `2 < q ≤ 2p/(2−p)`, `α > 2`, `K ≥ 1`, `ε > 1`.
    pub fn new(p: f64, q: f64, alpha: f64, k: f64, eps: f64) -> Result<Self> {
        let s = Self { p, q, alpha, k, eps };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { p, q, alpha, k, eps } = *self;
        if !(1.0..2.0).contains(&p) {
            return Err(param(format!("p must lie in [1, 2), got {p}")));
        }
        let q_max = 2.0 * p / (2.0 - p);
        if !(q > 2.0 && q <= q_max) {
            return Err(param(format!("q must lie in (2, 2p/(2-p)] = (2, {q_max}], got {q}")));
        }
        if !(alpha > 2.0 && alpha.is_finite()) {
            return Err(param(format!("alpha must be finite and > 2, got {alpha}")));
        }
        if !(k >= 1.0 && k.is_finite()) {
            return Err(param(format!("K must be finite and >= 1, got {k}")));
        }
        if !(eps > 1.0 && eps.is_finite()) {
            return Err(param(format!("eps must be finite and > 1, got {eps}")));
        }
        Ok(())
    }

    /// `κ = 1/p − 1/q`.
    pub fn kappa(&self) -> f64 {
        1.0 / self.p - 1.0 / self.q
    }

    /// Strict `q < 2p/(2−p)`, needed wherever the embedding must be compact.
    pub fn check_compact(&self) -> Result<()> {
        check_pq_strict(self.p, self.q)
    }

    /// `2 < α < 2K²/(K²−1)`.
    pub fn check_quasidisc(&self) -> Result<()> {
        check_alpha_k(self.alpha, self.k)
    }

    /// `s = q(α−2)/(qα−2q−2α)`; requires `α > 2q/(q−2)`.
    pub fn rho_exponent(&self) -> Result<f64> {
        let Self { q, alpha, .. } = *self;
        let den = q * alpha - 2.0 * q - 2.0 * alpha;
        if !(den > 0.0) {
            return Err(param(format!(
                "density exponent needs alpha > 2q/(q-2) = {}, got alpha = {alpha}",
                2.0 * q / (q - 2.0)
            )));
        }
        Ok(q * (alpha - 2.0) / den)
    }

    pub(crate) fn insert_into(&self, m: &mut BTreeMap<String, f64>) {
        for (k, v) in [("p", self.p), ("q", self.q), ("alpha", self.alpha), ("K", self.k), ("eps", self.eps)] {
            m.insert(k.to_string(), v);
        }
    }
}

pub(crate) fn check_pq_strict(p: f64, q: f64) -> Result<()> {
    if !(1.0..2.0).contains(&p) {
        return Err(param(format!("p must lie in [1, 2), got {p}")));
    }
    let q_max = 2.0 * p / (2.0 - p);
    if !(q > 2.0 && q < q_max) {
        return Err(param(format!("q must satisfy 2 < q < 2p/(2-p) = {q_max}, got {q}")));
    }
    Ok(())
}

pub(crate) fn check_alpha_k(alpha: f64, k: f64) -> Result<()> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(param(format!("K must be finite and >= 1, got {k}")));
    }
    let k2 = k * k;
    let upper = if k2 > 1.0 { 2.0 * k2 / (k2 - 1.0) } else { f64::INFINITY };
    if !(alpha > 2.0 && alpha < upper) {
        return Err(param(format!("alpha must satisfy 2 < alpha < 2K^2/(K^2-1) = {upper}, got {alpha}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundMethod {
    /// `μ(𝔻) / K(Ω, ρ)` with the esssup functional.
    Esssup,
    /// Poincaré–Sobolev route through `L^q(𝔻)` and `K_q`.
    LpKq,
    /// Map-free quasidisc estimate through `C_J` and `‖ρ‖_{L^s}`.
    Quasidisc,
    /// The quasidisc estimate along Gaussian densities `e^{−n|x|²}`.
    GaussianSweep,
    /// Orlicz route through `L^{M_ε}(𝔻)` and `K_{Φ_ε}`.
    Orlicz,
    /// Map-free Orlicz estimate through `C̃_J`.
    OrliczQuasidisc,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 6] = [
        BoundMethod::Esssup,
        BoundMethod::LpKq,
        BoundMethod::Quasidisc,
        BoundMethod::GaussianSweep,
        BoundMethod::Orlicz,
        BoundMethod::OrliczQuasidisc,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            BoundMethod::Esssup => "esssup",
            BoundMethod::LpKq => "lp_kq",
            BoundMethod::Quasidisc => "quasidisc",
            BoundMethod::GaussianSweep => "gaussian_sweep",
            BoundMethod::Orlicz => "orlicz",
            BoundMethod::OrliczQuasidisc => "orlicz_quasidisc",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BoundMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|m| m.tag() == s).ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Conditions that qualify a reported bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundFlag {
    /// The quasidisc constant's `ν` is ≥ 1; `|1 − ν|` was used.
    NuGeOne,
    /// Two constant conventions disagree and the smaller bound was kept.
    ConstantConventionConservative,
    /// `bound_log` is finite but `exp` of it is 0 in `f64`.
    Underflow,
    /// Even `bound_log` overflows; see the `loglog_neg_bound` intermediate.
    IteratedLog,
    /// The esssup grid maxima did not settle under refinement.
    EsssupNotConverged,
    /// `B_{M_ε,2}(𝔻)` is the trial-function lower estimate, so the bound may
    /// over-state the one with the true constant.
    TrialEstimateB,
}

impl BoundFlag {
    pub fn name(&self) -> &'static str {
        match self {
            BoundFlag::NuGeOne => "NuGeOne",
            BoundFlag::ConstantConventionConservative => "ConstantConventionConservative",
            BoundFlag::Underflow => "Underflow",
            BoundFlag::IteratedLog => "IteratedLog",
            BoundFlag::EsssupNotConverged => "EsssupNotConverged",
            BoundFlag::TrialEstimateB => "TrialEstimateB",
        }
    }
}

impl fmt::Display for BoundFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One lower bound on `μ_ρ(Ω)` with everything needed to audit it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub method: BoundMethod,
    /// Natural log of the bound; `-∞` only together with [`BoundFlag::IteratedLog`].
    pub bound_log: f64,
    pub bound: f64,
    pub parameters: BTreeMap<String, f64>,
    pub intermediates: BTreeMap<String, f64>,
    /// Sorted, without duplicates.
    pub flags: Vec<BoundFlag>,
}

impl BoundReport {
    pub(crate) fn new(method: BoundMethod, bound_log: f64) -> Self {
        let mut r = Self {
            method,
            bound_log,
            bound: bound_log.exp(),
            parameters: BTreeMap::new(),
            intermediates: BTreeMap::new(),
            flags: Vec::new(),
        };
        if bound_log.is_finite() && r.bound == 0.0 {
            r.flag(BoundFlag::Underflow);
        }
        r
    }

    pub fn flag(&mut self, f: BoundFlag) {
        if let Err(i) = self.flags.binary_search(&f) {
            self.flags.insert(i, f);
        }
    }

    pub(crate) fn with(mut self, name: &str, value: f64) -> Self {
        self.intermediates.insert(name.to_string(), value);
        self
    }

    pub(crate) fn param(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    /// No qualifying flags: the bound is meant to be checked as is.
    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn intermediate(&self, name: &str) -> Option<f64> {
        self.intermediates.get(name).copied()
    }

    /// Comma-free `;`-separated flag names.
    pub fn flag_list(&self) -> String {
        self.flags.iter().map(BoundFlag::name).collect::<Vec<_>>().join(";")
    }
}
