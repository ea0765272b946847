use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use super::constants::{b_qp_disk, log_c_j, mu_pq_disk_bracket, LogCJ};
use super::functionals::{k_esssup, k_phi, k_q, log_rho_norm};
use super::{check_pq_strict, BoundFlag, BoundMethod, BoundReport, ScenarioParams};
use crate::conformal::{image_area, ConformalMap, DensityField, DiskQuadrature};
use crate::error::{param, Error, Result};
use crate::fem_oracle::mu_disk_reference;
use crate::logspace::loglog_add;
use crate::orlicz::{luxemburg_norm, SampledFunction};
use crate::youngfn::{probe_nabla_prime, ProbeGrid, YoungFunction};

/// Slack for comparing a quadrature value against an analytic majorant.
const ROUNDOFF: f64 = 1e-12;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(param(format!("{name} must be finite and positive, got {v}")))
    }
}

/// `μ(𝔻) / K(Ω, ρ)`, with `μ(𝔻) = (j′₁,₁)²` from the Bessel root.
pub fn mu_lower_esssup(map: &ConformalMap, rho: &DensityField, quad: &DiskQuadrature) -> Result<BoundReport> {
    let est = k_esssup(map, rho, quad)?;
    let mu_d = mu_disk_reference();
    let mut r = BoundReport::new(BoundMethod::Esssup, mu_d.ln() - est.value.ln())
        .with("K", est.value)
        .with("K_grid_0", est.grid_maxima[0])
        .with("K_grid_1", est.grid_maxima[1])
        .with("K_grid_2", est.grid_maxima[2])
        .with("mu_disk", mu_d);
    if let Some(a) = est.aitken {
        r = r.with("K_aitken", a);
    }
    if est.stalled {
        r.flag(BoundFlag::EsssupNotConverged);
    }
    Ok(r)
}

/// `1 / (π^{2(2−p)/p} B²_{q,p} K_q)` as `bound`; the weaker
/// `μ_{p,q}(𝔻)⁻ / (2^{2p} π^{2(2−p)/p} K_q)` rides along as `bound_theorem`.
pub fn mu_lower_kq(
    map: &ConformalMap,
    rho: &DensityField,
    p: f64,
    q: f64,
    quad: &DiskQuadrature,
) -> Result<BoundReport> {
    check_pq_strict(p, q)?;
    let kq = k_q(map, rho, q, quad)?;
    let b = b_qp_disk(p, q)?;
    let (lo, hi) = mu_pq_disk_bracket(p, q)?;
    let log_pi_pow = 2.0 * (2.0 - p) / p * PI.ln();
    let sharp = -log_pi_pow - 2.0 * b.ln() - kq.ln();
    let theorem = lo.ln() - 2.0 * p * LN_2 - log_pi_pow - kq.ln();
    Ok(BoundReport::new(BoundMethod::LpKq, sharp)
        .param("p", p)
        .param("q", q)
        .with("K_q", kq)
        .with("B_qp", b)
        .with("mu_pq_lo", lo)
        .with("mu_pq_hi", hi)
        .with("bound_log_theorem", theorem)
        .with("bound_theorem", theorem.exp()))
}

/// Shared tail of the quasidisc estimate once `ln ‖ρ‖_{L^s}` is known.
fn quasidisc_report(method: BoundMethod, params: &ScenarioParams, log_rho: f64, cj: &LogCJ) -> BoundReport {
    let ScenarioParams { p, q, alpha, .. } = *params;
    let kappa = params.kappa();
    let terms = [
        ("term_log_4", -(4f64.ln())),
        ("term_pi", -(2.0 * (p - 2.0) / p - 2.0 * kappa) * PI.ln()),
        ("term_kappa", -(2.0 - 2.0 * kappa) * ((1.0 - kappa) / (0.5 - kappa)).ln()),
        ("term_rho", -(q - 2.0) / q * log_rho),
        ("term_C_J", -(2.0 * alpha / (q * (alpha - 2.0))) * cj.value),
    ];
    let mut r = BoundReport::new(method, terms.iter().map(|t| t.1).sum());
    params.insert_into(&mut r.parameters);
    for (name, v) in terms {
        r.intermediates.insert(name.to_string(), v);
    }
    r = r
        .with("kappa", kappa)
        .with("log_rho_norm", log_rho)
        .with("log_C_J", cj.value)
        .with("log_nu", cj.log_nu)
        .with("log_C_alpha", cj.log_c_alpha);
    for &f in &cj.flags {
        r.flag(f);
    }
    r
}

fn quasidisc_setup(map: &ConformalMap, params: &ScenarioParams, quad: &DiskQuadrature) -> Result<(f64, LogCJ)> {
    params.validate()?;
    params.check_compact()?;
    params.check_quasidisc()?;
    let s = params.rho_exponent()?;
    let cj = log_c_j(params.alpha, params.k, image_area(map, quad))?;
    Ok((s, cj))
}

/// Map-free estimate through `C_J(α, K, |Ω|)` and `‖ρ‖_{L^s(Ω)}`,
/// `s = q(α−2)/(qα−2q−2α)`. Only `|Ω|` and the norm of ρ are taken from `map`.
pub fn mu_lower_quasidisc(
    map: &ConformalMap,
    rho: &DensityField,
    params: &ScenarioParams,
    quad: &DiskQuadrature,
) -> Result<BoundReport> {
    let (s, cj) = quasidisc_setup(map, params, quad)?;
    let log_rho = log_rho_norm(map, rho, s, quad)?;
    Ok(quasidisc_report(BoundMethod::Quasidisc, params, log_rho, &cj).with("s", s))
}

/// The quasidisc estimate for `ρ_n = e^{−n|x|²}`, one report per `n`.
///
/// Each `‖ρ_n‖_{L^s(Ω)}` is checked against `(π/(ns))^{1/s}`, the value of
/// the same integral over the whole plane; exceeding it is an error.
pub fn gaussian_sweep(
    map: &ConformalMap,
    n_list: &[f64],
    params: &ScenarioParams,
    quad: &DiskQuadrature,
) -> Result<Vec<BoundReport>> {
    let (s, cj) = quasidisc_setup(map, params, quad)?;
    let q = params.q;
    n_list
        .iter()
        .map(|&n| {
            if !(n >= 1.0 && n.is_finite()) {
                return Err(param(format!("Gaussian sweep needs n >= 1, got {n}")));
            }
            let log_rho = log_rho_norm(map, &DensityField::Gaussian { n }, s, quad)?;
            let log_analytic = (PI / (n * s)).ln() / s;
            if log_rho > log_analytic + ROUNDOFF {
                return Err(Error::Convergence(format!(
                    "quadrature norm of the Gaussian n = {n} exceeds its whole-plane value: \
                     ln {log_rho} > ln {log_analytic}"
                )));
            }
            Ok(quasidisc_report(BoundMethod::GaussianSweep, params, log_rho, &cj)
                .param("n", n)
                .with("s", s)
                .with("log_rho_norm_analytic", log_analytic)
                .with("rho_domination", ((q - 2.0) / q * log_analytic).exp()))
        })
        .collect()
}

/// Least-squares slope of `bound_log` against `ln n` over a sweep.
pub fn sweep_slope(reports: &[BoundReport]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        reports.iter().filter_map(|r| Some((r.parameters.get("n")?.ln(), r.bound_log))).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `1 / (18 B² K_{Φ_ε})` with `Φ_ε = u log^ε(u + e)`.
///
/// The constant 18 comes from the `3√2` form of the Poincaré estimate; the
/// `2√3` form would give 12 and a larger bound. Both are reported.
pub fn mu_lower_orlicz(
    map: &ConformalMap,
    rho: &DensityField,
    eps: f64,
    b_m_eps: f64,
    quad: &DiskQuadrature,
) -> Result<BoundReport> {
    if !(eps > 1.0 && eps.is_finite()) {
        return Err(param(format!("eps must be finite and > 1, got {eps}")));
    }
    check_positive("B_M_eps", b_m_eps)?;
    let phi = YoungFunction::log_pow(eps)?;
    let kphi = k_phi(map, rho, &phi, quad)?;
    let base = 2.0 * b_m_eps.ln() + kphi.ln();
    let mut r = BoundReport::new(BoundMethod::Orlicz, -(18f64.ln()) - base)
        .param("eps", eps)
        .param("B_M_eps", b_m_eps)
        .with("K_Phi", kphi)
        .with("bound_12", (-(12f64.ln()) - base).exp())
        .with("poincare_3sqrt2", 3.0 * 2f64.sqrt() * b_m_eps * kphi.sqrt())
        .with("poincare_2sqrt3", 2.0 * 3f64.sqrt() * b_m_eps * kphi.sqrt());
    r.flag(BoundFlag::ConstantConventionConservative);
    Ok(r)
}

/// `C̃_J(α, K, |Ω|) = 288 C_Ψ / Φ_ε⁻¹(1/Ψ_ε(X))`, `X = (α/(α−2))^{(α−2)/2} C_J^{α/2}`,
/// carried as `ln ln C̃_J`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogCTildeJ {
    /// `ln ln C̃_J`.
    pub loglog: f64,
    /// `ln C̃_J`; `+∞` when it does not fit in `f64`.
    pub log_value: f64,
    pub c_j: LogCJ,
    /// `ln X`.
    pub log_x: f64,
    /// `ln ln Ψ_ε(X)`.
    pub loglog_psi: f64,
    pub log_288: f64,
    /// ∇′ constant of `Ψ_ε`, probed on a grid.
    pub c_psi: f64,
    /// `ln t − ln Φ_ε⁻¹(t)` at `t = 1/Ψ_ε(X)`; ≥ 0 and negligible once `Ψ_ε(X)` is huge.
    pub inverse_gap: f64,
}

impl LogCTildeJ {
    /// `ln ln C̃_J` rebuilt from the stored pieces.
    pub fn recompose(&self) -> f64 {
        loglog_add(self.loglog_psi, self.log_288 + self.c_psi.ln() + self.inverse_gap)
    }
}

pub fn log_c_tilde_j(alpha: f64, k: f64, eps: f64, area: f64) -> Result<LogCTildeJ> {
    let c_j = log_c_j(alpha, k, area)?;
    let psi = YoungFunction::psi_eps(eps, alpha)?;
    let c_psi = probe_nabla_prime(&psi, &ProbeGrid::default())
        .value
        .ok_or_else(|| Error::Probe(format!("no nabla' constant for Psi(eps = {eps}, alpha = {alpha}) up to 1e6")))?;
    let log_x = (alpha - 2.0) / 2.0 * (alpha / (alpha - 2.0)).ln() + alpha / 2.0 * c_j.value;
    let loglog_psi = psi
        .psi_loglog_from_log(log_x)
        .ok_or_else(|| param(format!("Psi(X) <= e at ln X = {log_x}; C_J is too small for this route")))?;
    let ln_psi = loglog_psi.exp();
    let phi = YoungFunction::log_pow(eps)?;
    let inverse_gap = if ln_psi.is_finite() { -ln_psi - phi.log_inverse(-ln_psi)? } else { 0.0 };
    let log_288 = 288f64.ln();
    let mut out = LogCTildeJ { loglog: 0.0, log_value: 0.0, c_j, log_x, loglog_psi, log_288, c_psi, inverse_gap };
    out.loglog = out.recompose();
    out.log_value = out.loglog.exp();
    Ok(out)
}

/// `Φ_ε⁻¹(1/‖Φ_ε(ρ)‖_{L^{Ψ_ε*}(Ω)}) / (C̃_J B²)`, with the complement of
/// `Ψ_ε` taken numerically.
pub fn mu_lower_orlicz_quasidisc(
    map: &ConformalMap,
    rho: &DensityField,
    params: &ScenarioParams,
    b_m_eps: f64,
    quad: &DiskQuadrature,
) -> Result<BoundReport> {
    params.validate()?;
    params.check_quasidisc()?;
    check_positive("B_M_eps", b_m_eps)?;
    let ScenarioParams { alpha, k, eps, .. } = *params;
    let ct = log_c_tilde_j(alpha, k, eps, image_area(map, quad))?;

    let phi = YoungFunction::log_pow(eps)?;
    let psi_star = YoungFunction::psi_eps(eps, alpha)?.numeric_complement();
    let mut vals = Vec::with_capacity(quad.len());
    let mut jac = Vec::with_capacity(quad.len());
    for &z in quad.nodes() {
        vals.push(phi.eval(rho.at_preimage(map, z)?)?);
        jac.push(map.jacobian_unchecked(z));
    }
    let id = format!("{}*J[{}]", quad.measure().id(), map.label());
    let measure = Arc::new(quad.measure().reweighted(id, &jac)?);
    let norm = luxemburg_norm(&SampledFunction::new(vals, measure)?, &psi_star)?;
    let log_phi_inv = phi.log_inverse(-norm.ln())?;

    // −ln μ-bound = ln C̃_J + 2 ln B − ln Φ_ε⁻¹(1/N)
    let rest = 2.0 * b_m_eps.ln() - log_phi_inv;
    let (bound_log, loglog_neg) = if ct.log_value.is_finite() {
        let neg = ct.log_value + rest;
        (-neg, neg.ln())
    } else {
        let ll = loglog_add(ct.loglog, rest);
        let neg = ll.exp();
        (if neg.is_finite() { -neg } else { f64::NEG_INFINITY }, ll)
    };
    let mut r = BoundReport::new(BoundMethod::OrliczQuasidisc, bound_log)
        .param("B_M_eps", b_m_eps)
        .with("loglog_C_tilde_J", ct.loglog)
        .with("log_C_J", ct.c_j.value)
        .with("log_X", ct.log_x)
        .with("loglog_psi", ct.loglog_psi)
        .with("C_psi", ct.c_psi)
        .with("inverse_gap", ct.inverse_gap)
        .with("norm_phi_rho", norm)
        .with("log_phi_inv_norm", log_phi_inv);
    params.insert_into(&mut r.parameters);
    if ct.log_value.is_finite() {
        r = r.with("log_C_tilde_J", ct.log_value);
    }
    if loglog_neg.is_finite() {
        r = r.with("loglog_neg_bound", loglog_neg);
    }
    if bound_log == f64::NEG_INFINITY {
        r.flag(BoundFlag::IteratedLog);
        r.bound = 0.0;
    }
    for &f in &ct.c_j.flags {
        r.flag(f);
    }
    r.flag(BoundFlag::ConstantConventionConservative);
    Ok(r)
}
