//! Young functions: evaluation, log-space twins, inverses and complements.
//!
//! Every kind evaluates both linearly ([`YoungFunction::eval`]) and as a
//! logarithm of the value taken at a logarithmic argument
//! ([`YoungFunction::log_eval_ln`]). The latter never overflows and is what
//! the growth probes and the huge-constant pipelines are built on.

mod conjugate;
mod growth;

pub use growth::{essentially_greater, probe_delta_prime, probe_nabla_prime, GrowthProbe, ProbeGrid};

use std::f64::consts::E;

use crate::error::{domain, param, Error, Result};
use crate::logspace::{log_add_exp, log_expm1};

/// Below this value a linear-scale inverse would lose all precision.
const TINY_T: f64 = 1e-300;
const MAX_DOUBLINGS: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
pub enum YoungKind {
    /// `coef · u^p`; the classical normalization is `coef = 1/p`.
    PowerP { p: f64, coef: f64 },
    /// `e^{u²} - 1`.
    ExpSquare,
    /// `e^{u^{2/ε}} - 1`; `ε = 2` is `e^u - 1`.
    ExpPow { eps: f64 },
    /// `u log(u + e)`.
    LogLinear,
    /// `(1 + u) log(1 + u) - u`, the conjugate of `e^u - 1 - u`.
    LogLinearTilde,
    /// `e^u - 1 - u`.
    ExpMinusLinear,
    /// `u log^ε(u + e)`.
    LogPow { eps: f64 },
    /// `(2/α) (s (e^s - e))^{(α-2)/2}` with `s = Φ⁻¹(t)`, zero while `s ≤ 1`.
    PsiAlpha { alpha: f64 },
    /// Same with `Φ_ε` and `e^{s^{1/ε}}`.
    PsiEpsAlpha { eps: f64, alpha: f64 },
    /// `sup_u (u v - Y(u))` evaluated numerically.
    NumericComplement { of: Box<YoungFunction> },
    /// Piecewise-linear interpolation through `(u, Y(u))` knots, extended
    /// linearly with the last slope.
    Custom { table: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct YoungFunction {
    kind: YoungKind,
    delta_prime_constant: Option<f64>,
    nabla_prime_constant: Option<f64>,
}

impl YoungFunction {
    fn from_kind(kind: YoungKind) -> Self {
        let delta_prime_constant = match &kind {
            YoungKind::PowerP { coef, .. } => Some(1.0 / coef),
            YoungKind::LogLinear => Some(2.0),
            _ => None,
        };
        Self { kind, delta_prime_constant, nabla_prime_constant: None }
    }

    /// `u^p / p`.
    pub fn power(p: f64) -> Result<Self> {
        Self::power_with_coef(p, 1.0 / p)
    }

    pub fn power_with_coef(p: f64, coef: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(param(format!("power exponent must be >= 1, got {p}")));
        }
        if !(coef > 0.0 && coef.is_finite()) {
            return Err(param(format!("power coefficient must be positive, got {coef}")));
        }
        Ok(Self::from_kind(YoungKind::PowerP { p, coef }))
    }

    pub fn exp_square() -> Self {
        Self::from_kind(YoungKind::ExpSquare)
    }

    /// `e^{u^{2/ε}} - 1`. Convex only for `ε ≤ 2`; larger `ε` gives a
    /// function that is convex for large `u` only.
    pub fn exp_pow(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(param(format!("ExpPow needs eps > 0, got {eps}")));
        }
        Ok(Self::from_kind(YoungKind::ExpPow { eps }))
    }

    pub fn log_linear() -> Self {
        Self::from_kind(YoungKind::LogLinear)
    }

    pub fn log_linear_tilde() -> Self {
        Self::from_kind(YoungKind::LogLinearTilde)
    }

    pub fn exp_minus_linear() -> Self {
        Self::from_kind(YoungKind::ExpMinusLinear)
    }

    pub fn log_pow(eps: f64) -> Result<Self> {
        if !(eps >= 1.0 && eps.is_finite()) {
            return Err(param(format!("LogPow needs eps >= 1, got {eps}")));
        }
        Ok(Self::from_kind(YoungKind::LogPow { eps }))
    }

    pub fn psi(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::from_kind(YoungKind::PsiAlpha { alpha }))
    }

    pub fn psi_eps(eps: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(eps >= 1.0 && eps.is_finite()) {
            return Err(param(format!("PsiEpsAlpha needs eps >= 1, got {eps}")));
        }
        Ok(Self::from_kind(YoungKind::PsiEpsAlpha { eps, alpha }))
    }

    /// Knots must start at `(0, 0)`, be strictly increasing in `u` and have
    /// non-decreasing, eventually positive slopes.
    pub fn custom(table: Vec<(f64, f64)>) -> Result<Self> {
        if table.len() < 2 || table[0] != (0.0, 0.0) {
            return Err(param("custom Young table must start at (0, 0) and have >= 2 knots"));
        }
        let mut last_slope = 0.0;
        for w in table.windows(2) {
            let (du, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            if !(du > 0.0) || !dy.is_finite() {
                return Err(param("custom Young table knots must be strictly increasing"));
            }
            let slope = dy / du;
            if slope < last_slope - 1e-12 * slope.abs().max(1.0) {
                return Err(param("custom Young table is not convex"));
            }
            last_slope = slope;
        }
        if last_slope <= 0.0 {
            return Err(param("custom Young table must grow without bound"));
        }
        Ok(Self::from_kind(YoungKind::Custom { table }))
    }

    pub fn kind(&self) -> &YoungKind {
        &self.kind
    }

    pub fn delta_prime_constant(&self) -> Option<f64> {
        self.delta_prime_constant
    }

    pub fn nabla_prime_constant(&self) -> Option<f64> {
        self.nabla_prime_constant
    }

    pub fn with_nabla_prime_constant(mut self, c: f64) -> Self {
        self.nabla_prime_constant = Some(c);
        self
    }

    /// `(ε, α)` for the Ψ family.
    fn psi_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            YoungKind::PsiAlpha { alpha } => Some((1.0, alpha)),
            YoungKind::PsiEpsAlpha { eps, alpha } => Some((eps, alpha)),
            _ => None,
        }
    }

    /// `ε` for the `u log^ε(u + e)` family.
    fn log_pow_eps(&self) -> Option<f64> {
        match self.kind {
            YoungKind::LogLinear => Some(1.0),
            YoungKind::LogPow { eps } => Some(eps),
            _ => None,
        }
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        check_arg(u)?;
        Ok(self.eval_unchecked(u))
    }

    pub(crate) fn eval_unchecked(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        match &self.kind {
            YoungKind::PowerP { p, coef } => coef * u.powf(*p),
            YoungKind::ExpSquare => (u * u).exp_m1(),
            YoungKind::ExpPow { eps } => u.powf(2.0 / eps).exp_m1(),
            YoungKind::LogLinear => u * (u + E).ln(),
            YoungKind::LogPow { eps } => u * (u + E).ln().powf(*eps),
            YoungKind::LogLinearTilde => log_linear_tilde(u),
            YoungKind::ExpMinusLinear => exp_minus_linear(u),
            YoungKind::PsiAlpha { .. } | YoungKind::PsiEpsAlpha { .. } => {
                let (eps, alpha) = self.psi_params().unwrap();
                let s = log_pow_inverse(eps, u);
                psi_of_s(eps, alpha, s)
            }
            YoungKind::NumericComplement { of } => conjugate::conjugate_at(of, u),
            YoungKind::Custom { table } => custom_eval(table, u),
        }
    }

    /// `ln Y(u)`; `-∞` where `Y(u) = 0`.
    pub fn log_eval(&self, u: f64) -> Result<f64> {
        check_arg(u)?;
        if u == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.log_eval_ln(u.ln()))
    }

    /// `ln Y(e^{ln_u})`. Finite for any finite `ln_u` on the exponential and
    /// logarithmic kinds, which makes it usable far outside the `f64` range
    /// of `u` itself.
    pub fn log_eval_ln(&self, ln_u: f64) -> f64 {
        if ln_u == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        match &self.kind {
            YoungKind::PowerP { p, coef } => coef.ln() + p * ln_u,
            YoungKind::ExpSquare => log_expm1((2.0 * ln_u).exp()),
            YoungKind::ExpPow { eps } => log_expm1((2.0 / eps * ln_u).exp()),
            YoungKind::LogLinear => ln_u + log_add_exp(ln_u, 1.0).ln(),
            YoungKind::LogPow { eps } => ln_u + eps * log_add_exp(ln_u, 1.0).ln(),
            YoungKind::LogLinearTilde => {
                let u = ln_u.exp();
                if u.is_finite() && u < 1e300 {
                    log_linear_tilde(u).ln()
                } else {
                    // (1+u)ln(1+u) - u = u ln u (1 + O(1/ln u))
                    ln_u + (ln_u - 1.0).ln()
                }
            }
            YoungKind::ExpMinusLinear => {
                let u = ln_u.exp();
                if u < 30.0 {
                    exp_minus_linear(u).ln()
                } else {
                    u + (-(1.0 + u) * (-u).exp()).ln_1p()
                }
            }
            YoungKind::PsiAlpha { .. } | YoungKind::PsiEpsAlpha { .. } => {
                let (eps, alpha) = self.psi_params().unwrap();
                let ln_s = log_pow_log_inverse(eps, ln_u);
                log_psi_of_ln_s(eps, alpha, ln_s)
            }
            YoungKind::NumericComplement { .. } | YoungKind::Custom { .. } => self.eval_unchecked(ln_u.exp()).ln(),
        }
    }

    /// `ln Y(e^{ln_u})` written as `a · ln_u + b`, with `b` computed without
    /// the cancellation a direct difference of two huge logs would suffer.
    pub(crate) fn log_eval_split(&self, ln_u: f64) -> (f64, f64) {
        match &self.kind {
            YoungKind::PowerP { p, coef } => (*p, coef.ln()),
            YoungKind::LogLinear => (1.0, log_add_exp(ln_u, 1.0).ln()),
            YoungKind::LogPow { eps } => (1.0, eps * log_add_exp(ln_u, 1.0).ln()),
            _ => (0.0, self.log_eval_ln(ln_u)),
        }
    }

    /// `ln ln Ψ(t)` from `ln t`, for the Ψ family. Finite even when `ln Ψ(t)`
    /// overflows. Returns `None` for other kinds or when `Ψ(t) ≤ e`.
    pub fn psi_loglog_from_log(&self, ln_t: f64) -> Option<f64> {
        let (eps, alpha) = self.psi_params()?;
        let ln_s = log_pow_log_inverse(eps, ln_t);
        let c = (alpha - 2.0) / 2.0;
        let w = (ln_s / eps).exp();
        if w.is_finite() && w < 1e290 {
            let ln_psi = log_psi_of_ln_s(eps, alpha, ln_s);
            return (ln_psi > 0.0).then(|| ln_psi.ln());
        }
        // ln Ψ = c w + R, R = ln(2/α) + c ln s + c ln(1 - e^{1-w}), w ≫ 1
        let r = (2.0 / alpha).ln() + c * ln_s;
        Some(c.ln() + ln_s / eps + (r * (-ln_s / eps).exp() / c).ln_1p())
    }

    pub fn inverse(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(domain(format!("inverse argument must be finite and >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        if t < TINY_T && self.log_pow_eps().is_some() {
            return Ok(self.log_inverse(t.ln())?.exp());
        }
        if let Some(eps) = self.log_pow_eps() {
            return Ok(log_pow_inverse(eps, t));
        }
        let mut hi = 1.0_f64;
        let mut n = 0;
        while self.eval_unchecked(hi) < t {
            hi *= 2.0;
            n += 1;
            if n > MAX_DOUBLINGS || !hi.is_finite() {
                return Err(Error::Convergence(format!("no bracket for inverse of {t}")));
            }
        }
        let mut lo = hi / 2.0;
        while lo > 0.0 && self.eval_unchecked(lo) >= t {
            hi = lo;
            lo /= 2.0;
        }
        Ok(bisect_increasing(|u| self.eval_unchecked(u), t, lo, hi))
    }

    /// `ln Y⁻¹(e^{ln_t})`, bisection in `ln u`.
    pub fn log_inverse(&self, ln_t: f64) -> Result<f64> {
        if ln_t.is_nan() || ln_t == f64::INFINITY {
            return Err(domain(format!("log-inverse argument must be finite, got {ln_t}")));
        }
        if ln_t == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        if let Some(eps) = self.log_pow_eps() {
            return Ok(log_pow_log_inverse(eps, ln_t));
        }
        let f = |l: f64| self.log_eval_ln(l);
        let (lo, hi) = bracket_log(&f, ln_t)?;
        Ok(bisect_increasing(f, ln_t, lo, hi))
    }

    /// Closed-form complement where one is registered, numerical otherwise.
    pub fn complementary(&self) -> YoungFunction {
        conjugate::complementary(self)
    }

    /// Always the numerical complement, even where a closed form exists.
    pub fn numeric_complement(&self) -> YoungFunction {
        YoungFunction::from_kind(YoungKind::NumericComplement { of: Box::new(self.clone()) })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(param(format!("Psi needs alpha > 2, got {alpha}")));
    }
    Ok(())
}

fn check_arg(u: f64) -> Result<()> {
    if !u.is_finite() || u < 0.0 {
        return Err(domain(format!("Young function argument must be finite and >= 0, got {u}")));
    }
    Ok(())
}

fn log_linear_tilde(u: f64) -> f64 {
    if u < 1e-3 {
        // u²/2 - u³/6 + u⁴/12 - u⁵/20
        let u2 = u * u;
        u2 * (0.5 - u / 6.0 + u2 / 12.0 - u2 * u / 20.0)
    } else {
        (1.0 + u) * u.ln_1p() - u
    }
}

fn exp_minus_linear(u: f64) -> f64 {
    if u < 1e-2 {
        // u²/2 + u³/6 + u⁴/24 + u⁵/120 + u⁶/720
        let u2 = u * u;
        u2 * (0.5 + u / 6.0 + u2 / 24.0 + u2 * u / 120.0 + u2 * u2 / 720.0)
    } else {
        u.exp_m1() - u
    }
}

fn custom_eval(table: &[(f64, f64)], u: f64) -> f64 {
    let i = table.partition_point(|&(x, _)| x <= u);
    let (a, b) =
        if i >= table.len() { (table[table.len() - 2], table[table.len() - 1]) } else { (table[i - 1], table[i]) };
    a.1 + (b.1 - a.1) / (b.0 - a.0) * (u - a.0)
}

/// Value of Ψ at `t = Φ_ε(s)`.
pub(crate) fn psi_of_s(eps: f64, alpha: f64, s: f64) -> f64 {
    if s <= 1.0 {
        return 0.0;
    }
    let w = s.powf(1.0 / eps);
    let inner = s * E * (w - 1.0).exp_m1();
    2.0 / alpha * inner.powf((alpha - 2.0) / 2.0)
}

fn log_psi_of_ln_s(eps: f64, alpha: f64, ln_s: f64) -> f64 {
    if ln_s <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let w = (ln_s / eps).exp();
    // ln(e^w - e) = 1 + ln(e^{w-1} - 1)
    (2.0 / alpha).ln() + (alpha - 2.0) / 2.0 * (ln_s + 1.0 + log_expm1(w - 1.0))
}

/// `Φ_ε⁻¹(t)` for `Φ_ε(u) = u log^ε(u + e)` by bisection.
pub(crate) fn log_pow_inverse(eps: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t < TINY_T || t > 1e300 {
        return log_pow_log_inverse(eps, t.ln()).exp();
    }
    let phi = |u: f64| u * (u + E).ln().powf(eps);
    // Φ_ε(u) ≥ u, and Φ_ε(u) ≤ u (1 + u)^ε · const, so u ∈ [t / (ln(t+e))^ε / 2, t].
    let hi = t;
    let lo = t / (t + E).ln().powf(eps) / 2.0;
    bisect_increasing(phi, t, lo, hi)
}

/// `ln Φ_ε⁻¹(e^{ln_t})`: solves `ℓ + ε ln ln(e^ℓ + e) = ln_t` in `ℓ`.
pub(crate) fn log_pow_log_inverse(eps: f64, ln_t: f64) -> f64 {
    if ln_t == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let f = |l: f64| l + eps * log_add_exp(l, 1.0).ln();
    // The correction term is >= 0, so ℓ <= ln_t.
    let hi = ln_t;
    let mut lo = ln_t - eps * log_add_exp(ln_t, 1.0).ln().max(0.0) - 1.0;
    let mut step = 1.0;
    while f(lo) > ln_t {
        lo -= step;
        step *= 2.0;
    }
    bisect_increasing(f, ln_t, lo, hi)
}

/// Expands a bracket `[lo, hi]` in log-argument space with `f(lo) < target <= f(hi)`.
fn bracket_log(f: &impl Fn(f64) -> f64, target: f64) -> Result<(f64, f64)> {
    let mut hi = 0.0;
    let mut step = 1.0;
    let mut n = 0;
    while !(f(hi) >= target) {
        hi += step;
        step *= 2.0;
        n += 1;
        if n > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::Convergence(format!("no log bracket for target {target}")));
        }
    }
    let mut lo = hi - 1.0;
    let mut step = 1.0;
    let mut n = 0;
    while f(lo) >= target {
        lo -= step;
        step *= 2.0;
        n += 1;
        if n > MAX_DOUBLINGS || !lo.is_finite() {
            return Err(Error::Convergence(format!("no lower log bracket for target {target}")));
        }
    }
    Ok((lo, hi))
}

/// Bisection for `f(x) = target` with `f` non-decreasing, `f(lo) < target <= f(hi)`.
/// Runs to floating-point resolution and returns the upper end.
pub(crate) fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..4096 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
