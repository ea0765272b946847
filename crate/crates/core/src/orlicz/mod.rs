//! Luxemburg and Orlicz norms on discrete weighted measures.

use std::sync::Arc;

use crate::error::{domain, param, Error, Result};
use crate::youngfn::YoungFunction;

/// A finite discrete measure: positive weights attached to quadrature or mesh nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    id: String,
    weights: Vec<f64>,
    total: f64,
}

impl Measure {
    pub fn new(id: impl Into<String>, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(param("measure needs at least one node"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(param(format!("measure weights must be positive and finite, got {w}")));
        }
        let total = neumaier_sum(weights.iter().copied());
        Ok(Self { id: id.into(), weights, total })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Σ wᵢ f(i), summed in node order with compensation.
    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        neumaier_sum(self.weights.iter().enumerate().map(|(i, w)| w * f(i)))
    }

    /// Same nodes, each weight multiplied by `scale[i]`.
    pub fn reweighted(&self, id: impl Into<String>, scale: &[f64]) -> Result<Self> {
        if scale.len() != self.len() {
            return Err(param("reweighting vector has the wrong length"));
        }
        Measure::new(id, self.weights.iter().zip(scale).map(|(w, s)| w * s).collect())
    }
}

/// Values sampled at the nodes of a shared measure.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    values: Vec<f64>,
    measure: Arc<Measure>,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>, measure: Arc<Measure>) -> Result<Self> {
        if values.len() != measure.len() {
            return Err(param(format!(
                "{} samples for measure '{}' with {} nodes",
                values.len(),
                measure.id(),
                measure.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(domain(format!("sampled value is not finite: {v}")));
        }
        Ok(Self { values, measure })
    }

    pub fn constant(c: f64, measure: Arc<Measure>) -> Result<Self> {
        Self::new(vec![c; measure.len()], measure)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn measure(&self) -> &Arc<Measure> {
        &self.measure
    }

    pub fn measure_ref(&self) -> &str {
        self.measure.id()
    }

    pub fn total_measure(&self) -> f64 {
        self.measure.total()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect(), self.measure.clone())
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    /// Σ wᵢ |fᵢ|^p.
    pub fn power_integral(&self, p: f64) -> f64 {
        self.measure.integrate(|i| self.values[i].abs().powf(p))
    }

    /// Plain `L^p` norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.power_integral(p).powf(1.0 / p)
    }
}

/// Neumaier-compensated sum in iteration order.
pub fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0_f64, 0.0_f64);
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

const MAX_EXPANSIONS: usize = 2048;

/// `inf{λ > 0 : Σ wᵢ Y(|fᵢ|/λ) ≤ 1}`.
///
/// The returned λ always satisfies the constraint, so the defining sum at λ
/// is at most 1.
pub fn luxemburg_norm(f: &SampledFunction, y: &YoungFunction) -> Result<f64> {
    let m = f.measure();
    let fmax = f.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if fmax == 0.0 {
        return Ok(0.0);
    }
    // Evaluated at exactly the λ that is returned, so the constraint holds
    // for the reported value and not just for its logarithm.
    let modular = |ln_lambda: f64| -> f64 {
        let lambda = ln_lambda.exp();
        m.integrate(|i| y.eval_unchecked(f.values[i].abs() / lambda))
    };
    let w_min = m.weights().iter().fold(f64::INFINITY, |a, &w| a.min(w));
    let guess = |t: f64| -> f64 {
        match y.inverse(t) {
            Ok(u) if u > 0.0 && u.is_finite() => (fmax / u).ln(),
            _ => fmax.ln(),
        }
    };
    let (mut lo, mut hi) = (guess(1.0 / w_min), guess(1.0 / m.total()));
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut n = 0;
    while modular(hi) > 1.0 {
        hi += 1.0 + (hi - lo);
        n += 1;
        if n > MAX_EXPANSIONS || !hi.is_finite() {
            return Err(Error::Convergence("Luxemburg bracket: no feasible λ found".into()));
        }
    }
    n = 0;
    while modular(lo) <= 1.0 {
        lo -= 1.0 + (hi - lo);
        n += 1;
        if n > MAX_EXPANSIONS || !lo.is_finite() {
            return Err(Error::Convergence("Luxemburg bracket: no infeasible λ found".into()));
        }
    }
    // Bisection in ln λ down to floating-point resolution.
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.exp())
}

/// The Orlicz norm lies in `[lux, 2 lux]`; it is never computed directly.
pub fn orlicz_norm_bracket(f: &SampledFunction, y: &YoungFunction) -> Result<(f64, f64)> {
    let lux = luxemburg_norm(f, y)?;
    Ok((lux, 2.0 * lux))
}

/// `(Σ wᵢ|fᵢgᵢ|, 2‖f‖_Y ‖g‖_{Y*})`.
pub fn holder_pairing(f: &SampledFunction, g: &SampledFunction, y: &YoungFunction) -> Result<(f64, f64)> {
    if !Arc::ptr_eq(f.measure(), g.measure()) && f.measure() != g.measure() {
        return Err(param(format!(
            "Hölder pairing across different measures '{}' and '{}'",
            f.measure_ref(),
            g.measure_ref()
        )));
    }
    let lhs = f.measure().integrate(|i| (f.values[i] * g.values[i]).abs());
    let nf = luxemburg_norm(f, y)?;
    let ng = luxemburg_norm(g, &y.complementary())?;
    Ok((lhs, 2.0 * nf * ng))
}

/// Smallest `t ≥ 0` among `{0} ∪ {fᵢ > 0}` with `|{f > t}| ≤ |Ω|/2`.
pub fn weighted_median(f: &SampledFunction) -> f64 {
    let m = f.measure();
    let half = 0.5 * m.total() * (1.0 + 1e-12);
    let mut pos: Vec<(f64, f64)> =
        f.values.iter().zip(m.weights()).filter(|(v, _)| **v > 0.0).map(|(&v, &w)| (v, w)).collect();
    pos.sort_by(|a, b| b.0.total_cmp(&a.0));
    // Walk distinct values downward; `above` is the mass strictly above `t`.
    let mut best = None;
    let mut above = 0.0;
    let mut i = 0;
    while i < pos.len() {
        let t = pos[i].0;
        if above > half {
            break;
        }
        best = Some(t);
        while i < pos.len() && pos[i].0 == t {
            above += pos[i].1;
            i += 1;
        }
    }
    if above <= half {
        return 0.0;
    }
    best.unwrap_or(0.0)
}
