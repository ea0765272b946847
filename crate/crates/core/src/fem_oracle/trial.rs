use std::f64::consts::{LN_2, PI};

use crate::conformal::DiskQuadrature;
use crate::error::{param, Result};
use crate::orlicz::{luxemburg_norm, weighted_median, SampledFunction};
use crate::youngfn::YoungFunction;

const N_R: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct BM2Estimate {
    /// Max of the trial ratios, a lower estimate of `B_{M,2}(𝔻)`.
    pub value: f64,
    /// `(label, ‖u − med u‖_M / ‖∇u‖₂)` per trial function.
    pub ratios: Vec<(String, f64)>,
}

fn ratio(values: Vec<f64>, quad: &DiskQuadrature, grad_norm: f64, y: &YoungFunction) -> Result<f64> {
    let f = SampledFunction::new(values, quad.measure().clone())?;
    let med = weighted_median(&f);
    Ok(luxemburg_norm(&f.map(|v| v - med)?, y)? / grad_norm)
}

/// Lower estimate of the Poincaré-type constant in
/// `‖f − med f‖_{L^M(𝔻)} ≤ B ‖∇f‖_{L²(𝔻)}` from trial functions: the
/// coordinate `x`, `y` and the truncated logarithms
/// `min(ln(1/r), ln(1/δ))` with `δ = 2^{-k}`, `k = 1, …, size − 2`.
///
/// Each trial function gets its own quadrature, so the family is nested and
/// the estimate is non-decreasing in `size`.
pub fn b_m2_disk_estimate(trial_family_size: usize, y: &YoungFunction) -> Result<BM2Estimate> {
    if trial_family_size < 8 {
        return Err(param(format!("trial family needs at least 8 members, got {trial_family_size}")));
    }
    let mut ratios = Vec::with_capacity(trial_family_size);
    let plain = DiskQuadrature::new(N_R, 32)?;
    // ‖∇x‖₂ = √π
    let xs: Vec<f64> = plain.nodes().iter().map(|z| z.re).collect();
    let ys: Vec<f64> = plain.nodes().iter().map(|z| z.im).collect();
    ratios.push(("x".to_string(), ratio(xs, &plain, PI.sqrt(), y)?));
    ratios.push(("y".to_string(), ratio(ys, &plain, PI.sqrt(), y)?));
    for k in 1..=(trial_family_size - 2) {
        // panels in t = r² at 4^{-j}, j ≤ k; the kink sits at t = δ² = 4^{-k}
        let quad = DiskQuadrature::graded(k, 4.0, N_R, 8)?;
        let cap = k as f64 * LN_2;
        let vals = quad.nodes().iter().map(|z| (-z.norm().ln()).min(cap)).collect();
        // ‖∇u_δ‖₂² = 2π ln(1/δ)
        let grad = (2.0 * PI * cap).sqrt();
        ratios.push((format!("log_trunc_2^-{k}"), ratio(vals, &quad, grad, y)?));
    }
    let value = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(BM2Estimate { value, ratios })
}
