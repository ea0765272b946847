//! Numerical probes of the Δ′ / ∇′ growth conditions and of the
//! "essentially greater growth" relation. These are probes on finite grids,
//! not proofs.

use super::YoungFunction;

const UNBOUNDED: f64 = 1e6;
const NABLA_C_MAX: f64 = 1e6;

/// Tensor grid of `(u, v)` pairs, stored as natural logarithms so that
/// scales far beyond `f64` can be probed.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGrid {
    pub ln_u: Vec<f64>,
    pub ln_v: Vec<f64>,
}

impl ProbeGrid {
    /// `n` log-uniform points per axis on `[lo, hi]`.
    pub fn log_uniform(lo: f64, hi: f64, n: usize) -> Self {
        Self::log_uniform_ln(lo.ln(), hi.ln(), n)
    }

    pub fn log_uniform_ln(ln_lo: f64, ln_hi: f64, n: usize) -> Self {
        let axis: Vec<f64> = (0..n).map(|i| ln_lo + (ln_hi - ln_lo) * i as f64 / (n.max(2) - 1) as f64).collect();
        Self { ln_u: axis.clone(), ln_v: axis }
    }
}

impl Default for ProbeGrid {
    /// 40 × 40 points on `[1e-3, 1e3]²`.
    fn default() -> Self {
        Self::log_uniform(1e-3, 1e3, 40)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProbe {
    /// The probed constant, `None` if the condition fails on the grid.
    pub value: Option<f64>,
    /// Natural log of the extreme ratio (Δ′ only; `NaN` for ∇′).
    pub ln_extreme: f64,
    /// Grid points skipped because a term was not finite.
    pub skipped: usize,
}

impl GrowthProbe {
    pub fn unbounded(&self) -> bool {
        self.value.is_none()
    }
}

/// `sup M(uv) / (M(u) M(v))` over the grid; `value` is `None` when the
/// supremum exceeds `1e6`.
pub fn probe_delta_prime(y: &YoungFunction, grid: &ProbeGrid) -> GrowthProbe {
    let mut sup = f64::NEG_INFINITY;
    let mut skipped = 0;
    let lv: Vec<f64> = grid.ln_v.iter().map(|&l| y.log_eval_ln(l)).collect();
    for &lu in &grid.ln_u {
        let a = y.log_eval_ln(lu);
        for (&lnv, &b) in grid.ln_v.iter().zip(&lv) {
            let num = y.log_eval_ln(lu + lnv);
            let r = num - a - b;
            if r.is_finite() {
                sup = sup.max(r);
            } else if r == f64::INFINITY && a.is_finite() && b.is_finite() {
                sup = f64::INFINITY;
            } else {
                skipped += 1;
            }
        }
    }
    let value = sup.exp();
    GrowthProbe { value: (value <= UNBOUNDED).then_some(value), ln_extreme: sup, skipped }
}

/// Smallest `C ∈ [1, 1e6]` with `M(C u v) ≥ M(u) M(v)` on the grid, located by
/// bisection in `ln C`.
pub fn probe_nabla_prime(y: &YoungFunction, grid: &ProbeGrid) -> GrowthProbe {
    let mut pairs = Vec::with_capacity(grid.ln_u.len() * grid.ln_v.len());
    let mut skipped = 0;
    let lv: Vec<f64> = grid.ln_v.iter().map(|&l| y.log_eval_ln(l)).collect();
    for &lu in &grid.ln_u {
        let a = y.log_eval_ln(lu);
        for (&lnv, &b) in grid.ln_v.iter().zip(&lv) {
            let rhs = a + b;
            if rhs == f64::NEG_INFINITY {
                continue;
            }
            if !rhs.is_finite() {
                skipped += 1;
                continue;
            }
            pairs.push((lu + lnv, rhs));
        }
    }
    let holds = |ln_c: f64| {
        pairs.iter().all(|&(luv, rhs)| {
            let lhs = y.log_eval_ln(ln_c + luv);
            lhs >= rhs - 1e-12 * rhs.abs().max(1.0)
        })
    };
    let ln_max = NABLA_C_MAX.ln();
    let value = if holds(0.0) {
        Some(1.0)
    } else if !holds(ln_max) {
        None
    } else {
        let (mut lo, mut hi) = (0.0, ln_max);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi.exp())
    };
    GrowthProbe { value, ln_extreme: f64::NAN, skipped }
}

/// Probe of `Y1 ≺ Y2`: for every `k`, `ln Y1(k u) - ln Y2(u)` must decrease
/// strictly over the top decade `u ∈ [u_max/10, u_max]` and end below
/// `ln 1e-6`. `ln_u_max` is the natural log of `u_max`, so logarithmic kinds
/// can be probed at the astronomically large `u` they need.
pub fn essentially_greater(y1: &YoungFunction, y2: &YoungFunction, k_list: &[f64], ln_u_max: f64) -> bool {
    const SAMPLES: usize = 32;
    assert!(ln_u_max >= 1e3f64.ln(), "u_max must be at least 1e3");
    let ln10 = std::f64::consts::LN_10;
    let target = 1e-6f64.ln();
    k_list.iter().all(|&k| {
        assert!(k > 0.0 && k.is_finite(), "k must be positive");
        let ratios: Vec<f64> = (0..SAMPLES)
            .map(|i| {
                let lu = ln_u_max - ln10 + ln10 * i as f64 / (SAMPLES - 1) as f64;
                let (a1, b1) = y1.log_eval_split(k.ln() + lu);
                let (a2, b2) = y2.log_eval_split(lu);
                (a1 - a2) * lu + a1 * k.ln() + (b1 - b2)
            })
            .collect();
        let monotone = ratios.windows(2).all(|w| w[1] < w[0]);
        monotone && ratios[SAMPLES - 1] < target
    })
}
