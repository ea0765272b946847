use super::{psi_of_s, YoungFunction, YoungKind};

const GRID_START: f64 = 1e-12;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

pub(super) fn complementary(y: &YoungFunction) -> YoungFunction {
    match y.kind() {
        YoungKind::PowerP { p, coef } if *p > 1.0 => {
            let q = p / (p - 1.0);
            let c = (p - 1.0) / p * (coef * p).powf(-1.0 / (p - 1.0));
            YoungFunction::from_kind(YoungKind::PowerP { p: q, coef: c })
        }
        YoungKind::LogLinearTilde => YoungFunction::exp_minus_linear(),
        YoungKind::ExpMinusLinear => YoungFunction::log_linear_tilde(),
        YoungKind::NumericComplement { of } => (**of).clone(),
        _ => y.numeric_complement(),
    }
}

/// `sup_{u ≥ 0} (u v - Y(u))`, always a value attained at some `u`, so never
/// above the true supremum.
pub(super) fn conjugate_at(y: &YoungFunction, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    match y.kind() {
        // Ψ is parametrized by s = Φ_ε⁻¹(u); maximizing over s avoids one
        // inversion per evaluation. Ψ vanishes for u ≤ Φ_ε(1), where the
        // objective is linear and peaks at s = 1.
        YoungKind::PsiAlpha { .. } | YoungKind::PsiEpsAlpha { .. } => {
            let (eps, alpha) = y.psi_params().unwrap();
            let phi = |s: f64| s * (s + std::f64::consts::E).ln().powf(eps);
            let h = |x: f64| {
                let s = 1.0 + x;
                phi(s) * v - psi_of_s(eps, alpha, s)
            };
            sup_unimodal(h, phi(1.0) * v)
        }
        _ => sup_unimodal(|u| u * v - y.eval_unchecked(u), 0.0),
    }
}

/// Maximum over `x ≥ 0` of a unimodal `h` with `h(0) = h0`: a doubling grid
/// from `GRID_START` locates the peak, golden-section search refines it.
fn sup_unimodal(h: impl Fn(f64) -> f64, h0: f64) -> f64 {
    let eval = |x: f64| {
        let v = h(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut pts = [(0.0, h0), (0.0, h0)];
    let mut x = GRID_START;
    let (a, b) = loop {
        let hx = eval(x);
        if hx < pts[1].1 {
            break (pts[0].0, x);
        }
        pts = [pts[1], (x, hx)];
        x *= 2.0;
        if !x.is_finite() {
            return f64::INFINITY;
        }
    };
    let best = pts[1].1;
    let (mut a, mut b) = (a, b);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut hc, mut hd) = (eval(c), eval(d));
    let mut best = best.max(hc).max(hd);
    for _ in 0..200 {
        if (b - a) <= 1e-14 * b.abs().max(1e-300) {
            break;
        }
        if hc > hd {
            b = d;
            d = c;
            hd = hc;
            c = b - GOLDEN * (b - a);
            hc = eval(c);
            best = best.max(hc);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + GOLDEN * (b - a);
            hd = eval(d);
            best = best.max(hd);
        }
    }
    best.max(h0)
}
