//! Log-domain helpers.
//!
//! Several constants in this crate are far outside the `f64` range. They are
//! carried as natural logarithms and, where even the logarithm overflows, as
//! iterated logarithms (`ln ln x`).

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^x - 1)` for `x > 0`.
pub fn log_expm1(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x < 1.0 {
        x.exp_m1().ln()
    } else {
        x + (-(-x).exp()).ln_1p()
    }
}

/// `ln(1 - e^{-x})` for `x > 0`.
pub fn log1m_exp_neg(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// `ln(|1 - e^{l}|)` given `l = ln y`.
pub fn log_abs_one_minus_exp(l: f64) -> f64 {
    if l > 0.0 {
        // ln(e^l - 1)
        log_expm1(l)
    } else {
        log1m_exp_neg(-l)
    }
}

/// `ln Σ e^{xᵢ}` with a fixed summation order.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// Given `ll = ln ln X` and a finite `delta`, returns `ln(ln X + delta)`.
///
/// When `ln X` itself overflows, the additive term is below the resolution of
/// `ll` and drops out.
pub fn loglog_add(ll: f64, delta: f64) -> f64 {
    let lnx = ll.exp();
    if lnx.is_finite() {
        (lnx + delta).ln()
    } else {
        ll + (delta * (-ll).exp()).ln_1p()
    }
}

/// `ln X` from `ln ln X`; `+∞` if it does not fit in `f64`.
pub fn ln_from_loglog(ll: f64) -> f64 {
    ll.exp()
}
