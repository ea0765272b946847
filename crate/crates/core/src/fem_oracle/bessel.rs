//! Bessel functions of the first kind by power series, adequate for the
//! moderate arguments (|x| < 20) needed here.

fn series(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = (0..nu).fold(1.0, |t, k| t * half / (k + 1) as f64);
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + nu) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

pub fn bessel_j0(x: f64) -> f64 {
    series(0, x)
}

pub fn bessel_j1(x: f64) -> f64 {
    series(1, x)
}

/// `J₁′(x) = J₀(x) − J₁(x)/x`.
pub fn bessel_j1_prime(x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    bessel_j0(x) - bessel_j1(x) / x
}

/// First positive zero of `J₁′`, by bisection on `[1.5, 2.5]`.
pub fn j1_prime_first_zero() -> f64 {
    let (mut lo, mut hi) = (1.5_f64, 2.5_f64);
    debug_assert!(bessel_j1_prime(lo) > 0.0 && bessel_j1_prime(hi) < 0.0);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if bessel_j1_prime(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `μ(𝔻) = (j′₁,₁)²`, the first nonzero Neumann eigenvalue of the unit disk.
pub fn mu_disk_reference() -> f64 {
    let j = j1_prime_first_zero();
    j * j
}
