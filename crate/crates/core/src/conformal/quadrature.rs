use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orlicz::{neumaier_sum, Measure};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre_with_derivative(n, t).1;
        let wt = 2.0 / ((1.0 - t * t) * dp * dp);
        x[n - 1 - i] = t;
        x[i] = -t;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (t * p1 - p0) / (t * t - 1.0))
}

/// Tensor rule on the unit disk: Gauss–Legendre in `t = r²` on one or more
/// panels, midpoint rule in θ. Weights sum to π.
#[derive(Debug, Clone)]
pub struct DiskQuadrature {
    nodes: Vec<Complex64>,
    measure: Arc<Measure>,
    n_r: usize,
    n_theta: usize,
}

pub fn build_disk_quadrature(n_r: usize, n_theta: usize) -> Result<DiskQuadrature> {
    DiskQuadrature::new(n_r, n_theta)
}

impl DiskQuadrature {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        Self::paneled(&[0.0, 1.0], n_r, n_theta)
    }

    /// Composite rule with Gauss panels between consecutive `t = r²` breakpoints.
    pub fn paneled(breaks: &[f64], n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 4 || n_theta < 8 {
            return Err(Error::Config(format!(
                "disk quadrature needs n_r >= 4 and n_theta >= 8, got ({n_r}, {n_theta})"
            )));
        }
        let ok = breaks.len() >= 2
            && breaks[0] == 0.0
            && *breaks.last().unwrap() == 1.0
            && breaks.windows(2).all(|b| b[1] > b[0]);
        if !ok {
            return Err(Error::Config("panel breakpoints must increase from 0 to 1".into()));
        }
        let (gx, gw) = gauss_legendre(n_r);
        let mut radial = Vec::with_capacity(n_r * (breaks.len() - 1));
        for b in breaks.windows(2) {
            let half = 0.5 * (b[1] - b[0]);
            for (x, w) in gx.iter().zip(&gw) {
                let t = b[0] + half * (x + 1.0);
                // dA = r dr dθ = dt dθ / 2
                radial.push((t.sqrt(), 0.5 * half * w));
            }
        }
        let dtheta = TAU / n_theta as f64;
        let mut nodes = Vec::with_capacity(radial.len() * n_theta);
        let mut weights = Vec::with_capacity(radial.len() * n_theta);
        for &(r, wr) in &radial {
            for j in 0..n_theta {
                nodes.push(Complex64::from_polar(r, dtheta * (j as f64 + 0.5)));
                weights.push(wr * dtheta);
            }
        }
        let id = if breaks.len() == 2 {
            format!("disk-gl{n_r}x{n_theta}")
        } else {
            format!("disk-gl{n_r}x{n_theta}-p{}", breaks.len() - 1)
        };
        let measure = Arc::new(Measure::new(id, weights)?);
        Ok(Self { nodes, measure, n_r: radial.len(), n_theta })
    }

    /// Panels at `t = ratio^{-k}`, `k = 0..levels`, refining toward the centre.
    pub fn graded(levels: usize, ratio: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        let mut breaks: Vec<f64> = (0..=levels).rev().map(|k| ratio.powi(-(k as i32))).collect();
        breaks.insert(0, 0.0);
        Self::paneled(&breaks, n_r, n_theta)
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        self.measure.weights()
    }

    pub fn measure(&self) -> &Arc<Measure> {
        &self.measure
    }

    /// (radial nodes in total, angular nodes).
    pub fn orders(&self) -> (usize, usize) {
        (self.n_r, self.n_theta)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Complex64) -> f64) -> f64 {
        neumaier_sum(self.nodes.iter().zip(self.weights()).map(|(&z, &w)| w * f(z)))
    }
}
