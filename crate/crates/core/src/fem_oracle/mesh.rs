use std::collections::HashSet;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};

/// Triangulation of Ω = φ(𝔻), built on the disk and pushed forward by φ.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<[f64; 2]>,
    preimages: Vec<Complex64>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    map: ConformalMap,
    level: u32,
}

pub const MAX_LEVEL: u32 = 8;

/// Concentric-ring disk mesh with `R = 2^level` rings; ring `i` carries
/// `6i` equally spaced vertices at radius `i/R`, giving `6R² = 6·4^level`
/// triangles.
pub fn mesh_from_map(map: &ConformalMap, level: u32) -> Result<TriMesh> {
    if !(1..=MAX_LEVEL).contains(&level) {
        return Err(Error::Config(format!("mesh level must be in 1..={MAX_LEVEL}, got {level}")));
    }
    let rings = 1usize << level;
    let mut preimages = vec![Complex64::new(0.0, 0.0)];
    let mut start = vec![0usize];
    for i in 1..=rings {
        start.push(preimages.len());
        let n = 6 * i;
        let r = i as f64 / rings as f64;
        for k in 0..n {
            let z = if k == 0 { Complex64::new(r, 0.0) } else { Complex64::from_polar(r, TAU * k as f64 / n as f64) };
            preimages.push(z);
        }
    }
    let mut triangles = Vec::with_capacity(6 * rings * rings);
    for i in 1..=rings {
        let (n_out, s_out) = (6 * i, start[i]);
        if i == 1 {
            for b in 0..n_out {
                triangles.push([0, s_out + b, s_out + (b + 1) % n_out]);
            }
            continue;
        }
        let (n_in, s_in) = (6 * (i - 1), start[i - 1]);
        // Zip the two rings together in angular order.
        let (mut a, mut b) = (0usize, 0usize);
        while a < n_in || b < n_out {
            let next_in = (a + 1) as f64 / n_in as f64;
            let next_out = (b + 1) as f64 / n_out as f64;
            let ia = s_in + a % n_in;
            let ob = s_out + b % n_out;
            if b < n_out && (a == n_in || next_out <= next_in) {
                triangles.push([ia, ob, s_out + (b + 1) % n_out]);
                b += 1;
            } else {
                triangles.push([ia, ob, s_in + (a + 1) % n_in]);
                a += 1;
            }
        }
    }
    let vertices: Vec<[f64; 2]> = preimages
        .iter()
        .map(|&z| {
            let w = map.eval(z);
            [w.re, w.im]
        })
        .collect();
    let boundary = (0..preimages.len()).map(|v| v >= start[rings]).collect();
    let mesh = TriMesh { vertices, preimages, triangles, boundary, map: map.clone(), level };
    for t in 0..mesh.triangles.len() {
        let a = mesh.triangle_area(t);
        if !(a > 0.0) {
            return Err(Error::Mesh(format!("triangle {t} has non-positive mapped area {a:e} at level {level}")));
        }
    }
    Ok(mesh)
}

fn signed_area(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

impl TriMesh {
    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Disk points the vertices were mapped from.
    pub fn preimages(&self) -> &[Complex64] {
        &self.preimages
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary(&self) -> &[bool] {
        &self.boundary
    }

    pub fn map(&self) -> &ConformalMap {
        &self.map
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn provenance(&self) -> (String, u32) {
        (self.map.label(), self.level)
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn total_area(&self) -> f64 {
        crate::orlicz::neumaier_sum((0..self.triangles.len()).map(|t| self.triangle_area(t)))
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = HashSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    /// `V − E + F`; 1 for a disk.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    /// Longest edge in Ω.
    pub fn mesh_size(&self) -> f64 {
        let d = |a: usize, b: usize| {
            let (p, q) = (self.vertices[a], self.vertices[b]);
            (p[0] - q[0]).hypot(p[1] - q[1])
        };
        self.triangles.iter().flat_map(|t| [d(t[0], t[1]), d(t[1], t[2]), d(t[2], t[0])]).fold(0.0, f64::max)
    }

    /// Plain-text listing: a header line, then `v x y b` and `t i j k` lines.
    pub fn dump(&self) -> String {
        let mut s = format!(
            "trimesh 1 vertices={} triangles={} map={} level={}\n",
            self.vertices.len(),
            self.triangles.len(),
            self.map.label(),
            self.level
        );
        for (v, b) in self.vertices.iter().zip(&self.boundary) {
            let _ = writeln!(s, "v {:.17e} {:.17e} {}", v[0], v[1], u8::from(*b));
        }
        for t in &self.triangles {
            let _ = writeln!(s, "t {} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}
