//! Composite Gauss–Legendre rules.

use alloc::vec::Vec;

use crate::math::{abs, cos, PI};

/// Quadrature settings: `order` Gauss points per panel, `2^level` panels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub order: usize,
    pub level: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { order: 8, level: 4 }
    }
}

impl QuadratureSpec {
    pub fn new(order: usize, level: u32) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        QuadratureSpec { order, level }
    }

    pub fn panels(&self) -> usize {
        1usize << self.level
    }

    /// One level finer.
    pub fn refined(&self) -> Self {
        QuadratureSpec {
            order: self.order,
            level: self.level + 1,
        }
    }

    /// Composite rule on `[a, b]`.
    pub fn rule(&self, a: f64, b: f64) -> Rule {
        composite(self.order, self.panels(), a, b)
    }
}

/// Nodes and positive weights on an interval.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if abs(dz) <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// `panels` equal panels on `[a, b]`, each carrying an `order`-point rule.
pub fn composite(order: usize, panels: usize, a: f64, b: f64) -> Rule {
    let (gx, gw) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(order * panels);
    let mut weights = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push(lo + 0.5 * h * (x + 1.0));
            weights.push(0.5 * h * w);
        }
    }
    Rule { nodes, weights }
}
