//! Gauss–Legendre rules on a truncated radial interval.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Quadrature nodes and weights on `[k_min, k_max]`.
///
/// Nodes are strictly increasing and lie in the open interval. An `N`-point
/// rule integrates polynomials of degree `2N - 1` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    k_min: f64,
    k_max: f64,
}

impl RadialGrid {
    pub fn gauss_legendre(k_min: f64, k_max: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(invalid("count", "need at least one node"));
        }
        if !(k_min.is_finite() && k_min >= 0.0) {
            return Err(invalid("k_min", format!("{k_min} must be finite and >= 0")));
        }
        if !(k_max.is_finite() && k_max > k_min) {
            return Err(invalid(
                "k_max",
                format!("{k_max} must exceed k_min = {k_min}"),
            ));
        }
        let (x, w) = legendre_rule(count);
        let half = 0.5 * (k_max - k_min);
        let mid = 0.5 * (k_max + k_min);
        let nodes = x.iter().map(|&t| mid + half * t).collect();
        let weights = w.iter().map(|&v| half * v).collect();
        Ok(Self {
            nodes,
            weights,
            k_min,
            k_max,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Radial measure `w_i k_i` of the polar area element.
    pub fn measure(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(k, w)| k * w)
            .collect()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&k, &w)| w * f(k))
            .sum()
    }
}

/// Nodes (ascending) and weights of the `n`-point Legendre rule on `[-1, 1]`.
fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    // roots are symmetric; solve the upper half by Newton from the
    // Tricomi initial guess and mirror
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
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
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
