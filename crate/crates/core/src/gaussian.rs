//! Closed-form Schmidt data for the double-Gaussian amplitude.
//!
//! With `t = bσ⊥` and `ξ = ((1 - t)/(1 + t))²` the Schmidt coefficients are
//! `λ_{n,m} = (1 - ξ)² ξ^{2n+|m|}`, the sector probabilities
//! `P_m = (1 - ξ) ξ^{|m|} / (1 + ξ)`, and the Schmidt number
//! `K = ((1 + ξ)/(1 - ξ))² = ¼ (t + 1/t)²`.
//!
//! The modes are two-dimensional isotropic oscillator states. Writing each
//! Cartesian component of the kernel in Mehler form fixes the oscillator
//! length: `a² = σ⊥ / (4b)`, i.e. `1 / (4t)` in σ⊥ units.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::measures::SpectrumEntry;
use crate::quadrature::RadialGrid;
use crate::radial::SchmidtMode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianSpectrumParams {
    pub t: f64,
    pub xi: f64,
}

impl GaussianSpectrumParams {
    pub fn new(t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(invalid("b_sigma", format!("{t} must be positive")));
        }
        let r = (1.0 - t) / (1.0 + t);
        Ok(Self { t, xi: r * r })
    }

    pub fn lambda(&self, n: usize, m: i32) -> f64 {
        let one_minus = 1.0 - self.xi;
        one_minus * one_minus * self.xi.powi(2 * n as i32 + m.abs())
    }

    pub fn sector_probability(&self, m: i32) -> f64 {
        (1.0 - self.xi) * self.xi.powi(m.abs()) / (1.0 + self.xi)
    }

    /// `γ_{n,m} = (1 - ξ²) ξ^{2n}`, independent of `m`.
    pub fn radial_coefficient(&self, n: usize) -> f64 {
        (1.0 - self.xi * self.xi) * self.xi.powi(2 * n as i32)
    }

    /// Oscillator length squared in σ⊥ units.
    pub fn oscillator_length_sq(&self) -> f64 {
        0.25 / self.t
    }
}

pub fn analytic_k(t: f64) -> Result<f64> {
    GaussianSpectrumParams::new(t)?;
    let s = t + t.recip();
    Ok(0.25 * s * s)
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticSpectrum {
    pub params: GaussianSpectrumParams,
    /// Sorted by descending `λ`, then `|m|`, `m`, `n`.
    pub entries: Vec<SpectrumEntry>,
    pub coverage: f64,
}

/// Table of `λ_{n,m}` for `0 <= n <= n_max`, `|m| <= m_max`.
pub fn analytic_spectrum(t: f64, n_max: usize, m_max: usize) -> Result<AnalyticSpectrum> {
    let params = GaussianSpectrumParams::new(t)?;
    let m_max = m_max as i32;
    let mut entries: Vec<SpectrumEntry> = (0..=n_max)
        .flat_map(|n| (-m_max..=m_max).map(move |m| (n, m)))
        .map(|(n, m)| SpectrumEntry {
            n,
            m,
            lambda: params.lambda(n, m),
        })
        .filter(|e| e.lambda > 0.0)
        .collect();
    entries.sort_by(|a, b| {
        b.lambda
            .total_cmp(&a.lambda)
            .then(a.m.abs().cmp(&b.m.abs()))
            .then(a.m.cmp(&b.m))
            .then(a.n.cmp(&b.n))
    });
    let coverage = entries.iter().map(|e| e.lambda).sum();
    Ok(AnalyticSpectrum {
        params,
        entries,
        coverage,
    })
}

/// Generalized Laguerre polynomial `L_n^α(x)` by upward recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Radial oscillator state `(k/a)^{|m|} L_n^{|m|}(k²/a²) e^{-k²/2a²}` sampled on
/// `grid` (σ⊥ units) and normalized so `Σ w_i k_i φ(k_i)² = 1`. The sign is
/// fixed so the largest `√k`-weighted sample is positive.
pub fn analytic_mode(n: usize, m: i32, t: f64, grid: &Arc<RadialGrid>) -> Result<SchmidtMode> {
    let params = GaussianSpectrumParams::new(t)?;
    let a_sq = params.oscillator_length_sq();
    let order = m.unsigned_abs() as f64;
    let mut values: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&k| {
            let x = k * k / a_sq;
            x.powf(0.5 * order) * laguerre(n, order, x) * (-0.5 * x).exp()
        })
        .collect();
    let norm: f64 = grid
        .measure()
        .iter()
        .zip(&values)
        .map(|(w, v)| w * v * v)
        .sum::<f64>()
        .sqrt();
    let peak = values
        .iter()
        .zip(grid.nodes())
        .map(|(v, k)| v * k.sqrt())
        .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    let sign = if peak < 0.0 { -1.0 } else { 1.0 };
    values.iter_mut().for_each(|v| *v *= sign / norm);
    Ok(SchmidtMode {
        n,
        m,
        values,
        grid: Arc::clone(grid),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn k_formula_points() {
        assert_eq!(analytic_k(1.0).unwrap(), 1.0);
        assert_relative_eq!(analytic_k(0.25).unwrap(), 4.515625, max_relative = 1e-15);
        assert_relative_eq!(analytic_k(2.0).unwrap(), 1.5625, max_relative = 1e-15);
        for t in [0.1, 0.3, 0.77, 3.0] {
            assert_relative_eq!(
                analytic_k(t).unwrap(),
                analytic_k(1.0 / t).unwrap(),
                max_relative = 1e-14
            );
        }
        assert!(analytic_k(0.0).is_err());
        assert!(analytic_k(-1.0).is_err());
    }

    #[test]
    fn xi_properties() {
        assert_eq!(GaussianSpectrumParams::new(1.0).unwrap().xi, 0.0);
        assert_relative_eq!(
            GaussianSpectrumParams::new(0.25).unwrap().xi,
            0.36,
            max_relative = 1e-15
        );
        let a = GaussianSpectrumParams::new(0.4).unwrap().xi;
        let b = GaussianSpectrumParams::new(2.5).unwrap().xi;
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }

    #[test]
    fn separable_point_has_single_coefficient() {
        let spectrum = analytic_spectrum(1.0, 5, 5).unwrap();
        assert_eq!(spectrum.entries.len(), 1);
        assert_eq!(spectrum.entries[0].lambda, 1.0);
    }

    #[test]
    fn series_normalization_by_direct_summation() {
        // sum the double series term by term instead of using the closed form
        let spectrum = analytic_spectrum(0.25, 40, 80).unwrap();
        assert!(spectrum.coverage > 1.0 - 1e-10);
        assert!(spectrum.coverage <= 1.0 + 1e-14);
        assert_relative_eq!(spectrum.entries[0].lambda, 0.4096, max_relative = 1e-14);
        let p = spectrum.params;
        assert_eq!(p.lambda(0, 2), p.lambda(1, 0));
        assert_eq!(p.lambda(1, 3), p.lambda(0, -5));
    }

    #[test]
    fn truncated_k_converges_to_closed_form() {
        for t in [0.2, 0.25, 0.5, 2.0, 4.0] {
            let spectrum = analytic_spectrum(t, 40, 80).unwrap();
            let lambdas: Vec<f64> = spectrum.entries.iter().map(|e| e.lambda).collect();
            let k = crate::measures::schmidt_number(&lambdas)
                .unwrap()
                .renormalized;
            assert_relative_eq!(k, analytic_k(t).unwrap(), max_relative = 1e-6);
        }
    }

    #[test]
    fn sector_probabilities_sum_rows() {
        let params = GaussianSpectrumParams::new(0.3).unwrap();
        for m in [-3, 0, 2, 7] {
            let row: f64 = (0..400).map(|n| params.lambda(n, m)).sum();
            assert_relative_eq!(row, params.sector_probability(m), max_relative = 1e-12);
            let gammas: f64 = (0..400).map(|n| params.radial_coefficient(n)).sum();
            assert_relative_eq!(gammas, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn laguerre_low_orders() {
        let x = 0.7;
        let a = 2.0;
        assert_eq!(laguerre(0, a, x), 1.0);
        assert_relative_eq!(laguerre(1, a, x), 1.0 + a - x, max_relative = 1e-15);
        let l2 = 0.5 * (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0));
        assert_relative_eq!(laguerre(2, a, x), l2, max_relative = 1e-14);
    }

    #[test]
    fn mode_node_counts_and_orthonormality() {
        let grid = Arc::new(RadialGrid::gauss_legendre(0.0, 32.0, 200).unwrap());
        let ground = analytic_mode(0, 0, 0.25, &grid).unwrap();
        let first = analytic_mode(1, 0, 0.25, &grid).unwrap();
        let third = analytic_mode(3, 2, 0.25, &grid).unwrap();
        assert_eq!(ground.node_count(), 0);
        assert_eq!(first.node_count(), 1);
        assert_eq!(third.node_count(), 3);
        assert_relative_eq!(ground.overlap(&ground.values), 1.0, max_relative = 1e-12);
        assert!(ground.overlap(&first.values).abs() < 1e-12);
    }
}
