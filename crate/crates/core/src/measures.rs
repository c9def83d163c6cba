//! Scalar entanglement measures of a Schmidt spectrum.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::amplitude::{angle_cosines, AmplitudeModel, Family};
use crate::error::{Result, SchmidtError};
use crate::quadrature::RadialGrid;

/// Truncated spectra capturing less than this are flagged.
pub const COVERAGE_WARNING: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub n: usize,
    pub m: i32,
    pub lambda: f64,
}

/// Schmidt number before and after renormalizing the table to unit trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchmidtNumber {
    pub raw: f64,
    pub renormalized: f64,
}

/// Global table of `λ_{nm}` with derived measures.
#[derive(Debug, Clone)]
pub struct SchmidtSpectrum {
    /// Sorted by descending `λ`; ties by `|m|`, then `m`, then `n`.
    pub entries: Vec<SpectrumEntry>,
    /// `Σ λ` over the retained entries.
    pub coverage: f64,
    pub schmidt_number: SchmidtNumber,
    pub entropy_bits: f64,
    pub p_m: BTreeMap<i32, f64>,
}

impl SchmidtSpectrum {
    pub fn from_entries(mut entries: Vec<SpectrumEntry>, p_m: Vec<(i32, f64)>) -> Result<Self> {
        entries.sort_by(|a, b| {
            b.lambda
                .total_cmp(&a.lambda)
                .then(a.m.abs().cmp(&b.m.abs()))
                .then(a.m.cmp(&b.m))
                .then(a.n.cmp(&b.n))
        });
        let lambdas: Vec<f64> = entries.iter().map(|e| e.lambda).collect();
        let schmidt_number = schmidt_number(&lambdas)?;
        let entropy_bits = entanglement_entropy(&lambdas)?;
        Ok(Self {
            coverage: lambdas.iter().sum(),
            entries,
            schmidt_number,
            entropy_bits,
            p_m: p_m.into_iter().collect(),
        })
    }

    /// The renormalized Schmidt number `K`.
    pub fn k(&self) -> f64 {
        self.schmidt_number.renormalized
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    pub fn lambda(&self, n: usize, m: i32) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.n == n && e.m == m)
            .map(|e| e.lambda)
    }

    /// Total weight carried by radial quantum number `n`.
    pub fn radial_manifold_weight(&self, n: usize) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.n == n)
            .map(|e| e.lambda)
            .sum()
    }
}

fn check_table(lambdas: &[f64]) -> Result<f64> {
    if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(SchmidtError::EmptySpectrum);
    }
    let total: f64 = lambdas.iter().sum();
    if lambdas.is_empty() || total <= 0.0 {
        return Err(SchmidtError::EmptySpectrum);
    }
    if total < COVERAGE_WARNING {
        log::warn!(
            "spectrum coverage {total:.6} below {COVERAGE_WARNING}; measures are renormalized"
        );
    }
    Ok(total)
}

/// `K = 1 / Σλ²` on the raw table and `(Σλ)² / Σλ²` on the table divided
/// by its coverage.
pub fn schmidt_number(lambdas: &[f64]) -> Result<SchmidtNumber> {
    let total = check_table(lambdas)?;
    let squares: f64 = lambdas.iter().map(|l| l * l).sum();
    Ok(SchmidtNumber {
        raw: squares.recip(),
        renormalized: total * total / squares,
    })
}

/// `E = -Σ λ log₂ λ` in bits on the renormalized table, with `0 log 0 = 0`.
pub fn entanglement_entropy(lambdas: &[f64]) -> Result<f64> {
    let total = check_table(lambdas)?;
    let entropy: f64 = lambdas
        .iter()
        .map(|l| l / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    Ok(entropy.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceEstimate {
    pub k: f64,
    /// Set when the model is not the double Gaussian the relation holds for.
    pub heuristic: bool,
    pub q_sq: f64,
    pub sum_sq: f64,
    pub diff_sq: f64,
}

/// Schmidt number from transverse second moments,
/// `K^{1/2} = ⟨q_j²⟩ / √(⟨s_{+j}²⟩⟨s_{-j}²⟩)` with `s_± = (k_j ± q_j)/√2`.
///
/// With rotational symmetry `⟨q_j²⟩ = ⟨|q|²⟩/2` and `⟨s_{±j}²⟩ = ⟨|k ± q|²⟩/4`.
pub fn variance_k_estimate(
    model: &AmplitudeModel,
    grid: &RadialGrid,
    n_theta: usize,
) -> Result<VarianceEstimate> {
    let norm = model.norm_constant().ok_or(SchmidtError::NotNormalized)?;
    let heuristic = model.family() != Family::DoubleGaussian;
    if heuristic {
        log::warn!("relation derived for Gaussian amplitude; result is heuristic");
    }
    let cosines = angle_cosines(n_theta);
    let measure = grid.measure();
    let nodes = grid.nodes();
    let (mut q_sq, mut sum_sq, mut diff_sq) = (0.0, 0.0, 0.0);
    for (i, &k) in nodes.iter().enumerate() {
        for (j, &q) in nodes.iter().enumerate() {
            let w = measure[i] * measure[j];
            for &c in &cosines {
                let density = w * (norm * model.shape(k, q, c)).powi(2);
                q_sq += density * q * q;
                sum_sq += density * (k * k + q * q + 2.0 * k * q * c);
                diff_sq += density * (k * k + q * q - 2.0 * k * q * c);
            }
        }
    }
    let scale = 2.0 * PI * 2.0 * PI / n_theta as f64;
    let (q_sq, sum_sq, diff_sq) = (q_sq * scale, sum_sq * scale, diff_sq * scale);
    let root_k = 2.0 * q_sq / (sum_sq * diff_sq).sqrt();
    Ok(VarianceEstimate {
        k: root_k * root_k,
        heuristic,
        q_sq,
        sum_sq,
        diff_sq,
    })
}
