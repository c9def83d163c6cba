//! Entanglement enhancement by discarding low transverse wavevectors.
//!
//! The filtered amplitude keeps only `|k|, |q| >= μ_c`. Its acceptance is the
//! fraction of the original probability that survives the projection, and
//! its Schmidt number comes from running the full pipeline on a grid that
//! starts exactly at `μ_c`.

use std::sync::Arc;

use serde::Serialize;

use crate::amplitude::AmplitudeModel;
use crate::error::{invalid, Result, SchmidtError};
use crate::pipeline::{decompose, decompose_on, grid_for, Decomposition, SolverConfig};

/// Filtered runs extend `k_max` by this factor.
pub const FILTER_KMAX_SCALE: f64 = 1.5;

pub const MIN_ACCEPTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterReport {
    pub mu_c: f64,
    pub acceptance: f64,
    pub k_filtered: f64,
    pub k_original: f64,
}

#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub report: FilterReport,
    pub original: Decomposition,
    pub filtered: Decomposition,
}

pub fn apply_filter(
    model: &AmplitudeModel,
    mu_c: f64,
    config: &SolverConfig,
) -> Result<FilterOutcome> {
    if !(mu_c.is_finite() && mu_c >= 0.0) {
        return Err(invalid("mu_c", format!("{mu_c} must be finite and >= 0")));
    }
    config.validate()?;
    let base = model.with_cutoff(0.0)?;
    let original = decompose(&base, config)?;
    if mu_c == 0.0 {
        let k = original.k();
        return Ok(FilterOutcome {
            report: FilterReport {
                mu_c,
                acceptance: 1.0,
                k_filtered: k,
                k_original: k,
            },
            filtered: original.clone(),
            original,
        });
    }

    let filtered_config = SolverConfig {
        k_max: Some(FILTER_KMAX_SCALE * config.k_max_for(&base)),
        ..config.clone()
    };
    let filtered_model = base.with_cutoff(mu_c)?;
    let filtered_grid = Arc::new(grid_for(&filtered_model, &filtered_config)?);

    let kept = filtered_model.shape_norm_squared(&filtered_grid, config.n_theta)?;
    let total = base.shape_norm_squared(&original.grid, config.n_theta)?;
    let acceptance = kept / total;
    if !(acceptance >= MIN_ACCEPTANCE) {
        return Err(SchmidtError::FilterRejectsAll(acceptance));
    }

    let filtered = decompose_on(&filtered_model, filtered_grid, &filtered_config)?;
    Ok(FilterOutcome {
        report: FilterReport {
            mu_c,
            acceptance: acceptance.min(1.0),
            k_filtered: filtered.k(),
            k_original: original.k(),
        },
        original,
        filtered,
    })
}
