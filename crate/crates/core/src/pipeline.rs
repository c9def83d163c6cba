//! End-to-end decomposition: normalize, split into OAM sectors, solve each
//! radial problem and assemble the global spectrum.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::AmplitudeModel;
use crate::angular::{
    adaptive_sectors, angular_fourier, SectorSet, DEFAULT_N_THETA, DEFAULT_SECTOR_TOL,
};
use crate::error::{invalid, Result, SchmidtError};
use crate::measures::SchmidtSpectrum;
use crate::quadrature::RadialGrid;
use crate::radial::{assemble_spectrum, decompose_sector, SchmidtMode, SectorSpectrum};

pub const DEFAULT_GRID_N: usize = 200;
pub const DEFAULT_KMAX_FACTOR: f64 = 8.0;

/// Discretization parameters shared by every stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub grid_n: usize,
    pub kmax_factor: f64,
    /// Overrides `kmax_factor` when set (σ⊥ units of the model).
    pub k_max: Option<f64>,
    pub n_theta: usize,
    pub sector_tol: f64,
    /// Fixed sector range; adaptive when unset.
    pub m_max: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_n: DEFAULT_GRID_N,
            kmax_factor: DEFAULT_KMAX_FACTOR,
            k_max: None,
            n_theta: DEFAULT_N_THETA,
            sector_tol: DEFAULT_SECTOR_TOL,
            m_max: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=4000).contains(&self.grid_n) {
            return Err(invalid(
                "grid_n",
                format!("{} outside [2, 4000]", self.grid_n),
            ));
        }
        if !(self.kmax_factor.is_finite() && self.kmax_factor > 0.0) {
            return Err(invalid(
                "kmax_factor",
                format!("{} must be positive", self.kmax_factor),
            ));
        }
        if let Some(k) = self.k_max {
            if !(k.is_finite() && k > 0.0) {
                return Err(invalid("k_max", format!("{k} must be positive")));
            }
        }
        if self.n_theta < 64 || !self.n_theta.is_power_of_two() || self.n_theta > 1 << 16 {
            return Err(invalid(
                "n_theta",
                format!("{} must be a power of two in [64, 65536]", self.n_theta),
            ));
        }
        if !(self.sector_tol > 0.0 && self.sector_tol < 1.0) {
            return Err(invalid(
                "sector_tol",
                format!("{} must lie in (0, 1)", self.sector_tol),
            ));
        }
        Ok(())
    }

    pub fn k_max_for(&self, model: &AmplitudeModel) -> f64 {
        self.k_max
            .unwrap_or_else(|| model.default_k_max(self.kmax_factor))
    }

    /// Same configuration with twice the radial and angular resolution.
    pub fn refined(&self) -> Self {
        Self {
            grid_n: 2 * self.grid_n,
            n_theta: 2 * self.n_theta,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Normalized on `grid`.
    pub model: AmplitudeModel,
    pub grid: Arc<RadialGrid>,
    pub n_theta: usize,
    pub m_max: usize,
    /// Σ P_m over the retained sector range.
    pub sector_coverage: f64,
    /// Radial spectra in ascending `m`; sectors below the probability floor
    /// are absent.
    pub sectors: Vec<SectorSpectrum>,
    pub spectrum: SchmidtSpectrum,
}

impl Decomposition {
    pub fn sector(&self, m: i32) -> Option<&SectorSpectrum> {
        self.sectors.iter().find(|s| s.m == m)
    }

    pub fn mode(&self, n: usize, m: i32) -> Result<SchmidtMode> {
        self.sector(m)
            .and_then(|s| s.mode(n))
            .ok_or(SchmidtError::ModeOutOfRange { n, m })
    }

    pub fn k(&self) -> f64 {
        self.spectrum.k()
    }
}

/// Radial grid for `model` under `config`, starting at the model's cutoff.
pub fn grid_for(model: &AmplitudeModel, config: &SolverConfig) -> Result<RadialGrid> {
    let k_max = config.k_max_for(model);
    if k_max <= model.cutoff() {
        return Err(invalid(
            "k_max",
            format!("{k_max} does not exceed cutoff {}", model.cutoff()),
        ));
    }
    model.radial_grid(k_max, config.grid_n)
}

pub fn decompose(model: &AmplitudeModel, config: &SolverConfig) -> Result<Decomposition> {
    config.validate()?;
    let grid = grid_for(model, config)?;
    decompose_on(model, Arc::new(grid), config)
}

pub(crate) fn decompose_on(
    model: &AmplitudeModel,
    grid: Arc<RadialGrid>,
    config: &SolverConfig,
) -> Result<Decomposition> {
    let model = model.normalize(&grid, config.n_theta)?;
    let set: SectorSet = match config.m_max {
        Some(m_max) => angular_fourier(&model, &grid, m_max, config.n_theta, config.sector_tol)?,
        None => adaptive_sectors(&model, &grid, config.sector_tol, config.n_theta)?,
    };

    let non_negative: Vec<_> = set
        .sectors
        .iter()
        .filter(|s| s.m >= 0 && !s.is_negligible())
        .collect();
    let solved: Vec<SectorSpectrum> = non_negative
        .par_iter()
        .map(|kernel| decompose_sector(kernel, &grid))
        .collect::<Result<_>>()?;

    let mut sectors: Vec<SectorSpectrum> = solved
        .iter()
        .rev()
        .filter(|s| s.m > 0)
        .map(|s| s.mirrored())
        .collect();
    sectors.extend(solved);
    let probs: Vec<(i32, f64)> = sectors
        .iter()
        .map(|s| (s.m, set.sector(s.m).map(|k| k.p_m).unwrap_or(0.0)))
        .collect();
    let mut spectrum = assemble_spectrum(&sectors, &probs)?;
    spectrum.p_m = set.probabilities().into_iter().collect();

    Ok(Decomposition {
        model,
        grid,
        n_theta: set.n_theta,
        m_max: set.m_max,
        sector_coverage: set.coverage,
        sectors,
        spectrum,
    })
}
