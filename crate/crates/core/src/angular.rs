//! Reduction of the amplitude to orbital-angular-momentum sectors.
//!
//! For each pair of radial nodes the relative-angle dependence is expanded as
//! `C(k, q, Δθ) = Σ_m G_m(k, q) e^{imΔθ}` with a periodic trapezoid rule (an
//! FFT over `n_theta` uniform samples). The sector probability and normalized
//! radial kernel follow as
//!
//! ```text
//! P_m = (2π)² ∫∫ |G_m(k, q)|² k q dk dq,      F_m = 2π G_m / √P_m
//! ```
//!
//! and the kernel is stored in Nyström form `M_ij = √(w_i k_i) F_m(k_i, k_j) √(w_j k_j)`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::amplitude::{angle_cosines, AmplitudeModel};
use crate::error::{invalid, Result, SchmidtError};
use crate::quadrature::RadialGrid;

pub const DEFAULT_N_THETA: usize = 512;
pub const DEFAULT_SECTOR_TOL: f64 = 1e-6;

/// Sectors with smaller probability carry no resolvable radial structure and
/// are kept with an all-zero kernel.
pub const SECTOR_PROBABILITY_FLOOR: f64 = 1e-16;

const INITIAL_M_MAX: usize = 8;
const MAX_THETA_DOUBLINGS: usize = 2;

#[derive(Debug, Clone)]
pub struct SectorKernel {
    pub m: i32,
    pub p_m: f64,
    /// Shared between `m` and `-m`.
    pub matrix: Arc<DMatrix<f64>>,
}

impl SectorKernel {
    pub fn is_negligible(&self) -> bool {
        self.p_m < SECTOR_PROBABILITY_FLOOR
    }
}

/// Sector kernels for `m = -m_max..=m_max` in ascending `m`, with the angular
/// resolution that produced them.
#[derive(Debug, Clone)]
pub struct SectorSet {
    pub sectors: Vec<SectorKernel>,
    pub m_max: usize,
    pub n_theta: usize,
    pub coverage: f64,
}

impl SectorSet {
    pub fn sector(&self, m: i32) -> Option<&SectorKernel> {
        let idx = m + self.m_max as i32;
        if idx < 0 {
            return None;
        }
        self.sectors.get(idx as usize)
    }

    /// `(m, P_m)` in ascending `m`.
    pub fn probabilities(&self) -> Vec<(i32, f64)> {
        self.sectors.iter().map(|s| (s.m, s.p_m)).collect()
    }
}

fn check_resolution(n_theta: usize, m_max: usize) -> Result<()> {
    if n_theta < 64 || !n_theta.is_power_of_two() {
        return Err(invalid(
            "n_theta",
            format!("{n_theta} must be a power of two >= 64"),
        ));
    }
    if m_max >= n_theta / 2 {
        return Err(invalid(
            "m_max",
            format!("{m_max} must be below n_theta / 2 = {}", n_theta / 2),
        ));
    }
    Ok(())
}

/// Folds `fold(acc, i, j, spectrum)` over every node pair `i <= j` row by row,
/// where `spectrum` holds `G_m(k_i, k_j)` for `m = 0..=m_top`. Rows run in
/// parallel and come back in order.
fn pair_spectra<T, I, F>(
    model: &AmplitudeModel,
    grid: &RadialGrid,
    n_theta: usize,
    m_top: usize,
    init: I,
    fold: F,
) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(&mut T, usize, usize, &[f64]) + Sync,
{
    let norm = model.norm_constant().ok_or(SchmidtError::NotNormalized)?;
    let cosines = angle_cosines(n_theta);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_theta);
    let nodes = grid.nodes();
    let scale = norm / n_theta as f64;
    Ok((0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let mut buffer = vec![Complex64::new(0.0, 0.0); n_theta];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            let mut coeffs = vec![0.0; m_top + 1];
            let mut acc = init();
            for j in i..nodes.len() {
                for (slot, &c) in buffer.iter_mut().zip(&cosines) {
                    *slot = Complex64::new(model.shape(nodes[i], nodes[j], c), 0.0);
                }
                fft.process_with_scratch(&mut buffer, &mut scratch);
                for (m, g) in coeffs.iter_mut().enumerate() {
                    *g = scale * buffer[m].re;
                }
                fold(&mut acc, i, j, &coeffs);
            }
            acc
        })
        .collect())
}

/// Angular Fourier coefficients `G_m(k_i, k_j)` for `m = 0..=m_max`.
pub fn fourier_coefficients(
    model: &AmplitudeModel,
    grid: &RadialGrid,
    m_max: usize,
    n_theta: usize,
) -> Result<Vec<DMatrix<f64>>> {
    check_resolution(n_theta, m_max)?;
    let n = grid.len();
    let rows = pair_spectra(model, grid, n_theta, m_max, Vec::new, |row, _, j, g| {
        row.push((j, g.to_vec()))
    })?;
    let mut out = vec![DMatrix::zeros(n, n); m_max + 1];
    for (i, row) in rows.into_iter().enumerate() {
        for (j, g) in row {
            for (m, &value) in g.iter().enumerate() {
                out[m][(i, j)] = value;
                out[m][(j, i)] = value;
            }
        }
    }
    Ok(out)
}

/// `P_m` for `m = 0..n_theta/2` from a single pass over the node pairs.
pub fn sector_probabilities(
    model: &AmplitudeModel,
    grid: &RadialGrid,
    n_theta: usize,
) -> Result<Vec<f64>> {
    check_resolution(n_theta, 0)?;
    let m_top = n_theta / 2 - 1;
    let measure = grid.measure();
    let rows = pair_spectra(
        model,
        grid,
        n_theta,
        m_top,
        || vec![0.0; m_top + 1],
        |acc, i, j, g| {
            let factor = if i == j { 1.0 } else { 2.0 } * measure[i] * measure[j];
            for (a, &v) in acc.iter_mut().zip(g) {
                *a += factor * v * v;
            }
        },
    )?;
    let mut probs = vec![0.0; m_top + 1];
    for row in rows {
        for (p, v) in probs.iter_mut().zip(row) {
            *p += v;
        }
    }
    Ok(probs.into_iter().map(|p| 4.0 * PI * PI * p).collect())
}

fn kernels_from_coefficients(
    grid: &RadialGrid,
    coeffs: Vec<DMatrix<f64>>,
) -> Vec<(f64, Arc<DMatrix<f64>>)> {
    let root: Vec<f64> = grid.measure().iter().map(|v| v.sqrt()).collect();
    coeffs
        .into_par_iter()
        .map(|g| {
            let n = g.nrows();
            let mut kernel = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = 2.0 * PI * root[i] * g[(i, j)] * root[j];
                    kernel[(i, j)] = v;
                    kernel[(j, i)] = v;
                }
            }
            let p_m = kernel.norm_squared();
            if p_m < SECTOR_PROBABILITY_FLOOR {
                return (p_m, Arc::new(DMatrix::zeros(n, n)));
            }
            kernel /= p_m.sqrt();
            let (mut best, mut value) = (0.0, 0.0);
            for &x in kernel.iter() {
                if x.abs() > best {
                    best = x.abs();
                    value = x;
                }
            }
            if value < 0.0 {
                kernel.neg_mut();
            }
            (p_m, Arc::new(kernel))
        })
        .collect()
}

fn signed_sectors(per_m: Vec<(f64, Arc<DMatrix<f64>>)>) -> Vec<SectorKernel> {
    let m_max = per_m.len() as i32 - 1;
    (-m_max..=m_max)
        .map(|m| {
            let (p_m, matrix) = &per_m[m.unsigned_abs() as usize];
            SectorKernel {
                m,
                p_m: *p_m,
                matrix: Arc::clone(matrix),
            }
        })
        .collect()
}

/// Sector kernels for `m = -m_max..=m_max`.
///
/// Fails with [`SchmidtError::MMaxTooSmall`] when the captured probability
/// `Σ P_m` falls short of `1 - sector_tol`.
pub fn angular_fourier(
    model: &AmplitudeModel,
    grid: &RadialGrid,
    m_max: usize,
    n_theta: usize,
    sector_tol: f64,
) -> Result<SectorSet> {
    let coeffs = fourier_coefficients(model, grid, m_max, n_theta)?;
    let sectors = signed_sectors(kernels_from_coefficients(grid, coeffs));
    let coverage: f64 = sectors.iter().map(|s| s.p_m).sum();
    if coverage < 1.0 - sector_tol {
        return Err(SchmidtError::MMaxTooSmall {
            coverage,
            tol: sector_tol,
        });
    }
    Ok(SectorSet {
        sectors,
        m_max,
        n_theta,
        coverage,
    })
}

/// Doubles `m_max` from 8 until `Σ P_m >= 1 - sector_tol`, doubling `n_theta`
/// (at most twice) when `m_max` would reach `n_theta / 2`.
pub fn adaptive_sectors(
    model: &AmplitudeModel,
    grid: &RadialGrid,
    sector_tol: f64,
    n_theta: usize,
) -> Result<SectorSet> {
    if !(sector_tol > 0.0 && sector_tol < 1.0) {
        return Err(invalid(
            "sector_tol",
            format!("{sector_tol} must lie in (0, 1)"),
        ));
    }
    check_resolution(n_theta, 0)?;
    let mut n_theta = n_theta;
    for _ in 0..=MAX_THETA_DOUBLINGS {
        let probs = sector_probabilities(model, grid, n_theta)?;
        let captured = |m_max: usize| probs[0] + 2.0 * probs[1..=m_max].iter().sum::<f64>();
        let mut m_max = INITIAL_M_MAX;
        while m_max < n_theta / 2 {
            if captured(m_max) >= 1.0 - sector_tol {
                return angular_fourier(model, grid, m_max, n_theta, sector_tol);
            }
            m_max *= 2;
        }
        let last = n_theta / 2 - 1;
        if captured(last) >= 1.0 - sector_tol {
            return angular_fourier(model, grid, last, n_theta, sector_tol);
        }
        log::debug!(
            "n_theta = {n_theta} cannot reach coverage {}; doubling",
            1.0 - sector_tol
        );
        n_theta *= 2;
    }
    let n_theta = n_theta / 2;
    let probs = sector_probabilities(model, grid, n_theta)?;
    let coverage = probs[0] + 2.0 * probs[1..].iter().sum::<f64>();
    Err(SchmidtError::AngularResolutionExhausted { n_theta, coverage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::Family;
    use approx::assert_relative_eq;

    fn setup(family: Family, t: f64, n: usize, n_theta: usize) -> (AmplitudeModel, RadialGrid) {
        let model = AmplitudeModel::scaled(family, t).unwrap();
        let grid = model.radial_grid(model.default_k_max(8.0), n).unwrap();
        let model = model.normalize(&grid, n_theta).unwrap();
        (model, grid)
    }

    #[test]
    fn separable_gaussian_has_single_sector() {
        let (model, grid) = setup(Family::DoubleGaussian, 1.0, 60, 128);
        let set = angular_fourier(&model, &grid, 6, 128, 1e-6).unwrap();
        assert_relative_eq!(set.sector(0).unwrap().p_m, 1.0, max_relative = 1e-12);
        for m in 1..=6 {
            assert!(set.sector(m).unwrap().p_m < 1e-20);
            assert!(set.sector(m).unwrap().is_negligible());
        }
    }

    #[test]
    fn probabilities_even_in_m_and_kernels_symmetric() {
        let (model, grid) = setup(Family::GaussianSinc, 0.5, 60, 128);
        let set = adaptive_sectors(&model, &grid, 1e-6, 128).unwrap();
        for m in 1..=set.m_max as i32 {
            assert_eq!(set.sector(m).unwrap().p_m, set.sector(-m).unwrap().p_m);
        }
        for s in &set.sectors {
            let a = &*s.matrix;
            assert_eq!(a, &a.transpose());
            if !s.is_negligible() {
                assert_relative_eq!(a.norm_squared(), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn coverage_is_sum_of_returned_probabilities() {
        let (model, grid) = setup(Family::GaussianSinc, 1.0, 60, 128);
        let set = adaptive_sectors(&model, &grid, 1e-6, 128).unwrap();
        let sum: f64 = set.sectors.iter().map(|s| s.p_m).sum();
        assert_eq!(set.coverage, sum);
        assert!(set.coverage >= 1.0 - 1e-6);
        assert!(set.m_max <= 32);
    }

    #[test]
    fn parseval_over_all_frequencies() {
        let (model, grid) = setup(Family::GaussianSinc, 0.5, 60, 256);
        let probs = sector_probabilities(&model, &grid, 256).unwrap();
        // only the Nyquist term is missing from the sum
        let total = probs[0] + 2.0 * probs[1..].iter().sum::<f64>();
        assert!((total - 1.0).abs() < 1e-10, "total = {total}");
    }

    #[test]
    fn too_small_m_max_is_reported() {
        let (model, grid) = setup(Family::GaussianSinc, 0.25, 60, 128);
        let err = angular_fourier(&model, &grid, 1, 128, 1e-6).unwrap_err();
        assert!(matches!(err, SchmidtError::MMaxTooSmall { .. }));
    }

    #[test]
    fn resolution_checks() {
        let (model, grid) = setup(Family::GaussianSinc, 0.5, 20, 64);
        assert!(angular_fourier(&model, &grid, 4, 100, 1e-6).is_err());
        assert!(angular_fourier(&model, &grid, 32, 64, 1e-6).is_err());
        assert!(adaptive_sectors(&model, &grid, 0.0, 64).is_err());
    }

    #[test]
    fn more_sectors_for_stronger_entanglement() {
        let run = |t: f64| {
            let (model, grid) = setup(Family::GaussianSinc, t, 80, 256);
            let probs = sector_probabilities(&model, &grid, 256).unwrap();
            let mut captured = probs[0];
            let mut m = 0;
            while captured < 1.0 - 1e-6 {
                m += 1;
                captured += 2.0 * probs[m];
            }
            m
        };
        assert!(run(0.25) > run(0.5));
    }

    #[test]
    fn coefficients_converge_under_angular_refinement() {
        let (model, grid) = setup(Family::GaussianSinc, 0.5, 40, 256);
        let coarse = fourier_coefficients(&model, &grid, 20, 256).unwrap();
        let fine = fourier_coefficients(&model, &grid, 20, 512).unwrap();
        for (a, b) in coarse.iter().zip(&fine) {
            assert!((a - b).amax() < 1e-10);
        }
    }
}
