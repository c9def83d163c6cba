//! Per-sector radial Schmidt problem.
//!
//! The Nyström matrix of a sector is real symmetric, so its eigenpairs
//! `M = Σ_n e_n v_n v_nᵀ` give the radial Schmidt coefficients `γ_n = e_n²`
//! (eigenvalues of `M Mᵀ`) and modes `φ_n(k_i) = v_{n,i} / √(w_i k_i)`. The
//! sign of `e_n` is kept so the kernel can be rebuilt exactly; it belongs to
//! the idler-side mode.

use std::sync::Arc;

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors};
use faer::{Mat, Par};
use nalgebra::DMatrix;

use crate::angular::SectorKernel;
use crate::error::{Result, SchmidtError};
use crate::measures::{SchmidtSpectrum, SpectrumEntry};
use crate::quadrature::RadialGrid;

/// Radial coefficients below this are numerical noise and are left out of the
/// assembled spectrum.
pub const GAMMA_FLOOR: f64 = 1e-14;

/// Lobes carrying less than this fraction of `Σ w k φ²` are ignored when
/// counting nodes.
pub const NODE_THRESHOLD: f64 = 1e-3;

const SYMMETRY_TOL: f64 = 1e-10;
const DEGENERACY_TOL: f64 = 1e-12;

/// One radial Schmidt mode sampled on the grid nodes.
///
/// `values` hold the radial function `φ(k)` normalized with the polar measure,
/// `Σ_i w_i k_i φ(k_i)² = 1`; the full mode is `e^{imθ} φ(k) / √(2π)`.
#[derive(Debug, Clone)]
pub struct SchmidtMode {
    pub n: usize,
    pub m: i32,
    pub values: Vec<f64>,
    pub grid: Arc<RadialGrid>,
}

impl SchmidtMode {
    /// Sign changes between lobes that each carry at least
    /// [`NODE_THRESHOLD`] of the norm.
    pub fn node_count(&self) -> usize {
        count_nodes(&self.values, &self.grid.measure(), NODE_THRESHOLD)
    }

    /// `Σ_i w_i k_i φ(k_i) ψ(k_i)`.
    pub fn overlap(&self, other: &[f64]) -> f64 {
        self.grid
            .measure()
            .iter()
            .zip(self.values.iter().zip(other))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }
}

pub(crate) fn count_nodes(values: &[f64], measure: &[f64], threshold: f64) -> usize {
    // (sign, weight) of each run of equal sign
    let mut lobes: Vec<(f64, f64)> = Vec::new();
    for (v, w) in values.iter().zip(measure) {
        let weight = w * v * v;
        match lobes.last_mut() {
            Some(last) if last.0 == v.signum() || *v == 0.0 => last.1 += weight,
            _ => lobes.push((v.signum(), weight)),
        }
    }
    let total: f64 = lobes.iter().map(|l| l.1).sum();
    if total == 0.0 {
        return 0;
    }
    let mut changes = 0;
    let mut last_sign = 0.0;
    for (sign, _) in lobes.iter().filter(|l| l.1 >= threshold * total) {
        if last_sign != 0.0 && *sign != last_sign {
            changes += 1;
        }
        last_sign = *sign;
    }
    changes
}

/// Radial Schmidt decomposition of one OAM sector.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub m: i32,
    /// `γ_{n,m}` in descending order.
    pub gammas: Vec<f64>,
    /// `sign(e_n)` for each coefficient.
    pub signs: Vec<f64>,
    /// Column `n` holds the grid samples of `φ_{n,m}`; shared with the `-m`
    /// sector.
    modes: Arc<DMatrix<f64>>,
    grid: Arc<RadialGrid>,
}

impl SectorSpectrum {
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.gammas.iter().sum()
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn mode(&self, n: usize) -> Option<SchmidtMode> {
        (n < self.gammas.len()).then(|| SchmidtMode {
            n,
            m: self.m,
            values: self.modes.column(n).iter().copied().collect(),
            grid: Arc::clone(&self.grid),
        })
    }

    /// The same decomposition relabelled for `-m`.
    pub fn mirrored(&self) -> Self {
        Self {
            m: -self.m,
            ..self.clone()
        }
    }

    /// `Σ_n s_n √γ_n v_n v_nᵀ` in Nyström form.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let root: Vec<f64> = self.grid.measure().iter().map(|v| v.sqrt()).collect();
        let size = root.len();
        let mut out = DMatrix::zeros(size, size);
        for (n, (&gamma, &sign)) in self.gammas.iter().zip(&self.signs).enumerate() {
            let v = DMatrix::from_fn(size, 1, |i, _| self.modes[(i, n)] * root[i]);
            out += sign * gamma.sqrt() * &v * v.transpose();
        }
        out
    }
}

/// Eigendecomposes one sector kernel.
pub fn decompose_sector(kernel: &SectorKernel, grid: &Arc<RadialGrid>) -> Result<SectorSpectrum> {
    let matrix = &*kernel.matrix;
    if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
        return Err(SchmidtError::Misaligned(format!(
            "kernel is {}x{}, grid has {} nodes",
            matrix.nrows(),
            matrix.ncols(),
            grid.len()
        )));
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(SchmidtError::NonFiniteKernel);
    }
    let asymmetry = (matrix - matrix.transpose()).amax();
    if asymmetry > SYMMETRY_TOL {
        return Err(SchmidtError::AsymmetricKernel(asymmetry));
    }
    if kernel.is_negligible() || matrix.norm_squared() == 0.0 {
        return Err(SchmidtError::EmptySector(kernel.m));
    }

    let size = matrix.nrows();
    // sequential so the result does not depend on the thread count
    let a = Mat::<f64>::from_fn(size, size, |i, j| matrix[(i, j)]);
    let mut s = Diag::<f64>::zeros(size);
    let mut vectors = Mat::<f64>::zeros(size, size);
    let scratch = self_adjoint_evd_scratch::<f64>(
        size,
        ComputeEigenvectors::Yes,
        Par::Seq,
        Default::default(),
    );
    self_adjoint_evd(
        a.as_ref(),
        s.as_mut(),
        Some(vectors.as_mut()),
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(scratch)),
        Default::default(),
    )
    .map_err(|e| SchmidtError::EigenSolver(format!("{e:?}")))?;
    let values = s.column_vector();
    if values.iter().any(|e| !e.is_finite()) {
        return Err(SchmidtError::EigenSolver("non-finite eigenvalue".into()));
    }
    let measure = grid.measure();
    let root: Vec<f64> = measure.iter().map(|v| v.sqrt()).collect();

    let mut pairs: Vec<(f64, f64, Vec<f64>, usize)> = (0..size)
        .map(|n| {
            let e = values[n];
            let mut v: Vec<f64> = (0..size).map(|i| vectors[(i, n)]).collect();
            let peak = v
                .iter()
                .copied()
                .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if peak < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            let phi: Vec<f64> = v.iter().zip(&root).map(|(x, r)| x / r).collect();
            let nodes = count_nodes(&phi, &measure, NODE_THRESHOLD);
            (e * e, if e < 0.0 { -1.0 } else { 1.0 }, phi, nodes)
        })
        .collect();

    let top = pairs.iter().fold(0.0f64, |acc, p| acc.max(p.0));
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.3.cmp(&b.3)));
    // near-degenerate runs are ordered by node count
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[start].0 - pairs[end].0 <= DEGENERACY_TOL * top {
            end += 1;
        }
        pairs[start..end].sort_by_key(|p| p.3);
        start = end;
    }

    let modes = DMatrix::from_fn(size, size, |i, n| pairs[n].2[i]);
    Ok(SectorSpectrum {
        m: kernel.m,
        gammas: pairs.iter().map(|p| p.0).collect(),
        signs: pairs.iter().map(|p| p.1).collect(),
        modes: Arc::new(modes),
        grid: Arc::clone(grid),
    })
}

/// Builds the global table `λ_{nm} = P_m γ_{nm}` sorted by descending `λ`.
///
/// `probs` must list `(m, P_m)` in the same order as `sectors`. Coefficients
/// with `γ` below [`GAMMA_FLOOR`] are dropped.
pub fn assemble_spectrum(
    sectors: &[SectorSpectrum],
    probs: &[(i32, f64)],
) -> Result<SchmidtSpectrum> {
    if sectors.len() != probs.len() {
        return Err(SchmidtError::Misaligned(format!(
            "{} sectors but {} probabilities",
            sectors.len(),
            probs.len()
        )));
    }
    let mut entries = Vec::new();
    for (sector, &(m, p_m)) in sectors.iter().zip(probs) {
        if sector.m != m {
            return Err(SchmidtError::Misaligned(format!(
                "sector m = {} paired with probability for m = {m}",
                sector.m
            )));
        }
        for (n, &gamma) in sector.gammas.iter().enumerate() {
            if gamma < GAMMA_FLOOR {
                continue;
            }
            entries.push(SpectrumEntry {
                n,
                m,
                lambda: p_m * gamma,
            });
        }
    }
    let p_m = probs.to_vec();
    SchmidtSpectrum::from_entries(entries, p_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize) -> Arc<RadialGrid> {
        Arc::new(RadialGrid::gauss_legendre(0.0, 6.0, n).unwrap())
    }

    fn kernel(m: i32, matrix: DMatrix<f64>) -> SectorKernel {
        SectorKernel {
            m,
            p_m: 1.0,
            matrix: Arc::new(matrix),
        }
    }

    #[test]
    fn rank_one_kernel_is_unentangled() {
        let g = grid(30);
        let root: Vec<f64> = g.measure().iter().map(|v| v.sqrt()).collect();
        let profile: Vec<f64> = g
            .nodes()
            .iter()
            .zip(&root)
            .map(|(k, r)| r * (-k * k).exp())
            .collect();
        let norm = profile.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v = DMatrix::from_fn(30, 1, |i, _| profile[i] / norm);
        let spectrum = decompose_sector(&kernel(0, &v * v.transpose()), &g).unwrap();
        assert_relative_eq!(spectrum.gammas[0], 1.0, max_relative = 1e-12);
        assert!(spectrum.gammas[1..].iter().all(|&x| x < 1e-24));
        let mode = spectrum.mode(0).unwrap();
        for (i, k) in g.nodes().iter().enumerate() {
            assert_relative_eq!(mode.values[i], (-k * k).exp() / norm, max_relative = 1e-9);
        }
        assert_eq!(mode.node_count(), 0);
    }

    #[test]
    fn rank_one_kernel_with_wide_dynamic_range() {
        // separable amplitude behind a cutoff: entries span ~250 decades
        let g = Arc::new(RadialGrid::gauss_legendre(1.0, 12.0, 80).unwrap());
        let root: Vec<f64> = g.measure().iter().map(|v| v.sqrt()).collect();
        let profile: Vec<f64> = g
            .nodes()
            .iter()
            .zip(&root)
            .map(|(k, r)| r * (-2.0 * k * k).exp())
            .collect();
        let norm = profile.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v = DMatrix::from_fn(80, 1, |i, _| profile[i] / norm);
        let spectrum = decompose_sector(&kernel(0, &v * v.transpose()), &g).unwrap();
        assert_relative_eq!(spectrum.gammas[0], 1.0, max_relative = 1e-12);
        assert!(spectrum.gammas.iter().all(|x| x.is_finite()));
        assert!(spectrum.gammas[1] < 1e-24);
    }

    #[test]
    fn reconstruction_with_negative_eigenvalues() {
        let g = grid(12);
        let a = DMatrix::from_fn(12, 12, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let mut sym = &a + a.transpose();
        sym /= sym.norm();
        let spectrum = decompose_sector(&kernel(3, sym.clone()), &g).unwrap();
        assert!(spectrum.signs.iter().any(|&s| s < 0.0));
        assert!((spectrum.reconstruct() - &sym).norm() < 1e-10);
        assert_relative_eq!(spectrum.trace(), 1.0, max_relative = 1e-12);
        assert!(spectrum.gammas.windows(2).all(|p| p[0] >= p[1] - 1e-15));
    }

    #[test]
    fn modes_are_orthonormal_under_polar_measure() {
        let g = grid(16);
        let a = DMatrix::from_fn(16, 16, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let sym = &a / a.norm();
        let spectrum = decompose_sector(&kernel(0, sym), &g).unwrap();
        for n in 0..16 {
            let a = spectrum.mode(n).unwrap();
            for p in 0..16 {
                let b = spectrum.mode(p).unwrap();
                let expected = if n == p { 1.0 } else { 0.0 };
                assert!((a.overlap(&b.values) - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn largest_sample_is_positive() {
        let g = grid(10);
        let a = DMatrix::from_fn(10, 10, |i, j| ((i + 2 * j) as f64).sin());
        let sym = (&a + a.transpose()) / (&a + a.transpose()).norm();
        let spectrum = decompose_sector(&kernel(1, sym), &g).unwrap();
        for n in 0..10 {
            let mode = spectrum.mode(n).unwrap();
            let root: Vec<f64> = g.measure().iter().map(|v| v.sqrt()).collect();
            let v: Vec<f64> = mode.values.iter().zip(&root).map(|(x, r)| x * r).collect();
            let peak = v
                .iter()
                .copied()
                .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            assert!(peak > 0.0);
        }
    }

    #[test]
    fn rejects_bad_kernels() {
        let g = grid(4);
        let mut asym = DMatrix::identity(4, 4) * 0.5;
        asym[(0, 1)] = 1e-6;
        assert!(matches!(
            decompose_sector(&kernel(0, asym), &g),
            Err(SchmidtError::AsymmetricKernel(_))
        ));
        let mut nan = DMatrix::identity(4, 4) * 0.5;
        nan[(2, 2)] = f64::NAN;
        assert!(matches!(
            decompose_sector(&kernel(0, nan), &g),
            Err(SchmidtError::NonFiniteKernel)
        ));
        assert!(matches!(
            decompose_sector(&kernel(0, DMatrix::zeros(4, 4)), &g),
            Err(SchmidtError::EmptySector(0))
        ));
        assert!(decompose_sector(&kernel(0, DMatrix::identity(3, 3)), &g).is_err());
    }

    #[test]
    fn single_sector_table_equals_gamma_table() {
        let g = grid(8);
        let sym = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            0.8, 0.6, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ]));
        let spectrum = decompose_sector(&kernel(0, sym), &g).unwrap();
        let table = assemble_spectrum(&[spectrum.clone()], &[(0, 1.0)]).unwrap();
        let lambdas: Vec<f64> = table.entries.iter().map(|e| e.lambda).collect();
        assert_eq!(lambdas.len(), 2);
        assert_relative_eq!(lambdas[0], 0.64, max_relative = 1e-12);
        assert_relative_eq!(lambdas[1], 0.36, max_relative = 1e-12);
        assert!(assemble_spectrum(&[spectrum.clone()], &[(1, 1.0)]).is_err());
        assert!(assemble_spectrum(&[spectrum], &[]).is_err());
    }

    #[test]
    fn node_counting_ignores_tiny_tails() {
        let nodes: Vec<f64> = (1..=50).map(|i| i as f64 * 0.1).collect();
        let values: Vec<f64> = nodes
            .iter()
            .map(|&k| {
                (1.0 - k * k) * (-k * k).exp()
                    + if k > 4.0 {
                        1e-9 * (10.0 * k).sin()
                    } else {
                        0.0
                    }
            })
            .collect();
        let measure: Vec<f64> = nodes.iter().map(|k| 0.1 * k).collect();
        assert_eq!(count_nodes(&values, &measure, NODE_THRESHOLD), 1);
    }
}
