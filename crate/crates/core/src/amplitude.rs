//! Transverse two-photon amplitude families.
//!
//! Both families share the Gaussian pump factor `exp(-|k + q|² / σ²)` and
//! differ in the phase-matching factor of `|k - q|²`:
//!
//! * [`Family::DoubleGaussian`]: `exp(-b² |k - q|²)`
//! * [`Family::GaussianSinc`]: `sinc(b² |k - q|²)` with `sinc(x) = sin(x) / x`
//!
//! An optional radial cutoff `μ_c` zeroes the amplitude whenever either
//! wavevector magnitude falls below it. Amplitudes are real, even in the
//! relative angle, symmetric under `k ↔ q` and invariant under joint rotation,
//! so every evaluation reduces to `(|k|, |q|, θ_k - θ_q)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SchmidtError};
use crate::quadrature::RadialGrid;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[serde(rename = "gaussian")]
    DoubleGaussian,
    #[serde(rename = "sinc")]
    GaussianSinc,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::DoubleGaussian => "gaussian",
            Family::GaussianSinc => "sinc",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = SchmidtError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "double-gaussian" => Ok(Family::DoubleGaussian),
            "sinc" | "gaussian-sinc" => Ok(Family::GaussianSinc),
            other => Err(invalid("family", format!("unknown family `{other}`"))),
        }
    }
}

/// Polar form of a transverse wavevector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseVector {
    pub k_mag: f64,
    pub theta: f64,
}

impl TransverseVector {
    pub fn new(k_mag: f64, theta: f64) -> Result<Self> {
        if !(k_mag.is_finite() && k_mag >= 0.0) {
            return Err(invalid("k_mag", format!("{k_mag} must be finite and >= 0")));
        }
        if !theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        Ok(Self {
            k_mag,
            theta: theta.rem_euclid(2.0 * PI),
        })
    }

    pub fn cartesian(&self) -> (f64, f64) {
        (self.k_mag * self.theta.cos(), self.k_mag * self.theta.sin())
    }
}

/// Unnormalized `sin(x) / x`, with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeModel {
    family: Family,
    sigma_perp: f64,
    b: f64,
    cutoff: f64,
    norm_constant: Option<f64>,
}

impl AmplitudeModel {
    /// Model in physical units: `sigma_perp` is an inverse length and `b` a
    /// length; wavevectors passed to [`evaluate`](Self::evaluate) use the
    /// same inverse-length unit as `sigma_perp`.
    pub fn new(family: Family, sigma_perp: f64, b: f64) -> Result<Self> {
        if !(sigma_perp.is_finite() && sigma_perp > 0.0) {
            return Err(invalid(
                "sigma_perp",
                format!("{sigma_perp} must be positive"),
            ));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(invalid("b", format!("{b} must be positive")));
        }
        Ok(Self {
            family,
            sigma_perp,
            b,
            cutoff: 0.0,
            norm_constant: None,
        })
    }

    /// Model in σ⊥-scaled units (σ⊥ = 1), fixed by the control parameter bσ⊥.
    pub fn scaled(family: Family, b_sigma: f64) -> Result<Self> {
        Self::new(family, 1.0, b_sigma)
    }

    /// Same physics expressed with σ⊥ = 1. The cutoff is rescaled accordingly
    /// and normalization is dropped.
    pub fn to_scaled(&self) -> Self {
        Self {
            family: self.family,
            sigma_perp: 1.0,
            b: self.control_parameter(),
            cutoff: self.cutoff / self.sigma_perp,
            norm_constant: None,
        }
    }

    /// Returns a copy with radial cutoff `mu_c`. Normalization is cleared.
    pub fn with_cutoff(&self, mu_c: f64) -> Result<Self> {
        if !(mu_c.is_finite() && mu_c >= 0.0) {
            return Err(invalid("cutoff", format!("{mu_c} must be finite and >= 0")));
        }
        Ok(Self {
            cutoff: mu_c,
            norm_constant: None,
            ..self.clone()
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn sigma_perp(&self) -> f64 {
        self.sigma_perp
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn norm_constant(&self) -> Option<f64> {
        self.norm_constant
    }

    pub fn is_normalized(&self) -> bool {
        self.norm_constant.is_some()
    }

    /// The dimensionless product bσ⊥.
    pub fn control_parameter(&self) -> f64 {
        self.b * self.sigma_perp
    }

    /// Default radial truncation `r·σ⊥·max(1, 1/(bσ⊥))`.
    pub fn default_k_max(&self, factor: f64) -> f64 {
        factor * self.sigma_perp * (1.0 / self.control_parameter()).max(1.0)
    }

    /// Gauss–Legendre grid on `[cutoff, k_max]`.
    pub fn radial_grid(&self, k_max: f64, count: usize) -> Result<RadialGrid> {
        RadialGrid::gauss_legendre(self.cutoff, k_max, count)
    }

    /// Amplitude without the normalization constant, as a function of the two
    /// magnitudes and `cos(θ_k - θ_q)`.
    #[inline]
    pub fn shape(&self, k: f64, q: f64, cos_dtheta: f64) -> f64 {
        if self.cutoff > 0.0 && (k < self.cutoff || q < self.cutoff) {
            return 0.0;
        }
        let radial = k * k + q * q;
        let cross = 2.0 * k * q * cos_dtheta;
        let sum_sq = (radial + cross).max(0.0);
        let diff_sq = (radial - cross).max(0.0);
        let pump = (-sum_sq / (self.sigma_perp * self.sigma_perp)).exp();
        let b2 = self.b * self.b;
        let phase_matching = match self.family {
            Family::DoubleGaussian => (-b2 * diff_sq).exp(),
            Family::GaussianSinc => sinc(b2 * diff_sq),
        };
        pump * phase_matching
    }

    pub fn evaluate(&self, k: TransverseVector, q: TransverseVector) -> Result<f64> {
        self.evaluate_polar(k.k_mag, q.k_mag, k.theta - q.theta)
    }

    /// Normalized amplitude at magnitudes `k`, `q` and relative angle `dtheta`.
    pub fn evaluate_polar(&self, k: f64, q: f64, dtheta: f64) -> Result<f64> {
        let norm = self.norm_constant.ok_or(SchmidtError::NotNormalized)?;
        Ok(norm * self.shape(k, q, dtheta.cos()))
    }

    /// `∫∫ |shape|² d²k d²q` on the product of `grid` and an `n_theta`-point
    /// periodic trapezoid rule in the relative angle.
    pub fn shape_norm_squared(&self, grid: &RadialGrid, n_theta: usize) -> Result<f64> {
        if n_theta == 0 {
            return Err(invalid("n_theta", "must be positive"));
        }
        let cosines = angle_cosines(n_theta);
        let measure = grid.measure();
        let nodes = grid.nodes();
        let rows: Vec<f64> = (0..nodes.len())
            .into_par_iter()
            .map(|i| {
                let mut row = 0.0;
                for j in i..nodes.len() {
                    let ring: f64 = cosines
                        .iter()
                        .map(|&c| {
                            let v = self.shape(nodes[i], nodes[j], c);
                            v * v
                        })
                        .sum();
                    let factor = if i == j { 1.0 } else { 2.0 };
                    row += factor * measure[i] * measure[j] * ring;
                }
                row
            })
            .collect();
        let total: f64 = rows.iter().sum();
        Ok(2.0 * PI * (2.0 * PI / n_theta as f64) * total)
    }

    /// Fixes the normalization constant so the total probability on the given
    /// quadrature equals one. Repeated calls give the same constant.
    pub fn normalize(&self, grid: &RadialGrid, n_theta: usize) -> Result<Self> {
        let integral = self.shape_norm_squared(grid, n_theta)?;
        if !(integral.is_finite() && integral > 1e-300) {
            return Err(SchmidtError::DegenerateNormalization(integral));
        }
        Ok(Self {
            norm_constant: Some(integral.sqrt().recip()),
            ..self.clone()
        })
    }
}

pub(crate) fn angle_cosines(n_theta: usize) -> Vec<f64> {
    (0..n_theta)
        .map(|l| (2.0 * PI * l as f64 / n_theta as f64).cos())
        .collect()
}

/// Phase-matching length `b = sqrt(c L / (4 ω_p))` in metres.
pub fn crystal_b(crystal_length: f64, pump_frequency: f64) -> Result<f64> {
    if !(crystal_length.is_finite() && crystal_length > 0.0) {
        return Err(invalid(
            "crystal_length",
            format!("{crystal_length} must be positive"),
        ));
    }
    if !(pump_frequency.is_finite() && pump_frequency > 0.0) {
        return Err(invalid(
            "pump_frequency",
            format!("{pump_frequency} must be positive"),
        ));
    }
    Ok((SPEED_OF_LIGHT * crystal_length / (4.0 * pump_frequency)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn normalized(family: Family, t: f64) -> AmplitudeModel {
        let model = AmplitudeModel::scaled(family, t).unwrap();
        let grid = model.radial_grid(model.default_k_max(8.0), 120).unwrap();
        model.normalize(&grid, 128).unwrap()
    }

    #[test]
    fn evaluate_requires_normalization() {
        let model = AmplitudeModel::scaled(Family::GaussianSinc, 0.5).unwrap();
        assert!(matches!(
            model.evaluate_polar(1.0, 1.0, 0.0),
            Err(SchmidtError::NotNormalized)
        ));
    }

    #[test]
    fn gaussian_antiparallel_pump_factor_is_one() {
        let t = 0.4;
        let model = normalized(Family::DoubleGaussian, t);
        let k = 1.3;
        let got = model.evaluate_polar(k, k, PI).unwrap();
        let expected = model.norm_constant().unwrap() * (-4.0 * t * t * k * k).exp();
        assert_relative_eq!(got, expected, max_relative = 1e-14);
    }

    #[test]
    fn sinc_origin_value_is_norm_constant() {
        let model = normalized(Family::GaussianSinc, 0.7);
        let got = model.evaluate_polar(0.0, 0.0, 0.3).unwrap();
        assert_eq!(got, model.norm_constant().unwrap());
    }

    #[test]
    fn cutoff_zeroes_low_wavevectors() {
        let model = AmplitudeModel::scaled(Family::GaussianSinc, 0.25)
            .unwrap()
            .with_cutoff(2.0)
            .unwrap();
        let grid = model.radial_grid(48.0, 80).unwrap();
        let model = model.normalize(&grid, 128).unwrap();
        assert_eq!(model.evaluate_polar(1.5, 3.0, 2.0).unwrap(), 0.0);
        assert_eq!(model.evaluate_polar(3.0, 1.999, 2.0).unwrap(), 0.0);
        assert!(model.evaluate_polar(2.5, 2.5, PI).unwrap() > 0.0);
    }

    #[test]
    fn normalize_is_idempotent() {
        let model = AmplitudeModel::scaled(Family::GaussianSinc, 0.5).unwrap();
        let grid = model.radial_grid(model.default_k_max(8.0), 80).unwrap();
        let once = model.normalize(&grid, 64).unwrap();
        let twice = once.normalize(&grid, 64).unwrap();
        assert_eq!(once.norm_constant(), twice.norm_constant());
    }

    #[test]
    fn gaussian_norm_matches_closed_form() {
        // ∫∫ exp(-2|k+q|²/σ²) exp(-2b²|k-q|²) d²k d²q = π²σ²/(16 b²)
        for (sigma, b) in [(1.0, 0.25), (2.0, 0.3), (0.5, 4.0)] {
            let model = AmplitudeModel::new(Family::DoubleGaussian, sigma, b).unwrap();
            let grid = model.radial_grid(model.default_k_max(8.0), 200).unwrap();
            let n = model
                .normalize(&grid, 512)
                .unwrap()
                .norm_constant()
                .unwrap();
            let exact = (16.0 * b * b / (PI * PI * sigma * sigma)).sqrt();
            assert_relative_eq!(n, exact, max_relative = 1e-10);
        }
    }

    #[test]
    fn sinc_total_probability_is_one() {
        let model = AmplitudeModel::scaled(Family::GaussianSinc, 0.25).unwrap();
        let grid = model.radial_grid(model.default_k_max(8.0), 200).unwrap();
        let model = model.normalize(&grid, 512).unwrap();
        let n = model.norm_constant().unwrap();
        let total = n * n * model.shape_norm_squared(&grid, 512).unwrap();
        assert!((total - 1.0).abs() < 1e-8, "total = {total}");
    }

    #[test]
    fn sinc_norm_close_to_untruncated_integral() {
        // ∫ sinc²(b²|v|²) d²v = π²/(2b²) → total π³σ²/(16 b²); the sinc tail
        // beyond k_max carries O(1/(b k_max)²) of the weight
        let t = 0.5;
        let model = AmplitudeModel::scaled(Family::GaussianSinc, t).unwrap();
        let grid = model.radial_grid(model.default_k_max(8.0), 200).unwrap();
        let integral = model.shape_norm_squared(&grid, 512).unwrap();
        let exact = PI.powi(3) / (16.0 * t * t);
        assert!(
            (integral / exact - 1.0).abs() < 5e-3,
            "{integral} vs {exact}"
        );
    }

    #[test]
    fn crystal_b_values() {
        let b = crystal_b(2e-3, 4.652e15).unwrap();
        assert_relative_eq!(b, 5.6765e-6, max_relative = 1e-4);
        let doubled = crystal_b(4e-3, 4.652e15).unwrap();
        assert_relative_eq!(doubled / b, 2f64.sqrt(), max_relative = 1e-14);
        assert!(crystal_b(0.0, 4.652e15).is_err());
        assert!(crystal_b(1e-3, -1.0).is_err());
    }

    #[test]
    fn scaled_preserves_control_parameter() {
        let model = AmplitudeModel::new(Family::GaussianSinc, 2.0e5, 1.5e-6)
            .unwrap()
            .with_cutoff(4.0e5)
            .unwrap();
        let scaled = model.to_scaled();
        assert_relative_eq!(scaled.b(), 0.3, max_relative = 1e-14);
        assert_relative_eq!(scaled.cutoff(), 2.0, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn symmetries(
            t in 0.1f64..5.0,
            k in 0.0f64..6.0,
            q in 0.0f64..6.0,
            tk in 0.0f64..6.3,
            tq in 0.0f64..6.3,
            alpha in -10.0f64..10.0,
            gaussian in any::<bool>(),
        ) {
            let family = if gaussian { Family::DoubleGaussian } else { Family::GaussianSinc };
            let model = AmplitudeModel::scaled(family, t).unwrap();
            let grid = model.radial_grid(model.default_k_max(8.0), 16).unwrap();
            let model = model.normalize(&grid, 16).unwrap();
            let kv = TransverseVector::new(k, tk).unwrap();
            let qv = TransverseVector::new(q, tq).unwrap();
            let base = model.evaluate(kv, qv).unwrap();
            let swapped = model.evaluate(qv, kv).unwrap();
            let rotated = model
                .evaluate(
                    TransverseVector::new(k, tk + alpha).unwrap(),
                    TransverseVector::new(q, tq + alpha).unwrap(),
                )
                .unwrap();
            let mirrored = model.evaluate_polar(k, q, -(tk - tq)).unwrap();
            let scale = base.abs().max(1e-300) * 1e-9 + 1e-14;
            prop_assert!((base - swapped).abs() <= scale);
            prop_assert!((base - rotated).abs() <= scale);
            prop_assert!((base - mirrored).abs() <= scale);
        }

        #[test]
        fn sinc_is_even(x in -50.0f64..50.0) {
            prop_assert_eq!(sinc(x), sinc(-x));
        }

        #[test]
        fn polar_matches_cartesian(
            t in 0.1f64..3.0,
            k in 0.0f64..4.0, q in 0.0f64..4.0,
            tk in 0.0f64..6.3, tq in 0.0f64..6.3,
        ) {
            let model = AmplitudeModel::scaled(Family::GaussianSinc, t).unwrap();
            let kv = TransverseVector::new(k, tk).unwrap();
            let qv = TransverseVector::new(q, tq).unwrap();
            let (kx, ky) = kv.cartesian();
            let (qx, qy) = qv.cartesian();
            let sum_sq = (kx + qx).powi(2) + (ky + qy).powi(2);
            let diff_sq = (kx - qx).powi(2) + (ky - qy).powi(2);
            let direct = (-sum_sq).exp() * sinc(t * t * diff_sq);
            let polar = model.shape(k, q, (tk - tq).cos());
            prop_assert!((direct - polar).abs() < 1e-12);
        }
    }
}
