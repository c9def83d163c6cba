//! Joint probability on the equal-magnitude subspace `|k| = |q|`.

use std::f64::consts::PI;

use crate::amplitude::AmplitudeModel;
use crate::error::{invalid, Result};

/// `|C(k, k, Δθ)|²` on a uniform `(k, Δθ)` grid, scaled so the largest sample
/// equals one.
#[derive(Debug, Clone)]
pub struct RidgeSlice {
    pub k: Vec<f64>,
    pub dtheta: Vec<f64>,
    /// `values[i][l]` at `k[i]`, `dtheta[l]`.
    pub values: Vec<Vec<f64>>,
    /// Location of the first sample equal to one.
    pub peak: (f64, f64),
}

impl RidgeSlice {
    /// `Σ_k k |C(k, k, Δθ)|²` as a function of `Δθ`, and the angle where it
    /// is largest.
    pub fn angular_marginal_peak(&self) -> (Vec<f64>, f64) {
        let marginal: Vec<f64> = (0..self.dtheta.len())
            .map(|l| {
                self.k
                    .iter()
                    .zip(&self.values)
                    .map(|(k, row)| k * row[l])
                    .sum()
            })
            .collect();
        let (l, _) =
            marginal.iter().enumerate().fold(
                (0, f64::MIN),
                |best, (l, &v)| if v > best.1 { (l, v) } else { best },
            );
        let angle = self.dtheta[l];
        (marginal, angle)
    }

    /// For each `k`, the angle where the row is largest.
    pub fn row_maxima(&self) -> Vec<(f64, f64)> {
        self.k
            .iter()
            .zip(&self.values)
            .map(|(&k, row)| {
                let (l, _) = row.iter().enumerate().fold((0, f64::MIN), |best, (l, &v)| {
                    if v > best.1 {
                        (l, v)
                    } else {
                        best
                    }
                });
                (k, self.dtheta[l])
            })
            .collect()
    }
}

/// `k` runs over `n_k` points spanning `[0, k_max]`; `Δθ` over `n_theta`
/// points spanning `[0, 2π)`, which includes `π` for even `n_theta`.
pub fn ridge_slice(
    model: &AmplitudeModel,
    k_max: f64,
    n_k: usize,
    n_theta: usize,
) -> Result<RidgeSlice> {
    if n_k < 2 {
        return Err(invalid("n_k", "need at least two radial samples"));
    }
    if n_theta < 2 {
        return Err(invalid("n_theta", "need at least two angular samples"));
    }
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(invalid("k_max", format!("{k_max} must be positive")));
    }
    let k: Vec<f64> = (0..n_k)
        .map(|i| k_max * i as f64 / (n_k - 1) as f64)
        .collect();
    let dtheta: Vec<f64> = (0..n_theta)
        .map(|l| 2.0 * PI * l as f64 / n_theta as f64)
        .collect();
    let mut values: Vec<Vec<f64>> = k
        .iter()
        .map(|&kk| {
            dtheta
                .iter()
                .map(|&d| model.shape(kk, kk, d.cos()).powi(2))
                .collect()
        })
        .collect();
    let mut peak_value = 0.0;
    let mut peak = (0.0, 0.0);
    for (i, row) in values.iter().enumerate() {
        for (l, &v) in row.iter().enumerate() {
            if v > peak_value {
                peak_value = v;
                peak = (k[i], dtheta[l]);
            }
        }
    }
    if peak_value > 0.0 {
        for row in &mut values {
            row.iter_mut().for_each(|v| *v /= peak_value);
        }
    }
    Ok(RidgeSlice {
        k,
        dtheta,
        values,
        peak,
    })
}

/// Full width at half maximum in `Δθ` of `|C(k, k, Δθ)|²` around its maximum,
/// from `samples` uniform angles and linear interpolation of the crossings.
pub fn angular_fwhm(model: &AmplitudeModel, k: f64, samples: usize) -> Result<f64> {
    if samples < 8 {
        return Err(invalid("samples", "need at least eight samples"));
    }
    let step = 2.0 * PI / samples as f64;
    let f = |l: isize| {
        let d = l as f64 * step;
        model.shape(k, k, d.cos()).powi(2)
    };
    let n = samples as isize;
    let (peak_idx, peak) =
        (0..n)
            .map(|l| (l, f(l)))
            .fold((0, f64::MIN), |b, x| if x.1 > b.1 { x } else { b });
    if peak <= 0.0 {
        return Err(invalid(
            "k",
            format!("amplitude vanishes on the ring k = {k}"),
        ));
    }
    let half = 0.5 * peak;
    let crossing = |dir: isize| -> f64 {
        let mut l = peak_idx;
        for _ in 0..n / 2 {
            let next = l + dir;
            let (a, b) = (f(l), f(next));
            if b < half {
                let frac = (a - half) / (a - b);
                return ((l - peak_idx) as f64 + dir as f64 * frac).abs() * step;
            }
            l = next;
        }
        PI
    };
    Ok(crossing(1) + crossing(-1))
}
