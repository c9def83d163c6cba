// The joint probability on |k| = |q| and the angular width of the ridge.

use std::f64::consts::PI;

use biphoton_schmidt::slice::{angular_fwhm, ridge_slice};
use biphoton_schmidt::{AmplitudeModel, Family};

pub fn run_example() -> biphoton_schmidt::Result<()> {
    for t in [0.25, 0.5] {
        let model = AmplitudeModel::scaled(Family::GaussianSinc, t)?;
        let slice = ridge_slice(&model, 8.0, 161, 256)?;
        let (_, angle) = slice.angular_marginal_peak();
        println!(
            "bσ = {t}: peak at k = {:.3}, Δθ = {:.4}; marginal peaks at Δθ/π = {:.4}",
            slice.peak.0,
            slice.peak.1,
            angle / PI
        );
        for k in [1.0, 2.0, 2.0 / t] {
            println!(
                "    FWHM at k = {k:<4}: {:.4} rad",
                angular_fwhm(&model, k, 1 << 14)?
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> biphoton_schmidt::Result<()> {
    run_example()
}
