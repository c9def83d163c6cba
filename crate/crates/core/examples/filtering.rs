// Raising the Schmidt number by discarding low transverse wavevectors.

use biphoton_schmidt::{apply_filter, AmplitudeModel, Family, SolverConfig};

pub fn run_example() -> biphoton_schmidt::Result<()> {
    let config = SolverConfig::default();
    for (t, mu_c) in [(0.25, 2.0), (1.0, 1.0)] {
        let model = AmplitudeModel::scaled(Family::GaussianSinc, t)?;
        let report = apply_filter(&model, mu_c, &config)?.report;
        println!(
            "bσ = {t}, μc = {mu_c}: K {:.3} -> {:.3}, acceptance {:.4}",
            report.k_original, report.k_filtered, report.acceptance
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> biphoton_schmidt::Result<()> {
    run_example()
}
