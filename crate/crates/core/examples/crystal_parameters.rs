// From crystal length and pump frequency to the dimensionless bσ⊥.

use biphoton_schmidt::{analytic_k, crystal_b, AmplitudeModel, Family};

pub fn run_example() -> biphoton_schmidt::Result<()> {
    let omega = 2.0 * std::f64::consts::PI * 299_792_458.0 / 405e-9;
    for length in [1e-3, 2e-3, 5e-3] {
        let b = crystal_b(length, omega)?;
        // transverse momentum width of the pump, m⁻¹
        for sigma in [2e4, 5e4, 2e5] {
            let model = AmplitudeModel::new(Family::DoubleGaussian, sigma, b)?;
            let t = model.control_parameter();
            println!(
                "L = {:.0} mm, σ⊥ = {:.0e} m⁻¹: b = {:.3} µm, bσ⊥ = {t:.4}, K_gauss = {:.3}",
                length * 1e3,
                sigma,
                b * 1e6,
                analytic_k(t)?
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> biphoton_schmidt::Result<()> {
    run_example()
}
