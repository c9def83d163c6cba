// Full decomposition of the Gaussian×sinc amplitude at a few values of bσ⊥.

use biphoton_schmidt::{decompose, AmplitudeModel, Family, SolverConfig};

pub fn run_example() -> biphoton_schmidt::Result<()> {
    let config = SolverConfig::default();
    for t in [0.25, 0.3, 1.0] {
        let model = AmplitudeModel::scaled(Family::GaussianSinc, t)?;
        let result = decompose(&model, &config)?;
        println!(
            "bσ = {t:<5} K = {:>8.4}  E = {:.4} bits  |m| <= {}  coverage {:.8}",
            result.k(),
            result.spectrum.entropy_bits,
            result.m_max,
            result.spectrum.coverage
        );
        for e in result.spectrum.entries.iter().take(5) {
            println!("    λ({}, {:+}) = {:.6}", e.n, e.m, e.lambda);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> biphoton_schmidt::Result<()> {
    run_example()
}
