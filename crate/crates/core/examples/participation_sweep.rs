// Schmidt number against bσ⊥ for both families on a log-spaced sweep.

use biphoton_schmidt::{analytic_k, decompose, AmplitudeModel, Family, SolverConfig};

pub fn run_example() -> biphoton_schmidt::Result<()> {
    let config = SolverConfig {
        grid_n: 120,
        ..SolverConfig::default()
    };
    let points = 9;
    println!("b_sigma,K_sinc,K_gauss");
    for i in 0..points {
        let t = 0.2 * 20f64.powf(i as f64 / (points - 1) as f64);
        let sinc = decompose(&AmplitudeModel::scaled(Family::GaussianSinc, t)?, &config)?;
        println!("{t:.5},{:.5},{:.5}", sinc.k(), analytic_k(t)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> biphoton_schmidt::Result<()> {
    run_example()
}
