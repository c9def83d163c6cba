// Numerical double-Gaussian spectrum against the closed form.

use std::sync::Arc;

use biphoton_schmidt::{
    analytic_k, analytic_mode, decompose, AmplitudeModel, Family, GaussianSpectrumParams,
    SolverConfig,
};

pub fn run_example() -> biphoton_schmidt::Result<()> {
    let config = SolverConfig::default();
    println!(
        "{:>6} {:>12} {:>12} {:>10}",
        "bσ", "K numeric", "K exact", "rel err"
    );
    for t in [0.2, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let model = AmplitudeModel::scaled(Family::DoubleGaussian, t)?;
        let result = decompose(&model, &config)?;
        let exact = analytic_k(t)?;
        println!(
            "{t:>6} {:>12.8} {:>12.8} {:>10.2e}",
            result.k(),
            exact,
            (result.k() - exact).abs() / exact
        );
    }

    let t = 0.25;
    let params = GaussianSpectrumParams::new(t)?;
    let result = decompose(&AmplitudeModel::scaled(Family::DoubleGaussian, t)?, &config)?;
    println!("\nbσ = {t}, ξ = {:.4}", params.xi);
    for e in result.spectrum.entries.iter().take(6) {
        println!(
            "    λ({}, {:+}) = {:.8}  exact {:.8}",
            e.n,
            e.m,
            e.lambda,
            params.lambda(e.n, e.m)
        );
    }
    let grid = Arc::clone(&result.grid);
    for (n, m) in [(0, 0), (1, 0), (0, 1), (2, 1)] {
        let exact = analytic_mode(n, m, t, &grid)?;
        let overlap = result.mode(n, m)?.overlap(&exact.values);
        println!(
            "    |<φ_exact|φ_numeric>| for ({n}, {m}) = {:.10}",
            overlap.abs()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> biphoton_schmidt::Result<()> {
    run_example()
}
