// Leading radial modes of the sinc amplitude and their node structure.

use biphoton_schmidt::{decompose, AmplitudeModel, Family, SolverConfig};

pub fn run_example() -> biphoton_schmidt::Result<()> {
    let model = AmplitudeModel::scaled(Family::GaussianSinc, 0.25)?;
    let result = decompose(&model, &SolverConfig::default())?;
    println!(
        "weight of the n = 0 manifold: {:.4}",
        result.spectrum.radial_manifold_weight(0)
    );
    for m in 0..=3 {
        let sector = result.sector(m).expect("leading sectors are present");
        for n in 0..=3 {
            let mode = result.mode(n, m)?;
            println!(
                "  (n={n}, m={m})  γ = {:.5}  nodes = {}  norm = {:.12}",
                sector.gammas[n],
                mode.node_count(),
                mode.overlap(&mode.values)
            );
        }
    }

    let mode = result.mode(1, 0)?;
    println!("\nk, phi_1_0");
    for (k, v) in mode.grid.nodes().iter().zip(&mode.values).step_by(20) {
        println!("{k:.4},{v:.6e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> biphoton_schmidt::Result<()> {
    run_example()
}
