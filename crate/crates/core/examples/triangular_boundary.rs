//! Upper-triangular left boundary: the Bethe state mixes magnon numbers
//! through the tail amplitudes, yet stays an eigenvector of the full H.

use coordinate_bethe::ansatz::{build_state, Momenta};
use coordinate_bethe::bethe::{BetheProblem, SolverSettings};
use coordinate_bethe::hamiltonian::{assemble, ModelSpec, XxxBoundary};
use coordinate_bethe::oracle::relative_residual;
use coordinate_bethe::c64;

fn main() -> coordinate_bethe::Result<()> {
    let b = XxxBoundary::diagonal(c64(0.3, 0.0), c64(0.1, 0.0), c64(0.2, 0.0), c64(0.4, 0.0)).with_mu(c64(2.0, 1.0));
    let spec = ModelSpec::xxx_open(5, b);
    let h = assemble(&spec)?;
    println!("upper triangular in ascending sectors: {}", coordinate_bethe::hamiltonian::is_sector_block_upper_triangular(&h));

    let problem = BetheProblem::new(spec, 2)?;
    let report = problem.sweep(&problem.quantum_seeds(), &SolverSettings::default())?;
    for s in report.solutions.iter().take(4) {
        let state = build_state(&spec, &Momenta::new(s.momenta.clone()))?;
        let res = relative_residual(&h, &state.vector, state.energy)?;
        println!("n=2 E={:+.8} residual={res:.1e}", s.energy.re);
    }
    Ok(())
}
