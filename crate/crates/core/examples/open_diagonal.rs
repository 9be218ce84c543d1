//! Open chain with diagonal boundaries: solve, build the states and check
//! H Ψ = E Ψ.

use coordinate_bethe::ansatz::build_state;
use coordinate_bethe::bethe::{BetheProblem, SolverSettings};
use coordinate_bethe::hamiltonian::{assemble, ModelSpec, XxxBoundary};
use coordinate_bethe::oracle::relative_residual;
use coordinate_bethe::c64;

fn main() -> coordinate_bethe::Result<()> {
    let b = XxxBoundary::diagonal(c64(0.3, 0.0), c64(0.1, 0.0), c64(0.2, 0.0), c64(0.4, 0.0));
    let spec = ModelSpec::xxx_open(6, b);
    let h = assemble(&spec)?;
    let problem = BetheProblem::new(spec, 2)?;
    let report = problem.sweep(&problem.sweep_seeds(), &SolverSettings::default())?;
    for s in &report.solutions {
        let state = build_state(&spec, &s.momenta())?;
        let res = relative_residual(&h, &state.vector, state.energy)?;
        println!("E={:+.8} residual={res:.1e} k={:.4?}", s.energy.re, s.momenta);
    }
    Ok(())
}
