//! Two magnons on a periodic ring: sweep the Bethe equations and compare
//! with exact diagonalization of the sector.

use coordinate_bethe::basis::SectorBasis;
use coordinate_bethe::bethe::{BetheProblem, SolverSettings};
use coordinate_bethe::hamiltonian::{assemble, ModelSpec};
use coordinate_bethe::oracle::{dense_eigenvalues, match_spectra};

fn main() -> coordinate_bethe::Result<()> {
    let (length, m) = (8, 2);
    let spec = ModelSpec::periodic(length);
    let problem = BetheProblem::new(spec, m)?;
    let report = problem.sweep(&problem.sweep_seeds(), &SolverSettings::default())?;

    let block = assemble(&spec)?.sector_block(&SectorBasis::new(length, m)?)?;
    let exact = dense_eigenvalues(&block)?.eigenvalues;
    let energies: Vec<_> = report.solutions.iter().map(|s| s.energy).collect();
    let matching = match_spectra(&energies, &exact, 1e-8);

    for s in &report.solutions {
        println!("q={:?} E={:+.8} {:+.2e}i", s.quantum_numbers, s.energy.re, s.energy.im);
    }
    println!("{} roots, coverage {:.2} of {} levels", report.solutions.len(), matching.coverage, exact.len());
    Ok(())
}
