//! One magnon on a periodic ring: plane waves with k = 2πn/L.

use coordinate_bethe::ansatz::{build_state, Momenta};
use coordinate_bethe::hamiltonian::{assemble, ModelSpec};
use coordinate_bethe::oracle::relative_residual;

fn main() -> coordinate_bethe::Result<()> {
    let length = 6;
    let spec = ModelSpec::periodic(length);
    let h = assemble(&spec)?;
    for n in 0..length {
        let k = 2.0 * std::f64::consts::PI * n as f64 / length as f64;
        let state = build_state(&spec, &Momenta::real(&[k]))?;
        let res = relative_residual(&h, &state.vector, state.energy)?;
        println!("n={n} k={k:.4} E={:.6} residual={res:.1e}", state.energy.re);
    }
    Ok(())
}
