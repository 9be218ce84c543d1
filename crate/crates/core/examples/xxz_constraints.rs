//! Scan the XXZ boundary constraint and engineer `s` so one triplet holds.

use coordinate_bethe::c64;
use coordinate_bethe::xxz::{constraint_defects, engineer_s, Sign, XxzParams};

fn main() -> coordinate_bethe::Result<()> {
    let mut p = XxzParams {
        q: c64(1.3, 0.2),
        alpha: c64(0.7, 0.0),
        beta: c64(-0.4, 0.1),
        gamma: c64(0.5, 0.0),
        delta: c64(0.9, 0.0),
        s: c64(0.0, 0.0),
        length: 4,
    };
    p.s = engineer_s(&p, 2, Sign::Plus, Sign::Minus)?;
    println!("s = {:.6}", p.s);
    for t in constraint_defects(&p)? {
        match &t.defect {
            Ok(d) => println!("n={} ({}, {}) |defect|={:.3e}{}", t.n, t.eps, t.eps_prime, d.norm(), if t.satisfied() { "  <- satisfied" } else { "" }),
            Err(e) => println!("n={} ({}, {}) error: {e}", t.n, t.eps, t.eps_prime),
        }
    }
    Ok(())
}
