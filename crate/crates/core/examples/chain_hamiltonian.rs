//! Builds the finite chain for both potentials and checks its symmetries.

use wsmoire::lattice::{build_hamiltonian, symmetry_residuals, LatticeSpec};

fn main() -> wsmoire::Result<()> {
    let spec = LatticeSpec::linear(1.0, 0.46, 8, 0.25)?;
    let h = build_hamiltonian(&spec)?;
    println!("H for N = 8, J = 1, beta = 0.46, omega = 0.25:");
    for r in 0..h.dimension() {
        let row: Vec<String> = (0..h.dimension())
            .map(|c| {
                let z = h.get(r, c);
                if z.norm() == 0.0 { "      .      ".into() } else { format!("{:>5.2}{:+.2}i", z.re, z.im) }
            })
            .collect();
        println!("  {}", row.join(" "));
    }
    println!("complex symmetric: {}", h.is_symmetric());

    let res = symmetry_residuals(&LatticeSpec::linear(1.0, 0.46, 64, 0.25)?)?;
    println!("ramped translation residual {:.1e}, reflection residual {:.1e}", res.ramped, res.reflection);

    let log = LatticeSpec::logarithmic(1.0, 0.46, 4000, 2e-3, 12.6)?;
    for l in [log.first_site(), 0, log.last_site()] {
        println!("l = {l:>5}: V = {:.4}, local omega = {:.5}, J/omega = {:.3}", log.potential_value(l)?, log.local_slope(l)?, 1.0 / log.local_slope(l)?);
    }
    Ok(())
}
