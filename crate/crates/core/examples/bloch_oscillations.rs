//! Gaussian wave packet on a 100-site chain at a PT-symmetric and a PT-broken point
//! of the beta = 0.46 J line.

use std::f64::consts::PI;

use wsmoire::dynamics::{bloch_period_estimate, evolve, growth_rate, EvolutionConfig};
use wsmoire::floquet::{classify, monodromy, BulkParams, DEFAULT_CLASSIFY_TOL};
use wsmoire::lattice::{gaussian_state, LatticeSpec};

fn main() -> wsmoire::Result<()> {
    let psi = gaussian_state(100, 0.01)?;
    for jw in [3.8, 3.0] {
        let omega = 1.0 / jw;
        let spec = LatticeSpec::linear(1.0, 0.46, 100, omega)?;
        let m = monodromy(&BulkParams::new(1.0, 0.46, omega)?)?;
        let class = classify(&m, DEFAULT_CLASSIFY_TOL)?;
        let rec = evolve(&spec, &psi, &EvolutionConfig::for_chain(100, 400.0 / omega, 4001))?;
        println!("J/omega = {jw} ({})", class.label());
        println!("  growth rate {:.6e}, 2|Im eps1| = {:.6e}", growth_rate(&rec, 0.5)?, 2.0 * m.eps1.im.abs());
        println!("  period * omega / pi = {:.4}", bloch_period_estimate(&rec)? * omega / PI);
        println!("  P(t_max) = {:.4e}, edge weight {:.1e}", rec.total_probability.last().unwrap(), rec.edge_fraction());
    }
    Ok(())
}
