//! J = 0 decouples the chain into dimers with multipliers exp(+-i pi sqrt(1/4 - (beta/omega)^2)).
//! Compares the integrated monodromy with that and locates the EP at beta/omega = 1/2.

use wsmoire::analytics::dimer_multipliers;
use wsmoire::floquet::{classify, find_ep_along_omega, is_jordan_block, monodromy, BulkParams, DEFAULT_CLASSIFY_TOL};

fn main() -> wsmoire::Result<()> {
    println!("beta   class    |lambda - exact|");
    for beta in [0.1, 0.2, 0.3, 0.4, 0.45, 0.55, 0.7, 0.9] {
        let m = monodromy(&BulkParams::new(0.0, beta, 1.0)?)?;
        let (a, b) = dimer_multipliers(beta, 1.0)?;
        let err = ((m.lambda1 - a).norm().max((m.lambda2 - b).norm())).min((m.lambda1 - b).norm().max((m.lambda2 - a).norm()));
        println!("{beta:<6} {:<8} {err:.2e}", classify(&m, DEFAULT_CLASSIFY_TOL)?.label());
    }

    // scanning omega at fixed beta moves beta/omega through 1/2
    let eps = find_ep_along_omega(0.0, 0.5, 0.5, 2.0, 1e-12)?;
    println!("EP along omega at beta = 0.5: {eps:?}");
    let m = monodromy(&BulkParams::new(0.0, 0.5, 1.0)?)?;
    println!("Jordan block at beta/omega = 1/2: {}", is_jordan_block(&m.u0, 1e-6));
    Ok(())
}
