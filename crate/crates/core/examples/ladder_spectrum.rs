//! Dense spectrum of a 100-site chain folded into one ladder period, against the
//! Floquet base points.

use wsmoire::dynamics::ladder_structure_check;
use wsmoire::lattice::LatticeSpec;

fn main() -> wsmoire::Result<()> {
    for jw in [10.5, 9.5, 3.0] {
        let omega = 1.0 / jw;
        let check = ladder_structure_check(&LatticeSpec::linear(1.0, 0.46, 100, omega)?, 20)?;
        let (e1, e2) = check.base_points;
        println!("J/omega = {jw}: eps1 = {e1:.6}, eps2 = {e2:.6}, max deviation = {:.2e} omega", check.max_deviation / omega);
        for z in check.folded.iter().take(4) {
            println!("    folded level {z:.6}");
        }
    }
    Ok(())
}
