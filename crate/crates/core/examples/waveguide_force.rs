//! Force profile of the logarithmic index gradient and its shift over a window.

use wsmoire::analytics::{waveguide_force_profile, waveguide_force_shift};

fn main() -> wsmoire::Result<()> {
    for l in [1, 10, 100, 1000] {
        println!("F({l}) = {:.6}", waveguide_force_profile(l)?);
    }
    println!("shift from l = 1000 over 1000 sites: {:.4}", waveguide_force_shift(1000, 1000)?);
    Ok(())
}
