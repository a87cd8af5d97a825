//! EPs along beta = 0.46 J between J/omega = 8.6 and 16.6, next to the weak-field
//! EP curve and to the centres of the broken bands.

use wsmoire::analytics::{d_integral, ep_band_centres, ep_curve};
use wsmoire::floquet::find_ep_along_omega;

fn main() -> wsmoire::Result<()> {
    let (j, beta) = (1.0, 0.46);
    let (lo, hi) = (1.0 / 16.6, 1.0 / 8.6);
    println!("d(J, beta) = {:.12}", d_integral(j, beta)?);

    let eps = find_ep_along_omega(j, beta, lo, hi, 1e-12)?;
    println!("bisected EPs (J/omega):");
    for pair in eps.iter().rev().collect::<Vec<_>>().chunks(2) {
        let edges: Vec<String> = pair.iter().map(|w| format!("{:.4}", j / **w)).collect();
        println!("  broken band {}", edges.join(" .. "));
    }
    let inside = |w: f64| w >= lo && w <= hi;
    let curve: Vec<String> = ep_curve(j, beta, 12)?.iter().filter(|p| inside(p.omega)).map(|p| format!("n={} J/omega={:.4}", p.n, j / p.omega)).collect();
    let centres: Vec<String> = ep_band_centres(j, beta, 12)?.iter().filter(|p| inside(p.omega)).map(|p| format!("n={} J/omega={:.4}", p.n, j / p.omega)).collect();
    println!("weak-field EP curve: {}", curve.join(", "));
    println!("band centres:        {}", centres.join(", "));
    Ok(())
}
