//! Coarse phase map in the J/omega - beta/omega plane, printed as text.
//! `#` complex ladders, `.` real ladders, `E` exceptional point.

use wsmoire::floquet::{phase_diagram, PhaseKind, DEFAULT_CLASSIFY_TOL};

fn main() -> wsmoire::Result<()> {
    let xs: Vec<f64> = (0..=60).map(|i| i as f64 * 20.0 / 60.0).collect();
    let ys: Vec<f64> = (0..=16).map(|i| i as f64 * 0.5).collect();
    let map = phase_diagram(&xs, &ys, DEFAULT_CLASSIFY_TOL)?;
    for (y, row) in ys.iter().zip(&map).rev() {
        let line: String = row
            .iter()
            .map(|c| match c.kind {
                PhaseKind::RealLadders { .. } => '.',
                PhaseKind::ComplexLadders { .. } => '#',
                PhaseKind::EpLadder { .. } => 'E',
            })
            .collect();
        println!("{y:>4.1} {line}");
    }
    println!("     J/omega from 0 to 20 ->");
    Ok(())
}
