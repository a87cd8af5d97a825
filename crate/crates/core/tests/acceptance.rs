//! Acceptance criteria 1-10. Prints one line per criterion and exits non-zero
//! if any of them fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsmoire::analytics::{dimer_multipliers, ep_band_centres, ep_curve};
use wsmoire::cli::{execute, Command};
use wsmoire::config::RunConfig;
use wsmoire::dynamics::{
    bloch_period_estimate, evolve, growth_rate, ladder_structure_check, moire_analysis, EvolutionConfig, Method, MoireReport,
};
use wsmoire::floquet::{classify, find_ep_along_omega, is_jordan_block, monodromy, BulkParams, PhaseKind, DEFAULT_CLASSIFY_TOL};
use wsmoire::lattice::{flat_state, gaussian_state, LatticeSpec};
use wsmoire::{Result, C64};

const SEED: u64 = 20240607;
const BETA_RATIO: f64 = 0.46;
/// J/omega of the PT-symmetric (C) and PT-broken (B) dynamics points.
const POINT_C: f64 = 3.8;
const POINT_B: f64 = 3.0;
/// J/omega of the ladder-structure check, inside a real band of the A-D line.
const LADDER_POINT: f64 = 10.5;
const OMEGA_LO: f64 = 1.0 / 16.6;
const OMEGA_HI: f64 = 1.0 / 8.6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn pair_error(got: (C64, C64), want: (C64, C64)) -> f64 {
    let direct = (got.0 - want.0).norm().max((got.1 - want.1).norm());
    let swapped = (got.0 - want.1).norm().max((got.1 - want.0).norm());
    direct.min(swapped)
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for beta in [0.1, 0.2, 0.3, 0.4, 0.45, 0.55, 0.7, 0.9] {
        let m = monodromy(&BulkParams::new(0.0, beta, 1.0)?)?;
        worst = worst.max(pair_error((m.lambda1, m.lambda2), dimer_multipliers(beta, 1.0)?));
    }
    // beta fixed at 0.5, the EP sits at omega = 1
    let eps = find_ep_along_omega(0.0, 0.5, 0.8, 1.25, 1e-12)?;
    let ep_ratio = eps.first().map(|w| 0.5 / w).unwrap_or(f64::NAN);
    let m = monodromy(&BulkParams::new(0.0, 0.5, 1.0)?)?;
    let jordan = is_jordan_block(&m.u0, 1e-6);
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-8 && eps.len() == 1 && (ep_ratio - 0.5).abs() < 1e-6 && jordan && within(elapsed, 1.0),
        format!("max multiplier error {worst:.2e}, EP at beta/omega = {ep_ratio:.12}, Jordan block {jordan}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut det, mut sum, mut im, mut scale): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let x = rng.gen_range(0.1..=20.0);
        let y = rng.gen_range(0.0..=2.0);
        let omega = rng.gen_range(0.1..=2.0);
        let p = BulkParams::new(x * omega, y * omega, omega)?;
        let m = monodromy(&p)?;
        det = det.max(m.det_residual);
        sum = sum.max((m.eps1 + m.eps2).norm() / omega);
        im = im.max(m.trace.im.abs());
        for s in [0.5, 2.0, 10.0] {
            let ms = monodromy(&p.scaled(s))?;
            scale = scale.max(pair_error((ms.lambda1, ms.lambda2), (m.lambda1, m.lambda2)));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        det < 1e-8 && sum < 1e-8 && im < 1e-8 && scale < 1e-8 && within(elapsed, 30.0),
        format!(
            "1000 points: det residual {det:.2e}, |eps1+eps2|/omega {sum:.2e}, |Im tr| {im:.2e}, scale drift {scale:.2e}, {elapsed:.2?}"
        ),
    )
}

fn criterion_3() -> Result<Outcome> {
    let start = Instant::now();
    let omega = 1.0 / LADDER_POINT;
    let class = classify(&monodromy(&BulkParams::new(1.0, BETA_RATIO, omega)?)?, DEFAULT_CLASSIFY_TOL)?;
    let check = ladder_structure_check(&LatticeSpec::linear(1.0, BETA_RATIO, 100, omega)?, 20)?;
    let dev = check.max_deviation / omega;
    let elapsed = start.elapsed();
    outcome(
        class.is_real() && dev < 1e-6 && within(elapsed, 10.0),
        format!("J/omega = {LADDER_POINT} ({}), 20 levels, max deviation {dev:.2e} omega, {elapsed:.2?}", class.label()),
    )
}

fn criterion_4() -> Result<Outcome> {
    let start = Instant::now();
    let bisected = find_ep_along_omega(1.0, BETA_RATIO, OMEGA_LO, OMEGA_HI, 1e-12)?;
    let predicted = ep_curve(1.0, BETA_RATIO, 12)?;
    let centres = ep_band_centres(1.0, BETA_RATIO, 12)?;
    let worst = |preds: &[wsmoire::analytics::EpCurvePoint]| {
        bisected
            .iter()
            .map(|w| preds.iter().map(|p| (w - p.omega).abs() / p.omega).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let (err, centre_err) = (worst(&predicted), worst(&centres));
    let elapsed = start.elapsed();
    outcome(
        !bisected.is_empty() && err < 0.01 && within(elapsed, 120.0),
        format!(
            "{} EPs bisected, max rel error vs weak-field curve {:.2}% (band centres {:.2}%), {elapsed:.2?}",
            bisected.len(),
            100.0 * err,
            100.0 * centre_err
        ),
    )
}

fn point_class(jw: f64) -> Result<(f64, wsmoire::floquet::MonodromyResult, PhaseKind)> {
    let omega = 1.0 / jw;
    let m = monodromy(&BulkParams::new(1.0, BETA_RATIO * 1.0, omega)?)?;
    let kind = classify(&m, DEFAULT_CLASSIFY_TOL)?.kind;
    Ok((omega, m, kind))
}

fn evolve_point(omega: f64) -> Result<wsmoire::dynamics::EvolutionRecord> {
    let spec = LatticeSpec::linear(1.0, BETA_RATIO, 100, omega)?;
    evolve(&spec, &gaussian_state(100, 0.01)?, &EvolutionConfig::for_chain(100, 400.0 / omega, 4001))
}

fn criterion_5() -> Result<Outcome> {
    let start = Instant::now();
    let (omega, _, kind) = point_class(POINT_C)?;
    let rec = evolve_point(omega)?;
    let rate = growth_rate(&rec, 0.5)? / omega;
    let period = bloch_period_estimate(&rec)? * omega / PI;
    let n = rec.n_frames();
    let peak = |r: std::ops::Range<usize>| rec.total_probability[r].iter().cloned().fold(0.0, f64::max);
    let (early, late) = (peak(n / 4..n / 2), peak(3 * n / 4..n));
    let bounded = late <= 2.0 * early;
    let elapsed = start.elapsed();
    outcome(
        matches!(kind, PhaseKind::RealLadders { .. })
            && bounded
            && rate.abs() < 1e-3
            && (period - 1.0).abs() < 0.02
            && within(elapsed, 60.0),
        format!(
            "J/omega = {POINT_C} real, growth rate {rate:.2e} omega, period {period:.4} pi/omega, late/early max P {:.3}, {elapsed:.2?}",
            late / early
        ),
    )
}

fn criterion_6() -> Result<Outcome> {
    let start = Instant::now();
    let (omega, m, kind) = point_class(POINT_B)?;
    let rec = evolve_point(omega)?;
    let rate = growth_rate(&rec, 0.5)?;
    let expected = 2.0 * m.eps1.im.abs();
    let rel = (rate - expected).abs() / expected;
    let elapsed = start.elapsed();
    outcome(
        matches!(kind, PhaseKind::ComplexLadders { .. }) && rel < 0.05 && within(elapsed, 60.0),
        format!("J/omega = {POINT_B} complex, slope {rate:.6}, 2|Im eps1| {expected:.6}, rel error {:.2e}, {elapsed:.2?}", rel),
    )
}

fn moire_run() -> Result<(MoireReport, Duration)> {
    let start = Instant::now();
    let spec = LatticeSpec::logarithmic(1.0, BETA_RATIO, 4000, 2e-3, 12.6)?;
    let cfg = EvolutionConfig::for_chain(4000, 12.6 * PI, 800);
    let rec = evolve(&spec, &flat_state(4000)?, &cfg)?;
    let report = moire_analysis(&spec, &rec, 0.5)?;
    Ok((report, start.elapsed()))
}

fn criterion_7(rep: &MoireReport, elapsed: Duration) -> Result<Outcome> {
    outcome(
        rep.n_alternations >= 3 && rep.overlap_score >= 0.8 && rep.broken_probability_fraction >= 0.8 && within(elapsed, 300.0),
        format!(
            "alternations {}, Jaccard {:.3}, late probability on broken sites {:.2e}, outer 5% holds {:.4}, {elapsed:.2?}",
            rep.n_alternations, rep.overlap_score, rep.broken_probability_fraction, rep.edge_fraction
        ),
    )
}

fn criterion_8(rep: &MoireReport) -> Result<Outcome> {
    let crossings = ep_curve(1.0, BETA_RATIO, 12)?.iter().filter(|p| p.omega >= OMEGA_LO && p.omega <= OMEGA_HI).count();
    let diff = rep.class_alternations as i64 - crossings as i64;
    outcome(
        diff.abs() <= 1,
        format!("{} phase changes along the chain, {crossings} weak-field EP crossings", rep.class_alternations),
    )
}

fn criterion_9() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let (mut worst, mut worst_abs): (f64, f64) = (0.0, 0.0);
    let mut runs = 0;
    while runs < 10 {
        let omega = rng.gen_range(0.2..=1.0);
        let x = rng.gen_range(0.5..=5.0);
        let y = rng.gen_range(0.0..=1.0);
        let m = monodromy(&BulkParams::new(x * omega, y * omega, omega)?)?;
        // stay away from EPs
        if (m.trace.re.abs() - 2.0).abs() < 0.05 {
            continue;
        }
        runs += 1;
        let spec = LatticeSpec::linear(x * omega, y * omega, 40, omega)?;
        let psi = gaussian_state(40, 0.01)?;
        let mk = |method| EvolutionConfig { t_max: 20.0 / omega, n_frames: 101, tolerance: 1e-12, method };
        let a = evolve(&spec, &psi, &mk(Method::DenseDiagonalization))?;
        let b = evolve(&spec, &psi, &mk(Method::StepwiseIntegration))?;
        for f in 0..a.n_frames() {
            let scale = a.total_probability[f].max(1.0);
            for l in 0..40 {
                let d = (a.site_probability[f][l] - b.site_probability[f][l]).abs();
                worst = worst.max(d / scale);
                worst_abs = worst_abs.max(d);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-6 && within(elapsed, 60.0),
        format!("10 configs, max |dP_l| / max(1, P) {worst:.2e} (absolute {worst_abs:.2e}), {elapsed:.2?}"),
    )
}

const DETERMINISM_CONFIGS: [(&str, Command, &str); 8] = [
    (
        "grid",
        Command::PhaseDiagram,
        "grid.j_over_omega_min = 0.0\ngrid.j_over_omega_max = 20.0\ngrid.j_over_omega_count = 21\n\
         grid.beta_over_omega_min = 0.0\ngrid.beta_over_omega_max = 2.0\ngrid.beta_over_omega_count = 9\n",
    ),
    ("ep", Command::EpCurve, "ep.J = 1.0\nep.beta = 0.46\nep.omega_min = 0.060240963855421686\nep.omega_max = 0.11627906976744186\n"),
    (
        "spectrum",
        Command::Spectrum,
        "lattice.J = 1.0\nlattice.beta = 0.46\nlattice.n_sites = 100\nlattice.potential = \"linear\"\nlattice.omega = 0.09523809523809523\nspectrum.n_levels = 20\n",
    ),
    (
        "point_c",
        Command::Evolve,
        "lattice.J = 1.0\nlattice.beta = 0.46\nlattice.n_sites = 100\nlattice.potential = \"linear\"\nlattice.omega = 0.2631578947368421\n\
         evolution.t_max = 1520.0\nevolution.n_frames = 4001\n",
    ),
    (
        "point_b",
        Command::Evolve,
        "lattice.J = 1.0\nlattice.beta = 0.46\nlattice.n_sites = 100\nlattice.potential = \"linear\"\nlattice.omega = 0.3333333333333333\n\
         evolution.t_max = 1200.0\nevolution.n_frames = 4001\n",
    ),
    (
        "moire",
        Command::Moire,
        "lattice.J = 1.0\nlattice.beta = 0.46\nlattice.n_sites = 4000\nlattice.potential = \"logarithmic\"\nlattice.gamma = 0.002\nlattice.tau = 12.6\n\
         evolution.t_max_over_pi = 12.6\nevolution.n_frames = 800\n",
    ),
    (
        "dense40",
        Command::Evolve,
        "lattice.J = 0.7\nlattice.beta = 0.2\nlattice.n_sites = 40\nlattice.potential = \"linear\"\nlattice.omega = 0.5\n\
         evolution.t_max = 40.0\nevolution.n_frames = 101\nevolution.method = \"dense_diagonalization\"\n",
    ),
    (
        "stepwise40",
        Command::Evolve,
        "lattice.J = 0.7\nlattice.beta = 0.2\nlattice.n_sites = 40\nlattice.potential = \"linear\"\nlattice.omega = 0.5\n\
         evolution.t_max = 40.0\nevolution.n_frames = 101\nevolution.method = \"stepwise_integration\"\n",
    ),
];

fn same_files(a: &Path, b: &Path) -> Result<(usize, Vec<String>)> {
    let mut names: Vec<String> = fs::read_dir(a)?.map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned())).collect::<std::io::Result<_>>()?;
    names.sort();
    let mut differing = Vec::new();
    for n in &names {
        if fs::read(a.join(n))? != fs::read(b.join(n))? {
            differing.push(n.clone());
        }
    }
    Ok((names.len(), differing))
}

fn criterion_10() -> Result<Outcome> {
    let start = Instant::now();
    let root = tempfile::tempdir()?;
    let mut files = 0;
    let mut differing = Vec::new();
    for (name, command, text) in DETERMINISM_CONFIGS {
        let cfg = RunConfig::parse(text)?;
        let (a, b) = (root.path().join(format!("{name}_1")), root.path().join(format!("{name}_4")));
        execute(command, &cfg, &a, 1)?;
        execute(command, &cfg, &b, 4)?;
        let (n, diff) = same_files(&a, &b)?;
        files += n;
        differing.extend(diff.into_iter().map(|d| format!("{name}/{d}")));
    }
    let elapsed = start.elapsed();
    outcome(
        differing.is_empty(),
        format!("{files} output files compared across 1 and 4 threads, differing: {differing:?}, {elapsed:.2?}"),
    )
}

fn report(n: usize, result: Result<Outcome>) -> bool {
    match result {
        Ok(o) => {
            println!("criterion {n:>2}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            o.pass
        }
        Err(e) => {
            println!("criterion {n:>2}: FAIL | error: {e}");
            false
        }
    }
}

fn main() {
    let mut passed = vec![
        report(1, criterion_1()),
        report(2, criterion_2()),
        report(3, criterion_3()),
        report(4, criterion_4()),
        report(5, criterion_5()),
        report(6, criterion_6()),
    ];
    match moire_run() {
        Ok((rep, elapsed)) => {
            passed.push(report(7, criterion_7(&rep, elapsed)));
            passed.push(report(8, criterion_8(&rep)));
        }
        Err(e) => {
            passed.push(report(7, Err(e.clone())));
            passed.push(report(8, Err(e)));
        }
    }
    passed.push(report(9, criterion_9()));
    passed.push(report(10, criterion_10()));
    let n_pass = passed.iter().filter(|p| **p).count();
    println!("acceptance: {n_pass}/{} criteria pass", passed.len());
    if n_pass != passed.len() {
        std::process::exit(1);
    }
}
