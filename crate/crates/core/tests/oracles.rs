use std::f64::consts::PI;

use wsmoire::analytics::*;
use wsmoire::dynamics::*;
use wsmoire::eigen;
use wsmoire::floquet::*;
use wsmoire::lattice::*;
use wsmoire::{Error, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn generator_substitution() {
    let p = BulkParams::new(1.0, 0.5, 1.0).unwrap();
    let g = generator(0.0, c(0.0, 0.0), &p);
    let want = [c(-0.5, 0.0), c(-1.0, -0.5), c(-1.0, -0.5), c(-1.5, 0.0)];
    for (a, b) in g.0.iter().zip(want) {
        assert!((a - b).norm() < 1e-15);
    }
    let g = generator(PI, c(0.0, 0.0), &p);
    assert!((g.0[1] - c(-1.0, 0.5)).norm() < 1e-15);
    assert!((g.0[2] - c(-1.0, 0.5)).norm() < 1e-15);
}

#[test]
fn dimer_base_points() {
    let m = monodromy(&BulkParams::new(0.0, 0.3, 1.0).unwrap()).unwrap();
    assert!((m.eps1.re.abs() - 0.4).abs() < 1e-8 && m.eps1.im.abs() < 1e-8);
    match classify(&m, DEFAULT_CLASSIFY_TOL).unwrap().kind {
        PhaseKind::RealLadders { eps0 } => assert!((eps0 - 0.4).abs() < 1e-8),
        k => panic!("{k:?}"),
    }
    let m = monodromy(&BulkParams::new(0.0, 1.0, 1.0).unwrap()).unwrap();
    assert!((m.eps1.im.abs() - 0.75f64.sqrt()).abs() < 1e-8);
    let m = monodromy(&BulkParams::new(0.0, 0.7, 1.0).unwrap()).unwrap();
    assert!(matches!(classify(&m, DEFAULT_CLASSIFY_TOL).unwrap().kind, PhaseKind::ComplexLadders { .. }));
    let m = monodromy(&BulkParams::new(0.0, 0.5, 1.0).unwrap()).unwrap();
    assert!(matches!(classify(&m, DEFAULT_CLASSIFY_TOL).unwrap().kind, PhaseKind::EpLadder { sign: 1 }));
    assert!(is_jordan_block(&m.u0, 1e-6));
}

#[test]
fn jordan_block_synthetic() {
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    assert!(!is_jordan_block(&Mat2::identity(), 1e-6));
    assert!(is_jordan_block(&Mat2::new(one, one, zero, one), 1e-6));
}

#[test]
fn dimer_multiplier_closed_form() {
    let (a, b) = dimer_multipliers(0.0, 1.0).unwrap();
    assert!((a - c(0.0, 1.0)).norm() < 1e-15 && (b - c(0.0, -1.0)).norm() < 1e-15);
    let (a, b) = dimer_multipliers(0.5, 1.0).unwrap();
    assert!((a - 1.0).norm() < 1e-15 && (b - 1.0).norm() < 1e-15);
    let (a, _) = dimer_multipliers(0.3, 1.0).unwrap();
    assert!((a - c(0.0, 0.4 * PI).exp()).norm() < 1e-15);
}

#[test]
fn rk4_is_fourth_order_on_dimer() {
    let p = BulkParams::new(0.0, 0.3, 1.0).unwrap();
    let (exact, _) = dimer_multipliers(0.3, 1.0).unwrap();
    let err = |steps| {
        let m = monodromy_with_steps(&p, steps).unwrap();
        (m.lambda1 - exact).norm().min((m.lambda2 - exact).norm())
    };
    let ratio = err(64) / err(128);
    assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
}

#[test]
fn dimer_ep_along_omega() {
    let eps = find_ep_along_omega(0.0, 0.35, 0.4, 1.2, 1e-12).unwrap();
    assert_eq!(eps.len(), 1);
    assert!((eps[0] - 0.7).abs() < 1e-9);
}

#[test]
fn hermitian_degeneracies_are_not_jordan() {
    // at beta = 0 the trace is -2 cos(pi sqrt(x^2 + 1/4)), x = J/omega, touching +-2 at sqrt(n^2 - 1/4)
    for n in 1..6 {
        let x = ((n * n) as f64 - 0.25).sqrt();
        let m = monodromy(&BulkParams::new(x, 0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(classify(&m, DEFAULT_CLASSIFY_TOL).unwrap().kind, PhaseKind::EpLadder { .. }), "x = {x}");
        assert!(!is_jordan_block(&m.u0, 1e-6), "x = {x}");
    }
    assert!(find_ep_along_omega(1.0, 0.0, 0.05, 1.0, 1e-12).unwrap().is_empty());
}

#[test]
fn ep_count_matches_phase_alternations_on_fine_grid() {
    let eps = find_ep_along_omega(1.0, 0.46, 1.0 / 16.6, 1.0 / 8.6, 1e-12).unwrap();
    let labels: Vec<&str> = (0..=800)
        .map(|i| {
            let x = 8.6 + 8.0 * i as f64 / 800.0;
            let m = monodromy(&BulkParams::new(1.0, 0.46, 1.0 / x).unwrap()).unwrap();
            classify(&m, DEFAULT_CLASSIFY_TOL).unwrap().label()
        })
        .collect();
    let changes = labels.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(eps.len(), changes);
}

#[test]
fn phase_diagram_dimer_column_and_ad_line() {
    let ys: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    let map = phase_diagram(&[0.0], &ys, DEFAULT_CLASSIFY_TOL).unwrap();
    for (y, row) in ys.iter().zip(&map) {
        let label = row[0].label();
        let want = if *y < 0.5 - 1e-9 { "real" } else if *y > 0.5 + 1e-9 { "complex" } else { "ep" };
        assert_eq!(label, want, "beta/omega {y}");
    }
    // along beta = 0.46 J the class alternates between A and D
    let line: Vec<&str> = (0..=80)
        .map(|i| {
            let x = 8.6 + 0.1 * i as f64;
            phase_diagram(&[x], &[0.46 * x], DEFAULT_CLASSIFY_TOL).unwrap()[0][0].label()
        })
        .collect();
    assert!(line.contains(&"real") && line.contains(&"complex"));
}

#[test]
fn d_integral_golden_and_homogeneity() {
    assert_eq!(d_integral(1.0, 0.0).unwrap(), PI);
    let d = d_integral(1.0, 0.46).unwrap();
    assert!((d - 2.977492719948234).abs() < 1e-10);
    for s in [0.1, 3.0, 17.0] {
        assert!((d_integral(s, 0.46 * s).unwrap() - s * d).abs() < 1e-10 * s);
    }
}

#[test]
fn ep_curve_construction() {
    let pts = ep_curve(1.0, 0.0, 2).unwrap();
    for (p, want) in pts.iter().zip([0.5, 1.0 / 6.0, 0.1]) {
        assert!((p.omega - want).abs() < 1e-14);
    }
    for p in ep_curve(1.0, 0.46, 6).unwrap() {
        assert!((p.omega * (4.0 * p.n as f64 * PI + 2.0 * PI) - p.d_value).abs() < 1e-14);
    }
}

#[test]
fn hermitian_blocks_match_dense_spectrum() {
    let (j, omega, n) = (0.8, 0.3, 40);
    let spec = LatticeSpec::linear(j, 0.0, n, omega).unwrap();
    let mut dense: Vec<f64> = eigen::eigenvalues(build_hamiltonian(&spec).unwrap().as_matrix()).unwrap().iter().map(|z| z.re).collect();
    dense.sort_by(f64::total_cmp);
    let cells = (spec.first_site() / 2)..=((spec.last_site() - 1) / 2);
    let mut blocks: Vec<f64> = hermitian_dimer_spectrum(j, omega, cells).unwrap().into_iter().flat_map(|(a, b)| [a, b]).collect();
    blocks.sort_by(f64::total_cmp);
    assert_eq!(dense.len(), blocks.len());
    for (a, b) in dense.iter().zip(&blocks) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
    for (lo, hi) in hermitian_dimer_spectrum(j, omega, 0..=3).unwrap() {
        assert!((hi - lo - 2.0 * (j * j + omega * omega / 4.0).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn waveguide_profile() {
    assert!((waveguide_force_profile(1000).unwrap() - 14.6f64.ln() / 2.0).abs() < 1e-14);
    assert!(matches!(waveguide_force_profile(0), Err(Error::Domain { .. })));
    let mut prev = f64::INFINITY;
    for l in (1..20000).step_by(97) {
        let f = waveguide_force_profile(l).unwrap();
        assert!(f < prev);
        prev = f;
    }
    assert!((waveguide_force_shift(1000, 1000).unwrap() - 2.0).abs() < 0.05);
}

#[test]
fn symmetry_residuals_reject_logarithmic() {
    let spec = LatticeSpec::logarithmic(1.0, 0.46, 100, 2e-3, 12.6).unwrap();
    assert!(matches!(symmetry_residuals(&spec), Err(Error::Precondition(_))));
}

#[test]
fn ladder_check_conjugate_pairs_in_broken_phase() {
    let omega = 1.0 / 3.0;
    let check = ladder_structure_check(&LatticeSpec::linear(1.0, 0.46, 100, omega).unwrap(), 20).unwrap();
    assert!(check.max_deviation < 1e-6 * omega);
    let im = check.base_points.0.im.abs();
    assert!(im > 0.05);
    for z in &check.folded {
        assert!(z.re.abs() < 1e-8 && (z.im.abs() - im).abs() < 1e-8);
    }
}

#[test]
fn bloch_period_halves_when_omega_doubles() {
    // doubling every energy scale keeps the phase and halves all times
    let psi = gaussian_state(100, 0.01).unwrap();
    let period = |s: f64| {
        let omega = s / 3.8;
        let spec = LatticeSpec::linear(s, 0.46 * s, 100, omega).unwrap();
        let rec = evolve(&spec, &psi, &EvolutionConfig::for_chain(100, 400.0 / omega, 4001)).unwrap();
        bloch_period_estimate(&rec).unwrap()
    };
    let (a, b) = (period(1.0), period(2.0));
    assert!((a / b - 2.0).abs() < 1e-6, "{a} {b}");
    assert!((a / (3.8 * PI) - 1.0).abs() < 0.02);
}

#[test]
fn broken_phase_profile_keeps_bloch_period() {
    let omega = 1.0 / 3.0;
    let spec = LatticeSpec::linear(1.0, 0.46, 100, omega).unwrap();
    let rec = evolve(&spec, &gaussian_state(100, 0.01).unwrap(), &EvolutionConfig::for_chain(100, 400.0 / omega, 4001)).unwrap();
    assert!((bloch_period_estimate(&rec).unwrap() * omega / PI - 1.0).abs() < 0.02);
}

#[test]
fn growth_rate_rejects_non_positive_probability() {
    let spec = LatticeSpec::linear(1.0, 0.0, 20, 0.3).unwrap();
    let mut rec = evolve(&spec, &flat_state(20).unwrap(), &EvolutionConfig::for_chain(20, 5.0, 11)).unwrap();
    rec.total_probability[10] = 0.0;
    assert!(matches!(growth_rate(&rec, 0.5), Err(Error::Data { frame: 10, .. })));
}

#[test]
fn ill_conditioned_dense_run_is_refused() {
    // with J negligible every beta bond is a dimer sitting on its EP
    let spec = LatticeSpec::linear(1e-20, 0.5, 20, 1.0).unwrap();
    let cfg = EvolutionConfig { t_max: 1.0, n_frames: 3, tolerance: 1e-12, method: Method::DenseDiagonalization };
    match evolve(&spec, &flat_state(20).unwrap(), &cfg) {
        Err(Error::IllConditioned { condition, .. }) => assert!(condition > DENSE_CONDITION_LIMIT),
        other => panic!("{other:?}"),
    }
    let cfg = EvolutionConfig { method: Method::StepwiseIntegration, ..cfg };
    assert!(evolve(&spec, &flat_state(20).unwrap(), &cfg).is_ok());
}
