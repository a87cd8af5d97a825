//! Command implementations behind the `wsmoire` binary.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::analytics::{self, EpCurvePoint};
use crate::config::{InitialState, RunConfig};
use crate::dynamics::{self, EvolutionRecord};
use crate::error::{Error, Result};
use crate::floquet::{self, BulkParams, PhaseKind, DEFAULT_CLASSIFY_TOL};
use crate::lattice::{flat_state, gaussian_state, LatticeSpec, PotentialSpec, StateVector};
use crate::output::{fmt_f64, log_intensity, Csv, Pgm, Report, CLASS_COMPLEX, CLASS_EP, CLASS_REAL};

/// Pixel value for grid cells whose evaluation failed.
pub const CLASS_ERROR: u16 = 16384;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    PhaseDiagram,
    EpCurve,
    Evolve,
    Moire,
    Spectrum,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PhaseDiagram => "phase-diagram",
            Command::EpCurve => "ep-curve",
            Command::Evolve => "evolve",
            Command::Moire => "moire",
            Command::Spectrum => "spectrum",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "wsmoire", about = "Wannier-Stark ladders and Moire patterns in a non-Hermitian SSH chain")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Runs one command and returns the process exit code. On failure an
/// `error.txt` record is written to the output directory when possible.
pub fn run(args: &Args) -> i32 {
    let cfg = match RunConfig::load(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            // a missing config file is a configuration problem, not an output one
            let e = match e {
                Error::Io(io) => Error::Config(format!("cannot read {}: {io}", args.config.display())),
                other => other,
            };
            return fail(args, args.out_dir.as_deref(), &e);
        }
    };
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    let threads = args.threads.unwrap_or_else(|| cfg.threads());
    match execute(args.command, &cfg, &out_dir, threads) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => fail(args, Some(&out_dir), &e),
    }
}

fn fail(args: &Args, out_dir: Option<&Path>, e: &Error) -> i32 {
    eprintln!("wsmoire {}: {e}", args.command.name());
    if let Some(dir) = out_dir {
        let mut r = Report::new();
        r.put("status", "error")
            .put("command", args.command.name())
            .put("kind", e.kind())
            .put("exit_code", e.exit_code())
            .put("message", e.to_string().replace('\n', " "));
        let _ = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(dir.join("error.txt"), r.as_str()));
    }
    e.exit_code()
}

/// Validates, then runs a command on a pool of `threads` workers.
pub fn execute(command: Command, cfg: &RunConfig, out_dir: &Path, threads: usize) -> Result<Vec<PathBuf>> {
    if threads == 0 {
        return Err(Error::Config("thread count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match command {
        Command::PhaseDiagram => cmd_phase_diagram(cfg, out_dir),
        Command::EpCurve => cmd_ep_curve(cfg, out_dir),
        Command::Evolve => cmd_evolve(cfg, out_dir),
        Command::Moire => cmd_moire(cfg, out_dir),
        Command::Spectrum => cmd_spectrum(cfg, out_dir),
    })
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

fn prepare(out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    Ok(())
}

fn class_pixel(kind: &PhaseKind) -> u16 {
    match kind {
        PhaseKind::RealLadders { .. } => CLASS_REAL,
        PhaseKind::EpLadder { .. } => CLASS_EP,
        PhaseKind::ComplexLadders { .. } => CLASS_COMPLEX,
    }
}

pub fn cmd_phase_diagram(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let g = cfg.grid()?;
    let tol = g.classify_tol.unwrap_or(DEFAULT_CLASSIFY_TOL);
    let xs = linspace(g.j_over_omega_min, g.j_over_omega_max, g.j_over_omega_count);
    let ys = linspace(g.beta_over_omega_min, g.beta_over_omega_max, g.beta_over_omega_count);
    prepare(out_dir)?;

    let cells = floquet::phase_diagram_cells(&xs, &ys, tol);
    let mut csv =
        Csv::new(&["j_over_omega", "beta_over_omega", "class", "eps_real", "eps_imag", "trace", "det_residual"]);
    let mut pixels = vec![0u16; xs.len() * ys.len()];
    for (i, cell) in cells.iter().enumerate() {
        let (bi, ji) = (i / xs.len(), i % xs.len());
        // top image row is the largest beta/omega
        let pixel = &mut pixels[(ys.len() - 1 - bi) * xs.len() + ji];
        let (x, y) = (fmt_f64(cell.j_over_omega), fmt_f64(cell.beta_over_omega));
        match &cell.result {
            Ok((m, class)) => {
                *pixel = class_pixel(&class.kind);
                csv.row(&[
                    x,
                    y,
                    class.label().into(),
                    fmt_f64(m.eps1.re),
                    fmt_f64(m.eps1.im),
                    fmt_f64(m.trace.re),
                    fmt_f64(m.det_residual),
                ]);
            }
            Err(_) => {
                *pixel = CLASS_ERROR;
                csv.row(&[x, y, "error".into(), String::new(), String::new(), String::new(), String::new()]);
            }
        }
    }
    let csv_path = out_dir.join("phase_diagram.csv");
    csv.write(&csv_path)?;
    let pgm_path = out_dir.join("phase_diagram.pgm");
    Pgm::new(xs.len(), ys.len(), pixels).write(&pgm_path)?;

    let overlay_path = out_dir.join("ep_curve_overlay.csv");
    ep_overlay(g.j_over_omega_min, g.j_over_omega_max, g.beta_over_omega_max, g.overlay_n_max.unwrap_or(8))?
        .write(&overlay_path)?;
    Ok(vec![csv_path, pgm_path, overlay_path])
}

/// Analytic EP curve in the `J/omega`-`beta/omega` plane. With omega = 1 the
/// curve is `d(x, y) = (4n + 2) pi`; along a ray `y = r x` homogeneity gives
/// `x = (4n + 2) pi / d(1, r)`.
fn ep_overlay(x_min: f64, x_max: f64, y_max: f64, n_max: u32) -> Result<Csv> {
    let mut csv = Csv::new(&["n", "beta_over_j", "j_over_omega", "beta_over_omega"]);
    if x_max <= 0.0 {
        return Ok(csv);
    }
    let r_max = if x_min > 0.0 { (y_max / x_min).min(10.0) } else { 10.0 };
    let rays = linspace(0.0, r_max, 401);
    let d: Vec<f64> = rays.iter().map(|&r| analytics::d_integral(1.0, r)).collect::<Result<_>>()?;
    for n in 0..=n_max {
        for (&r, &dr) in rays.iter().zip(&d) {
            let x = (4.0 * n as f64 + 2.0) * PI / dr;
            let y = r * x;
            if x >= x_min && x <= x_max && y <= y_max {
                csv.row(&[n.to_string(), fmt_f64(r), fmt_f64(x), fmt_f64(y)]);
            }
        }
    }
    Ok(csv)
}

/// Pairs each analytic prediction with the nearest unused bisected EP.
/// Rows come out in descending omega; unmatched entries leave fields empty.
pub fn match_eps(analytic: &[EpCurvePoint], bisected: &[f64]) -> Vec<(Option<u32>, Option<f64>, Option<f64>)> {
    let mut used = vec![false; bisected.len()];
    let mut rows: Vec<(Option<u32>, Option<f64>, Option<f64>)> = Vec::new();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (ai, a) in analytic.iter().enumerate() {
        for (bi, b) in bisected.iter().enumerate() {
            pairs.push(((a.omega - b).abs(), ai, bi));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut matched = vec![None; analytic.len()];
    for (_, ai, bi) in pairs {
        if matched[ai].is_none() && !used[bi] {
            matched[ai] = Some(bi);
            used[bi] = true;
        }
    }
    for (a, m) in analytic.iter().zip(&matched) {
        rows.push((Some(a.n), Some(a.omega), m.map(|bi| bisected[bi])));
    }
    for (bi, b) in bisected.iter().enumerate() {
        if !used[bi] {
            rows.push((None, None, Some(*b)));
        }
    }
    rows.sort_by(|p, q| {
        let key = |r: &(Option<u32>, Option<f64>, Option<f64>)| r.1.or(r.2).unwrap_or(0.0);
        key(q).total_cmp(&key(p))
    });
    rows
}

fn ep_table(analytic: &[EpCurvePoint], bisected: &[f64]) -> (Csv, f64) {
    let mut csv = Csv::new(&["n", "omega_analytic", "omega_bisected", "rel_error"]);
    let mut worst: f64 = 0.0;
    for (n, a, b) in match_eps(analytic, bisected) {
        let rel = match (a, b) {
            (Some(a), Some(b)) => Some((b - a).abs() / a),
            _ => None,
        };
        if let Some(r) = rel {
            worst = worst.max(r);
        }
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        csv.row(&[n.map(|n| n.to_string()).unwrap_or_default(), opt(a), opt(b), opt(rel)]);
    }
    (csv, worst)
}

fn in_window(points: Vec<EpCurvePoint>, lo: f64, hi: f64) -> Vec<EpCurvePoint> {
    points.into_iter().filter(|p| p.omega >= lo && p.omega <= hi).collect()
}

pub fn cmd_ep_curve(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let e = cfg.ep()?;
    prepare(out_dir)?;
    let tol = e.tol.unwrap_or(1e-12);
    let d = analytics::d_integral(e.j, e.beta)?;
    let n_max = (d / (PI * e.omega_min)).ceil() as u32 + 1;
    let analytic = in_window(analytics::ep_curve(e.j, e.beta, n_max)?, e.omega_min, e.omega_max);
    let centres = in_window(analytics::ep_band_centres(e.j, e.beta, n_max)?, e.omega_min, e.omega_max);
    let bisected = floquet::find_ep_along_omega(e.j, e.beta, e.omega_min, e.omega_max, tol)?;

    let (csv, worst) = ep_table(&analytic, &bisected);
    let (centre_csv, centre_worst) = ep_table(&centres, &bisected);
    let path = out_dir.join("ep_curve.csv");
    csv.write(&path)?;
    let centre_path = out_dir.join("ep_band_centres.csv");
    centre_csv.write(&centre_path)?;

    // each bisected EP against its nearest prediction
    let nearest = |preds: &[EpCurvePoint]| {
        bisected
            .iter()
            .map(|b| preds.iter().map(|a| (b - a.omega).abs() / a.omega).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let mut r = Report::new();
    r.num("J", e.j)
        .num("beta", e.beta)
        .num("d", d)
        .put("n_analytic", analytic.len())
        .put("n_bisected", bisected.len())
        .num("max_rel_error_matched", worst)
        .num("max_rel_error_bisected_to_nearest", nearest(&analytic))
        .num("band_centres_max_rel_error_matched", centre_worst)
        .num("band_centres_max_rel_error_bisected_to_nearest", nearest(&centres));
    let report_path = out_dir.join("ep_curve_report.txt");
    r.write(&report_path)?;
    Ok(vec![path, centre_path, report_path])
}

fn initial(cfg: &RunConfig, spec: &LatticeSpec, default: InitialState) -> Result<StateVector> {
    match cfg.initial_state(default)? {
        InitialState::Gaussian => gaussian_state(spec.n_sites, cfg.gaussian_width()),
        InitialState::Flat => flat_state(spec.n_sites),
    }
}

fn heatmap(rec: &EvolutionRecord) -> Pgm {
    let pixels = (0..rec.n_frames()).flat_map(|f| rec.normalized_frame(f).into_iter().map(log_intensity)).collect();
    Pgm::new(rec.n_sites(), rec.n_frames(), pixels)
}

fn bulk_summary(r: &mut Report, spec: &LatticeSpec) -> Result<()> {
    if let PotentialSpec::Linear { omega } = spec.potential {
        let m = floquet::monodromy(&BulkParams::new(spec.j, spec.beta, omega)?)?;
        let class = floquet::classify(&m, DEFAULT_CLASSIFY_TOL)?;
        r.put("bulk_class", class.label())
            .num("eps1_real", m.eps1.re)
            .num("eps1_imag", m.eps1.im)
            .num("expected_growth_rate", 2.0 * m.eps1.im.abs())
            .num("expected_period", PI / omega);
    }
    Ok(())
}

pub fn cmd_evolve(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = cfg.lattice_spec()?;
    let ecfg = cfg.evolution_config(spec.n_sites, 400)?;
    let psi0 = initial(cfg, &spec, InitialState::Gaussian)?;
    let fit_window = cfg.fit_window()?;
    prepare(out_dir)?;
    let rec = dynamics::evolve(&spec, &psi0, &ecfg)?;

    let sites: Vec<i64> = spec.sites().collect();
    let mut frames = Csv::new(&["t", "l", "P_l", "P_l_over_P"]);
    let mut summary = Csv::new(&["t", "P", "ln_P"]);
    for f in 0..rec.n_frames() {
        let t = fmt_f64(rec.times[f]);
        let p = rec.total_probability[f];
        for (l, pl) in sites.iter().zip(&rec.site_probability[f]) {
            frames.row(&[t.clone(), l.to_string(), fmt_f64(*pl), fmt_f64(pl / p)]);
        }
        summary.row(&[t, fmt_f64(p), fmt_f64(p.ln())]);
    }
    let frames_path = out_dir.join("evolve_frames.csv");
    frames.write(&frames_path)?;
    let summary_path = out_dir.join("evolve_summary.csv");
    summary.write(&summary_path)?;
    let pgm_path = out_dir.join("evolve_heatmap.pgm");
    heatmap(&rec).write(&pgm_path)?;

    let mut r = Report::new();
    r.put("method", rec.method.name()).put("n_sites", spec.n_sites).put("n_frames", rec.n_frames()).num("t_max", ecfg.t_max);
    if let Some(c) = rec.condition {
        r.num("condition", c);
    }
    r.num("growth_rate", dynamics::growth_rate(&rec, fit_window)?).num("fit_window", fit_window);
    match dynamics::bloch_period_estimate(&rec) {
        Ok(p) => r.num("bloch_period", p),
        Err(_) => r.put("bloch_period", ""),
    };
    r.num("edge_fraction", rec.edge_fraction()).put("edge_flagged", rec.edge_flagged());
    bulk_summary(&mut r, &spec)?;
    let report_path = out_dir.join("evolve_report.txt");
    r.write(&report_path)?;
    Ok(vec![frames_path, summary_path, pgm_path, report_path])
}

pub fn cmd_moire(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = cfg.lattice_spec()?;
    if !matches!(spec.potential, PotentialSpec::Logarithmic { .. }) {
        return Err(Error::Config("moire needs lattice.potential = \"logarithmic\"".into()));
    }
    let ecfg = cfg.evolution_config(spec.n_sites, 800)?;
    let psi0 = initial(cfg, &spec, InitialState::Flat)?;
    let q = cfg.threshold_quantile()?;
    prepare(out_dir)?;
    let rec = dynamics::evolve(&spec, &psi0, &ecfg)?;
    let rep = dynamics::moire_analysis(&spec, &rec, q)?;

    let pgm_path = out_dir.join("moire_heatmap.pgm");
    heatmap(&rec).write(&pgm_path)?;
    let mut sites = Csv::new(&["l", "local_omega", "class"]);
    let mut profile = Csv::new(&["l", "late_time_profile", "bright", "predicted_broken"]);
    for i in 0..rep.sites.len() {
        let l = rep.sites[i].to_string();
        sites.row(&[l.clone(), fmt_f64(rep.local_omega[i]), rep.per_site_class[i].label().into()]);
        profile.row(&[
            l,
            fmt_f64(rep.late_time_profile[i]),
            (rep.bright_mask[i] as u8).to_string(),
            (rep.predicted_broken_mask[i] as u8).to_string(),
        ]);
    }
    let sites_path = out_dir.join("moire_sites.csv");
    sites.write(&sites_path)?;
    let profile_path = out_dir.join("moire_profile.csv");
    profile.write(&profile_path)?;

    let mut r = Report::new();
    r.put("method", rec.method.name())
        .put("n_sites", spec.n_sites)
        .put("n_frames", rec.n_frames())
        .num("t_max", ecfg.t_max)
        .num("threshold_quantile", q)
        .num("threshold", rep.threshold)
        .put("n_alternations", rep.n_alternations)
        .num("overlap_score", rep.overlap_score)
        .put("class_alternations", rep.class_alternations)
        .num("broken_probability_fraction", rep.broken_probability_fraction)
        .num("edge_fraction", rep.edge_fraction)
        .put("edge_flagged", rep.edge_fraction > 0.01)
        .num("final_total_probability", *rec.total_probability.last().unwrap_or(&f64::NAN));
    let report_path = out_dir.join("moire_report.txt");
    r.write(&report_path)?;
    Ok(vec![pgm_path, sites_path, profile_path, report_path])
}

pub fn cmd_spectrum(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = cfg.lattice_spec()?;
    let omega = match spec.potential {
        PotentialSpec::Linear { omega } => omega,
        _ => return Err(Error::Config("spectrum needs lattice.potential = \"linear\"".into())),
    };
    let n_levels = cfg.n_levels()?;
    prepare(out_dir)?;
    let check = dynamics::ladder_structure_check(&spec, n_levels)?;

    let mut values = check.eigenvalues.clone();
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut eig = Csv::new(&["re", "im"]);
    for z in &values {
        eig.row(&[fmt_f64(z.re), fmt_f64(z.im)]);
    }
    let eig_path = out_dir.join("spectrum_eigenvalues.csv");
    eig.write(&eig_path)?;

    let mut folded = Csv::new(&["folded_re", "folded_im", "residual"]);
    for (z, res) in check.folded.iter().zip(&check.residuals) {
        folded.row(&[fmt_f64(z.re), fmt_f64(z.im), fmt_f64(*res)]);
    }
    let folded_path = out_dir.join("spectrum_folded.csv");
    folded.write(&folded_path)?;

    let (e1, e2) = check.base_points;
    let mut r = Report::new();
    r.num("omega", omega)
        .put("n_sites", spec.n_sites)
        .put("n_levels", n_levels)
        .num("eps1_real", e1.re)
        .num("eps1_imag", e1.im)
        .num("eps2_real", e2.re)
        .num("eps2_imag", e2.im)
        .num("max_deviation", check.max_deviation)
        .num("max_deviation_over_omega", check.max_deviation / omega);
    let m = floquet::monodromy(&BulkParams::new(spec.j, spec.beta, omega)?)?;
    r.put("bulk_class", floquet::classify(&m, DEFAULT_CLASSIFY_TOL)?.label());
    let report_path = out_dir.join("spectrum_report.txt");
    r.write(&report_path)?;
    Ok(vec![eig_path, folded_path, report_path])
}
