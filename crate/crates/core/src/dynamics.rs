//! Time evolution on the finite chain and the observables built from it.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::eigen;
use crate::error::{Error, Result};
use crate::floquet::{self, BulkParams, PhaseClass, PhaseKind};
use crate::lattice::{build_hamiltonian, LatticeSpec, PotentialSpec, StateVector, Tridiagonal, C64};

/// Evolution halts once the Dirac norm exceeds this.
pub const OVERFLOW_LIMIT: f64 = 1e280;
/// Largest eigenvector condition number accepted by the dense method.
pub const DENSE_CONDITION_LIMIT: f64 = 1e8;
/// Chains longer than this default to stepwise integration.
pub const DENSE_MAX_SITES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    DenseDiagonalization,
    StepwiseIntegration,
}

impl Method {
    pub fn for_chain(n_sites: usize) -> Self {
        if n_sites > DENSE_MAX_SITES {
            Method::StepwiseIntegration
        } else {
            Method::DenseDiagonalization
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::DenseDiagonalization => "dense_diagonalization",
            Method::StepwiseIntegration => "stepwise_integration",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dense_diagonalization" | "dense" => Some(Method::DenseDiagonalization),
            "stepwise_integration" | "stepwise" => Some(Method::StepwiseIntegration),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionConfig {
    pub t_max: f64,
    pub n_frames: usize,
    pub tolerance: f64,
    pub method: Method,
}

impl EvolutionConfig {
    /// Default tolerance and the method chosen by chain length.
    pub fn for_chain(n_sites: usize, t_max: f64, n_frames: usize) -> Self {
        EvolutionConfig { t_max, n_frames, tolerance: 1e-12, method: Method::for_chain(n_sites) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidParameter(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.n_frames < 2 {
            return Err(Error::InvalidParameter(format!("n_frames must be at least 2, got {}", self.n_frames)));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-4) {
            return Err(Error::InvalidParameter(format!("tolerance must lie in (0, 1e-4], got {}", self.tolerance)));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let last = (self.n_frames - 1) as f64;
        (0..self.n_frames).map(|i| self.t_max * i as f64 / last).collect()
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionRecord {
    pub times: Vec<f64>,
    /// frames x sites
    pub site_probability: Vec<Vec<f64>>,
    pub total_probability: Vec<f64>,
    pub initial_state: StateVector,
    pub method: Method,
    /// Eigenvector condition number, dense runs only.
    pub condition: Option<f64>,
}

impl EvolutionRecord {
    pub fn n_frames(&self) -> usize {
        self.times.len()
    }

    pub fn n_sites(&self) -> usize {
        self.initial_state.len()
    }

    /// P_l / P for one frame.
    pub fn normalized_frame(&self, frame: usize) -> Vec<f64> {
        let p = self.total_probability[frame];
        self.site_probability[frame].iter().map(|x| x / p).collect()
    }

    /// Time average of P_l / P over the frames from `start` on.
    pub fn mean_profile(&self, start: usize) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_sites()];
        let count = (self.n_frames() - start) as f64;
        for f in start..self.n_frames() {
            for (a, x) in acc.iter_mut().zip(self.normalized_frame(f)) {
                *a += x / count;
            }
        }
        acc
    }

    /// Share of the late-time profile in the outer 5% of sites at each end.
    pub fn edge_fraction(&self) -> f64 {
        let n = self.n_sites();
        let edge = ((n as f64 * 0.05).ceil() as usize).max(1);
        let profile = self.mean_profile(late_start(self.n_frames()));
        let total: f64 = profile.iter().sum();
        let outer: f64 = profile[..edge].iter().chain(&profile[n - edge..]).sum();
        outer / total
    }

    pub fn edge_flagged(&self) -> bool {
        self.edge_fraction() > 0.01
    }
}

/// First frame of the late-time window (last quarter).
pub fn late_start(n_frames: usize) -> usize {
    (n_frames * 3) / 4
}

fn frame_probabilities(psi: &[C64], time: f64) -> Result<(Vec<f64>, f64)> {
    let probs: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = probs.iter().sum();
    if !total.is_finite() || total > OVERFLOW_LIMIT {
        return Err(Error::GrowthOverflow { time, limit: OVERFLOW_LIMIT });
    }
    Ok((probs, total))
}

pub fn evolve(spec: &LatticeSpec, psi0: &StateVector, cfg: &EvolutionConfig) -> Result<EvolutionRecord> {
    spec.validate()?;
    cfg.validate()?;
    if psi0.len() != spec.n_sites {
        return Err(Error::InvalidParameter(format!(
            "initial state has {} amplitudes for a {}-site chain",
            psi0.len(),
            spec.n_sites
        )));
    }
    let times = cfg.times();
    let mut site_probability = Vec::with_capacity(times.len());
    let mut total_probability = Vec::with_capacity(times.len());
    let mut condition = None;
    let mut push = |psi: &[C64], t: f64| -> Result<()> {
        let (p, total) = frame_probabilities(psi, t)?;
        site_probability.push(p);
        total_probability.push(total);
        Ok(())
    };

    match cfg.method {
        Method::DenseDiagonalization => {
            let h = build_hamiltonian(spec)?;
            let dec = eigen::decompose(h.as_matrix())?;
            if dec.condition > DENSE_CONDITION_LIMIT {
                return Err(Error::IllConditioned { condition: dec.condition, threshold: DENSE_CONDITION_LIMIT });
            }
            condition = Some(dec.condition);
            let c = &dec.inverse * DVector::from_column_slice(&psi0.amplitudes);
            for &t in &times {
                let weighted = DVector::from_iterator(
                    c.len(),
                    c.iter().zip(&dec.values).map(|(ck, e)| ck * (C64::new(0.0, -t) * e).exp()),
                );
                let psi = &dec.vectors * weighted;
                push(psi.as_slice(), t)?;
            }
        }
        Method::StepwiseIntegration => {
            let h = Tridiagonal::from_spec(spec)?;
            let mut stepper = TaylorStepper::new(h, cfg.tolerance);
            let mut psi = psi0.amplitudes.clone();
            push(&psi, 0.0)?;
            for w in times.windows(2) {
                stepper.advance(&mut psi, w[1] - w[0]);
                push(&psi, w[1])?;
            }
        }
    }

    Ok(EvolutionRecord {
        times,
        site_probability,
        total_probability,
        initial_state: psi0.clone(),
        method: cfg.method,
        condition,
    })
}

/// Truncated Taylor series of exp(-i h A) with h ||A|| <= 1, applied to
/// the tridiagonal Hamiltonian with the diagonal centred.
struct TaylorStepper {
    h: Tridiagonal,
    shift: f64,
    norm: f64,
    tol: f64,
    term: Vec<C64>,
    next: Vec<C64>,
}

impl TaylorStepper {
    fn new(h: Tridiagonal, tol: f64) -> Self {
        let lo = h.diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = h.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let shift = 0.5 * (lo + hi);
        let norm = h.norm_inf_shifted(shift).max(f64::MIN_POSITIVE);
        let n = h.len();
        TaylorStepper { h, shift, norm, tol, term: vec![C64::default(); n], next: vec![C64::default(); n] }
    }

    fn advance(&mut self, psi: &mut [C64], dt: f64) {
        if dt <= 0.0 {
            return;
        }
        let substeps = (dt * self.norm).ceil().max(1.0) as usize;
        let h = dt / substeps as f64;
        let phase = (C64::new(0.0, -self.shift * h)).exp();
        for _ in 0..substeps {
            self.step(psi, h);
            psi.iter_mut().for_each(|z| *z *= phase);
        }
    }

    fn step(&mut self, psi: &mut [C64], h: f64) {
        self.term.copy_from_slice(psi);
        // terms shrink at least geometrically with ratio 1/2 from k = 1 on,
        // so the tail is bounded by the last term added
        for k in 1..=64 {
            self.h.apply_shifted(self.shift, &self.term, &mut self.next);
            let c = C64::new(0.0, -h / k as f64);
            let mut term_max = 0.0f64;
            let mut sum_max = 0.0f64;
            for ((t, nx), p) in self.term.iter_mut().zip(&self.next).zip(psi.iter_mut()) {
                *t = c * nx;
                *p += *t;
                term_max = term_max.max(t.norm());
                sum_max = sum_max.max(p.norm());
            }
            if k >= 2 && term_max <= self.tol * sum_max {
                break;
            }
        }
    }
}

pub fn growth_rate(rec: &EvolutionRecord, fit_window: f64) -> Result<f64> {
    if !(fit_window > 0.0 && fit_window <= 1.0) {
        return Err(Error::InvalidParameter(format!("fit_window must lie in (0, 1], got {fit_window}")));
    }
    let n = rec.n_frames();
    let start = ((n as f64 * (1.0 - fit_window)).floor() as usize).min(n - 2);
    let mut xs = Vec::with_capacity(n - start);
    let mut ys = Vec::with_capacity(n - start);
    for f in start..n {
        let p = rec.total_probability[f];
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Data { frame: f, value: p });
        }
        xs.push(rec.times[f]);
        ys.push(p.ln());
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Time autocorrelation of the mean-subtracted normalized profile,
/// normalized to 1 at zero lag, for lags up to half the record.
pub fn profile_autocorrelation(rec: &EvolutionRecord) -> Vec<f64> {
    let frames = rec.n_frames();
    let sites = rec.n_sites();
    let profiles: Vec<Vec<f64>> = (0..frames).map(|f| rec.normalized_frame(f)).collect();
    let mean = rec.mean_profile(0);
    let centred: Vec<Vec<f64>> =
        profiles.into_iter().map(|p| p.iter().zip(&mean).map(|(x, m)| x - m).collect()).collect();
    let max_lag = frames / 2;
    let corr: Vec<f64> = (0..=max_lag)
        .into_par_iter()
        .map(|lag| {
            let mut acc = 0.0;
            for f in 0..frames - lag {
                let (a, b) = (&centred[f], &centred[f + lag]);
                acc += (0..sites).map(|l| a[l] * b[l]).sum::<f64>();
            }
            acc / (frames - lag) as f64
        })
        .collect();
    let c0 = corr[0];
    if c0 > 0.0 {
        corr.iter().map(|c| c / c0).collect()
    } else {
        corr
    }
}

pub fn bloch_period_estimate(rec: &EvolutionRecord) -> Result<f64> {
    if rec.n_frames() < 8 {
        return Err(Error::Analysis("too few frames for an autocorrelation".into()));
    }
    let corr = profile_autocorrelation(rec);
    let dt = rec.times[1] - rec.times[0];
    let crossing = corr
        .iter()
        .position(|&c| c < 0.0)
        .ok_or_else(|| Error::Analysis("autocorrelation never changes sign".into()))?;
    for i in crossing.max(1)..corr.len() - 1 {
        if corr[i] > 0.0 && corr[i] >= corr[i - 1] && corr[i] > corr[i + 1] {
            let (a, b, c) = (corr[i - 1], corr[i], corr[i + 1]);
            let denom = a - 2.0 * b + c;
            let offset = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            return Ok((i as f64 + offset) * dt);
        }
    }
    Err(Error::Analysis("no autocorrelation peak found".into()))
}

#[derive(Clone, Debug)]
pub struct MoireReport {
    pub sites: Vec<i64>,
    pub local_omega: Vec<f64>,
    pub per_site_class: Vec<PhaseClass>,
    pub late_time_profile: Vec<f64>,
    pub bright_mask: Vec<bool>,
    pub predicted_broken_mask: Vec<bool>,
    pub overlap_score: f64,
    /// Bright/dark transitions between neighbouring sites.
    pub n_alternations: usize,
    /// Phase changes of the per-site classification along the chain.
    pub class_alternations: usize,
    /// Share of the late-time profile on ComplexLadders sites.
    pub broken_probability_fraction: f64,
    pub threshold: f64,
    pub edge_fraction: f64,
}

pub fn count_transitions(mask: &[bool]) -> usize {
    mask.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn jaccard(a: &[bool], b: &[bool]) -> f64 {
    let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
    let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Linear-interpolation quantile of unsorted data.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < v.len() {
        v[i] + frac * (v[i + 1] - v[i])
    } else {
        v[i]
    }
}

/// Bulk classification of every site from its local slope.
pub fn local_phase_map(spec: &LatticeSpec, tol: f64) -> Result<(Vec<f64>, Vec<PhaseClass>)> {
    let sites: Vec<i64> = spec.sites().collect();
    let omegas = sites.iter().map(|&l| spec.local_slope(l)).collect::<Result<Vec<_>>>()?;
    let classes = omegas
        .par_iter()
        .map(|&w| {
            let p = BulkParams::new(spec.j, spec.beta, w)?;
            floquet::classify(&floquet::monodromy(&p)?, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((omegas, classes))
}

pub fn moire_analysis(spec: &LatticeSpec, rec: &EvolutionRecord, threshold_quantile: f64) -> Result<MoireReport> {
    if !matches!(spec.potential, PotentialSpec::Logarithmic { .. }) {
        return Err(Error::Precondition("moire analysis needs a logarithmic potential".into()));
    }
    if !(threshold_quantile > 0.0 && threshold_quantile < 1.0) {
        return Err(Error::InvalidParameter(format!("threshold_quantile must lie in (0, 1), got {threshold_quantile}")));
    }
    if rec.n_sites() != spec.n_sites {
        return Err(Error::Precondition("record does not belong to this lattice".into()));
    }
    let (local_omega, per_site_class) = local_phase_map(spec, floquet::DEFAULT_CLASSIFY_TOL)?;
    let late_time_profile = rec.mean_profile(late_start(rec.n_frames()));
    let threshold = quantile(&late_time_profile, threshold_quantile);
    let bright_mask: Vec<bool> = late_time_profile.iter().map(|&p| p > threshold).collect();
    let predicted_broken_mask: Vec<bool> =
        per_site_class.iter().map(|c| matches!(c.kind, PhaseKind::ComplexLadders { .. })).collect();
    let total: f64 = late_time_profile.iter().sum();
    let broken: f64 = late_time_profile.iter().zip(&predicted_broken_mask).filter(|(_, b)| **b).map(|(p, _)| p).fold(0.0, |a, b| a + b);
    let class_labels: Vec<&str> = per_site_class.iter().map(|c| c.label()).collect();
    Ok(MoireReport {
        sites: spec.sites().collect(),
        local_omega,
        overlap_score: jaccard(&bright_mask, &predicted_broken_mask),
        n_alternations: count_transitions(&bright_mask),
        class_alternations: class_labels.windows(2).filter(|w| w[0] != w[1]).count(),
        broken_probability_fraction: broken / total,
        per_site_class,
        late_time_profile,
        bright_mask,
        predicted_broken_mask,
        threshold,
        edge_fraction: rec.edge_fraction(),
    })
}

#[derive(Clone, Debug)]
pub struct LadderCheck {
    pub eigenvalues: Vec<C64>,
    /// Selected mid-spectrum levels folded into (-omega, omega].
    pub folded: Vec<C64>,
    /// Distance of each folded level to the nearest base point.
    pub residuals: Vec<f64>,
    pub base_points: (C64, C64),
    pub max_deviation: f64,
}

fn fold(x: f64, omega: f64) -> f64 {
    let period = 2.0 * omega;
    let r = x - period * (x / period).round();
    if r <= -omega {
        r + period
    } else {
        r
    }
}

fn folded_distance(z: C64, e: C64, omega: f64) -> f64 {
    C64::new(fold(z.re - e.re, omega), z.im - e.im).norm()
}

pub fn ladder_structure_check(spec: &LatticeSpec, n_levels: usize) -> Result<LadderCheck> {
    let omega = match spec.potential {
        PotentialSpec::Linear { omega } => omega,
        _ => return Err(Error::Precondition("ladder check needs a linear potential".into())),
    };
    if spec.n_sites < 60 {
        return Err(Error::ChainTooShort { needed: 60, got: spec.n_sites });
    }
    if n_levels == 0 || n_levels > spec.n_sites / 2 {
        return Err(Error::ChainTooShort { needed: 2 * n_levels.max(1), got: spec.n_sites });
    }
    let h = build_hamiltonian(spec)?;
    let eigenvalues = eigen::eigenvalues(h.as_matrix())?;
    let diag = spec.diagonal()?;
    let centre = diag.iter().sum::<f64>() / diag.len() as f64;
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        (eigenvalues[a].re - centre).abs().total_cmp(&(eigenvalues[b].re - centre).abs()).then(a.cmp(&b))
    });
    let m = floquet::monodromy(&BulkParams::new(spec.j, spec.beta, omega)?)?;
    let base = [m.eps1, m.eps2];
    let mut folded = Vec::with_capacity(n_levels);
    let mut residuals = Vec::with_capacity(n_levels);
    for &i in order.iter().take(n_levels) {
        let z = eigenvalues[i];
        folded.push(C64::new(fold(z.re, omega), z.im));
        residuals.push(base.iter().map(|&e| folded_distance(z, e, omega)).fold(f64::INFINITY, f64::min));
    }
    let max_deviation = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(LadderCheck { eigenvalues, folded, residuals, base_points: (m.eps1, m.eps2), max_deviation })
}
