//! Non-Hermitian Floquet analysis of the infinite tilted chain.
//!
//! In the two-site Bloch representation the stationary problem becomes the
//! k-space equation `i 2 omega dY/dk = G_k Y` on one Brillouin zone. Its
//! monodromy `U0` (taken at `E = 0`) has unit determinant, and its two
//! multipliers `lambda = exp(i pi eps / omega)` fix the base points of the two
//! Wannier-Stark ladders `eps + 2 n omega`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use rayon::prelude::*;

use crate::analytics;
use crate::error::{Error, Result};
use crate::lattice::C64;

const MIN_STEPS: usize = 16;
const MAX_STEPS: usize = 1 << 22;
const DRIFT_TARGET: f64 = 1e-10;

/// Trace tolerance used when no other is given.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-6;

/// Hoppings and field slope of the bulk chain. `j = 0` is admitted: it is the
/// decoupled-dimer limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BulkParams {
    pub j: f64,
    pub beta: f64,
    pub omega: f64,
}

impl BulkParams {
    pub fn new(j: f64, beta: f64, omega: f64) -> Result<Self> {
        let p = BulkParams { j, beta, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j.is_finite() && self.j >= 0.0) {
            return Err(Error::InvalidParameter(format!("J must be finite and >= 0, got {}", self.j)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidParameter(format!("omega must be finite and > 0, got {}", self.omega)));
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        BulkParams { j: s * self.j, beta: s * self.beta, omega: s * self.omega }
    }
}

/// Row-major 2x2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [C64; 4]);

impl Mat2 {
    pub fn identity() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Mat2([o, z, z, o])
    }

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([a, b, c, d])
    }

    pub fn trace(&self) -> C64 {
        self.0[0] + self.0[3]
    }

    pub fn det(&self) -> C64 {
        self.0[0] * self.0[3] - self.0[1] * self.0[2]
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2(self.0.map(|z| z * s))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues from the characteristic polynomial.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let half = self.trace() * 0.5;
        let disc = (half * half - self.det()).sqrt();
        (half + disc, half - disc)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2], self.0[3] - o.0[3]])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Mat2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }
}

/// The k-space generator `G_k` at energy `e`.
pub fn generator(k: f64, e: C64, p: &BulkParams) -> Mat2 {
    let (s, c) = k.sin_cos();
    let ib = C64::new(0.0, p.beta);
    let off_minus = -p.j - ib * C64::new(c, -s); // -J - i beta e^{-ik}
    let off_plus = -p.j - ib * C64::new(c, s);
    Mat2::new(e - 0.5 * p.omega, off_minus, off_plus, e - 1.5 * p.omega)
}

/// Right-hand side `(1 / (2 i omega)) G_k^0`.
fn rate_matrix(k: f64, p: &BulkParams) -> Mat2 {
    generator(k, C64::new(0.0, 0.0), p).scale(C64::new(0.0, -0.5 / p.omega))
}

/// Classical RK4 over `[0, 2 pi]` in `steps` equal steps, from the identity.
pub fn integrate_rk4(p: &BulkParams, steps: usize) -> Mat2 {
    let h = 2.0 * PI / steps as f64;
    let hc = C64::new(h, 0.0);
    let mut y = Mat2::identity();
    let mut a0 = rate_matrix(0.0, p);
    for i in 0..steps {
        let k = i as f64 * h;
        let a_mid = rate_matrix(k + 0.5 * h, p);
        let a1 = rate_matrix((i + 1) as f64 * h, p);
        let k1 = a0 * y;
        let k2 = a_mid * (y + k1.scale(hc * 0.5));
        let k3 = a_mid * (y + k2.scale(hc * 0.5));
        let k4 = a1 * (y + k3.scale(hc));
        y = y + (k1 + k2.scale(C64::new(2.0, 0.0)) + k3.scale(C64::new(2.0, 0.0)) + k4).scale(hc / 6.0);
        a0 = a1;
    }
    y
}

/// Starting step count; grows with the generator's scale `(J + beta) / omega`.
pub fn initial_steps(p: &BulkParams) -> usize {
    let scaled = 64.0 * (1.0 + (p.j + p.beta) / p.omega);
    (scaled.ceil() as usize).max(256)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonodromyResult {
    pub params: BulkParams,
    pub u0: Mat2,
    pub lambda1: C64,
    pub lambda2: C64,
    pub eps1: C64,
    pub eps2: C64,
    pub trace: C64,
    pub det_residual: f64,
    pub steps_used: usize,
    /// Relative change of `U0` under the last step doubling (NaN for a fixed step count).
    pub drift: f64,
}

impl MonodromyResult {
    /// `max(1, max |U0_ij|)`. Rounding in `det` and `tr` grows with this.
    pub fn scale(&self) -> f64 {
        self.u0.max_abs().max(1.0)
    }

    /// `det_residual < 1e-8 scale^2`; at unit scale this is the plain `1e-8` bound.
    pub fn is_converged(&self) -> bool {
        self.det_residual < 1e-8 * self.scale() * self.scale()
    }
}

/// Base point `(omega / (i pi)) Log lambda` with `Im Log` in `(-pi, pi]`.
pub fn base_point(lambda: C64, omega: f64) -> C64 {
    let mut arg = lambda.arg();
    if arg <= -PI {
        arg = PI;
    }
    C64::new(omega * arg / PI, -omega * lambda.norm().ln() / PI)
}

fn finish(p: &BulkParams, u0: Mat2, steps_used: usize, drift: f64) -> MonodromyResult {
    let (la, lb) = u0.eigenvalues();
    let (ea, eb) = (base_point(la, p.omega), base_point(lb, p.omega));
    // eps1 is the growing base point (Im > 0) when the moduli split, else Re >= 0
    let growing_first = if (la.norm().ln() - lb.norm().ln()).abs() > 1e-8 {
        ea.im >= eb.im
    } else {
        ea.re >= eb.re
    };
    let (lambda1, lambda2, eps1, mut eps2) = if growing_first { (la, lb, ea, eb) } else { (lb, la, eb, ea) };
    // both base points are defined mod 2 omega; keep the representative opposite eps1
    let sum = (eps1 + eps2).re;
    if sum > p.omega {
        eps2 -= 2.0 * p.omega;
    } else if sum < -p.omega {
        eps2 += 2.0 * p.omega;
    }
    MonodromyResult {
        params: *p,
        u0,
        lambda1,
        lambda2,
        eps1,
        eps2,
        trace: u0.trace(),
        det_residual: (lambda1 * lambda2 - 1.0).norm(),
        steps_used,
        drift,
    }
}

/// Monodromy with a fixed step count.
pub fn monodromy_with_steps(p: &BulkParams, steps: usize) -> Result<MonodromyResult> {
    p.validate()?;
    if steps < MIN_STEPS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_STEPS} steps, got {steps}")));
    }
    Ok(finish(p, integrate_rk4(p, steps), steps, f64::NAN))
}

/// Monodromy with step doubling until `U0` moves by less than `1e-10`
/// (relative to `max(1, |U0|)`) between successive refinements.
pub fn monodromy(p: &BulkParams) -> Result<MonodromyResult> {
    p.validate()?;
    let mut steps = initial_steps(p);
    let mut prev = integrate_rk4(p, steps);
    loop {
        let next_steps = steps * 2;
        if next_steps > MAX_STEPS {
            return Err(Error::Convergence { steps, drift: f64::NAN });
        }
        let next = integrate_rk4(p, next_steps);
        let drift = (next - prev).max_abs() / next.max_abs().max(1.0);
        steps = next_steps;
        if drift < DRIFT_TARGET {
            return Ok(finish(p, next, steps, drift));
        }
        if steps * 2 > MAX_STEPS {
            return Err(Error::Convergence { steps, drift });
        }
        prev = next;
    }
}

/// Which of the three ladder structures a parameter point carries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseKind {
    /// Two real ladders offset by `2 eps0`, `0 <= eps0 <= omega`.
    RealLadders { eps0: f64 },
    /// Complex-conjugate ladders with base points `+- i im_eps0` (mod omega).
    ComplexLadders { im_eps0: f64 },
    /// A single coalescing ladder; `sign` is the sign of `tr U0`.
    EpLadder { sign: i8 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseClass {
    pub kind: PhaseKind,
    pub classifier_trace: f64,
    pub im_trace: f64,
}

impl PhaseClass {
    pub fn label(&self) -> &'static str {
        match self.kind {
            PhaseKind::RealLadders { .. } => "real",
            PhaseKind::ComplexLadders { .. } => "complex",
            PhaseKind::EpLadder { .. } => "ep",
        }
    }

    pub fn is_broken(&self) -> bool {
        matches!(self.kind, PhaseKind::ComplexLadders { .. })
    }

    pub fn is_real(&self) -> bool {
        matches!(self.kind, PhaseKind::RealLadders { .. })
    }
}

/// Classifies by `Re tr U0`: inside `(-2, 2)` real, outside complex, at `+-2` EP.
/// The reality check on the trace is relative to [`MonodromyResult::scale`].
pub fn classify(m: &MonodromyResult, tol: f64) -> Result<PhaseClass> {
    if !m.is_converged() {
        return Err(Error::Precondition(format!(
            "monodromy not converged (det residual {:e})",
            m.det_residual
        )));
    }
    let tr = m.trace.re;
    let im_trace = m.trace.im;
    let im_tol = tol * m.scale();
    if im_trace.abs() >= im_tol {
        return Err(Error::SymmetryViolation { im_trace, tol: im_tol });
    }
    let kind = if tr.abs() < 2.0 - tol {
        PhaseKind::RealLadders { eps0: m.eps1.re.abs() }
    } else if tr.abs() > 2.0 + tol {
        PhaseKind::ComplexLadders { im_eps0: m.eps1.im.abs() }
    } else {
        PhaseKind::EpLadder { sign: if tr >= 0.0 { 1 } else { -1 } }
    };
    Ok(PhaseClass { kind, classifier_trace: tr, im_trace })
}

/// True when `U0` is a non-trivial Jordan block: the multipliers coincide
/// (`|(tr/2)^2 - det| < tol`) but `U0 - (tr/2) I` does not vanish.
pub fn is_jordan_block(u0: &Mat2, tol: f64) -> bool {
    let half = u0.trace() * 0.5;
    let coincide = (half * half - u0.det()).norm() < tol;
    let residual = (*u0 - Mat2::identity().scale(half)).max_abs();
    coincide && residual > tol
}

/// `|tr U0| - 2` at `(j, beta, omega)`; positive in the broken phase.
fn ep_indicator(j: f64, beta: f64, omega: f64) -> Result<f64> {
    let m = monodromy(&BulkParams::new(j, beta, omega)?)?;
    Ok(m.trace.re.abs() - 2.0)
}

/// Number of scan cells between `omega_lo` and `omega_hi`.
///
/// The scan is uniform in `1/omega`. Predicted band centres `(2n+1) pi / d` are
/// `2 pi / d` apart in `J/omega`, and each cell covers at most a sixteenth of that.
fn scan_cells(j: f64, beta: f64, omega_lo: f64, omega_hi: f64) -> usize {
    let span = 1.0 / omega_lo - 1.0 / omega_hi;
    let base = 256usize;
    if j <= 0.0 {
        return base;
    }
    match analytics::d_integral(j, beta) {
        Ok(d) => {
            let spacing = 2.0 * PI / d;
            base.max((16.0 * span / spacing).ceil() as usize)
        }
        Err(_) => base,
    }
}

/// All `omega` in `[omega_lo, omega_hi]` where `|tr U0|` crosses 2, bisected to width `tol`.
pub fn find_ep_along_omega(j: f64, beta: f64, omega_lo: f64, omega_hi: f64, tol: f64) -> Result<Vec<f64>> {
    if !(omega_lo > 0.0 && omega_hi > omega_lo && omega_hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < omega_lo < omega_hi, got [{omega_lo}, {omega_hi}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("bisection tolerance must be > 0, got {tol}")));
    }
    let cells = scan_cells(j, beta, omega_lo, omega_hi);
    let (x_lo, x_hi) = (1.0 / omega_hi, 1.0 / omega_lo);
    let grid: Vec<f64> = (0..=cells)
        .map(|i| 1.0 / (x_lo + (x_hi - x_lo) * i as f64 / cells as f64))
        .collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&w| ep_indicator(j, beta, w))
        .collect::<Result<Vec<_>>>()?;

    let brackets: Vec<(f64, f64, f64)> = grid
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| v[0] == 0.0 || v[0].signum() != v[1].signum())
        .map(|(w, v)| (w[1], w[0], v[1]))
        .collect();

    let mut eps: Vec<f64> = brackets
        .par_iter()
        .map(|&(lo, hi, f_lo)| bisect(|w| ep_indicator(j, beta, w), lo, hi, f_lo, tol))
        .collect::<Result<Vec<_>>>()?;
    eps.sort_by(f64::total_cmp);
    eps.dedup_by(|a, b| (*a - *b).abs() < tol);
    Ok(eps)
}

fn bisect<F>(f: F, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if f_lo == 0.0 {
        return Ok(lo);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One evaluated point of the `J/omega`-`beta/omega` plane (`omega = 1`).
#[derive(Clone, Debug)]
pub struct PhaseCell {
    pub j_over_omega: f64,
    pub beta_over_omega: f64,
    pub result: Result<(MonodromyResult, PhaseClass)>,
}

fn evaluate_cell(j: f64, beta: f64, tol: f64) -> Result<(MonodromyResult, PhaseClass)> {
    let m = monodromy(&BulkParams::new(j, beta, 1.0)?)?;
    let class = classify(&m, tol)?;
    Ok((m, class))
}

/// Evaluates every grid point, keeping failures per cell. Row-major with
/// `beta_over_omega` as the outer index; order is independent of scheduling.
pub fn phase_diagram_cells(j_over_omega: &[f64], beta_over_omega: &[f64], tol: f64) -> Vec<PhaseCell> {
    let points: Vec<(f64, f64)> = beta_over_omega
        .iter()
        .flat_map(|&b| j_over_omega.iter().map(move |&j| (j, b)))
        .collect();
    points
        .par_iter()
        .map(|&(j, b)| PhaseCell { j_over_omega: j, beta_over_omega: b, result: evaluate_cell(j, b, tol) })
        .collect()
}

/// Phase classes on the grid, `result[beta_index][j_index]`; fails on the first bad cell.
pub fn phase_diagram(j_over_omega: &[f64], beta_over_omega: &[f64], tol: f64) -> Result<Vec<Vec<PhaseClass>>> {
    if j_over_omega.is_empty() || beta_over_omega.is_empty() {
        return Err(Error::InvalidParameter("phase diagram grids must be non-empty".into()));
    }
    if j_over_omega.iter().chain(beta_over_omega).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter("phase diagram grid values must be finite and >= 0".into()));
    }
    let cells = phase_diagram_cells(j_over_omega, beta_over_omega, tol);
    let mut rows = Vec::with_capacity(beta_over_omega.len());
    for row in cells.chunks(j_over_omega.len()) {
        let mut out = Vec::with_capacity(row.len());
        for cell in row {
            match &cell.result {
                Ok((_, class)) => out.push(*class),
                Err(e) => {
                    return Err(Error::AtGridPoint {
                        j_over_omega: cell.j_over_omega,
                        beta_over_omega: cell.beta_over_omega,
                        source: Box::new(e.clone()),
                    })
                }
            }
        }
        rows.push(out);
    }
    Ok(rows)
}
