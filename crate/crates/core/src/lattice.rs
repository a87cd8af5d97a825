//! Finite non-Hermitian SSH chain in a position-dependent potential.
//!
//! Sites carry integer labels `l` in `-n/2 ..= n/2 - 1`; row `i` of every
//! matrix and vector corresponds to the site `l = -n/2 + i`. Even labels are
//! A sites and couple rightward by the real hopping `J`, odd labels are B sites
//! and couple rightward by the imaginary hopping `i*beta`. Both directions of a
//! bond carry the same entry, so the Hamiltonian is complex symmetric.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// On-site energy profile `V_l`.
#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    /// `V_l = omega * (l + 1/2)`.
    Linear { omega: f64 },
    /// `V_l = ln(gamma * l + tau) / gamma`, local slope `1 / (gamma * l + tau)`.
    Logarithmic { gamma: f64, tau: f64 },
    /// Explicit per-site energies, one entry per site in site order.
    Table { values: Vec<f64> },
}

impl PotentialSpec {
    fn validate(&self, lo: i64, hi: i64, n_sites: usize) -> Result<()> {
        match self {
            PotentialSpec::Linear { omega } => {
                if !(omega.is_finite() && *omega > 0.0) {
                    return Err(Error::InvalidParameter(format!("linear slope omega must be > 0, got {omega}")));
                }
            }
            PotentialSpec::Logarithmic { gamma, tau } => {
                if !(gamma.is_finite() && *gamma > 0.0 && tau.is_finite() && *tau > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "logarithmic potential needs gamma > 0 and tau > 0, got gamma={gamma}, tau={tau}"
                    )));
                }
                // the argument is monotone in l, so the left end is the binding one
                for site in [lo, hi] {
                    let argument = gamma * site as f64 + tau;
                    if argument <= 0.0 {
                        return Err(Error::Domain { site, argument });
                    }
                }
            }
            PotentialSpec::Table { values } => {
                if values.len() != n_sites {
                    return Err(Error::InvalidParameter(format!(
                        "potential table has {} entries for {} sites",
                        values.len(),
                        n_sites
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter("potential table contains non-finite values".into()));
                }
            }
        }
        Ok(())
    }
}

/// Parameters of a finite chain.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    pub j: f64,
    pub beta: f64,
    pub n_sites: usize,
    pub potential: PotentialSpec,
}

impl LatticeSpec {
    pub fn new(j: f64, beta: f64, n_sites: usize, potential: PotentialSpec) -> Result<Self> {
        let spec = LatticeSpec { j, beta, n_sites, potential };
        spec.validate()?;
        Ok(spec)
    }

    pub fn linear(j: f64, beta: f64, n_sites: usize, omega: f64) -> Result<Self> {
        Self::new(j, beta, n_sites, PotentialSpec::Linear { omega })
    }

    pub fn logarithmic(j: f64, beta: f64, n_sites: usize, gamma: f64, tau: f64) -> Result<Self> {
        Self::new(j, beta, n_sites, PotentialSpec::Logarithmic { gamma, tau })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j.is_finite() && self.j > 0.0) {
            return Err(Error::InvalidParameter(format!("hopping J must be > 0, got {}", self.j)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidParameter(format!("hopping beta must be >= 0, got {}", self.beta)));
        }
        if self.n_sites == 0 || self.n_sites % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "n_sites must be a positive even number, got {}",
                self.n_sites
            )));
        }
        self.potential.validate(self.first_site(), self.last_site(), self.n_sites)
    }

    /// Label of the leftmost site, `-n/2`.
    pub fn first_site(&self) -> i64 {
        -(self.n_sites as i64 / 2)
    }

    /// Label of the rightmost site, `n/2 - 1`.
    pub fn last_site(&self) -> i64 {
        self.n_sites as i64 / 2 - 1
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.first_site()..=self.last_site()
    }

    /// Row index of site `l`.
    pub fn index_of(&self, l: i64) -> Result<usize> {
        let (lo, hi) = (self.first_site(), self.last_site());
        if l < lo || l > hi {
            return Err(Error::IndexOutOfRange { index: l, lo, hi });
        }
        Ok((l - lo) as usize)
    }

    pub fn potential_value(&self, l: i64) -> Result<f64> {
        let idx = self.index_of(l)?;
        Ok(match &self.potential {
            PotentialSpec::Linear { omega } => omega * (l as f64 + 0.5),
            PotentialSpec::Logarithmic { gamma, tau } => {
                let argument = gamma * l as f64 + tau;
                if argument <= 0.0 {
                    return Err(Error::Domain { site: l, argument });
                }
                argument.ln() / gamma
            }
            PotentialSpec::Table { values } => values[idx],
        })
    }

    /// Local field strength `dV/dl` at site `l`; forward difference for tables.
    pub fn local_slope(&self, l: i64) -> Result<f64> {
        self.index_of(l)?;
        Ok(match &self.potential {
            PotentialSpec::Linear { omega } => *omega,
            PotentialSpec::Logarithmic { gamma, tau } => {
                let argument = gamma * l as f64 + tau;
                if argument <= 0.0 {
                    return Err(Error::Domain { site: l, argument });
                }
                1.0 / argument
            }
            PotentialSpec::Table { .. } => {
                let next = self.potential_value(l + 1)?;
                next - self.potential_value(l)?
            }
        })
    }

    /// Hopping on the bond between sites `l` and `l + 1`.
    pub fn bond(&self, l: i64) -> C64 {
        if l.rem_euclid(2) == 0 {
            C64::new(self.j, 0.0)
        } else {
            C64::new(0.0, self.beta)
        }
    }

    pub fn diagonal(&self) -> Result<Vec<f64>> {
        self.sites().map(|l| self.potential_value(l)).collect()
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.potential, PotentialSpec::Linear { .. })
    }
}

/// Dense square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidParameter(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        Ok(ComplexMatrix(m))
    }

    pub fn from_row_major(dimension: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dimension * dimension {
            return Err(Error::InvalidParameter(format!(
                "{} entries for a {dimension}x{dimension} matrix",
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dimension, dimension, entries))
    }

    pub fn dimension(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn is_symmetric(&self) -> bool {
        self.0 == self.0.transpose()
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }
}

/// Tridiagonal Hamiltonian in compact storage, `upper[i] = H[i, i+1] = H[i+1, i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<C64>,
}

impl Tridiagonal {
    pub fn from_spec(spec: &LatticeSpec) -> Result<Self> {
        spec.validate()?;
        let diag = spec.diagonal()?;
        let off = (spec.first_site()..spec.last_site()).map(|l| spec.bond(l)).collect();
        Ok(Tridiagonal { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `out = (H - shift) * x`.
    pub fn apply_shifted(&self, shift: f64, x: &[C64], out: &mut [C64]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut acc = x[i] * (self.diag[i] - shift);
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            out[i] = acc;
        }
    }

    /// Max-row-sum norm of `H - shift`.
    pub fn norm_inf_shifted(&self, shift: f64) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = (self.diag[i] - shift).abs();
                if i > 0 {
                    s += self.off[i - 1].norm();
                }
                if i + 1 < n {
                    s += self.off[i].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.diag.len();
        let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for (i, &v) in self.diag.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        for (i, &t) in self.off.iter().enumerate() {
            m[(i, i + 1)] = t;
            m[(i + 1, i)] = t;
        }
        m
    }
}

pub fn build_hamiltonian(spec: &LatticeSpec) -> Result<ComplexMatrix> {
    ComplexMatrix::new(Tridiagonal::from_spec(spec)?.to_dense())
}

/// Complex amplitudes, one per site, in site order.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<C64>,
    pub normalized: bool,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        StateVector { amplitudes, normalized: false }
    }

    /// Rescales to unit Dirac norm and sets the flag.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("cannot normalize a zero or non-finite state".into()));
        }
        for a in &mut self.amplitudes {
            *a /= norm;
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// Gaussian packet `exp(-width_coeff * l^2)` centred on site `l = 0`.
pub fn gaussian_state(n_sites: usize, width_coeff: f64) -> Result<StateVector> {
    if n_sites < 2 {
        return Err(Error::InvalidParameter(format!("gaussian state needs >= 2 sites, got {n_sites}")));
    }
    if !(width_coeff.is_finite() && width_coeff > 0.0) {
        return Err(Error::InvalidParameter(format!("width coefficient must be > 0, got {width_coeff}")));
    }
    let lo = -(n_sites as i64 / 2);
    let amps = (0..n_sites)
        .map(|i| {
            let l = (lo + i as i64) as f64;
            C64::new((-width_coeff * l * l).exp(), 0.0)
        })
        .collect();
    StateVector::new(amps).normalize()
}

/// Equal amplitude `1/sqrt(n)` on every site.
pub fn flat_state(n_sites: usize) -> Result<StateVector> {
    if n_sites == 0 {
        return Err(Error::InvalidParameter("flat state needs at least one site".into()));
    }
    let a = 1.0 / (n_sites as f64).sqrt();
    Ok(StateVector { amplitudes: vec![C64::new(a, 0.0); n_sites], normalized: true })
}

/// Bulk residuals of the two linear-field symmetries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryResiduals {
    /// `max |T2 H T2^-1 - (H - 2 omega)|` over the interior.
    pub ramped: f64,
    /// `max |R0 H R0^-1 + H|` over the interior.
    pub reflection: f64,
}

pub fn symmetry_residuals(spec: &LatticeSpec) -> Result<SymmetryResiduals> {
    let omega = match spec.potential {
        PotentialSpec::Linear { omega } => omega,
        _ => return Err(Error::Precondition("symmetry checks need a linear potential".into())),
    };
    if spec.n_sites < 8 {
        return Err(Error::ChainTooShort { needed: 8, got: spec.n_sites });
    }
    let h = build_hamiltonian(spec)?.into_matrix();
    let n = spec.n_sites;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);

    // two-site shift; its transpose inverts it away from the left edge
    let mut t2 = DMatrix::from_element(n, n, zero);
    for i in 0..n - 2 {
        t2[(i + 2, i)] = one;
    }
    let shifted = &t2 * &h * t2.transpose();

    // R0 |l> = (-1)^l |-1-l>; R0^2 = -1 so R0^-1 = -R0
    let mut r0 = DMatrix::from_element(n, n, zero);
    for (i, l) in spec.sites().enumerate() {
        let sign = if l.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        r0[(n - 1 - i, i)] = C64::new(sign, 0.0);
    }
    let r0_inv = -r0.clone();
    let reflected = &r0 * &h * &r0_inv;

    let interior = 2..n - 2;
    let mut ramped: f64 = 0.0;
    let mut reflection: f64 = 0.0;
    for a in interior.clone() {
        for b in interior.clone() {
            let target = if a == b { h[(a, b)] - 2.0 * omega } else { h[(a, b)] };
            ramped = ramped.max((shifted[(a, b)] - target).norm());
            reflection = reflection.max((reflected[(a, b)] + h[(a, b)]).norm());
        }
    }
    Ok(SymmetryResiduals { ramped, reflection })
}
