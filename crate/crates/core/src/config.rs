//! Run configuration: flat namespaced `block.key = value` lines.
//!
//! ```text
//! lattice.J = 1.0
//! lattice.beta = 0.46
//! lattice.potential = "logarithmic"
//! ```
//!
//! Values follow TOML syntax. Unknown blocks or keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dynamics::{EvolutionConfig, Method};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, PotentialSpec};

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: Option<RunBlock>,
    pub lattice: Option<LatticeBlock>,
    pub grid: Option<GridBlock>,
    pub ep: Option<EpBlock>,
    pub evolution: Option<EvolutionBlock>,
    pub moire: Option<MoireBlock>,
    pub spectrum: Option<SpectrumBlock>,
    pub output: Option<OutputBlock>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LatticeBlock {
    #[serde(rename = "J")]
    pub j: f64,
    pub beta: f64,
    pub n_sites: usize,
    pub potential: String,
    pub omega: Option<f64>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub j_over_omega_min: f64,
    pub j_over_omega_max: f64,
    pub j_over_omega_count: usize,
    pub beta_over_omega_min: f64,
    pub beta_over_omega_max: f64,
    pub beta_over_omega_count: usize,
    pub classify_tol: Option<f64>,
    /// Highest ladder index of the analytic overlay curve.
    pub overlay_n_max: Option<u32>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EpBlock {
    #[serde(rename = "J")]
    pub j: f64,
    pub beta: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EvolutionBlock {
    pub t_max: Option<f64>,
    /// Alternative to `t_max`, in units of pi.
    pub t_max_over_pi: Option<f64>,
    pub n_frames: Option<usize>,
    pub tolerance: Option<f64>,
    pub method: Option<String>,
    /// "gaussian" or "flat".
    pub initial_state: Option<String>,
    pub gaussian_width: Option<f64>,
    pub fit_window: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MoireBlock {
    pub threshold_quantile: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    pub n_levels: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    Gaussian,
    Flat,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string().trim_end().replace('\n', " ")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn threads(&self) -> usize {
        self.run.as_ref().and_then(|r| r.threads).unwrap_or(1)
    }

    pub fn out_dir(&self) -> Option<&Path> {
        self.output.as_ref().and_then(|o| o.dir.as_deref())
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec> {
        let b = self.lattice.as_ref().ok_or_else(|| config_err("missing lattice block"))?;
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| config_err(format!("lattice.{key} is required")));
        let potential = match b.potential.as_str() {
            "linear" => {
                if b.gamma.is_some() || b.tau.is_some() {
                    return Err(config_err("lattice.gamma and lattice.tau do not apply to a linear potential"));
                }
                PotentialSpec::Linear { omega: need(b.omega, "omega")? }
            }
            "logarithmic" => {
                if b.omega.is_some() {
                    return Err(config_err("lattice.omega does not apply to a logarithmic potential"));
                }
                PotentialSpec::Logarithmic { gamma: need(b.gamma, "gamma")?, tau: need(b.tau, "tau")? }
            }
            other => return Err(config_err(format!("unknown lattice.potential {other:?}"))),
        };
        LatticeSpec::new(b.j, b.beta, b.n_sites, potential).map_err(|e| config_err(e.to_string()))
    }

    pub fn grid(&self) -> Result<&GridBlock> {
        let g = self.grid.as_ref().ok_or_else(|| config_err("missing grid block"))?;
        if g.j_over_omega_count < 1 || g.beta_over_omega_count < 1 {
            return Err(config_err("grid counts must be at least 1"));
        }
        for (lo, hi, name) in [
            (g.j_over_omega_min, g.j_over_omega_max, "j_over_omega"),
            (g.beta_over_omega_min, g.beta_over_omega_max, "beta_over_omega"),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi >= lo) {
                return Err(config_err(format!("grid.{name} range [{lo}, {hi}] is invalid")));
            }
        }
        Ok(g)
    }

    pub fn ep(&self) -> Result<&EpBlock> {
        let e = self.ep.as_ref().ok_or_else(|| config_err("missing ep block"))?;
        if !(e.j > 0.0 && e.beta >= 0.0 && e.omega_min > 0.0 && e.omega_max > e.omega_min) {
            return Err(config_err("ep block needs J > 0, beta >= 0 and 0 < omega_min < omega_max"));
        }
        Ok(e)
    }

    fn evolution_block(&self) -> Result<&EvolutionBlock> {
        self.evolution.as_ref().ok_or_else(|| config_err("missing evolution block"))
    }

    pub fn evolution_config(&self, n_sites: usize, default_frames: usize) -> Result<EvolutionConfig> {
        let b = self.evolution_block()?;
        let t_max = match (b.t_max, b.t_max_over_pi) {
            (Some(t), None) => t,
            (None, Some(k)) => k * std::f64::consts::PI,
            _ => return Err(config_err("set exactly one of evolution.t_max and evolution.t_max_over_pi")),
        };
        let mut cfg = EvolutionConfig::for_chain(n_sites, t_max, b.n_frames.unwrap_or(default_frames));
        if let Some(tol) = b.tolerance {
            cfg.tolerance = tol;
        }
        if let Some(m) = &b.method {
            cfg.method = Method::parse(m).ok_or_else(|| config_err(format!("unknown evolution.method {m:?}")))?;
        }
        cfg.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(cfg)
    }

    pub fn initial_state(&self, default: InitialState) -> Result<InitialState> {
        match self.evolution_block()?.initial_state.as_deref() {
            None => Ok(default),
            Some("gaussian") => Ok(InitialState::Gaussian),
            Some("flat") => Ok(InitialState::Flat),
            Some(other) => Err(config_err(format!("unknown evolution.initial_state {other:?}"))),
        }
    }

    pub fn gaussian_width(&self) -> f64 {
        self.evolution.as_ref().and_then(|e| e.gaussian_width).unwrap_or(0.01)
    }

    pub fn fit_window(&self) -> Result<f64> {
        let w = self.evolution.as_ref().and_then(|e| e.fit_window).unwrap_or(0.5);
        if w > 0.0 && w <= 1.0 {
            Ok(w)
        } else {
            Err(config_err(format!("evolution.fit_window must lie in (0, 1], got {w}")))
        }
    }

    pub fn threshold_quantile(&self) -> Result<f64> {
        let q = self.moire.as_ref().and_then(|m| m.threshold_quantile).unwrap_or(0.5);
        if q > 0.0 && q < 1.0 {
            Ok(q)
        } else {
            Err(config_err(format!("moire.threshold_quantile must lie in (0, 1), got {q}")))
        }
    }

    pub fn n_levels(&self) -> Result<usize> {
        Ok(self.spectrum.as_ref().ok_or_else(|| config_err("missing spectrum block"))?.n_levels)
    }
}
