//! Flat key = value run configuration.
//!
//! Frequencies are entered in instrument units (kHz over 2pi, durations in
//! ms) and converted to internal rad/us and us once, at the parse boundary.
//! Keys:
//!
//! ```text
//! g_over_2pi_khz       = 100        # coupling strength
//! sigma_g_over_2pi_khz = 1          # detuning standard deviation
//! t_sqrtN_ms           = 0.16       # t*sqrt(N) (scaled rule) or t (fixed rule)
//! L_list               = 2,4,6      # measurement rounds to sweep
//! N_list               = 1,4        # register sizes to sweep
//! n_samples            = 1000       # detuning realizations per record
//! seed                 = 42
//! t_rule               = scaled_by_sqrtN   # or: fixed
//! probe_convention     = shift_on_one      # or: shift_on_zero
//! ```
//!
//! `#` starts a comment. Unknown keys are rejected with the offending line.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, TRule};
use crate::model::ProbeConvention;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TRuleKind {
    ScaledBySqrtN,
    Fixed,
}

/// Parsed, validated run configuration in the units of the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub g_over_2pi_khz: f64,
    pub sigma_g_over_2pi_khz: f64,
    pub t_sqrt_n_ms: f64,
    pub l_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub n_samples: usize,
    pub seed: u64,
    pub t_rule: TRuleKind,
    pub probe_convention: ProbeConvention,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut g = None;
        let mut sigma = None;
        let mut t_ms = None;
        let mut l_list = None;
        let mut n_list = None;
        let mut n_samples = None;
        let mut seed = None;
        let mut t_rule = TRuleKind::ScaledBySqrtN;
        let mut convention = ProbeConvention::ShiftOnOne;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "line {}: expected 'key = value', got '{raw}'",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                Error::config(format!("line {}: invalid {what} '{value}'", lineno + 1))
            };
            match key {
                "g_over_2pi_khz" => g = Some(value.parse::<f64>().map_err(|_| bad("number"))?),
                "sigma_g_over_2pi_khz" => {
                    sigma = Some(value.parse::<f64>().map_err(|_| bad("number"))?)
                }
                "t_sqrtN_ms" => t_ms = Some(value.parse::<f64>().map_err(|_| bad("number"))?),
                "L_list" => l_list = Some(parse_list(value).map_err(|_| bad("integer list"))?),
                "N_list" => n_list = Some(parse_list(value).map_err(|_| bad("integer list"))?),
                "n_samples" => {
                    n_samples = Some(value.parse::<usize>().map_err(|_| bad("integer"))?)
                }
                "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad("integer"))?),
                "t_rule" => {
                    t_rule = match value {
                        "scaled_by_sqrtN" => TRuleKind::ScaledBySqrtN,
                        "fixed" => TRuleKind::Fixed,
                        _ => return Err(bad("t_rule")),
                    }
                }
                "probe_convention" => {
                    convention = match value {
                        "shift_on_one" => ProbeConvention::ShiftOnOne,
                        "shift_on_zero" => ProbeConvention::ShiftOnZero,
                        _ => return Err(bad("probe_convention")),
                    }
                }
                _ => {
                    return Err(Error::config(format!(
                        "line {}: unknown key '{key}'",
                        lineno + 1
                    )))
                }
            }
        }

        let missing = |what: &str| Error::config(format!("missing required key '{what}'"));
        let config = RunConfig {
            g_over_2pi_khz: g.ok_or_else(|| missing("g_over_2pi_khz"))?,
            sigma_g_over_2pi_khz: sigma.ok_or_else(|| missing("sigma_g_over_2pi_khz"))?,
            t_sqrt_n_ms: t_ms.ok_or_else(|| missing("t_sqrtN_ms"))?,
            l_list: l_list.ok_or_else(|| missing("L_list"))?,
            n_list: n_list.ok_or_else(|| missing("N_list"))?,
            n_samples: n_samples.ok_or_else(|| missing("n_samples"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            t_rule,
            probe_convention: convention,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.g_over_2pi_khz.is_finite() || self.g_over_2pi_khz <= 0.0 {
            return Err(Error::config("g_over_2pi_khz must be positive"));
        }
        if !self.sigma_g_over_2pi_khz.is_finite() || self.sigma_g_over_2pi_khz < 0.0 {
            return Err(Error::config("sigma_g_over_2pi_khz must be nonnegative"));
        }
        if !self.t_sqrt_n_ms.is_finite() || self.t_sqrt_n_ms <= 0.0 {
            return Err(Error::config("t_sqrtN_ms must be positive"));
        }
        if self.l_list.is_empty() || self.n_list.is_empty() {
            return Err(Error::config("L_list and N_list must be nonempty"));
        }
        if self.n_samples == 0 {
            return Err(Error::config("n_samples must be at least 1"));
        }
        if self.n_list.contains(&0) {
            return Err(Error::config("register sizes in N_list must be positive"));
        }
        Ok(())
    }

    /// Canonical text form: fixed key order, normalized spacing and number
    /// formatting. Parsing the canonical text reproduces the config.
    pub fn canonical_text(&self) -> String {
        let list = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "L_list = {}\nN_list = {}\ng_over_2pi_khz = {}\nn_samples = {}\n\
             probe_convention = {}\nseed = {}\nsigma_g_over_2pi_khz = {}\n\
             t_rule = {}\nt_sqrtN_ms = {}\n",
            list(&self.l_list),
            list(&self.n_list),
            self.g_over_2pi_khz,
            self.n_samples,
            match self.probe_convention {
                ProbeConvention::ShiftOnOne => "shift_on_one",
                ProbeConvention::ShiftOnZero => "shift_on_zero",
            },
            self.seed,
            self.sigma_g_over_2pi_khz,
            match self.t_rule {
                TRuleKind::ScaledBySqrtN => "scaled_by_sqrtN",
                TRuleKind::Fixed => "fixed",
            },
            self.t_sqrt_n_ms,
        )
    }

    /// Stable digest of the canonical config text.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Expand into the sweep the experiments run: N_list x L_list, N outer.
    pub fn to_experiment_config(&self, parallel: bool) -> ExperimentConfig {
        let sweep = self
            .n_list
            .iter()
            .flat_map(|&n| self.l_list.iter().map(move |&l| (n, l)))
            .collect();
        ExperimentConfig {
            g: TWO_PI * self.g_over_2pi_khz / 1000.0,
            sigma_g: TWO_PI * self.sigma_g_over_2pi_khz / 1000.0,
            n_samples: self.n_samples,
            seed: self.seed,
            sweep,
            t_rule: match self.t_rule {
                TRuleKind::ScaledBySqrtN => TRule::ScaledSqrtN {
                    t_sqrt_n_us: self.t_sqrt_n_ms * 1000.0,
                },
                TRuleKind::Fixed => TRule::Fixed {
                    t_us: self.t_sqrt_n_ms * 1000.0,
                },
            },
            convention: self.probe_convention,
            parallel,
            ..ExperimentConfig::default()
        }
    }
}

fn parse_list(value: &str) -> std::result::Result<Vec<usize>, ()> {
    let items: std::result::Result<Vec<usize>, _> = value
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(()),
    }
}
