//! Flag values, optionally backed by a TOML file. A flag given on the command
//! line wins over the file, which wins over the built-in default.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Number of relays.
    #[arg(long = "M", global = true)]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    /// Relay power.
    #[arg(long = "P", global = true)]
    #[serde(rename = "P")]
    pub p: Option<f64>,
    /// Single fronthaul capacity, bits per channel use.
    #[arg(long = "C", global = true)]
    #[serde(rename = "C")]
    pub c: Option<f64>,
    #[arg(long, global = true)]
    pub cmin: Option<f64>,
    #[arg(long, global = true)]
    pub cmax: Option<f64>,
    /// Grid points from cmin to cmax inclusive.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials, or instances per verification suite.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Blocklengths, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Typicality slack.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Channel description file.
    #[arg(long, global = true)]
    pub channel: Option<PathBuf>,
    /// Verification suite; all suites when absent.
    #[arg(long, global = true)]
    pub suite: Option<String>,
    /// Total message rate for `simulate`, split evenly over the relays.
    #[arg(long, global = true)]
    pub rate: Option<f64>,
    /// Per-relay binning rate for `simulate`.
    #[arg(long = "r-prime", global = true)]
    #[serde(rename = "r-prime")]
    pub r_prime: Option<f64>,
    /// Add the M C and full-cooperation columns to `sweep`.
    #[arg(long, global = true)]
    #[serde(default)]
    pub reference_curves: bool,
}

impl Params {
    /// Fill unset flags from `file`.
    pub fn merge(self, file: Params) -> Params {
        Params {
            m: self.m.or(file.m),
            p: self.p.or(file.p),
            c: self.c.or(file.c),
            cmin: self.cmin.or(file.cmin),
            cmax: self.cmax.or(file.cmax),
            steps: self.steps.or(file.steps),
            out: self.out.or(file.out),
            seed: self.seed.or(file.seed),
            trials: self.trials.or(file.trials),
            n: self.n.or(file.n),
            epsilon: self.epsilon.or(file.epsilon),
            channel: self.channel.or(file.channel),
            suite: self.suite.or(file.suite),
            rate: self.rate.or(file.rate),
            r_prime: self.r_prime.or(file.r_prime),
            reference_curves: self.reference_curves || file.reference_curves,
        }
    }

    pub fn relays(&self) -> usize {
        self.m.unwrap_or(3)
    }

    pub fn power(&self) -> f64 {
        self.p.unwrap_or(1.0)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// The `--C` value alone, or the `cmin..=cmax` grid.
    pub fn fronthaul_grid(&self) -> Result<Vec<f64>, CliError> {
        if let Some(c) = self.c {
            return Ok(vec![c]);
        }
        let lo = self.cmin.unwrap_or(0.0);
        let hi = self.cmax.unwrap_or(2.0);
        let steps = self.steps.unwrap_or(41);
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(CliError::Guard(format!("need cmin <= cmax, got {lo} and {hi}")));
        }
        if steps < 2 {
            return Err(CliError::Guard(format!("steps must be at least 2, got {steps}")));
        }
        Ok((0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect())
    }

    pub fn channel_path(&self) -> Result<&Path, CliError> {
        self.channel
            .as_deref()
            .ok_or_else(|| CliError::Parse("--channel <file> is required".into()))
    }
}

pub fn load(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: Params = toml::from_str("M = 4\nP = 2.0\nn = [8, 12]\nreference_curves = true").unwrap();
        let flags = Params {
            m: Some(2),
            ..Params::default()
        };
        let merged = flags.merge(file);
        assert_eq!(merged.relays(), 2);
        assert_eq!(merged.power(), 2.0);
        assert_eq!(merged.n, Some(vec![8, 12]));
        assert!(merged.reference_curves);
        assert_eq!(merged.seed(), 0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<Params>("Q = 1").is_err());
    }

    #[test]
    fn grid() {
        let p = Params {
            cmin: Some(0.0),
            cmax: Some(1.0),
            steps: Some(3),
            ..Params::default()
        };
        assert_eq!(p.fronthaul_grid().unwrap(), vec![0.0, 0.5, 1.0]);
        let bad = Params { steps: Some(1), ..p };
        assert!(bad.fronthaul_grid().is_err());
    }
}
