//! Command-line options and the `key=value` config file that can supply
//! any of them. Flags given on the command line win over the file.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Parser)]
#[command(name = "elldyn", version, about = "Entropy, periodic points and heights for dynamics attached to elliptic curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Local and global canonical heights of a point
    Height,
    /// Entropy of the product system attached to a point, by component
    Entropy,
    /// Periodic points of the q-transformation on Z_p
    PadicPeriodic,
    /// Periodic points of the beta-transformation
    BetaPeriodic,
    /// Mahler measure of an integer polynomial
    Mahler,
    /// Periodic points of the solenoid endomorphism dual to a/b
    SolenoidPeriodic,
    /// Elliptic divisibility sequence, divisibility and realizability checks
    Eds,
    /// Periodic-point growth of the product system against log|b^n ν_n(q)|
    ExperimentAsymptotic,
    /// Admissibility conditions for a point, and the least admissible multiple
    CheckPoint,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Height => "height",
            Command::Entropy => "entropy",
            Command::PadicPeriodic => "padic-periodic",
            Command::BetaPeriodic => "beta-periodic",
            Command::Mahler => "mahler",
            Command::SolenoidPeriodic => "solenoid-periodic",
            Command::Eds => "eds",
            Command::ExperimentAsymptotic => "experiment-asymptotic",
            Command::CheckPoint => "check-point",
        }
    }
}

#[derive(Clone, Debug, Default, Args)]
pub struct Options {
    /// File of `key=value` lines using the long option names
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Weierstrass coefficients a1,a2,a3,a4,a6
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub curve: Option<String>,
    /// Rational point x,y with coordinates written num/den
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Largest n (period, sequence index or growth-table row)
    #[arg(long, global = true)]
    pub n_max: Option<u32>,
    /// p-adic digits carried by padic-periodic
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Pass/fail tolerance (entropy, experiment-asymptotic) or β radius (beta-periodic)
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Prime for padic-periodic
    #[arg(long, global = true)]
    pub prime: Option<u64>,
    /// Rational multiplier for padic-periodic
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// β as num/den or a terminating decimal
    #[arg(long, global = true)]
    pub beta: Option<String>,
    /// Integer coefficients, highest degree first
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub poly: Option<String>,
    /// Numerator for solenoid-periodic
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Denominator for solenoid-periodic (default 1)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Search bound for check-point's admissible multiple
    #[arg(long, global = true)]
    pub bound: Option<u32>,
}

fn fill<T: FromStr>(slot: &mut Option<T>, key: &str, value: &str) -> Result<(), CliError> {
    if slot.is_none() {
        let parsed = value
            .parse()
            .map_err(|_| CliError::Parse(format!("config key {key}: cannot parse {value:?}")))?;
        *slot = Some(parsed);
    }
    Ok(())
}

impl Options {
    /// Fill unset options from config text.
    pub fn merge_config(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Parse(format!("config line {}: expected key=value", lineno + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "curve" => fill(&mut self.curve, key, value)?,
                "point" => fill(&mut self.point, key, value)?,
                "n-max" | "n_max" => fill(&mut self.n_max, key, value)?,
                "precision" => fill(&mut self.precision, key, value)?,
                "tolerance" => fill(&mut self.tolerance, key, value)?,
                "format" => fill(&mut self.format, key, value)?,
                "out" => fill(&mut self.out, key, value)?,
                "prime" => fill(&mut self.prime, key, value)?,
                "q" => fill(&mut self.q, key, value)?,
                "beta" => fill(&mut self.beta, key, value)?,
                "poly" => fill(&mut self.poly, key, value)?,
                "a" => fill(&mut self.a, key, value)?,
                "b" => fill(&mut self.b, key, value)?,
                "bound" => fill(&mut self.bound, key, value)?,
                _ => return Err(CliError::Parse(format!("config line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        Ok(())
    }

    pub fn load_config(&mut self) -> Result<(), CliError> {
        if let Some(path) = self.config.clone() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
            self.merge_config(&text)?;
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Parse(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_fills_only_missing_keys() {
        let mut o = Options {
            n_max: Some(7),
            ..Default::default()
        };
        o.merge_config("# comment\ncurve = 0,0,1,-1,0\nn-max=3\nformat=csv\n").unwrap();
        assert_eq!(o.curve.as_deref(), Some("0,0,1,-1,0"));
        assert_eq!(o.n_max, Some(7));
        assert_eq!(o.format, Some(Format::Csv));
    }

    #[test]
    fn config_errors() {
        let mut o = Options::default();
        assert!(matches!(o.merge_config("colour=red"), Err(CliError::Parse(_))));
        assert!(matches!(o.merge_config("n-max=lots"), Err(CliError::Parse(_))));
        assert!(matches!(o.merge_config("just text"), Err(CliError::Parse(_))));
    }
}
