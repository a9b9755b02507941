use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "nudgem", version, about = "Tail and mean analysis of Nudge scheduling for two job types")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Asymptotic tail improvement ratio over FCFS.
    Atir(AnalysisArgs),
    /// Waiting and response-time tails of Nudge-M with TIR(t).
    Dist(AnalysisArgs),
    /// Mean response times and MTIR of Nudge-M and priority.
    Mean(AnalysisArgs),
    /// Event-driven simulation.
    Simulate(SimArgs),
    /// Run the built-in self-checks.
    Verify(VerifyArgs),
    /// List the figure recipes.
    Recipes,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PolicyArgs {
    /// Policy name (fcfs, nudge-m, nudge-k, nudge-l, nudge-km, nudge-ml, nudge-kl) or a policy-table file.
    #[arg(long)]
    pub policy: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalysisArgs {
    /// Job-mix JSON file.
    #[arg(long)]
    pub mix: Option<PathBuf>,
    /// Named parameter set; replaces --mix and the grids.
    #[arg(long)]
    pub recipe: Option<String>,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Arrival rates: `a,b,c` or `from:to:step`. Overrides the rate in the mix file.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Time points: `a,b,c` or `from:to:step`.
    #[arg(long)]
    pub t: Option<String>,
    /// Output CSV; a manifest is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimArgs {
    #[arg(long)]
    pub mix: PathBuf,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Number of simulated jobs, warmup included.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 30)]
    pub batches: usize,
    /// Time points for tail estimates.
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Fast)]
    pub level: Level,
    /// Multiply the decay rate used by the asymptotic checks (fault injection).
    #[arg(long, default_value_t = 1.0, hide = true)]
    pub fault_theta_scale: f64,
    /// Optional CSV report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `a,b,c`, `from:to:step` or a single number.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let values = if let Some((range, step)) = text.rsplit_once(':').filter(|_| text.matches(':').count() == 2) {
        let (from, to) = range.split_once(':').unwrap();
        let num = |s: &str| s.trim().parse::<f64>().with_context(|| format!("bad number `{s}` in grid `{text}`"));
        let (from, to, step) = (num(from)?, num(to)?, num(step)?);
        if !(step > 0.0) || !(to >= from) {
            bail!("grid `{text}` needs from <= to and a positive step");
        }
        nudgem::recipes::grid(from, to, step)
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number `{s}` in grid `{text}`")))
            .collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        bail!("grid `{text}` must hold finite numbers");
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_grid("1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        let g = parse_grid("0:1:0.25").unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[4] - 1.0).abs() < 1e-12);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("a,b").is_err());
        assert!(parse_grid("1:2").is_err());
    }
}
