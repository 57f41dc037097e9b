use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use reorg_core::estimators::{enumerate_probability, is_estimate_chunked, mc_estimate_chunked};
use reorg_core::rng::DEFAULT_CHUNK_SIZE;
use reorg_core::{ISConfig, Method, ProtocolParams, SamplingConfig, Target};
use serde::Serialize;

use crate::args;
use crate::error::{CliError, CliResult};
use crate::manifest::Run;
use crate::output;

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    /// Attacker stake fraction, in (0, 0.5).
    #[arg(long, value_parser = args::stake)]
    pub alpha: f64,
    /// Attack length n (number of fork blocks).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub length: u32,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value = "mc")]
    pub method: Method,
    #[arg(long, default_value = "feasible")]
    pub target: Target,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Design as EI,DE,DP.
    #[arg(long, default_value = "24,8,40", value_parser = args::params)]
    #[serde(serialize_with = "display")]
    pub params: ProtocolParams,
    /// Proposal stake for importance sampling (default: α + 0.05 up to
    /// length 35, α + 0.03 beyond).
    #[arg(long, value_parser = args::stake)]
    pub alpha_q: Option<f64>,
    /// Samples per random stream.
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE, value_parser = clap::value_parser!(u64).range(1..))]
    pub chunk_size: u64,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn run(a: EstimateArgs) -> CliResult {
    let run = Run::start("estimate");
    if a.samples == 0 && a.method != Method::Enum {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let cfg = SamplingConfig::new(a.alpha, a.seed)?;
    let n = a.length as usize;
    let result = match a.method {
        Method::Enum => enumerate_probability(&a.params, &cfg, n, a.target)?,
        Method::Mc => mc_estimate_chunked(&a.params, &cfg, n, a.samples, a.target, a.chunk_size)?,
        Method::Is => {
            let proposal = match a.alpha_q {
                Some(q) => ISConfig::new(a.alpha, q)?,
                None => ISConfig::heuristic(a.alpha, n)?,
            };
            is_estimate_chunked(&a.params, &cfg, &proposal, n, a.samples, a.target, a.chunk_size)?
        }
    };
    let mut out = output::open(a.out.as_deref())?;
    writeln!(out, "{}", result.to_json())?;
    out.flush()?;
    drop(out);
    run.finish(&a, Some(a.seed), a.out.as_deref(), &[])
}
