use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use irrvec::symbols::Rank;
use irrvec::virasoro::Convention;

#[derive(Parser, Debug)]
#[command(name = "irrvec", version, about = "Construct and verify irregular Virasoro vectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for the canonical series and write it out.
    Construct(Common),
    /// Re-check every defining relation of a series.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Series previously written by `construct` (JSON).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Frame matrices, determinants, canonical operators and vector fields.
    Frames(Common),
    /// Shapovalov blocks and determinant records.
    Gram {
        #[command(flatten)]
        common: Common,
        /// Lowest level of the block.
        #[arg(long, default_value_t = 0)]
        from: u32,
        /// Highest level of the block.
        #[arg(long, default_value_t = 3)]
        to: u32,
    },
    /// Obstructions, integrability, potential and gauged residuals.
    Gauge(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Integer rank such as `3`, or half-integer rank such as `5/2`.
    #[arg(long)]
    pub rank: Option<String>,
    /// Truncation order K.
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Central charge as an expression in the roster variables.
    #[arg(long)]
    pub central: Option<String>,
    #[arg(long, value_enum, default_value_t = ConventionArg::General)]
    pub convention: ConventionArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Exponent bound for the scalar completion ansatz.
    #[arg(long)]
    pub bound: Option<i64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConventionArg {
    General,
    Section2,
}

impl ConventionArg {
    pub fn convention(self) -> Convention {
        match self {
            ConventionArg::General => Convention::General,
            ConventionArg::Section2 => Convention::Section2Display,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConventionArg::General => "general",
            ConventionArg::Section2 => "section2",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// Rank as given on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankSpec {
    /// Rank one, solved inside an ordinary Verma module.
    One,
    Full(Rank),
}

impl RankSpec {
    pub fn parse(src: &str) -> Result<Self, String> {
        let src = src.trim();
        if let Some((num, den)) = src.split_once('/') {
            let num: usize = num.trim().parse().map_err(|_| format!("bad rank numerator in {src:?}"))?;
            if den.trim() != "2" || num.is_multiple_of(2) || num < 3 {
                return Err(format!("half-integer ranks look like 3/2, 5/2, ...; got {src:?}"));
            }
            return Ok(RankSpec::Full(Rank::half(num.div_ceil(2))));
        }
        match src.parse::<usize>() {
            Ok(1) => Ok(RankSpec::One),
            Ok(r) if r >= 2 => Ok(RankSpec::Full(Rank::integer(r))),
            _ => Err(format!("rank must be a positive integer or a half-integer, got {src:?}")),
        }
    }

    pub fn label(&self) -> String {
        match self {
            RankSpec::One => "1".into(),
            RankSpec::Full(rank) => rank.to_string(),
        }
    }
}
