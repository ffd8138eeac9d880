use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use planeval::corpus::ClassMix;
use planeval::hn_model::{Field, DEFAULT_PRIME};

mod commands;
mod input;
mod report;

use report::Format;

#[derive(Debug, Parser)]
#[command(name = "planeval", version, about = "Exact invariants and minimality checks for plane valuations")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    output: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChartArg {
    Local,
    Affine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Divisorial,
    Irrational,
    Mixed,
}

impl From<ClassArg> for ClassMix {
    fn from(c: ClassArg) -> ClassMix {
        match c {
            ClassArg::Divisorial => ClassMix::Divisorial,
            ClassArg::Irrational => ClassMix::Irrational,
            ClassArg::Mixed => ClassMix::Mixed,
        }
    }
}

/// `Q`, `Fp` (the default prime) or `Fp:<p>`.
fn parse_field(s: &str) -> Result<Field, String> {
    let f = match s {
        "Q" | "q" => Field::Q,
        "Fp" | "fp" => Field::Fp(DEFAULT_PRIME),
        _ => {
            let p = s
                .strip_prefix("Fp:")
                .or_else(|| s.strip_prefix("fp:"))
                .ok_or_else(|| format!("unknown field {s:?}; use Q, Fp or Fp:<prime>"))?;
            Field::Fp(p.parse().map_err(|_| format!("bad prime {p:?}"))?)
        }
    };
    f.check().map_err(|e| e.to_string())?;
    Ok(f)
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Value sequence, Puiseux and characteristic data, maximal contact values, volumes.
    Invariants { path: PathBuf },
    /// Value of a polynomial along the valuation.
    Eval(EvalArgs),
    /// Table of mu_d for d up to a bound, with the mu-hat bracket.
    Mu(MuArgs),
    /// Non-positivity-at-infinity test with its witness.
    Npi { path: PathBuf },
    /// Searches for a minimality certificate of a divisorial graph.
    Certify { path: PathBuf },
    /// Builds the graph Gamma^a_(omega,k).
    Family {
        #[arg(long)]
        omega: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        a: String,
    },
    /// The member of the family through a curve with normalized inverse volume t.
    Vdelta {
        /// Curve expansion; the smooth branch v = 0 when omitted.
        #[arg(long)]
        delta: Option<PathBuf>,
        #[arg(long)]
        t: String,
    },
    /// Ratios ceil(sqrt t)/sqrt t for the t values listed in a file.
    Asymptotic {
        #[arg(long)]
        t_list: PathBuf,
    },
    /// Difference quotients of t -> nu_t(f) over the family through a curve.
    Lipschitz {
        #[arg(long)]
        delta: Option<PathBuf>,
        #[arg(long)]
        poly: String,
        /// Comma separated rationals.
        #[arg(long)]
        samples: String,
    },
    /// P-sufficiency of a configuration given by multiplicity rows.
    Psuff {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        allow_fallback: bool,
    },
    /// Writes a deterministic corpus of expansion files.
    Corpus(CorpusArgs),
    /// Dual graph in the graph file format or as DOT.
    Graph {
        path: PathBuf,
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub path: PathBuf,
    pub poly: String,
    #[arg(long, value_enum, default_value_t = ChartArg::Local)]
    pub chart: ChartArg,
    /// Degree used to move an affine polynomial to the local chart.
    #[arg(long)]
    pub degree: Option<u32>,
    /// Also run the proximity oracle and require agreement.
    #[arg(long)]
    pub both_methods: bool,
    /// Bracket an irrational value by divisorial truncations.
    #[arg(long)]
    pub limit: bool,
}

#[derive(Debug, Args)]
pub struct MuArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub degree_max: u32,
    #[arg(long, value_parser = parse_field)]
    pub field: Option<Field>,
    /// Resample the coefficients of the structure with this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub emit_sequence: bool,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 4)]
    pub max_rows: usize,
    #[arg(long, default_value_t = 3)]
    pub max_h: u32,
    #[arg(long, value_enum, default_value_t = ClassArg::Mixed)]
    pub class: ClassArg,
    #[arg(long, value_parser = parse_field, default_value = "Q")]
    pub field: Field,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.cmd) {
        Ok(r) => {
            print!("{}", r.render(cli.output));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
