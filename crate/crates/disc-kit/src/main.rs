//! Command-line front end.
//!
//! Every subcommand reads and writes the JSON wire formats of [`disc_kit::io`]
//! and prints to stdout when no output file is given. Exact fractions are
//! always `"num/den"` strings. Exit codes: 0 on success, 2 when a wall-clock
//! or iteration budget cut an enumeration short (`DISC_KIT_BUDGET_MS`),
//! 1 on any other error — including a failing lemma check.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use disc_kit::error::{Error, Result};
use disc_kit::freq::{freq_k, l1_dist};
use disc_kit::io::{
    self, AlgDcFile, CoverFile, DiscFile, GraphFile, ProjectionFile, RealizeFile,
};
use disc_kit::lemma::{run_suite, LemmaId, Verdict};
use disc_kit::num::{format_q, parse_q};
use disc_kit::oracle::{
    algdc, build_cover, realizability_search, AlgDcConfig, Budget, EnumerationSpec, Model,
};
use disc_kit::path::{approx_path, approx_undirected, LMode};
use disc_kit::sgraph::{InformationSet, VertexId};
use disc_kit::transform::{
    encode, projection_table, psi_q, reconstruct_disc, TransformParams,
};
use disc_kit::{disc_k, Q};

#[derive(Parser)]
#[command(
    name = "disc-kit",
    version,
    about = "Local-structure statistics of edge-labeled graphs: k-disc \
             frequency vectors, cluster encodings, and constant-size path \
             approximation, all in exact rational arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// k-disc frequency vector of a graph, keyed by class fingerprint.
    Freq {
        /// Input graph file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Disc radius.
        #[arg(long)]
        k: u32,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact L1 distance between the k-disc frequency vectors of two graphs.
    Dist {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Cluster-encode an S-graph into a simple graph.
    Encode {
        #[arg(long = "in")]
        input: PathBuf,
        /// Degree bound of the input graph.
        #[arg(long)]
        d: usize,
        /// Disc radius the encoding must preserve.
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct the preimage k-disc from an image vertex's q-disc.
    DecodeDisc {
        /// Image (simple) graph file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Center vertex whose q-disc is decoded.
        #[arg(long)]
        center: VertexId,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projection subgraph of a simple graph: decodable centers and the
    /// induced union of their clusters, with the reconstructed preimage.
    Psi {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulated projection sets over all S-graph classes up to a size cap.
    Project {
        #[command(flatten)]
        params: ParamArgs,
        /// Largest preimage vertex count to enumerate.
        #[arg(long)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Approximate an S-path by a bounded-size S-path with the same local
    /// statistics up to eps.
    ApproxPath {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: u32,
        /// Distance budget, a fraction like "1/5".
        #[arg(long)]
        eps: String,
        /// How class-count terms in the stage formulas are instantiated.
        #[arg(long = "l-mode", value_enum, default_value_t = LModeArg::Observed)]
        l_mode: LModeArg,
        /// Output path file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Pipeline report file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Size and exact distance of the bounded undirected-path approximation.
    ApproxUndirected {
        /// Input path size.
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        eps: String,
    },
    /// Build a finite representative cover of an enumerated graph universe.
    Cover {
        #[command(flatten)]
        universe: UniverseArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search the enumerated universe for a graph whose occurring k-disc
    /// fingerprint set equals the given disc set exactly.
    Realize {
        /// Disc set file (a JSON list of rooted-disc objects).
        #[arg(long)]
        phi: PathBuf,
        #[command(flatten)]
        universe: UniverseArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide bounded realizability of a k-disc set by reduction to the
    /// simple-graph side.
    Algdc {
        #[arg(long)]
        phi: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Vertex cap of the bounded search universe.
        #[arg(long)]
        cap: usize,
        /// Iteration cap of the subset loop.
        #[arg(long, default_value_t = 1_000_000)]
        subset_budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the lemma checkers over generated instance batches.
    Verify {
        /// "all" or a comma-separated list of lemma names.
        #[arg(long, default_value = "all")]
        lemma: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Instances per lemma.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Report style.
        #[arg(long, value_enum, default_value_t = ReportStyle::Json)]
        report: ReportStyle,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Transformation parameters supplied explicitly (image files carry no
/// symbol names, so the original information set must be restated).
#[derive(Args)]
struct ParamArgs {
    /// Degree bound of the preimage side.
    #[arg(long)]
    d: usize,
    /// Preimage disc radius.
    #[arg(long)]
    k: u32,
    /// Comma-separated symbol names of the information set.
    #[arg(long)]
    symbols: String,
}

impl ParamArgs {
    fn build(&self) -> Result<TransformParams> {
        let names: Vec<String> = self
            .symbols
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        TransformParams::new(self.d, self.k, InformationSet::new(names)?)
    }
}

/// An enumerated universe of graph classes.
#[derive(Args)]
struct UniverseArgs {
    /// Graph model to enumerate.
    #[arg(long, value_enum, default_value_t = ModelArg::Simple)]
    model: ModelArg,
    /// Comma-separated symbol names (labeled models only).
    #[arg(long, default_value = "")]
    symbols: String,
    /// Degree bound: neighbor count for the simple model, ordered
    /// present-pair count for labeled models.
    #[arg(long)]
    d: usize,
    /// Largest vertex count to enumerate.
    #[arg(long)]
    nmax: usize,
}

impl UniverseArgs {
    fn build(&self) -> Result<EnumerationSpec> {
        let names: Vec<String> = self
            .symbols
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        let symbols = InformationSet::new(names)?;
        let model = match self.model {
            ModelArg::Simple => Model::Simple,
            ModelArg::Sgraph => {
                if symbols.is_empty() {
                    return Err(Error::BadParameter(
                        "the labeled model needs --symbols".into(),
                    ));
                }
                Model::AllSGraphs
            }
        };
        Ok(EnumerationSpec { model, symbols, degree_bound: self.d, max_n: self.nmax })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Simple,
    Sgraph,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LModeArg {
    Observed,
    Naive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportStyle {
    Json,
    Text,
}

/// Pretty-print to a file or stdout.
fn emit<T: Serialize>(out: Option<&PathBuf>, value: &T) -> Result<()> {
    match out {
        Some(path) => io::write_json(path, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn parse_eps(raw: &str) -> Result<Q> {
    parse_q(raw)
}

#[derive(Serialize)]
struct PsiFile {
    center_count: usize,
    centers: Vec<VertexId>,
    image: GraphFile,
    preimage: GraphFile,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Freq { input, k, out } => {
            let g = io::read_graph(&input)?;
            emit(out.as_ref(), &io::freq_to_json(&freq_k(&g, k)?))
        }
        Command::Dist { a, b, k } => {
            let fa = freq_k(&io::read_graph(&a)?, k)?;
            let fb = freq_k(&io::read_graph(&b)?, k)?;
            println!("{}", format_q(&l1_dist(&fa, &fb)));
            Ok(())
        }
        Command::Encode { input, d, k, out } => {
            let g = io::read_graph(&input)?;
            let params = TransformParams::new(d, k, g.symbols().clone())?;
            emit(out.as_ref(), &GraphFile::from_graph(&encode(&g, &params)?))
        }
        Command::DecodeDisc { input, center, params, out } => {
            let g = io::read_graph(&input)?;
            let params = params.build()?;
            let image_disc = disc_k(&g, center, params.q);
            let decoded = reconstruct_disc(&image_disc, &params)?;
            emit(out.as_ref(), &DiscFile::from_disc(&decoded))
        }
        Command::Psi { input, params, out } => {
            let g = io::read_graph(&input)?;
            let params = params.build()?;
            let proj = psi_q(&g, &params)?.ok_or_else(|| {
                Error::NotDecodable("the graph has no decodable centers".into())
            })?;
            let file = PsiFile {
                center_count: proj.centers.len(),
                centers: proj.centers.clone(),
                image: GraphFile::from_graph(&proj.image),
                preimage: GraphFile::from_graph(&proj.preimage),
            };
            emit(out.as_ref(), &file)
        }
        Command::Project { params, cap, out } => {
            let params = params.build()?;
            let table = projection_table(&params, cap)?;
            emit(out.as_ref(), &ProjectionFile::from_table(&params, &table))
        }
        Command::ApproxPath { input, k, eps, l_mode, out, report } => {
            let p = io::read_path(&input)?;
            let eps = parse_eps(&eps)?;
            let mode = match l_mode {
                LModeArg::Observed => LMode::Observed,
                LModeArg::Naive => LMode::Naive,
            };
            let (q, rep) = approx_path(&p, k, &eps, mode)?;
            if let Some(path) = &report {
                io::write_json(path, &rep)?;
            }
            match &out {
                Some(path) => io::write_path(path, &q),
                None => emit(None, &io::PathFile::from_path(&q)),
            }
        }
        Command::ApproxUndirected { n, k, eps } => {
            let eps = parse_eps(&eps)?;
            emit(None, &approx_undirected(n, k, &eps)?)
        }
        Command::Cover { universe, k, eps, out } => {
            let spec = universe.build()?;
            let eps = parse_eps(&eps)?;
            let budget = Budget::from_env();
            let cover = build_cover(&spec, k, &eps, Some(&budget))?;
            emit(out.as_ref(), &CoverFile::from_cover(&cover))
        }
        Command::Realize { phi, universe, k, out } => {
            let spec = universe.build()?;
            let phi = io::read_disc_set(&phi)?;
            let budget = Budget::from_env();
            let found = realizability_search(&spec, k, &phi, Some(&budget))?;
            emit(out.as_ref(), &RealizeFile::from_result(&found, spec.max_n))
        }
        Command::Algdc { phi, params, cap, subset_budget, out } => {
            let params = params.build()?;
            let phi = io::read_disc_set(&phi)?;
            let cfg = AlgDcConfig { cap, subset_budget };
            let budget = Budget::from_env();
            let report = algdc(&phi, &params, &cfg, Some(&budget))?;
            emit(out.as_ref(), &AlgDcFile::from_report(&report))
        }
        Command::Verify { lemma, seed, count, report, out } => {
            let lemmas: Vec<LemmaId> = if lemma == "all" {
                LemmaId::ALL.to_vec()
            } else {
                lemma
                    .split(',')
                    .map(|name| {
                        LemmaId::from_name(name.trim()).ok_or_else(|| {
                            Error::BadParameter(format!("unknown lemma {name:?}"))
                        })
                    })
                    .collect::<Result<_>>()?
            };
            let suite = run_suite(&lemmas, seed, count)?;
            match report {
                ReportStyle::Json => emit(out.as_ref(), &suite)?,
                ReportStyle::Text => {
                    let mut lines = String::new();
                    for run in &suite.runs {
                        lines.push_str(&format!(
                            "{}: {} hold, {} skipped, {} FAILED\n",
                            run.lemma.name(),
                            run.holds,
                            run.skips,
                            run.fails
                        ));
                        for c in &run.checks {
                            if c.verdict == Verdict::Fails {
                                lines.push_str(&format!(
                                    "  FAIL {} lhs={} rhs={}\n",
                                    c.descriptor,
                                    format_q(&c.lhs),
                                    format_q(&c.rhs)
                                ));
                            }
                        }
                    }
                    match &out {
                        Some(path) => std::fs::write(path, &lines)?,
                        None => print!("{lines}"),
                    }
                }
            }
            let failures = suite.total_failures();
            if failures > 0 {
                return Err(Error::Invalid(format!(
                    "{failures} lemma check(s) failed"
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::WallClock(_)) | Err(Error::BudgetExhausted(_)) => {
            eprintln!("budget exhausted; output is partial");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
