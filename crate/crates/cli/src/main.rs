//! `loopfire` command-line front end.
//!
//! Exit codes: 0 success or verified, 1 verification failed, 2 input or
//! usage error, 3 resource cap exceeded.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loopfire::bn::{
    bn_rank_bounds, local_dim_probe, stratified_scan, verify_lemma_w13, verify_oracle_random,
    verify_prop_weak, verify_rank_sandwich, verify_rr_random, verify_tree_chain, verify_wedge_dim,
    ProbeConfig, ScanConfig, VerifyReport, WedgeDimConfig,
};
use loopfire::burn::reduce_by_burning_with_cap;
use loopfire::rank::RankConfig;
use loopfire::subdivision::{subdivision_reduce, DEFAULT_MAX_VERTICES};
use loopfire::{
    class_coordinates, dhar_burn, q_reduce, representative_from_class, riemann_roch_residual,
    CactusGraph, Divisor, DivisorClass, Error, Exec, PointRef, RankEngine, Rational,
};

/// Largest grid resolution a scan accepts.
const MAX_GRID: usize = 64;
/// Largest degree a scan or bound search accepts.
const MAX_DEGREE: i64 = 6;
/// Largest direction subset a probe accepts.
const MAX_SUBSET: usize = 3;

#[derive(Parser)]
#[command(
    name = "loopfire",
    version,
    about = "Chip firing, divisor ranks and Brill-Noether experiments on trees of loops"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Same as `--format json`.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to this file instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Evaluate on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Leaf-to-root closed form.
    Closed,
    /// Level borrowing followed by Dhar burning.
    Burning,
    /// Integer Dhar on the scaled unit subdivision.
    Subdivision,
}

#[derive(Subcommand)]
enum Cmd {
    /// Genus, loops, attachments and wedge points of a graph.
    Info { graph: PathBuf },
    /// Reduced divisor with respect to a base point.
    Reduce {
        graph: PathBuf,
        divisor: PathBuf,
        /// Base point as `loop:offset` (default: the graph's base point).
        #[arg(long)]
        base: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
        /// Firing cap for `--method burning` (default 10·(chips + genus)²).
        #[arg(long)]
        cap: Option<usize>,
        /// Vertex budget for `--method subdivision`.
        #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
        max_vertices: usize,
    },
    /// Runs Dhar's burning algorithm from a base point.
    Burn {
        graph: PathBuf,
        divisor: PathBuf,
        /// Base point as `loop:offset` (default: the graph's base point).
        #[arg(long)]
        base: Option<String>,
    },
    /// Rank of a divisor.
    Rank {
        graph: PathBuf,
        divisor: PathBuf,
        /// Stop searching above this rank.
        #[arg(long)]
        max_r: Option<i64>,
        /// Also print a refuting sequence of points.
        #[arg(long)]
        witness: bool,
    },
    /// Whether two divisors are linearly equivalent.
    Equiv {
        graph: PathBuf,
        first: PathBuf,
        second: PathBuf,
    },
    /// Degree and torus coordinates of a divisor's class.
    Class { graph: PathBuf, divisor: PathBuf },
    /// Representative divisor of a class file.
    Rep { graph: PathBuf, class: PathBuf },
    /// Checks Riemann-Roch for one divisor.
    RrCheck { graph: PathBuf, divisor: PathBuf },
    /// Stratified scan of the locus of rank-r degree-d classes.
    Scan {
        graph: PathBuf,
        #[arg(long)]
        r: i64,
        #[arg(long)]
        d: i64,
        /// Grid points per free loop.
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Loops carrying a free chip, at most 3.
        #[arg(long, default_value_t = 1)]
        max_free: usize,
        /// Maximum grid points over all strata.
        #[arg(long, default_value_t = 250_000)]
        budget: usize,
    },
    /// Local dimension of the rank-r locus at a divisor.
    Probe {
        graph: PathBuf,
        divisor: PathBuf,
        #[arg(long)]
        r: i64,
        /// Largest direction subset tested, at most 3.
        #[arg(long, default_value_t = 2)]
        subset_limit: usize,
    },
    /// Bounds on the Brill-Noether rank.
    Wrd {
        graph: PathBuf,
        #[arg(long)]
        r: i64,
        #[arg(long)]
        d: i64,
        /// Maximum rank checks.
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
    /// Glues a new loop at a point and prints the new graph.
    Wedge {
        graph: PathBuf,
        /// Attachment point as `loop:offset`.
        #[arg(long)]
        at: String,
        /// Circumference of the new loop.
        #[arg(long)]
        circumference: String,
        /// Name of the new loop (default: the next free `L<k>`).
        #[arg(long)]
        name: Option<String>,
    },
    /// Verifiers for the constructive results.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Genus-4 star: the A + B + θ family has rank 1 and is one-dimensional.
    LemmaW13 {
        graph: PathBuf,
        /// Number of angles checked.
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        subset_limit: usize,
    },
    /// Tree with l ≤ g − 2: a rank-1 divisor with negative ρ.
    PropWeak { graph: PathBuf },
    /// Gluing a loop adds a dimension to a rank-r family.
    WedgeDim {
        graph: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        c2: String,
        #[arg(long)]
        r: i64,
        #[arg(long)]
        d: i64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Divisor file of a rank-r degree-d divisor (default: search for one).
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Skip the local dimension comparison.
        #[arg(long)]
        no_probe: bool,
        /// Candidate budget of the witness search.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Brill-Noether rank intervals before and after gluing a loop.
    RankSandwich {
        graph: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        c2: String,
        #[arg(long)]
        r: i64,
        #[arg(long)]
        d: i64,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
    /// Glues loops onto a star one at a time and compares dimensions with ρ.
    TreeChain {
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        steps: usize,
    },
    /// Riemann-Roch on random trees of loops.
    RrRandom {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        max_genus: usize,
    },
    /// The three reducers agree on random instances.
    OracleCheck {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        max_genus: usize,
    },
}

enum Failure {
    Usage(String),
    Io(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(
                Error::Budget(_) | Error::IterationCap { .. } | Error::SampleCollision { .. },
            ) => 3,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Io(_) => "io",
            Failure::Lib(e) => match e {
                Error::Parse { .. } => "parse",
                Error::UnknownLoop(_) => "unknown-loop",
                Error::GraphMismatch => "graph-mismatch",
                Error::InvalidArgument(_) => "invalid-argument",
                Error::NegativeAwayFromBase { .. } => "negative-away-from-base",
                Error::IterationCap { .. } => "iteration-cap",
                Error::SampleCollision { .. } => "sample-collision",
                Error::Precondition(_) => "precondition",
                Error::Budget(_) => "budget",
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

/// Rendered output and whether it counts as a successful verification.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, ok: true }
    }
}

struct Ctx {
    format: Format,
    seed: u64,
    exec: Exec,
}

impl Ctx {
    fn engine(&self, g: &Arc<CactusGraph>) -> RankEngine {
        RankEngine::with_config(
            g,
            RankConfig {
                exec: self.exec,
                ..RankConfig::default()
            },
        )
    }

    fn no_csv(&self, cmd: &str) -> Result<(), Failure> {
        if self.format == Format::Csv {
            return Err(Failure::Usage(format!("`{cmd}` has no CSV output")));
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Arc<CactusGraph>, Failure> {
    Ok(Arc::new(
        CactusGraph::parse(&read(path)?).map_err(|e| in_file(path, e))?,
    ))
}

fn load_divisor(g: &Arc<CactusGraph>, path: &Path) -> Result<Divisor, Failure> {
    Divisor::parse(g, &read(path)?).map_err(|e| in_file(path, e))
}

/// Prefixes parse errors with the file they came from.
fn in_file(path: &Path, e: Error) -> Failure {
    match e {
        Error::Parse { line, reason } => Failure::Lib(Error::Parse {
            line,
            reason: format!("{}: {reason}", path.display()),
        }),
        other => Failure::Lib(other),
    }
}

fn rational(s: &str, what: &str) -> Result<Rational, Failure> {
    s.parse()
        .map_err(|_| Failure::Usage(format!("{what}: malformed rational `{s}`")))
}

fn base_point(g: &CactusGraph, base: Option<&str>) -> Result<PointRef, Failure> {
    match base {
        Some(s) => Ok(g.parse_point(s)?),
        None => Ok(g.base_point().clone()),
    }
}

fn verify_outcome(ctx: &Ctx, rep: VerifyReport) -> Result<Outcome, Failure> {
    ctx.no_csv("verify")?;
    let text = if ctx.format == Format::Json {
        output::verify_json(&rep)
    } else {
        format!("{rep}\n")
    };
    Ok(Outcome {
        text,
        ok: rep.passed,
    })
}

fn check_cap(what: &str, value: i64, cap: i64) -> Result<(), Failure> {
    if value > cap {
        return Err(Failure::Lib(Error::Budget(format!(
            "{what} = {value} exceeds the cap {cap}"
        ))));
    }
    Ok(())
}

fn run(cmd: Cmd, ctx: &Ctx) -> Result<Outcome, Failure> {
    match cmd {
        Cmd::Info { graph } => {
            ctx.no_csv("info")?;
            let g = load_graph(&graph)?;
            Ok(Outcome::ok(match ctx.format {
                Format::Json => output::info_json(&g),
                _ => output::info_text(&g),
            }))
        }
        Cmd::Reduce {
            graph,
            divisor,
            base,
            method,
            cap,
            max_vertices,
        } => {
            ctx.no_csv("reduce")?;
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let v = base_point(&g, base.as_deref())?;
            let r = match method {
                Method::Closed => q_reduce(&d, &v),
                Method::Burning => reduce_by_burning_with_cap(&d, &v, cap)?.divisor,
                Method::Subdivision => subdivision_reduce(&d, &v, Some(max_vertices))?,
            };
            let cls = class_coordinates(&r);
            Ok(Outcome::ok(match ctx.format {
                Format::Json => output::reduced_json(&r, &cls, &v),
                _ => output::reduced_text(&r, &cls),
            }))
        }
        Cmd::Burn {
            graph,
            divisor,
            base,
        } => {
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let v = base_point(&g, base.as_deref())?;
            let rep = dhar_burn(&d, &v)?;
            Ok(Outcome::ok(match ctx.format {
                Format::Json => output::burn_json(&g, &rep),
                Format::Csv => output::burn_csv(&g, &rep),
                Format::Text => output::burn_text(&g, &rep),
            }))
        }
        Cmd::Rank {
            graph,
            divisor,
            max_r,
            witness,
        } => {
            ctx.no_csv("rank")?;
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let w = ctx.engine(&g).rank(&d, max_r)?;
            Ok(Outcome::ok(match ctx.format {
                Format::Json => output::rank_json(&g, &w),
                _ => output::rank_text(&g, &w, witness),
            }))
        }
        Cmd::Equiv {
            graph,
            first,
            second,
        } => {
            ctx.no_csv("equiv")?;
            let g = load_graph(&graph)?;
            let a = load_divisor(&g, &first)?;
            let b = load_divisor(&g, &second)?;
            let same = class_coordinates(&a) == class_coordinates(&b);
            Ok(Outcome::ok(match ctx.format {
                Format::Json => {
                    output::document("equiv", serde_json::json!({ "equivalent": same }))
                }
                _ => format!("equivalent={same}\n"),
            }))
        }
        Cmd::Class { graph, divisor } => {
            ctx.no_csv("class")?;
            let g = load_graph(&graph)?;
            let cls = class_coordinates(&load_divisor(&g, &divisor)?);
            Ok(Outcome::ok(match ctx.format {
                Format::Json => output::class_json(&g, &cls),
                _ => cls.to_text(&g),
            }))
        }
        Cmd::Rep { graph, class } => {
            ctx.no_csv("rep")?;
            let g = load_graph(&graph)?;
            let cls = DivisorClass::parse(&g, &read(&class)?).map_err(|e| in_file(&class, e))?;
            let d = representative_from_class(&g, &cls)?;
            Ok(Outcome::ok(match ctx.format {
                Format::Json => output::divisor_json("rep", &d),
                _ => d.to_text(),
            }))
        }
        Cmd::RrCheck { graph, divisor } => {
            ctx.no_csv("rr-check")?;
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let rep = riemann_roch_residual(&ctx.engine(&g), &d)?;
            let ok = rep.residual == 0 && rep.verified;
            let text = match ctx.format {
                Format::Json => output::document(
                    "rr-check",
                    serde_json::to_value(&rep).expect("report serializes"),
                ),
                _ => format!(
                    "degree={}\ngenus={}\nrank={}\nrank_dual={}\nresidual={}\n",
                    rep.degree, rep.genus, rep.rank, rep.rank_dual, rep.residual
                ),
            };
            Ok(Outcome { text, ok })
        }
        Cmd::Scan {
            graph,
            r,
            d,
            n,
            max_free,
            budget,
        } => {
            check_cap("N", n as i64, MAX_GRID as i64)?;
            check_cap("d", d, MAX_DEGREE)?;
            let g = load_graph(&graph)?;
            let mut cfg = ScanConfig::new(r, d, n);
            cfg.max_free = max_free;
            cfg.budget = budget;
            cfg.exec = ctx.exec;
            let rep = stratified_scan(&ctx.engine(&g), &cfg)?;
            Ok(Outcome::ok(match ctx.format {
                Format::Json => output::scan_json(&rep),
                Format::Csv => output::scan_csv(&g, &rep),
                Format::Text => output::scan_text(&rep),
            }))
        }
        Cmd::Probe {
            graph,
            divisor,
            r,
            subset_limit,
        } => {
            check_cap("subset limit", subset_limit as i64, MAX_SUBSET as i64)?;
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let p = local_dim_probe(
                &ctx.engine(&g),
                &d,
                r,
                &ProbeConfig {
                    subset_limit,
                    exec: ctx.exec,
                },
            )?;
            Ok(Outcome::ok(match ctx.format {
                Format::Json => output::probe_json(&g, &p),
                Format::Csv => output::probe_csv(&p),
                Format::Text => output::probe_text(&g, &p),
            }))
        }
        Cmd::Wrd {
            graph,
            r,
            d,
            budget,
        } => {
            ctx.no_csv("wrd")?;
            check_cap("d", d, MAX_DEGREE)?;
            let g = load_graph(&graph)?;
            let b = bn_rank_bounds(&ctx.engine(&g), r, d, budget, ctx.exec)?;
            Ok(Outcome::ok(match ctx.format {
                Format::Json => output::bounds_json(&b),
                _ => output::bounds_text(&b),
            }))
        }
        Cmd::Wedge {
            graph,
            at,
            circumference,
            name,
        } => {
            ctx.no_csv("wedge")?;
            let g = load_graph(&graph)?;
            let p = g.parse_point(&at)?;
            let c = rational(&circumference, "circumference")?;
            let big = g.wedge_with_named_loop(&p, c, name.as_deref())?;
            Ok(Outcome::ok(match ctx.format {
                Format::Json => {
                    output::document("wedge", serde_json::json!({ "graph": big.to_text() }))
                }
                _ => big.to_text(),
            }))
        }
        Cmd::Verify(v) => run_verify(v, ctx),
    }
}

fn run_verify(cmd: VerifyCmd, ctx: &Ctx) -> Result<Outcome, Failure> {
    let rep = match cmd {
        VerifyCmd::LemmaW13 {
            graph,
            n,
            subset_limit,
        } => {
            check_cap("subset limit", subset_limit as i64, MAX_SUBSET as i64)?;
            check_cap("N", n as i64, MAX_GRID as i64)?;
            let g = load_graph(&graph)?;
            verify_lemma_w13(
                &g,
                n,
                &ProbeConfig {
                    subset_limit,
                    exec: ctx.exec,
                },
            )?
        }
        VerifyCmd::PropWeak { graph } => verify_prop_weak(&load_graph(&graph)?, ctx.exec)?,
        VerifyCmd::WedgeDim {
            graph,
            at,
            c2,
            r,
            d,
            samples,
            witness,
            no_probe,
            budget,
        } => {
            let g = load_graph(&graph)?;
            let witness = witness.map(|p| load_divisor(&g, &p)).transpose()?;
            let cfg = WedgeDimConfig {
                samples,
                seed: ctx.seed,
                witness,
                probe: (!no_probe).then_some(ProbeConfig {
                    exec: ctx.exec,
                    ..ProbeConfig::default()
                }),
                budget,
                exec: ctx.exec,
            };
            verify_wedge_dim(&g, &g.parse_point(&at)?, rational(&c2, "c2")?, r, d, &cfg)?
        }
        VerifyCmd::RankSandwich {
            graph,
            at,
            c2,
            r,
            d,
            budget,
        } => {
            check_cap("d", d + 1, MAX_DEGREE)?;
            let g = load_graph(&graph)?;
            verify_rank_sandwich(
                &g,
                &g.parse_point(&at)?,
                rational(&c2, "c2")?,
                r,
                d,
                budget,
                ctx.exec,
            )?
        }
        VerifyCmd::TreeChain { graph, steps } => {
            verify_tree_chain(&load_graph(&graph)?, steps, ctx.exec)?
        }
        VerifyCmd::RrRandom { count, max_genus } => {
            check_cap("max genus", max_genus as i64, 6)?;
            verify_rr_random(ctx.seed, count, max_genus, ctx.exec)?
        }
        VerifyCmd::OracleCheck { count, max_genus } => {
            check_cap("max genus", max_genus as i64, 6)?;
            verify_oracle_random(ctx.seed, count, max_genus, ctx.exec)?
        }
    };
    verify_outcome(ctx, rep)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        format: if cli.common.json {
            Format::Json
        } else {
            cli.common.format
        },
        seed: cli.common.seed,
        exec: if cli.common.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        },
    };
    let out = match run(cli.cmd, &ctx) {
        Ok(o) => o,
        Err(f) => {
            let msg = f.message().replace('\n', " ");
            eprintln!("error kind={} exit={}: {msg}", f.kind(), f.exit_code());
            return ExitCode::from(f.exit_code());
        }
    };
    match &cli.common.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &out.text) {
                eprintln!("error kind=io exit=2: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", out.text),
    }
    if out.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
