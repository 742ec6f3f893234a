use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dhdist::generators::{
    fixture, random_instance, random_topology, rlc_assemble, rlc_blocks, rlc_regularity,
    RandomKind, RandomOptions, FIXTURES,
};
use dhdist::problem::{Problem, ProblemFile};
use dhdist::{Error, OptimizerConfig, Tolerance};

mod commands;

pub const REPORT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "dhdist",
    version,
    about = "Structured distances to singularity, high index and instability for dH systems"
)]
struct Cli {
    /// Relative rank threshold (default: max(m, n)·ε per matrix).
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Number of random optimizer starts.
    #[arg(long, global = true)]
    starts: Option<usize>,
    /// Seed for optimizer starts and instance generation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Sing,
    Hi,
    Inst,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LinForm {
    Companion,
    Dh,
    Trimmed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    Tuple,
    Pencil,
    Polynomial,
    Quadratic,
    GeneralQ,
    Rlc,
}

#[derive(Subcommand)]
enum Command {
    /// Structured distance with minimizer, bounds and certificate norms.
    Distance {
        #[arg(long, value_enum, default_value = "sing")]
        kind: DistKind,
        file: PathBuf,
    },
    /// Regularity, index and kernel diagnostics.
    Classify { file: PathBuf },
    /// Write the certificate-perturbed problem.
    Perturb {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "sing")]
        kind: DistKind,
    },
    /// Remove Q from a general dH system (or the dH linearization of a quadratic).
    ReduceQ {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Companion, dH or trimmed linearization.
    Linearize {
        #[arg(value_enum)]
        form: LinForm,
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble and analyse an RLC network.
    Rlc {
        #[arg(long)]
        topology: PathBuf,
    },
    /// Random structured instance.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        grade: usize,
        #[arg(long, default_value_t = 1)]
        skew_index: usize,
        #[arg(long, default_value_t = 2)]
        tuple_len: usize,
        #[arg(long, default_value_t = 0)]
        rank_deficiency: usize,
        #[arg(long)]
        shared_kernel: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Named example problem.
    Fixture {
        name: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// List fixture names.
        #[arg(long)]
        list: bool,
    },
}

pub struct Ctx {
    pub tol_rank: Option<f64>,
    pub cfg: OptimizerConfig,
}

impl Ctx {
    pub fn load(&self, path: &Path) -> Result<(Problem, Tolerance), Error> {
        let mut pf = ProblemFile::load(path)?;
        if let Some(r) = self.tol_rank {
            pf.tolerances = Some(pf.tolerance().with_rank_rel(r));
        }
        let tol = pf.tolerance();
        Ok((pf.to_problem()?, tol))
    }

    pub fn tolerance(&self) -> Tolerance {
        match self.tol_rank {
            Some(r) => Tolerance::default().with_rank_rel(r),
            None => Tolerance::default(),
        }
    }
}

/// Outcome of a command: the report plus whether a borderline rank decision
/// was seen.
pub struct Outcome {
    pub report: Value,
    pub text: String,
}

fn has_ambiguity(v: &Value) -> bool {
    match v {
        Value::Object(map) => {
            map.get("ambiguous") == Some(&Value::Bool(true)) || map.values().any(has_ambiguity)
        }
        Value::Array(items) => items.iter().any(has_ambiguity),
        _ => false,
    }
}

fn emit_problem(pf: &ProblemFile, out: Option<&Path>) -> Result<Outcome, Error> {
    match out {
        Some(path) => {
            pf.save(path)?;
            Ok(Outcome {
                report: json!({ "written": path, "kind": pf.kind }),
                text: format!("wrote {}", path.display()),
            })
        }
        None => {
            let text = pf.to_json()?;
            Ok(Outcome {
                report: serde_json::to_value(pf)?,
                text,
            })
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let mut cfg = OptimizerConfig::default();
    if let Some(s) = cli.starts {
        cfg = cfg.with_starts(s);
    }
    if let Some(s) = cli.seed {
        cfg = cfg.with_seed(s);
    }
    cfg.validate()?;
    let ctx = Ctx {
        tol_rank: cli.tol_rank,
        cfg,
    };
    ctx.tolerance().validate()?;
    match cli.cmd {
        Command::Distance { kind, file } => {
            let (p, tol) = ctx.load(&file)?;
            let (report, text, _) = commands::distance(&ctx, &p, kind, &tol)?;
            Ok(Outcome { report, text })
        }
        Command::Classify { file } => {
            let (p, tol) = ctx.load(&file)?;
            commands::classify(&p, &tol)
        }
        Command::Perturb { file, out, kind } => {
            let (p, tol) = ctx.load(&file)?;
            let (mut report, text, perturbed) = commands::distance(&ctx, &p, kind, &tol)?;
            let perturbed = perturbed.ok_or_else(|| {
                Error::InvalidParameter("no finite certificate for this distance".into())
            })?;
            let pf = perturbed.to_file();
            pf.save(&out)?;
            report["perturbed_file"] = json!(out);
            report["perturbed"] = serde_json::to_value(&pf)?;
            Ok(Outcome {
                report,
                text: format!("{text}\nperturbed problem written to {}", out.display()),
            })
        }
        Command::ReduceQ { file, out } => {
            let (p, tol) = ctx.load(&file)?;
            commands::reduce_q(&p, &tol, out.as_deref())
        }
        Command::Linearize { form, file, out } => {
            let (p, tol) = ctx.load(&file)?;
            match form {
                LinForm::Companion => commands::companion(&p),
                LinForm::Dh => emit_problem(&commands::dh(&p)?, out.as_deref()),
                LinForm::Trimmed => {
                    let (pf, bounds) = commands::trimmed(&p, &tol)?;
                    let mut o = emit_problem(&pf, out.as_deref())?;
                    if out.is_some() {
                        o.report["bounds"] = bounds;
                    }
                    Ok(o)
                }
            }
        }
        Command::Rlc { topology } => {
            let (p, tol) = ctx.load(&topology)?;
            let Problem::Rlc(t) = p else {
                return Err(Error::InvalidProblem("rlc needs a problem of kind `rlc`".into()));
            };
            let pencil = rlc_assemble(&t, &tol)?;
            let reg = rlc_regularity(&t, &tol)?;
            let blocks = rlc_blocks(&t)?;
            let lmin = blocks.lambda_min();
            let d = dhdist::pencil::d_sing(&pencil, &ctx.cfg)?;
            let text = format!(
                "regular: {} (Gv full column rank: {}, G1 full row rank: {}, classify: {})\n\
                 lambda_min: {:.6e} (node block {:.6e}, current block {:.6e})\n\
                 d_sing: {:.6e} in [{:.6e}, {:.6e}]",
                reg.regular,
                reg.gv_full_rank,
                reg.g1_full_row_rank,
                if reg.classified_regular { "regular" } else { "singular" },
                lmin,
                blocks.node_lambda_min,
                blocks.current_lambda_min,
                d.distance,
                lmin.max(0.0).sqrt(),
                (2.0 * lmin.max(0.0)).sqrt()
            );
            Ok(Outcome {
                report: json!({
                    "regularity": reg,
                    "node_lambda_min": blocks.node_lambda_min,
                    "current_lambda_min": blocks.current_lambda_min,
                    "lambda_min": lmin,
                    "d_sing": commands::distance_json(&d),
                    "pencil": Problem::Pencil(pencil).to_file(),
                }),
                text,
            })
        }
        Command::Gen {
            kind,
            n,
            grade,
            skew_index,
            tuple_len,
            rank_deficiency,
            shared_kernel,
            out,
        } => {
            let seed = cli.seed.unwrap_or(0);
            let tol = ctx.tolerance();
            let problem = match kind {
                GenKind::Rlc => Problem::Rlc(random_topology(seed, &tol)?),
                other => {
                    let kind = match other {
                        GenKind::Tuple => RandomKind::Tuple,
                        GenKind::Pencil => RandomKind::Pencil,
                        GenKind::Polynomial => RandomKind::Polynomial,
                        GenKind::Quadratic => RandomKind::Quadratic,
                        GenKind::GeneralQ => RandomKind::GeneralQ,
                        GenKind::Rlc => unreachable!(),
                    };
                    let opts = RandomOptions {
                        tuple_len,
                        grade,
                        skew_index,
                        rank_deficiency,
                        shared_kernel,
                    };
                    random_instance(n, kind, seed, &opts)?
                }
            };
            emit_problem(&problem.to_file(), out.as_deref())
        }
        Command::Fixture {
            name,
            eps,
            out,
            list,
        } => {
            if list {
                return Ok(Outcome {
                    report: json!({ "fixtures": FIXTURES }),
                    text: FIXTURES.join("\n"),
                });
            }
            let name = name.ok_or_else(|| {
                Error::InvalidParameter("fixture name required (see --list)".into())
            })?;
            emit_problem(&fixture(&name, eps)?, out.as_deref())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() || matches!(e, Error::Io(_)) {
        1
    } else if e.is_ambiguity() {
        2
    } else {
        3
    }
}

/// Print to stdout, ignoring a closed pipe.
fn say(text: &str) {
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_mode = cli.json;
    match run(cli) {
        Ok(mut o) => {
            let ambiguous = has_ambiguity(&o.report);
            if json_mode {
                if let Value::Object(map) = &mut o.report {
                    map.insert("report_version".into(), json!(REPORT_VERSION));
                    map.insert("ambiguous".into(), json!(ambiguous));
                }
                say(&serde_json::to_string_pretty(&o.report).expect("serializable"));
            } else {
                say(&o.text);
                if ambiguous {
                    eprintln!("warning: a rank decision lies within a factor of ten of its threshold");
                }
            }
            ExitCode::from(if ambiguous { 2 } else { 0 })
        }
        Err(e) => {
            let code = exit_code(&e);
            if json_mode {
                let v = json!({
                    "report_version": REPORT_VERSION,
                    "error": e.to_string(),
                    "exit_code": code,
                });
                say(&serde_json::to_string_pretty(&v).expect("serializable"));
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
