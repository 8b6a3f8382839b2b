use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nnil_core::beta::{self, BetaOptions};
use nnil_core::kripke::unravel;
use nnil_core::{acceptance, fmp, prover, universal};
use nnil_core::{
    parse_extending, to_nnil_normal_form, Formula, KripkeFrame, KripkeModel, Tree, VarContext,
};

#[derive(Parser)]
#[command(
    name = "nnil",
    version,
    about = "NNIL formulas over finite Kripke models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula, report whether it is NNIL and print its normal form.
    Check { formula: String },
    /// Print the subframe formula of a model, or of one of its worlds.
    Beta {
        model: PathBuf,
        #[arg(long)]
        world: Option<String>,
        /// Drop `true ->` at worlds where no variable holds.
        #[arg(long)]
        simplify: bool,
    },
    /// Look for a monotonic map from a model (or frame) into the rooted model N.
    Refute {
        /// The rooted model whose subframe formula is tested.
        #[arg(long = "n")]
        n_model: PathBuf,
        /// Target model.
        #[arg(
            long = "m",
            conflicts_with = "frame",
            required_unless_present = "frame"
        )]
        m_model: Option<PathBuf>,
        /// Target frame; a valuation refuting the formula is synthesized.
        #[arg(long)]
        frame: Option<PathBuf>,
    },
    /// Decide whether a formula is equivalent to an NNIL formula.
    Classify { formula: String },
    /// Generate the universal model over K variables.
    Universal {
        #[arg(long = "n")]
        vars: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        stats: bool,
    },
    /// Reduce a rooted model to its canonical tree.
    Canonical {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count NNIL formulas over K variables up to equivalence.
    Classes {
        #[arg(long = "n")]
        vars: usize,
    },
    /// Color-preserving reduction of a rooted model.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Print the frame normal form of a formula.
    Fnf { formula: String },
    /// Decide intuitionistic derivability.
    Prove {
        formula: String,
        /// World bound for the countermodel search on failure.
        #[arg(long, default_value_t = 5)]
        max_worlds: usize,
        /// Write the countermodel here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search small frames validating NNIL axioms for a countermodel to a goal.
    Countermodel {
        /// One formula per line; blank lines and `#` comments are skipped.
        #[arg(long)]
        axioms: Option<PathBuf>,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = fmp::MAX_EXHAUSTIVE_WORLDS)]
        max_worlds: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Selftest,
}

enum Failure {
    Negative,
    Usage(String),
}

impl From<nnil_core::Error> for Failure {
    fn from(e: nnil_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<KripkeModel, Failure> {
    KripkeModel::from_json(&read(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_frame(path: &Path) -> Result<KripkeFrame, Failure> {
    KripkeFrame::from_json(&read(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_formula(text: &str) -> Result<(Formula, VarContext), Failure> {
    Ok(parse_extending(text, VarContext::default())?)
}

fn as_tree(m: &KripkeModel) -> Result<Tree, Failure> {
    if m.frame().is_tree_like() {
        Ok(Tree::from_model(m.clone())?)
    } else {
        Ok(unravel(m)?)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => write(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check { formula } => {
            let (f, ctx) = parse_formula(&formula)?;
            if f.is_nnil() {
                let g = to_nnil_normal_form(&f)?;
                println!("NNIL: yes; normal form: {}", g.print(&ctx));
                Ok(())
            } else {
                println!("NNIL: no");
                Err(Failure::Negative)
            }
        }
        Command::Beta {
            model,
            world,
            simplify,
        } => {
            let m = load_model(&model)?;
            let options = BetaOptions { simplify };
            let f = match world {
                Some(id) => beta::beta_node_with(&m, m.world(&id)?, options)?,
                None => beta::beta_model_with(&m, options)?,
            };
            println!("{}", f.print(m.ctx()));
            Ok(())
        }
        Command::Refute {
            n_model,
            m_model,
            frame,
        } => {
            let n = load_model(&n_model)?;
            // Witness maps start from the unraveling of `n`.
            let src = unravel(&n)?.into_model();
            if let Some(path) = m_model {
                let m = load_model(&path)?;
                match beta::refutation_witness(&n, &m)? {
                    Some(f) => {
                        println!("{}", f.to_json(src.frame(), m.frame()));
                        Ok(())
                    }
                    None => {
                        println!("no witness");
                        Err(Failure::Negative)
                    }
                }
            } else {
                let fr = load_frame(frame.as_deref().expect("clap requires --m or --frame"))?;
                match beta::frame_refutes(&n, &fr)? {
                    Some((f, model)) => {
                        let map: serde_json::Value =
                            serde_json::from_str(&f.to_json(src.frame(), &fr)).expect("map JSON");
                        let model: serde_json::Value =
                            serde_json::from_str(&model.to_json()).expect("model JSON");
                        let both = serde_json::json!({ "map": map, "model": model });
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&both).expect("JSON value")
                        );
                        Ok(())
                    }
                    None => {
                        println!("no witness");
                        Err(Failure::Negative)
                    }
                }
            }
        }
        Command::Classify { formula } => {
            let (f, ctx) = parse_formula(&formula)?;
            if f.is_nnil() {
                println!("NNIL-expressible: {}", to_nnil_normal_form(&f)?.print(&ctx));
                return Ok(());
            }
            match beta::is_nnil_expressible(&f, ctx.len().max(1))? {
                Some(g) => {
                    println!("NNIL-expressible: {}", g.print(&ctx));
                    Ok(())
                }
                None => {
                    println!("not NNIL-expressible");
                    Err(Failure::Negative)
                }
            }
        }
        Command::Universal { vars, dot, stats } => {
            let un = universal::generate(vars)?;
            if let Some(path) = dot {
                write(&path, &un.to_dot())?;
            }
            if stats {
                println!("{}", un.stats());
            } else {
                for w in 0..un.len() {
                    println!("{} {}", un.layer(w), un.code(w).display(vars));
                }
            }
            Ok(())
        }
        Command::Canonical { model, out } => {
            let m = load_model(&model)?;
            let c = universal::canonical_tree(&as_tree(&m)?);
            println!("{}", c.code().display(m.ctx().len()));
            if let Some(path) = out {
                write(&path, &c.model().to_json())?;
            }
            Ok(())
        }
        Command::Classes { vars } => {
            println!("{}", universal::count_nnil_classes(vars)?);
            Ok(())
        }
        Command::Reduce { input, out, map } => {
            let m = load_model(&input)?;
            let (r, f) = fmp::reduce(&m)?;
            write(&out, &r.to_json())?;
            println!("{} worlds reduced to {}", m.len(), r.len());
            match (map, f) {
                (Some(path), Some(f)) => write(&path, &f.to_json(m.frame(), r.frame())),
                (Some(_), None) => Err(Failure::Usage(
                    "a reduction map exists only for tree-like models".into(),
                )),
                _ => Ok(()),
            }
        }
        Command::Fnf { formula } => {
            let (f, ctx) = parse_formula(&formula)?;
            let fnf = fmp::frame_normal_form(&f, &ctx)?;
            println!("plus: {}", fnf.plus.print(&fnf.ctx));
            println!("prime: {}", fnf.prime.print(&fnf.ctx));
            println!("context: {}", fnf.ctx.names().join(", "));
            Ok(())
        }
        Command::Prove {
            formula,
            max_worlds,
            out,
        } => {
            let (f, ctx) = parse_formula(&formula)?;
            if prover::proves(&[], &f) {
                println!("provable");
                return Ok(());
            }
            match prover::semantic_countermodel(&f, max_worlds) {
                Some(m) => {
                    let m = m.with_ctx(ctx)?;
                    match &out {
                        Some(path) => {
                            write(path, &m.to_json())?;
                            println!("unprovable (countermodel: {})", path.display());
                        }
                        None => {
                            println!("unprovable (countermodel: stdout)");
                            println!("{}", m.to_json());
                        }
                    }
                }
                None => println!("unprovable (no countermodel within {max_worlds} worlds)"),
            }
            Err(Failure::Negative)
        }
        Command::Countermodel {
            axioms,
            goal,
            max_worlds,
            out,
        } => {
            let mut ctx = VarContext::default();
            let mut parsed = Vec::new();
            if let Some(path) = axioms {
                for line in read(&path)?.lines() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let (a, next) = parse_extending(line, ctx)?;
                    ctx = next;
                    parsed.push(a);
                }
            }
            let (g, ctx) = parse_extending(&goal, ctx)?;
            match fmp::find_countermodel(&parsed, &g, max_worlds)? {
                Some(m) => {
                    let m = if m.ctx().len() == ctx.len() {
                        m.with_ctx(ctx)?
                    } else {
                        m
                    };
                    emit(out.as_deref(), &m.to_json())
                }
                None => {
                    println!("no countermodel within {max_worlds} worlds");
                    Err(Failure::Negative)
                }
            }
        }
        Command::Selftest => {
            let reports = acceptance::run_all();
            for r in &reports {
                println!("{r}");
            }
            if reports.iter().all(|r| r.passed) {
                Ok(())
            } else {
                Err(Failure::Negative)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
