//! `atlstit`: command-line front end.
//!
//! Exit status: 0 for a true verdict or a clean report, 1 for a false
//! verdict, a counterexample or a rejected proof, 2 for any input error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use atlstit::atl_mc::{eval_atl, eval_atl_oracle_with, OracleLimits};
use atlstit::bridge::{
    axiom_sweep, check_proof, correspondence_check, soundness_spotcheck, standard_instances, ProofScript, ProofVerdict,
    ValidityReport,
};
use atlstit::cgs::{load_cgs, random_cgs, Cgs, StateSet};
use atlstit::formula::{parse_atl, parse_sx, translate, Coalition};
use atlstit::stit::{eval_sx, LassoHistory, SxIndex};
use atlstit::strategy::DEFAULT_STRATEGY_LIMIT;
use atlstit::unravel::{unravel, verify_frame};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "atlstit", version, about = "ATL model checking and its stit reading")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest model accepted, in states.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    max_states: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Denotation of an ATL formula by fixpoint iteration.
    Check(CheckArgs),
    /// Denotation of an ATL formula by strategy enumeration.
    Oracle(CheckArgs),
    /// Stit translation of an ATL formula.
    Translate { formula: String },
    /// Moments of the unraveling up to a depth.
    Unravel {
        model: PathBuf,
        state: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
    },
    /// Frame conditions of the unraveling, at one state or all of them.
    VerifyFrame {
        model: PathBuf,
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
    },
    /// A stit formula at the root moment of a history, e.g. `w0 ; s1 | s1`.
    EvalSx { model: PathBuf, formula: String, lasso: String },
    /// Compares an ATL formula at a state with its translation.
    Correspond {
        model: PathBuf,
        formula: String,
        state: String,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
    /// Validity of every axiom instance on the given or generated models.
    Axioms {
        models: Vec<PathBuf>,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
    /// Checks a proof script and optionally spot-checks its lines.
    Prove {
        script: PathBuf,
        /// Full agent set, comma separated; defaults to the spot-check
        /// models' agents, else the agents the script mentions.
        #[arg(long, value_delimiter = ',')]
        agents: Option<Vec<String>>,
        #[arg(long)]
        spotcheck: Vec<PathBuf>,
        /// Also spot-check on this many generated models, with three states,
        /// two actions, atoms `p` and `q`, and one agent per member of the
        /// agent set.
        #[arg(long, default_value_t = 0)]
        random: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
    /// Prints a pseudo-random model as JSON.
    RandomModel {
        #[command(flatten)]
        shape: GenShape,
    },
}

#[derive(Args)]
struct CheckArgs {
    model: PathBuf,
    formula: String,
    #[arg(long)]
    state: Option<String>,
}

#[derive(Args, Clone, Copy)]
struct GenShape {
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    states: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    agents: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    actions: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    atoms: u64,
}

#[derive(Args)]
struct GenArgs {
    /// Number of generated models used when no model file is given.
    #[arg(long, default_value_t = 20)]
    random: u64,
    #[command(flatten)]
    shape: GenShape,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// What a command prints and its exit status.
struct Outcome {
    text: String,
    json: Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Text => print!("{}", out.text),
                Format::Json => {
                    let mut value = out.json;
                    value["schema"] = json!(1);
                    println!("{}", serde_json::to_string_pretty(&value).expect("json values serialize"));
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_model(cli: &Cli, path: &Path) -> Result<Cgs, Failure> {
    let g = load_cgs(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    if g.num_states() as u64 > cli.max_states {
        return Err(Failure(format!(
            "instance too large: {} has {} states, the limit is {}",
            path.display(),
            g.num_states(),
            cli.max_states
        )));
    }
    Ok(g)
}

fn generate(cli: &Cli, shape: GenShape, count: u64) -> Vec<Cgs> {
    (0..count)
        .map(|i| {
            random_cgs(
                shape.states as usize,
                shape.agents as usize,
                shape.actions as usize,
                shape.atoms as usize,
                cli.seed.wrapping_add(i),
            )
        })
        .collect()
}

fn denotation_outcome(g: &Cgs, formula: &str, set: &StateSet, state: Option<&str>) -> Result<Outcome, Failure> {
    let names = g.state_names(set);
    match state {
        Some(s) => {
            let holds = set.contains(g.state_id(s)?);
            Ok(Outcome {
                text: format!("{holds}\n"),
                json: json!({ "formula": formula, "state": s, "holds": holds }),
                ok: holds,
            })
        }
        None => Ok(Outcome {
            text: format!("{}\n", g.format_states(set)),
            json: json!({ "formula": formula, "denotation": names }),
            ok: true,
        }),
    }
}

fn report_outcome(report: &ValidityReport, heading: &str) -> Outcome {
    let mut text = format!("{heading}: checked {}, failed {}\n", report.checked, report.failed);
    for c in &report.counterexamples {
        writeln!(text, "  counterexample: {c}").unwrap();
    }
    Outcome { text, json: serde_json::to_value(report).expect("report serializes"), ok: report.is_clean() }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Check(args) => {
            let g = load_model(cli, &args.model)?;
            let phi = parse_atl(&args.formula)?;
            let set = eval_atl(&g, &phi)?;
            denotation_outcome(&g, &phi.to_string(), &set, args.state.as_deref())
        }
        Command::Oracle(args) => {
            let g = load_model(cli, &args.model)?;
            let phi = parse_atl(&args.formula)?;
            let limits = OracleLimits { max_states: cli.max_states as usize, max_strategies: DEFAULT_STRATEGY_LIMIT };
            let set = eval_atl_oracle_with(&g, &phi, limits)?;
            denotation_outcome(&g, &phi.to_string(), &set, args.state.as_deref())
        }
        Command::Translate { formula } => {
            let phi = parse_atl(formula)?;
            let tr = translate(&phi).to_string();
            Ok(Outcome {
                text: format!("{tr}\n"),
                json: json!({ "formula": phi.to_string(), "translation": tr }),
                ok: true,
            })
        }
        Command::Unravel { model, state, depth } => {
            let g = load_model(cli, model)?;
            let frag = unravel(&g, g.state_id(state)?, *depth as usize)?;
            Ok(Outcome { text: frag.dump(&g), json: frag.to_json(&g), ok: true })
        }
        Command::VerifyFrame { model, state, depth } => {
            let g = load_model(cli, model)?;
            let states = match state {
                Some(s) => vec![g.state_id(s)?],
                None => (0..g.num_states()).collect(),
            };
            let mut text = String::new();
            let mut results = Vec::new();
            let mut ok = true;
            for w in states {
                let frag = unravel(&g, w, *depth as usize)?;
                let violations = verify_frame(&g, &frag);
                let name = g.state_name(w);
                if violations.is_empty() {
                    writeln!(text, "{name}: ok ({} moments)", frag.moments.len()).unwrap();
                } else {
                    ok = false;
                    writeln!(text, "{name}: {} violations", violations.len()).unwrap();
                    for v in &violations {
                        writeln!(text, "  {v}").unwrap();
                    }
                }
                results.push(json!({
                    "state": name,
                    "moments": frag.moments.len(),
                    "violations": violations,
                }));
            }
            Ok(Outcome { text, json: json!({ "depth": depth, "results": results }), ok })
        }
        Command::EvalSx { model, formula, lasso } => {
            let g = load_model(cli, model)?;
            let phi = parse_sx(formula)?;
            let h = LassoHistory::parse(&g, lasso)?;
            let shown = h.display(&g).to_string();
            let holds = eval_sx(&g, &phi, &SxIndex::at_root(h))?;
            Ok(Outcome {
                text: format!("{holds}\n"),
                json: json!({ "formula": phi.to_string(), "lasso": shown, "holds": holds }),
                ok: holds,
            })
        }
        Command::Correspond { model, formula, state, samples } => {
            let g = load_model(cli, model)?;
            let phi = parse_atl(formula)?;
            let w = g.state_id(state)?;
            let report = correspondence_check(&g, &phi, w, *samples as usize, cli.seed)?;
            let mut text = String::from(if report.agreement { "agreement\n" } else { "disagreement\n" });
            if !report.agreement {
                writeln!(text, "  {} at {}: {}", report.formula, report.state, report.atl).unwrap();
                for v in report.sx.iter().filter(|v| v.holds != report.atl) {
                    writeln!(text, "  {} along {}: {}", report.translation, v.lasso, v.holds).unwrap();
                }
            }
            Ok(Outcome { text, json: serde_json::to_value(&report)?, ok: report.agreement })
        }
        Command::Axioms { models, gen, samples } => {
            let models = if models.is_empty() {
                generate(cli, gen.shape, gen.random)
            } else {
                models.iter().map(|p| load_model(cli, p)).collect::<Result<_, _>>()?
            };
            let mut agents: Vec<String> = models.iter().flat_map(|g| g.agents().iter().cloned()).collect();
            agents.sort();
            agents.dedup();
            let mut instances = standard_instances(&agents);
            // Every model must interpret every coalition an instance mentions.
            instances
                .retain(|i| i.formula.coalitions().iter().all(|c| models.iter().all(|g| g.coalition_ids(c).is_ok())));
            let report = axiom_sweep(&models, &instances, *samples as usize, cli.seed)?;
            Ok(report_outcome(&report, &format!("axioms ({} instances, {} models)", instances.len(), models.len())))
        }
        Command::Prove { script, agents, spotcheck, random, samples } => {
            let s = ProofScript::from_json(&read(script)?)?;
            let mut models: Vec<Cgs> = spotcheck.iter().map(|p| load_model(cli, p)).collect::<Result<_, _>>()?;
            let ags = match (agents, models.first()) {
                (Some(a), _) => Coalition::new(a.iter().map(|x| x.trim().to_string())),
                (None, Some(g)) => g.grand_coalition(),
                (None, None) => s.agents(),
            };
            let shape = GenShape { states: 3, agents: ags.len().max(1) as u64, actions: 2, atoms: 2 };
            models.extend(generate(cli, shape, *random));
            let verdict = check_proof(&s, &ags);
            let mut text = format!("{verdict}\n");
            let mut json = serde_json::to_value(&verdict)?;
            let mut ok = verdict.is_accepted();
            if matches!(verdict, ProofVerdict::Accepted { .. }) && !models.is_empty() {
                let report = soundness_spotcheck(&s, &models, *samples as usize, cli.seed)?;
                let out = report_outcome(&report, &format!("spotcheck ({} models)", models.len()));
                text.push_str(&out.text);
                json["spotcheck"] = out.json;
                ok &= out.ok;
            }
            Ok(Outcome { text, json, ok })
        }
        Command::RandomModel { shape } => {
            let g = generate(cli, *shape, 1).remove(0);
            let text = g.to_json();
            let json: Value = serde_json::from_str(&text)?;
            Ok(Outcome { text: format!("{text}\n"), json: json!({ "model": json }), ok: true })
        }
    }
}
