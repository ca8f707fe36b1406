//! Command-line surface for the toolkit.
//!
//! Results — including "countermodel found" and failed diagnostic checks —
//! are data on stdout; exit code 2 is reserved for malformed input and
//! operational failures, so scripts can rely on exit 0 for any completed
//! query. Output is byte-identical across runs for identical inputs.

use std::collections::BTreeMap;
use std::io::Read;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use intgc::algebra::{
    check_gc_operators, complex_algebra, eval_formula, lattice_from_order, parse_algebra,
    valid_in_algebra, AlgebraFile, GCAlgebra,
};
use intgc::filtration::{build_filtration, verify_filtration};
use intgc::formula::{parse, render, ClosureBasis, Formula};
use intgc::kripke::io::{export_dot, parse_model, LoadOptions, ModelFile};
use intgc::kripke::KripkeModel;
use intgc::search::{decide_bounded, SearchBudget, Verdict};

#[derive(Parser)]
#[command(
    name = "intgc",
    about = "Model checking, filtration, and countermodel search for \
             intuitionistic logic with an adjoint modal pair",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Path to a model JSON file, or `-` for stdin.
    model: String,
    /// Close `r` under the frame condition instead of rejecting violations.
    #[arg(long)]
    close_r: bool,
    /// Up-close valuations instead of rejecting non-persistent ones.
    #[arg(long)]
    close_valuation: bool,
}

impl ModelArgs {
    fn load(&self) -> Result<KripkeModel> {
        let json = read_input(&self.model)?;
        parse_model(
            &json,
            LoadOptions {
                close_r: self.close_r,
                close_valuation: self.close_valuation,
            },
        )
        .with_context(|| format!("loading model from {}", self.model))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its syntax tree as JSON.
    Parse { formula: String },
    /// Print the subformula set and the closure set of a formula.
    Closure { formula: String },
    /// Model-check a formula: satisfaction at one world or the extension.
    Mc {
        #[command(flatten)]
        model: ModelArgs,
        formula: String,
        /// Check satisfaction at this world instead of printing the extension.
        #[arg(long)]
        world: Option<String>,
    },
    /// Is the formula valid in the model? Prints a failing world if not.
    Valid {
        #[command(flatten)]
        model: ModelArgs,
        formula: String,
    },
    /// Filter the model through the formula's closure set and print the
    /// finite quotient.
    Filter {
        #[command(flatten)]
        model: ModelArgs,
        formula: String,
        /// Append the verification report for the quotient.
        #[arg(long)]
        verify: bool,
    },
    /// Search for a countermodel among all frames up to a size bound.
    Decide {
        formula: String,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=5))]
        max_worlds: u64,
        #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_models: u64,
        #[arg(long, default_value_t = 60_000, value_parser = clap::value_parser!(u64).range(1..))]
        timeout_ms: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Attach the verified filtration certificate to a found countermodel.
        #[arg(long)]
        emit_filtration: bool,
    },
    /// Validate an algebra file: lattice axioms and the operator laws.
    AlgCheck {
        /// Path to an algebra JSON file, or `-` for stdin.
        algebra: String,
    },
    /// Is the formula valid in the algebra (top under every assignment)?
    AlgValid {
        /// Path to an algebra JSON file, or `-` for stdin.
        algebra: String,
        formula: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_assignments: u64,
    },
    /// Print the complex algebra (up-set lattice) of the model's frame.
    Complex {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Print the model as a Graphviz digraph.
    ExportDot {
        #[command(flatten)]
        model: ModelArgs,
    },
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading stdin")?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn parse_arg(text: &str) -> Result<Formula> {
    parse(text).map_err(|e| anyhow!("{e}"))
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Parse { formula } => {
            let f = parse_arg(&formula)?;
            print_json(&json!({ "rendered": render(&f), "ast": f }))
        }
        Command::Closure { formula } => {
            let basis = ClosureBasis::new(parse_arg(&formula)?);
            print_json(&json!({
                "root": render(basis.root()),
                "sub": basis.sub().iter().map(render).collect::<Vec<_>>(),
                "gamma": basis.gamma().iter().map(render).collect::<Vec<_>>(),
            }))
        }
        Command::Mc {
            model,
            formula,
            world,
        } => {
            let m = model.load()?;
            let f = parse_arg(&formula)?;
            match world {
                Some(w) => {
                    let sat = m.satisfies(&w, &f)?;
                    print_json(&json!({
                        "formula": render(&f),
                        "world": w,
                        "satisfies": sat,
                    }))
                }
                None => {
                    let ext = m.extension(&f);
                    let worlds: Vec<&str> =
                        ext.iter().map(|i| m.frame().world_name(i)).collect();
                    print_json(&json!({
                        "formula": render(&f),
                        "extension": worlds,
                        "valid": ext.is_full(),
                    }))
                }
            }
        }
        Command::Valid { model, formula } => {
            let m = model.load()?;
            let f = parse_arg(&formula)?;
            let ext = m.extension(&f);
            let failing = (0..m.frame().world_count())
                .find(|&x| !ext.contains(x))
                .map(|x| m.frame().world_name(x).to_string());
            print_json(&json!({
                "formula": render(&f),
                "valid": failing.is_none(),
                "failing_world": failing,
            }))
        }
        Command::Filter {
            model,
            formula,
            verify,
        } => {
            let m = model.load()?;
            let f = parse_arg(&formula)?;
            let filt = build_filtration(&m, f)?;
            let quotient = ModelFile::from(&filt.quotient_model());
            let mut out = serde_json::to_value(&quotient)?;
            let map = out.as_object_mut().expect("model serializes to an object");
            let class_of: BTreeMap<String, String> = m
                .frame()
                .worlds()
                .iter()
                .enumerate()
                .map(|(i, w)| (w.clone(), filt.class_name(filt.class_of()[i])))
                .collect();
            map.insert("class_of".into(), serde_json::to_value(class_of)?);
            map.insert(
                "gamma".into(),
                serde_json::to_value(
                    filt.basis().gamma().iter().map(render).collect::<Vec<_>>(),
                )?,
            );
            if verify {
                let report = verify_filtration(&filt);
                map.insert("report".into(), serde_json::to_value(&report)?);
                map.insert("report_ok".into(), serde_json::Value::Bool(report.is_ok()));
            }
            print_json(&out)
        }
        Command::Decide {
            formula,
            max_worlds,
            max_models,
            timeout_ms,
            seed,
            emit_filtration,
        } => {
            let f = parse_arg(&formula)?;
            let budget = SearchBudget {
                max_worlds: max_worlds as usize,
                max_models,
                max_millis: timeout_ms,
                seed,
            };
            let mut decision = decide_bounded(&f, &budget);
            if !emit_filtration {
                decision.certificate = None;
            }
            let mut out = serde_json::to_value(&decision)?;
            if let Verdict::NoCountermodelUpTo { .. } = decision.outcome.verdict {
                out.as_object_mut().expect("object").insert(
                    "note".into(),
                    json!(format!(
                        "no countermodel up to {} worlds; this proves validity only \
                         at the 2^{} class bound, which this search does not reach",
                        budget.max_worlds, decision.class_bound_log2
                    )),
                );
            }
            print_json(&out)
        }
        Command::AlgCheck { algebra } => {
            let text = read_input(&algebra)?;
            let file: AlgebraFile =
                serde_json::from_str(&text).context("invalid algebra JSON")?;
            let order: Vec<Vec<bool>> = file
                .leq
                .iter()
                .map(|row| row.iter().map(|&v| v != 0).collect())
                .collect();
            match lattice_from_order(&order)
                .and_then(|lat| GCAlgebra::new_unchecked(lat, file.f, file.g))
            {
                Ok(alg) => {
                    let report = check_gc_operators(&alg);
                    print_json(&json!({
                        "lattice_ok": true,
                        "operators": report,
                        "ok": report.is_ok(),
                    }))
                }
                Err(e) => print_json(&json!({
                    "lattice_ok": false,
                    "error": e.to_string(),
                    "ok": false,
                })),
            }
        }
        Command::AlgValid {
            algebra,
            formula,
            max_assignments,
        } => {
            let alg = parse_algebra(&read_input(&algebra)?)?;
            let f = parse_arg(&formula)?;
            let valid = valid_in_algebra(&alg, &f, max_assignments)?;
            let refutation = if valid {
                None
            } else {
                find_refuting_assignment(&alg, &f)
            };
            print_json(&json!({
                "formula": render(&f),
                "valid": valid,
                "refuting_assignment": refutation,
            }))
        }
        Command::Complex { model } => {
            let m = model.load()?;
            let alg = complex_algebra(m.frame())?;
            let elements: Vec<Vec<String>> = m
                .frame()
                .up_sets()?
                .iter()
                .map(|u| u.iter().map(|i| m.frame().world_name(i).to_string()).collect())
                .collect();
            let mut file = AlgebraFile::from_algebra(&alg);
            file.elements = Some(elements);
            print_json(&file)
        }
        Command::ExportDot { model } => {
            let m = model.load()?;
            print!("{}", export_dot(&m));
            Ok(())
        }
    }
}

fn find_refuting_assignment(alg: &GCAlgebra, f: &Formula) -> Option<BTreeMap<String, usize>> {
    let vars = f.variables();
    let n = alg.lattice().len();
    let mut choice = vec![0usize; vars.len()];
    loop {
        let assignment: BTreeMap<String, usize> =
            vars.iter().cloned().zip(choice.iter().copied()).collect();
        if eval_formula(alg, &assignment, f).ok()? != alg.lattice().top() {
            return Some(assignment);
        }
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return None;
            }
            choice[pos] += 1;
            if choice[pos] < n {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}
