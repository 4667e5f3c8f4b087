//! Batch CLI over the document grammar: validation, duality, evaluation and
//! the named property suites.
//!
//! Exit codes: 0 on success, 1 on a validation failure, 2 on parse or usage
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use breuil::io::{self, Body, Document};
use breuil::suites;
use breuil::torsion::extension_resolve;
use breuil::{Error, PadicConfig};

#[derive(Parser)]
#[command(name = "breuil", about = "Filtered Frobenius modules over S at finite precision")]
struct Cli {
    /// Output format for printed documents and suite summaries.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Working precision for generated fixtures (defaults to N = 5).
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a document; exits 1 with a violation report on failure.
    Check { file: PathBuf },
    /// Print the dual of a module, morphism or presentation document.
    Dual { file: PathBuf },
    /// Evaluate a dual functional against a torsion element; prints the
    /// resulting class in S_oo.
    Eval { module: PathBuf, functional: PathBuf, element: PathBuf },
    /// Apply the divided Frobenius to a coordinate vector in Fil^1.
    Phi1 { file: PathBuf, element: PathBuf },
    /// Resolve an extension of two torsion presentations from choice data.
    Resolve { res_m: PathBuf, res_n: PathBuf, ext: PathBuf },
    /// Print a named built-in fixture.
    Fixtures { name: String },
    /// Run a named invariant suite (or `all`) and print a pass/fail summary.
    Suite { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: &Cli) -> breuil::Result<ExitCode> {
    match &cli.cmd {
        Cmd::Check { file } => check(cli, load(file)?),
        Cmd::Dual { file } => {
            let doc = load(file)?;
            let body = match doc.body {
                Body::SDiv(m) => Body::SDiv(m.dual()?),
                Body::Morphism(f) => Body::Morphism(f.dual()?),
                Body::Torsion(t) => Body::Torsion(t.dual()?),
                other => {
                    return Err(Error::Semantic(format!(
                        "`dual` expects a sdiv, morphism or torsion document, got {}",
                        other.kind()
                    )))
                }
            };
            emit(cli, &Document { cfg: doc.cfg, body });
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Eval { module, functional, element } => {
            let t = torsion_doc(load(module)?)?;
            let f = t.0.dual_elem(vector_doc(load(functional)?, &t.1)?)?;
            let x = t.0.elem(vector_doc(load(element)?, &t.1)?)?;
            let v = t.0.dual_eval(&f, &x)?;
            emit(cli, &Document { cfg: t.1, body: Body::SInf(v) });
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Phi1 { file, element } => {
            let doc = load(file)?;
            let cfg = doc.cfg.clone();
            let out = match doc.body {
                Body::SDiv(m) => {
                    let v = vector_doc(load(element)?, &cfg)?;
                    if !m.fil1_contains(&v)? {
                        return Err(Error::NotInFil1);
                    }
                    m.phi1_apply(&v)?
                }
                Body::Torsion(t) => {
                    t.validate()?;
                    let x = t.elem(vector_doc(load(element)?, &cfg)?)?;
                    t.phi1(&x)?.lift
                }
                other => {
                    return Err(Error::Semantic(format!(
                        "`phi1` expects a sdiv or torsion document, got {}",
                        other.kind()
                    )))
                }
            };
            emit(cli, &Document { cfg, body: Body::Vector(out) });
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Resolve { res_m, res_n, ext } => {
            let tm = torsion_doc(load(res_m)?)?;
            let tn = torsion_doc(load(res_n)?)?;
            let ext = match load(ext)?.body {
                Body::Ext(x) => x,
                other => {
                    return Err(Error::Semantic(format!(
                        "`resolve` expects an ext document, got {}",
                        other.kind()
                    )))
                }
            };
            let tx = extension_resolve(&tm.0, &tn.0, &ext)?;
            emit(cli, &Document { cfg: tm.1, body: Body::Torsion(tx) });
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Fixtures { name } => {
            let n = cli.precision.unwrap_or(5);
            let cfg = Arc::new(PadicConfig::new(2, vec![-2, 1], n)?);
            emit(cli, &suites::fixture(&cfg, name)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Suite { name } => {
            let outcomes = suites::run(name, cli.seed)?;
            let all_pass = outcomes.iter().all(|o| o.passed);
            match cli.format {
                Format::Text => {
                    for o in &outcomes {
                        let status = if o.passed { "PASS" } else { "FAIL" };
                        println!("suite {} seed={} {status} {}", o.name, cli.seed, o.detail);
                    }
                }
                Format::Json => {
                    let items: Vec<_> = outcomes
                        .iter()
                        .map(|o| {
                            serde_json::json!({
                                "suite": o.name,
                                "seed": cli.seed,
                                "passed": o.passed,
                                "detail": o.detail,
                            })
                        })
                        .collect();
                    println!("{}", serde_json::Value::Array(items));
                }
            }
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn load(path: &PathBuf) -> breuil::Result<Document> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Semantic(format!("cannot read {}: {e}", path.display())))?;
    io::parse(&text)
}

fn check(cli: &Cli, doc: Document) -> breuil::Result<ExitCode> {
    let verdict = match &doc.body {
        Body::SDiv(m) => m.validate(),
        Body::Morphism(f) => f.validate(),
        Body::Torsion(t) => t.validate(),
        // element kinds are fully checked by the grammar
        _ => Ok(()),
    };
    let report = match verdict {
        Ok(()) => None,
        Err(Error::NotInvertible) => Some(
            "violated axiom: \u{3c6}\u{2081}(Fil\u{b9}M) engendre M \
             (structure matrix is not invertible over S)"
                .to_string(),
        ),
        Err(e) => Some(e.to_string()),
    };
    match cli.format {
        Format::Text => match &report {
            None => println!("ok"),
            Some(r) => println!("invalid: {r}"),
        },
        Format::Json => {
            println!(
                "{}",
                serde_json::json!({ "ok": report.is_none(), "report": report })
            );
        }
    }
    Ok(if report.is_none() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn torsion_doc(
    doc: Document,
) -> breuil::Result<(breuil::TorsionPresentation, Arc<PadicConfig>)> {
    match doc.body {
        Body::Torsion(t) => {
            t.validate()?;
            Ok((t, doc.cfg))
        }
        other => Err(Error::Semantic(format!(
            "expected a torsion document, got {}",
            other.kind()
        ))),
    }
}

fn vector_doc(doc: Document, cfg: &Arc<PadicConfig>) -> breuil::Result<Vec<breuil::SElem>> {
    if &doc.cfg != cfg {
        return Err(Error::ConfigMismatch);
    }
    match doc.body {
        Body::Vector(v) => Ok(v),
        other => Err(Error::Semantic(format!(
            "expected a vector document, got {}",
            other.kind()
        ))),
    }
}

fn emit(cli: &Cli, doc: &Document) {
    match cli.format {
        Format::Text => print!("{}", io::print(doc)),
        Format::Json => println!("{}", io::to_json(doc)),
    }
}
