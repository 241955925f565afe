use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use freearr::battery::{self, BatteryConfig, ClaimVerdict};
use freearr::classes::{self, Class, ClassCertificate, ClassVerdict, InductionTable, InductiveSearch, DEFAULT_BUDGET};
use freearr::derivations::{self, CertificateJson, FreeCertificate, FreenessVerdict};
use freearr::format::{emit_arrangement, parse_arrangement};
use freearr::iso::{linear_isomorphic, matroid_isomorphic};
use freearr::{canonicalize, catalog, char_poly, Arrangement, Error, Flat, Result, RootFactorization};

#[derive(Parser)]
#[command(name = "freearr", version, about = "Exact computations with rational hyperplane arrangements")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Reject arrangement files that repeat a hyperplane.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic polynomial, expanded and factored when it splits.
    Chi { file: PathBuf },
    /// Restriction to a flat.
    Restrict {
        file: PathBuf,
        /// 1-based hyperplane indices such as `1,4,7`, or a file of normals
        /// spanning the annihilator of the flat.
        #[arg(long)]
        flat: String,
    },
    /// Deletion of one hyperplane.
    Delete {
        file: PathBuf,
        /// Normal vector, comma separated, or `#k` for the k-th hyperplane.
        #[arg(long, allow_hyphen_values = true)]
        hyperplane: String,
    },
    /// Localization at a flat.
    Localize {
        file: PathBuf,
        #[arg(long)]
        flat: String,
    },
    /// Product arrangement on the direct sum of the ambient spaces.
    Product { first: PathBuf, second: PathBuf },
    /// Decides freeness and writes the basis certificate.
    IsFree {
        file: PathBuf,
        /// Where to write the certificate or non-freeness witness.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decides membership in a freeness class.
    Classify {
        file: PathBuf,
        #[arg(long, value_enum)]
        class: ClassArg,
        /// Node budget of the search.
        #[arg(long, env = "FREEARR_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Where to write the certificate or refutation trace.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Linear and lattice isomorphism of two arrangements.
    Iso { first: PathBuf, second: PathBuf },
    /// Built-in arrangements.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Replays a certificate: a freeness basis, a class certificate or an
    /// induction table.
    VerifyCert {
        file: PathBuf,
        cert: PathBuf,
        #[arg(long, env = "FREEARR_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Runs the full verification battery.
    VerifyPaper {
        /// Only claims whose id starts with this prefix.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, env = "FREEARR_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Directory for certificates and traces.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Get { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    If,
    Af,
    Df,
    Sf,
}

impl From<ClassArg> for Class {
    fn from(c: ClassArg) -> Class {
        match c {
            ClassArg::If => Class::If,
            ClassArg::Af => Class::Af,
            ClassArg::Df => Class::Df,
            ClassArg::Sf => Class::Sf,
        }
    }
}

fn load(path: &Path, strict: bool) -> Result<Arrangement> {
    let text = std::fs::read_to_string(path)?;
    parse_arrangement(&text, strict).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
        e => e,
    })
}

fn parse_flat(a: &Arrangement, spec: &str, strict: bool) -> Result<Flat> {
    let indices: Option<Vec<usize>> = spec.split(',').map(|t| t.trim().parse::<usize>().ok()).collect();
    match indices {
        Some(ix) => {
            let mut zero_based = Vec::with_capacity(ix.len());
            for i in ix {
                if i == 0 || i > a.len() {
                    return Err(Error::PreconditionViolated(format!("hyperplane index {i} out of range 1..={}", a.len())));
                }
                zero_based.push(i - 1);
            }
            Ok(Flat::of_hyperplanes(a, &zero_based))
        }
        None => {
            let spanning = load(Path::new(spec), strict)?;
            Flat::from_normals(a, &spanning.normals().map(<[i64]>::to_vec).collect::<Vec<_>>())
        }
    }
}

fn parse_hyperplane(a: &Arrangement, spec: &str) -> Result<usize> {
    if let Some(k) = spec.strip_prefix('#') {
        let k: usize = k.parse().map_err(|_| Error::PreconditionViolated(format!("bad index `{spec}`")))?;
        return (1..=a.len())
            .contains(&k)
            .then(|| k - 1)
            .ok_or_else(|| Error::PreconditionViolated(format!("hyperplane index {k} out of range 1..={}", a.len())));
    }
    let v: Vec<i64> = spec
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::InvalidHyperplane(format!("bad integer `{t}`"))))
        .collect::<Result<_>>()?;
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: v.len() });
    }
    let h = canonicalize(&v)?;
    a.index_of(&h).ok_or(Error::NotMember(v))
}

fn arrangement_json(a: &Arrangement) -> serde_json::Value {
    json!({ "dim": a.dim(), "hyperplanes": a.normals().collect::<Vec<_>>() })
}

fn print_arrangement(a: &Arrangement, as_json: bool) {
    if as_json {
        println!("{}", arrangement_json(a));
    } else {
        print!("{}", emit_arrangement(a));
    }
}

fn write_json<T: serde::Serialize>(path: &Path, v: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

fn chi(a: &Arrangement, as_json: bool) {
    let chi = char_poly(a);
    let (factored, exponents) = match chi.integer_roots() {
        RootFactorization::Splits(e) => {
            let roots: Vec<i64> = e.as_slice().iter().map(|&x| x as i64).collect();
            (Some(freearr::IntPoly::factored(&roots)), Some(e))
        }
        _ => (None, None),
    };
    if as_json {
        println!(
            "{}",
            json!({
                "coefficients": chi.coeffs(),
                "expanded": chi.to_string(),
                "factored": factored,
                "exponents": exponents.as_ref().map(|e| e.as_slice().to_vec()),
            })
        );
    } else {
        println!("{chi}");
        if let Some(f) = factored {
            println!("{f}");
        }
    }
}

fn is_free(a: &Arrangement, out: Option<&Path>, as_json: bool) -> Result<()> {
    let verdict = derivations::is_free(a)?;
    let artifact = match (&verdict, out) {
        (FreenessVerdict::Free(c), Some(p)) => {
            write_json(p, &c.to_json())?;
            Some(p.display().to_string())
        }
        (FreenessVerdict::NotFree(w), Some(p)) => {
            write_json(p, w)?;
            Some(p.display().to_string())
        }
        (_, None) => None,
    };
    match &verdict {
        FreenessVerdict::Free(c) => {
            if as_json {
                println!("{}", json!({ "verdict": "free", "exponents": c.exponents.as_slice(), "certificate": artifact }));
            } else {
                println!("free, exponents {}", c.exponents);
            }
        }
        FreenessVerdict::NotFree(w) => {
            if as_json {
                println!("{}", json!({ "verdict": "not_free", "witness": w, "certificate": artifact }));
            } else {
                println!("not free: {}", serde_json::to_string(w)?);
            }
        }
    }
    if let (Some(p), false) = (artifact, as_json) {
        println!("certificate: {p}");
    }
    Ok(())
}

fn classify(a: &Arrangement, class: Class, budget: u64, out: Option<&Path>, as_json: bool) -> Result<u8> {
    let verdict = classes::classify(a, class, budget)?;
    if let Some(p) = out {
        write_json(p, &verdict)?;
    }
    let code = match verdict {
        ClassVerdict::Undecided { .. } => 3,
        _ => 0,
    };
    if as_json {
        let summary = match &verdict {
            ClassVerdict::Member { .. } => json!({ "class": class.to_string(), "verdict": "member" }),
            ClassVerdict::NonMember { refutation } => {
                json!({ "class": class.to_string(), "verdict": "non_member", "trace_nodes": refutation.nodes.len() })
            }
            ClassVerdict::Undecided { nodes, budget } => {
                json!({ "class": class.to_string(), "verdict": "undecided", "nodes": nodes, "budget": budget })
            }
        };
        let mut summary = summary;
        summary["artifact"] = json!(out.map(|p| p.display().to_string()));
        if out.is_none() {
            summary["result"] = serde_json::to_value(&verdict)?;
        }
        println!("{summary}");
    } else {
        match &verdict {
            ClassVerdict::Member { .. } => println!("{class}: member"),
            ClassVerdict::NonMember { refutation } => println!("{class}: non-member ({} trace nodes)", refutation.nodes.len()),
            ClassVerdict::Undecided { nodes, budget } => println!("{class}: undecided after {nodes} nodes (budget {budget})"),
        }
        if let Some(p) = out {
            println!("artifact: {}", p.display());
        }
    }
    Ok(code)
}

fn iso(a: &Arrangement, b: &Arrangement, as_json: bool) -> Result<()> {
    let linear = linear_isomorphic(a, b);
    let lattice = matroid_isomorphic(a, b);
    if as_json {
        let matrix = linear.as_ref().map(|m| m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
        println!("{}", json!({ "linear": linear.is_some(), "matrix": matrix, "lattice": lattice.is_some(), "bijection": lattice }));
    } else {
        println!("linear isomorphism: {}", if linear.is_some() { "yes" } else { "no" });
        if let Some(m) = &linear {
            for row in m {
                println!("  {}", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            }
        }
        println!("lattice isomorphism: {}", if lattice.is_some() { "yes" } else { "no" });
    }
    Ok(())
}

/// Accepts a freeness certificate, a class certificate or an induction
/// table in its text form.
fn verify_cert(a: &Arrangement, path: &Path, budget: u64, as_json: bool) -> Result<u8> {
    let text = std::fs::read_to_string(path)?;
    let (kind, outcome): (&str, Result<()>) = if let Ok(c) = serde_json::from_str::<ClassCertificate>(&text) {
        let kind = match c {
            ClassCertificate::InductionTable(_) => "induction_table",
            ClassCertificate::FreeChain(_) => "free_chain",
            ClassCertificate::DivisionalFlag(_) => "divisional_flag",
            ClassCertificate::StairProof { .. } => "stair_proof",
        };
        let outcome = match &c {
            ClassCertificate::InductionTable(t) => replay_table(a, t, budget),
            _ => classes::verify_class_certificate(a, &c),
        };
        (kind, outcome)
    } else if let Ok(j) = serde_json::from_str::<CertificateJson>(&text) {
        ("freeness", FreeCertificate::from_json(&j).and_then(|c| derivations::verify_freeness_certificate(a, &c)))
    } else if let Ok(ClassVerdict::Member { certificate }) = serde_json::from_str::<ClassVerdict>(&text) {
        ("class_verdict", classes::verify_class_certificate(a, &certificate))
    } else {
        ("induction_table", InductionTable::parse(&text).and_then(|t| replay_table(a, &t, budget)))
    };
    let ok = outcome.is_ok();
    if as_json {
        println!("{}", json!({ "kind": kind, "accepted": ok, "error": outcome.as_ref().err().map(|e| e.to_string()) }));
    } else {
        match &outcome {
            Ok(()) => println!("{kind}: accepted"),
            Err(e) => println!("{kind}: rejected: {e}"),
        }
    }
    Ok(if ok { 0 } else { 2 })
}

fn replay_table(a: &Arrangement, t: &InductionTable, budget: u64) -> Result<()> {
    let r = classes::verify_induction_table(a, t, &mut InductiveSearch::new(budget))?;
    match r.failed_step {
        None => Ok(()),
        Some(k) => {
            let why = r.steps.last().map(|s| s.detail.clone()).unwrap_or_default();
            Err(Error::Certificate(format!("step {k}: {why}")))
        }
    }
}

fn verify_paper(only: Option<String>, budget: u64, out_dir: Option<PathBuf>, as_json: bool) -> Result<u8> {
    let reports = battery::verify_paper(&BatteryConfig { only, budget, out_dir });
    if as_json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        for r in &reports {
            let v = match r.verdict {
                ClaimVerdict::Pass => "PASS",
                ClaimVerdict::Fail => "FAIL",
                ClaimVerdict::Undecided => "UNDECIDED",
            };
            println!("{v:<9} {:<26} {:>8} ms  {}  [{}]", r.id, r.runtime_ms, r.detail, r.anchor);
            if let Some(p) = &r.artifact {
                println!("          artifact: {p}");
            }
        }
    }
    Ok(battery::exit_code(&reports) as u8)
}

fn run(cli: Cli) -> Result<u8> {
    let Cli { json: as_json, strict, command } = cli;
    match command {
        Command::Chi { file } => chi(&load(&file, strict)?, as_json),
        Command::Restrict { file, flat } => {
            let a = load(&file, strict)?;
            let x = parse_flat(&a, &flat, strict)?;
            print_arrangement(&a.restriction(&x)?, as_json);
        }
        Command::Delete { file, hyperplane } => {
            let a = load(&file, strict)?;
            let i = parse_hyperplane(&a, &hyperplane)?;
            print_arrangement(&a.delete_index(i), as_json);
        }
        Command::Localize { file, flat } => {
            let a = load(&file, strict)?;
            let x = parse_flat(&a, &flat, strict)?;
            print_arrangement(&a.localization(&x)?, as_json);
        }
        Command::Product { first, second } => {
            print_arrangement(&load(&first, strict)?.product(&load(&second, strict)?), as_json);
        }
        Command::IsFree { file, out } => is_free(&load(&file, strict)?, out.as_deref(), as_json)?,
        Command::Classify { file, class, budget, out } => {
            return classify(&load(&file, strict)?, class.into(), budget, out.as_deref(), as_json)
        }
        Command::Iso { first, second } => iso(&load(&first, strict)?, &load(&second, strict)?, as_json)?,
        Command::Catalog { action: CatalogAction::List } => {
            let entries = catalog::entries();
            if as_json {
                let v: Vec<_> = entries
                    .iter()
                    .map(|e| {
                        let a = (e.arrangement)();
                        json!({ "name": e.name, "provenance": e.provenance, "dim": a.dim(), "hyperplanes": a.len() })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                for e in entries {
                    let a = (e.arrangement)();
                    println!("{:<18} dim {:<2} {:>3} hyperplanes  {}", e.name, a.dim(), a.len(), e.provenance);
                }
            }
        }
        Command::Catalog { action: CatalogAction::Get { name } } => print_arrangement(&catalog::get(&name)?, as_json),
        Command::VerifyCert { file, cert, budget } => return verify_cert(&load(&file, strict)?, &cert, budget, as_json),
        Command::VerifyPaper { only, budget, out_dir } => return verify_paper(only, budget, out_dir, as_json),
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
