mod spec;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use triplefold::certify::{complements, minimize, presentation, MinimalityReport, Minimized};
use triplefold::graphs::{bouquet, FoldOrder, SubgroupGraph};
use triplefold::pipeline::{
    embed_with_retry, extract_certificate, verify_embedding, DecompositionCertificate, Embedding,
};
use triplefold::tightening::{tighten_xy, tighten_z_capped};
use triplefold::triples::initial_triple;
use triplefold::words::{format_word_list, Word};
use triplefold::{Error, GraphTriple};

use spec::ProblemSpec;

#[derive(Debug, Parser)]
#[command(name = "triplefold", version, about = "Graph triples for free-by-cyclic groups")]
struct Cli {
    /// Highest level checked by certification and the embedding [default: 10].
    #[arg(long, global = true)]
    max_level: Option<usize>,
    /// Step budget for each tightening procedure.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Starting power for the embedding.
    #[arg(long, global = true)]
    power: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for `--fold-order random`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Threads used for level checks.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Order::Lowest)]
    fold_order: Order,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Dot,
    JsonLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Order {
    Lowest,
    Random,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that the two tables of a problem file are inverse automorphisms.
    CheckAuto { spec: PathBuf },
    /// Fold the subgroup graph of a list of words.
    Stallings {
        words: Vec<String>,
        /// Alphabet rank; defaults to the smallest one containing the words.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Build, tighten or minimize a triple.
    Triple {
        #[command(subcommand)]
        action: TripleAction,
    },
    /// Minimize and report the certification outcome.
    Certify { spec: PathBuf },
    /// Minimize, certify and print the HNN presentation.
    Presentation { spec: PathBuf },
    /// Minimize, certify and extract a decomposition certificate.
    Decompose { spec: PathBuf },
    /// Build and verify the embedding, retrying larger powers.
    Embed {
        spec: PathBuf,
        /// Use this certificate instead of extracting one.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Verify an embedding against a certificate.
    VerifyEmbed {
        spec: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum TripleAction {
    Init { spec: PathBuf },
    Tighten { spec: PathBuf },
    Minimize { spec: PathBuf },
}

/// Exit status and message of a failed run.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn verification(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }

    fn parse(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Budget { .. } | Error::Stall { .. } => 3,
            Error::Word(_) => 2,
            _ => 1,
        };
        let mut message = e.to_string();
        if let Error::Stall { history, .. } = &e {
            for line in history {
                let _ = write!(message, "\n  {line}");
            }
        }
        Failure { code, message }
    }
}

type Outcome = Result<String, (String, Failure)>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, f)) => {
            print!("{out}");
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn bare<T>(r: Result<T, Failure>) -> Result<T, (String, Failure)> {
    r.map_err(|f| (String::new(), f))
}

fn load(path: &Path) -> Result<ProblemSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    ProblemSpec::parse(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn load_checked(path: &Path) -> Result<ProblemSpec, Failure> {
    let spec = load(path)?;
    if let Err(defect) = spec.psi.check() {
        return Err(Failure::verification(format!("psi tables are not inverse: {defect}")));
    }
    Ok(spec)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::CheckAuto { spec } => {
            let spec = bare(load(spec))?;
            match spec.psi.check() {
                Ok(()) => Ok(format!("ok: psi = {}\n", spec.psi)),
                Err(defect) => Err((String::new(), Failure::verification(format!("generator {defect}")))),
            }
        }
        Command::Stallings { words, rank } => stallings(cli, words, *rank),
        Command::Triple { action } => match action {
            TripleAction::Init { spec } => {
                let spec = bare(load_checked(spec))?;
                let t = bare(initial_triple(&spec.words, &spec.psi).map_err(Failure::from))?;
                Ok(triple_output(cli, &t))
            }
            TripleAction::Tighten { spec } => tighten(cli, spec),
            TripleAction::Minimize { spec } => {
                let spec = bare(load_checked(spec))?;
                let m = bare(run_minimize(cli, &spec))?;
                let mut out = String::new();
                if cli.format == Format::Text {
                    for line in &m.history {
                        let _ = writeln!(out, "# {line}");
                    }
                }
                out.push_str(&triple_output(cli, &m.triple));
                Ok(out)
            }
        },
        Command::Certify { spec } => {
            let spec = bare(load_checked(spec))?;
            let m = bare(run_minimize(cli, &spec))?;
            let out = report_output(cli, &m.triple, &m.report);
            if m.report.certified() {
                Ok(out)
            } else {
                Err((out, Failure::verification("triple is not certified minimal")))
            }
        }
        Command::Presentation { spec } => {
            let spec = bare(load_checked(spec))?;
            let m = bare(run_minimize(cli, &spec))?;
            let p = bare(presentation(&m.triple, &spec.psi, &m.report).map_err(Failure::from))?;
            Ok(p.to_string())
        }
        Command::Decompose { spec } => {
            let spec = bare(load_checked(spec))?;
            let m = bare(run_minimize(cli, &spec))?;
            let ex = bare(extract_certificate(&m.triple, &spec.psi, &m.report, level(cli, &spec)).map_err(Failure::from))?;
            let out = ex.to_string();
            match ex.certificate {
                Some(_) => Ok(out),
                None => Err((out, Failure::verification("no candidate certificate verified"))),
            }
        }
        Command::Embed { spec, certificate } => embed(cli, spec, certificate.as_deref()),
        Command::VerifyEmbed { spec, certificate, embedding } => {
            let spec = bare(load_checked(spec))?;
            let cert = bare(
                DecompositionCertificate::parse(&bare(read(certificate))?, spec.psi.clone()).map_err(parse_failure),
            )?;
            let emb = bare(Embedding::parse(&bare(read(embedding))?).map_err(parse_failure))?;
            let report = bare(verify_embedding(&emb, &cert, level(cli, &spec)).map_err(Failure::from))?;
            let out = report.to_string();
            if report.all_passed() {
                Ok(out)
            } else {
                Err((out, Failure::verification("embedding failed verification")))
            }
        }
    }
}

fn parse_failure(e: Error) -> Failure {
    Failure::parse(e.to_string())
}

fn level(cli: &Cli, spec: &ProblemSpec) -> usize {
    cli.max_level.or(spec.config.max_level).unwrap_or(10)
}

fn budget(cli: &Cli, spec: &ProblemSpec) -> Option<usize> {
    cli.budget.or(spec.config.budget)
}

fn run_minimize(cli: &Cli, spec: &ProblemSpec) -> Result<Minimized, Failure> {
    let t = initial_triple(&spec.words, &spec.psi)?;
    Ok(minimize(&t, &spec.psi, level(cli, spec), budget(cli, spec), cli.jobs.max(1))?)
}

fn stallings(cli: &Cli, words: &[String], rank: Option<usize>) -> Outcome {
    let words: Vec<Word> = bare(
        words.iter().map(|s| Word::parse(s).map_err(|e| Failure::parse(format!("{s}: {e}")))).collect(),
    )?;
    let rank = rank.unwrap_or_else(|| words.iter().map(Word::min_rank).max().unwrap_or(1).max(1));
    let g = bare(bouquet(rank, &words).map_err(|e| Failure::parse(e.to_string())))?;
    let mut order = match cli.fold_order {
        Order::Lowest => FoldOrder::Lowest,
        Order::Random => FoldOrder::random(cli.seed),
    };
    let (folded, _) = g.fold_to_immersion_with(&mut order);
    let s = bare(SubgroupGraph::from_immersed(&folded).map_err(|e| Failure::verification(e.to_string())))?;
    let basis = s.basis();
    let graph = s.graph();
    Ok(match cli.format {
        Format::Dot => graph.dot(),
        Format::Text => format!("{}// basis: {}\n", graph.dot(), format_word_list(&basis)),
        Format::JsonLines => {
            let basis: Vec<String> = basis.iter().map(Word::to_string).collect();
            let line = json!({
                "vertices": graph.vertex_count(),
                "edges": graph.edge_count(),
                "rank": s.rank(),
                "basis": basis,
            });
            format!("{line}\n")
        }
    })
}

fn triple_output(cli: &Cli, t: &GraphTriple) -> String {
    match cli.format {
        Format::Dot => t.dot(),
        Format::Text => t.to_string(),
        Format::JsonLines => {
            let rr = t.rr().ok();
            let line = json!({
                "z_vertices": t.z().vertex_count(),
                "z_edges": t.z().edge_count(),
                "rr": rr,
                "dot": t.dot(),
            });
            format!("{line}\n")
        }
    }
}

fn tighten(cli: &Cli, path: &Path) -> Outcome {
    let spec = bare(load_checked(path))?;
    let t = bare(initial_triple(&spec.words, &spec.psi).map_err(Failure::from))?;
    let budget = budget(cli, &spec);
    let mut out = String::new();
    let log = |out: &mut String, events: &[triplefold::tightening::TightenEvent]| {
        for e in events {
            match cli.format {
                Format::JsonLines => {
                    let _ = writeln!(out, "{}", serde_json::to_string(e).expect("serializable"));
                }
                Format::Text => {
                    let _ = writeln!(out, "{e}");
                }
                Format::Dot => {}
            }
        }
    };
    let xy = match tighten_xy(&t, &spec.psi, budget) {
        Ok(run) => run,
        Err(e) => return Err((out, e.into())),
    };
    log(&mut out, &xy.events);
    let z = match tighten_z_capped(&xy.triple, &spec.psi, budget) {
        Ok(run) => run,
        Err(e) => return Err((out, e.into())),
    };
    log(&mut out, &z.events);
    if !z.completed {
        return Err((out, Failure { code: 3, message: "tighten_Z: step budget exhausted".into() }));
    }
    let done = z.triple.compacted();
    if cli.format != Format::JsonLines {
        out.push_str(&triple_output(cli, &done));
    }
    Ok(out)
}

fn report_output(cli: &Cli, t: &GraphTriple, report: &MinimalityReport) -> String {
    let c = complements(t).ok();
    match cli.format {
        Format::JsonLines => {
            let words = |ws: &[Word]| ws.iter().map(Word::to_string).collect::<Vec<_>>();
            let line = json!({
                "checked_levels": report.checked_levels,
                "injective_up_to_n": report.injective_up_to_n,
                "failed_level": report.failed_level,
                "rr": [report.rr.0, report.rr.1],
                "chi": report.chi,
                "fz_injective": report.fz_injective,
                "tight": report.tight,
                "certified": report.certified(),
                "C": c.as_ref().map(|c| words(&c.c_basis)),
                "D": c.as_ref().map(|c| words(&c.d_basis)),
                "E": c.as_ref().map(|c| words(&c.e_basis)),
            });
            format!("{line}\n")
        }
        Format::Dot => t.dot(),
        Format::Text => {
            let mut out = report.to_string();
            if let Some(c) = c {
                let _ = writeln!(out, "C: {}", format_word_list(&c.c_basis));
                let _ = writeln!(out, "D: {}", format_word_list(&c.d_basis));
                let _ = writeln!(out, "E: {}", format_word_list(&c.e_basis));
            }
            out
        }
    }
}

fn embed(cli: &Cli, path: &Path, certificate: Option<&Path>) -> Outcome {
    let spec = bare(load_checked(path))?;
    let level = level(cli, &spec);
    let cert = match certificate {
        Some(p) => bare(DecompositionCertificate::parse(&bare(read(p))?, spec.psi.clone()).map_err(parse_failure))?,
        None => {
            let m = bare(run_minimize(cli, &spec))?;
            let ex = bare(extract_certificate(&m.triple, &spec.psi, &m.report, level).map_err(Failure::from))?;
            match ex.certificate {
                Some(c) => c,
                None => return Err((ex.to_string(), Failure::verification("no candidate certificate verified"))),
            }
        }
    };
    let phi = match spec.phi(cert.c0_basis.len()) {
        Err(e) => return Err((String::new(), Failure::parse(e))),
        Ok(Err(e)) => return Err((String::new(), Failure::verification(e))),
        Ok(Ok(phi)) => phi,
    };
    let start = cli.power.or(spec.config.power).unwrap_or(1);
    let max_power = spec.config.max_power.unwrap_or(4).max(start);
    let run = bare(embed_with_retry(&cert, &phi, start, max_power, level).map_err(Failure::from))?;
    let mut out = String::new();
    for line in cert.to_string().lines() {
        let _ = writeln!(out, "# {line}");
    }
    for report in &run.attempts {
        for line in report.to_string().lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    out.push_str(&run.embedding.to_string());
    if run.passed() {
        Ok(out)
    } else {
        Err((out, Failure::verification(format!("embedding failed verification up to power {max_power}"))))
    }
}
