//! Command-line front end.
//!
//! [`run`] takes an argument vector and hands back the exit status with
//! everything destined for stdout and stderr, so the binary is a thin shell
//! and tests can drive the commands directly.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::braidcheck::{try_is_trivial, BraidWord};
use crate::catalog::{Catalog, KindId, Shape};
use crate::coexistence::can_coexist;
use crate::gluer::{Bounds, Enumeration, Gluer, GluerError, Status, SurfaceClass};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(stdout: String) -> Output {
        Output { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn usage(msg: impl std::fmt::Display) -> Output {
        Output { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

#[derive(Debug, Parser)]
#[command(name = "surfglue", version, about = "Closed surfaces glued from pieces in two 3-string trivial tangles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnumFormat {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List every surviving shape for a target surface class
    Enumerate {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        punctures: u32,
        #[arg(long, default_value_t = 3)]
        bridge: u32,
        #[arg(long = "max-pieces", default_value_t = 4)]
        max_pieces: usize,
        #[arg(long = "max-circles", default_value_t = 8)]
        max_circles: u32,
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = EnumFormat::Text)]
        format: EnumFormat,
        /// Also list rejected candidates with their reasons
        #[arg(long)]
        explain: bool,
    },
    /// Judge one shape, given as comma separated kind names per side
    Check {
        #[arg(long)]
        side1: String,
        #[arg(long)]
        side2: String,
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        punctures: u32,
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the piece kinds and rule tables
    Catalog {
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Can two kinds sit in one trivial tangle?
    Coexist {
        first: String,
        second: String,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Decide whether a braid word is the identity braid
    Braid {
        #[arg(long)]
        strands: u32,
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Output::ok(text)
            };
        }
    };
    match cli.command {
        Command::Enumerate { genus, punctures, bridge, max_pieces, max_circles, catalog, format, explain } => {
            let cat = match load(catalog.as_ref()) {
                Ok(c) => c,
                Err(o) => return o,
            };
            if bridge != cat.sphere().n_strings() {
                return Output::usage(format!(
                    "--bridge {bridge} does not match the catalog, which describes {}-string tangles",
                    cat.sphere().n_strings()
                ));
            }
            if max_pieces == 0 || max_circles == 0 {
                return Output::usage("--max-pieces and --max-circles must be positive");
            }
            let gluer = Gluer::new(&cat);
            let target = SurfaceClass { genus, punctures };
            let bounds = Bounds { max_pieces_per_side: max_pieces, max_total_circles: max_circles };
            let e = match gluer.enumerate(target, bounds) {
                Ok(e) => e,
                Err(err) => return Output::usage(err),
            };
            let stdout = match format {
                EnumFormat::Text => enumeration_text(&cat, &e, explain),
                EnumFormat::Json => enumeration_json(&cat, &e, explain),
                EnumFormat::Dot => enumeration_dot(&cat, &gluer, &e),
            };
            Output::ok(stdout)
        }
        Command::Check { side1, side2, genus, punctures, catalog, format } => {
            let cat = match load(catalog.as_ref()) {
                Ok(c) => c,
                Err(o) => return o,
            };
            let (s1, s2) = match (side_ids(&cat, &side1), side_ids(&cat, &side2)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(o), _) | (_, Err(o)) => return o,
            };
            check(&cat, &s1, &s2, SurfaceClass { genus, punctures }, format)
        }
        Command::Catalog { catalog, format } => {
            let cat = match load(catalog.as_ref()) {
                Ok(c) => c,
                Err(o) => return o,
            };
            Output::ok(match format {
                Format::Text => catalog_text(&cat),
                Format::Json => cat.to_json() + "\n",
            })
        }
        Command::Coexist { first, second, catalog } => {
            let cat = match load(catalog.as_ref()) {
                Ok(c) => c,
                Err(o) => return o,
            };
            match can_coexist(&cat, &first, &second) {
                Ok(true) => Output::ok("yes\n".into()),
                Ok(false) => Output { code: EXIT_NEGATIVE, stdout: "no\n".into(), stderr: String::new() },
                Err(e) => Output::usage(e),
            }
        }
        Command::Braid { strands, word } => {
            let w = match BraidWord::parse(strands, &word) {
                Ok(w) => w,
                Err(e) => return Output::usage(e),
            };
            match try_is_trivial(&w) {
                Ok(true) => Output::ok("trivial\n".into()),
                Ok(false) => Output { code: EXIT_NEGATIVE, stdout: "nontrivial\n".into(), stderr: String::new() },
                Err(e) => Output { code: EXIT_USAGE, stdout: String::new(), stderr: format!("bug: {e}\n") },
            }
        }
    }
}

fn load(path: Option<&PathBuf>) -> Result<Catalog, Output> {
    let Some(p) = path else {
        return Ok(Catalog::builtin());
    };
    let text = std::fs::read_to_string(p)
        .map_err(|e| Output::usage(format!("cannot read {}: {e}", p.display())))?;
    Catalog::from_json(&text).map_err(|e| Output::usage(format!("{}: {e}", p.display())))
}

fn side_ids(cat: &Catalog, list: &str) -> Result<Vec<KindId>, Output> {
    let ids = cat.parse_side(list).map_err(Output::usage)?;
    if ids.is_empty() {
        return Err(Output::usage("a side needs at least one piece"));
    }
    Ok(ids)
}

fn label_str(l: Option<crate::catalog::Label>) -> &'static str {
    l.map(|l| l.as_str()).unwrap_or("unlabeled")
}

// ---- enumerate -------------------------------------------------------------

#[derive(Serialize)]
struct TargetJson {
    genus: u32,
    punctures: u32,
}

#[derive(Serialize)]
struct ResultJson {
    side_a: Vec<String>,
    side_b: Vec<String>,
    label: String,
}

#[derive(Serialize)]
struct RejectedJson {
    side_a: Vec<String>,
    side_b: Vec<String>,
    reason: String,
    cite: String,
}

#[derive(Serialize)]
struct EnumerationJson {
    target: TargetJson,
    results: Vec<ResultJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rejected: Option<Vec<RejectedJson>>,
}

fn enumeration_json(cat: &Catalog, e: &Enumeration, explain: bool) -> String {
    let doc = EnumerationJson {
        target: TargetJson { genus: e.target.genus, punctures: e.target.punctures },
        results: e
            .accepted
            .iter()
            .map(|a| {
                let (side_a, side_b) = a.shape.names(cat);
                ResultJson { side_a, side_b, label: label_str(a.label).into() }
            })
            .collect(),
        rejected: explain.then(|| {
            e.rejected
                .iter()
                .map(|r| {
                    let (side_a, side_b) = r.shape.names(cat);
                    RejectedJson { side_a, side_b, reason: r.reason.as_str().into(), cite: r.citation.clone() }
                })
                .collect()
        }),
    };
    serde_json::to_string_pretty(&doc).expect("enumeration serializes") + "\n"
}

fn enumeration_text(cat: &Catalog, e: &Enumeration, explain: bool) -> String {
    let mut s = String::new();
    writeln!(s, "target: genus {}, {} punctures", e.target.genus, e.target.punctures).unwrap();
    for a in &e.accepted {
        writeln!(s, "{:<9} {}", label_str(a.label), a.shape.display(cat)).unwrap();
    }
    writeln!(s, "{} shape{}", e.accepted.len(), if e.accepted.len() == 1 { "" } else { "s" }).unwrap();
    if explain {
        writeln!(s, "rejected: {}", e.rejected.len()).unwrap();
        for r in &e.rejected {
            writeln!(s, "  {} {}: {}", r.shape.display(cat), r.reason, r.citation).unwrap();
        }
    }
    s
}

fn enumeration_dot(cat: &Catalog, gluer: &Gluer<'_>, e: &Enumeration) -> String {
    let mut s = String::new();
    for a in &e.accepted {
        let name = format!("{} {}", label_str(a.label), a.shape.display(cat));
        let graph = gluer.gluing_graph(&a.witness).expect("witnesses are complete");
        s.push_str(&graph.to_dot(&name));
    }
    s
}

// ---- check -----------------------------------------------------------------

#[derive(Serialize)]
struct CheckJson {
    side_a: Vec<String>,
    side_b: Vec<String>,
    target: TargetJson,
    status: &'static str,
    label: Option<String>,
    reason: Option<String>,
    cite: Option<String>,
}

fn check(cat: &Catalog, s1: &[KindId], s2: &[KindId], target: SurfaceClass, format: Format) -> Output {
    let gluer = Gluer::new(cat);
    let shape = Shape::new(s1.to_vec(), s2.to_vec());
    let (side_a, side_b) = shape.names(cat);
    let mut stderr = String::new();
    let (status, label, reason, cite) = match gluer.check_shape(s1, s2, target) {
        Ok((v, _)) => (
            v.status,
            v.label.map(|l| l.as_str().to_string()),
            v.reason.map(|r| r.as_str().to_string()),
            v.citation,
        ),
        Err(err @ GluerError::UnlabeledAcceptance(_)) => {
            stderr = format!("warning: {err}\n");
            (Status::Accepted, Some("unlabeled".to_string()), None, None)
        }
        Err(err) => return Output::usage(err),
    };
    let code = if status == Status::Accepted { EXIT_OK } else { EXIT_NEGATIVE };
    let stdout = match format {
        Format::Json => {
            let doc = CheckJson {
                side_a,
                side_b,
                target: TargetJson { genus: target.genus, punctures: target.punctures },
                status: if status == Status::Accepted { "accepted" } else { "rejected" },
                label,
                reason,
                cite,
            };
            serde_json::to_string_pretty(&doc).expect("verdict serializes") + "\n"
        }
        Format::Text => match status {
            Status::Accepted => format!("accepted: {}\n", label.unwrap_or_default()),
            Status::Rejected => format!(
                "rejected: {}\n{}\n",
                reason.unwrap_or_default(),
                cite.unwrap_or_default()
            ),
        },
    };
    Output { code, stdout, stderr }
}

// ---- catalog ---------------------------------------------------------------

fn catalog_text(cat: &Catalog) -> String {
    let mut s = String::new();
    writeln!(s, "kinds ({}):", cat.kinds().len()).unwrap();
    writeln!(s, "  {:<5} {:>5} {:>8} {:>9} {:>5}  {:<7} patterns", "name", "genus", "boundary", "punctures", "euler", "parent")
        .unwrap();
    for k in cat.kinds() {
        let patterns: Vec<String> = k.boundary_patterns.iter().map(|p| p.to_string()).collect();
        writeln!(
            s,
            "  {:<5} {:>5} {:>8} {:>9} {:>5}  {:<7} {}",
            k.name,
            k.genus,
            k.boundary_count,
            k.knot_punctures,
            k.euler_char(),
            k.parent.as_deref().unwrap_or("-"),
            patterns.join(" ")
        )
        .unwrap();
    }
    let rules = cat.rules();
    writeln!(s, "coexisting pairs ({}):", rules.coexist_pairs.len()).unwrap();
    for chunk in rules.coexist_pairs.chunks(6) {
        let parts: Vec<String> = chunk.iter().map(|(x, y)| format!("{x}/{y}")).collect();
        writeln!(s, "  {}", parts.join(" ")).unwrap();
    }
    let refused: Vec<&String> = rules.self_coexist.iter().filter(|(_, &v)| !v).map(|(k, _)| k).collect();
    if !refused.is_empty() {
        let names: Vec<&str> = refused.iter().map(|s| s.as_str()).collect();
        writeln!(s, "kinds that cannot appear twice: {}", names.join(" ")).unwrap();
    }
    writeln!(s, "exclusions ({}):", rules.exclusions.len()).unwrap();
    for r in &rules.exclusions {
        writeln!(s, "  {} -> {}: {}", r.shape.display(cat), r.reason, r.citation).unwrap();
    }
    writeln!(s, "normalization ({}):", rules.normalization.len()).unwrap();
    for n in &rules.normalization {
        writeln!(s, "  {} -> {}", n.shape.display(cat), n.label).unwrap();
    }
    s
}
