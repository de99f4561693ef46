//! Command-line front end.
//!
//! Exit codes: 0 success, 1 negative mathematical answer (not equal, not
//! central, impossible, invalid certificate), 2 inconclusive (a budget ran
//! out), 3 usage or input error. Errors go to stderr as one line with a
//! stable prefix (`usage error:`, `parse error:`, `io error:`).

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::atlas::{
    klein_presentation, pi1_nonorientable, pure_braid_rp2, quaternion_presentation, recognize_rp2, tau_n,
    torus_presentation, SurfaceKind,
};
use crate::coset::{todd_coxeter, CosetTable, DEFAULT_MAX_COSETS};
use crate::covering::{can_cover, euler_char, kernel_description, quotient_candidates, CoverDecision};
use crate::presentation::{hom_check, Decision, GroupHom, HomCheck, Presentation, WordOracle};
use crate::rewrite::{
    check_derivation, knuth_bendix, normal_form, search_equality, ChainReport, DerivationChain, DEFAULT_MAX_LEN,
    DEFAULT_MAX_NODES, DEFAULT_MAX_RULES,
};
use crate::word::{parse_word, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Environment variable overriding the default coset budget.
pub const MAX_COSETS_ENV: &str = "BRAIDKERNEL_MAX_COSETS";

const DEFAULT_MAX_WORD_LEN: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "braidkernel", version, about = "Surface braid group presentations, centers and covering kernels")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(flatten)]
    pub budgets: BudgetArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    /// A single JSON object with a `result` field.
    Json,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Live coset budget; overrides BRAIDKERNEL_MAX_COSETS.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_cosets: Option<u64>,
    /// Rule budget for completion.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_rules: Option<u64>,
    /// Longest rule lhs accepted during completion.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_len: Option<u64>,
    /// Words visited by equality search.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_nodes: Option<u64>,
    /// Longest intermediate word in equality search.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_word_len: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print an atlas presentation in the presentation text format.
    Build {
        /// rp2 | torus | klein | nonorientable:K | quaternion
        #[arg(long)]
        surface: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Order of the group, by coset enumeration.
    Order(InputArgs),
    /// Decide whether an element is central (finite groups).
    Central {
        #[command(flatten)]
        input: InputArgs,
        /// A word, or `tau` for the central element of an atlas RP2 presentation.
        #[arg(long)]
        element: String,
    },
    /// Abelian invariants of the group.
    Abelianize(InputArgs),
    /// Check that a generator map defines a homomorphism.
    HomCheck {
        #[arg(long)]
        map: PathBuf,
    },
    /// Decide whether two words are equal in the group.
    Equal {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
        /// Bounded search for a derivation certificate.
        #[arg(long, conflicts_with_all = ["table", "rewrite"])]
        search: bool,
        /// Coset table of the whole group (default).
        #[arg(long, conflicts_with = "rewrite")]
        table: bool,
        /// Knuth–Bendix normal forms.
        #[arg(long)]
        rewrite: bool,
    },
    /// Kernel description for a free action with the given quotient surface.
    Kernel {
        #[arg(long)]
        quotient: String,
        #[arg(long)]
        n: usize,
        #[arg(long, requires = "r")]
        q: Option<u64>,
        #[arg(long, requires = "q")]
        r: Option<u64>,
        #[arg(long)]
        full_braid: bool,
        /// Write the explicit presentation, when there is one, to this file.
        #[arg(long)]
        write_presentation: Option<PathBuf>,
    },
    /// Necessary conditions for an L-sheeted covering.
    Cover {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        sheets: u64,
    },
    /// Quotient surfaces of a free action of a group of order L.
    Quotients {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        sheets: u64,
        #[arg(long)]
        strict_orientability: bool,
    },
    /// Replay a derivation chain file.
    CheckDerivation { chain: PathBuf },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Presentation file; standard input when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
struct Budgets {
    max_cosets: usize,
    max_rules: usize,
    max_len: usize,
    max_nodes: usize,
    max_word_len: usize,
}

enum Failure {
    Usage(String),
    Parse(String),
    Io(String),
}

impl Failure {
    fn line(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage error: {m}"),
            Failure::Parse(m) => format!("parse error: {m}"),
            Failure::Io(m) => format!("io error: {m}"),
        }
    }
}

/// What a subcommand produced: exit code, text body and JSON object.
struct Outcome {
    code: i32,
    text: String,
    json: Value,
}

impl Outcome {
    fn new(code: i32, text: impl Into<String>, json: Value) -> Self {
        Outcome { code, text: text.into(), json }
    }

    fn inconclusive(reason: &str) -> Self {
        Outcome::new(
            EXIT_INCONCLUSIVE,
            format!("inconclusive: {reason}"),
            json!({"result": "inconclusive", "reason": reason}),
        )
    }
}

/// Renders JSON canonically: sorted keys, compact.
pub fn render_json(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialize")
}

/// Resolves `rp2 N`, `torus`, `klein`, `nonorientable:K`, `quaternion`.
pub fn atlas_presentation(surface: &str, n: Option<usize>) -> Result<Presentation, String> {
    let single = |p: Presentation| match n {
        None | Some(1) => Ok(p),
        Some(n) => Err(format!("no atlas presentation for {surface} with n = {n}")),
    };
    match surface {
        "rp2" => {
            let n = n.ok_or("rp2 needs a strand count")?;
            pure_braid_rp2(n).map_err(|e| e.to_string())
        }
        "torus" => single(torus_presentation()),
        "klein" => single(klein_presentation()),
        "quaternion" => match n {
            None => Ok(quaternion_presentation()),
            Some(_) => Err("quaternion takes no strand count".into()),
        },
        other => match other.strip_prefix("nonorientable:") {
            Some(k) => {
                let k: usize = k.parse().map_err(|_| format!("bad genus in {other:?}"))?;
                single(pi1_nonorientable(k).map_err(|e| e.to_string())?)
            }
            None => Err(format!("unknown atlas surface {other:?}")),
        },
    }
}

/// Resolver for `atlas <surface> [n]` directives in chain and map files.
pub fn resolve_atlas_directive(line: &str) -> Option<Result<Presentation, String>> {
    let mut parts = line.split_whitespace();
    if parts.next()? != "atlas" {
        return None;
    }
    let surface = match parts.next() {
        Some(s) => s,
        None => return Some(Err("atlas directive needs a surface".into())),
    };
    let n = match parts.next().map(str::parse::<usize>) {
        None => None,
        Some(Ok(n)) => Some(n),
        Some(Err(_)) => return Some(Err("bad strand count in atlas directive".into())),
    };
    Some(atlas_presentation(surface, n))
}

fn parse_surface(s: &str) -> Result<SurfaceKind, Failure> {
    s.parse().map_err(|e: crate::atlas::AtlasError| Failure::Usage(e.to_string()))
}

fn surface_json(s: SurfaceKind) -> Value {
    json!({
        "surface": s.label(),
        "alias": s.alias(),
        "orientable": s.is_orientable(),
        "genus": s.genus(),
        "euler_characteristic": s.euler_characteristic(),
    })
}

fn read_input(input: &InputArgs, stdin: &mut dyn Read) -> Result<Presentation, Failure> {
    let text = match &input.input {
        Some(path) => fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
            s
        }
    };
    Presentation::parse(&text).map_err(|e| Failure::Parse(e.to_string()))
}

fn enumerate(p: &Presentation, budgets: &Budgets) -> Result<CosetTable, Failure> {
    todd_coxeter(p, &[], budgets.max_cosets).map_err(|e| Failure::Usage(e.to_string()))
}

fn word(p: &Presentation, text: &str) -> Result<Word, Failure> {
    parse_word(text, p.alphabet()).map_err(|e| Failure::Parse(format!("{text:?}: {e}")))
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            let _ = writeln!(stderr, "usage error: {first}");
            return EXIT_USAGE;
        }
    };
    let env_cosets = match std::env::var(MAX_COSETS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Some(n),
            _ => {
                let _ = writeln!(stderr, "usage error: {MAX_COSETS_ENV} must be a positive integer");
                return EXIT_USAGE;
            }
        },
        Err(_) => None,
    };
    let b = &cli.budgets;
    let budgets = Budgets {
        max_cosets: b.max_cosets.map(|x| x as usize).or(env_cosets).unwrap_or(DEFAULT_MAX_COSETS),
        max_rules: b.max_rules.map_or(DEFAULT_MAX_RULES, |x| x as usize),
        max_len: b.max_len.map_or(DEFAULT_MAX_LEN, |x| x as usize),
        max_nodes: b.max_nodes.map_or(DEFAULT_MAX_NODES, |x| x as usize),
        max_word_len: b.max_word_len.map_or(DEFAULT_MAX_WORD_LEN, |x| x as usize),
    };
    match execute(&cli.command, &budgets, stdin) {
        Ok(out) => {
            if cli.json || cli.format == OutputFormat::Json {
                let _ = writeln!(stdout, "{}", render_json(&out.json));
            } else {
                let _ = write!(stdout, "{}", out.text);
                if !out.text.ends_with('\n') {
                    let _ = writeln!(stdout);
                }
            }
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.line());
            EXIT_USAGE
        }
    }
}

fn execute(cmd: &Command, budgets: &Budgets, stdin: &mut dyn Read) -> Result<Outcome, Failure> {
    match cmd {
        Command::Build { surface, n } => {
            let p = atlas_presentation(surface, *n).map_err(Failure::Usage)?;
            let text = p.to_text();
            Ok(Outcome::new(EXIT_OK, text.clone(), json!({"result": text, "group": p.name()})))
        }
        Command::Order(input) => {
            let p = read_input(input, stdin)?;
            let t = enumerate(&p, budgets)?;
            match t.group_order() {
                Ok(order) => Ok(Outcome::new(EXIT_OK, order.to_string(), json!({"result": order, "group": p.name()}))),
                Err(_) => Ok(Outcome::inconclusive("coset budget exceeded")),
            }
        }
        Command::Central { input, element } => {
            let p = read_input(input, stdin)?;
            let w = if element == "tau" {
                let n = recognize_rp2(&p)
                    .ok_or_else(|| Failure::Usage("`tau` needs an atlas-built rp2 presentation".into()))?;
                tau_n(n).map_err(|e| Failure::Usage(e.to_string()))?
            } else {
                word(&p, element)?
            };
            let t = enumerate(&p, budgets)?;
            let shown = p.format(&w);
            match t.is_central_finite(&w) {
                Ok(true) => Ok(Outcome::new(
                    EXIT_OK,
                    format!("central: {shown}"),
                    json!({"result": "central", "element": shown}),
                )),
                Ok(false) => Ok(Outcome::new(
                    EXIT_NEGATIVE,
                    format!("not central: {shown}"),
                    json!({"result": "not-central", "element": shown}),
                )),
                Err(_) => Ok(Outcome::inconclusive("coset budget exceeded")),
            }
        }
        Command::Abelianize(input) => {
            let p = read_input(input, stdin)?;
            let inv = p.abelianization().map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(Outcome::new(
                EXIT_OK,
                inv.to_string(),
                json!({"result": {"rank": inv.rank, "torsion": inv.torsion}, "group": p.name()}),
            ))
        }
        Command::HomCheck { map } => hom_check_command(map, budgets),
        Command::Equal { input, lhs, rhs, search, table: _, rewrite } => {
            let p = read_input(input, stdin)?;
            let u = word(&p, lhs)?;
            let v = word(&p, rhs)?;
            equal_command(&p, &u, &v, *search, *rewrite, budgets)
        }
        Command::Kernel { quotient, n, q, r, full_braid, write_presentation } => {
            let surface = parse_surface(quotient)?;
            let params = q.zip(*r);
            let k = kernel_description(surface, *n, !*full_braid, params).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut file = None;
            if let (Some(path), Some(pres)) = (write_presentation, &k.presentation) {
                fs::write(path, pres.to_text()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                file = Some(path.display().to_string());
            }
            let mut text = format!(
                "case: {}\nbase: {} n={} {}\nkernel: {}\n",
                k.case.as_str(),
                surface,
                n,
                if k.pure { "pure" } else { "full" },
                k.symbolic
            );
            if let Some(pres) = &k.presentation {
                text.push_str("presentation:\n");
                text.push_str(&pres.to_text());
            }
            let j = json!({
                "result": k.to_json(file.as_deref()),
                "description": k.symbolic,
                "surface_alias": surface.alias(),
            });
            Ok(Outcome::new(EXIT_OK, text, j))
        }
        Command::Cover { from, to, sheets } => {
            let cover = parse_surface(from)?;
            let base = parse_surface(to)?;
            let d = can_cover(cover, base, *sheets).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(match d {
                CoverDecision::Impossible(c) => Outcome::new(
                    EXIT_NEGATIVE,
                    format!("impossible: {cover} -> {base}, {sheets} sheets\ncertificate: {c}\n"),
                    json!({
                        "result": "impossible",
                        "certificate": c.name(),
                        "detail": c.to_string(),
                        "from": surface_json(cover),
                        "to": surface_json(base),
                    }),
                ),
                CoverDecision::NotExcluded => Outcome::new(
                    EXIT_OK,
                    format!("not excluded: {cover} -> {base}, {sheets} sheets\n"),
                    json!({"result": "not-excluded", "from": surface_json(cover), "to": surface_json(base)}),
                ),
            })
        }
        Command::Quotients { surface, sheets, strict_orientability } => {
            let m = parse_surface(surface)?;
            let cands =
                quotient_candidates(m, *sheets, *strict_orientability).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut text = String::new();
            for c in &cands {
                text.push_str(&format!("{c} chi={}\n", euler_char(*c)));
            }
            if cands.is_empty() {
                text.push_str("none\n");
            }
            let j = json!({"result": cands.iter().map(|c| surface_json(*c)).collect::<Vec<_>>()});
            Ok(Outcome::new(EXIT_OK, text, j))
        }
        Command::CheckDerivation { chain } => {
            let text = fs::read_to_string(chain).map_err(|e| Failure::Io(format!("{}: {e}", chain.display())))?;
            let c =
                DerivationChain::parse(&text, &resolve_atlas_directive).map_err(|e| Failure::Parse(e.to_string()))?;
            match check_derivation(&c) {
                Ok(ChainReport::Valid) => {
                    let p = c.presentation();
                    let (first, last) = (p.format(c.first().unwrap()), p.format(c.last().unwrap()));
                    Ok(Outcome::new(
                        EXIT_OK,
                        format!("valid: {first} = {last} ({} steps)", c.steps().len()),
                        json!({"result": "valid", "steps": c.steps().len(), "lhs": first, "rhs": last}),
                    ))
                }
                Ok(ChainReport::Invalid { step, .. }) => Ok(Outcome::new(
                    EXIT_NEGATIVE,
                    format!("invalid: step {step} does not replay"),
                    json!({"result": "invalid", "step": step}),
                )),
                Err(e) => Err(Failure::Parse(e.to_string())),
            }
        }
    }
}

fn equal_command(
    p: &Presentation,
    u: &Word,
    v: &Word,
    search: bool,
    rewrite: bool,
    budgets: &Budgets,
) -> Result<Outcome, Failure> {
    let (lhs, rhs) = (p.format(u), p.format(v));
    let verdict = |d: Decision, method: &str| match d {
        Decision::Yes => {
            Outcome::new(EXIT_OK, format!("equal ({method})"), json!({"result": "equal", "method": method}))
        }
        Decision::No => Outcome::new(
            EXIT_NEGATIVE,
            format!("not equal ({method})"),
            json!({"result": "not-equal", "method": method}),
        ),
        Decision::Undecided => Outcome::inconclusive(&format!("{method} budget exceeded")),
    };
    if search {
        return Ok(match search_equality(p, u, v, budgets.max_word_len, budgets.max_nodes) {
            Some(c) => Outcome::new(
                EXIT_OK,
                format!("equal (search)\n{}", c.to_text()),
                json!({"result": "equal", "method": "search", "lhs": lhs, "rhs": rhs, "chain": c.to_text()}),
            ),
            None => Outcome::inconclusive("no derivation found within the search budget"),
        });
    }
    if rewrite {
        let rs = knuth_bendix(p, budgets.max_rules, budgets.max_len);
        let (nu, nv) = (normal_form(&rs, u), normal_form(&rs, v));
        let d = if nu == nv {
            Decision::Yes
        } else if rs.is_confluent() {
            Decision::No
        } else {
            Decision::Undecided
        };
        return Ok(verdict(d, "rewrite"));
    }
    let t = enumerate(p, budgets)?;
    Ok(verdict(t.equal(u, v), "table"))
}

/// Map file: `source <group>`, `target <group>` and one `<gen> -> <word>` line
/// per source generator. A group is `atlas <surface> [n]` or a presentation
/// file path relative to the map file.
fn hom_check_command(map: &Path, budgets: &Budgets) -> Result<Outcome, Failure> {
    let text = fs::read_to_string(map).map_err(|e| Failure::Io(format!("{}: {e}", map.display())))?;
    let base = map.parent().unwrap_or(Path::new("."));
    let load = |group: &str, line: usize| -> Result<Presentation, Failure> {
        if let Some(r) = resolve_atlas_directive(group) {
            return r.map_err(|m| Failure::Parse(format!("line {line}: {m}")));
        }
        let path = base.join(group);
        let t = fs::read_to_string(&path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        Presentation::parse(&t).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
    };
    let mut source = None;
    let mut target = None;
    let mut images: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(group) = line.strip_prefix("source ") {
            source = Some(load(group.trim(), line_no)?);
        } else if let Some(group) = line.strip_prefix("target ") {
            target = Some(load(group.trim(), line_no)?);
        } else if let Some((g, w)) = line.split_once("->") {
            images.push((line_no, g.trim().to_string(), w.trim().to_string()));
        } else {
            return Err(Failure::Parse(format!("line {line_no}: expected `source`, `target` or `gen -> word`")));
        }
    }
    let source = source.ok_or_else(|| Failure::Parse("map file has no source".into()))?;
    let target = target.ok_or_else(|| Failure::Parse("map file has no target".into()))?;
    let mut slots: Vec<Option<Word>> = vec![None; source.generator_count()];
    for (line_no, g, w) in images {
        let gi = source
            .alphabet()
            .index_of(&g)
            .ok_or_else(|| Failure::Parse(format!("line {line_no}: unknown source generator {g:?}")))?;
        let img = parse_word(&w, target.alphabet()).map_err(|e| Failure::Parse(format!("line {line_no}: {e}")))?;
        slots[gi] = Some(img);
    }
    let missing: Vec<&str> =
        slots.iter().enumerate().filter(|(_, s)| s.is_none()).map(|(i, _)| source.alphabet().name(i)).collect();
    if !missing.is_empty() {
        return Err(Failure::Parse(format!("no image for generators: {}", missing.join(" "))));
    }
    let h = GroupHom::new(source, target.clone(), slots.into_iter().map(Option::unwrap).collect())
        .map_err(|e| Failure::Parse(e.to_string()))?;

    // finite targets go through a coset table, others through completion
    let table = enumerate(&target, budgets)?;
    let result = if table.is_complete() {
        hom_check(&h, &table)
    } else {
        let rs = knuth_bendix(&target, budgets.max_rules, budgets.max_len);
        hom_check(&h, &rs)
    };
    let src = h.source();
    Ok(match result {
        HomCheck::Verified(_) => Outcome::new(
            EXIT_OK,
            format!("verified: {} -> {}", src.name(), target.name()),
            json!({"result": "verified", "source": src.name(), "target": target.name()}),
        ),
        HomCheck::Failed { relator, image } => {
            let rel = src.format(&src.relators()[relator]);
            let img = target.format(&image);
            Outcome::new(
                EXIT_NEGATIVE,
                format!("failed: relator {relator} ({rel}) maps to {img}, which is not trivial"),
                json!({"result": "failed", "relator": relator, "relator_word": rel, "image": img}),
            )
        }
        HomCheck::Undecided { relator, .. } => {
            Outcome::inconclusive(&format!("could not decide the image of relator {relator}"))
        }
    })
}
