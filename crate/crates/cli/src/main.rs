//! `germlab`: command-line front end for the germlab library.
//!
//! Every verb writes one JSON document to stdout and a one-line summary to
//! stderr. Exit codes: 0 answer produced, 1 usage or parse error, 2 resource
//! cap exceeded, 3 internal invariant violated.

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use germlab::ball::DEFAULT_BALL_CAP;
use germlab::contraction::{
    self, nucleus, special_sets, torsion_order, DEFAULT_DEPTH_CAP, DEFAULT_LEVEL_CAP,
    DEFAULT_ORDER_CAP, DEFAULT_SIZE_CAP,
};
use germlab::hausdorff::{
    builtin_certificate, lqa_violation_search, search_nonhausdorff, verify_certificate,
    Certificate, CertificateDocument, SearchBounds,
};
use germlab::level_quotients::{
    is_level_transitive, k1_witness_pair, kernel_ball, properness_witness_check, quotient_group,
    section_formula_check, vertex_stabilizer_gens,
};
use germlab::report::{self, Profile};
use germlab::{activity, registry, Error, Group, GroupSpec, Ray, Word};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "germlab", version, about = "Self-similar groups on rooted trees")]
struct Cli {
    /// Seed for any randomized sampling; all current verbs are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GroupArg {
    /// Group spec file, or `builtin:NAME` (e.g. `builtin:K(00,1)`, `builtin:M(3)`).
    #[arg(long)]
    group: String,
}

#[derive(Args, Clone, Copy)]
struct NucleusCaps {
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,
    #[arg(long, default_value_t = DEFAULT_DEPTH_CAP)]
    depth_cap: usize,
}

#[derive(Args, Clone, Copy)]
struct SearchArgs {
    /// Radius of the ball of elements searched.
    #[arg(long, default_value_t = 1)]
    word_bound: usize,
    #[arg(long, default_value_t = 2)]
    preperiod_bound: usize,
    #[arg(long, default_value_t = 4)]
    period_bound: usize,
    /// Depth to which found certificates are verified.
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
    ball_cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Image of a finite word under an element.
    Eval {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        element: String,
        #[arg(long)]
        word: String,
    },
    /// Section of an element at a vertex.
    Section {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        element: String,
        #[arg(long)]
        word: String,
    },
    /// Decides whether an element is the identity.
    Identity {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        element: String,
    },
    /// Nucleus of a group, certified or reported as over budget.
    Nucleus {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        caps: NucleusCaps,
    },
    /// The sets N0 and N1 inside a certified nucleus.
    SpecialSets {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        caps: NucleusCaps,
    },
    /// Order of an element, or a lower bound when it exceeds the cap.
    Order {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        order_cap: u64,
        #[arg(long, default_value_t = DEFAULT_LEVEL_CAP)]
        level_cap: usize,
    },
    /// Verifies a non-Hausdorff certificate.
    HausdorffVerify {
        #[command(flatten)]
        group: GroupArg,
        /// Certificate file, or `builtin:lemma5.3`, `builtin:lemma5.5:a<i>`, `builtin:thm1.4`.
        #[arg(long)]
        cert: String,
        /// Depth to verify to; defaults to the certificate's own depth (30 for builtins).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Searches a ball for non-Hausdorff certificates.
    HausdorffSearch {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Vertices on which an element is trivial below a vertex where it is not.
    LqaSearch {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 1)]
        word_bound: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
        ball_cap: usize,
    },
    /// Order and transitivity of the action on a level.
    Quotient {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        level: usize,
        /// Allow levels past the default cap.
        #[arg(long)]
        force: bool,
    },
    /// Generators of the stabilizer of a vertex.
    Stabilizer {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        force: bool,
    },
    /// Ball elements trivial on the cylinder over a prefix of a ray.
    KernelBall {
        #[command(flatten)]
        group: GroupArg,
        /// Eventually periodic ray, e.g. `(1)` or `0(01)`.
        #[arg(long)]
        ray: String,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 2)]
        word_bound: usize,
        #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
        ball_cap: usize,
    },
    /// Checks a properness witness pair (g, h) at a level along a ray.
    /// Without `--g`/`--h` the standard pair for `K(1)` is used.
    WitnessCheck {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value = "(1)")]
        ray: String,
        #[arg(long)]
        level: usize,
        #[arg(long, requires = "h")]
        g: Option<String>,
        #[arg(long, requires = "g")]
        h: Option<String>,
    },
    /// Checks the power and section identities of `K(1)`.
    FormulaCheck {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 8)]
        max_level: usize,
    },
    /// Activity counts and growth class of each generator, or of one element.
    Activity {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        element: Option<String>,
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Composite report on a group.
    Report {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, value_enum, default_value_t = ProfileArg::Quick)]
        profile: ProfileArg,
    },
}

/// A failed run, carrying its exit code.
enum Failure {
    Usage(String),
    Cap(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded(_) => Failure::Cap(e.to_string()),
            Error::Invariant(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(Value, String), Failure>;

fn load_group(arg: &GroupArg) -> Result<Group, Failure> {
    let spec = if registry::is_builtin(&arg.group) {
        registry::group(&arg.group)?
    } else {
        GroupSpec::from_json(&read(&arg.group)?)?
    };
    Ok(Group::new(spec)?)
}

fn read(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(Path::new(path)).map_err(|e| Failure::Usage(format!("{path}: {e}")))
}

fn load_certificate(group: &Group, arg: &str, depth: Option<usize>) -> Result<Certificate, Failure> {
    let mut cert = if registry::is_builtin(arg) {
        builtin_certificate(group, registry::certificate(arg)?, depth.unwrap_or(30))?
    } else {
        let doc: CertificateDocument =
            serde_json::from_str(&read(arg)?).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?;
        Certificate::from_document(group, &doc)?
    };
    if let Some(d) = depth {
        cert.depth = d;
    }
    Ok(cert)
}

fn with_group(group: &Group, body: Value) -> Value {
    let mut out = json!({"group": group.spec().family().to_string()});
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    report::tagged(out)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Eval { group, element, word } => {
            let g = load_group(&group)?;
            let e = g.parse(&element)?;
            let w = Word::parse(&word, g.alphabet())?;
            let image = e.apply(&w)?.render(g.alphabet());
            let summary = format!("{element} · {word} = {image}");
            Ok((with_group(&g, json!({"element": element, "word": word, "image": image})), summary))
        }
        Command::Section { group, element, word } => {
            let g = load_group(&group)?;
            let e = g.parse(&element)?;
            let w = Word::parse(&word, g.alphabet())?;
            let s = g.section(&e, &w)?;
            let name = g.render(&s);
            let summary = format!("{element}|_{word} = {name}");
            let body = json!({
                "element": element,
                "word": word,
                "section": name,
                "trivial": s.is_trivial(),
                "states": s.num_states(),
                "root_perm": s.root_perm(),
            });
            Ok((with_group(&g, body), summary))
        }
        Command::Identity { group, element } => {
            let g = load_group(&group)?;
            let check = g.parse(&element)?.is_identity();
            let witness = check.witness.map(|w| w.render(g.alphabet()));
            let summary = match &witness {
                None => format!("{element} is the identity"),
                Some(w) => format!("{element} is not the identity; it moves {w}"),
            };
            let body = json!({"element": element, "is_identity": check.is_identity, "witness": witness});
            Ok((with_group(&g, body), summary))
        }
        Command::Nucleus { group, caps } => {
            let g = load_group(&group)?;
            let n = nucleus(&g, caps.size_cap, caps.depth_cap);
            let summary = format!("nucleus {} ({} elements)", n.status.as_str(), n.elements.len());
            Ok((with_group(&g, report::nucleus_json(&g, &n)), summary))
        }
        Command::SpecialSets { group, caps } => {
            let g = load_group(&group)?;
            let n = nucleus(&g, caps.size_cap, caps.depth_cap);
            if !n.is_certified() {
                return Err(Failure::Cap(format!(
                    "nucleus not certified within size cap {} and depth cap {}",
                    caps.size_cap, caps.depth_cap
                )));
            }
            let s = special_sets(&n)?;
            let summary = format!("|N0| = {}, |N1| = {}", s.n0.len(), s.n1.len());
            Ok((with_group(&g, report::special_sets_json(&g, &s)), summary))
        }
        Command::Order { group, element, order_cap, level_cap } => {
            let g = load_group(&group)?;
            let r = torsion_order(&g.parse(&element)?, order_cap, level_cap);
            let summary = match r {
                contraction::OrderResult::Finite(o) => format!("order of {element} is {o}"),
                contraction::OrderResult::ExceedsCap { lower_bound, .. } => {
                    format!("order of {element} exceeds the cap (at least {lower_bound})")
                }
            };
            let mut body = report::order_json(r);
            body["element"] = json!(element);
            Ok((with_group(&g, body), summary))
        }
        Command::HausdorffVerify { group, cert, depth } => {
            let g = load_group(&group)?;
            let c = load_certificate(&g, &cert, depth)?;
            let r = verify_certificate(&c)?;
            let summary = match r.first_failure() {
                None => format!("certificate verified to depth {}", c.depth),
                Some(l) => format!("certificate fails at level {}", l.level),
            };
            let mut body = report::verification_json(&r);
            body["certificate"] = report::certificate_json(&g, &c);
            Ok((with_group(&g, body), summary))
        }
        Command::HausdorffSearch { group, search } => {
            let g = load_group(&group)?;
            let bounds = SearchBounds {
                word_bound: search.word_bound,
                preperiod_bound: search.preperiod_bound,
                period_bound: search.period_bound,
                depth: search.depth,
            };
            let found = search_nonhausdorff(&g, bounds, search.ball_cap)?;
            let summary = format!("{} certificate(s) found", found.len());
            let certs: Vec<Value> = found.iter().map(|c| report::certificate_json(&g, c)).collect();
            Ok((with_group(&g, json!({"certificates": certs})), summary))
        }
        Command::LqaSearch { group, word_bound, depth, ball_cap } => {
            let g = load_group(&group)?;
            let found = lqa_violation_search(&g, word_bound, depth, ball_cap)?;
            let a = g.alphabet();
            let rows: Vec<Value> = found
                .iter()
                .map(|w| json!({"element": g.render(&w.element), "inner": w.inner.render(a), "outer": w.outer.render(a)}))
                .collect();
            let summary = format!("{} violation(s) found", rows.len());
            Ok((with_group(&g, json!({"violations": rows})), summary))
        }
        Command::Quotient { group, level, force } => {
            let g = load_group(&group)?;
            let q = quotient_group(&g, level, force)?;
            let transitive = is_level_transitive(&g, level, force)?;
            let order = q.order().to_string();
            let summary = format!("level {level} quotient has order {order}; transitive: {transitive}");
            Ok((with_group(&g, json!({"level": level, "order": order, "transitive": transitive})), summary))
        }
        Command::Stabilizer { group, vertex, force } => {
            let g = load_group(&group)?;
            let v = Word::parse(&vertex, g.alphabet())?;
            let s = vertex_stabilizer_gens(&g, &v, force)?;
            let gens: Vec<String> = s.generators.iter().map(|e| g.render(e)).collect();
            let summary = format!("orbit of {vertex} has size {}; {} generator(s)", s.orbit_size, gens.len());
            let body = json!({"vertex": vertex, "orbit_size": s.orbit_size, "generators": gens});
            Ok((with_group(&g, body), summary))
        }
        Command::KernelBall { group, ray, level, word_bound, ball_cap } => {
            let g = load_group(&group)?;
            let z = Ray::parse(&ray, g.alphabet())?;
            let found = kernel_ball(&g, &z, level, word_bound, ball_cap)?;
            let names: Vec<String> = found.iter().map(|e| g.render(e)).collect();
            let summary = format!("{} element(s) trivial on the level-{level} cylinder", names.len());
            let body = json!({"ray": ray, "level": level, "word_bound": word_bound, "elements": names});
            Ok((with_group(&g, body), summary))
        }
        Command::WitnessCheck { group, ray, level, g: gw, h: hw } => {
            let grp = load_group(&group)?;
            let z = Ray::parse(&ray, grp.alphabet())?;
            let (g, h) = match (gw, hw) {
                (Some(g), Some(h)) => (grp.parse(&g)?, grp.parse(&h)?),
                _ => k1_witness_pair(&grp, level)?,
            };
            let (body, summary) = match properness_witness_check(&z, level, &g, &h)? {
                Ok(w) => (report::witness_json(&grp, &w), format!("witness accepted at level {level}")),
                Err(r) => (
                    json!({"level": level, "accepted": false, "rejected_clause": r.clause.as_str()}),
                    r.to_string(),
                ),
            };
            Ok((with_group(&grp, body), summary))
        }
        Command::FormulaCheck { group, max_level } => {
            let g = load_group(&group)?;
            let r = section_formula_check(&g, max_level)?;
            let held = r.rows.iter().filter(|x| x.holds).count();
            let summary = format!("{held} of {} identities hold", r.rows.len());
            let rows: Vec<Value> = r.rows.iter().map(|x| json!({"name": x.name, "holds": x.holds})).collect();
            Ok((with_group(&g, json!({"all_hold": r.all_hold(), "rows": rows})), summary))
        }
        Command::Activity { group, element, levels } => {
            let g = load_group(&group)?;
            let targets: Vec<(String, germlab::Element)> = match element {
                Some(e) => vec![(e.clone(), g.parse(&e)?)],
                None => g.names().iter().cloned().zip(g.generators().iter().cloned()).collect(),
            };
            let mut rows = Vec::new();
            let mut parts = Vec::new();
            for (name, e) in targets {
                let p = activity::profile(&e, levels);
                parts.push(format!("{name}: {}", p.class.name()));
                let mut v = report::activity_json(&p);
                v["element"] = json!(name);
                rows.push(v);
            }
            Ok((with_group(&g, json!({"levels": levels, "profiles": rows})), parts.join(", ")))
        }
        Command::Report { group, profile } => {
            let g = load_group(&group)?;
            let profile = match profile {
                ProfileArg::Quick => Profile::Quick,
                ProfileArg::Full => Profile::Full,
            };
            let doc = report::group_report(&g, profile)?;
            let summary = format!("{}: {}", g.spec().family(), doc["verdict"].as_str().unwrap_or(""));
            Ok((doc, summary))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok((doc, summary)) => {
            let text = serde_json::to_string_pretty(&doc).expect("plain data");
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (1, m),
                Failure::Cap(m) => (2, m),
                Failure::Invariant(m) => (3, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
