use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use residua_core::dot::{boundary_dot, hasse_dot};
use residua_core::generators::{self, CayleyTable, GeneratorSpec};
use residua_core::laws::{self, Budget, LawReport, Verdict};
use residua_core::order::{as_lattice, FiniteLattice, PosetDocument};
use residua_core::residual::{self, EffectiveLattice, Family, ResidualProfile};
use residua_core::testbed::{self, OrdinalVector};
use residua_core::topology::{self, FiniteTopology, TopologyDocument};

#[derive(Parser)]
#[command(
    name = "residua",
    version,
    about = "Residual derivatives, cores and Cantor–Bendixson layers of lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Residual profiles of the elements of a lattice.
    Analyze(AnalyzeArgs),
    /// Check the residual-calculus laws on a lattice.
    Laws(LawsArgs),
    /// Cantor–Bendixson layers of a finite space, or the dual Lawson topology of a lattice.
    Topology(TopologyArgs),
    /// The ordinal-vector coframe: profiles, isolation and layers.
    Testbed(TestbedArgs),
    /// Subgroup lattice and Frattini subgroup of a finite group.
    Group(GroupArgs),
    /// Ideal lattice and Jacobson radical of the integers modulo n.
    Ring(RingArgs),
}

#[derive(Args)]
struct Source {
    /// Generator spec such as `divisor:60` or `random:seed=7,size=50`.
    #[arg(long, conflicts_with = "input")]
    gen: Option<String>,
    /// Lattice document `{"elements", "relation", "mode"}`.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    output: Output,
    /// `all`, `t0`, or a comma-separated list of element names.
    #[arg(long, default_value = "all")]
    family: String,
    /// Analyze only this element.
    #[arg(long)]
    element: Option<String>,
    /// Also write the lattice in canonical document form.
    #[arg(long)]
    emit_lattice: Option<PathBuf>,
}

#[derive(Args)]
struct LawsArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    output: Output,
    /// `all` or a comma-separated list of law names.
    #[arg(long, default_value = "all")]
    laws: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = Budget::default().samples)]
    samples: usize,
    #[arg(long, default_value_t = Budget::default().max_checks)]
    max_checks: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "RESIDUA_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Include elapsed times in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct TopologyArgs {
    /// Generator spec of a lattice whose dual Lawson topology is examined.
    #[arg(long, conflicts_with = "input")]
    gen: Option<String>,
    /// Space document `{"points", "subbase"}`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TestbedArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    dims: u8,
    #[arg(long, default_value_t = 8)]
    bound: u32,
    /// Vector such as `3,inf`.
    #[arg(long)]
    element: Option<String>,
    /// With `--element`, a dually compact vector above it for the isolation-from-above clauses.
    #[arg(long, requires = "element")]
    above: Option<String>,
    /// Report the Cantor–Bendixson layers and check them against the subspace oracle.
    #[arg(long)]
    cb: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GroupArgs {
    /// Catalog name: S3, D4, Q8, A4, Z2xZ4, Z2^3 or Z<n>.
    #[arg(long, conflicts_with = "input")]
    name: Option<String>,
    /// Cayley table document `{"order", "identity", "table"}`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RingArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=1_000_000))]
    n: u64,
    #[command(flatten)]
    output: Output,
}

/// Input and usage problems; reported with exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<bool, InputError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Laws(a) => run_laws(a),
        Command::Topology(a) => run_topology(a),
        Command::Testbed(a) => run_testbed(a),
        Command::Group(a) => run_group(a),
        Command::Ring(a) => run_ring(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn canonical(v: &Value) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("values serialize");
    text.push('\n');
    text
}

fn emit(output: &Output, text: &str) -> Result<(), InputError> {
    match &output.report {
        Some(path) => {
            fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read(path: &PathBuf) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load(source: &Source) -> Result<(FiniteLattice, String), InputError> {
    match (&source.gen, &source.input) {
        (Some(spec), None) => {
            let parsed: GeneratorSpec = spec.parse()?;
            Ok((generators::generate(&parsed)?, parsed.to_string()))
        }
        (None, Some(path)) => {
            let doc = PosetDocument::from_json(&read(path)?)?;
            Ok((as_lattice(doc.build()?)?, path.display().to_string()))
        }
        _ => Err(InputError(
            "exactly one of --gen and --input is required".into(),
        )),
    }
}

fn element(l: &FiniteLattice, name: &str) -> Result<usize, InputError> {
    l.index_of(name)
        .ok_or_else(|| InputError(format!("unknown element `{name}`")))
}

fn family(l: &FiniteLattice, selector: &str) -> Result<Family<usize>, InputError> {
    match selector {
        "all" => Ok(Family::All),
        "t0" => Ok(Family::Members(residual::t0_members(l).expect("finite"))),
        list => Ok(Family::Members(
            list.split(',')
                .map(|n| element(l, n.trim()))
                .collect::<Result<BTreeSet<_>, _>>()?,
        )),
    }
}

fn profile_text(l: &FiniteLattice, p: &ResidualProfile<usize>) -> String {
    let names = |items: &[usize]| {
        let v: Vec<&str> = items.iter().map(|&i| l.name(i)).collect();
        format!("{{{}}}", v.join(", "))
    };
    let strata: Vec<String> = p.strata.iter().map(|s| names(s)).collect();
    format!(
        "{}: M = {}, mu = {}, rank = {}, core = {}, boundary = {}, strata = [{}]\n",
        l.name(p.element),
        names(&p.maximal),
        l.name(p.mu),
        p.rank,
        l.name(p.core),
        l.name(p.boundary),
        strata.join(", ")
    )
}

fn analyze(a: AnalyzeArgs) -> Outcome {
    let (l, instance) = load(&a.source)?;
    if let Some(path) = &a.emit_lattice {
        fs::write(path, l.poset().to_document().to_canonical_json())?;
    }
    let h = family(&l, &a.family)?;
    let targets: Vec<usize> = match &a.element {
        Some(name) => vec![element(&l, name)?],
        None => (0..l.len()).collect(),
    };
    let mut profiles = Vec::new();
    for &x in &targets {
        match residual::residual_profile(&l, x, &h) {
            Ok(p) => profiles.push(p),
            Err(e) => {
                eprintln!("invariant violated at {}: {e}", l.name(x));
                return Ok(false);
            }
        }
    }
    let text = match a.output.format {
        Format::Json => canonical(&json!({
            "instance": instance,
            "elements": l.len(),
            "distributive": l.is_distributive(),
            "family": a.family,
            "profiles": profiles.iter().map(|p| p.to_json(|e| l.name(e).to_string())).collect::<Vec<_>>(),
        })),
        Format::Text => profiles.iter().map(|p| profile_text(&l, p)).collect(),
        Format::Dot => match (&a.element, profiles.first()) {
            (Some(_), Some(p)) => boundary_dot(&l, p),
            _ => hasse_dot(&l),
        },
    };
    emit(&a.output, &text)?;
    Ok(true)
}

fn run_laws(a: LawsArgs) -> Outcome {
    if a.output.format == Format::Dot {
        return Err(InputError("laws reports are json or text".into()));
    }
    let (l, instance) = load(&a.source)?;
    let selection = laws::parse_selection(&a.laws)?;
    let budget = Budget {
        max_checks: a.max_checks,
        samples: a.samples,
        seed: a.seed,
        ..Budget::default()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()?;
    let mut reports: Vec<LawReport> =
        pool.install(|| laws::run_selected(&l, &selection, &budget))?;
    for r in &mut reports {
        r.instance = instance.clone();
    }
    let ok = !reports.iter().any(LawReport::is_fail);
    let text = match a.output.format {
        Format::Text => reports
            .iter()
            .map(|r| match &r.verdict {
                Verdict::Pass => format!("PASS {} ({} checked)\n", r.law, r.checked),
                Verdict::Skipped { reason } => format!("SKIP {} ({reason})\n", r.law),
                Verdict::Fail { witness } => format!(
                    "FAIL {} at [{}]: {}\n",
                    r.law,
                    witness.elements.join(", "),
                    witness.detail
                ),
            })
            .collect(),
        _ => canonical(&Value::Array(
            reports.iter().map(|r| r.to_json(a.timing)).collect(),
        )),
    };
    emit(&a.output, &text)?;
    Ok(ok)
}

fn verdict_json(r: &Result<(), String>) -> Value {
    match r {
        Ok(()) => json!("pass"),
        Err(msg) => json!({ "fail": msg }),
    }
}

fn run_topology(a: TopologyArgs) -> Outcome {
    let (report, ok, dot) = match (&a.gen, &a.input) {
        (Some(spec), None) => {
            let parsed: GeneratorSpec = spec.parse()?;
            let l = generators::generate(&parsed)?;
            let t = topology::dual_lawson(&l);
            let compat = topology::check_order_compatible(&l, &t)?;
            let cb = t.cb_sequence(&residua_core::order::ElementSet::full(l.len()));
            let report = json!({
                "instance": parsed.to_string(),
                "points": l.len(),
                "discrete": t.is_discrete(),
                "cb": cb.to_json(),
                "order_compatible": {
                    "monotone_limits": verdict_json(&compat.monotone_limits),
                    "join_continuous": verdict_json(&compat.join_continuous),
                    "order_closed": verdict_json(&compat.order_closed),
                },
            });
            (report, compat.all_pass(), Some(hasse_dot(&l)))
        }
        (None, Some(path)) => {
            let doc: TopologyDocument = serde_json::from_str(&read(path)?)?;
            let t = FiniteTopology::from_document(&doc)?;
            let cb = t.cb_sequence(&residua_core::order::ElementSet::full(t.points()));
            let (agreement, ok) = if t.is_t1() {
                let rows = topology::residual_equals_cb_closedsets(&t)?;
                let mismatches: Vec<Value> = rows
                    .iter()
                    .filter(|r| !r.agrees())
                    .map(|r| json!({ "set": r.set.to_vec(), "mu": r.mu.to_vec(), "derived": r.derived.to_vec() }))
                    .collect();
                let ok = mismatches.is_empty();
                (
                    json!({ "closed_sets": rows.len(), "mismatches": mismatches }),
                    ok,
                )
            } else {
                (Value::Null, true)
            };
            let report = json!({
                "instance": path.display().to_string(),
                "points": t.points(),
                "t1": t.is_t1(),
                "discrete": t.is_discrete(),
                "cb": cb.to_json(),
                "closed_set_agreement": agreement,
            });
            (report, ok, None)
        }
        _ => {
            return Err(InputError(
                "exactly one of --gen and --input is required".into(),
            ))
        }
    };
    let text = match a.output.format {
        Format::Json => canonical(&report),
        Format::Text => format!("{report}\n"),
        Format::Dot => dot.ok_or_else(|| InputError("dot output needs --gen".into()))?,
    };
    emit(&a.output, &text)?;
    Ok(ok)
}

fn run_testbed(a: TestbedArgs) -> Outcome {
    if a.output.format == Format::Dot {
        return Err(InputError("testbed reports are json or text".into()));
    }
    let dims = a.dims as usize;
    let tb = testbed::Testbed::new(dims, a.bound)?;
    let mut report = serde_json::Map::new();
    report.insert("dims".into(), json!(dims));
    report.insert("bound".into(), json!(a.bound));
    let mut ok = true;
    if let Some(text) = &a.element {
        let x = tb.parse(text)?;
        let oracle_bound = a.bound.max(x.max_finite().map_or(2, |v| v + 2));
        let verdict = testbed::isolated_oracle(&x, oracle_bound)?;
        let predicates = testbed::characterization_predicates(&x);
        ok &= predicates.corrected == verdict.is_isolated();
        let mut entry = json!({
            "profile": testbed::testbed_profile(&x, a.bound as usize).to_json(),
            "dually_compact": testbed::dually_compact(&x),
            "cb_level": testbed::cb_level(&x),
            "isolated": verdict,
            "oracle_bound": oracle_bound,
            "predicates": predicates,
        });
        if let Some(ztext) = &a.above {
            let z: OrdinalVector = tb.parse(ztext)?;
            let above = testbed::check_s1s2_above(&x, &z, a.bound)?;
            ok &= above.all_pass();
            entry["above"] = serde_json::to_value(&above)?;
        }
        report.insert("element".into(), entry);
    } else {
        let sweep = testbed::characterization_sweep(dims, a.bound)?;
        ok &= sweep.corrected_matches();
        report.insert("characterization".into(), serde_json::to_value(&sweep)?);
    }
    if a.cb {
        let mut levels = Vec::new();
        for alpha in 0..=dims + 1 {
            let patterns = testbed::cb_level_pattern(dims, alpha)?;
            levels.push(json!({ "alpha": alpha, "patterns": patterns }));
        }
        let mismatches = testbed::verify_cb_ladder(dims, a.bound)?;
        ok &= mismatches.is_empty();
        let mismatches: Vec<Value> = mismatches
            .iter()
            .map(|(alpha, x)| json!({ "alpha": alpha, "element": x }))
            .collect();
        report.insert(
            "cb".into(),
            json!({ "levels": levels, "mismatches": mismatches }),
        );
    }
    let report = Value::Object(report);
    let text = match a.output.format {
        Format::Text => format!("{report}\n"),
        _ => canonical(&report),
    };
    emit(&a.output, &text)?;
    Ok(ok)
}

fn run_group(a: GroupArgs) -> Outcome {
    let c = match (&a.name, &a.input) {
        (Some(name), None) => CayleyTable::catalog(name)?,
        (None, Some(path)) => {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            CayleyTable::from_json(&stem, &read(path)?)?
        }
        _ => {
            return Err(InputError(
                "exactly one of --name and --input is required".into(),
            ))
        }
    };
    let (lattice, subs) = generators::subgroup_lattice(&c)?;
    let (phi, ok) = match generators::frattini(&c) {
        Ok(mask) => (json!(c.subgroup_name(mask)), true),
        Err(e) => (json!({ "mismatch": e.to_string() }), false),
    };
    let top = lattice.top();
    let maximal: Vec<String> = EffectiveLattice::maximal_subelements(&lattice, top)
        .into_iter()
        .map(|i| c.subgroup_name(subs[i]))
        .collect();
    let report = json!({
        "group": c.name,
        "order": c.order,
        "subgroups": subs.iter().map(|&h| c.subgroup_name(h)).collect::<Vec<_>>(),
        "maximal_subgroups": maximal,
        "frattini": phi,
    });
    let text = match a.output.format {
        Format::Json => canonical(&report),
        Format::Text => format!("{report}\n"),
        Format::Dot => hasse_dot(&lattice),
    };
    emit(&a.output, &text)?;
    Ok(ok)
}

fn run_ring(a: RingArgs) -> Outcome {
    let (lattice, gens) = generators::ideal_lattice_zn(a.n)?;
    let (jacobson, ok) = match generators::jacobson_zn(a.n) {
        Ok(d) => (json!(format!("({d})")), true),
        Err(e) => (json!({ "mismatch": e.to_string() }), false),
    };
    let top = lattice.top();
    let maximal: Vec<String> = EffectiveLattice::maximal_subelements(&lattice, top)
        .into_iter()
        .map(|i| format!("({})", gens[i]))
        .collect();
    let report = json!({
        "n": a.n,
        "ideals": gens.iter().map(|d| format!("({d})")).collect::<Vec<_>>(),
        "maximal_ideals": maximal,
        "jacobson": jacobson,
    });
    let text = match a.output.format {
        Format::Json => canonical(&report),
        Format::Text => format!("{report}\n"),
        Format::Dot => hasse_dot(&lattice),
    };
    emit(&a.output, &text)?;
    Ok(ok)
}
