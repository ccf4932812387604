use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hlqp::catalog::{self, CatalogEntry, CatalogParams, Instance};
use hlqp::io::{to_dot, to_sorted_json, PcgFile};
use hlqp::search::{classify, enumerate_with};
use hlqp::state::{build_state, ProductBasis};
use hlqp::verify::{success_table, verify_qudit_family, LhvCensus, Verdict, Verifier};
use hlqp::{Colorability, Error, Irreducibility};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "hlqp", version, about = "Build and certify Hardy-like quantum pigeonhole paradoxes")]
struct Cli {
    /// Probability comparison tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Seed for the shot sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Key-sorted JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural validation of a PCG file.
    Validate { file: PathBuf },
    /// Colorability decision with ranks and a witness coloring.
    Check { file: PathBuf },
    /// Condition on Z outcomes, then measure a product observable.
    Simulate {
        file: PathBuf,
        /// Z outcomes, e.g. `1=+1,2=0,3=-1` (`+1` and `0` are the same outcome).
        #[arg(long, allow_hyphen_values = true)]
        condition: Option<String>,
        /// `x:SITES`, `y:SITES` or `z:SITES`, e.g. `x:2,3`.
        #[arg(long)]
        observable: String,
        /// Also draw this many samples from the outcome distribution.
        #[arg(long)]
        shots: Option<usize>,
    },
    /// Full certificate: ranks, classical census, certainties, success event.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = hlqp::pcg::DEFAULT_COLORING_CAP)]
        lhv_cap: usize,
    },
    /// Success probabilities of the loop family against the GHZ-type baselines.
    Table {
        #[arg(long)]
        max_n: usize,
        /// Re-derive the loop column by simulation where feasible.
        #[arg(long)]
        simulate: bool,
    },
    /// Enumerate and classify small PCGs up to relabeling.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_edges: usize,
        /// Edge sizes, `a..b` (inclusive).
        #[arg(long, default_value = "1..6")]
        sizes: String,
        #[arg(long)]
        irreducible_only: bool,
        /// Disable the parallel enumeration.
        #[arg(long)]
        serial: bool,
    },
    /// Built-in instances.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Re-emit a PCG file as canonical JSON, or as Graphviz with `--dot`.
    Export {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    Show {
        id: String,
        /// `key=value` pairs, e.g. `n=7,alpha=0.5`.
        #[arg(long, default_value = "")]
        params: String,
    },
    /// Print the entry as a PCG file.
    Export {
        id: String,
        #[arg(long, default_value = "")]
        params: String,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CrossCheck(_) => 3,
            Error::NotFound(_) => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    if !(cli.tolerance > 0.0 && cli.tolerance < 1.0) {
        return Err(Failure::usage(format!("--tolerance must lie in (0, 1), got {}", cli.tolerance)));
    }
    match &cli.command {
        Command::Validate { file } => validate(cli, file),
        Command::Check { file } => check(cli, file),
        Command::Simulate { file, condition, observable, shots } => {
            simulate(cli, file, condition.as_deref(), observable, *shots)
        }
        Command::Verify { file, lhv_cap } => verify(cli, file, *lhv_cap),
        Command::Table { max_n, simulate } => table(cli, *max_n, *simulate),
        Command::Search { n, max_edges, sizes, irreducible_only, serial } => {
            search(*n, *max_edges, sizes, *irreducible_only, *serial)
        }
        Command::Catalog { action } => catalog_cmd(cli, action),
        Command::Export { file, dot } => export(file, *dot),
    }
}

fn emit(value: &impl serde::Serialize) -> CmdResult {
    println!("{}", to_sorted_json(value)?);
    Ok(())
}

fn load(path: &Path) -> std::result::Result<PcgFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    PcgFile::parse(&text).map_err(|e| Failure::usage(e.to_string()))
}

fn validate(cli: &Cli, path: &Path) -> CmdResult {
    let inst = load(path)?.to_instance()?;
    let report = inst.pcg.validate();
    // State parameters are only meaningful on a structurally valid PCG.
    let state_error = if report.is_valid() {
        build_state(&inst.pcg, inst.alpha, &inst.b_terms).err().map(|e| e.to_string())
    } else {
        None
    };
    let ok = report.is_valid() && state_error.is_none();
    if cli.json {
        emit(&json!({
            "valid": ok,
            "violations": report.violations,
            "state_error": state_error,
        }))?;
    } else if ok {
        println!("valid: n = {}, {} edges", inst.pcg.n(), inst.pcg.edge_count());
    } else {
        for v in &report.violations {
            println!("violation: {v}");
        }
        if let Some(e) = &state_error {
            println!("state: {e}");
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::validation(format!("{} failed validation", path.display())))
    }
}

fn check(cli: &Cli, path: &Path) -> CmdResult {
    let inst = load(path)?.to_instance()?;
    let decision = inst.pcg.is_colorable()?;
    let (rank_a, rank_b) = decision.ranks();
    let irreducible = match inst.pcg.is_irreducible()? {
        Irreducibility::Irreducible => json!(true),
        Irreducibility::Reducible { witness } => json!({ "reducible_witness": witness }),
        Irreducibility::NotApplicable => Value::Null,
    };
    if cli.json {
        return emit(&json!({
            "colorable": decision.is_colorable(),
            "digest": inst.pcg.digest(),
            "irreducible": irreducible,
            "rank_a": rank_a,
            "rank_b": rank_b,
            "witness": decision.witness().map(|w| w.to_string()),
        }));
    }
    match &decision {
        Colorability::Colorable { witness, .. } => {
            println!("colorable: rank(A) = rank(B) = {rank_a}");
            println!("witness: {witness}");
        }
        Colorability::Uncolorable { .. } => {
            println!("un-colorable: rank(A) = {rank_a}, rank(B) = {rank_b}");
            match inst.pcg.is_irreducible()? {
                Irreducibility::Irreducible => println!("irreducible"),
                Irreducibility::Reducible { witness } => println!("reducible, minimal edge subset {witness:?}"),
                Irreducibility::NotApplicable => {}
            }
        }
    }
    Ok(())
}

/// `1=+1,2=0,3=-1`. `+1` and `0` both mean the Z eigenvalue +1 (digit 0);
/// `-1` means digit 1. A bare `1` is rejected as ambiguous.
fn parse_condition(spec: &str) -> std::result::Result<Vec<(usize, u8)>, Failure> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|part| {
            let (site, value) = part
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("condition {part:?} is not SITE=VALUE")))?;
            let site: usize = site
                .trim()
                .parse()
                .map_err(|_| Failure::usage(format!("bad site in condition {part:?}")))?;
            let digit = match value.trim() {
                "+1" | "0" => 0,
                "-1" => 1,
                other => {
                    return Err(Failure::usage(format!(
                        "condition value {other:?} must be +1 (or 0) or -1"
                    )))
                }
            };
            Ok((site, digit))
        })
        .collect()
}

enum Observable {
    Product(ProductBasis, Vec<usize>),
    AllZPlus(Vec<usize>),
}

fn parse_observable(spec: &str) -> std::result::Result<Observable, Failure> {
    let (kind, sites) = spec
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("observable {spec:?} is not KIND:SITES")))?;
    let sites = sites
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| Failure::usage(format!("bad site {s:?} in observable"))))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    match kind.trim().to_ascii_lowercase().as_str() {
        "x" => Ok(Observable::Product(ProductBasis::X, sites)),
        "y" => Ok(Observable::Product(ProductBasis::Y, sites)),
        "z" => Ok(Observable::AllZPlus(sites)),
        other => Err(Failure::usage(format!("observable kind {other:?} must be x, y or z"))),
    }
}

fn simulate(cli: &Cli, path: &Path, condition: Option<&str>, observable: &str, shots: Option<usize>) -> CmdResult {
    let assignment = condition.map(parse_condition).transpose()?.unwrap_or_default();
    let observable = parse_observable(observable)?;
    let inst = load(path)?.to_instance()?;
    let state = build_state(&inst.pcg, inst.alpha, &inst.b_terms)?;
    let projection = state.project_z(&assignment)?;
    let Some(post) = projection.state else {
        if cli.json {
            return emit(&json!({ "condition_probability": 0.0, "outcomes": Value::Null }));
        }
        println!("condition probability: 0");
        return Ok(());
    };

    // Outcome labels and probabilities.
    let (label, outcomes): (String, Vec<(String, f64)>) = match &observable {
        Observable::Product(basis, sites) => {
            let dist = post.product_distribution(sites, *basis)?;
            let name = match basis {
                ProductBasis::X => "X",
                ProductBasis::Y => "Y",
            };
            (
                format!("product of {name} on {sites:?}"),
                vec![("+1".into(), dist.probabilities[0]), ("-1".into(), dist.probabilities[1])],
            )
        }
        Observable::AllZPlus(sites) => {
            let p = post.joint_z_probability(sites, 0)?;
            (format!("Z = +1 on all of {sites:?}"), vec![("yes".into(), p), ("no".into(), (1.0 - p).max(0.0))])
        }
    };

    let counts = match shots {
        None => None,
        Some(0) => return Err(Failure::usage("--shots must be positive")),
        Some(k) => {
            let weights: Vec<f64> = outcomes.iter().map(|(_, p)| *p).collect();
            let dist = WeightedIndex::new(&weights).map_err(|e| Failure::validation(format!("sampler: {e}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut counts: BTreeMap<String, usize> = outcomes.iter().map(|(l, _)| (l.clone(), 0)).collect();
            for _ in 0..k {
                *counts.get_mut(&outcomes[dist.sample(&mut rng)].0).expect("known label") += 1;
            }
            Some(counts)
        }
    };

    if cli.json {
        let probs: BTreeMap<&str, f64> = outcomes.iter().map(|(l, p)| (l.as_str(), *p)).collect();
        return emit(&json!({
            "condition_probability": projection.probability,
            "counts": counts,
            "observable": label,
            "probabilities": probs,
            "seed": counts.as_ref().map(|_| cli.seed),
        }));
    }
    println!("condition probability: {:.12}", projection.probability);
    println!("{label}:");
    for (l, p) in &outcomes {
        println!("  {l}: {p:.12}");
    }
    if let Some(c) = counts {
        println!("samples (seed {}):", cli.seed);
        for (l, n) in c {
            println!("  {l}: {n}");
        }
    }
    Ok(())
}

fn verify(cli: &Cli, path: &Path, lhv_cap: usize) -> CmdResult {
    let inst = load(path)?.to_instance()?;
    let cert = Verifier { lhv_cap, tolerance: cli.tolerance }.verify(&inst.pcg, inst.alpha, &inst.b_terms)?;
    if cli.json {
        return emit(&cert);
    }
    println!("instance {} (n = {}, {} edges)", cert.instance.digest, cert.instance.n, cert.instance.edges.len());
    println!("rank(A) = {}, rank(B) = {}", cert.rank_a, cert.rank_b);
    match &cert.lhv_census {
        LhvCensus::Complete { total, satisfying } => println!("classical census: {satisfying} of {total} assignments satisfy every constraint"),
        LhvCensus::Skipped { n, cap } => println!("classical census skipped: n = {n} exceeds cap {cap}"),
    }
    for c in &cert.hardy_checks {
        println!(
            "edge {} {:?}: P(product = {:+}) = {:.12} (condition probability {:.6})",
            c.edge, c.vertices, c.required_eigenvalue, c.probability, c.condition_probability
        );
    }
    println!("success probability: {:.12} on sites {:?}", cert.success.simulated, cert.success.sites);
    match &cert.verdict {
        Verdict::Paradox => println!("verdict: paradox"),
        Verdict::NoParadox(reason) => println!("verdict: no paradox ({reason:?})"),
    }
    Ok(())
}

fn table(cli: &Cli, max_n: usize, simulate: bool) -> CmdResult {
    let rows = success_table(max_n, simulate)?;
    if cli.json {
        return emit(&rows);
    }
    println!("{:>4} {:>14} {:>14} {:>14} {:>14}", "n", "P_L", "P_G", "P_S", "P_L (sim)");
    for r in &rows {
        let sim = r.p_loop_simulated.map_or_else(|| "-".to_string(), |p| format!("{p:.10}"));
        println!("{:>4} {:>14.10} {:>14.10} {:>14.10} {:>14}", r.n, r.p_loop, r.p_generalized, r.p_standard, sim);
    }
    Ok(())
}

fn parse_sizes(spec: &str) -> std::result::Result<RangeInclusive<usize>, Failure> {
    let bad = || Failure::usage(format!("--sizes {spec:?} must look like a..b"));
    let (a, b) = spec.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn search(n: usize, max_edges: usize, sizes: &str, irreducible_only: bool, serial: bool) -> CmdResult {
    let sizes = parse_sizes(sizes)?;
    let pcgs = enumerate_with(n, max_edges, sizes, !serial)?;
    let mut census = classify(&pcgs)?;
    if irreducible_only {
        census.instances.retain(|c| c.irreducible);
    }
    emit(&census)
}

fn catalog_entry(id: &str, params: &str) -> std::result::Result<CatalogEntry, Failure> {
    let params = CatalogParams::parse(params).map_err(|e| Failure::usage(e.to_string()))?;
    Ok(catalog::get(id, &params)?)
}

fn catalog_cmd(cli: &Cli, action: &CatalogAction) -> CmdResult {
    match action {
        CatalogAction::List => {
            let entries = catalog::IDS
                .iter()
                .map(|id| catalog::get(id, &CatalogParams::default()))
                .collect::<hlqp::Result<Vec<_>>>()?;
            if cli.json {
                let list: Vec<Value> =
                    entries.iter().map(|e| json!({ "id": e.id, "description": e.description })).collect();
                return emit(&list);
            }
            for e in entries {
                println!("{:<18} {}", e.id, e.description);
            }
            Ok(())
        }
        CatalogAction::Show { id, params } => {
            let entry = catalog_entry(id, params)?;
            let detail = match &entry.instance {
                Instance::Pcg(p) => json!({
                    "kind": "pcg",
                    "pcg": p.pcg.to_string(),
                    "validation": p.pcg.validate(),
                }),
                Instance::Qudit { d } => json!({
                    "kind": "qudit",
                    "certificate": verify_qudit_family(*d)?,
                }),
                Instance::PrePost(f) => {
                    let checks: Vec<Value> = f
                        .checks
                        .iter()
                        .map(|(w, s)| {
                            hlqp::state::pps_amplitude(&f.pre, &f.post, w, *s)
                                .map(|a| json!({ "word": w.to_string(), "sign": s, "magnitude": a.norm() }))
                        })
                        .collect::<hlqp::Result<_>>()?;
                    json!({ "kind": "pre_post", "pre": f.pre.to_string(), "post": f.post.to_string(), "checks": checks })
                }
            };
            let out = json!({
                "id": entry.id,
                "description": entry.description,
                "params": entry.params,
                "expected": entry.expected,
                "instance": detail,
            });
            if cli.json {
                return emit(&out);
            }
            println!("{}: {}", entry.id, entry.description);
            for (k, v) in &entry.params {
                println!("  {k} = {v}");
            }
            println!("{}", to_sorted_json(&out["instance"])?);
            Ok(())
        }
        CatalogAction::Export { id, params } => {
            let entry = catalog_entry(id, params)?;
            let inst = entry.pcg_instance().ok_or_else(|| {
                Failure::from(Error::Unsupported(format!("{id} is not a PCG instance and has no file form")))
            })?;
            println!("{}", PcgFile::from_instance(inst).to_json());
            Ok(())
        }
    }
}

fn export(path: &Path, dot: bool) -> CmdResult {
    let file = load(path)?;
    if dot {
        print!("{}", to_dot(&file.to_instance()?.pcg));
    } else {
        println!("{}", PcgFile::from_instance(&file.to_instance()?).to_json());
    }
    Ok(())
}
