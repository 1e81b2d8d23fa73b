use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use boxlab::boxspace::{self, BoxSpace, DAlphaParams, Filtration, KConstant};
use boxlab::cayley::{CayleyGraph, GraphMetrics, MetricsConfig, CHEEGER_MAX_ORDER, DEFAULT_MAX_VERTICES};
use boxlab::census::{self, SubgroupCensus};
use boxlab::coarse::{self, VolumeSequence};
use boxlab::groups::GroupSpec;
use boxlab::report::{self, VerifyConfig};
use boxlab::wreath::{self, LampBijection, WreathMap};
use boxlab::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug, Serialize)]
#[command(name = "boxlab", version, about = "Finite quotients, Cayley graphs and box spaces")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Common {
    /// Vertex budget per Cayley graph; BOXLAB_MAX_VERTICES overrides the default.
    #[arg(long, global = true, env = "BOXLAB_MAX_VERTICES", default_value_t = DEFAULT_MAX_VERTICES)]
    max_vertices: u64,
    /// Largest order for exhaustive Cheeger enumeration.
    #[arg(long, global = true, default_value_t = CHEEGER_MAX_ORDER)]
    cheeger_max: usize,
    /// Largest order for the spectral gap.
    #[arg(long, global = true, default_value_t = 5000)]
    spectral_max: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Build one Cayley graph and write its edge list (or JSON envelope).
    Quotient(GroupArgs),
    /// Invariants of one Cayley graph.
    Metrics(GroupArgs),
    /// Components of a box space with D_α and expansion verdicts.
    Boxspace(BoxArgs),
    /// Fit diam ≈ K·order^α over a box space.
    Dalpha(DalphaArgs),
    /// Ratio-bounded matching between two volume sequences.
    Distinguish(DistinguishArgs),
    /// Subgroup counts a_n and s_n.
    Count(CountArgs),
    /// Check that a lamp bijection induces an isometry of wreath products.
    Isometry(IsometryArgs),
    /// Quasi-isometry constants of the full box space of ℤ×ℤ/2.
    Fullbox(FullboxArgs),
    /// Run every acceptance check.
    VerifyAll(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
struct GroupArgs {
    /// cyclic, sol, sl, lamplighter, heisenberg, wreath, zxz2
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    modulus: Option<u64>,
    #[arg(long)]
    m: Option<u32>,
    /// Lamplighter level.
    #[arg(long)]
    k: Option<u64>,
    /// Lamp group for wreath: z2, z4, z2xz2.
    #[arg(long)]
    lamp: Option<String>,
    /// Subgroup kind for zxz2: full, plain, twisted.
    #[arg(long)]
    kind: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct BoxArgs {
    /// e.g. sol:5^k, lamplighter, z:3/2, sl:2,3, zxz2:plain, wreath:z4
    #[arg(long)]
    schedule: String,
    #[arg(long)]
    kmax: usize,
    /// Exponent as "a/b".
    #[arg(long, default_value = "1")]
    alpha: String,
    /// Constant K as "a/b"; the measured minimum ratio when absent.
    #[arg(long = "K")]
    k_const: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct DalphaArgs {
    #[arg(long)]
    schedule: String,
    #[arg(long)]
    kmax: usize,
}

#[derive(Args, Debug, Serialize)]
struct DistinguishArgs {
    /// Slope s of N_k(s) = ⌊k^s⌋·k!; give twice.
    #[arg(long, num_args = 1)]
    nks: Vec<String>,
    /// "m,p" for |SL_m(ℤ/p^k)|; give twice.
    #[arg(long, num_args = 1)]
    sl: Vec<String>,
    /// Explicit comma-separated sequence; give twice.
    #[arg(long, num_args = 1)]
    seq: Vec<String>,
    #[arg(long, default_value_t = 8)]
    disp: u64,
    /// "a/b" or "2^e".
    #[arg(long, default_value = "2^16")]
    ratio: String,
    #[arg(long, default_value_t = 200)]
    horizon: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CountGroup {
    Z,
    Z2,
    Z2d4,
    Zxz2,
}

#[derive(Args, Debug, Serialize)]
struct CountArgs {
    #[arg(long, value_enum)]
    group: CountGroup,
    #[arg(long)]
    max: u64,
    /// Compare the closed form with an independent oracle.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug, Serialize)]
struct IsometryArgs {
    #[arg(long)]
    n: u32,
    /// Lamp bijection ℤ/4 → (ℤ/2)² as four comma-separated codes.
    #[arg(long, default_value = "0,1,2,3")]
    table: String,
    /// Also exchange lamp positions "i,j".
    #[arg(long)]
    swap: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct FullboxArgs {
    #[arg(long, default_value = "zxz2")]
    group: String,
    #[arg(long, default_value_t = 200)]
    max: u64,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    quick: bool,
}

/// A failure carrying its exit code.
enum Failure {
    Lib(Error),
    Io(io::Error),
    /// The computation finished but a checked claim does not hold.
    Finding(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Budget { .. } | Error::PartialResult { .. }) => 2,
            Failure::Lib(Error::Verification(_)) | Failure::Finding(_) => 3,
            Failure::Lib(_) | Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(e) => format!("i/o error: {e}"),
            Failure::Finding(m) => format!("verification failed: {m}"),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("boxlab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let c = &cli.common;
    if c.max_vertices == 0 || c.cheeger_max == 0 || c.tol.is_nan() || c.tol <= 0.0 {
        return Err(Error::InvalidInput("budgets and tolerance must be positive".into()).into());
    }
    let config = serde_json::to_value(cli)?;
    match &cli.command {
        Command::Quotient(a) => cmd_quotient(c, a, config),
        Command::Metrics(a) => cmd_metrics(c, a, config),
        Command::Boxspace(a) => cmd_boxspace(c, a, config),
        Command::Dalpha(a) => cmd_dalpha(c, a, config),
        Command::Distinguish(a) => cmd_distinguish(c, a, config),
        Command::Count(a) => cmd_count(c, a, config),
        Command::Isometry(a) => cmd_isometry(c, a, config),
        Command::Fullbox(a) => cmd_fullbox(c, a, config),
        Command::VerifyAll(a) => cmd_verify_all(c, a, config),
    }
}

fn sink(c: &Common) -> io::Result<Box<dyn Write>> {
    Ok(match &c.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json(c: &Common, v: &Value) -> Outcome {
    let mut w = sink(c)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn metrics_config(c: &Common) -> MetricsConfig {
    MetricsConfig { spectral_max: c.spectral_max, cheeger_max: c.cheeger_max, tol: c.tol }
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidInput(format!("family {family} needs --{flag}")))
}

fn group_spec(a: &GroupArgs) -> Result<GroupSpec, Error> {
    let f = a.family.as_str();
    let modulus = || need(a.modulus.or(a.n), "modulus", f);
    match f {
        "cyclic" => GroupSpec::from_parts("cyclic", &[need(a.n.or(a.modulus), "n", f)?]),
        "sol" => GroupSpec::from_parts("sol", &[modulus()?]),
        "heisenberg" => GroupSpec::from_parts("heisenberg", &[modulus()?]),
        "sl" => GroupSpec::from_parts("sl", &[a.m.unwrap_or(2) as u64, modulus()?]),
        "lamplighter" => GroupSpec::from_parts("lamplighter", &[need(a.k, "k", f)?]),
        "wreath" => {
            let lamp = a.lamp.as_deref().unwrap_or("z2");
            GroupSpec::from_parts(&format!("wreath-{lamp}"), &[need(a.n, "n", f)?])
        }
        "zxz2" => {
            let kind = a.kind.as_deref().unwrap_or("full");
            GroupSpec::from_parts(&format!("zxz2-{kind}"), &[need(a.n, "n", f)?])
        }
        other => GroupSpec::from_parts(other, &a.n.into_iter().collect::<Vec<_>>()),
    }
}

fn cmd_quotient(c: &Common, a: &GroupArgs, config: Value) -> Outcome {
    let spec = group_spec(a)?;
    let g = CayleyGraph::build(&spec, c.max_vertices)?;
    match c.format {
        Format::Json => {
            let mut env = serde_json::to_value(g.envelope())?;
            env["config"] = config;
            emit_json(c, &env)
        }
        Format::Csv => {
            let mut w = sink(c)?;
            g.write_edge_list(&mut w)?;
            w.flush()?;
            if c.out.is_some() {
                let summary = json!({"config": config, "spec": spec, "order": g.order(), "degree": g.degree()});
                println!("{}", serde_json::to_string_pretty(&summary)?);
            }
            Ok(())
        }
    }
}

fn cmd_metrics(c: &Common, a: &GroupArgs, config: Value) -> Outcome {
    let spec = group_spec(a)?;
    let g = CayleyGraph::build(&spec, c.max_vertices)?;
    let m = GraphMetrics::compute(&g, &metrics_config(c))?;
    match c.format {
        Format::Json => emit_json(c, &json!({"config": config, "metrics": m})),
        Format::Csv => write_csv(c, &[m], &boxspace::rational(1, 1)),
    }
}

fn write_csv(c: &Common, metrics: &[GraphMetrics], alpha: &num_rational::BigRational) -> Outcome {
    let mut w = sink(c)?;
    boxspace::write_metrics_csv(&mut w, metrics, alpha)?;
    w.flush()?;
    Ok(())
}

fn cmd_boxspace(c: &Common, a: &BoxArgs, config: Value) -> Outcome {
    let f: Filtration = a.schedule.parse()?;
    let alpha = boxspace::parse_rational(&a.alpha)?;
    let space = BoxSpace::assemble(&f, a.kmax, c.max_vertices, &metrics_config(c))?;
    let k = match &a.k_const {
        Some(k) => KConstant::Exact(boxspace::parse_rational(k)?),
        None => KConstant::Real(boxspace::measured_k(&space.components, &alpha)),
    };
    let check = boxspace::dalpha_check(&space.components, &DAlphaParams::new(alpha.clone(), k)?);
    let expansion = boxspace::expansion_report(&space.components);
    if c.format == Format::Csv {
        write_csv(c, &space.components, &alpha)?;
    } else {
        emit_json(
            c,
            &json!({
                "config": config,
                "filtration": space.filtration,
                "components": space.components,
                "offsets": space.offsets,
                "diam_over_order_alpha": boxspace::diam_over_order_alpha(&space.components, ratio_f64(&alpha)),
                "dalpha": check,
                "expansion": expansion,
            }),
        )?;
    }
    if !check.verdict {
        return Err(Failure::Finding(format!("D_{} fails with K = {}", check.alpha, check.k)));
    }
    Ok(())
}

fn ratio_f64(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn cmd_dalpha(c: &Common, a: &DalphaArgs, config: Value) -> Outcome {
    let f: Filtration = a.schedule.parse()?;
    let cfg = MetricsConfig { spectral_max: 0, cheeger_max: 0, tol: c.tol };
    let space = BoxSpace::assemble(&f, a.kmax, c.max_vertices, &cfg)?;
    let est = boxspace::dalpha_estimate(&space.components)?;
    let points: Vec<Value> =
        space.components.iter().map(|m| json!({"order": m.order, "diameter": m.diameter})).collect();
    emit_json(c, &json!({"config": config, "filtration": space.filtration, "points": points, "estimate": est}))
}

fn volume_pair(a: &DistinguishArgs) -> Result<(VolumeSequence, VolumeSequence), Error> {
    let given: Vec<VolumeSequence> = a
        .nks
        .iter()
        .map(|s| format!("nks:{s}").parse())
        .chain(a.sl.iter().map(|s| format!("sl:{s}").parse()))
        .chain(a.seq.iter().map(|s| VolumeSequence::parse_list(s)))
        .collect::<Result<_, Error>>()?;
    match <[VolumeSequence; 2]>::try_from(given) {
        Ok([x, y]) => Ok((x, y)),
        Err(v) => Err(Error::InvalidInput(format!("need exactly two sequences, got {}", v.len()))),
    }
}

fn cmd_distinguish(c: &Common, a: &DistinguishArgs, config: Value) -> Outcome {
    let (x, y) = volume_pair(a)?;
    let r = coarse::parse_ratio_bound(&a.ratio)?;
    let xs = x.terms(a.horizon)?;
    let ys = y.terms(a.horizon)?;
    let verdict = coarse::ratio_bounded_matching(&xs, &ys, a.disp, &r, a.horizon)?;
    if !coarse::verify_verdict(&xs, &ys, &verdict) {
        return Err(Error::Verification("matching certificate does not re-verify".into()).into());
    }
    emit_json(
        c,
        &json!({"config": config, "a": x.to_string(), "b": y.to_string(), "verdict": verdict.label(), "certificate": verdict}),
    )
}

fn sqrt_bounds(census: &SubgroupCensus) -> bool {
    (1..=census.max_n).all(|n| {
        let s = census.s_n(n).unwrap_or(0) as f64;
        let r = (n as f64).sqrt();
        r <= s && s <= 10.0 * r
    })
}

fn cmd_count(c: &Common, a: &CountArgs, config: Value) -> Outcome {
    let mut extra = json!({});
    let mut failure = None;
    let census = match a.group {
        CountGroup::Z => census::census_z(a.max),
        CountGroup::Z2 => {
            let closed = census::census_z2_sigma(a.max)?;
            if a.oracle {
                let agree = census::census_z2_lattices(a.max).a == closed.a;
                extra = json!({"oracle_agrees": agree});
                if !agree {
                    failure = Some("σ(n) differs from the lattice count".to_string());
                }
            }
            closed
        }
        CountGroup::Z2d4 => {
            let closed = census::census_z2d4_closedform(a.max);
            let bounds = sqrt_bounds(&closed);
            extra = json!({"sqrt_bounds_hold": bounds});
            if a.oracle {
                let oracle = census::census_z2d4_oracle(a.max)?;
                let mismatches: Vec<Value> = (1..=a.max)
                    .filter(|&n| closed.a_n(n) != oracle.a_n(n))
                    .map(|n| json!({"n": n, "closed_form": closed.a_n(n), "oracle": oracle.a_n(n)}))
                    .collect();
                if let Some(first) = mismatches.first() {
                    failure = Some(format!("closed form differs from the oracle, first at n = {}", first["n"]));
                }
                extra["oracle_agrees"] = json!(mismatches.is_empty());
                extra["mismatches"] = json!(mismatches);
                extra["oracle"] = json!(oracle);
            }
            if !bounds {
                failure.get_or_insert_with(|| "√n ≤ s_n ≤ 10√n fails".into());
            }
            closed
        }
        CountGroup::Zxz2 => {
            let z = census::census_z_cross_z2(a.max);
            extra = json!({"k_n": z.k});
            z.census
        }
    };
    match c.format {
        Format::Csv => {
            let mut w = sink(c)?;
            census.write_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => emit_json(c, &json!({"config": config, "census": census, "checks": extra}))?,
    }
    match failure {
        Some(m) => Err(Failure::Finding(m)),
        None => Ok(()),
    }
}

fn parse_codes<const N: usize>(s: &str, what: &str) -> Result<[u32; N], Error> {
    let v: Vec<u32> = s
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("bad {what} {s:?}")))?;
    <[u32; N]>::try_from(v).map_err(|_| Error::InvalidInput(format!("{what} needs {N} values")))
}

fn cmd_isometry(c: &Common, a: &IsometryArgs, config: Value) -> Outcome {
    let t = parse_codes::<4>(&a.table, "table")?;
    let table = t.map(|x| u8::try_from(x).unwrap_or(u8::MAX));
    let b = LampBijection::new(table)?;
    let map = match &a.swap {
        Some(s) => {
            let [i, j] = parse_codes::<2>(s, "swap")?;
            WreathMap::SwapPositions { table: b.table(), i, j }
        }
        None => WreathMap::Coordinatewise { table: b.table() },
    };
    let start = std::time::Instant::now();
    let r = wreath::verify_map(map, a.n)?;
    let timing = json!({"millis": start.elapsed().as_millis()});
    emit_json(c, &json!({"config": config, "report": r, "timing": timing}))?;
    if !r.isomorphism {
        return Err(Failure::Finding(format!("the map is not an isometry for n = {}", a.n)));
    }
    Ok(())
}

fn cmd_fullbox(c: &Common, a: &FullboxArgs, config: Value) -> Outcome {
    if a.group != "zxz2" {
        return Err(Error::InvalidInput(format!("full box spaces are implemented for zxz2 only, not {:?}", a.group)).into());
    }
    let r = census::fullbox_cycle_retraction(a.max)?;
    let k = census::census_z_cross_z2(a.max.min(100));
    emit_json(
        c,
        &json!({
            "config": config,
            "max_A": r.max_a,
            "attained_at_order": r.attained_at_order,
            "K_n_constant": k.k.iter().all(|&x| x == 3),
            "retraction": r,
        }),
    )
}

fn cmd_verify_all(c: &Common, a: &VerifyArgs, config: Value) -> Outcome {
    let cfg = VerifyConfig { quick: a.quick, max_vertices: c.max_vertices, ..VerifyConfig::default() };
    let v = report::verify_all(&cfg)?;
    for cr in &v.payload.criteria {
        eprintln!("criterion {}: {} ({})", cr.id, if cr.passed { "PASS" } else { "FAIL" }, cr.name);
    }
    emit_json(c, &json!({"config": config, "payload": v.payload, "timing": v.timing}))?;
    if !v.payload.all_passed {
        let failed: Vec<String> =
            v.payload.criteria.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
        return Err(Failure::Finding(format!("criteria {} failed", failed.join(", "))));
    }
    Ok(())
}
