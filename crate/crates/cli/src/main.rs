//! `cubasquare`: node sets, cubature rules, verification, interpolation
//! diagnostics and rule discovery on the square `[-1, 1]^2`.
//!
//! Exit codes: 0 success or verified, 1 verification failure, 2 usage or
//! parse error.

mod svg;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cubasquare::cubature::{exactness_check, weights_from_vandermonde, CubatureRule, ExactnessReport, RuleFamily};
use cubasquare::discover::fixtures;
use cubasquare::discover::{odd_system_solve, solve_even_system, DiscoveredRule, HankelParam, SystemKind};
use cubasquare::interp::{convergence_report, lebesgue_constant, ErrorNorm, InterpFamily, DEFAULT_RESOLUTION};
use cubasquare::nodes::{lissajous_curve_point, NodeSet};
use cubasquare::rulefile::RuleFile;
use cubasquare::weights::WeightSpec;

/// Distance below which a discovered Hankel matrix matches a fixture.
const FIXTURE_TOL: f64 = 1e-8;
const CURVE_SAMPLES: usize = 2000;

#[derive(Parser)]
#[command(name = "cubasquare", version, about = "Minimal cubature and interpolation on the square")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a node set.
    Nodes(NodesArgs),
    /// Build a cubature rule and write it as a verified rule file.
    Rule(RuleArgs),
    /// Re-verify a rule file against the moment oracle.
    Verify(VerifyArgs),
    /// Interpolation error table for a test function.
    Interp(InterpArgs),
    /// Lebesgue constants of an interpolation family.
    Lebesgue(LebesgueArgs),
    /// Search for minimal rules of the constant weight.
    Discover(DiscoverArgs),
    /// Plot the nodes of a rule or node file as SVG.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    /// Gaussian nodes for the second-kind Chebyshev weight.
    GaussU,
    /// First-kind Chebyshev nodes, minimal or near-minimal by parity.
    Cheb1,
    /// Minimal first-kind Chebyshev nodes (even n).
    Mint,
    /// Near-minimal first-kind Chebyshev nodes (odd n).
    Nearmint,
    Padua,
    /// Nodes for the generalized Chebyshev weight (`--alpha`, `--beta`).
    Gencheb,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Clone, Copy)]
struct FamilyParams {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    beta: f64,
}

#[derive(Args)]
struct NodesArgs {
    family: FamilyArg,
    n: usize,
    #[command(flatten)]
    params: FamilyParams,
    /// Also write an SVG plot; the default path is `<family>_<n>.svg`.
    #[arg(long, num_args = 0..=1, default_missing_value = "auto")]
    svg: Option<PathBuf>,
    /// Overlay the degree-n Lissajous curve (always on for Padua points).
    #[arg(long)]
    curve: bool,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct RuleArgs {
    family: FamilyArg,
    n: usize,
    #[command(flatten)]
    params: FamilyParams,
    /// Compute moment-matching weights for this weight instead of the
    /// family's own (e.g. `const`, `cheb1`, `gencheb:0.5:0.5:0.5`).
    #[arg(long)]
    weight: Option<String>,
    /// `gamma` of the generalized weight; values other than -1/2 use
    /// moment-matching weights.
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    rule_file: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TestFunction {
    /// `exp(x + y)`
    Exp,
    /// `|x|`
    Abs,
    /// `1 / (1 + 25 (x^2 + y^2))`
    Runge,
    /// `cos(x y)`
    Cosxy,
}

impl TestFunction {
    fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            TestFunction::Exp => (x + y).exp(),
            TestFunction::Abs => x.abs(),
            TestFunction::Runge => 1.0 / (1.0 + 25.0 * (x * x + y * y)),
            TestFunction::Cosxy => (x * y).cos(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum NormArg {
    Sup,
    L2,
}

#[derive(Args)]
struct InterpArgs {
    family: FamilyArg,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = TestFunction::Exp)]
    function: TestFunction,
    #[arg(long, value_enum, default_value_t = NormArg::Sup)]
    norm: NormArg,
    #[command(flatten)]
    params: FamilyParams,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct LebesgueArgs {
    family: FamilyArg,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
    n: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    #[command(flatten)]
    params: FamilyParams,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct DiscoverArgs {
    kind: KindArg,
    n: usize,
    #[arg(long, default_value_t = 100)]
    seeds: usize,
    #[arg(long, default_value_t = 42)]
    rng: u64,
    /// Directory for solutions, rule files and the report; defaults to
    /// `discover_<kind>_<n>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Even,
    Odd,
}

#[derive(Args)]
struct PlotArgs {
    /// A rule file or node-set JSON.
    input: PathBuf,
    /// Output path; defaults to the input with an `.svg` extension.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Overlay the Lissajous curve of this degree.
    #[arg(long)]
    curve: Option<usize>,
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<cubasquare::Error>() {
        Some(
            cubasquare::Error::InvalidParameter(_)
            | cubasquare::Error::Parse(_)
            | cubasquare::Error::UnsupportedWeight { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Nodes(a) => cmd_nodes(a),
        Command::Rule(a) => cmd_rule(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Interp(a) => cmd_interp(a),
        Command::Lebesgue(a) => cmd_lebesgue(a),
        Command::Discover(a) => cmd_discover(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn rule_family(f: FamilyArg, n: usize, p: FamilyParams) -> Result<RuleFamily> {
    Ok(match f {
        FamilyArg::GaussU => RuleFamily::GaussU { n },
        FamilyArg::Cheb1 => RuleFamily::ChebT { n },
        FamilyArg::Mint if n.is_multiple_of(2) => RuleFamily::ChebT { n },
        FamilyArg::Nearmint if n % 2 == 1 => RuleFamily::ChebT { n },
        FamilyArg::Mint => return Err(usage(format!("mint needs even n, got {n} (use nearmint)"))),
        FamilyArg::Nearmint => return Err(usage(format!("nearmint needs odd n, got {n} (use mint)"))),
        FamilyArg::Padua => RuleFamily::Padua { n },
        FamilyArg::Gencheb => RuleFamily::GenCheb {
            alpha: p.alpha,
            beta: p.beta,
            n,
        },
    })
}

fn interp_family(f: FamilyArg, n: usize, p: FamilyParams) -> Result<InterpFamily> {
    // reuse the parity checks
    rule_family(f, n, p)?;
    Ok(match f {
        FamilyArg::GaussU => InterpFamily::GaussU,
        FamilyArg::Cheb1 | FamilyArg::Mint | FamilyArg::Nearmint => InterpFamily::Cheb1,
        FamilyArg::Padua => InterpFamily::Padua,
        FamilyArg::Gencheb => InterpFamily::GenCheb {
            alpha: p.alpha,
            beta: p.beta,
        },
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn fmt_f64(v: f64) -> String {
    // shortest representation that parses back to the same value
    format!("{v:?}")
}

fn nodes_csv(points: &[[f64; 2]], lambdas: Option<&[f64]>) -> String {
    let mut s = String::from(if lambdas.is_some() { "x,y,lambda\n" } else { "x,y\n" });
    for (k, p) in points.iter().enumerate() {
        s.push_str(&format!("{},{}", fmt_f64(p[0]), fmt_f64(p[1])));
        if let Some(l) = lambdas {
            s.push_str(&format!(",{}", fmt_f64(l[k])));
        }
        s.push('\n');
    }
    s
}

fn lissajous(n: usize) -> Vec<[f64; 2]> {
    (0..=CURVE_SAMPLES)
        .map(|k| lissajous_curve_point(n, std::f64::consts::PI * k as f64 / CURVE_SAMPLES as f64))
        .collect()
}

fn cmd_nodes(a: NodesArgs) -> Result<ExitCode> {
    let set: NodeSet = rule_family(a.family, a.n, a.params)?.nodes()?;
    let text = match a.format {
        Format::Json => to_json(&set)?,
        Format::Csv => nodes_csv(&set.points, None),
    };
    emit(&text, a.out.as_deref())?;
    if let Some(path) = a.svg {
        let path = if path.as_os_str() == "auto" {
            let name = format!("{:?}", a.family).to_lowercase();
            PathBuf::from(format!("{name}_{}.svg", a.n))
        } else {
            path
        };
        let curve = (a.curve || a.family == FamilyArg::Padua).then(|| lissajous(a.n));
        let title = format!("{} nodes, n = {}, {} points", set.family, a.n, set.len());
        fs::write(&path, svg::render(&title, &set.points, curve.as_deref()))
            .with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {} ({} points)", path.display(), set.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_rule(a: RuleArgs) -> Result<ExitCode> {
    let rf = rule_family(a.family, a.n, a.params)?;
    let weight = match (&a.weight, a.family) {
        (Some(w), _) => Some(w.parse::<WeightSpec>()?),
        (None, FamilyArg::Gencheb) if a.gamma != -0.5 => Some(WeightSpec::gencheb(a.params.alpha, a.params.beta, a.gamma)?),
        _ => None,
    };
    let rule: CubatureRule = match weight {
        Some(w) if w != rf.weight() => weights_from_vandermonde(&rf.nodes()?, &w, rf.degree())?,
        _ => rf.build()?,
    };
    let file = RuleFile::from_rule(&rule)?;
    let text = match a.format {
        Format::Json => {
            let mut s = file.to_json()?;
            s.push('\n');
            s
        }
        Format::Csv => nodes_csv(&file.nodes, Some(&file.lambdas)),
    };
    emit(&text, a.out.as_deref())?;
    let rep = &file.oracle_report;
    eprintln!(
        "{} nodes, degree {}, oracle {} (max rel error {:.2e})",
        file.nodes.len(),
        file.degree,
        if rep.pass { "pass" } else { "FAIL" },
        rep.max_rel_error
    );
    Ok(if rep.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    file: String,
    weight: String,
    nodes: usize,
    #[serde(flatten)]
    report: &'a ExactnessReport,
    /// First degree with a failing monomial; above the declared degree
    /// when the rule passes.
    first_failing_degree: Option<usize>,
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.rule_file)
        .map_err(|e| usage(format!("cannot read {}: {e}", a.rule_file.display())))?;
    if text.trim().is_empty() {
        return Err(usage(format!("{} is empty", a.rule_file.display())));
    }
    let file = RuleFile::from_json(&text)?;
    let report = exactness_check(&file.to_rule())?;
    let out = VerifyOutput {
        file: a.rule_file.display().to_string(),
        weight: file.weight.to_string(),
        nodes: file.nodes.len(),
        report: &report,
        first_failing_degree: report.failure_degree(),
    };
    match a.format {
        Format::Json => print!("{}", to_json(&out)?),
        Format::Csv => {
            println!("file,weight,nodes,declared_degree,pass,max_rel_error,exact_through,first_failing_degree");
            let opt = |v: Option<usize>| v.map_or(String::new(), |d| d.to_string());
            println!(
                "{},{},{},{},{},{:e},{},{}",
                out.file,
                out.weight,
                out.nodes,
                report.declared_degree,
                report.pass,
                report.max_rel_error,
                opt(report.exact_through),
                opt(out.first_failing_degree)
            );
        }
    }
    if report.pass {
        eprintln!("PASS: exact through degree {}", report.declared_degree);
        Ok(ExitCode::SUCCESS)
    } else {
        match report.first_failure {
            Some(f) => eprintln!(
                "FAIL: x^{} y^{} (degree {}) has relative error {:.3e}",
                f.i,
                f.j,
                f.i + f.j,
                f.rel_error
            ),
            None => eprintln!("FAIL"),
        }
        Ok(ExitCode::from(1))
    }
}

#[derive(Serialize)]
struct ErrorRow {
    n: usize,
    nodes: usize,
    error: f64,
}

fn cmd_interp(a: InterpArgs) -> Result<ExitCode> {
    let norm = match a.norm {
        NormArg::Sup => ErrorNorm::Sup,
        NormArg::L2 => ErrorNorm::L2,
    };
    let mut rows = Vec::new();
    for &n in &a.n {
        let fam = interp_family(a.family, n, a.params)?;
        let f = a.function;
        let r = convergence_report(fam, move |x, y| f.eval(x, y), &[n], norm)?;
        let nodes = rule_family(a.family, n, a.params)?.nodes()?.len();
        rows.push(ErrorRow {
            n,
            nodes,
            error: r[0].error,
        });
    }
    match a.format {
        Format::Json => print!("{}", to_json(&rows)?),
        Format::Csv => {
            println!("n,nodes,error");
            for r in &rows {
                println!("{},{},{:e}", r.n, r.nodes, r.error);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct LebesgueRow {
    n: usize,
    lebesgue: f64,
    over_log2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    over_power: Option<f64>,
}

fn cmd_lebesgue(a: LebesgueArgs) -> Result<ExitCode> {
    let mut rows = Vec::new();
    let mut exponent = None;
    for &n in &a.n {
        let fam = interp_family(a.family, n, a.params)?;
        exponent = fam.growth_exponent();
        let l = lebesgue_constant(fam, n, a.resolution)?;
        let nf = n as f64;
        rows.push(LebesgueRow {
            n,
            lebesgue: l,
            over_log2: l / nf.ln().powi(2),
            over_power: exponent.map(|e| l / nf.powf(e)),
        });
    }
    match a.format {
        Format::Json => print!("{}", to_json(&rows)?),
        Format::Csv => {
            let extra = exponent.map_or(String::new(), |e| format!(",lebesgue_over_n^{e}"));
            println!("n,lebesgue,lebesgue_over_log2{extra}");
            for r in &rows {
                let tail = r.over_power.map_or(String::new(), |v| format!(",{v:.6}"));
                println!("{},{:.6},{:.6}{tail}", r.n, r.lebesgue, r.over_log2);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SolutionReport {
    h: Vec<f64>,
    residual: f64,
    nodes: Option<usize>,
    outside: Option<usize>,
    verified: bool,
    rule_file: Option<String>,
    note: Option<String>,
}

#[derive(Serialize)]
struct FixtureMatch {
    fixture: &'static str,
    distance: f64,
    matches: bool,
}

#[derive(Serialize)]
struct DiscoverReport {
    kind: SystemKind,
    n: usize,
    seeds: usize,
    rng_seed: u64,
    status: String,
    rule_degree: usize,
    expected_nodes: usize,
    solutions: Vec<SolutionReport>,
    /// Converged points of the odd system that fail the rank condition.
    algebraic_only: usize,
    fixtures: Vec<FixtureMatch>,
}

fn known_fixtures(kind: SystemKind, n: usize) -> Vec<(&'static str, HankelParam)> {
    match (kind, n) {
        (SystemKind::Even, 3) => vec![("even H3", fixtures::even_h3())],
        (SystemKind::Odd, 3) => vec![
            ("odd H3 as typeset", fixtures::odd_h3_as_typeset()),
            ("odd H3 corrected", fixtures::odd_h3()),
        ],
        (SystemKind::Odd, 4) => vec![("odd H4", fixtures::odd_h4())],
        (SystemKind::Odd, 5) => vec![
            ("odd H5 as typeset", fixtures::odd_h5_as_typeset()),
            ("odd H5 corrected", fixtures::odd_h5()),
        ],
        _ => Vec::new(),
    }
}

fn cmd_discover(a: DiscoverArgs) -> Result<ExitCode> {
    let kind = match a.kind {
        KindArg::Even => SystemKind::Even,
        KindArg::Odd => SystemKind::Odd,
    };
    let dir = a.out.unwrap_or_else(|| PathBuf::from(format!("discover_{kind}_{}", a.n)));
    if a.n < 2 {
        return Err(usage(format!("discover needs n >= 2, got {}", a.n)));
    }
    let mut hs = Vec::new();
    let mut outcomes = Vec::new();
    let (status, algebraic_only) = match kind {
        SystemKind::Even => {
            let s = solve_even_system(a.n, a.seeds, a.rng)?;
            for sol in &s.solutions {
                hs.push((sol.h.clone(), sol.residual));
                outcomes.push(DiscoveredRule::from_even(sol));
            }
            (s.status(), 0)
        }
        SystemKind::Odd => {
            let s = odd_system_solve(a.n, a.seeds, a.rng)?;
            for sol in &s.search.solutions {
                hs.push((sol.h.clone(), sol.residual));
                outcomes.push(DiscoveredRule::from_odd(sol));
            }
            (s.search.status(), s.algebraic_only.len())
        }
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    let mut solutions = Vec::new();
    for (k, ((h, residual), outcome)) in hs.iter().zip(outcomes).enumerate() {
        let mut rep = SolutionReport {
            h: h.h.clone(),
            residual: *residual,
            nodes: None,
            outside: None,
            verified: false,
            rule_file: None,
            note: None,
        };
        match outcome {
            Ok(r) => {
                rep.nodes = Some(r.rule.len());
                rep.outside = Some(r.outside);
                rep.verified = r.report.pass;
                if r.report.pass {
                    let path = dir.join(format!("rule_{k}.json"));
                    let mut text = RuleFile::from_rule(&r.rule)?.to_json()?;
                    text.push('\n');
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                    rep.rule_file = Some(path.display().to_string());
                } else {
                    rep.note = Some(format!("oracle failure: {:?}", r.report.first_failure));
                }
            }
            Err(cubasquare::Error::CountMismatch { expected, found, .. }) => {
                rep.nodes = Some(found);
                rep.note = Some(format!("{found} real common zeros, {expected} needed"));
            }
            Err(e) => rep.note = Some(e.to_string()),
        }
        solutions.push(rep);
    }

    let fixtures = known_fixtures(kind, a.n)
        .into_iter()
        .map(|(fixture, f)| {
            let distance = hs.iter().map(|(h, _)| h.symmetric_distance(&f)).fold(f64::INFINITY, f64::min);
            FixtureMatch {
                fixture,
                distance,
                matches: distance <= FIXTURE_TOL,
            }
        })
        .collect();

    let report = DiscoverReport {
        kind,
        n: a.n,
        seeds: a.seeds,
        rng_seed: a.rng,
        status,
        rule_degree: kind.rule_degree(a.n),
        expected_nodes: kind.node_count(a.n),
        solutions,
        algebraic_only,
        fixtures,
    };
    let hankel: Vec<&HankelParam> = hs.iter().map(|(h, _)| h).collect();
    fs::write(dir.join("solutions.json"), to_json(&hankel)?)?;
    let text = to_json(&report)?;
    fs::write(dir.join("report.json"), &text)?;
    print!("{text}");
    eprintln!("{}", report.status);
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(a: PlotArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.input).map_err(|e| usage(format!("cannot read {}: {e}", a.input.display())))?;
    let (title, points) = if let Ok(f) = RuleFile::from_json(&text) {
        (format!("{} rule, degree {}, {} nodes", f.weight, f.degree, f.nodes.len()), f.nodes)
    } else {
        let set: NodeSet = serde_json::from_str(&text)
            .map_err(|e| usage(format!("{} is neither a rule file nor a node set: {e}", a.input.display())))?;
        (format!("{} nodes, n = {}, {} points", set.family, set.n, set.len()), set.points)
    };
    let path = a.svg.unwrap_or_else(|| a.input.with_extension("svg"));
    let curve = a.curve.map(lissajous);
    fs::write(&path, svg::render(&title, &points, curve.as_deref()))
        .with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {} ({} points)", path.display(), points.len());
    Ok(ExitCode::SUCCESS)
}
