//! Command-line front end: analysis, orbit tracing, blow-up transforms,
//! the chain experiment, and the invariant selftest suite.
//!
//! Exit codes: 0 success; 1 selftest failure; 2 input/parse error;
//! 3 invariant failure; 4 trace start point off-surface; 5 degenerate chart;
//! 6 chain shooting failure (a partial report is still written).

use clap::{Parser, Subcommand, ValueEnum};
use martinet::blowup::{verify_div_compat, ChartMap, CompatOpts, Sign};
use martinet::examples::{
    builtin, link_trace, phase_portrait_orbits, reference_z_comparison, run_chain, ChainField,
    ChainOpts,
};
use martinet::flow::{integrate_orbit, IntegratorOpts};
use martinet::martinet::{
    check_bracket_generating, classify_point, Distribution, DistributionSpec, MartinetData,
    MartinetError, Stratum,
};
use martinet::poly::Poly;
use martinet::svg::{polyline_figure, Series, PALETTE};
use martinet::{selftest, Point};
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::exit;

const EXIT_SELFTEST: i32 = 1;
const EXIT_PARSE: i32 = 2;
const EXIT_INVARIANT: i32 = 3;
const EXIT_OFF_SURFACE: i32 = 4;
const EXIT_BAD_CHART: i32 = 5;
const EXIT_SHOOTING: i32 = 6;

#[derive(Parser)]
#[command(name = "martinet", version, about = "Martinet surfaces, characteristic fields, blow-ups and homoclinic chains for rank-two polynomial distributions on 3-space")]
struct Cli {
    /// Seed for all randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Classification / projection tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Directory for emitted files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldArg {
    Reference,
    Derived,
}

#[derive(Subcommand)]
enum Command {
    /// Martinet data of a distribution: generators, characteristic field,
    /// certificates, bracket-generating verdicts.
    Analyze {
        /// Distribution JSON file: {"name", "X": [expr; 3], "Y": [expr; 3]}.
        #[arg(long, conflicts_with = "builtin")]
        input: Option<PathBuf>,
        /// One of the built-in distributions.
        #[arg(long)]
        builtin: Option<String>,
        /// Evaluation points "x,y,z" for bracket-generating checks.
        #[arg(long = "point")]
        points: Vec<String>,
        /// Bracket depth for the generating test.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Integrate the characteristic field from a surface point; emits CSV.
    Trace {
        #[arg(long, conflicts_with = "builtin")]
        input: Option<PathBuf>,
        #[arg(long)]
        builtin: Option<String>,
        /// Start point "x,y,z" (must lie on the surface).
        #[arg(long, allow_hyphen_values = true)]
        p0: String,
        /// Flow direction: +1 or -1.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        direction: f64,
        #[arg(long, default_value_t = 1e6)]
        max_time: f64,
        #[arg(long, default_value_t = 1e-8)]
        stop_speed: f64,
        /// Also emit an SVG with the (x1,x2) and (x1,x3) projections.
        #[arg(long)]
        svg: bool,
        /// Output CSV filename (inside --out-dir).
        #[arg(long, default_value = "orbit.csv")]
        out: String,
    },
    /// Blow up the surface in a directional chart and verify divergence
    /// compatibility on the strict transform.
    Blowup {
        #[arg(long, conflicts_with = "builtin")]
        input: Option<PathBuf>,
        #[arg(long)]
        builtin: Option<String>,
        /// Chart center, e.g. "1,2,3" or "1,2" (variable indices).
        #[arg(long)]
        center: String,
        /// Direction variable index (member of the center).
        #[arg(long)]
        j: usize,
        /// Chart sign: + or -.
        #[arg(long, default_value = "+")]
        sign: String,
        /// Sample count for the compatibility check.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Surface generator expression; defaults to the reduced determinant.
        #[arg(long)]
        h: Option<String>,
    },
    /// Homoclinic chain experiment on the loop example.
    Chain {
        #[arg(long)]
        z0: f64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        links: u32,
        #[arg(long, value_enum, default_value_t = FieldArg::Reference)]
        field: FieldArg,
        /// Relative slack for the inequality checks.
        #[arg(long, default_value_t = 0.05)]
        slack: f64,
    },
    /// Run the invariant suites of every module and print a table.
    Selftest,
}

fn fail(code: i32, msg: impl Display) -> ! {
    eprintln!("error: {msg}");
    exit(code);
}

fn load_distribution(input: &Option<PathBuf>, name: &Option<String>) -> Distribution {
    match (input, name) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .unwrap_or_else(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())));
            let spec: DistributionSpec = serde_json::from_str(&text)
                .unwrap_or_else(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())));
            Distribution::from_spec(&spec).unwrap_or_else(|e| match e {
                MartinetError::Parse(p) => fail(EXIT_PARSE, p),
                other => fail(EXIT_INVARIANT, other),
            })
        }
        (None, Some(name)) => {
            builtin(name).unwrap_or_else(|e| fail(EXIT_PARSE, e))
        }
        _ => fail(
            EXIT_PARSE,
            "provide exactly one of --input <file> or --builtin <name>",
        ),
    }
}

fn parse_point(text: &str) -> Point {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .unwrap_or_else(|e| fail(EXIT_PARSE, format!("bad coordinate `{s}`: {e}")))
        })
        .collect();
    if parts.len() != 3 || parts.iter().any(|c| !c.is_finite()) {
        fail(EXIT_PARSE, format!("`{text}` is not a finite 3-point"));
    }
    [parts[0], parts[1], parts[2]]
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    fs::create_dir_all(dir)
        .unwrap_or_else(|e| fail(EXIT_PARSE, format!("{}: {e}", dir.display())));
    let path = dir.join(name);
    fs::write(&path, contents)
        .unwrap_or_else(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())));
    path
}

fn main() {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            ref input,
            ref builtin,
            ref points,
            depth,
        } => cmd_analyze(&cli, input, builtin, points, depth),
        Command::Trace {
            ref input,
            ref builtin,
            ref p0,
            direction,
            max_time,
            stop_speed,
            svg,
            ref out,
        } => cmd_trace(
            &cli, input, builtin, p0, direction, max_time, stop_speed, svg, out,
        ),
        Command::Blowup {
            ref input,
            ref builtin,
            ref center,
            j,
            ref sign,
            samples,
            ref h,
        } => cmd_blowup(&cli, input, builtin, center, j, sign, samples, h),
        Command::Chain {
            z0,
            links,
            field,
            slack,
        } => cmd_chain(&cli, z0, links as usize, field, slack),
        Command::Selftest => cmd_selftest(&cli),
    }
}

fn build_martinet_data(d: &Distribution) -> MartinetData {
    MartinetData::from_distribution(d).unwrap_or_else(|e| match e {
        MartinetError::Parse(p) => fail(EXIT_PARSE, p),
        other => fail(EXIT_INVARIANT, other),
    })
}

fn cmd_analyze(
    cli: &Cli,
    input: &Option<PathBuf>,
    name: &Option<String>,
    points: &[String],
    depth: usize,
) {
    let d = load_distribution(input, name);
    let md = build_martinet_data(&d);
    let sigma_empty = md.h.is_constant();
    let pts: Vec<Point> = points.iter().map(|s| parse_point(s)).collect();
    let verdicts: Vec<(Point, bool)> = pts
        .iter()
        .map(|p| (*p, check_bracket_generating(&d, p, depth.max(2))))
        .collect();
    let comparison = (d.name() == Some("loop")).then(reference_z_comparison);

    match cli.format {
        Format::Json => {
            let json = serde_json::json!({
                "name": d.name(),
                "h_raw": md.h_raw.to_string(),
                "h": md.h.to_string(),
                "sigma_empty": sigma_empty,
                "Z": [
                    md.z.comp(0).to_string(),
                    md.z.comp(1).to_string(),
                    md.z.comp(2).to_string(),
                ],
                "tangency_certificate": "ok",
                "bracket_generating": verdicts.iter().map(|(p, ok)| serde_json::json!({
                    "point": p,
                    "depth": depth.max(2),
                    "generating": ok,
                })).collect::<Vec<_>>(),
                "characteristic_comparison": comparison.map(|c| c.to_json()),
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&json).expect("serializable")
            );
        }
        Format::Text => {
            println!("distribution: {}", d.name().unwrap_or("(unnamed)"));
            println!("h_raw = {}", md.h_raw);
            println!("h     = {}", md.h);
            if sigma_empty {
                println!("Sigma empty (h is a nonzero constant)");
            }
            println!("Z     = {}", md.z);
            println!("tangency certificate: ok (Z.h divisible by h)");
            for (p, ok) in &verdicts {
                println!(
                    "bracket-generating at ({}, {}, {}) up to depth {}: {}",
                    p[0],
                    p[1],
                    p[2],
                    depth.max(2),
                    ok
                );
            }
            if let Some(c) = comparison {
                println!(
                    "characteristic field vs quoted closed form (mod h): matches = {:?}",
                    c.matches
                );
                for (i, r) in c.residues_mod_h.iter().enumerate() {
                    if !r.is_zero() {
                        println!("  d/dx{} residue mod h: {}", i + 1, r);
                    }
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_trace(
    cli: &Cli,
    input: &Option<PathBuf>,
    name: &Option<String>,
    p0: &str,
    direction: f64,
    max_time: f64,
    stop_speed: f64,
    svg: bool,
    out: &str,
) {
    let d = load_distribution(input, name);
    let md = build_martinet_data(&d);
    let p0 = parse_point(p0);
    if direction != 1.0 && direction != -1.0 {
        fail(EXIT_PARSE, "--direction must be +1 or -1");
    }
    let opts = IntegratorOpts {
        max_time,
        stop_speed,
        projection_tol: cli.tol,
        ..Default::default()
    };
    match classify_point(&md, &p0, cli.tol) {
        Stratum::Sigma2Tr => {}
        other => fail(
            EXIT_OFF_SURFACE,
            format!("start point classified {other:?}; need a transverse surface point"),
        ),
    }
    let trace = integrate_orbit(&md, &p0, &opts, direction)
        .unwrap_or_else(|e| fail(EXIT_OFF_SURFACE, e));
    let csv = trace.to_csv_string();
    let path = write_file(&cli.out_dir, out, &csv);
    println!(
        "wrote {} ({} samples, termination {:?}, arc length {:.6})",
        path.display(),
        trace.samples.len(),
        trace.termination,
        trace.arc_length()
    );
    if svg {
        let xy: Vec<(f64, f64)> = trace.samples.iter().map(|s| (s.p[0], s.p[1])).collect();
        let xz: Vec<(f64, f64)> = trace.samples.iter().map(|s| (s.p[0], s.p[2])).collect();
        let fig = polyline_figure(
            "orbit projections: (x1,x2) blue, (x1,x3) red",
            &[Series::new(xy, PALETTE[0]), Series::new(xz, PALETTE[1])],
        );
        let svg_name = format!(
            "{}.svg",
            out.strip_suffix(".csv").unwrap_or(out)
        );
        let path = write_file(&cli.out_dir, &svg_name, &fig);
        println!("wrote {}", path.display());
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_blowup(
    cli: &Cli,
    input: &Option<PathBuf>,
    name: &Option<String>,
    center: &str,
    j: usize,
    sign: &str,
    samples: usize,
    h_expr: &Option<String>,
) {
    let d = load_distribution(input, name);
    let center_vars: Vec<usize> = center
        .split(',')
        .map(|s| {
            let v: usize = s
                .trim()
                .parse()
                .unwrap_or_else(|e| fail(EXIT_BAD_CHART, format!("bad center index `{s}`: {e}")));
            if !(1..=3).contains(&v) {
                fail(EXIT_BAD_CHART, format!("center index {v} out of range 1..3"));
            }
            v - 1
        })
        .collect();
    if !(1..=3).contains(&j) {
        fail(EXIT_BAD_CHART, format!("direction index {j} out of range 1..3"));
    }
    let sign = match sign {
        "+" => Sign::Plus,
        "-" => Sign::Minus,
        other => fail(EXIT_BAD_CHART, format!("sign must be + or -, got `{other}`")),
    };
    let chart = ChartMap::new(&center_vars, j - 1, sign)
        .unwrap_or_else(|e| fail(EXIT_BAD_CHART, e));
    let h = match h_expr {
        Some(expr) => Poly::parse(expr).unwrap_or_else(|e| fail(EXIT_PARSE, e)),
        None => build_martinet_data(&d).h,
    };
    let tr = martinet::blowup::strict_transform(&h, &chart)
        .unwrap_or_else(|e| fail(EXIT_INVARIANT, e));
    if tr.alpha == 0 {
        eprintln!("warning: center not in the zero set of h (alpha = 0)");
    }
    let report = verify_div_compat(&d, &h, &chart, samples, cli.seed, &CompatOpts::default())
        .unwrap_or_else(|e| fail(EXIT_INVARIANT, e));
    match cli.format {
        Format::Json => {
            let json = serde_json::json!({
                "h": h.to_string(),
                "total": tr.total.to_string(),
                "alpha": tr.alpha,
                "beta": chart.beta(),
                "strict": tr.strict.to_string(),
                "weighted": tr.weighted.as_ref().map(|w| w.to_string()),
                "compat": report,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&json).expect("serializable")
            );
        }
        Format::Text => {
            println!("chart: center {:?}, j = {}, sign {}", chart.spec().center, j, match sign { Sign::Plus => "+", Sign::Minus => "-" });
            println!("h          = {h}");
            println!("total      = {}", tr.total);
            println!("alpha      = {}", tr.alpha);
            println!("beta       = {}", chart.beta());
            println!("strict     = {}", tr.strict);
            if let Some(w) = &tr.weighted {
                println!("weighted   = {w}");
            }
            println!(
                "divergence compatibility: max |err| = {:.3e} over {} samples",
                report.max_abs_err, report.n
            );
        }
    }
}

fn cmd_chain(cli: &Cli, z0: f64, links: usize, field: FieldArg, slack: f64) {
    if !(z0 > 0.0 && z0 <= 1.0) {
        fail(EXIT_PARSE, "--z0 must lie in (0, 1]");
    }
    let opts = ChainOpts {
        slack,
        field: match field {
            FieldArg::Reference => ChainField::Reference,
            FieldArg::Derived => ChainField::Derived,
        },
        ..Default::default()
    };
    let (report, failed) = match run_chain(z0, links, &opts) {
        Ok(report) => (report, None),
        Err(failure) => {
            eprintln!("error: {failure}");
            (failure.partial.clone(), Some(failure))
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    let path = write_file(&cli.out_dir, "chain_report.json", &json);
    println!("wrote {}", path.display());

    // per-link orbit traces
    let mut chain_xz: Vec<Series> = Vec::new();
    for (k, link) in report.links.iter().enumerate() {
        match link_trace(link.xbar, &opts) {
            Ok(rows) => {
                let mut csv = String::from("t,x,y,z,speed,h_residual,cum_length,cum_div\n");
                for s in &rows {
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        s.t, s.p[0], s.p[1], s.p[2], s.speed, s.h_residual, s.cum_length, s.cum_div
                    ));
                }
                let path = write_file(&cli.out_dir, &format!("chain_link_{k}.csv"), &csv);
                println!("wrote {}", path.display());
                chain_xz.push(Series::new(
                    rows.iter().map(|s| (s.p[0], s.p[2])).collect(),
                    PALETTE[k % PALETTE.len()],
                ));
            }
            Err(e) => eprintln!("warning: link {k} trace failed: {e}"),
        }
    }
    if !chain_xz.is_empty() {
        let fig = polyline_figure("homoclinic chain, (x, z) projection", &chain_xz);
        let path = write_file(&cli.out_dir, "fig_chain_xz.svg", &fig);
        println!("wrote {}", path.display());
    }
    let xbars: Vec<f64> = report.links.iter().map(|l| l.xbar).collect();
    let xbars = if xbars.is_empty() {
        vec![-0.15, -0.3, -0.45, -0.6, -0.75, -0.9]
    } else {
        xbars
    };
    match phase_portrait_orbits(&xbars, &opts) {
        Ok(curves) => {
            let series: Vec<Series> = curves
                .into_iter()
                .enumerate()
                .map(|(k, c)| Series::new(c, PALETTE[k % PALETTE.len()]))
                .collect();
            let fig = polyline_figure("planar phase portrait: homoclinic loops", &series);
            let path = write_file(&cli.out_dir, "fig_phase_portrait.svg", &fig);
            println!("wrote {}", path.display());
        }
        Err(e) => eprintln!("warning: phase portrait failed: {e}"),
    }

    println!(
        "chain: {} links, K = {:.6}, {} checks, {} violations",
        report.links.len(),
        report.k_const,
        report.checks.len(),
        report.ineq_violations.len()
    );
    for c in &report.checks {
        println!(
            "  link {} {:<18} lhs = {:+.6e}  rhs = {:+.6e}  {}",
            c.link,
            c.name,
            c.lhs,
            c.rhs,
            if c.ok { "ok" } else { "VIOLATED" }
        );
    }
    if failed.is_some() {
        exit(EXIT_SHOOTING);
    }
}

fn cmd_selftest(cli: &Cli) {
    let results = selftest::run_all(cli.seed);
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(10);
    let mut all_ok = true;
    println!("{:<width$}  result  detail", "check", width = width);
    for r in &results {
        all_ok &= r.passed;
        println!(
            "{:<width$}  {}  {}",
            r.name,
            if r.passed { "pass  " } else { "FAIL  " },
            r.detail,
            width = width
        );
    }
    if all_ok {
        println!("all {} checks passed (seed {})", results.len(), cli.seed);
    } else {
        eprintln!("selftest failures detected");
        exit(EXIT_SELFTEST);
    }
}
