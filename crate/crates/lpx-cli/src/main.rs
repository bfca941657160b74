//! `lpx`: classify finite graphs as Lp-expanders, verify the covering-tree
//! operator calculus on fixtures, generate random regular graphs, and
//! measure Lp growth of eigenfunction realizations on truncated covers.
//!
//! Exit codes: 0 success, 1 input error, 2 unsupported graph class,
//! 3 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use lpx_core::cover::DEFAULT_VERTEX_CAP;
use lpx_core::graph::{graph_echo_json, parse_edge_list, random_regular, Graph};
use lpx_core::report::sig12;
use lpx_core::spectral::{analyze, realize_growth, AnyReport};
use lpx_core::verify::run_full_battery;

mod theta;

const SCHEMA: &str = "lpx-1";

#[derive(Parser)]
#[command(
    name = "lpx",
    version,
    about = "Lp-expander analysis of regular and biregular graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a graph: spectrum, Satake parameters, p*, Ramanujan verdict.
    Analyze(AnalyzeArgs),
    /// Run the full verification battery on the built-in fixtures.
    Verify(VerifyArgs),
    /// Generate a random simple connected d-regular graph (edge-list text).
    Gen(GenArgs),
    /// Unfold the universal cover and measure Lp growth of the spherical
    /// eigenfunction at theta.
    Realize(RealizeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge-list file ("u v" per line, '#' comments).
    file: PathBuf,
    /// Exponent for the equivalence-criteria verdicts (p >= 2).
    #[arg(long)]
    p: Option<f64>,
    /// Emit the machine-readable JSON report.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Additionally run the graph-level suites on this edge-list file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Emit the machine-readable JSON report.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Vertex count (n*d must be even, n > d).
    #[arg(long)]
    n: usize,
    /// Degree (at least 3).
    #[arg(long)]
    d: usize,
    /// Seed; the output is deterministic per seed.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct RealizeArgs {
    /// Edge-list file for the (regular) base graph.
    file: PathBuf,
    /// Satake parameter, e.g. "1.5", "2i", "1+2i", "-0.5-0.5i".
    #[arg(long)]
    theta: String,
    /// Lp exponent (p >= 2).
    #[arg(long)]
    p: f64,
    /// Truncation radius of the cover.
    #[arg(long, default_value_t = 10)]
    radius: usize,
    /// Emit the machine-readable JSON report.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Realize(args) => cmd_realize(args),
    }
}

fn fail_input(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(1)
}

fn load_graph(path: &PathBuf) -> Result<Graph, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail_input(format!("{}: {e}", path.display())))?;
    parse_edge_list(&text).map_err(|e| fail_input(format!("{}: {e}", path.display())))
}

fn vertex_cap() -> usize {
    std::env::var("LPX_MAX_TREE_VERTICES")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_VERTEX_CAP)
}

fn cmd_analyze(args: AnalyzeArgs) -> ExitCode {
    if let Some(p) = args.p {
        if p < 2.0 {
            return fail_input(format!("--p must be at least 2, got {p}"));
        }
    }
    let g = match load_graph(&args.file) {
        Ok(g) => g,
        Err(code) => return code,
    };
    match analyze(&g, args.p) {
        Ok(Some(AnyReport::Regular(report))) => {
            if args.json {
                let mut value = report.to_json();
                value["schema"] = json!(SCHEMA);
                value["graph"] = graph_echo_json(&g);
                println!("{value}");
            } else {
                println!("class: regular (q = {}, degree {})", report.q, report.q + 1);
                println!(
                    "n: {}   m: {}   bipartite: {}",
                    report.n, report.m, report.bipartite
                );
                println!("lambda(X): {:.6}", report.lambda_x);
                println!("p_star: {}", report.p_star);
                println!(
                    "ramanujan: {}{}",
                    report.ramanujan,
                    if report.boundary { " (boundary)" } else { "" }
                );
                let max_nontrivial = report
                    .satake
                    .iter()
                    .map(|s| s.theta.norm())
                    .fold(0.0_f64, f64::max);
                println!(
                    "nb spectrum: {} values, max nontrivial |theta| = {:.6}",
                    report.nb_spectrum.len(),
                    max_nontrivial
                );
                let v = &report.verdicts;
                println!(
                    "criteria at p = {:.4}: adjacency {}, distance ops {}, non-backtracking {} (agree: {})",
                    v.p, v.adjacency_bound, v.distance_bounds, v.nb_bound, v.agree()
                );
            }
            ExitCode::SUCCESS
        }
        Ok(Some(AnyReport::Biregular(report))) => {
            if args.json {
                let mut value = report.to_json();
                value["schema"] = json!(SCHEMA);
                value["graph"] = graph_echo_json(&g);
                println!("{value}");
            } else {
                println!("class: biregular (q0 = {}, q1 = {})", report.q0, report.q1);
                println!(
                    "n: {} ({} type-0, {} type-1)   m: {}",
                    report.n, report.n_type0, report.n_type1, report.m
                );
                println!(
                    "zero multiplicity: {} (expected |V0| - |V1| = {})",
                    report.zero_multiplicity, report.expected_zero_multiplicity
                );
                println!(
                    "band check: {}   trivial check: {}",
                    report.band_check, report.trivial_check
                );
                println!("p_star: {}", report.p_star);
                println!("ramanujan: {}", report.ramanujan);
            }
            ExitCode::SUCCESS
        }
        Ok(None) => {
            eprintln!("unsupported graph class: neither regular (degree >= 3) nor biregular");
            ExitCode::from(2)
        }
        Err(e) => fail_input(e),
    }
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let extra = match &args.graph {
        Some(path) => match load_graph(path) {
            Ok(g) => Some(g),
            Err(code) => return code,
        },
        None => None,
    };
    let summary = run_full_battery(extra.as_ref());
    if args.json {
        let mut value = summary.to_json();
        value["schema"] = json!(SCHEMA);
        println!("{value}");
    } else {
        for suite in &summary.suites {
            let failed = suite.failures();
            println!(
                "{:<34} {:>3} checks  {}",
                suite.name,
                suite.lines.len(),
                if failed.is_empty() { "pass" } else { "FAIL" }
            );
            for line in failed {
                println!(
                    "    FAIL {} (residual {:.3e})",
                    line.identity, line.residual
                );
            }
        }
        println!(
            "verify: {}",
            if summary.all_pass() {
                "all suites pass"
            } else {
                "FAILURES"
            }
        );
    }
    if summary.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn cmd_gen(args: GenArgs) -> ExitCode {
    match random_regular(args.n, args.d, args.seed) {
        Ok(g) => {
            print!("{}", g.to_edge_list_text());
            ExitCode::SUCCESS
        }
        Err(e) => fail_input(e),
    }
}

fn cmd_realize(args: RealizeArgs) -> ExitCode {
    if args.p < 2.0 {
        return fail_input(format!("--p must be at least 2, got {}", args.p));
    }
    let theta = match theta::parse_complex(&args.theta) {
        Ok(t) => t,
        Err(e) => return fail_input(format!("--theta: {e}")),
    };
    if theta == Complex64::new(0.0, 0.0) {
        return fail_input("--theta must be nonzero");
    }
    let g = match load_graph(&args.file) {
        Ok(g) => g,
        Err(code) => return code,
    };
    match realize_growth(&g, theta, args.p, args.radius, vertex_cap()) {
        Ok(report) => {
            if args.json {
                let mut value = report.to_json();
                value["schema"] = json!(SCHEMA);
                println!("{value}");
            } else {
                println!(
                    "cover: radius {}, {} tree vertices (q = {})",
                    report.radius, report.tree_vertices, report.q
                );
                println!(
                    "theta = {:.6}{:+.6}i   dominant = {:.6}   p_star = {}",
                    report.theta.re, report.theta.im, report.dominant, report.p_star
                );
                println!(
                    "empirical growth exponent: {:.4} ({:?})",
                    sig12(report.growth.growth_exponent),
                    report.growth.verdict
                );
                let analytic = if report.on_boundary {
                    "boundary (|theta| = q^((p-1)/p)): not p-finite, p-tempered"
                } else if report.analytic_finite {
                    "p-finite"
                } else {
                    "not p-finite"
                };
                println!("analytic verdict at p = {}: {analytic}", report.p);
                println!("consistent: {}", report.consistent);
            }
            ExitCode::SUCCESS
        }
        Err(lpx_core::spectral::SpectralError::NotRegular) => {
            eprintln!("unsupported graph class: realize requires a regular graph");
            ExitCode::from(2)
        }
        Err(e) => fail_input(e),
    }
}
