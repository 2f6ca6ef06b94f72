//! The wknot command line: graded dimension tables, Alexander polynomials,
//! wheels expansions, the Kashiwara-Vergne solver/verifier, and braid
//! computations, with stable text/JSON output.
//!
//! Exit codes: 0 on success/pass, 1 when a verification fails,
//! 2 on usage or parse errors.

mod config;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{Config, OutputFormat};
use std::path::PathBuf;
use std::process::ExitCode;
use wknot_core::arrows::{graded_dimension, Skeleton, SpaceKind};
use wknot_core::expansions::{braid_z_log, check_alexander_theorem, knot_z_wheels};
use wknot_core::knots::{braid_act, parse_gauss_file, BraidWord, FreeWord, GaussDiagram};
use wknot_core::kv::{duflo_even_coefficients, solve_kv_full, verify_kv, KVSolution};
use wknot_core::linalg::fmt_rat;

#[derive(Parser)]
#[command(
    name = "wknot",
    version,
    about = "Exact w-knot and w-braid computations"
)]
struct Cli {
    /// Optional key=value config file (also via WKNOT_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graded dimensions of an arrow-diagram space, one row of the table
    Dims(DimsArgs),
    /// Alexander polynomial of a Gauss-code file
    Alexander { file: PathBuf },
    /// Wheels coordinates of Z(K), optionally checking the Alexander form
    Expand(ExpandArgs),
    /// Solve the translated Kashiwara-Vergne equations to a degree
    KvSolve(KvSolveArgs),
    /// Verify a stored KV solution
    KvVerify { file: PathBuf },
    /// Braid computations
    Braid(BraidArgs),
}

#[derive(Args)]
struct DimsArgs {
    /// one of v, sv, rv, w, sw, rw
    #[arg(long)]
    space: String,
    /// line, circle, or strands:<n>
    #[arg(long, default_value = "line")]
    skeleton: String,
    #[arg(long)]
    max_degree: usize,
    /// exact or modular
    #[arg(long)]
    rank_mode: Option<String>,
    /// text or json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ExpandArgs {
    file: PathBuf,
    #[arg(long)]
    degree: Option<usize>,
    /// print the wheels coordinates (the default output)
    #[arg(long)]
    wheels: bool,
    /// check both Alexander identities degree by degree
    #[arg(long)]
    check_alexander: bool,
    /// also check the Euler-operator identity
    #[arg(long)]
    euler: bool,
}

#[derive(Args)]
struct KvSolveArgs {
    #[arg(long)]
    degree: usize,
    /// write the solution JSON here (stdout otherwise)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BraidArgs {
    #[command(subcommand)]
    sub: BraidCommand,
}

#[derive(Subcommand)]
enum BraidCommand {
    /// Apply the braid action on the free group to a word
    Act {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        word: String,
        #[arg(long)]
        on: String,
    },
    /// Truncated logarithm of Z in the semidirect model
    ZLog {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        word: String,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Check that Z respects every defining braid relation
    CheckRelations {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Dims(args) => cmd_dims(&cfg, &args),
        Command::Alexander { file } => cmd_alexander(&file),
        Command::Expand(args) => cmd_expand(&cfg, &args),
        Command::KvSolve(args) => cmd_kv_solve(&args),
        Command::KvVerify { file } => cmd_kv_verify(&file),
        Command::Braid(args) => cmd_braid(&cfg, &args),
    }
}

fn parse_skeleton(s: &str) -> Result<Skeleton> {
    match s {
        "line" => Ok(Skeleton::LongLine),
        "circle" => Ok(Skeleton::Circle),
        _ => {
            if let Some(n) = s.strip_prefix("strands:") {
                let n: usize = n.parse().context("bad strand count")?;
                Ok(Skeleton::Strands(n))
            } else {
                Err(anyhow!(
                    "skeleton must be 'line', 'circle' or 'strands:<n>', got '{s}'"
                ))
            }
        }
    }
}

fn cmd_dims(cfg: &Config, args: &DimsArgs) -> Result<ExitCode> {
    let space =
        SpaceKind::parse(&args.space).ok_or_else(|| anyhow!("unknown space '{}'", args.space))?;
    let skeleton = parse_skeleton(&args.skeleton)?;
    let mode = match &args.rank_mode {
        Some(s) => config::parse_rank_mode(s)?,
        None => cfg.rank_mode,
    };
    let format = match &args.format {
        Some(s) => config::parse_format(s)?,
        None => cfg.format,
    };
    let mut dims = Vec::new();
    let mut capped = false;
    for m in 0..=args.max_degree {
        match graded_dimension(skeleton, space, m, mode, &cfg.caps) {
            Ok(d) => dims.push(d),
            Err(wknot_core::arrows::ArrowError::CapExceeded { .. }) => {
                capped = true;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    match format {
        OutputFormat::Text => {
            let row: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
            let marker = if capped { " (cap reached)" } else { "" };
            println!("{}{}", row.join(" "), marker);
        }
        OutputFormat::Json => {
            let v = serde_json::json!({
                "space": args.space,
                "skeleton": args.skeleton,
                "dims": dims,
                "capped": capped,
            });
            println!("{v}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_knot(file: &PathBuf) -> Result<GaussDiagram> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    parse_gauss_file(&text).map_err(|e| anyhow!("{}: {e}", file.display()))
}

fn cmd_alexander(file: &PathBuf) -> Result<ExitCode> {
    let k = read_knot(file)?;
    println!("{}", wknot_core::alexander::alexander_poly(&k));
    Ok(ExitCode::SUCCESS)
}

fn cmd_expand(cfg: &Config, args: &ExpandArgs) -> Result<ExitCode> {
    let k = read_knot(&args.file)?;
    let degree = args.degree.unwrap_or(cfg.knot_degree);
    if args.check_alexander {
        let report = check_alexander_theorem(&k, degree, &cfg.caps, args.euler)?;
        for d in 0..=degree {
            let w = report.wheels_match[d];
            let r = report.reduced_match[d];
            let e = report
                .euler_match
                .as_ref()
                .map(|v| if v[d] { " euler=ok" } else { " euler=FAIL" })
                .unwrap_or("");
            println!(
                "degree {d}: wheels={} reduced={}{}",
                if w { "ok" } else { "FAIL" },
                if r { "ok" } else { "FAIL" },
                e
            );
        }
        if report.pass() {
            println!("pass");
            return Ok(ExitCode::SUCCESS);
        }
        if let Some((d, what)) = &report.first_failure {
            println!("fail at degree {d}: {what}");
        }
        return Ok(ExitCode::FAILURE);
    }
    let wheels = knot_z_wheels(&k, degree, &cfg.caps)?;
    println!("{}", wheels.to_json());
    Ok(ExitCode::SUCCESS)
}

fn cmd_kv_solve(args: &KvSolveArgs) -> Result<ExitCode> {
    let full = solve_kv_full(args.degree)?;
    let rep = verify_kv(&full.solution);
    let json = full.solution.to_json();
    if let Some(path) = &args.out {
        std::fs::write(path, format!("{json}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
        println!("solution written to {}", path.display());
    } else {
        println!("{json}");
    }
    println!("per-degree kernel dimensions: {:?}", full.kernel_dims);
    let even = duflo_even_coefficients(&full.solution);
    if !even.is_empty() {
        let parts: Vec<String> = even
            .iter()
            .map(|(d, c)| format!("x^{d}: {}", fmt_rat(c)))
            .collect();
        println!("duflo even part: {}", parts.join(", "));
    }
    if rep.pass() {
        println!("self-check: all equations pass");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("self-check FAILED");
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_kv_verify(file: &PathBuf) -> Result<ExitCode> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let json: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not valid JSON", file.display()))?;
    let sol = KVSolution::from_json(&json).map_err(|e| anyhow!("{}: {e}", file.display()))?;
    let rep = verify_kv(&sol);
    for eq in &rep.equations {
        for (deg, ok, residual) in &eq.per_degree {
            if *ok {
                println!("{} degree {deg}: ok", eq.name);
            } else {
                println!("{} degree {deg}: FAIL ({residual})", eq.name);
            }
        }
    }
    if rep.pass() {
        println!("pass");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("fail");
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_braid(cfg: &Config, args: &BraidArgs) -> Result<ExitCode> {
    match &args.sub {
        BraidCommand::Act { n, word, on } => {
            let b = BraidWord::parse(*n, word).map_err(|e| anyhow!("{e}"))?;
            let w = FreeWord::parse(*n, on).map_err(|e| anyhow!("{e}"))?;
            let img = braid_act(&w, &b).map_err(|e| anyhow!("{e}"))?;
            println!("{img}");
            Ok(ExitCode::SUCCESS)
        }
        BraidCommand::ZLog { n, word, degree } => {
            let b = BraidWord::parse(*n, word).map_err(|e| anyhow!("{e}"))?;
            let deg = degree.unwrap_or(cfg.braid_degree);
            let z = braid_z_log(&b, deg);
            let perm: Vec<usize> = z.perm.iter().map(|p| p + 1).collect();
            println!("permutation: {perm:?}");
            println!("log: {}", format_log(&z));
            Ok(ExitCode::SUCCESS)
        }
        BraidCommand::CheckRelations { n, degree } => {
            let deg = degree.unwrap_or(cfg.braid_degree);
            check_relations(*n, deg)
        }
    }
}

/// Renders the semidirect log: single arrows print as a<i><j>, longer slot
/// words as D<j>[word], cyclic words as tr(word).
fn format_log(z: &wknot_core::expansions::BraidInvariantLog) -> String {
    use wknot_core::atspaces::word_name;
    let n = z.n;
    let mut parts: Vec<(String, String)> = Vec::new(); // (coef, name)
    for (slot, comp) in z.log.tangential.components.iter().enumerate() {
        for (w, c) in &comp.coeffs {
            let name = if w.len() == 1 {
                format!("a{}{}", w[0] + 1, slot + 1)
            } else {
                format!("D{}[{}]", slot + 1, word_name(n, w))
            };
            parts.push((fmt_rat(c), name));
        }
    }
    for (w, c) in &z.log.wheels.coeffs {
        parts.push((fmt_rat(c), format!("tr({})", word_name(n, w))));
    }
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (coef, name)) in parts.iter().enumerate() {
        let (sign, mag) = match coef.strip_prefix('-') {
            Some(m) => ("-", m.to_string()),
            None => ("+", coef.clone()),
        };
        if i == 0 {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        out.push_str(&format!("{mag}\u{b7}{name}"));
    }
    out
}

fn check_relations(n: usize, degree: usize) -> Result<ExitCode> {
    if n < 2 {
        return Err(anyhow!("need at least 2 strands"));
    }
    let mut rels: Vec<(String, String)> = Vec::new();
    for i in 1..n {
        rels.push((format!("v{i} v{i}"), String::new()));
        rels.push((format!("p{i} m{i}"), String::new()));
        for j in 1..n {
            if (i as i64 - j as i64).abs() > 1 {
                rels.push((format!("v{i} v{j}"), format!("v{j} v{i}")));
                rels.push((format!("p{i} p{j}"), format!("p{j} p{i}")));
                rels.push((format!("v{i} p{j}"), format!("p{j} v{i}")));
            }
        }
    }
    for i in 1..n.saturating_sub(1) {
        let j = i + 1;
        rels.push((format!("v{i} v{j} v{i}"), format!("v{j} v{i} v{j}")));
        rels.push((format!("p{i} p{j} p{i}"), format!("p{j} p{i} p{j}")));
        rels.push((format!("v{i} p{j} v{i}"), format!("v{j} p{i} v{j}")));
        rels.push((format!("v{i} m{j} v{i}"), format!("v{j} m{i} v{j}")));
        rels.push((format!("p{i} p{j} v{i}"), format!("v{j} p{i} p{j}")));
    }
    let mut all_ok = true;
    for (lhs, rhs) in &rels {
        let bl = BraidWord::parse(n, lhs).map_err(|e| anyhow!("{e}"))?;
        let br = BraidWord::parse(n, rhs).map_err(|e| anyhow!("{e}"))?;
        let zl = braid_z_log(&bl, degree);
        let zr = braid_z_log(&br, degree);
        let ok = zl.perm == zr.perm && zl.log == zr.log;
        all_ok &= ok;
        let rhs_name = if rhs.is_empty() { "1" } else { rhs.as_str() };
        println!("{lhs} = {rhs_name}: {}", if ok { "ok" } else { "FAIL" });
    }
    if all_ok {
        println!("all {} relations pass through degree {degree}", rels.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("some relations FAILED");
        Ok(ExitCode::FAILURE)
    }
}
