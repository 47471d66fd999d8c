//! Command-line surface.
//!
//! Exit codes: `0` embedding (or every check passed), `2` high-corank
//! certificate, `3` a verification or cross-check failure, `1` any error.

pub mod crosscheck;
pub mod svg;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::gmatrix::{verify_certificate, Certificate, CertificateKind};
use crate::graphs::{parse_graph, Graph};
use crate::line1d::embed_line_with;
use crate::plane2d::embed_plane_with;
use crate::{DriverConfig, DriverError, NoObserver};

pub use crosscheck::{crosscheck, Dim, Row, MAX_CAP};
pub use svg::render_svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_MATRIX: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nullembed", version, about = "Nullspace embeddings of graphs in the line and the plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Path embedding in the line, or a corank >= 2 certificate.
    Embed1d(EmbedArgs),
    /// Outerplanar embedding in the plane, or a corank >= 3 certificate.
    Embed2d(EmbedArgs),
    /// Re-check a certificate.
    Verify(VerifyArgs),
    /// Run a driver on every graph up to a size cap and compare with the oracle.
    Crosscheck(CrosscheckArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[value(name = "1d")]
    Line,
    #[value(name = "2d")]
    Plane,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    /// Edge-list file (`n m` header, then `i j` per edge, 1-based), or `-`.
    #[arg(default_value = "-")]
    pub input: String,
    /// Relative eigenvalue tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// 0 starts from the deterministic all -1 matrix.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when absent. With `--format both` the SVG goes
    /// next to it with extension `.svg`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Certificate JSON file, or `-`.
    #[arg(default_value = "-")]
    pub input: String,
    /// Overrides the tolerance recorded in the certificate.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CrosscheckArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Largest node count, at most 9.
    #[arg(long, default_value_t = 6)]
    pub cap: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Validated settings of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: String,
    pub out: Option<PathBuf>,
    pub tol: f64,
    pub seed: u64,
    pub format: Format,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl RunConfig {
    fn embed(args: EmbedArgs, dim: Dim) -> Result<Self, UsageError> {
        check_tol(args.tol)?;
        if dim == Dim::Line && args.format != Format::Json {
            return Err(UsageError("embed1d only writes JSON".into()));
        }
        if args.format == Format::Both && args.out.is_none() {
            return Err(UsageError("--format both needs --out".into()));
        }
        Ok(Self { input: args.input, out: args.out, tol: args.tol, seed: args.seed, format: args.format })
    }

    fn driver(&self) -> DriverConfig {
        DriverConfig { rel_tol: self.tol, seed: self.seed, ..DriverConfig::default() }
    }
}

fn check_tol(tol: f64) -> Result<(), UsageError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(UsageError(format!("--tol must be a positive number, got {tol}")))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Embed1d(a) => RunConfig::embed(a, Dim::Line).and_then(|c| cmd_embed(&c, Dim::Line)),
        Command::Embed2d(a) => RunConfig::embed(a, Dim::Plane).and_then(|c| cmd_embed(&c, Dim::Plane)),
        Command::Verify(a) => cmd_verify(&a),
        Command::Crosscheck(a) => cmd_crosscheck(&a),
    };
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
    }
}

fn read_input(input: &str) -> Result<String, UsageError> {
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| UsageError(format!("reading stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(input).map_err(|e| UsageError(format!("reading {input}: {e}")))
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), UsageError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| UsageError(format!("writing {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| UsageError(format!("writing stdout: {e}")))
        }
    }
}

pub fn exit_code(kind: CertificateKind) -> i32 {
    match kind {
        CertificateKind::PathEmbedding | CertificateKind::OuterplanarEmbedding => EXIT_OK,
        CertificateKind::HighCorankMatrix => EXIT_MATRIX,
    }
}

pub fn load_graph(input: &str) -> Result<Graph, UsageError> {
    let text = read_input(input)?;
    parse_graph(&text).map_err(|e| UsageError(format!("parsing graph: {e}")))
}

/// Runs the matching driver.
pub fn certify(g: &Graph, dim: Dim, cfg: &DriverConfig) -> Result<Certificate, DriverError> {
    match dim {
        Dim::Line => embed_line_with(g, cfg, &mut NoObserver),
        Dim::Plane => embed_plane_with(g, cfg, &mut NoObserver),
    }
}

pub fn cmd_embed(cfg: &RunConfig, dim: Dim) -> Result<i32, UsageError> {
    let g = load_graph(&cfg.input)?;
    let cert = certify(&g, dim, &cfg.driver()).map_err(|e| UsageError(e.to_string()))?;
    let mut json = cert.to_json();
    if !json.ends_with('\n') {
        json.push('\n');
    }
    let svg = match (&cert.kind, &cert.embedding) {
        (CertificateKind::OuterplanarEmbedding, Some(emb)) => {
            let pts: Vec<[f64; 2]> = emb.iter().map(|p| [p[0], p[1]]).collect();
            Some(render_svg(&g, &pts))
        }
        _ => None,
    };
    let out = cfg.out.as_deref();
    match cfg.format {
        Format::Json => write_output(out, &json)?,
        Format::Svg => match &svg {
            Some(s) => write_output(out, s)?,
            None => {
                eprintln!("no embedding to draw; writing the certificate instead");
                write_output(out, &json)?;
            }
        },
        Format::Both => {
            let path = out.expect("validated");
            write_output(Some(path), &json)?;
            if let Some(s) = &svg {
                write_output(Some(&path.with_extension("svg")), s)?;
            }
        }
    }
    eprintln!("{}: {} (claimed corank {})", cert.kind, verdict_line(&cert), cert.report.claimed_corank);
    Ok(exit_code(cert.kind))
}

fn verdict_line(c: &Certificate) -> &'static str {
    if c.report.passed() {
        "all checks passed"
    } else {
        "some checks FAILED"
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32, UsageError> {
    if let Some(t) = args.tol {
        check_tol(t)?;
    }
    let text = read_input(&args.input)?;
    let cert = Certificate::from_json(&text).map_err(|e| UsageError(format!("malformed certificate: {e}")))?;
    let report = verify_certificate(&cert, &cert.graph, args.tol);
    println!("kind: {}", cert.kind);
    println!("claimed corank: {}", report.claimed_corank);
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        println!("{mark} {:<22} value {:e} threshold {:e}", c.name, c.value, c.threshold);
    }
    for line in &report.log {
        println!("log: {line}");
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_crosscheck(args: &CrosscheckArgs) -> Result<i32, UsageError> {
    check_tol(args.tol)?;
    if args.cap > MAX_CAP {
        return Err(UsageError(format!("--cap {} exceeds the limit of {MAX_CAP}", args.cap)));
    }
    let dim = match args.mode {
        Mode::Line => Dim::Line,
        Mode::Plane => Dim::Plane,
    };
    let cfg = DriverConfig { rel_tol: args.tol, seed: args.seed, ..DriverConfig::default() };
    let rows = crosscheck(dim, args.cap, &cfg);
    let oracle = match dim {
        Dim::Line => "path",
        Dim::Plane => "outerplanar",
    };
    println!("{:>2} {:>8} {:>12} {:>8} {:>9} {:>7}", "n", "graphs", oracle, "agree", "disagree", "errors");
    for r in &rows {
        println!("{:>2} {:>8} {:>12} {:>8} {:>9} {:>7}", r.n, r.graphs, r.embeddable, r.agree, r.disagree, r.errors);
        for ex in &r.examples {
            println!("   problem: {ex}");
        }
    }
    Ok(if rows.iter().all(Row::clean) { EXIT_OK } else { EXIT_FAILED })
}
