//! Command-line front end. Exit codes: 0 when every check passes, 1 when a
//! check fails, 2 for usage and IO errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::generators::ModelSpec;
use crate::induction::full_report;
use crate::io::{
    invariants_json, matrix_csv, modular_json, parse_algebra, parse_certificate, parse_invariant,
    parse_ring, write_ring, InvariantFile,
};
use crate::modular::{
    check_partial_verlinde, is_nondegenerate, modular_matrices, sl2z_relations, verlinde_fusion,
    ResidualReport,
};
use crate::repdecomp::{decompose_semisimple, is_commutative, DEFAULT_SEED};
use crate::search::{search_invariants, MassMatrix, SearchOptions, GRAM_NODE_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "fusionkit",
    version,
    about = "Modular data and modular invariants of braided fusion rings"
)]
pub struct Cli {
    /// Numerical tolerance for residual checks.
    #[arg(long, global = true, env = "FUSIONKIT_TOL", default_value_t = crate::modular::DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Su2,
    Cyclic,
    Named,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a built-in model to a ring file.
    Gen {
        family: Family,
        #[arg(long)]
        level: Option<u32>,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        q: i64,
        #[arg(long)]
        name: Option<String>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Check ring axioms and modular relations.
    Check { file: PathBuf },
    /// Print modular data.
    Modular {
        file: PathBuf,
        /// Comma-separated subset of Y,S,T,c.
        #[arg(long, value_delimiter = ',', default_value = "c")]
        print: Vec<String>,
    },
    /// Enumerate all modular invariants.
    Invariants {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Verify and classify a mass matrix against a ring.
    Classify { zfile: PathBuf, ringfile: PathBuf },
    /// Decompose a based algebra into simple blocks.
    Decompose { algfile: PathBuf },
    /// Verify an α-induction certificate.
    VerifyInduction { certfile: PathBuf },
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn failed(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_FAIL,
        message: message.to_string(),
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        let _ = writeln!(err, "error: --tol must be a positive number");
        return EXIT_USAGE;
    }
    match run(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_ring(path: &Path) -> Result<(crate::FusionRing, Option<crate::TwistData>), Failure> {
    parse_ring(path).map_err(usage)
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let tol = cli.tol;
    match &cli.command {
        Command::Gen {
            family,
            level,
            order,
            q,
            name,
            output,
        } => {
            let spec = match family {
                Family::Su2 => ModelSpec::Su2 {
                    level: level.ok_or_else(|| usage("gen su2 requires --level"))?,
                },
                Family::Cyclic => ModelSpec::Cyclic {
                    order: order.ok_or_else(|| usage("gen cyclic requires --order"))?,
                    q: *q,
                },
                Family::Named => ModelSpec::Named(
                    name.clone()
                        .ok_or_else(|| usage("gen named requires --name"))?,
                ),
            };
            let (ring, twists) = spec.build().map_err(usage)?;
            std::fs::write(output, write_ring(&ring, Some(&twists)))
                .map_err(|e| usage(format!("{}: {e}", output.display())))?;
            writeln!(out, "wrote {spec} to {}", output.display()).ok();
            Ok(EXIT_OK)
        }
        Command::Check { file } => check(file, tol, cli.format, out),
        Command::Modular { file, print } => {
            let (ring, twists) = load_ring(file)?;
            let twists = twists.ok_or_else(|| usage("ring file has no twists"))?;
            let md = modular_matrices(&ring, &twists, tol).map_err(failed)?;
            let parts: Vec<&str> = print.iter().map(String::as_str).collect();
            if cli.format == Format::Json {
                writeln!(out, "{}", modular_json(ring.labels(), &md, &parts)).ok();
            } else {
                print_modular_text(out, &md, &parts);
            }
            Ok(EXIT_OK)
        }
        Command::Invariants {
            file,
            out: dir,
            jobs,
        } => {
            let (ring, twists) = load_ring(file)?;
            let twists = twists.ok_or_else(|| usage("ring file has no twists"))?;
            let md = modular_matrices(&ring, &twists, tol).map_err(failed)?;
            let opts = SearchOptions {
                tol,
                jobs: (*jobs).max(1),
                gram_budget: GRAM_NODE_BUDGET,
            };
            let list = search_invariants(&md, &opts).map_err(failed)?;
            if let Some(dir) = dir {
                std::fs::create_dir_all(dir)
                    .map_err(|e| usage(format!("{}: {e}", dir.display())))?;
                for (i, m) in list.iter().enumerate() {
                    let path = dir.join(format!("z_{i:03}.json"));
                    let mut text = InvariantFile::from_mass(m).to_json();
                    text.push('\n');
                    std::fs::write(&path, text)
                        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                }
            }
            match cli.format {
                Format::Json => {
                    write!(out, "{}", invariants_json(ring.labels(), &list)).ok();
                }
                Format::Csv => {
                    for (i, m) in list.iter().enumerate() {
                        if i > 0 {
                            writeln!(out).ok();
                        }
                        write!(out, "{}", matrix_csv(ring.labels(), &m.z)).ok();
                    }
                }
                Format::Text => {
                    writeln!(out, "{} invariant(s)", list.len()).ok();
                    for (i, m) in list.iter().enumerate() {
                        writeln!(out, "\n# {i}").ok();
                        print_mass_text(out, m);
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Classify { zfile, ringfile } => {
            let z = parse_invariant(zfile).map_err(usage)?;
            let (ring, twists) = load_ring(ringfile)?;
            let twists = twists.ok_or_else(|| usage("ring file has no twists"))?;
            let md = modular_matrices(&ring, &twists, tol).map_err(failed)?;
            if z.nrows() != ring.rank() {
                return Err(usage(format!(
                    "mass matrix has size {}, ring has {} labels",
                    z.nrows(),
                    ring.rank()
                )));
            }
            let mass = MassMatrix::new(z, &md, GRAM_NODE_BUDGET);
            let violations = mass.violations(&md, tol);
            match cli.format {
                Format::Json => {
                    writeln!(out, "{}", InvariantFile::from_mass(&mass).to_json()).ok();
                }
                Format::Csv => {
                    write!(out, "{}", matrix_csv(ring.labels(), &mass.z)).ok();
                }
                Format::Text => {
                    print_mass_text(out, &mass);
                    for v in &violations {
                        writeln!(out, "violation: {v}").ok();
                    }
                }
            }
            Ok(if violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_FAIL
            })
        }
        Command::Decompose { algfile } => {
            let alg = parse_algebra(algfile).map_err(usage)?;
            let report = alg.validate();
            if !report.is_valid() {
                for v in &report.violations {
                    writeln!(out, "violation: {v}").ok();
                }
                return Ok(EXIT_FAIL);
            }
            let profile = decompose_semisimple(&alg, cli.seed).map_err(failed)?;
            let commutative = is_commutative(&alg);
            if cli.format == Format::Json {
                let doc = serde_json::json!({
                    "dimension": alg.dim(),
                    "profile": profile.sizes(),
                    "commutative": commutative,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json")).ok();
            } else {
                writeln!(out, "dimension: {}", alg.dim()).ok();
                writeln!(out, "profile: {:?}", profile.sizes()).ok();
                writeln!(out, "commutative: {commutative}").ok();
            }
            Ok(EXIT_OK)
        }
        Command::VerifyInduction { certfile } => {
            let cert = parse_certificate(certfile).map_err(usage)?;
            let report = full_report(&cert, tol);
            if cli.format == Format::Json {
                let checks: Vec<_> = report
                    .checks
                    .iter()
                    .map(|c| {
                        serde_json::json!({
                            "check": c.name,
                            "pass": c.result.is_ok(),
                            "error": c.result.as_ref().err().map(|e| e.name()),
                            "message": c.result.as_ref().err().map(|e| e.to_string()),
                        })
                    })
                    .collect();
                let doc = serde_json::json!({
                    "pass": report.passes(),
                    "checks": checks,
                    "counts": report.counts.map(|(a, b)| serde_json::json!({"trZ": a, "trZZt": b})),
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json")).ok();
            } else {
                for c in &report.checks {
                    match &c.result {
                        Ok(()) => writeln!(out, "PASS {}", c.name),
                        Err(e) => writeln!(out, "FAIL {} [{}]: {e}", c.name, e.name()),
                    }
                    .ok();
                }
                if let Some((tr, trzz)) = report.counts {
                    writeln!(out, "counts: trZ = {tr}, trZZt = {trzz}").ok();
                }
            }
            Ok(if report.passes() { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn check(file: &Path, tol: f64, format: Format, out: &mut dyn Write) -> Result<i32, Failure> {
    let (ring, twists) = load_ring(file)?;
    let mut ok = true;
    let mut lines = Vec::new();
    let report = ring.validate();
    if report.is_valid() {
        lines.push("axioms: ok".to_string());
    } else {
        ok = false;
        for v in &report.violations {
            lines.push(format!("axiom violation: {v}"));
        }
    }
    if let (true, Some(twists)) = (report.is_valid(), twists) {
        match modular_matrices(&ring, &twists, tol) {
            Err(e) => {
                ok = false;
                lines.push(format!("modular data: {e}"));
            }
            Ok(md) => {
                let push_report =
                    |lines: &mut Vec<String>, name: &str, r: &ResidualReport, ok: &mut bool| {
                        for (n, v) in &r.residuals {
                            lines.push(format!("{name} {n}: {v:.1e}"));
                        }
                        if !r.passes() {
                            *ok = false;
                            lines.push(format!("{name}: FAIL"));
                        }
                    };
                push_report(
                    &mut lines,
                    "partial",
                    &check_partial_verlinde(&md, tol),
                    &mut ok,
                );
                let nd = is_nondegenerate(&md, tol);
                if nd.nondegenerate {
                    lines.push("braiding: non-degenerate".into());
                    push_report(&mut lines, "modular", &sl2z_relations(&md, tol), &mut ok);
                    match verlinde_fusion(&md, tol) {
                        Ok(v) => match v.first_mismatch(&ring) {
                            None => lines
                                .push(format!("verlinde: ok (deviation {:e})", v.max_deviation)),
                            Some(at) => {
                                ok = false;
                                lines.push(format!("verlinde: mismatch at {at:?}"));
                            }
                        },
                        Err(e) => {
                            ok = false;
                            lines.push(format!("verlinde: {e}"));
                        }
                    }
                } else {
                    lines.push(format!("braiding: degenerate (labels {:?})", nd.witnesses));
                }
            }
        }
    }
    if format == Format::Json {
        let doc = serde_json::json!({ "pass": ok, "lines": lines });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json")).ok();
    } else {
        for l in &lines {
            writeln!(out, "{l}").ok();
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

fn print_modular_text(out: &mut dyn Write, md: &crate::ModularData, parts: &[&str]) {
    let has = |p: &str| parts.iter().any(|q| q.eq_ignore_ascii_case(p));
    if has("c") {
        match md.c_exact {
            Some(c) => writeln!(out, "c = {c} (mod 8)"),
            None => writeln!(out, "c = {} (mod 8)", md.c),
        }
        .ok();
        writeln!(out, "z = {} {:+}i, w = {}", md.z.re, md.z.im, md.w).ok();
    }
    for (name, m) in [("Y", &md.y), ("S", &md.s)] {
        if has(name) {
            writeln!(out, "{name} =").ok();
            for i in 0..m.nrows() {
                let row: Vec<String> = m
                    .row(i)
                    .iter()
                    .map(|z| format!("{:>10.6}{:+.6}i", z.re, z.im))
                    .collect();
                writeln!(out, "  {}", row.join("  ")).ok();
            }
        }
    }
    if has("T") {
        writeln!(out, "T = diag(").ok();
        for i in 0..md.rank() {
            let z = md.t[(i, i)];
            match &md.t_exponents {
                Some(e) => writeln!(out, "  exp(2 pi i {})", e[i]),
                None => writeln!(out, "  {:.6}{:+.6}i", z.re, z.im),
            }
            .ok();
        }
        writeln!(out, ")").ok();
    }
}

fn print_mass_text(out: &mut dyn Write, m: &MassMatrix) {
    for i in 0..m.size() {
        let row: Vec<String> = m.z.row(i).iter().map(|x| x.to_string()).collect();
        writeln!(out, "  {}", row.join(" ")).ok();
    }
    let (tr, trzz) = m.counts();
    writeln!(
        out,
        "identity: {}, permutation: {}, symmetric: {}, type I: {}",
        m.flags.is_identity,
        m.flags.is_permutation,
        m.flags.is_symmetric,
        m.flags.type_one.as_str()
    )
    .ok();
    writeln!(out, "trZ = {tr}, trZZt = {trzz}").ok();
    writeln!(
        out,
        "residuals: |SZ-ZS| = {:.1e}, |TZ-ZT| = {:.1e}",
        m.residuals.s, m.residuals.t
    )
    .ok();
}
