//! `rlsum`: batch front end for the verifiers in `rlsum-core`.

mod input;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use input::*;
use rlsum::cyclic::{cyclicity, krylov_numeric_oracle, multiplicity, srank_with_witness, star_det};
use rlsum::jordan::{
    block_multiplicities, lat_bruteforce, lat_intervals, quotient_operator, ExactMatrix, Field, Fp, GaussRat,
};
use rlsum::lattices::{
    ex44_reproduce, hyplat_descriptor_verify, invariance_scan, lat_descriptor_verify, LatDescriptor,
};
use rlsum::operators::{
    alg_membership, bicommutant_membership, commutant_candidate, extended_eigen_probe, monomial_testset, verify_commutation,
    Flavor,
};
use rlsum::rational::parse_q;
use rlsum::Check;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "rlsum", version, about = "Decision procedures for direct sums of scaled Riemann-Liouville operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON input file
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Report destination; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Grid size (probe, oracle) or scan resolution (hyplat-scan)
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Worker threads for scans and oracle sweeps
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = FieldChoice::F2)]
    field: FieldChoice,
    /// Cross-check against the brute-force or numeric oracle
    #[arg(long, global = true)]
    oracle: bool,
    /// Residual tolerance override
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Complex parameter: `-1`, `i`, `0.5+2i` or `polar:r,theta`
    #[arg(long, global = true, allow_hyphen_values = true)]
    c: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Cyclicity of a function system (srank, W(0) rank or mixed test)
    Cyclic,
    /// Spectral multiplicity of a block spec
    Multiplicity,
    /// Invariant subspace lattice of a nilpotent matrix, or a descriptor check over Q(i)
    LatEnum,
    /// Invariance scan of continuous hyperinvariant tuples against the polytope
    HyplatScan,
    /// Membership of a diagonal operator in the weakly closed algebra
    AlgCheck,
    /// Membership of a diagonal operator in the bicommutant
    BicommutantCheck,
    /// Commutation residual of a block operator matrix
    CommutantVerify,
    /// Extended eigenvector probe
    Probe,
    /// *-determinant and srank of a function matrix
    StarRank,
    /// Finite model of the two-block example
    Ex44,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FieldChoice {
    F2,
    F3,
    GaussianRational,
}

#[derive(Serialize)]
struct Config {
    input: Option<String>,
    grid: Option<usize>,
    jobs: Option<usize>,
    field: FieldChoice,
    oracle: bool,
    tol: Option<f64>,
    alpha: Option<String>,
    c: Option<String>,
    format: Format,
}

#[derive(Serialize)]
struct Report {
    command: Command,
    config: Config,
    results: Value,
    checks: Vec<Check>,
}

struct Outcome {
    results: Value,
    checks: Vec<Check>,
    csv: Option<String>,
}

impl Outcome {
    fn new(results: Value, checks: Vec<Check>) -> Self {
        Outcome { results, checks, csv: None }
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn expect_check(expect: Option<bool>, got: bool, what: &str) -> Vec<Check> {
    expect
        .map(|e| vec![Check::new("expected_verdict", e == got, format!("{what}: got {got}, expected {e}"))])
        .unwrap_or_default()
}

fn input_path(cli: &Cli) -> Result<&PathBuf> {
    cli.input.as_ref().ok_or_else(|| anyhow!("this command needs --input"))
}

fn cmd_cyclic(cli: &Cli) -> Result<Outcome> {
    let inp: SystemInput = read_json(input_path(cli)?)?;
    let sys = inp.system()?;
    let rep = cyclicity(&sys)?;
    let mut checks = expect_check(inp.expect, rep.verdict, "cyclicity");
    let mut results = json!({ "report": to_value(&rep)? });
    if cli.oracle {
        let n = cli.grid.unwrap_or(257);
        let orc = krylov_numeric_oracle(&sys, n, 40)?;
        // the oracle is evidence only: it disagrees when it is confident the other way
        let agree = if rep.verdict { orc.residual <= 0.5 } else { orc.residual >= 0.1 };
        let strength = match orc.residual {
            r if r < 0.1 => "cyclic evidence",
            r if r > 0.5 => "non-cyclic evidence",
            _ => "inconclusive",
        };
        checks.push(Check::new("krylov_oracle", agree, format!("residual {:.4} ({strength}), worst probe {}", orc.residual, orc.worst_probe)));
        results["oracle"] = to_value(&orc)?;
    }
    Ok(Outcome::new(results, checks))
}

fn cmd_multiplicity(cli: &Cli) -> Result<Outcome> {
    let inp: SpecInput = read_json(input_path(cli)?)?;
    let spec = inp.spec;
    let mu = multiplicity(&spec);
    let classes: Vec<Vec<usize>> = spec.classes().iter().map(|c| c.members.clone()).collect();
    let mut results = json!({ "mu": mu, "classes": classes });
    let mut checks = Vec::new();
    if spec.all_flavor(Flavor::W) {
        let ks: Vec<usize> = spec.blocks().iter().map(|b| b.k).collect();
        results["m"] = json!(block_multiplicities(&ks, spec.alpha()));
        if cli.oracle {
            let blocks = spec
                .blocks()
                .iter()
                .map(|b| Ok((GaussRat::from_c64(b.lambda)?, b.k)))
                .collect::<rlsum::Result<Vec<_>>>()?;
            let a = quotient_operator(&blocks, spec.alpha(), spec.p())?;
            let kd = a.adjoint().kernel().dim();
            checks.push(Check::new("quotient_kernel", kd == mu, format!("dim ker A* = {kd} on the jet quotient, mu = {mu}")));
        }
    }
    Ok(Outcome::new(results, checks))
}

fn lat_enum_finite<F: Field>(cli: &Cli) -> Result<Outcome> {
    let inp: MatrixInput = read_json(input_path(cli)?)?;
    let q: ExactMatrix<F> = match (&inp.matrix, &inp.cells) {
        (Some(m), None) => ExactMatrix::parse(m)?,
        (None, Some(cells)) => ExactMatrix::jordan_sum(cells),
        _ => bail!("give exactly one of `matrix` and `cells`"),
    }
    .pow(inp.power);
    let (lat, intervals) = lat_intervals(&q)?;
    let kd = q.kernel().dim();
    let mut checks: Vec<Check> = intervals
        .iter()
        .enumerate()
        .map(|(i, iv)| {
            let gap = iv.upper.dim() - iv.lower.dim();
            Check::new(format!("interval_{i}"), gap == kd, format!("dim Q^-1 M - dim M = {gap}, dim ker Q = {kd}"))
        })
        .collect();
    if cli.oracle {
        let brute = lat_bruteforce(&q)?;
        checks.push(Check::new("bruteforce_match", brute == lat, format!("{} by intervals, {} by brute force", lat.len(), brute.len())));
    }
    let census: Vec<usize> = (0..=q.rows()).map(|d| lat.iter().filter(|s| s.dim() == d).count()).collect();
    let results = json!({
        "field": F::name(),
        "dimension": q.rows(),
        "count": lat.len(),
        "census_by_dim": census,
        "intervals": intervals.len(),
        "subspaces": lat.iter().map(|s| s.to_strings()).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(results, checks))
}

fn cmd_lat_enum(cli: &Cli) -> Result<Outcome> {
    match cli.field {
        FieldChoice::F2 => lat_enum_finite::<Fp<2>>(cli),
        FieldChoice::F3 => lat_enum_finite::<Fp<3>>(cli),
        FieldChoice::GaussianRational => {
            let inp: DescriptorInput = read_json(input_path(cli)?)?;
            let n: usize = inp.descriptor.s.iter().map(|&j| inp.spec.blocks().get(j).map_or(0, |b| b.k)).sum();
            let d = LatDescriptor::from_repr(&inp.descriptor, n)?;
            let cert = lat_descriptor_verify(&inp.spec, &d)?;
            Ok(Outcome::new(json!({ "certificate": to_value(&cert)? }), Vec::new()))
        }
    }
}

fn cmd_hyplat_scan(cli: &Cli) -> Result<Outcome> {
    let inp: ScanInput = read_json(input_path(cli)?)?;
    let m = cli.grid.unwrap_or(10);
    let rep = invariance_scan(&inp.spec, m)?;
    let descriptors = inp
        .descriptors
        .iter()
        .map(|d| hyplat_descriptor_verify(&inp.spec, d))
        .collect::<rlsum::Result<Vec<_>>>()?;
    let disagree = rep.rows.iter().filter(|r| !r.agree).count();
    let checks = vec![Check::new("polytope_agreement", rep.all_agree(), format!("{disagree} of {} tuples disagree", rep.rows.len()))];
    let mut buf = Vec::new();
    rep.write_csv(&mut buf)?;
    let results = json!({ "scan": to_value(&rep)?, "descriptors": to_value(&descriptors)? });
    Ok(Outcome { results, checks, csv: Some(String::from_utf8(buf)?) })
}

fn cmd_membership(cli: &Cli, bicommutant: bool) -> Result<Outcome> {
    let inp: MembershipInput = read_json(input_path(cli)?)?;
    let cert = if bicommutant { bicommutant_membership(&inp.ops, &inp.spec)? } else { alg_membership(&inp.ops, &inp.spec)? };
    let checks = expect_check(inp.expect, cert.verdict, "membership");
    Ok(Outcome::new(json!({ "certificate": to_value(&cert)? }), checks))
}

fn cmd_commutant(cli: &Cli) -> Result<Outcome> {
    let inp: CommutantInput = read_json(input_path(cli)?)?;
    let m = match (&inp.kernels, &inp.matrix) {
        (Some(k), None) => commutant_candidate(&inp.spec, k)?,
        (None, Some(m)) => m.clone(),
        _ => bail!("give exactly one of `kernels` and `matrix`"),
    };
    let rep = verify_commutation(&m, &inp.spec, &monomial_testset(&inp.spec, inp.degree))?;
    let tol = cli.tol.unwrap_or(1e-9);
    let commutes = rep.max_residual <= tol;
    let checks = expect_check(inp.expect, commutes, "commutes");
    Ok(Outcome::new(json!({ "commutes": commutes, "tolerance": tol, "residuals": to_value(&rep)? }), checks))
}

fn cmd_probe(cli: &Cli) -> Result<Outcome> {
    let alpha = parse_q(cli.alpha.as_deref().unwrap_or("1"))?;
    let c = parse_complex(cli.c.as_deref().ok_or_else(|| anyhow!("probe needs --c"))?)?;
    let n = cli.grid.unwrap_or(64);
    let rep = extended_eigen_probe(alpha, c, n)?;
    let tol = cli.tol.unwrap_or(1e-8);
    let mut checks = vec![Check::new(
        "positive_control",
        rep.control_residual <= tol,
        format!("control residual {:.3e} at c = {}", rep.control_residual, rep.control_c),
    )];
    if c.im == 0.0 && c.re > 0.0 {
        checks.push(Check::new("matching_class", rep.min_residual <= tol, format!("c > 0 is matched by a = {}", rep.best_a)));
    } else {
        checks.push(Check::new(
            "separation",
            rep.min_residual >= 1e3 * rep.control_residual && rep.min_residual > tol,
            format!("restricted residual {:.3e} against control {:.3e}", rep.min_residual, rep.control_residual),
        ));
    }
    Ok(Outcome::new(to_value(&rep)?, checks))
}

fn cmd_star_rank(cli: &Cli) -> Result<Outcome> {
    let inp: StarInput = read_json(input_path(cli)?)?;
    let (r, rows, cols) = srank_with_witness(&inp.matrix)?;
    let square = inp.matrix.len() == inp.matrix.first().map_or(0, |r| r.len());
    let det = if square { Some(star_det(&inp.matrix)?) } else { None };
    Ok(Outcome::new(json!({ "srank": r, "witness_rows": rows, "witness_cols": cols, "star_det": to_value(&det)? }), Vec::new()))
}

fn cmd_ex44() -> Result<Outcome> {
    let rep = ex44_reproduce()?;
    Ok(Outcome::new(to_value(&rep)?, rep.checks.clone()))
}

fn run(cli: &Cli) -> Result<Report> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().ok();
    }
    let out = match cli.command {
        Command::Cyclic => cmd_cyclic(cli)?,
        Command::Multiplicity => cmd_multiplicity(cli)?,
        Command::LatEnum => cmd_lat_enum(cli)?,
        Command::HyplatScan => cmd_hyplat_scan(cli)?,
        Command::AlgCheck => cmd_membership(cli, false)?,
        Command::BicommutantCheck => cmd_membership(cli, true)?,
        Command::CommutantVerify => cmd_commutant(cli)?,
        Command::Probe => cmd_probe(cli)?,
        Command::StarRank => cmd_star_rank(cli)?,
        Command::Ex44 => cmd_ex44()?,
    };
    let csv = out.csv;
    let report = Report {
        command: cli.command,
        config: Config {
            input: cli.input.as_ref().map(|p| p.display().to_string()),
            grid: cli.grid,
            jobs: cli.jobs,
            field: cli.field,
            oracle: cli.oracle,
            tol: cli.tol,
            alpha: cli.alpha.clone(),
            c: cli.c.clone(),
            format: cli.format,
        },
        results: out.results,
        checks: out.checks,
    };
    let body = match (cli.format, csv) {
        (Format::Json, _) => serde_json::to_string_pretty(&report)? + "\n",
        (Format::Csv, Some(csv)) => csv,
        (Format::Csv, None) => {
            let mut s = String::from("name,pass,detail\n");
            for c in &report.checks {
                s += &format!("{},{},\"{}\"\n", c.name, c.pass, c.detail.replace('"', "\"\""));
            }
            s
        }
    };
    match &cli.out {
        Some(p) => std::fs::write(p, body).map_err(|e| anyhow!("cannot write {}: {e}", p.display()))?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(r) if r.checks.iter().all(|c| c.pass) => ExitCode::SUCCESS,
        Ok(r) => {
            for c in r.checks.iter().filter(|c| !c.pass) {
                eprintln!("mismatch: {}: {}", c.name, c.detail);
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
