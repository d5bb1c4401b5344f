//! Command-line front end.

use super::parser::parse_field;
use super::report::{
    cross_check, family_record, field_report, render_text, AnalysisOptions, FamilySection, Report, Sections, Timings,
};
use crate::catalog::{Catalog, Mode};
use crate::error::{Error, Result};
use crate::poly::{Rational, TypeVector};
use crate::precision::{Precision, DEFAULT_DIGITS};
use clap::{Args, Parser, Subcommand};
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "qhcenter", version, about = "Center, focus, reversibility and integrability of quasi-homogeneous planar fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Root-finding precision in decimal digits.
    #[arg(long, global = true, env = "QHCENTER_PRECISION", default_value_t = DEFAULT_DIGITS)]
    pub precision: u32,
    /// Run the ODE cross-check as well.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Include wall-clock timings (makes output run-dependent).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// `P = <expr>; Q = <expr>`; read from stdin when omitted.
    #[arg(long, short)]
    pub field: Option<String>,
    /// Read the field from a file.
    #[arg(long, conflicts_with = "field")]
    pub file: Option<std::path::PathBuf>,
    /// Force the type, e.g. `1,2`, instead of inferring it.
    #[arg(long = "type", value_parser = parse_type)]
    pub ty: Option<TypeVector>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monodromy and center/focus verdict.
    Classify(FieldArgs),
    /// Reversibility witness search.
    Reverse(FieldArgs),
    /// Analytic integrability.
    Integrate(FieldArgs),
    /// Classification with the ODE cross-check.
    Oracle(FieldArgs),
    /// Every analysis.
    All(FieldArgs),
    /// Analyse members of a catalog family; lists the families without a name.
    Family(FamilyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    pub name: Option<String>,
    /// Sampling mode: random, on_monodromic, off_monodromic, on_center,
    /// off_center, on_reversible, hamiltonian.
    #[arg(long, value_parser = parse_mode)]
    pub sample: Option<Mode>,
    /// Analysis per sample: classify, reverse, integrate, all.
    #[arg(long, default_value = "classify")]
    pub mode: String,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Explicit slot values instead of sampling, comma separated.
    #[arg(long, conflicts_with = "sample")]
    pub params: Option<String>,
}

fn parse_type(s: &str) -> std::result::Result<TypeVector, String> {
    let v: Vec<&str> = s.split(',').map(str::trim).collect();
    let n = |x: &str| x.parse::<u32>().map_err(|_| format!("bad type component '{x}'"));
    if v.len() != 2 {
        return Err("type must look like t1,t2".into());
    }
    TypeVector::new(n(v[0])?, n(v[1])?).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rational(s: &str) -> Result<Rational> {
    let e = super::parser::parse_expr(s)?;
    let p = e.to_poly().map_err(|m| Error::Parse { line: 1, col: 1, msg: m })?;
    if p.total_degree().unwrap_or(0) > 0 {
        return Err(Error::Parse { line: 1, col: 1, msg: format!("parameter '{s}' is not a number") });
    }
    Ok(p.coeff(0, 0))
}

fn sections(command: &str, oracle: bool) -> Sections {
    match command {
        "reverse" => Sections { reversibility: true, oracle, ..Default::default() },
        "integrate" => Sections { integrability: true, oracle, ..Default::default() },
        "oracle" => Sections { oracle: true, ..Default::default() },
        "all" => Sections::all(oracle),
        _ => Sections { oracle, ..Default::default() },
    }
}

fn read_field(a: &FieldArgs) -> Result<String> {
    if let Some(f) = &a.field {
        return Ok(f.clone());
    }
    if let Some(p) = &a.file {
        return Ok(std::fs::read_to_string(p)?);
    }
    let mut s = String::new();
    std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
    Ok(s)
}

/// Outcome of one invocation: the text to print and the exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn family_list() -> String {
    let mut s = String::new();
    for f in &Catalog::builtin().families {
        let alias = if f.aliases.is_empty() { String::new() } else { format!(" (alias {})", f.aliases.join(", ")) };
        s += &format!("{:<7} t={} r={} slots: {}{alias}\n", f.name, f.t, f.r, f.slots.join(" "));
    }
    s
}

fn run_family(a: &FamilyArgs, oracle: bool, precision: Precision) -> Result<Option<Report>> {
    let Some(name) = &a.name else { return Ok(None) };
    let spec = Catalog::builtin().get(name)?;
    let command = match a.mode.as_str() {
        m @ ("classify" | "reverse" | "integrate" | "all") => m,
        m => return Err(Error::Unsupported(format!("unknown analysis mode {m}"))),
    };
    let opts = AnalysisOptions { precision, sections: sections(command, oracle) };
    let samples: Vec<Vec<Rational>> = match &a.params {
        Some(p) => vec![p.split(',').map(|s| parse_rational(s.trim())).collect::<Result<_>>()?],
        None => spec.sample(a.sample.unwrap_or(Mode::Random), a.count, a.seed)?,
    };
    let job = |(i, v): (usize, &Vec<Rational>)| family_record(spec, i, v, &opts);
    #[cfg(feature = "parallel")]
    let records = {
        use rayon::prelude::*;
        samples.par_iter().enumerate().map(job).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let records = samples.iter().enumerate().map(job).collect::<Result<Vec<_>>>()?;
    let warnings = cross_check(&records);
    let mut rep = Report::new("family");
    rep.family = Some(FamilySection {
        name: spec.name.clone(),
        t: spec.t,
        r: spec.r,
        slots: spec.slots.clone(),
        mode: if a.params.is_some() { None } else { Some(a.sample.unwrap_or(Mode::Random)) },
        seed: if a.params.is_some() { None } else { Some(a.seed) },
        count: records.len(),
        records,
        warnings,
    });
    Ok(Some(rep))
}

fn execute(cli: &Cli) -> Result<(Option<Report>, i32)> {
    let precision = Precision::new(cli.precision);
    let (name, fa) = match &cli.command {
        Command::Classify(a) => ("classify", a),
        Command::Reverse(a) => ("reverse", a),
        Command::Integrate(a) => ("integrate", a),
        Command::Oracle(a) => ("oracle", a),
        Command::All(a) => ("all", a),
        Command::Family(a) => return Ok((run_family(a, cli.oracle, precision)?, 0)),
    };
    let text = read_field(fa)?;
    let (p, q) = parse_field(&text)?;
    let opts = AnalysisOptions { precision, sections: sections(name, cli.oracle) };
    let rep = field_report(name, &p, &q, fa.ty, &opts)?;
    // An explicitly requested oracle that could not integrate is a numeric failure.
    let code = if name == "oracle" && rep.analyses.iter().any(|a| a.oracle_error.is_some()) { 3 } else { 0 };
    Ok((Some(rep), code))
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let start = Instant::now();
    match execute(cli) {
        Ok((None, code)) => Outcome { stdout: family_list(), code },
        Ok((Some(mut rep), code)) => {
            if cli.timings {
                rep.timings = Some(Timings { total_ms: start.elapsed().as_secs_f64() * 1e3 });
            }
            let stdout = if cli.json { rep.to_json() + "\n" } else { render_text(&rep) };
            Outcome { stdout, code }
        }
        Err(e) => {
            let stdout = if cli.json {
                let v = serde_json::json!({
                    "schema_version": super::report::SCHEMA_VERSION,
                    "error": { "message": e.to_string(), "exit_code": e.exit_code() }
                });
                serde_json::to_string_pretty(&v).expect("json") + "\n"
            } else {
                format!("error: {e}\n")
            };
            Outcome { stdout, code: e.exit_code() }
        }
    }
}

/// Entry point for the binary: parses `args` and runs.
pub fn main_with<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            Outcome { stdout: e.render().to_string(), code }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        main_with(std::iter::once("qhcenter").chain(args.iter().copied()))
    }

    #[test]
    fn hamiltonian_center() {
        let o = go(&["classify", "--field", "P = y; Q = -x^3", "--json"]);
        assert_eq!(o.code, 0);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        let a = &v["analyses"][0];
        assert_eq!(a["verdict"]["label"], "GlobalCenter");
        assert_eq!((a["t"]["t1"].as_u64(), a["t"]["t2"].as_u64()), (Some(1), Some(2)));
        assert_eq!(a["mu"], "0");
    }

    #[test]
    fn radial_field_is_not_an_error() {
        let o = go(&["classify", "--field", "P = x; Q = y", "--json"]);
        assert_eq!(o.code, 0);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert!(v["analyses"].as_array().unwrap().iter().all(|a| a["verdict"]["label"] == "NonMonodromic"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(go(&["classify", "--field", "P = x^(-1); Q = y"]).code, 2);
        assert_eq!(go(&["classify", "--field", "P = x*y; Q = x^2"]).code, 4);
        assert_eq!(go(&["classify", "--field", "P = x; Q = y", "--type", "2,2"]).code, 2);
        assert_eq!(go(&["family", "S12", "--sample", "on_monodromic"]).code, 2);
        assert_eq!(go(&["family", "S99"]).code, 2);
    }

    #[test]
    fn family_batch_on_center() {
        let o = go(&["family", "S19", "--sample", "on_center", "--count", "50", "--seed", "7", "--json"]);
        assert_eq!(o.code, 0);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        let recs = v["family"]["records"].as_array().unwrap();
        assert_eq!(recs.len(), 50);
        assert!(recs.iter().all(|r| r["analysis"]["verdict"]["label"] == "GlobalCenter"));
        let again = go(&["family", "S19", "--sample", "on_center", "--count", "50", "--seed", "7", "--json"]);
        assert_eq!(o.stdout, again.stdout);
    }

    #[test]
    fn explicit_params() {
        let o = go(&["family", "S14", "--params", "1, 1", "--json"]);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["family"]["records"][0]["analysis"]["verdict"]["reason"], "real_factor");
    }
}
