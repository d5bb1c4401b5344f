//! Versioned report structures shared by the CLI and the browser demo.

use crate::catalog::{Condition, FamilySpec, Mode};
use crate::classification::{classify_decomposition, ClassifyOptions, Verdict, ZERO_THRESHOLD};
use crate::decomposition::{decompose, infer_types, QHField};
use crate::error::{Error, Result};
use crate::integrability::{integrability_with, IntegrabilityResult, SearchBounds};
use crate::monodromy::MonodromyReason;
use crate::normal_forms::{canonicalize_r2, canonicalize_r4, CanonicalForm};
use crate::oracle::{run_oracle, OracleSection, DEFAULT_LADDER};
use crate::poly::{BiPoly, Rational, TypeVector};
use crate::precision::Precision;
use crate::reversibility::{axis_reversible, degree_zero_family, is_reversible, Axis, FamilyDescription, ReversibilityWitness};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Which sections an analysis fills in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Sections {
    pub reversibility: bool,
    pub integrability: bool,
    pub normal_form: bool,
    pub oracle: bool,
}

impl Sections {
    pub fn classify() -> Self {
        Sections::default()
    }

    pub fn all(oracle: bool) -> Self {
        Sections { reversibility: true, integrability: true, normal_form: true, oracle }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AnalysisOptions {
    pub precision: Precision,
    pub sections: Sections,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { precision: Precision::default(), sections: Sections::classify() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReversibilitySection {
    pub reversible: bool,
    /// Axes for which the field is already reversible as given.
    pub axis_reversible: Vec<Axis>,
    pub family: FamilyDescription,
    pub witness: Option<ReversibilityWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub t: TypeVector,
    pub r: i64,
    pub coprime: bool,
    pub h: String,
    pub mu: String,
    pub verdict: Verdict,
    pub reversibility: Option<ReversibilitySection>,
    pub integrability: Option<IntegrabilityResult>,
    pub normal_form: Option<CanonicalForm>,
    pub oracle: Option<OracleSection>,
    /// Set when the oracle was requested but could not run.
    pub oracle_error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeEntry {
    pub t: TypeVector,
    pub r: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputEcho {
    pub p: String,
    pub q: String,
    pub type_override: Option<TypeVector>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Param {
    pub name: String,
    pub value: String,
}

/// Conditions as stated for the family, evaluated at the sample.
#[derive(Clone, Debug, Serialize)]
pub struct Stated {
    pub monodromic: Option<bool>,
    pub center: Option<bool>,
    pub reversible: Option<bool>,
    pub integrable: Option<bool>,
    pub reason: Option<MonodromyReason>,
}

/// Whether the engine agrees with each stated condition; `None` when the
/// condition is not stated or does not apply.
#[derive(Clone, Debug, Serialize)]
pub struct Agreement {
    pub monodromic: Option<bool>,
    pub center: Option<bool>,
    pub reason: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyRecord {
    pub index: usize,
    pub params: Vec<Param>,
    pub stated: Stated,
    pub agrees: Agreement,
    pub analysis: Analysis,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilySection {
    pub name: String,
    pub t: TypeVector,
    pub r: i64,
    pub slots: Vec<String>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub count: usize,
    pub records: Vec<FamilyRecord>,
    /// Catalog cross-check: samples where a stated condition and the engine
    /// disagree.
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: String,
    pub input: Option<InputEcho>,
    pub types: Vec<TypeEntry>,
    pub analyses: Vec<Analysis>,
    pub family: Option<FamilySection>,
    pub timings: Option<Timings>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            command: command.to_string(),
            input: None,
            types: vec![],
            analyses: vec![],
            family: None,
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Runs the requested sections on one typed field.
pub fn analyze(f: &QHField, opts: &AnalysisOptions) -> Result<Analysis> {
    let dec = decompose(f)?;
    let copts = ClassifyOptions { precision: opts.precision, zero_threshold: ZERO_THRESHOLD };
    let verdict = classify_decomposition(&dec, &copts)?;
    let s = opts.sections;
    let reversibility = if s.reversibility {
        let witness = is_reversible(f)?;
        Some(ReversibilitySection {
            reversible: witness.is_some(),
            axis_reversible: axis_reversible(&dec),
            family: degree_zero_family(f.t),
            witness,
        })
    } else {
        None
    };
    let integrability = if s.integrability {
        let bounds = SearchBounds { precision: opts.precision, ..Default::default() };
        Some(integrability_with(&dec, &bounds)?)
    } else {
        None
    };
    let normal_form = if s.normal_form && verdict.monodromic && f.t == TypeVector::new(1, 1)? {
        match f.r {
            2 => canonicalize_r2(f).ok(),
            4 => canonicalize_r4(f).ok(),
            _ => None,
        }
    } else {
        None
    };
    let (mut oracle, mut oracle_error) = (None, None);
    if s.oracle && verdict.monodromic {
        let f0 = verdict.f0.as_ref().map_or(0.0, |v| v.value);
        match run_oracle(f, &dec, f0, &DEFAULT_LADDER) {
            Ok(o) => oracle = Some(o),
            Err(e) => oracle_error = Some(e.to_string()),
        }
    }
    Ok(Analysis {
        t: f.t,
        r: f.r,
        coprime: f.is_coprime(),
        h: dec.h.to_string(),
        mu: dec.mu.to_string(),
        verdict,
        reversibility,
        integrability,
        normal_form,
        oracle,
        oracle_error,
    })
}

/// The field under every admissible type, or under `forced` alone.
pub fn typed_fields(p: &BiPoly, q: &BiPoly, forced: Option<TypeVector>) -> Result<Vec<QHField>> {
    if p.is_zero() && q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let types: Vec<TypeVector> = match forced {
        Some(t) => vec![t],
        None => infer_types(p, q).into_iter().map(|(t, _)| t).collect(),
    };
    if types.is_empty() {
        return Err(Error::NoAdmissibleType);
    }
    types.into_iter().map(|t| QHField::new(p.clone(), q.clone(), t)).collect()
}

/// Full report for one input field.
pub fn field_report(command: &str, p: &BiPoly, q: &BiPoly, forced: Option<TypeVector>, opts: &AnalysisOptions) -> Result<Report> {
    let fields = typed_fields(p, q, forced)?;
    let mut rep = Report::new(command);
    rep.input = Some(InputEcho { p: p.to_string(), q: q.to_string(), type_override: forced });
    rep.types = fields.iter().map(|f| TypeEntry { t: f.t, r: f.r }).collect();
    rep.analyses = fields.iter().map(|f| analyze(f, opts)).collect::<Result<_>>()?;
    Ok(rep)
}

/// Analysis of one catalog member together with the stated conditions.
pub fn family_record(spec: &FamilySpec, index: usize, params: &[Rational], opts: &AnalysisOptions) -> Result<FamilyRecord> {
    let f = spec.instantiate(params)?;
    let analysis = analyze(&f, opts)?;
    let stated = Stated {
        monodromic: spec.condition(Condition::Monodromic, params)?,
        center: spec.condition(Condition::Center, params)?,
        reversible: spec.condition(Condition::Reversible, params)?,
        integrable: spec.condition(Condition::Integrable, params)?,
        reason: spec.expected_reason(params)?,
    };
    let v = &analysis.verdict;
    let agrees = Agreement {
        monodromic: stated.monodromic.map(|m| m == v.monodromic),
        center: stated.center.filter(|_| v.monodromic).map(|c| c == v.label.is_center()),
        reason: stated.reason.map(|r| r == v.reason),
    };
    let params = spec.slots.iter().zip(params).map(|(n, q)| Param { name: n.clone(), value: q.to_string() }).collect();
    Ok(FamilyRecord { index, params, stated, agrees, analysis })
}

/// Human-readable warnings for records that contradict the catalog.
pub fn cross_check(records: &[FamilyRecord]) -> Vec<String> {
    let mut out = Vec::new();
    for r in records {
        let a = &r.agrees;
        let label = format!("{:?}", r.analysis.verdict.label);
        if a.monodromic == Some(false) {
            out.push(format!("sample {}: stated monodromy {:?} but the engine reports {label}", r.index, r.stated.monodromic));
        }
        if a.center == Some(false) {
            out.push(format!("sample {}: stated center condition is {:?} but the engine reports {label}", r.index, r.stated.center));
        }
        if a.reason == Some(false) {
            out.push(format!(
                "sample {}: stated reason {:?} but the engine reports {:?}",
                r.index, r.stated.reason, r.analysis.verdict.reason
            ));
        }
    }
    out
}

/// Plain-text rendering of a report.
pub fn render_text(rep: &Report) -> String {
    let mut s = String::new();
    if let Some(i) = &rep.input {
        s += &format!("P = {}\nQ = {}\n", i.p, i.q);
    }
    for a in &rep.analyses {
        s += &render_analysis(a, "");
    }
    if let Some(fam) = &rep.family {
        s += &format!("family {} t={} r={} ({} samples)\n", fam.name, fam.t, fam.r, fam.records.len());
        for r in &fam.records {
            let ps: Vec<String> = r.params.iter().map(|p| format!("{}={}", p.name, p.value)).collect();
            s += &format!("[{}] {}\n", r.index, ps.join(" "));
            s += &render_analysis(&r.analysis, "    ");
        }
        for w in &fam.warnings {
            s += &format!("warning: {w}\n");
        }
    }
    if let Some(t) = &rep.timings {
        s += &format!("time: {:.1} ms\n", t.total_ms);
    }
    s
}

fn render_analysis(a: &Analysis, ind: &str) -> String {
    let v = &a.verdict;
    let mut s = format!("{ind}t = {}  r = {}  label: {:?}\n", a.t, a.r, v.label);
    s += &format!("{ind}  h  = {}\n{ind}  mu = {}\n", a.h, a.mu);
    if !v.monodromic {
        s += &format!("{ind}  not monodromic: {}\n", v.reason.describe());
    }
    if let Some(f0) = &v.f0 {
        s += &format!("{ind}  f0 = {:.6e}  (scale {:.3e})\n", f0.value, f0.scale);
    }
    if let Some(r) = &a.reversibility {
        match &r.witness {
            Some(w) => s += &format!("{ind}  reversible: {:?} via {:?} (residual {:.1e})\n", w.axis, w.change, w.residual),
            None => s += &format!("{ind}  not reversible within {}\n", r.family.form),
        }
    }
    if let Some(i) = &a.integrability {
        s += &format!("{ind}  integrability: {:?}", i.status);
        if let Some(o) = &i.obstruction {
            s += &format!(" ({o:?})");
        }
        if let Some(c) = &i.certificate {
            let fs: Vec<String> = c.factors.iter().map(|g| format!("({})^{}", g.poly, g.exponent)).collect();
            s += &format!(" U = {}", fs.join(" * "));
        }
        s += "\n";
    }
    if let Some(n) = &a.normal_form {
        s += &format!("{ind}  normal form: {:?}, mu = {:?}\n", n.kind, n.mu);
    }
    if let Some(o) = &a.oracle {
        s += &format!("{ind}  oracle: f0 quadrature {:.6e}, Poincare {:?}\n", o.f0_quadrature, o.poincare.label);
    }
    if let Some(e) = &a.oracle_error {
        s += &format!("{ind}  oracle failed: {e}\n");
    }
    s
}
