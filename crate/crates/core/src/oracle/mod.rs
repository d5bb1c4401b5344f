//! Independent numerical cross-checks: generalized trigonometric functions,
//! the angular quadrature of `f0`, and direct Poincaré return maps.

pub mod ode;

use crate::classification::Label;
use crate::decomposition::{Decomposition, QHField};
use crate::error::{Error, Result};
use crate::poly::{rat_to_f64, BiPoly, TypeVector};
use ode::{integrate, locate_event, OdeOptions};
use serde::Serialize;

/// A polynomial compiled to doubles for fast evaluation.
#[derive(Clone, Debug)]
pub struct FastPoly {
    terms: Vec<(i32, i32, f64)>,
}

impl FastPoly {
    pub fn new(p: &BiPoly) -> Self {
        FastPoly { terms: p.terms().map(|(m, c)| (m.a as i32, m.b as i32, rat_to_f64(c))).collect() }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(a, b, c)| c * x.powi(a) * y.powi(b)).sum()
    }
}

/// Generalized cosine and sine: the orbit of `X_H`, `H = y^(2 t1) + x^(2 t2)`,
/// through `(1, 0)`.
#[derive(Clone, Debug, Serialize)]
pub struct GenTrig {
    pub t: TypeVector,
    pub period: f64,
    /// `(theta, Cs, Sn)` at every accepted integration step.
    pub samples: Vec<[f64; 3]>,
    /// `max |H(Cs, Sn) - 1|` along the orbit.
    pub max_drift: f64,
    pub rtol: f64,
}

fn hamiltonian_rhs(t: TypeVector) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let (t1, t2) = (t.t1 as i32, t.t2 as i32);
    move |_s, v| [-2.0 * t1 as f64 * v[1].powi(2 * t1 - 1), 2.0 * t2 as f64 * v[0].powi(2 * t2 - 1)]
}

fn energy(t: TypeVector, v: &[f64]) -> f64 {
    v[1].powi(2 * t.t1 as i32) + v[0].powi(2 * t.t2 as i32)
}

pub fn gen_trig(t: TypeVector, opts: &OdeOptions) -> Result<GenTrig> {
    let f = hamiltonian_rhs(t);
    let g = |v: &[f64; 2]| v[1];
    let mut samples = vec![[0.0, 1.0, 0.0]];
    let mut drift = 0.0f64;
    let (period, end) = integrate(&f, 0.0, [1.0, 0.0], None, opts, |s| {
        drift = drift.max((energy(t, &s.y1) - 1.0).abs());
        if s.y0[1] < 0.0 && s.y1[1] >= 0.0 && s.y1[0] > 0.0 {
            return Ok(Some(locate_event(&f, s, &g, opts)));
        }
        samples.push([s.t1, s.y1[0], s.y1[1]]);
        Ok(None)
    })?;
    drift = drift.max((energy(t, &end) - 1.0).abs());
    samples.push([period, end[0], end[1]]);
    Ok(GenTrig { t, period, samples, max_drift: drift, rtol: opts.rtol })
}

/// `int_0^T mu(Cs, Sn) / h(Cs, Sn) dtheta`, integrated along with the orbit.
pub fn f0_quadrature(dec: &Decomposition, trig: &GenTrig, opts: &OdeOptions) -> Result<f64> {
    if dec.mu.is_zero() {
        return Ok(0.0);
    }
    let mu = FastPoly::new(&dec.mu);
    let h = FastPoly::new(&dec.h);
    let floor = 1e-12 * dec.h.max_abs_coeff();
    let base = hamiltonian_rhs(trig.t);
    let min_h = std::cell::Cell::new(f64::INFINITY);
    let f = |s: f64, v: &[f64; 3]| {
        let d = base(s, &[v[0], v[1]]);
        let hv = h.eval(v[0], v[1]);
        min_h.set(min_h.get().min(hv.abs()));
        [d[0], d[1], mu.eval(v[0], v[1]) / hv]
    };
    let te = trig.period;
    let q = integrate(&f, 0.0, [1.0, 0.0, 0.0], Some(te), opts, |s| {
        Ok(if (s.t1 - te).abs() <= 1e-14 * te { Some(s.y1[2]) } else { None })
    })?;
    if min_h.get() < floor {
        return Err(Error::NearResonant(min_h.get()));
    }
    Ok(q)
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareEntry {
    pub u0: f64,
    pub returned: f64,
    pub displacement: f64,
    pub relative: f64,
    /// `ln(returned / u0)`; finite even when one turn over- or underflows.
    pub log_ratio: f64,
    pub return_time: f64,
    /// `relative` again at a 100x tighter tolerance, when it was not closed.
    pub refined: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareReport {
    pub entries: Vec<PoincareEntry>,
    pub label: Label,
    pub center_tol: f64,
}

pub const DEFAULT_LADDER: [f64; 3] = [0.2, 0.1, 0.05];
pub const BOUNDING_BOX: f64 = 10.0;
/// Relative displacement below which a return counts as closed.
pub const CENTER_TOL: f64 = 1e-7;
/// Renormalisations allowed per turn; each one changes the radius by 4x.
const MAX_RENORMS: usize = 1000;

/// Weighted radius `rho`, `rho^(2 t1 t2) = x^(2 t2) + y^(2 t1)`.
fn weighted_radius(t: TypeVector, v: &[f64; 2]) -> f64 {
    let (t1, t2) = (t.t1 as i32, t.t2 as i32);
    (v[0].powi(2 * t2) + v[1].powi(2 * t1)).powf(1.0 / (2 * t1 * t2) as f64)
}

enum Leg {
    Crossed(f64, [f64; 2]),
    Drifted(f64, [f64; 2]),
}

/// Follows the orbit from `(u0^t1, 0)` to its next crossing of the section
/// `{y = 0, x > 0}` in the starting direction.
///
/// The field is quasi-homogeneous, so `(x, y) -> (s^t1 x, s^t2 y)` maps orbits
/// to orbits with time scaled by `s^-r`.  Whenever the weighted radius drifts
/// by a factor 4 the state is pulled back to radius `u0` and the factor is
/// booked, so strongly attracting or repelling foci neither leave the box
/// nor collapse onto the origin within one turn.
pub fn return_map(field: &QHField, u0: f64, opts: &OdeOptions) -> Result<PoincareEntry> {
    let p = FastPoly::new(&field.p);
    let q = FastPoly::new(&field.q);
    let t = field.t;
    let (t1, t2) = (t.t1 as f64, t.t2 as f64);
    let x0 = u0.powf(t1);
    let dir = q.eval(x0, 0.0).signum();
    if dir == 0.0 {
        return Err(Error::Escape("the section point is an equilibrium or the axis is invariant".into()));
    }
    let f = |_s: f64, v: &[f64; 2]| [p.eval(v[0], v[1]), q.eval(v[0], v[1])];
    let g = |v: &[f64; 2]| v[1];
    // true state = scaled state mapped by 1/scale; ln_scale = ln(scale)
    let mut ln_scale = 0.0f64;
    let mut time = 0.0f64;
    let mut state = [x0, 0.0];
    for _ in 0..MAX_RENORMS {
        let leg = integrate(&f, 0.0, state, None, opts, |s| {
            if s.y1[0].abs() > BOUNDING_BOX || s.y1[1].abs() > BOUNDING_BOX {
                return Err(Error::Escape(format!("orbit from u0 = {u0} left the box |x|,|y| <= {BOUNDING_BOX}")));
            }
            let crossed = s.y0[1] * dir < 0.0 && s.y1[1] * dir >= 0.0;
            if crossed && s.y1[0] > 0.0 {
                let (te, ye) = locate_event(&f, s, &g, opts);
                return Ok(Some(Leg::Crossed(te, ye)));
            }
            let rho = weighted_radius(t, &s.y1);
            if !(0.25 * u0..=4.0 * u0).contains(&rho) {
                return Ok(Some(Leg::Drifted(s.t1, s.y1)));
            }
            Ok(None)
        })?;
        // scaled time runs s^r faster than true time
        let time_factor = (field.r as f64 * ln_scale).exp();
        match leg {
            Leg::Crossed(te, ye) => {
                time += te * time_factor;
                if ye[0] <= 0.0 {
                    return Err(Error::Escape("orbit reached the origin".into()));
                }
                let log_ratio = ye[0].ln() / t1 - ln_scale - u0.ln();
                let u = u0 * log_ratio.exp();
                let rel = log_ratio.exp_m1();
                return Ok(PoincareEntry { u0, returned: u, displacement: u - u0, relative: rel, log_ratio, return_time: time, refined: None });
            }
            Leg::Drifted(te, y) => {
                time += te * time_factor;
                let rho = weighted_radius(t, &y);
                let s = u0 / rho;
                ln_scale += s.ln();
                state = [y[0] * s.powf(t1), y[1] * s.powf(t2)];
            }
        }
    }
    Err(Error::Escape(format!("orbit from u0 = {u0} drifted by more than 4^{MAX_RENORMS} without returning")))
}

/// Rerun at a tighter tolerance when a return is not already closed; a
/// displacement that shrinks by more than what is left is integration error.
const REFINE: f64 = 1e-2;

pub fn poincare_return(field: &QHField, ladder: &[f64], opts: &OdeOptions) -> Result<PoincareReport> {
    let mut entries = Vec::with_capacity(ladder.len());
    for &u0 in ladder {
        let mut e = return_map(field, u0, opts)?;
        if e.relative.abs() > CENTER_TOL {
            let tight = OdeOptions { rtol: opts.rtol * REFINE, atol: opts.atol * REFINE, ..*opts };
            let r = return_map(field, u0, &tight)?;
            e.refined = Some(r.relative);
        }
        entries.push(e);
    }
    let closed = |e: &PoincareEntry| match e.refined {
        None => true,
        Some(r) => r.abs() <= CENTER_TOL || r.abs() <= (e.relative - r).abs(),
    };
    let label = if entries.iter().all(closed) {
        Label::GlobalCenter
    } else {
        let s: f64 = entries.iter().map(|e| e.log_ratio).sum();
        if s > 0.0 {
            Label::UnstableFocus
        } else {
            Label::StableFocus
        }
    };
    Ok(PoincareReport { entries, label, center_tol: CENTER_TOL })
}

/// Oracle summary for one field, as embedded in reports.
#[derive(Clone, Debug, Serialize)]
pub struct OracleSection {
    pub period: f64,
    pub energy_drift: f64,
    pub f0_quadrature: f64,
    /// `f0_quadrature / f0_residue`, when the residue value is nonzero.
    pub kappa: Option<f64>,
    pub poincare: PoincareReport,
}

pub fn run_oracle(field: &QHField, dec: &Decomposition, f0_residue: f64, ladder: &[f64]) -> Result<OracleSection> {
    let opts = OdeOptions::default();
    let trig = gen_trig(field.t, &opts)?;
    let fq = f0_quadrature(dec, &trig, &opts)?;
    let kappa = if f0_residue.abs() > 1e-12 { Some(fq / f0_residue) } else { None };
    let poincare = poincare_return(field, ladder, &opts)?;
    Ok(OracleSection { period: trig.period, energy_drift: trig.max_drift, f0_quadrature: fq, kappa, poincare })
}
