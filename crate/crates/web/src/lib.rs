//! wasm-bindgen wrapper used by `www/index.html`.

use qhcenter::cli::parser::parse_field;
use qhcenter::cli::report::{field_report, AnalysisOptions, Sections};
use qhcenter::oracle::ode::{integrate, OdeOptions};
use qhcenter::oracle::{gen_trig as trig, FastPoly};
use qhcenter::precision::Precision;
use qhcenter::TypeVector;
use wasm_bindgen::prelude::*;

fn js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Full JSON report for `P = ...; Q = ...`. `full` adds reversibility,
/// integrability and the normal form.
#[wasm_bindgen]
pub fn analyze(field: &str, full: bool) -> Result<String, JsValue> {
    analyze_json(field, full).map_err(js)
}

pub fn analyze_json(field: &str, full: bool) -> qhcenter::Result<String> {
    let (p, q) = parse_field(field)?;
    let sections = if full { Sections::all(false) } else { Sections::classify() };
    let opts = AnalysisOptions { precision: Precision::new(30), sections };
    let cmd = if full { "all" } else { "classify" };
    Ok(field_report(cmd, &p, &q, None, &opts)?.to_json())
}

/// Orbit of the field from `(x0, y0)` up to time `t_end`, flattened as
/// `x, y, x, y, ...`. Stops early once it leaves the box `|x|,|y| <= bound`.
#[wasm_bindgen]
pub fn trajectory(field: &str, x0: f64, y0: f64, t_end: f64, bound: f64) -> Result<Vec<f64>, JsValue> {
    orbit(field, x0, y0, t_end, bound).map_err(js)
}

pub fn orbit(field: &str, x0: f64, y0: f64, t_end: f64, bound: f64) -> qhcenter::Result<Vec<f64>> {
    let (p, q) = parse_field(field)?;
    let (p, q) = (FastPoly::new(&p), FastPoly::new(&q));
    let f = |_t: f64, v: &[f64; 2]| [p.eval(v[0], v[1]), q.eval(v[0], v[1])];
    let opts = OdeOptions { rtol: 1e-8, atol: 1e-10, max_steps: 200_000, ..Default::default() };
    let mut out = vec![x0, y0];
    let res = integrate(&f, 0.0, [x0, y0], Some(t_end), &opts, |s| {
        out.extend_from_slice(&s.y1);
        let stop = s.y1[0].abs() > bound || s.y1[1].abs() > bound || s.t1 >= t_end || out.len() > 40_000;
        Ok(stop.then_some(()))
    });
    // hitting the end time or the step budget still leaves a usable curve
    match res {
        Ok(()) | Err(qhcenter::Error::Integrator(_)) => Ok(out),
        Err(e) => Err(e),
    }
}

/// `[period, drift, theta, Cs, Sn, theta, Cs, Sn, ...]` for type `(t1, t2)`.
#[wasm_bindgen]
pub fn gen_trig(t1: u32, t2: u32) -> Result<Vec<f64>, JsValue> {
    let t = TypeVector::new(t1, t2).map_err(js)?;
    let g = trig(t, &OdeOptions::default()).map_err(js)?;
    let mut out = vec![g.period, g.max_drift];
    out.extend(g.samples.iter().flatten());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_json() {
        let s = analyze_json("P = y; Q = -x^3", true).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["analyses"][0]["verdict"]["label"], "GlobalCenter");
    }

    #[test]
    fn center_orbit_closes_up() {
        let o = orbit("P = y; Q = -x^3", 1.0, 0.0, 20.0, 10.0).unwrap();
        let r = |i: usize| o[2 * i].powi(4) / 4.0 + o[2 * i + 1].powi(2) / 2.0;
        let n = o.len() / 2;
        assert!((0..n).all(|i| (r(i) - 0.25).abs() < 1e-6));
    }

    #[test]
    fn rotation_period() {
        let g = gen_trig(1, 1).unwrap();
        assert!((g[0] - std::f64::consts::PI).abs() < 1e-9);
    }
}
