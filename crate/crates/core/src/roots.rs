//! Simultaneous complex root finding: a double-precision Aberth–Ehrlich
//! pass followed by the same iteration on dyadic extended-precision values.

use crate::error::{Error, Result};
use crate::poly::{QComplex, Rational, Ring, UniPoly};
use crate::precision::{eval_rounded, qc_abs, qc_div, qc_from_c64, qc_to_c64, round_c, Precision};
use num_complex::Complex64;
use serde::Serialize;

/// One root with the multiplicity of the squarefree factor it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRoot {
    pub value: QComplex,
    pub multiplicity: u32,
}

impl ComplexRoot {
    pub fn approx(&self) -> Complex64 {
        qc_to_c64(&self.value)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRootSet {
    pub roots: Vec<ComplexRoot>,
    pub digits: u32,
    pub residual_bound: f64,
}

/// Compact view of a root for reports.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RootSummary {
    pub re: f64,
    pub im: f64,
    pub multiplicity: u32,
}

impl ComplexRootSet {
    pub fn summaries(&self) -> Vec<RootSummary> {
        self.roots
            .iter()
            .map(|r| {
                let z = r.approx();
                RootSummary { re: z.re, im: z.im, multiplicity: r.multiplicity }
            })
            .collect()
    }

    pub fn upper(&self) -> impl Iterator<Item = &ComplexRoot> {
        self.roots.iter().filter(|r| r.value.im > Rational::from_integer(0.into()))
    }
}

fn horner_f64(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Double-precision Aberth–Ehrlich iteration from a circle at the Cauchy
/// bound.  Returns the best approximations found; accuracy is not checked.
pub fn aberth_f64(q: &UniPoly<f64>) -> Vec<Complex64> {
    let n = match q.degree() {
        Some(n) if n > 0 => n,
        _ => return vec![],
    };
    let lead = q.lead();
    let c: Vec<f64> = q.coeffs().iter().map(|v| v / lead).collect();
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, a)
        })
        .collect();
    for _ in 0..500 {
        let mut worst = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner_f64(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = w / (1.0 - w * s);
            if step.is_finite() {
                z[k] -= step;
                worst = worst.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

/// Roots of a squarefree rational polynomial at the requested precision.
pub fn squarefree_roots(q: &UniPoly<Rational>, prec: Precision) -> Result<(Vec<QComplex>, f64)> {
    let n = match q.degree() {
        Some(n) if n > 0 => n,
        _ => return Ok((vec![], 0.0)),
    };
    let q = q.monic();
    let bits = prec.bits();
    let norm = q.coeffs().iter().map(|c| crate::poly::rat_to_f64(c).abs()).fold(0.0, f64::max);
    let tol = prec.residual_tol() * norm.max(1.0);
    let dq = q.derivative();
    let mut z: Vec<QComplex> = aberth_f64(&q.to_f64()).into_iter().map(qc_from_c64).collect();
    let mut best = f64::INFINITY;
    for _ in 0..200 {
        let mut residual = 0.0f64;
        for k in 0..n {
            let p = eval_rounded(&q, &z[k], bits);
            let pa = qc_abs(&p);
            if pa == 0.0 {
                continue;
            }
            let dp = eval_rounded(&dq, &z[k], bits);
            let w = qc_div(&p, &dp, bits);
            let mut s = QComplex::zero();
            for j in 0..n {
                if j != k {
                    s = s.add(&qc_div(&QComplex::one(), &z[k].sub(&z[j]), bits));
                }
            }
            let den = QComplex::one().sub(&round_c(&w.mul(&s), bits));
            let step = qc_div(&w, &den, bits);
            z[k] = round_c(&z[k].sub(&step), bits);
        }
        for zk in &z {
            residual = residual.max(qc_abs(&eval_rounded(&q, zk, bits)));
        }
        best = best.min(residual);
        if residual <= tol {
            return Ok((z, residual));
        }
    }
    Err(Error::RootNonConvergence { residual: best })
}

/// All complex roots of `q` with multiplicities from its exact squarefree
/// decomposition.
pub fn complex_roots(q: &UniPoly<Rational>, prec: Precision) -> Result<ComplexRootSet> {
    let mut roots = Vec::new();
    let mut bound = 0.0f64;
    for (f, m) in q.squarefree_decomposition()? {
        let (zs, res) = squarefree_roots(&f, prec)?;
        bound = bound.max(res);
        roots.extend(zs.into_iter().map(|value| ComplexRoot { value, multiplicity: m }));
    }
    roots.sort_by(|a, b| {
        let (x, y) = (a.approx(), b.approx());
        (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(ComplexRootSet { roots, digits: prec.digits, residual_bound: bound })
}
