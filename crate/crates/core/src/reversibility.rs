//! Reversibility with respect to `(x,y,t) -> (-x,y,-t)` or `(x,-y,-t)`,
//! after a change of variables from the degree-zero family `id + Psi0`.
//!
//! The field is axis-reversible exactly when `h` is even and `mu` is odd in
//! the reflected variable.  For `t = (1,1)` the family is the two-parameter
//! linear maps `(x + a y, b x + y)`; for `t = (1, t2)` with `t2 > 1` it is
//! the shear `(x, y + beta x^t2)`; otherwise only the identity.

use crate::decomposition::{decompose, QHField};
use crate::error::Result;
use crate::poly::{int, rat_to_f64, BiPoly, Rational, Ring, TypeVector, UniPoly};
use num_traits::Signed;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    /// `(x, y, t) -> (-x, y, -t)`
    Rx,
    /// `(x, y, t) -> (x, -y, -t)`
    Ry,
}

fn parity_offenders<R: Ring>(h: &BiPoly<R>, mu: &BiPoly<R>, axis: Axis) -> (Vec<R>, Vec<R>) {
    let odd = |a: u32, b: u32| match axis {
        Axis::Rx => a % 2 == 1,
        Axis::Ry => b % 2 == 1,
    };
    let bad_h = h.terms().filter(|(m, _)| odd(m.a, m.b)).map(|(_, c)| c.clone()).collect();
    let bad_mu = mu.terms().filter(|(m, _)| !odd(m.a, m.b)).map(|(_, c)| c.clone()).collect();
    (bad_h, bad_mu)
}

/// Axes for which `(h, mu)` already has the required parity.
pub fn axis_parity(h: &BiPoly, mu: &BiPoly) -> Vec<Axis> {
    [Axis::Rx, Axis::Ry]
        .into_iter()
        .filter(|&ax| {
            let (a, b) = parity_offenders(h, mu, ax);
            a.is_empty() && b.is_empty()
        })
        .collect()
}

pub fn axis_reversible(dec: &crate::decomposition::Decomposition) -> Vec<Axis> {
    axis_parity(&dec.h, &dec.mu)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyDescription {
    pub t: TypeVector,
    pub dimension: usize,
    pub form: String,
}

pub fn degree_zero_family(t: TypeVector) -> FamilyDescription {
    let (dimension, form) = if t.t1 == 1 && t.t2 == 1 {
        (2, "(x + a*y, b*x + y)".to_string())
    } else if t.t1 == 1 {
        (1, format!("(x, y + beta*x^{})", t.t2))
    } else {
        (0, "(x, y)".to_string())
    };
    FamilyDescription { t, dimension, form }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeZeroChange {
    Identity,
    /// `(x, y) -> (x + a y, b x + y)`
    Linear { a: f64, b: f64 },
    /// `(x, y) -> (x, y + beta x^power)`
    Shear { beta: f64, power: u32 },
}

impl DegreeZeroChange {
    fn norm(&self) -> f64 {
        match self {
            DegreeZeroChange::Identity => 0.0,
            DegreeZeroChange::Linear { a, b } => (a * a + b * b).sqrt(),
            DegreeZeroChange::Shear { beta, .. } => beta.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReversibilityWitness {
    pub axis: Axis,
    pub change: DegreeZeroChange,
    /// Parameters are rational and the parity check holds exactly.
    pub exact: bool,
    /// Exact rational parameters, when available.
    pub exact_params: Option<Vec<String>>,
    /// Largest offending coefficient of the transformed `(h, mu)` relative to
    /// its largest coefficient.
    pub residual: f64,
}

/// Acceptance threshold for witnesses with algebraic parameters.
pub const WITNESS_TOL: f64 = 1e-10;

/// A candidate in the inverse-map parameters, possibly approximate.
#[derive(Clone, Debug)]
struct Candidate {
    params: Vec<Rational>,
    exact: bool,
}

fn approx_eps() -> Rational {
    Rational::new(int(1).numer().clone(), num_bigint::BigInt::from(2).pow(160))
}

/// Real roots of `g`: exact when they come from a linear factor, otherwise
/// as midpoints of isolating intervals of width `2^-160`.
fn real_roots(g: &UniPoly) -> Result<Vec<(Rational, bool)>> {
    let mut out = Vec::new();
    if g.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    for (f, _) in g.squarefree_decomposition()? {
        match f.degree() {
            Some(0) | None => {}
            Some(1) => out.push((-f.coeff(0) / f.coeff(1), true)),
            Some(_) => {
                for iv in f.isolate_real_roots()? {
                    let (a, b) = f.refine_root(&iv, &approx_eps());
                    out.push(((a + b) / int(2), false));
                }
            }
        }
    }
    Ok(out)
}

fn gcd_all(polys: impl IntoIterator<Item = UniPoly>) -> UniPoly {
    polys.into_iter().fold(UniPoly::zero(), |g, p| g.gcd(&p))
}

/// `p(s, 1)` as a polynomial in `s`.
fn dehom_first(p: &BiPoly) -> UniPoly {
    let mut c = vec![int(0); p.deg_x().map_or(0, |d| d as usize + 1)];
    for (m, v) in p.terms() {
        c[m.a as usize] += v;
    }
    UniPoly::new(c)
}

fn lift(p: &BiPoly) -> BiPoly<UniPoly> {
    p.map(|c| UniPoly::constant(c.clone()))
}

/// Parameters `(alpha, beta)` of `x = u + alpha v, y = beta u + v` making
/// `h` even and `mu` odd in `u`; `h` homogeneous.
fn linear_rx_candidates(h: &BiPoly, mu: &BiPoly) -> Result<Vec<Candidate>> {
    let n = dehom_first(&h.dx());
    let d = dehom_first(&h.dy());
    let s = UniPoly::new(vec![int(0), int(1)]);
    // beta = -N(alpha)/D(alpha) kills the u^1 coefficient of h; scaling u by D
    // keeps everything polynomial in alpha.
    let px = BiPoly::from_terms([(1, 0, d.clone()), (0, 1, s.mul(&d))]);
    let py = BiPoly::from_terms([(1, 0, n.neg()), (0, 1, d.clone())]);
    let emb = |c: &Rational| UniPoly::constant(c.clone());
    let g = h.compose(&px, &py, emb);
    let m = mu.compose(&px, &py, emb);
    let (bh, bm) = parity_offenders(&g, &m, Axis::Rx);
    let gg = gcd_all(bh.into_iter().chain(bm));
    let mut out = Vec::new();
    let admissible = |a: &Rational| {
        let dv = d.eval(a);
        !dv.is_zero() && !(&dv + a * n.eval(a)).is_zero()
    };
    if gg.is_zero() {
        let mut k = 0i64;
        loop {
            let a = int(if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 });
            if admissible(&a) {
                let b = -n.eval(&a) / d.eval(&a);
                out.push(Candidate { params: vec![a, b], exact: true });
                break;
            }
            k += 1;
        }
    } else {
        for (a, exact) in real_roots(&gg)? {
            if !admissible(&a) {
                continue;
            }
            let b = -n.eval(&a) / d.eval(&a);
            out.push(Candidate { params: vec![a, b], exact });
        }
    }
    // alpha where N and D both vanish leaves beta free.
    for (a, exact) in real_roots(&n.gcd(&d))? {
        let px = lift(&BiPoly::from_terms([(1, 0, int(1)), (0, 1, a.clone())]));
        let py = BiPoly::from_terms([(1, 0, s.clone()), (0, 1, UniPoly::constant(int(1)))]);
        let g = h.compose(&px, &py, emb);
        let m = mu.compose(&px, &py, emb);
        let (bh, bm) = parity_offenders(&g, &m, Axis::Rx);
        let conds: Vec<UniPoly> = bh.into_iter().chain(bm).filter(|p| !p.is_zero()).collect();
        let gg = if exact {
            gcd_all(conds)
        } else {
            // Approximate coefficients: use the lowest-degree condition and let
            // verification reject spurious roots.
            conds.into_iter().min_by_key(|p| p.degree()).unwrap_or_else(UniPoly::zero)
        };
        let betas = if gg.is_zero() { vec![(int(0), true)] } else { real_roots(&gg)? };
        for (b, eb) in betas {
            if (int(1) - &a * &b).is_zero() {
                continue;
            }
            out.push(Candidate { params: vec![a.clone(), b], exact: exact && eb });
        }
    }
    Ok(out)
}

/// Shear parameter `g` of `x = u, y = v + g u^k`.
fn shear_candidates(h: &BiPoly, mu: &BiPoly, k: u32, axis: Axis) -> Result<Vec<Candidate>> {
    let emb = |c: &Rational| UniPoly::constant(c.clone());
    let px = BiPoly::monomial(1, 0, UniPoly::constant(int(1)));
    let py = BiPoly::from_terms([(0, 1, UniPoly::constant(int(1))), (k, 0, UniPoly::new(vec![int(0), int(1)]))]);
    let g = h.compose(&px, &py, emb);
    let m = mu.compose(&px, &py, emb);
    let (bh, bm) = parity_offenders(&g, &m, axis);
    let gg = gcd_all(bh.into_iter().chain(bm));
    if gg.is_zero() {
        return Ok(vec![Candidate { params: vec![int(0)], exact: true }]);
    }
    Ok(real_roots(&gg)?.into_iter().map(|(v, exact)| Candidate { params: vec![v], exact }).collect())
}

/// `D Phi^-1 F(Phi(u))` for `Phi(u, v) = (u + al v, be u + v)`.
fn push_linear(f: &QHField, al: &Rational, be: &Rational) -> Result<QHField> {
    let px = BiPoly::from_terms([(1, 0, int(1)), (0, 1, al.clone())]);
    let py = BiPoly::from_terms([(1, 0, be.clone()), (0, 1, int(1))]);
    let p = f.p.compose(&px, &py, |c| c.clone());
    let q = f.q.compose(&px, &py, |c| c.clone());
    let det = int(1) - al * be;
    let inv = int(1) / det;
    let pn = p.sub(&q.scale(al)).scale(&inv);
    let qn = q.sub(&p.scale(be)).scale(&inv);
    QHField::new_unchecked_coprime(pn, qn, f.t)
}

/// Push-forward by `Phi(u, v) = (u, v + g u^k)`.
fn push_shear(f: &QHField, g: &Rational, k: u32) -> Result<QHField> {
    let px = BiPoly::x();
    let py = BiPoly::from_terms([(0, 1, int(1)), (k, 0, g.clone())]);
    let p = f.p.compose(&px, &py, |c| c.clone());
    let q = f.q.compose(&px, &py, |c| c.clone());
    let corr = p.mul_monomial(k - 1, 0).scale(&(g * int(k as i64)));
    QHField::new_unchecked_coprime(p, q.sub(&corr), f.t)
}

/// Relative parity defect of the decomposition of `f`.
fn parity_residual(f: &QHField, axis: Axis) -> Result<f64> {
    let d = decompose(f)?;
    let (bh, bm) = parity_offenders(&d.h, &d.mu, axis);
    if bh.is_empty() && bm.is_empty() {
        return Ok(0.0);
    }
    let size = d.h.max_abs_coeff().max(d.mu.max_abs_coeff());
    let bad = bh.iter().chain(bm.iter()).map(|c| rat_to_f64(&c.abs())).fold(0.0, f64::max);
    Ok(bad / size)
}

fn witness(f: &QHField, axis: Axis, cand: &Candidate) -> Result<Option<ReversibilityWitness>> {
    let (pushed, change) = if cand.params.len() == 2 {
        let (al, be) = (&cand.params[0], &cand.params[1]);
        let ch = DegreeZeroChange::Linear { a: -rat_to_f64(al), b: -rat_to_f64(be) };
        (push_linear(f, al, be)?, ch)
    } else {
        let g = &cand.params[0];
        let k = f.t.t2;
        (push_shear(f, g, k)?, DegreeZeroChange::Shear { beta: -rat_to_f64(g), power: k })
    };
    let residual = parity_residual(&pushed, axis)?;
    let exact = cand.exact && residual == 0.0;
    if residual > WITNESS_TOL || (cand.exact && !exact) {
        return Ok(None);
    }
    let exact_params = exact.then(|| cand.params.iter().map(|v| (-v).to_string()).collect());
    Ok(Some(ReversibilityWitness { axis, change, exact, exact_params, residual }))
}

/// Searches the degree-zero family for a change making `f` axis-reversible.
/// Returns the witness of smallest parameter norm, `None` when none exists.
pub fn is_reversible(f: &QHField) -> Result<Option<ReversibilityWitness>> {
    let dec = decompose(f)?;
    if let Some(&axis) = axis_reversible(&dec).first() {
        return Ok(Some(ReversibilityWitness {
            axis,
            change: DegreeZeroChange::Identity,
            exact: true,
            exact_params: Some(vec![]),
            residual: 0.0,
        }));
    }
    let mut found: Vec<ReversibilityWitness> = Vec::new();
    if f.t.t1 == 1 && f.t.t2 == 1 {
        for c in linear_rx_candidates(&dec.h, &dec.mu)? {
            found.extend(witness(f, Axis::Rx, &c)?);
        }
        for c in linear_rx_candidates(&dec.h.swap_xy(), &dec.mu.swap_xy())? {
            let c = Candidate { params: vec![c.params[1].clone(), c.params[0].clone()], exact: c.exact };
            found.extend(witness(f, Axis::Ry, &c)?);
        }
    } else if f.t.t1 == 1 {
        for axis in [Axis::Rx, Axis::Ry] {
            for c in shear_candidates(&dec.h, &dec.mu, f.t.t2, axis)? {
                found.extend(witness(f, axis, &c)?);
            }
        }
    }
    found.sort_by(|a, b| {
        a.change
            .norm()
            .partial_cmp(&b.change.norm())
            .unwrap()
            .then((a.axis == Axis::Ry).cmp(&(b.axis == Axis::Ry)))
    });
    Ok(found.into_iter().next())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn m(a: u32, b: u32, c: Rational) -> BiPoly {
        BiPoly::monomial(a, b, c)
    }

    fn t11() -> TypeVector {
        TypeVector::new(1, 1).unwrap()
    }

    fn circle() -> BiPoly {
        m(2, 0, int(1)).add(&m(0, 2, int(1)))
    }

    #[test]
    fn axis_parity_examples() {
        let h = circle().pow(2);
        let mu = m(1, 1, int(3));
        assert_eq!(axis_parity(&h, &mu), vec![Axis::Rx, Axis::Ry]);
        let mu = m(2, 0, int(1)).add(&m(0, 2, int(2)));
        assert!(axis_parity(&h.mul(&m(0, 2, int(1)).add(&m(2, 0, int(4)))), &mu).is_empty());
    }

    #[test]
    fn families() {
        assert_eq!(degree_zero_family(t11()).dimension, 2);
        assert_eq!(degree_zero_family(TypeVector::new(1, 2).unwrap()).form, "(x, y + beta*x^2)");
        assert_eq!(degree_zero_family(TypeVector::new(2, 3).unwrap()).dimension, 0);
    }

    #[test]
    fn s19_b1_witness_matches_closed_form() {
        for (m0, m1) in [(1i64, 0i64), (2, 3), (-1, 5), (3, -2)] {
            let mu = m(2, 0, int(m0)).add(&m(1, 1, int(m1))).add(&m(0, 2, int(-m0)));
            let f = QHField::from_parts(&circle().pow(2), &mu, t11()).unwrap();
            let w = is_reversible(&f).unwrap().expect("reversible");
            let (m0, m1) = (m0 as f64, m1 as f64);
            let disc = (m1 * m1 + 4.0 * m0 * m0).sqrt();
            let betas = [(m1 + disc) / (2.0 * m0), (m1 - disc) / (2.0 * m0)];
            let DegreeZeroChange::Linear { a, b } = w.change else { panic!("{:?}", w.change) };
            assert!(betas.iter().any(|bf| (a - bf).abs() < 1e-10), "{a} vs {betas:?}");
            assert!((a + b).abs() < 1e-10);
            assert!(w.residual <= WITNESS_TOL);
        }
    }

    #[test]
    fn form29_conditions_give_witness() {
        // mu from the beta-parametrized reversible set with beta = 2, mu0 = 1, mu1 = 1.
        let beta = rat(2, 1);
        let (m0, m1) = (int(1), int(1));
        let q = (&beta * &beta - int(1)) / &beta;
        let m2 = rat(-3, 2) * &q * (&m1 + &q * &m0);
        let b2 = &beta * &beta;
        let b4 = &b2 * &b2;
        let m3 = (&q * (&b4 - int(6) * &b2 + int(1)) * &m0 + (&b4 - int(4) * &b2 + int(1)) * &m1) / (int(2) * &b2);
        let m4 = ((&b4 - int(4) * &b2 + int(1)) / &beta * &m0 + (&b2 - int(1)) * &m1) / (int(2) * &beta);
        let mu = m(4, 0, m0)
            .add(&m(3, 1, m1))
            .add(&m(2, 2, m2))
            .add(&m(1, 3, m3.clone()))
            .add(&m(0, 4, m4));
        let f = QHField::from_parts(&circle().pow(3), &mu, t11()).unwrap();
        let w = is_reversible(&f).unwrap().expect("reversible");
        assert!(w.residual <= WITNESS_TOL);
        let mu_off = mu.add(&m(1, 3, rat(1, 10)));
        let g = QHField::from_parts(&circle().pow(3), &mu_off, t11()).unwrap();
        assert_eq!(is_reversible(&g).unwrap(), None);
    }

    #[test]
    fn form30_center_not_reversible() {
        // B = 2: centre iff 8 mu4 + 2(mu0 + mu2 + mu4) + 2 mu0 = 0.
        let h = circle().pow(2).mul(&m(0, 2, int(1)).add(&m(2, 0, int(4))));
        let (m0, m2) = (int(1), int(1));
        let m4 = -(int(4) * &m0 + int(2) * &m2) / int(10);
        let mu = m(4, 0, m0).add(&m(2, 2, m2)).add(&m(0, 4, m4)).add(&m(3, 1, int(1)));
        let f = QHField::from_parts(&h, &mu, t11()).unwrap();
        assert!(crate::classify(&f).unwrap().label.is_center());
        assert_eq!(is_reversible(&f).unwrap(), None);
    }

    #[test]
    fn shear_t12() {
        // h = x((y - x^2)^2 + x^4), mu = y - x^2 become h = u(v^2 + u^4), mu = v
        // under v = y - x^2.
        let t = TypeVector::new(1, 2).unwrap();
        let yy = m(0, 1, int(1)).sub(&m(2, 0, int(1)));
        let h = BiPoly::x().mul(&yy.pow(2).add(&m(4, 0, int(1))));
        let f = QHField::from_parts(&h, &yy, t).unwrap();
        assert!(axis_reversible(&decompose(&f).unwrap()).is_empty());
        let w = is_reversible(&f).unwrap().expect("reversible");
        assert_eq!(w.axis, Axis::Ry);
        assert!(w.exact);
        assert!(matches!(w.change, DegreeZeroChange::Shear { beta, power: 2 } if (beta + 1.0).abs() < 1e-12));
    }

    #[test]
    fn time_rescale_invariance() {
        let mu = m(2, 0, int(2)).add(&m(1, 1, int(1))).add(&m(0, 2, int(-2)));
        let f = QHField::from_parts(&circle().pow(2), &mu, t11()).unwrap();
        let a = is_reversible(&f).unwrap().map(|w| w.change);
        let b = is_reversible(&f.scaled(&rat(7, 3))).unwrap().map(|w| w.change);
        assert_eq!(a, b);
    }
}
