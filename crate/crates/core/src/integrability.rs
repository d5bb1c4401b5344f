//! Analytic integrability: the Hamiltonian case, the multiple-factor
//! obstruction, and the residue criterion with a product first integral
//! `U = prod (y^t1 - l_j x^t2)^(n_j + 1)`.
//!
//! Only monodromic `h` is handled by the residue search (no `x` or `y`
//! factor), so the exponents on `x` and `y` never appear.  For a simple root
//! `l_i` of `h_hom(1,Y)` with residue `R_i` of `mu_hom(1,Y)/h_hom(1,Y)`, the
//! exponent is `e_i = n_i + 1 = s (1 - R_i) / m` where `m` is the number of
//! factors and `M0 = t1 t2 s`.

use crate::classification::{all_residues, classify_decomposition, ClassifyOptions};
use crate::decomposition::Decomposition;
use crate::error::Result;
use crate::monodromy::is_monodromic;
use crate::poly::{int, BiPoly, Rational, TypeVector, UniPoly};
use crate::precision::Precision;
use crate::roots::RootSummary;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    IntegrableHamiltonian,
    IntegrableCertificate,
    NotIntegrable,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Obstruction {
    /// `h` has a repeated factor and `mu != 0`.
    MultipleFactor,
    /// No exponent vector within the search bound.
    ResidueSearchExhausted,
    /// A residue is not real, so no real exponents exist.
    NonRealResidue,
    /// The origin is a focus; a focus has no non-constant continuous first
    /// integral.  Used only where the residue criterion does not apply.
    Focus,
}

/// A factor of `U` with rational coefficients and its exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupedFactor {
    pub poly: String,
    pub exponent: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstIntegral {
    /// `n_j` for each root `l_j` of `h_hom(1,Y)`, in root order.
    pub exponents: Vec<u64>,
    pub roots: Vec<RootSummary>,
    /// Weighted degree of `U`.
    pub m0: u64,
    /// `U` as a product of rational factors.
    pub factors: Vec<GroupedFactor>,
    /// `grad U . F = 0` was checked as an exact polynomial identity.
    pub verified_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrabilityResult {
    pub status: Status,
    pub certificate: Option<FirstIntegral>,
    pub obstruction: Option<Obstruction>,
    /// Why the result is inconclusive, when it is.
    pub reason: Option<String>,
}

impl IntegrabilityResult {
    fn not_integrable(o: Obstruction) -> Self {
        IntegrabilityResult { status: Status::NotIntegrable, certificate: None, obstruction: Some(o), reason: None }
    }

    fn inconclusive(reason: impl Into<String>) -> Self {
        IntegrabilityResult { status: Status::Inconclusive, certificate: None, obstruction: None, reason: Some(reason.into()) }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchBounds {
    /// `s` ranges over `m ..= max_multiple * m`.
    pub max_multiple: u64,
    pub integrality_tol: f64,
    pub precision: Precision,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_multiple: 200, integrality_tol: 1e-8, precision: Precision::default() }
    }
}

/// `F = X_h + mu D0` rebuilt from the decomposition.
fn field_of(dec: &Decomposition) -> (BiPoly, BiPoly) {
    dec.reconstruct()
}

fn lie_derivative(u: &BiPoly, p: &BiPoly, q: &BiPoly) -> BiPoly {
    u.dx().mul(p).add(&u.dy().mul(q))
}

/// Certificate `U = h` when `mu = 0`.
pub fn is_hamiltonian_integrable(dec: &Decomposition) -> Option<FirstIntegral> {
    if !dec.mu.is_zero() || dec.h.is_zero() {
        return None;
    }
    let (p, q) = field_of(dec);
    let verified = lie_derivative(&dec.h, &p, &q).is_zero();
    let m0 = (dec.r + dec.t.norm() as i64) as u64;
    Some(FirstIntegral {
        exponents: vec![],
        roots: vec![],
        m0,
        factors: vec![GroupedFactor { poly: dec.h.to_string(), exponent: 1 }],
        verified_exact: verified,
    })
}

/// True iff `h` has a repeated factor (including powers of `x` or `y`), `h`
/// is not constant and `mu != 0`.
pub fn multiple_factor_obstruction(dec: &Decomposition) -> Result<bool> {
    if dec.h.is_zero() || dec.mu.is_zero() || dec.h.total_degree() == Some(0) {
        return Ok(false);
    }
    let s = crate::monodromy::factor_structure(&dec.h, dec.t)?;
    Ok(s.has_multiple_factor())
}

/// `G(x^t2, y^t1)` for `G(X, Y)` homogeneous of degree `k` given by `G(1, Y)`.
fn expand_hom(g: &UniPoly, k: usize, t: TypeVector) -> BiPoly {
    let mut out = BiPoly::zero();
    for (j, c) in g.coeffs().iter().enumerate() {
        out.add_term(t.t2 * (k - j) as u32, t.t1 * j as u32, c.clone());
    }
    out
}

/// Splits `h_hom(1,Y)` by exponent class and checks `grad U . F = 0` exactly.
fn exact_certificate(
    dec: &Decomposition,
    hh: &UniPoly,
    muh: &UniPoly,
    s: u64,
    m: u64,
    exps: &[u64],
) -> Option<Vec<(BiPoly, u64)>> {
    let mut classes: Vec<u64> = exps.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let dh = hh.derivative();
    let mut groups = Vec::new();
    let mut total = 0usize;
    for &e in &classes {
        // Roots with exponent e are the common roots of h_hom and
        // mu_hom - R_e h_hom', where R_e = 1 - e m / s.
        let re = int(1) - Rational::new((e * m).into(), s.into());
        let g = hh.gcd(&muh.sub(&dh.scale(&re)));
        let k = g.degree().unwrap_or(0);
        if k != exps.iter().filter(|&&x| x == e).count() {
            return None;
        }
        total += k;
        groups.push((expand_hom(&g, k, dec.t), e));
    }
    if total != hh.degree().unwrap_or(0) {
        return None;
    }
    let (p, q) = field_of(dec);
    let mut sum = BiPoly::zero();
    for (i, (g, e)) in groups.iter().enumerate() {
        let mut term = lie_derivative(g, &p, &q).scale(&int(*e as i64));
        for (j, (g2, _)) in groups.iter().enumerate() {
            if i != j {
                term = term.mul(g2);
            }
        }
        sum = sum.add(&term);
    }
    sum.is_zero().then_some(groups)
}

/// The residue criterion for monodromic `h` with at least three simple factors.
pub fn residue_search(dec: &Decomposition, bounds: &SearchBounds) -> Result<IntegrabilityResult> {
    if dec.mu.is_zero() {
        return Ok(integrability(dec)?);
    }
    let mono = is_monodromic(dec)?;
    if !mono.monodromic {
        return Ok(IntegrabilityResult::inconclusive("h is not monodromic; the residue search is restricted to monodromic h"));
    }
    let st = mono.structure.expect("monodromic has structure");
    if st.has_multiple_factor() {
        return Ok(IntegrabilityResult::inconclusive("h has a multiple factor; the residue criterion needs simple factors"));
    }
    let m = st.distinct_factor_count() as u64;
    if m <= 2 {
        return Ok(IntegrabilityResult::inconclusive(format!(
            "h has {m} simple factors; the residue criterion needs more than two"
        )));
    }
    let hh = &dec.h_assoc.as_ref().expect("h != 0").hom;
    let muh = &dec.mu_assoc.as_ref().expect("mu != 0").hom;
    let res = all_residues(muh, hh, bounds.precision)?;
    let tol = bounds.integrality_tol;
    if res.iter().any(|(_, r)| r.im.abs() > tol * r.norm().max(1.0)) {
        return Ok(IntegrabilityResult::not_integrable(Obstruction::NonRealResidue));
    }
    let roots: Vec<RootSummary> = res
        .iter()
        .map(|(r, _)| {
            let z = r.approx();
            RootSummary { re: z.re, im: z.im, multiplicity: r.multiplicity }
        })
        .collect();
    let t12 = (dec.t.t1 * dec.t.t2) as u64;
    for s in m..=bounds.max_multiple * m {
        let mut exps = Vec::with_capacity(res.len());
        for (_, r) in &res {
            let e = s as f64 * (1.0 - r.re) / m as f64;
            let k = e.round();
            if k < 1.0 || (e - k).abs() > tol * e.abs().max(1.0) {
                break;
            }
            exps.push(k as u64);
        }
        if exps.len() != res.len() || exps.iter().sum::<u64>() != s {
            continue;
        }
        if let Some(groups) = exact_certificate(dec, hh, muh, s, m, &exps) {
            let cert = FirstIntegral {
                exponents: exps.iter().map(|e| e - 1).collect(),
                roots,
                m0: t12 * s,
                factors: groups.iter().map(|(g, e)| GroupedFactor { poly: g.to_string(), exponent: *e }).collect(),
                verified_exact: true,
            };
            return Ok(IntegrabilityResult {
                status: Status::IntegrableCertificate,
                certificate: Some(cert),
                obstruction: None,
                reason: None,
            });
        }
    }
    Ok(IntegrabilityResult::not_integrable(Obstruction::ResidueSearchExhausted))
}

/// Full decision: Hamiltonian, then the multiple-factor obstruction, then the
/// residue criterion.  Where the criterion does not apply, a focus is still
/// reported as not integrable.
pub fn integrability(dec: &Decomposition) -> Result<IntegrabilityResult> {
    integrability_with(dec, &SearchBounds::default())
}

pub fn integrability_with(dec: &Decomposition, bounds: &SearchBounds) -> Result<IntegrabilityResult> {
    if let Some(c) = is_hamiltonian_integrable(dec) {
        return Ok(IntegrabilityResult {
            status: Status::IntegrableHamiltonian,
            certificate: Some(c),
            obstruction: None,
            reason: None,
        });
    }
    if multiple_factor_obstruction(dec)? {
        return Ok(IntegrabilityResult::not_integrable(Obstruction::MultipleFactor));
    }
    let r = residue_search(dec, bounds)?;
    if r.status == Status::Inconclusive {
        let v = classify_decomposition(dec, &ClassifyOptions { precision: bounds.precision, ..Default::default() })?;
        if v.label.is_focus() {
            return Ok(IntegrabilityResult::not_integrable(Obstruction::Focus));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{decompose, QHField};
    use crate::poly::rat;

    fn m(a: u32, b: u32, c: Rational) -> BiPoly {
        BiPoly::monomial(a, b, c)
    }

    fn tv(a: u32, b: u32) -> TypeVector {
        TypeVector::new(a, b).unwrap()
    }

    fn bracket(a: &BiPoly, b: &BiPoly) -> BiPoly {
        a.dx().mul(&b.dy()).sub(&a.dy().mul(&b.dx()))
    }

    /// Field with first integral `f1^e1 f2^e2`, `h = f1 f2`.
    fn integrable_pair(f1: &BiPoly, f2: &BiPoly, e1: i64, e2: i64, t: TypeVector) -> Decomposition {
        let w = crate::poly::qh_degree(f1, t).unwrap().unwrap() as i64;
        let m0 = w * (e1 + e2);
        let mu = bracket(f1, f2).scale(&rat(e1 - e2, m0));
        let f = QHField::from_parts(&f1.mul(f2), &mu, t).unwrap();
        decompose(&f).unwrap()
    }

    #[test]
    fn hamiltonian_certificate() {
        // x' = y, y' = x^4 with t = (2,5)
        let f = QHField::new(m(0, 1, int(1)), m(4, 0, int(1)), tv(2, 5)).unwrap();
        let d = decompose(&f).unwrap();
        let r = integrability(&d).unwrap();
        assert_eq!(r.status, Status::IntegrableHamiltonian);
        assert!(r.certificate.unwrap().verified_exact);
    }

    #[test]
    fn repeated_factor_blocks_integral() {
        let c = m(2, 0, int(1)).add(&m(0, 2, int(1)));
        let f = QHField::from_parts(&c.pow(3), &m(4, 0, int(1)), tv(1, 1)).unwrap();
        let d = decompose(&f).unwrap();
        assert!(multiple_factor_obstruction(&d).unwrap());
        assert_eq!(integrability(&d).unwrap().obstruction, Some(Obstruction::MultipleFactor));
    }

    #[test]
    fn form19_nonreal_residue() {
        // B = 2, mu = (-2, 0, 1): residue at i is i/2.
        let h = m(2, 0, int(1)).add(&m(0, 2, int(1))).mul(&m(2, 0, int(4)).add(&m(0, 2, int(1))));
        let mu = m(2, 0, int(-2)).add(&m(0, 2, int(1)));
        let d = decompose(&QHField::from_parts(&h, &mu, tv(1, 1)).unwrap()).unwrap();
        let r = integrability(&d).unwrap();
        assert_eq!(r.obstruction, Some(Obstruction::NonRealResidue));
    }

    #[test]
    fn product_integral_found_t11() {
        // (x^2+y^2)^2 (y^2+4x^2) is a first integral with mu = -2xy.
        let f1 = m(2, 0, int(1)).add(&m(0, 2, int(1)));
        let f2 = m(2, 0, int(4)).add(&m(0, 2, int(1)));
        let d = integrable_pair(&f1, &f2, 2, 1, tv(1, 1));
        assert_eq!(d.mu, m(1, 1, int(-2)));
        let r = integrability(&d).unwrap();
        assert_eq!(r.status, Status::IntegrableCertificate);
        let c = r.certificate.unwrap();
        assert_eq!(c.m0, 6);
        assert!(c.verified_exact);
    }

    #[test]
    fn product_integral_found_other_types() {
        for (t, f1, f2) in [
            (tv(1, 2), m(4, 0, int(1)).add(&m(0, 2, int(1))), m(4, 0, int(4)).add(&m(0, 2, int(1)))),
            (tv(2, 3), m(6, 0, int(1)).add(&m(0, 4, int(1))), m(6, 0, int(4)).add(&m(0, 4, int(1)))),
            (tv(1, 3), m(6, 0, int(1)).add(&m(0, 2, int(1))), m(6, 0, int(9)).add(&m(0, 2, int(1)))),
        ] {
            let d = integrable_pair(&f1, &f2, 3, 1, t);
            let r = integrability(&d).unwrap();
            assert_eq!(r.status, Status::IntegrableCertificate, "{t}");
        }
    }

    #[test]
    fn form31_with_mu_not_integrable() {
        let q = |a: i64, b: i64| m(0, 2, int(1)).add(&m(1, 1, int(-2 * a))).add(&m(2, 0, int(a * a + b * b)));
        let h = q(0, 1).mul(&q(0, 2)).mul(&q(1, 1));
        let mu = m(4, 0, int(1)).add(&m(1, 3, int(2)));
        let d = decompose(&QHField::from_parts(&h, &mu, tv(1, 1)).unwrap()).unwrap();
        assert_eq!(integrability(&d).unwrap().status, Status::NotIntegrable);
        let d0 = decompose(&QHField::from_parts(&h, &BiPoly::zero(), tv(1, 1)).unwrap()).unwrap();
        assert_eq!(integrability(&d0).unwrap().status, Status::IntegrableHamiltonian);
    }

    #[test]
    fn linear_focus_uses_focus_branch() {
        let f = QHField::new(m(1, 0, int(1)).sub(&m(0, 1, int(1))), m(1, 0, int(1)), tv(1, 1)).unwrap();
        let r = integrability(&decompose(&f).unwrap()).unwrap();
        assert_eq!(r.obstruction, Some(Obstruction::Focus));
    }
}
