//! First Lyapunov quantity `f0` by complex residues and the resulting
//! center / focus label.
//!
//! For `t = (1,1)`, `f0 = -2 pi sum_{Im l > 0} Im Res[mu_hom(1,Y) / h_hom(1,Y), l]`.
//! For a general type the angular integral `int mu/h dtheta` over one turn of
//! the generalized trigonometric orbit equals
//! `(I(+1) + I(-1)) / (2 t2)` with `I(s) = int_R mu(s,y) / h(s,y) dy`,
//! which reduces to the formula above when `t = (1,1)`.  Each `I(s)` is
//! evaluated by residues in the upper half-plane.

use crate::decomposition::{decompose, Decomposition, QHField};
use crate::error::{Error, Result};
use crate::monodromy::{is_monodromic, MonodromyReason};
use crate::poly::{BiPoly, QComplex, Rational, Ring, TypeVector, UniPoly};
use crate::precision::{qc_div, qc_from_rat, qc_to_c64, round_c, Precision};
use crate::roots::{complex_roots, ComplexRoot, ComplexRootSet, RootSummary};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Label {
    GlobalCenter,
    StableFocus,
    UnstableFocus,
    NonMonodromic,
}

impl Label {
    pub fn is_center(&self) -> bool {
        *self == Label::GlobalCenter
    }
    pub fn is_focus(&self) -> bool {
        matches!(self, Label::StableFocus | Label::UnstableFocus)
    }
}

/// Orientation of the stability rule: the focus is unstable iff
/// `STABILITY_ORIENTATION * sign(h) * f0 > 0`.  Fixed by the Poincaré-map
/// oracle on the reference focus `h = (y^2+x^2)(y^2+4x^2)`,
/// `mu = 2x^2 + y^2` (see the oracle calibration test).
pub const STABILITY_ORIENTATION: f64 = 1.0;

pub const SIGN_BASIS: &str =
    "unstable iff sign(h)*f0 > 0; orientation calibrated by Poincare return map on h=(y^2+x^2)(y^2+4x^2), mu=2x^2+y^2";

/// Default relative zero threshold for `f0`.
pub const ZERO_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ResidueEntry {
    pub root: RootSummary,
    pub residue_re: f64,
    pub residue_im: f64,
}

/// `f0` together with the data it was computed from.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct F0 {
    pub value: f64,
    /// `(2 pi / (2 t2)) * sum |c_k|` over every principal-part coefficient at
    /// the contributing poles; the unit in which the zero threshold is
    /// measured.  Positive whenever `mu != 0`, even with a single pole.
    pub scale: f64,
    /// Residue sum on the homogeneous associate, `-2 pi sum Im Res[mu_hom/h_hom]`.
    pub associate_value: f64,
    /// Imaginary part left over by the real-axis integrals (should vanish).
    pub imaginary_residual: f64,
    pub digits: u32,
    pub residual_bound: f64,
    pub residues: Vec<ResidueEntry>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Verdict {
    pub t: TypeVector,
    pub r: i64,
    pub monodromic: bool,
    pub reason: MonodromyReason,
    pub f0: Option<F0>,
    pub label: Label,
    pub h_sign: i32,
    pub sign_basis: &'static str,
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub precision: Precision,
    pub zero_threshold: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { precision: Precision::default(), zero_threshold: ZERO_THRESHOLD }
    }
}

/// Residue of `num/den` at a root of `den` of the given multiplicity, from
/// Taylor expansions at the root.
pub fn residue_at(num: &UniPoly, den: &UniPoly, root: &ComplexRoot, bits: u64) -> QComplex {
    principal_part(num, den, root, bits).pop().unwrap_or_else(QComplex::zero)
}

/// Laurent coefficients of `num/den` at the root, from `(z-l)^-m` up to the residue.
pub fn principal_part(num: &UniPoly, den: &UniPoly, root: &ComplexRoot, bits: u64) -> Vec<QComplex> {
    let lam = &root.value;
    let m = root.multiplicity as usize;
    let shift = |p: &UniPoly| -> Vec<QComplex> {
        let pc = p.map(qc_from_rat);
        let s = pc.taylor_shift(lam);
        (0..=p.degree().unwrap_or(0)).map(|i| round_c(&s.coeff(i), bits)).collect()
    };
    let n = shift(num);
    let d: Vec<QComplex> = shift(den).into_iter().skip(m).collect();
    // Series quotient n / d up to e^(m-1).
    let mut c: Vec<QComplex> = Vec::with_capacity(m);
    for j in 0..m {
        let mut acc = n.get(j).cloned().unwrap_or_else(QComplex::zero);
        for i in 1..=j {
            if let Some(di) = d.get(i) {
                acc = acc.sub(&round_c(&di.mul(&c[j - i]), bits));
            }
        }
        c.push(qc_div(&acc, &d[0], bits));
    }
    c
}

pub struct UpperResidues {
    pub roots: ComplexRootSet,
    pub residues: Vec<(ComplexRoot, Complex64)>,
    /// Sum of the moduli of every principal-part coefficient.
    pub principal_norm: f64,
}

/// Residues of `num/den` at every root of `den` with positive imaginary part.
pub fn upper_residues(num: &UniPoly, den: &UniPoly, prec: Precision) -> Result<UpperResidues> {
    let roots = complex_roots(den, prec)?;
    let bits = prec.bits();
    let mut principal_norm = 0.0;
    let mut residues = Vec::new();
    for r in roots.upper() {
        let mut c = principal_part(num, den, r, bits);
        let res = c.pop().unwrap_or_else(QComplex::zero);
        principal_norm += c.iter().map(|z| qc_to_c64(z).norm()).sum::<f64>();
        let res = qc_to_c64(&res);
        principal_norm += res.norm();
        residues.push((r.clone(), res));
    }
    Ok(UpperResidues { roots, residues, principal_norm })
}

/// Residues of `num/den` at every root of `den`.
pub fn all_residues(num: &UniPoly, den: &UniPoly, prec: Precision) -> Result<Vec<(ComplexRoot, Complex64)>> {
    let roots = complex_roots(den, prec)?;
    let bits = prec.bits();
    Ok(roots
        .roots
        .iter()
        .map(|r| (r.clone(), qc_to_c64(&residue_at(num, den, r, bits))))
        .collect())
}

/// `p(s, y)` as a polynomial in `y`.
pub fn slice_at_x(p: &BiPoly, s: i64) -> UniPoly {
    let deg = p.deg_y().unwrap_or(0) as usize;
    let mut c = vec![Rational::zero(); deg + 1];
    for (m, v) in p.terms() {
        let sign = if s < 0 && m.a % 2 == 1 { v.neg() } else { v.clone() };
        c[m.b as usize] = c[m.b as usize].add(&sign);
    }
    UniPoly::new(c)
}

/// `f0` for a monodromic decomposition.
pub fn residue_f0(dec: &Decomposition, prec: Precision) -> Result<F0> {
    let mono = is_monodromic(dec)?;
    if !mono.monodromic {
        return Err(Error::NotMonodromic(mono.reason.describe().into()));
    }
    let (digits, mut residual_bound) = (prec.digits, 0.0f64);
    if dec.mu.is_zero() {
        return Ok(F0 {
            value: 0.0,
            scale: 0.0,
            associate_value: 0.0,
            imaginary_residual: 0.0,
            digits,
            residual_bound,
            residues: vec![],
        });
    }
    let t2 = dec.t.t2 as f64;
    let (mut total, mut scale, mut imag) = (0.0, 0.0, 0.0);
    let mut entries = Vec::new();
    for s in [1i64, -1] {
        let num = slice_at_x(&dec.mu, s);
        let den = slice_at_x(&dec.h, s);
        let up = upper_residues(&num, &den, prec)?;
        residual_bound = residual_bound.max(up.roots.residual_bound);
        for (_, res) in &up.residues {
            total += -2.0 * PI * res.im;
            imag += 2.0 * PI * res.re;
        }
        scale += 2.0 * PI * up.principal_norm;
        if s == 1 {
            entries = up
                .residues
                .iter()
                .map(|(r, res)| {
                    let z = r.approx();
                    ResidueEntry {
                        root: RootSummary { re: z.re, im: z.im, multiplicity: r.multiplicity },
                        residue_re: res.re,
                        residue_im: res.im,
                    }
                })
                .collect();
        }
    }
    let associate_value = associate_f0(dec, prec)?;
    Ok(F0 {
        value: total / (2.0 * t2),
        scale: scale / (2.0 * t2),
        associate_value,
        imaginary_residual: imag.abs() / (2.0 * t2),
        digits,
        residual_bound,
        residues: entries,
    })
}

/// `-2 pi sum_{Im l > 0} Im Res[mu_hom(1,Y)/h_hom(1,Y), l]` on the associates.
pub fn associate_f0(dec: &Decomposition, prec: Precision) -> Result<f64> {
    let (Some(h), Some(mu)) = (&dec.h_assoc, &dec.mu_assoc) else {
        return Ok(0.0);
    };
    let up = upper_residues(&mu.hom, &h.hom, prec)?;
    Ok(up.residues.iter().map(|(_, r)| -2.0 * PI * r.im).sum())
}

/// Sign of `h` away from the origin (`h` is definite when monodromic).
pub fn h_sign(h: &BiPoly) -> i32 {
    let v = h.eval(&Rational::one(), &Rational::zero());
    let v = if v.is_zero() { h.eval(&Rational::zero(), &Rational::one()) } else { v };
    if v > Rational::zero() {
        1
    } else if v < Rational::zero() {
        -1
    } else {
        0
    }
}

pub fn label_from_f0(f0: &F0, h_sign: i32, threshold: f64) -> Label {
    if f0.value.abs() <= threshold * f0.scale {
        Label::GlobalCenter
    } else if STABILITY_ORIENTATION * h_sign as f64 * f0.value > 0.0 {
        Label::UnstableFocus
    } else {
        Label::StableFocus
    }
}

pub fn classify_decomposition(dec: &Decomposition, opts: &ClassifyOptions) -> Result<Verdict> {
    let mono = is_monodromic(dec)?;
    let sign = h_sign(&dec.h);
    if !mono.monodromic {
        return Ok(Verdict {
            t: dec.t,
            r: dec.r,
            monodromic: false,
            reason: mono.reason,
            f0: None,
            label: Label::NonMonodromic,
            h_sign: sign,
            sign_basis: SIGN_BASIS,
        });
    }
    let f0 = residue_f0(dec, opts.precision)?;
    let label = label_from_f0(&f0, sign, opts.zero_threshold);
    Ok(Verdict {
        t: dec.t,
        r: dec.r,
        monodromic: true,
        reason: mono.reason,
        f0: Some(f0),
        label,
        h_sign: sign,
        sign_basis: SIGN_BASIS,
    })
}

pub fn classify(f: &QHField) -> Result<Verdict> {
    classify_with(f, &ClassifyOptions::default())
}

pub fn classify_with(f: &QHField, opts: &ClassifyOptions) -> Result<Verdict> {
    classify_decomposition(&decompose(f)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn m(a: u32, b: u32, c: Rational) -> BiPoly {
        BiPoly::monomial(a, b, c)
    }

    fn tv(a: u32, b: u32) -> TypeVector {
        TypeVector::new(a, b).unwrap()
    }

    /// Form (19): h = (y^2+x^2)(y^2+B^2 x^2), mu = mu0 x^2 + mu1 xy + mu2 y^2.
    fn form19(b: Rational, mu: [Rational; 3]) -> QHField {
        let x2 = m(2, 0, int(1));
        let y2 = m(0, 2, int(1));
        let h = y2.add(&x2).mul(&y2.add(&x2.scale(&(&b * &b))));
        let mu = m(2, 0, mu[0].clone()).add(&m(1, 1, mu[1].clone())).add(&m(0, 2, mu[2].clone()));
        QHField::from_parts(&h, &mu, tv(1, 1)).unwrap()
    }

    #[test]
    fn reference_focus_value() {
        let f = form19(int(2), [int(2), int(0), int(1)]);
        let v = classify(&f).unwrap();
        let f0 = v.f0.unwrap();
        assert!((f0.value - 2.0 * PI / 3.0).abs() < 1e-12, "{}", f0.value);
        assert!((f0.associate_value - f0.value).abs() < 1e-12);
        assert!(f0.imaginary_residual < 1e-12);
        assert_eq!(v.label, Label::UnstableFocus);
    }

    #[test]
    fn center_condition_of_form19() {
        let f = form19(int(2), [int(1), int(5), rat(-1, 2)]);
        let v = classify(&f).unwrap();
        assert_eq!(v.label, Label::GlobalCenter);
        assert!(v.f0.unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_is_center() {
        let f = form19(int(3), [int(0), int(0), int(0)]);
        assert_eq!(classify(&f).unwrap().label, Label::GlobalCenter);
    }

    #[test]
    fn linear_center_and_focus() {
        // x' = a10 x - y, y' = x + b01 y
        let f = QHField::new(m(1, 0, int(0)).add(&m(0, 1, int(-1))), m(1, 0, int(1)), tv(1, 1)).unwrap();
        assert_eq!(classify(&f).unwrap().label, Label::GlobalCenter);
        let f = QHField::new(m(1, 0, int(1)).add(&m(0, 1, int(-1))), m(1, 0, int(1)), tv(1, 1)).unwrap();
        let v = classify(&f).unwrap();
        assert_eq!(v.label, Label::UnstableFocus);
        // int_R dy / (y^2 - y + 1) = 2 pi / sqrt(3)
        assert!((v.f0.unwrap().value - 2.0 * PI / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn double_root_residue() {
        // Res[(Y + 3) / (Y^2 + 1)^2, i] = -3i/4
        let num = UniPoly::from_ints(&[3, 1]);
        let den = UniPoly::from_ints(&[1, 0, 1]).pow(2);
        let up = upper_residues(&num, &den, Precision::default()).unwrap();
        assert_eq!(up.residues.len(), 1);
        let r = up.residues[0].1;
        assert!(r.re.abs() < 1e-30 && (r.im + 0.75).abs() < 1e-15, "{r}");
    }

    #[test]
    fn non_monodromic_label() {
        let f = QHField::new(BiPoly::x(), BiPoly::y(), tv(1, 1)).unwrap();
        let v = classify(&f).unwrap();
        assert_eq!(v.label, Label::NonMonodromic);
        assert_eq!(v.reason, MonodromyReason::ZeroHamiltonian);
    }
}
