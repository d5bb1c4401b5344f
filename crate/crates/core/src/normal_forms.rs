//! Canonical forms of monodromic homogeneous fields (`t = (1,1)`) of
//! degrees 2 and 4 under linear changes and positive time rescaling.
//!
//! Under `u = M x` and `tau = c t`, the decomposition transforms as
//! `h~ = det(M)/c * h(M^-1 u)` and `mu~ = mu(M^-1 u)/c`.  The roots
//! `l = y/x` of `h` move by the real Möbius map
//! `l -> (m22 l + m21) / (m12 l + m11)`, so choosing `M` amounts to moving
//! the upper half-plane roots to `i`, `iB` and `A + iC`.

use crate::decomposition::{decompose, homogeneous_associate, QHField};
use crate::error::{Error, Result};
use crate::monodromy::factor_structure;
use crate::poly::{BiPoly, TypeVector};
use crate::precision::Precision;
use crate::roots::complex_roots;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearChange {
    /// `u = m[0][0] x + m[0][1] y`, `v = m[1][0] x + m[1][1] y`.
    pub m: [[f64; 2]; 2],
    /// Time rescale `tau = c t`, `c > 0`.
    pub c: f64,
}

impl LinearChange {
    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse_matrix(&self) -> [[f64; 2]; 2] {
        let d = self.det();
        [[self.m[1][1] / d, -self.m[0][1] / d], [-self.m[1][0] / d, self.m[0][0] / d]]
    }

    /// `p(M^-1 u)` as a polynomial in `u = (x, y)`.
    pub fn pull(&self, p: &BiPoly<f64>) -> BiPoly<f64> {
        let n = self.inverse_matrix();
        let px = BiPoly::from_terms([(1, 0, n[0][0]), (0, 1, n[0][1])]);
        let py = BiPoly::from_terms([(1, 0, n[1][0]), (0, 1, n[1][1])]);
        p.compose(&px, &py, |c| *c)
    }

    /// Transforms a decomposition `(h, mu)`.
    pub fn apply(&self, h: &BiPoly<f64>, mu: &BiPoly<f64>) -> (BiPoly<f64>, BiPoly<f64>) {
        let hs = self.pull(h).scale(&(self.det() / self.c));
        let ms = self.pull(mu).scale(&(1.0 / self.c));
        (hs, ms)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum FormKind {
    /// `h = (y^2 + x^2)(y^2 + B^2 x^2)`.
    Form19 { b: f64 },
    /// `h = (x^2 + y^2)^3`.
    Form29,
    /// `h = (x^2 + y^2)^2 (y^2 + B^2 x^2)`.
    Form30 { b: f64 },
    /// `h = (x^2 + y^2)(y^2 + B^2 x^2)((y - A x)^2 + C^2 x^2)`.
    Form31 { a: f64, b: f64, c: f64 },
}

impl FormKind {
    /// The canonical `h` of this kind.
    pub fn h(&self) -> BiPoly<f64> {
        let circle = BiPoly::from_terms([(2, 0, 1.0), (0, 2, 1.0)]);
        let ell = |b: f64| BiPoly::from_terms([(2, 0, b * b), (0, 2, 1.0)]);
        match *self {
            FormKind::Form19 { b } => circle.mul(&ell(b)),
            FormKind::Form29 => circle.pow(3),
            FormKind::Form30 { b } => circle.pow(2).mul(&ell(b)),
            FormKind::Form31 { a, b, c } => {
                let q = BiPoly::from_terms([(2, 0, a * a + c * c), (1, 1, -2.0 * a), (0, 2, 1.0)]);
                circle.mul(&ell(b)).mul(&q)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalForm {
    pub kind: FormKind,
    /// Coefficients of `mu~` from `x^n` down to `y^n`.
    pub mu: Vec<f64>,
    pub change: LinearChange,
    /// Largest coefficient deviation of the transformed `h` from the target,
    /// relative to the target's largest coefficient.
    pub residual: f64,
}

/// Upper half-plane roots `a + i b` of `h(1, Y)` with multiplicities.
pub fn real_quadratic_factors(h: &BiPoly) -> Result<Vec<(f64, f64, u32)>> {
    let t = TypeVector { t1: 1, t2: 1 };
    let s = factor_structure(h, t)?;
    if s.m_x > 0 || s.m_y > 0 || s.degree_deficit > 0 || s.real_root_count > 0 {
        return Err(Error::NotMonodromic("h has a real linear factor".into()));
    }
    let hom = homogeneous_associate(h, t)?.hom;
    let roots = complex_roots(&hom, Precision::default())?;
    let mut out: Vec<(f64, f64, u32)> = roots
        .upper()
        .map(|r| {
            let z = r.approx();
            (z.re, z.im, r.multiplicity)
        })
        .collect();
    out.sort_by(|p, q| (p.1, p.0).partial_cmp(&(q.1, q.0)).unwrap());
    Ok(out)
}

type Mat = [[f64; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn mobius(t: &Mat, z: Complex64) -> Complex64 {
    (t[0][0] * z + t[0][1]) / (t[1][0] * z + t[1][1])
}

/// Möbius matrix sending `l1 -> i` and, when given, `l2` onto the imaginary
/// axis (above `i` if `up`, below otherwise).  Returns the matrix and the
/// image of `l2`'s imaginary part.
fn normalizing_mobius(l1: Complex64, l2: Option<Complex64>, up: bool) -> (Mat, f64) {
    let a1: Mat = [[1.0, -l1.re], [0.0, l1.im]];
    let Some(l2) = l2 else {
        return (a1, 1.0);
    };
    let w = mobius(&a1, l2);
    let i = Complex64::new(0.0, 1.0);
    let zeta = (w - i) / (w + i);
    let rho = zeta.norm();
    let target = if up { 0.0 } else { std::f64::consts::PI };
    let psi = target - zeta.arg();
    let (s, c) = (psi / 2.0).sin_cos();
    let r: Mat = [[c, s], [-s, c]];
    let b = if up { (1.0 + rho) / (1.0 - rho) } else { (1.0 - rho) / (1.0 + rho) };
    (mat_mul(&r, &a1), b)
}

/// Builds the change for Möbius matrix `t` and fixes orientation and time
/// scale so that the transformed `h` has positive `y^n` coefficient 1.
fn change_from_mobius(t: &Mat, h: &BiPoly<f64>) -> LinearChange {
    let mut ch = LinearChange { m: [[t[1][1], t[1][0]], [t[0][1], t[0][0]]], c: 1.0 };
    let n = h.total_degree().unwrap_or(0);
    let lead = ch.pull(h).coeff(0, n) * ch.det();
    // det(M) must carry the sign of h; flipping u keeps h(M^-1 (0,1)).
    if lead < 0.0 {
        ch.m[0][0] = -ch.m[0][0];
        ch.m[0][1] = -ch.m[0][1];
    }
    ch.c = lead.abs();
    ch
}

fn relative_residual(a: &BiPoly<f64>, b: &BiPoly<f64>) -> f64 {
    let d = a.sub(b);
    let num = d.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max);
    let den = b.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max).max(1e-300);
    num / den
}

fn mu_coeffs(mu: &BiPoly<f64>, n: u32) -> Vec<f64> {
    (0..=n).map(|j| mu.coeff(n - j, j)).collect()
}

fn finish(kind: FormKind, ch: LinearChange, h: &BiPoly<f64>, mu: &BiPoly<f64>, n: u32) -> CanonicalForm {
    let (ht, mt) = ch.apply(h, mu);
    let residual = relative_residual(&ht, &kind.h());
    CanonicalForm { kind, mu: mu_coeffs(&mt, n), change: ch, residual }
}

fn prepare(f: &QHField, r: i64) -> Result<(Vec<(Complex64, u32)>, BiPoly<f64>, BiPoly<f64>)> {
    if f.t != (TypeVector { t1: 1, t2: 1 }) || f.r != r {
        return Err(Error::Unsupported(format!("canonical forms need t = (1,1) and r = {r}")));
    }
    let dec = decompose(f)?;
    let factors = real_quadratic_factors(&dec.h)?;
    let roots = factors.iter().map(|&(a, b, m)| (Complex64::new(a, b), m)).collect();
    Ok((roots, dec.h.to_f64(), dec.mu.to_f64()))
}

/// Reduces a monodromic cubic field to form (19) with `B >= 1`.
pub fn canonicalize_r2(f: &QHField) -> Result<CanonicalForm> {
    let (roots, h, mu) = prepare(f, 2)?;
    let (t, b) = match roots.as_slice() {
        [(l, 2)] => normalizing_mobius(*l, None, true),
        [(l1, 1), (l2, 1)] => normalizing_mobius(*l1, Some(*l2), true),
        _ => return Err(Error::Unsupported("unexpected factor profile for r = 2".into())),
    };
    let ch = change_from_mobius(&t, &h);
    Ok(finish(FormKind::Form19 { b }, ch, &h, &mu, 2))
}

/// Reduces a monodromic quintic field to form (29), (30) or (31).
pub fn canonicalize_r4(f: &QHField) -> Result<CanonicalForm> {
    let (roots, h, mu) = prepare(f, 4)?;
    match roots.as_slice() {
        [(l, 3)] => {
            let (t, _) = normalizing_mobius(*l, None, true);
            let ch = change_from_mobius(&t, &h);
            Ok(finish(FormKind::Form29, ch, &h, &mu, 4))
        }
        [_, _] => {
            let (double, single) = if roots[0].1 == 2 { (roots[0].0, roots[1].0) } else { (roots[1].0, roots[0].0) };
            let (t, b) = normalizing_mobius(double, Some(single), true);
            let ch = change_from_mobius(&t, &h);
            Ok(finish(FormKind::Form30 { b }, ch, &h, &mu, 4))
        }
        [_, _, _] => {
            // A negative definite h forces det(M) < 0, which reverses the
            // sign of A; A >= 0 is then preferred but not always reachable.
            let hneg = h.coeff(0, 6) < 0.0;
            let mut best: Option<((bool, f64, f64), f64, f64, Mat)> = None;
            for i in 0..3 {
                for j in 0..3 {
                    if i == j {
                        continue;
                    }
                    let k = 3 - i - j;
                    for up in [true, false] {
                        let (t, b) = normalizing_mobius(roots[i].0, Some(roots[j].0), up);
                        let w = mobius(&t, roots[k].0);
                        let a = if hneg { -w.re } else { w.re };
                        let key = (a < -1e-12, a.abs(), b);
                        let better = match &best {
                            None => true,
                            Some((bk, _, _, _)) => {
                                key.0 < bk.0
                                    || (key.0 == bk.0
                                        && (key.1 < bk.1 - 1e-12 || ((key.1 - bk.1).abs() <= 1e-12 && key.2 < bk.2 - 1e-12)))
                            }
                        };
                        if better {
                            best = Some((key, a, w.im, t));
                        }
                    }
                }
            }
            let ((_, _, b), a, c, t) = best.expect("three roots");
            let ch = change_from_mobius(&t, &h);
            Ok(finish(FormKind::Form31 { a, b, c }, ch, &h, &mu, 4))
        }
        _ => Err(Error::Unsupported("unexpected factor profile for r = 4".into())),
    }
}
