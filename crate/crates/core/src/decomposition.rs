//! Quasi-homogeneous fields and their conservative–dissipative splitting
//! `F = X_h + mu * D0`, with `X_h = (-h_y, h_x)` and `D0 = (t1 x, t2 y)`.

use crate::error::{Error, Result};
use crate::poly::{int, qh_degree, BiPoly, Rational, Ring, TypeVector, UniPoly};
use num_integer::Integer;
use serde::Serialize;

/// A planar field `(P, Q)` quasi-homogeneous of type `t` and degree `r`:
/// `P` has weighted degree `r + t1` and `Q` has `r + t2`.
#[derive(Clone, Debug, PartialEq)]
pub struct QHField {
    pub p: BiPoly,
    pub q: BiPoly,
    pub t: TypeVector,
    pub r: i64,
}

impl QHField {
    /// Validates gradings and coprimality of `P` and `Q`.
    pub fn new(p: BiPoly, q: BiPoly, t: TypeVector) -> Result<Self> {
        let f = Self::new_unchecked_coprime(p, q, t)?;
        if let Some(common) = common_factor(&f.p, &f.q, t) {
            return Err(Error::NotCoprime(common));
        }
        Ok(f)
    }

    /// Validates gradings only; for inputs where a common factor is expected.
    pub fn new_unchecked_coprime(p: BiPoly, q: BiPoly, t: TypeVector) -> Result<Self> {
        let r = field_degree(&p, &q, t).ok_or(Error::FieldNotQuasiHomogeneous { t1: t.t1, t2: t.t2 })?;
        Ok(QHField { p, q, t, r })
    }

    pub fn from_parts(h: &BiPoly, mu: &BiPoly, t: TypeVector) -> Result<Self> {
        let (p, q) = reconstruct(h, mu, t);
        Self::new(p, q, t)
    }

    /// `P` and `Q` share a non-constant factor.
    pub fn is_coprime(&self) -> bool {
        common_factor(&self.p, &self.q, self.t).is_none()
    }

    /// The field with both components multiplied by `c`.
    pub fn scaled(&self, c: &Rational) -> Self {
        QHField { p: self.p.scale(c), q: self.q.scale(c), t: self.t, r: self.r }
    }
}

/// Common degree `r` of `(P, Q)` for type `t`, if any.
fn field_degree(p: &BiPoly, q: &BiPoly, t: TypeVector) -> Option<i64> {
    let rp = if p.is_zero() {
        None
    } else {
        Some(qh_degree(p, t).ok()?? as i64 - t.t1 as i64)
    };
    let rq = if q.is_zero() {
        None
    } else {
        Some(qh_degree(q, t).ok()?? as i64 - t.t2 as i64)
    };
    match (rp, rq) {
        (Some(a), Some(b)) if a == b => Some(a),
        (Some(_), Some(_)) => None,
        (Some(a), None) | (None, Some(a)) => Some(a),
        (None, None) => None,
    }
}

/// All admissible `(t, r)` with `t2` at most the maximal total degree plus
/// one, sorted by `(t2, t1)`.
pub fn infer_types(p: &BiPoly, q: &BiPoly) -> Vec<(TypeVector, i64)> {
    let d = p.total_degree().unwrap_or(0).max(q.total_degree().unwrap_or(0));
    let mut out = Vec::new();
    for t2 in 1..=d + 1 {
        for t1 in 1..=t2 {
            if t1.gcd(&t2) != 1 {
                continue;
            }
            let t = TypeVector { t1, t2 };
            if let Some(r) = field_degree(p, q, t) {
                out.push((t, r));
            }
        }
    }
    out
}

/// Description of a non-constant common factor of quasi-homogeneous `P, Q`.
pub fn common_factor(p: &BiPoly, q: &BiPoly, t: TypeVector) -> Option<String> {
    if p.is_zero() || q.is_zero() {
        let other = if p.is_zero() { q } else { p };
        return if other.total_degree().unwrap_or(0) > 0 || other.is_zero() {
            Some(other.to_string())
        } else {
            None
        };
    }
    if p.x_valuation() > 0 && q.x_valuation() > 0 {
        return Some("x".into());
    }
    if p.y_valuation() > 0 && q.y_valuation() > 0 {
        return Some("y".into());
    }
    let pa = homogeneous_associate(&core(p), t).ok()?;
    let qa = homogeneous_associate(&core(q), t).ok()?;
    let g = pa.hom.gcd(&qa.hom);
    if g.degree().unwrap_or(0) > 0 {
        return Some(format!("{g} in Y = y^{}/x^{}", t.t1, t.t2));
    }
    None
}

/// `p` with its monomial factor `x^i y^j` removed.
pub fn core(p: &BiPoly) -> BiPoly {
    p.div_monomial(p.x_valuation(), p.y_valuation())
}

/// Homogeneous associate of a quasi-homogeneous polynomial:
/// `p = x^k1 y^k2 p_hom(x^t2, y^t1)` with `k1 < t2`, `k2 < t1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Associate {
    pub k1: u32,
    pub k2: u32,
    /// Homogeneous degree of `p_hom(X, Y)`.
    pub degree: u32,
    /// `p_hom(1, Y)`.
    #[serde(serialize_with = "ser_uni")]
    pub hom: UniPoly,
}

fn ser_uni<S: serde::Serializer>(u: &UniPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&u.to_string())
}

impl Associate {
    /// Drop of `deg_Y p_hom(1, Y)` below the homogeneous degree, i.e. the
    /// power of `X = x^t2` dividing `p_hom`.
    pub fn degree_deficit(&self) -> u32 {
        self.degree - self.hom.degree().unwrap_or(0) as u32
    }

    /// Rebuilds `x^k1 y^k2 p_hom(x^t2, y^t1)`.
    pub fn expand(&self, t: TypeVector) -> BiPoly {
        let mut p = BiPoly::zero();
        for (j, c) in self.hom.coeffs().iter().enumerate() {
            let i = self.degree - j as u32;
            p.add_term(self.k1 + t.t2 * i, self.k2 + t.t1 * j as u32, c.clone());
        }
        p
    }
}

pub fn homogeneous_associate(p: &BiPoly, t: TypeVector) -> Result<Associate> {
    let k = qh_degree(p, t)?.ok_or(Error::NotQuasiHomogeneous { t1: t.t1, t2: t.t2 })?;
    let (m0, _) = p.terms().next().expect("nonzero");
    let k1 = m0.a % t.t2;
    let k2 = m0.b % t.t1;
    let degree = ((k - t.weight(k1, k2)) / (t.t1 as u64 * t.t2 as u64)) as u32;
    let mut c = vec![Rational::zero(); degree as usize + 1];
    for (m, v) in p.terms() {
        let j = (m.b - k2) / t.t1;
        c[j as usize] = v.clone();
    }
    Ok(Associate { k1, k2, degree, hom: UniPoly::new(c) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub t: TypeVector,
    pub r: i64,
    pub h: BiPoly,
    pub mu: BiPoly,
    /// Associate of `h`; `None` when `h = 0`.
    pub h_assoc: Option<Associate>,
    /// Associate of `mu`; `None` when `mu = 0`.
    pub mu_assoc: Option<Associate>,
}

impl Decomposition {
    /// `(P, Q) = X_h + mu * D0`.
    pub fn reconstruct(&self) -> (BiPoly, BiPoly) {
        reconstruct(&self.h, &self.mu, self.t)
    }

    /// `r + |t|`, the weighted degree of `h`.
    pub fn h_degree(&self) -> i64 {
        self.r + self.t.norm() as i64
    }
}

pub fn reconstruct(h: &BiPoly, mu: &BiPoly, t: TypeVector) -> (BiPoly, BiPoly) {
    let x = BiPoly::x();
    let y = BiPoly::y();
    let p = h.dy().neg().add(&x.mul(mu).scale(&int(t.t1 as i64)));
    let q = h.dx().add(&y.mul(mu).scale(&int(t.t2 as i64)));
    (p, q)
}

pub fn decompose(f: &QHField) -> Result<Decomposition> {
    let n = f.r + f.t.norm() as i64;
    if n == 0 {
        return Err(Error::DegenerateNormalization);
    }
    let inv = Rational::new(1.into(), n.into());
    let x = BiPoly::x();
    let y = BiPoly::y();
    let h = x
        .mul(&f.q)
        .scale(&int(f.t.t1 as i64))
        .sub(&y.mul(&f.p).scale(&int(f.t.t2 as i64)))
        .scale(&inv);
    let mu = f.p.dx().add(&f.q.dy()).scale(&inv);
    let h_assoc = if h.is_zero() { None } else { Some(homogeneous_associate(&h, f.t)?) };
    let mu_assoc = if mu.is_zero() { None } else { Some(homogeneous_associate(&mu, f.t)?) };
    Ok(Decomposition { t: f.t, r: f.r, h, mu, h_assoc, mu_assoc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn m(a: u32, b: u32, c: Rational) -> BiPoly {
        BiPoly::monomial(a, b, c)
    }

    fn tv(a: u32, b: u32) -> TypeVector {
        TypeVector::new(a, b).unwrap()
    }

    #[test]
    fn infer_types_examples() {
        let y = BiPoly::y();
        let x2 = m(2, 0, int(1));
        assert_eq!(infer_types(&y, &x2), vec![(tv(2, 3), 1)]);
        let ts = infer_types(&BiPoly::x(), &BiPoly::y());
        assert_eq!(ts, vec![(tv(1, 1), 0), (tv(1, 2), 0)]);
        let p = m(2, 0, int(1)).add(&y);
        assert_eq!(infer_types(&p, &m(3, 0, int(1))), vec![(tv(1, 2), 1)]);
    }

    #[test]
    fn decompose_system_15_shape() {
        // P = x^2 + y, Q = x^3 + b11 x y with b11 = 3.
        let b11 = int(3);
        let p = m(2, 0, int(1)).add(&BiPoly::y());
        let q = m(3, 0, int(1)).add(&m(1, 1, b11.clone()));
        let f = QHField::new(p.clone(), q.clone(), tv(1, 2)).unwrap();
        let d = decompose(&f).unwrap();
        let quarter = rat(1, 4);
        let h = m(4, 0, int(1)).add(&m(2, 1, &b11 - int(2))).add(&m(0, 2, int(-2))).scale(&quarter);
        assert_eq!(d.h, h);
        assert_eq!(d.mu, m(1, 0, (int(2) + &b11) * &quarter));
        assert_eq!(d.reconstruct(), (p, q));
    }

    #[test]
    fn decompose_system_14() {
        let f = QHField::new(BiPoly::y(), m(2, 0, int(1)), tv(2, 3)).unwrap();
        let d = decompose(&f).unwrap();
        assert_eq!(d.h, m(3, 0, rat(1, 3)).add(&m(0, 2, rat(-1, 2))));
        assert!(d.mu.is_zero());
    }

    #[test]
    fn hamiltonian_field_has_zero_mu() {
        let t = tv(1, 2);
        let g = m(4, 0, int(3)).add(&m(2, 1, int(-1))).add(&m(0, 2, int(2)));
        let f = QHField::new(g.dy().neg(), g.dx(), t).unwrap();
        let d = decompose(&f).unwrap();
        assert_eq!(d.h, g);
        assert!(d.mu.is_zero());
    }

    #[test]
    fn associate_examples() {
        let x2 = m(2, 0, int(1));
        let y2 = m(0, 2, int(1));
        let p = y2.add(&x2).mul(&y2.add(&x2.scale(&int(4))));
        let a = homogeneous_associate(&p, tv(1, 1)).unwrap();
        assert_eq!((a.k1, a.k2), (0, 0));
        let e = UniPoly::from_ints(&[1, 0, 1]).mul(&UniPoly::from_ints(&[4, 0, 1]));
        assert_eq!(a.hom, e);
        let p = m(4, 0, int(1)).add(&m(0, 2, int(2)));
        let a = homogeneous_associate(&p, tv(1, 2)).unwrap();
        assert_eq!((a.k1, a.k2, a.hom.clone()), (0, 0, UniPoly::from_ints(&[1, 0, 2])));
        assert_eq!(a.expand(tv(1, 2)), p);
        // x y for t = (1,1): nothing is pulled out since k1 < t2 = 1.
        let a = homogeneous_associate(&m(1, 1, int(1)), tv(1, 1)).unwrap();
        assert_eq!((a.k1, a.k2, a.degree), (0, 0, 2));
        assert_eq!(a.hom, UniPoly::from_ints(&[0, 1]));
    }

    #[test]
    fn associate_pulls_out_residual_powers() {
        // x^3 y for t = (2,3): weight 9; k1 = 3 mod 3 = 0, k2 = 1 mod 2 = 1.
        let t = tv(2, 3);
        let p = m(3, 1, int(1)).add(&m(0, 3, int(5)));
        let a = homogeneous_associate(&p, t).unwrap();
        assert_eq!((a.k1, a.k2, a.degree), (0, 1, 1));
        assert_eq!(a.expand(t), p);
    }

    #[test]
    fn non_coprime_rejected() {
        let x = BiPoly::x();
        let r = QHField::new(x.mul(&BiPoly::y()), x.mul(&x), tv(1, 1));
        assert!(matches!(r, Err(Error::NotCoprime(_))));
        // (y - x)(y + x) and (y - x) y share y - x.
        let a = BiPoly::y().sub(&x);
        let r = QHField::new(a.mul(&BiPoly::y().add(&x)), a.mul(&BiPoly::y()), tv(1, 1));
        assert!(matches!(r, Err(Error::NotCoprime(_))));
    }

    #[test]
    fn degree_mismatch_rejected() {
        let r = QHField::new(m(2, 0, int(1)), BiPoly::y(), tv(1, 1));
        assert!(matches!(r, Err(Error::FieldNotQuasiHomogeneous { .. })));
    }
}
