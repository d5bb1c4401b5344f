//! Exact polynomial arithmetic with quasi-homogeneous grading.

mod bipoly;
mod ring;
mod uni;

pub use bipoly::{BiPoly, Mono};
pub use ring::{f64_to_rat, int, rat, rat_to_f64, Field, Magnitude, QComplex, Rational, Ring};
pub use uni::UniPoly;

use crate::error::{Error, Result};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Weight vector `t = (t1, t2)`: the monomial `x^a y^b` has weight
/// `a*t1 + b*t2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeVector {
    pub t1: u32,
    pub t2: u32,
}

impl TypeVector {
    pub fn new(t1: u32, t2: u32) -> Result<Self> {
        if t1 == 0 || t2 == 0 || t1 > t2 || t1.gcd(&t2) != 1 {
            return Err(Error::InvalidType { t1, t2 });
        }
        Ok(TypeVector { t1, t2 })
    }

    pub fn weight(&self, a: u32, b: u32) -> u64 {
        a as u64 * self.t1 as u64 + b as u64 * self.t2 as u64
    }

    /// `|t| = t1 + t2`.
    pub fn norm(&self) -> u32 {
        self.t1 + self.t2
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.t1, self.t2)
    }
}

/// Quasi-homogeneous degree of `p`, or `None` when monomials disagree.
pub fn qh_degree<R: Ring>(p: &BiPoly<R>, t: TypeVector) -> Result<Option<u64>> {
    let mut it = p.terms().map(|(m, _)| t.weight(m.a, m.b));
    let first = it.next().ok_or(Error::ZeroPolynomial)?;
    Ok(if it.all(|w| w == first) { Some(first) } else { None })
}

/// Splits `p` into quasi-homogeneous components of strictly increasing degree.
pub fn qh_split<R: Ring>(p: &BiPoly<R>, t: TypeVector) -> Vec<(u64, BiPoly<R>)> {
    let mut parts: std::collections::BTreeMap<u64, BiPoly<R>> = Default::default();
    for (m, c) in p.terms() {
        parts
            .entry(t.weight(m.a, m.b))
            .or_default()
            .add_term(m.a, m.b, c.clone());
    }
    parts.into_iter().collect()
}

/// Applies the weighted Euler operator `t1 x d/dx + t2 y d/dy`.
pub fn euler_operator<R: Ring>(p: &BiPoly<R>, t: TypeVector) -> BiPoly<R> {
    let mut out = BiPoly::zero();
    for (m, c) in p.terms() {
        out.add_term(m.a, m.b, c.mul(&R::from_i64(t.weight(m.a, m.b) as i64)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy(a: u32, b: u32, c: i64) -> BiPoly {
        BiPoly::monomial(a, b, int(c))
    }

    #[test]
    fn qh_degree_examples() {
        let t = TypeVector::new(1, 2).unwrap();
        assert_eq!(qh_degree(&xy(2, 1, 1), t).unwrap(), Some(4));
        assert_eq!(qh_degree(&xy(0, 2, 1).add(&xy(4, 0, 1)), t).unwrap(), Some(4));
        assert_eq!(qh_degree(&xy(1, 0, 1).add(&xy(0, 1, 1)), t).unwrap(), None);
        assert_eq!(qh_degree(&BiPoly::<Rational>::zero(), t), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn qh_split_examples() {
        let t = TypeVector::new(1, 2).unwrap();
        let p = xy(1, 0, 1).add(&xy(0, 1, 1));
        assert_eq!(qh_split(&p, t), vec![(1, xy(1, 0, 1)), (2, xy(0, 1, 1))]);
        assert!(qh_split(&BiPoly::<Rational>::zero(), t).is_empty());
        let p = xy(2, 1, 3).add(&xy(0, 2, 1)).add(&xy(4, 0, 1)).sub(&xy(1, 0, 1));
        let s = qh_split(&p, t);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0], (1, xy(1, 0, -1)));
        assert_eq!(s[1], (4, xy(2, 1, 3).add(&xy(0, 2, 1)).add(&xy(4, 0, 1))));
    }

    #[test]
    fn type_vector_validation() {
        assert!(TypeVector::new(2, 4).is_err());
        assert!(TypeVector::new(3, 2).is_err());
        assert!(TypeVector::new(0, 1).is_err());
        assert!(TypeVector::new(2, 5).is_ok());
    }

    #[test]
    fn display_is_canonical() {
        let p = xy(2, 1, 3).add(&BiPoly::monomial(0, 2, rat(-1, 2))).add(&xy(0, 0, 1));
        assert_eq!(p.to_string(), "3*x^2*y - 1/2*y^2 + 1");
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(UniPoly::from_ints(&[1, 0, 1]).sturm_real_roots().unwrap(), 0);
        assert_eq!(UniPoly::from_ints(&[-1, 0, 1]).sturm_real_roots().unwrap(), 2);
        let q = UniPoly::from_ints(&[1, 0, 1]).mul(&UniPoly::from_ints(&[4, 0, 1]));
        assert_eq!(q.sturm_real_roots().unwrap(), 0);
        assert!(UniPoly::<Rational>::zero().sturm_real_roots().is_err());
    }

    #[test]
    fn squarefree_examples() {
        let y2p1 = UniPoly::from_ints(&[1, 0, 1]);
        assert_eq!(y2p1.pow(2).squarefree_decomposition().unwrap(), vec![(y2p1.clone(), 2)]);
        let y = UniPoly::from_ints(&[0, 1]);
        assert_eq!(y.pow(3).squarefree_decomposition().unwrap(), vec![(y, 3)]);
        let q = y2p1.mul(&UniPoly::from_ints(&[4, 0, 1]));
        assert_eq!(q.squarefree_decomposition().unwrap(), vec![(q.clone(), 1)]);
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let q = UniPoly::from_ints(&[3, -1, 0, 2]);
        let s = q.taylor_shift(&int(2));
        for v in -3..4 {
            assert_eq!(s.eval(&int(v)), q.eval(&int(v + 2)));
        }
    }

    #[test]
    fn isolation_separates_close_roots() {
        // (Y - 1/100)(Y - 1/99)(Y + 3)
        let q = UniPoly::linear_root(&rat(1, 100))
            .mul(&UniPoly::linear_root(&rat(1, 99)))
            .mul(&UniPoly::linear_root(&int(-3)));
        let iv = q.isolate_real_roots().unwrap();
        assert_eq!(iv.len(), 3);
        let r = q.refine_root(&iv[1], &rat(1, 1_000_000));
        assert!(r.0 < rat(1, 100) + rat(1, 1_000_000) && r.1 >= rat(1, 100));
    }
}
