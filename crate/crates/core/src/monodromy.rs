//! Exact monodromy decision from the factor structure of `h`.
//!
//! With `h = c x^mx y^my prod (y^t1 - l_j x^t2)^m_j`, the origin is
//! monodromic exactly when `mx = my = 0` and no `l_j` is real.

use crate::decomposition::{core, homogeneous_associate, Decomposition};
use crate::error::{Error, Result};
use crate::poly::{BiPoly, TypeVector, UniPoly};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq)]
pub struct FactorStructure {
    pub m_x: u32,
    pub m_y: u32,
    /// Squarefree factors of `core(h)_hom(1, Y)` with multiplicities.
    pub profile: Vec<(UniPoly, u32)>,
    /// Distinct real roots of `core(h)_hom(1, Y)`.
    pub real_root_count: usize,
    /// Power of `X = x^t2` dividing `h_hom(X, Y)`.
    pub degree_deficit: u32,
}

impl FactorStructure {
    pub fn max_multiplicity(&self) -> u32 {
        self.profile.iter().map(|(_, m)| *m).chain([self.m_x, self.m_y]).max().unwrap_or(0)
    }

    /// Number of distinct complex factors `y^t1 - l x^t2`.
    pub fn distinct_factor_count(&self) -> usize {
        self.profile.iter().map(|(f, _)| f.degree().unwrap_or(0)).sum()
    }

    pub fn has_multiple_factor(&self) -> bool {
        self.max_multiplicity() >= 2
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.profile.iter().map(|(_, m)| *m).collect()
    }
}

pub fn factor_structure(h: &BiPoly, t: TypeVector) -> Result<FactorStructure> {
    if h.is_zero() {
        return Err(Error::ZeroConservativePart);
    }
    let assoc = homogeneous_associate(h, t)?;
    let c = core(h);
    let ca = homogeneous_associate(&c, t)?;
    let profile = ca.hom.squarefree_decomposition()?;
    let real_root_count = ca.hom.sturm_real_roots()?;
    Ok(FactorStructure {
        m_x: h.x_valuation(),
        m_y: h.y_valuation(),
        profile,
        real_root_count,
        degree_deficit: assoc.degree_deficit(),
    })
}

/// Which monodromy condition failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonodromyReason {
    Monodromic,
    /// `h = 0`: every ray is invariant.
    ZeroHamiltonian,
    /// `x` divides `h`.
    XFactor,
    /// `y` divides `h`.
    YFactor,
    /// A factor `y^t1 - l x^t2` with `l` real.
    RealFactor,
}

impl MonodromyReason {
    pub fn describe(&self) -> &'static str {
        match self {
            MonodromyReason::Monodromic => "monodromic",
            MonodromyReason::ZeroHamiltonian => "h is identically zero (radial field)",
            MonodromyReason::XFactor => "h has the real factor x",
            MonodromyReason::YFactor => "h has the real factor y",
            MonodromyReason::RealFactor => "h has a real factor y^t1 - l x^t2",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monodromy {
    pub monodromic: bool,
    pub reason: MonodromyReason,
    pub structure: Option<FactorStructure>,
}

pub fn is_monodromic(dec: &Decomposition) -> Result<Monodromy> {
    if dec.h.is_zero() {
        return Ok(Monodromy { monodromic: false, reason: MonodromyReason::ZeroHamiltonian, structure: None });
    }
    let s = factor_structure(&dec.h, dec.t)?;
    let reason = if s.m_x > 0 || s.degree_deficit > 0 {
        MonodromyReason::XFactor
    } else if s.m_y > 0 {
        MonodromyReason::YFactor
    } else if s.real_root_count > 0 {
        MonodromyReason::RealFactor
    } else {
        MonodromyReason::Monodromic
    };
    Ok(Monodromy { monodromic: reason == MonodromyReason::Monodromic, reason, structure: Some(s) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{decompose, QHField};
    use crate::poly::{int, Rational};

    fn m(a: u32, b: u32, c: i64) -> BiPoly {
        BiPoly::monomial(a, b, int(c))
    }

    fn tv(a: u32, b: u32) -> TypeVector {
        TypeVector::new(a, b).unwrap()
    }

    #[test]
    fn double_circle() {
        let q = m(0, 2, 1).add(&m(2, 0, 1));
        let s = factor_structure(&q.mul(&q), tv(1, 1)).unwrap();
        assert_eq!((s.m_x, s.m_y, s.real_root_count), (0, 0, 0));
        assert_eq!(s.profile, vec![(UniPoly::from_ints(&[1, 0, 1]), 2)]);
    }

    #[test]
    fn x_factor() {
        let h = BiPoly::x().mul(&m(0, 2, 1).add(&m(2, 0, 1)));
        let s = factor_structure(&h, tv(1, 1)).unwrap();
        assert_eq!(s.m_x, 1);
    }

    #[test]
    fn zero_h_is_error() {
        assert_eq!(factor_structure(&BiPoly::<Rational>::zero(), tv(1, 1)), Err(Error::ZeroConservativePart));
    }

    fn field(p: BiPoly, q: BiPoly, t: TypeVector) -> Monodromy {
        is_monodromic(&decompose(&QHField::new(p, q, t).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn linear_rotation_is_monodromic() {
        let r = field(m(0, 1, -1), m(1, 0, 1), tv(1, 1));
        assert!(r.monodromic);
    }

    #[test]
    fn system_12_has_x_factor() {
        // x' = a10 x, y' = b20 x^2 + b01 y with t = (1,2)
        let r = field(m(1, 0, 2), m(2, 0, 1).add(&m(0, 1, 3)), tv(1, 2));
        assert_eq!(r.reason, MonodromyReason::XFactor);
    }

    #[test]
    fn system_24_sample() {
        // a40 = 0, b31 = 0, a01 = 1, b70 = -1
        let r = field(m(0, 1, 1), m(7, 0, -1), tv(1, 4));
        assert!(r.monodromic);
    }

    #[test]
    fn radial_field() {
        let r = field(BiPoly::x(), BiPoly::y(), tv(1, 1));
        assert_eq!(r.reason, MonodromyReason::ZeroHamiltonian);
    }

    #[test]
    fn real_line_factor() {
        // h with the factor y^2 - 2x^3 for t = (2,3)
        let r = field(m(0, 1, 1), m(2, 0, 1), tv(2, 3));
        assert_eq!(r.reason, MonodromyReason::RealFactor);
    }
}
