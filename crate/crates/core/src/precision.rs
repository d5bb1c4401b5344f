//! Extended-precision complex arithmetic on dyadic rationals.
//!
//! Values are `Complex<BigRational>` whose parts are rounded to a fixed
//! number of fractional bits after each nonlinear step, which keeps the
//! integers bounded while giving arbitrarily many correct digits.

use crate::poly::{rat_to_f64, QComplex, Rational, Ring, UniPoly};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;


pub const DEFAULT_DIGITS: u32 = 50;

/// Working precision in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { digits: DEFAULT_DIGITS }
    }
}

impl Precision {
    pub fn new(digits: u32) -> Self {
        Precision { digits: digits.max(20) }
    }

    /// Fractional bits carried by dyadic values.
    pub fn bits(&self) -> u64 {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 16
    }

    /// Relative residual at which root refinement stops.
    pub fn residual_tol(&self) -> f64 {
        10f64.powi(-(self.digits as i32 - 10))
    }
}

pub fn round_rat(q: &Rational, bits: u64) -> Rational {
    let scale = BigInt::from(1) << bits;
    let n: BigInt = q.numer() * &scale * 2 + q.denom();
    let d: BigInt = q.denom() * 2;
    Rational::new(n.div_floor(&d), scale)
}

pub fn round_c(z: &QComplex, bits: u64) -> QComplex {
    Complex::new(round_rat(&z.re, bits), round_rat(&z.im, bits))
}

pub fn qc_from_c64(z: Complex64) -> QComplex {
    Complex::new(crate::poly::f64_to_rat(z.re), crate::poly::f64_to_rat(z.im))
}

pub fn qc_from_rat(q: &Rational) -> QComplex {
    Complex::new(q.clone(), Rational::zero())
}

pub fn qc_to_c64(z: &QComplex) -> Complex64 {
    Complex64::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

pub fn qc_abs(z: &QComplex) -> f64 {
    qc_to_c64(z).norm()
}

/// Divides with rounding of the result.
pub fn qc_div(a: &QComplex, b: &QComplex, bits: u64) -> QComplex {
    let d = &b.re * &b.re + &b.im * &b.im;
    let re = (&a.re * &b.re + &a.im * &b.im) / &d;
    let im = (&a.im * &b.re - &a.re * &b.im) / &d;
    Complex::new(round_rat(&re, bits), round_rat(&im, bits))
}

/// Horner evaluation of a rational polynomial at a dyadic complex point,
/// rounded at every step.
pub fn eval_rounded(q: &UniPoly<Rational>, z: &QComplex, bits: u64) -> QComplex {
    let mut acc = QComplex::zero();
    for c in q.coeffs().iter().rev() {
        acc = round_c(&acc.mul(z).add(&qc_from_rat(c)), bits);
    }
    acc
}

/// Horner evaluation for complex-coefficient polynomials.
pub fn eval_rounded_c(q: &UniPoly<QComplex>, z: &QComplex, bits: u64) -> QComplex {
    let mut acc = QComplex::zero();
    for c in q.coeffs().iter().rev() {
        acc = round_c(&acc.mul(z).add(c), bits);
    }
    acc
}
