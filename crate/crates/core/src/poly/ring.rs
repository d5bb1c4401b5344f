use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

pub type Rational = BigRational;

/// Commutative ring operations used by the generic polynomial containers.
///
/// Method-based rather than operator-based so that nested polynomial rings
/// and big-number types can share one bound.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_i64(n: i64) -> Self;

    fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// A ring with division by nonzero elements.
pub trait Field: Ring {
    fn inv(&self) -> Self;
    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
}

/// Approximate modulus, used by numeric algorithms to compare sizes.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite double.
pub fn f64_to_rat(v: f64) -> Rational {
    Rational::from_float(v).unwrap_or_else(<Rational as Zero>::zero)
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(n: i64) -> Self {
        int(n)
    }
}

impl Field for Rational {
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl Magnitude for Rational {
    fn magnitude(&self) -> f64 {
        rat_to_f64(self).abs()
    }
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

impl Field for f64 {
    fn inv(&self) -> Self {
        1.0 / self
    }
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}

impl Field for Complex64 {
    fn inv(&self) -> Self {
        Complex64::new(1.0, 0.0) / self
    }
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Complex numbers with exact rational parts.  Extended-precision routines
/// keep the parts dyadic by rounding explicitly.
pub type QComplex = Complex<Rational>;

impl Ring for QComplex {
    fn zero() -> Self {
        Complex::new(Zero::zero(), Zero::zero())
    }
    fn one() -> Self {
        Complex::new(One::one(), Zero::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn add(&self, o: &Self) -> Self {
        Complex::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub(&self, o: &Self) -> Self {
        Complex::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn mul(&self, o: &Self) -> Self {
        Complex::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    fn neg(&self) -> Self {
        Complex::new(-&self.re, -&self.im)
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(int(n), Zero::zero())
    }
}

impl Field for QComplex {
    fn inv(&self) -> Self {
        let d = &self.re * &self.re + &self.im * &self.im;
        Complex::new(&self.re / &d, -&self.im / &d)
    }
}

impl Magnitude for QComplex {
    fn magnitude(&self) -> f64 {
        rat_to_f64(&self.re).hypot(rat_to_f64(&self.im))
    }
}
