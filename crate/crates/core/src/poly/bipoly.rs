use super::ring::{Rational, Ring};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent pair of the monomial `x^a y^b`.
///
/// Ordered graded-lexicographically by `(a + b, a)` so that iteration order,
/// serialization and equality are canonical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mono {
    pub a: u32,
    pub b: u32,
}

impl Mono {
    pub fn new(a: u32, b: u32) -> Self {
        Mono { a, b }
    }
    pub fn total(&self) -> u32 {
        self.a + self.b
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.total(), self.a).cmp(&(o.total(), o.a))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Sparse bivariate polynomial in `x, y`.  No zero coefficient is ever
/// stored, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Debug)]
pub struct BiPoly<R: Ring = Rational> {
    terms: BTreeMap<Mono, R>,
}

impl<R: Ring> Default for BiPoly<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Ring> BiPoly<R> {
    pub fn zero() -> Self {
        BiPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: R) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(a: u32, b: u32, c: R) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, R::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, R::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, u32, R)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (a, b, c) in it {
            p.add_term(a, b, c);
        }
        p
    }

    /// Adds `c x^a y^b`, dropping the entry if it cancels.
    pub fn add_term(&mut self, a: u32, b: u32, c: R) {
        if c.is_zero() {
            return;
        }
        let m = Mono::new(a, b);
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: u32, b: u32) -> R {
        self.terms.get(&Mono::new(a, b)).cloned().unwrap_or_else(R::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mono, &R)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total()).max()
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.a).max()
    }

    pub fn deg_y(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.b).max()
    }

    /// Largest `k` with `x^k` dividing `self` (0 for the zero polynomial).
    pub fn x_valuation(&self) -> u32 {
        self.terms.keys().map(|m| m.a).min().unwrap_or(0)
    }

    pub fn y_valuation(&self) -> u32 {
        self.terms.keys().map(|m| m.b).min().unwrap_or(0)
    }

    /// Divides by `x^i y^j`; every term must be divisible.
    pub fn div_monomial(&self, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        for (m, c) in self.terms() {
            assert!(m.a >= i && m.b >= j, "monomial division is not exact");
            p.add_term(m.a - i, m.b - j, c.clone());
        }
        p
    }

    pub fn mul_monomial(&self, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        for (m, c) in self.terms() {
            p.add_term(m.a + i, m.b + j, c.clone());
        }
        p
    }

    pub fn scale(&self, s: &R) -> Self {
        let mut p = Self::zero();
        for (m, c) in self.terms() {
            p.add_term(m.a, m.b, c.mul(s));
        }
        p
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> BiPoly<S> {
        let mut p = BiPoly::zero();
        for (m, c) in self.terms() {
            p.add_term(m.a, m.b, f(c));
        }
        p
    }

    pub fn dx(&self) -> Self {
        let mut p = Self::zero();
        for (m, c) in self.terms() {
            if m.a > 0 {
                p.add_term(m.a - 1, m.b, c.mul(&R::from_i64(m.a as i64)));
            }
        }
        p
    }

    pub fn dy(&self) -> Self {
        let mut p = Self::zero();
        for (m, c) in self.terms() {
            if m.b > 0 {
                p.add_term(m.a, m.b - 1, c.mul(&R::from_i64(m.b as i64)));
            }
        }
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (m, c) in o.terms() {
            p.add_term(m.a, m.b, c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (m, c) in o.terms() {
            p.add_term(m.a, m.b, c.neg());
        }
        p
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero();
        for (m, c) in self.terms() {
            for (n, d) in o.terms() {
                p.add_term(m.a + n.a, m.b + n.b, c.mul(d));
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(R::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &R, y: &R) -> R {
        self.eval_in(x, y, |c| c.clone())
    }

    /// Evaluates at a point of another ring, embedding coefficients with `f`.
    pub fn eval_in<S: Ring>(&self, x: &S, y: &S, f: impl Fn(&R) -> S) -> S {
        let (dx, dy) = (self.deg_x().unwrap_or(0), self.deg_y().unwrap_or(0));
        let xp = powers(x, dx);
        let yp = powers(y, dy);
        let mut acc = S::zero();
        for (m, c) in self.terms() {
            acc = acc.add(&f(c).mul(&xp[m.a as usize]).mul(&yp[m.b as usize]));
        }
        acc
    }

    /// Substitutes `x -> px, y -> py` where the images live in `BiPoly<S>`.
    pub fn compose<S: Ring>(
        &self,
        px: &BiPoly<S>,
        py: &BiPoly<S>,
        f: impl Fn(&R) -> S,
    ) -> BiPoly<S> {
        let (dx, dy) = (self.deg_x().unwrap_or(0), self.deg_y().unwrap_or(0));
        let xp = powers(px, dx);
        let yp = powers(py, dy);
        let mut acc = BiPoly::zero();
        for (m, c) in self.terms() {
            let t = xp[m.a as usize].mul(&yp[m.b as usize]).scale(&f(c));
            acc = acc.add(&t);
        }
        acc
    }

    /// `p(-x, y)`.
    pub fn reflect_x(&self) -> Self {
        let mut p = Self::zero();
        for (m, c) in self.terms() {
            p.add_term(m.a, m.b, if m.a % 2 == 1 { c.neg() } else { c.clone() });
        }
        p
    }

    /// `p(x, -y)`.
    pub fn reflect_y(&self) -> Self {
        let mut p = Self::zero();
        for (m, c) in self.terms() {
            p.add_term(m.a, m.b, if m.b % 2 == 1 { c.neg() } else { c.clone() });
        }
        p
    }

    /// `p(y, x)`.
    pub fn swap_xy(&self) -> Self {
        let mut p = Self::zero();
        for (m, c) in self.terms() {
            p.add_term(m.b, m.a, c.clone());
        }
        p
    }

    pub fn is_even_in_x(&self) -> bool {
        self.terms.keys().all(|m| m.a % 2 == 0)
    }
    pub fn is_odd_in_x(&self) -> bool {
        self.terms.keys().all(|m| m.a % 2 == 1)
    }
    pub fn is_even_in_y(&self) -> bool {
        self.terms.keys().all(|m| m.b % 2 == 0)
    }
    pub fn is_odd_in_y(&self) -> bool {
        self.terms.keys().all(|m| m.b % 2 == 1)
    }
}

impl<R: Ring> Ring for BiPoly<R> {
    fn zero() -> Self {
        BiPoly::zero()
    }
    fn one() -> Self {
        BiPoly::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        BiPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        BiPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        BiPoly::mul(self, o)
    }
    fn neg(&self) -> Self {
        BiPoly::neg(self)
    }
    fn from_i64(n: i64) -> Self {
        BiPoly::constant(R::from_i64(n))
    }
}

pub(crate) fn powers<S: Ring>(v: &S, n: u32) -> Vec<S> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(S::one());
    for i in 0..n as usize {
        let next = out[i].mul(v);
        out.push(next);
    }
    out
}

impl BiPoly<Rational> {
    /// Largest absolute coefficient, as a double.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms()
            .map(|(_, c)| super::ring::rat_to_f64(c).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> BiPoly<f64> {
        self.map(super::ring::rat_to_f64)
    }
}

fn fmt_rational(c: &Rational) -> String {
    if c.denom() == &num_bigint::BigInt::from(1) {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_mono(m: Mono) -> String {
    let mut parts = Vec::new();
    match m.a {
        0 => {}
        1 => parts.push("x".to_string()),
        a => parts.push(format!("x^{a}")),
    }
    match m.b {
        0 => {}
        1 => parts.push("y".to_string()),
        b => parts.push(format!("y^{b}")),
    }
    parts.join("*")
}

/// Renders in the input grammar (`3*x^2*y - 1/2*y^2`), highest degree first.
impl fmt::Display for BiPoly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::{One, Signed};
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mono = fmt_mono(*m);
            if mono.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), mono)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for BiPoly<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let s: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mono = fmt_mono(*m);
                if mono.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{mono}")
                }
            })
            .collect();
        write!(f, "{}", s.join(" + "))
    }
}
