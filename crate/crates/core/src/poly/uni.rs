use super::ring::{int, rat_to_f64, Field, Rational, Ring};
use crate::error::{Error, Result};
use num_traits::Signed;
use std::fmt;

/// Dense univariate polynomial, coefficients stored low degree first with
/// no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<R: Ring = Rational> {
    coeffs: Vec<R>,
}

impl<R: Ring> UniPoly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    /// The monic linear polynomial `Y - r`.
    pub fn linear_root(r: &R) -> Self {
        Self::new(vec![r.neg(), R::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(R::zero)
    }

    pub fn lead(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(R::zero)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> UniPoly<S> {
        UniPoly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn eval(&self, v: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(v).add(c);
        }
        acc
    }

    pub fn eval_in<S: Ring>(&self, v: &S, f: impl Fn(&R) -> S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(v).add(&f(c));
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul(&R::from_i64(i as i64)))
                .collect(),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|c| c.mul(s))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(R::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Coefficients of `q(c + e)` as a polynomial in `e`.
    pub fn taylor_shift(&self, c: &R) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = a[j + 1].mul(c);
                a[j] = a[j].add(&t);
            }
        }
        Self::new(a)
    }

    /// `Y^deg q(1/Y)`, the reversed coefficient list.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }
}

impl<R: Ring> Ring for UniPoly<R> {
    fn zero() -> Self {
        UniPoly::zero()
    }
    fn one() -> Self {
        UniPoly::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        UniPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        UniPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        UniPoly::mul(self, o)
    }
    fn neg(&self) -> Self {
        UniPoly::neg(self)
    }
    fn from_i64(n: i64) -> Self {
        UniPoly::constant(R::from_i64(n))
    }
}

impl<R: Field> UniPoly<R> {
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().inv();
        self.scale(&l)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let li = d.lead().inv();
        let mut q = vec![R::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].mul(&li);
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&c.mul(dc));
                }
            }
            r[k + dd] = R::zero();
            q[k] = c;
        }
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl UniPoly<Rational> {
    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| int(v)).collect())
    }

    pub fn to_f64(&self) -> UniPoly<f64> {
        self.map(rat_to_f64)
    }

    /// Squarefree decomposition by Yun's algorithm: monic, pairwise coprime,
    /// squarefree factors with multiplicities, so that `q` equals the lead
    /// coefficient times the product of `factor^multiplicity`.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(UniPoly, u32)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut out = Vec::new();
        if self.degree() == Some(0) {
            return Ok(out);
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.divrem(&a0).0;
        let mut c = df.divrem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.divrem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        Ok(out)
    }

    /// Canonical Sturm chain of the squarefree part.
    pub fn sturm_chain(&self) -> Vec<UniPoly> {
        let g = self.gcd(&self.derivative());
        let p0 = self.divrem(&g).0;
        let mut chain = vec![p0.clone(), p0.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        chain
    }

    fn sign_changes_at(chain: &[UniPoly], v: &Rational) -> usize {
        count_changes(chain.iter().map(|p| sign_of(&p.eval(v))))
    }

    fn sign_changes_at_inf(chain: &[UniPoly], positive: bool) -> usize {
        count_changes(chain.iter().map(|p| {
            let s = sign_of(&p.lead());
            let d = p.degree().unwrap_or(0);
            if positive || d % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Number of distinct real roots, exact.
    pub fn sturm_real_roots(&self) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let ch = self.sturm_chain();
        Ok(Self::sign_changes_at_inf(&ch, false) - Self::sign_changes_at_inf(&ch, true))
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn sturm_count_in(&self, a: &Rational, b: &Rational) -> usize {
        let ch = self.sturm_chain();
        Self::sign_changes_at(&ch, a) - Self::sign_changes_at(&ch, b)
    }

    /// Cauchy bound: every complex root has modulus below it.
    pub fn cauchy_bound(&self) -> Rational {
        let l = self.lead().abs();
        let m = self.coeffs[..self.coeffs.len().saturating_sub(1)]
            .iter()
            .map(|c| c.abs() / &l)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        m + Rational::one()
    }

    /// Disjoint rational intervals `(a, b]`, each holding exactly one distinct
    /// real root, in increasing order.
    pub fn isolate_real_roots(&self) -> Result<Vec<(Rational, Rational)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let ch = self.sturm_chain();
        let bound = self.cauchy_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        while let Some((a, b)) = stack.pop() {
            let n = Self::sign_changes_at(&ch, &a) - Self::sign_changes_at(&ch, &b);
            if n == 0 {
                continue;
            }
            if n == 1 {
                out.push((a, b));
                continue;
            }
            let m = (&a + &b) / int(2);
            stack.push((a, m.clone()));
            stack.push((m, b));
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        Ok(out)
    }

    /// Bisects an isolating interval until its width is at most `eps`.
    pub fn refine_root(&self, iv: &(Rational, Rational), eps: &Rational) -> (Rational, Rational) {
        let sq = {
            let g = self.gcd(&self.derivative());
            self.divrem(&g).0
        };
        let (mut a, mut b) = iv.clone();
        if sq.eval(&b).is_zero() {
            return (b.clone(), b);
        }
        let sb = sign_of(&sq.eval(&b));
        while &b - &a > *eps {
            let m = (&a + &b) / int(2);
            let sm = sign_of(&sq.eval(&m));
            if sm == 0 {
                return (m.clone(), m);
            }
            if sm == sb {
                b = m;
            } else {
                a = m;
            }
        }
        (a, b)
    }
}

fn sign_of(q: &Rational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

fn count_changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

impl fmt::Display for UniPoly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = if c.denom() == &num_bigint::BigInt::from(1) {
                c.numer().to_string()
            } else {
                format!("({}/{})", c.numer(), c.denom())
            };
            parts.push(match i {
                0 => cs,
                1 => format!("{cs}*Y"),
                _ => format!("{cs}*Y^{i}"),
            });
        }
        write!(f, "{}", parts.join(" + "))
    }
}
