//! Classical low-degree families S11–S31 with their stated monodromy,
//! center, reversibility and integrability conditions.
//!
//! Families live in a line-oriented text file (`data/families.catalog`).
//! Polynomials and predicates are written in a small prefix grammar:
//! `(+ a b ...)`, `(- a)`, `(- a b)`, `(* ...)`, `(/ a b)`, `(^ a n)`,
//! comparisons `= != < <= > >=`, `and or not`, `(if c a b)`, integers and
//! fractions like `-3/2`, the variables `x` and `y`, slot names, `let`
//! names, and bare symbols used as monodromy reasons.
//!
//! ```text
//! family S15
//! type 1 2
//! degree 1
//! slots a20 a01 b30 b11
//! P (+ (* a20 (^ x 2)) (* a01 y))
//! Q (+ (* b30 (^ x 3)) (* b11 x y))
//! monodromic (< (+ (^ (- b11 (* 2 a20)) 2) (* 8 b30 a01)) 0)
//! center (= (+ (* 2 a20) b11) 0)
//! solve on_center b11 (* -2 a20)
//! end
//! ```

use crate::decomposition::{reconstruct, QHField};
use crate::error::{Error, Result};
use crate::monodromy::MonodromyReason;
use crate::poly::{int, BiPoly, Rational, TypeVector};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Name(String),
    Call(String, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Poly(BiPoly),
    Bool(bool),
    Sym(String),
}

impl Value {
    fn poly(self) -> std::result::Result<BiPoly, String> {
        match self {
            Value::Poly(p) => Ok(p),
            other => Err(format!("expected a number or polynomial, got {other:?}")),
        }
    }

    fn constant(self) -> std::result::Result<Rational, String> {
        let p = self.poly()?;
        if p.total_degree().unwrap_or(0) > 0 {
            return Err("expected a constant".into());
        }
        Ok(p.coeff(0, 0))
    }

    fn boolean(self) -> std::result::Result<bool, String> {
        match self {
            Value::Bool(b) => Ok(b),
            other => Err(format!("expected a boolean, got {other:?}")),
        }
    }
}

fn tokenize(s: &str) -> Vec<String> {
    s.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(str::to_string).collect()
}

fn parse_number(tok: &str) -> Option<Rational> {
    let (n, d) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let n: num_bigint::BigInt = n.parse().ok()?;
    let d: num_bigint::BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

fn parse_tokens(toks: &[String], pos: &mut usize) -> std::result::Result<Expr, String> {
    let t = toks.get(*pos).ok_or("unexpected end of expression")?;
    *pos += 1;
    match t.as_str() {
        "(" => {
            let head = toks.get(*pos).ok_or("empty call")?.clone();
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match toks.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Expr::Call(head, args));
                    }
                    Some(_) => args.push(parse_tokens(toks, pos)?),
                    None => return Err("missing ')'".into()),
                }
            }
        }
        ")" => Err("unexpected ')'".into()),
        tok => Ok(parse_number(tok).map(Expr::Num).unwrap_or_else(|| Expr::Name(tok.to_string()))),
    }
}

impl Expr {
    pub fn parse(s: &str) -> std::result::Result<Expr, String> {
        let toks = tokenize(s);
        let mut pos = 0;
        let e = parse_tokens(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(format!("trailing input after expression: {}", toks[pos..].join(" ")));
        }
        Ok(e)
    }

    pub fn eval(&self, env: &HashMap<String, Value>) -> std::result::Result<Value, String> {
        match self {
            Expr::Num(q) => Ok(Value::Poly(BiPoly::constant(q.clone()))),
            Expr::Name(n) => match n.as_str() {
                "x" => Ok(Value::Poly(BiPoly::x())),
                "y" => Ok(Value::Poly(BiPoly::y())),
                "true" => Ok(Value::Bool(true)),
                "false" => Ok(Value::Bool(false)),
                _ => match env.get(n) {
                    Some(v) => Ok(v.clone()),
                    None if SYMBOLS.contains(&n.as_str()) => Ok(Value::Sym(n.clone())),
                    None => Err(format!("unbound name {n}")),
                },
            },
            Expr::Call(head, args) => self.call(head, args, env),
        }
    }

    fn call(&self, head: &str, args: &[Expr], env: &HashMap<String, Value>) -> std::result::Result<Value, String> {
        let polys = || -> std::result::Result<Vec<BiPoly>, String> {
            args.iter().map(|a| a.eval(env).and_then(Value::poly)).collect()
        };
        let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(format!("{head} takes {n} arguments")) };
        match head {
            "+" => Ok(Value::Poly(polys()?.iter().fold(BiPoly::zero(), |a, b| a.add(b)))),
            "*" => Ok(Value::Poly(polys()?.iter().fold(BiPoly::constant(int(1)), |a, b| a.mul(b)))),
            "-" => {
                let p = polys()?;
                match p.len() {
                    1 => Ok(Value::Poly(p[0].neg())),
                    2 => Ok(Value::Poly(p[0].sub(&p[1]))),
                    _ => Err("- takes 1 or 2 arguments".into()),
                }
            }
            "/" => {
                arity(2)?;
                let a = args[0].eval(env)?.poly()?;
                let b = args[1].eval(env)?.constant()?;
                if b.is_zero() {
                    return Err("division by zero".into());
                }
                Ok(Value::Poly(a.scale(&(int(1) / b))))
            }
            "^" => {
                arity(2)?;
                let a = args[0].eval(env)?.poly()?;
                let n = args[1].eval(env)?.constant()?;
                if !n.is_integer() {
                    return Err("non-integer exponent".into());
                }
                let n: i64 = n.to_integer().try_into().map_err(|_| "exponent too large")?;
                if n >= 0 {
                    Ok(Value::Poly(a.pow(n as u32)))
                } else {
                    let c = Value::Poly(a).constant()?;
                    if c.is_zero() {
                        return Err("zero to a negative power".into());
                    }
                    Ok(Value::Poly(BiPoly::constant(num_traits::Pow::pow(int(1) / c, (-n) as u32))))
                }
            }
            "=" | "!=" | "<" | "<=" | ">" | ">=" => {
                arity(2)?;
                let a = args[0].eval(env)?;
                let b = args[1].eval(env)?;
                if let (Value::Sym(p), Value::Sym(q)) = (&a, &b) {
                    return Ok(Value::Bool(if head == "=" { p == q } else { p != q }));
                }
                let d = a.constant()? - b.constant()?;
                Ok(Value::Bool(match head {
                    "=" => d.is_zero(),
                    "!=" => !d.is_zero(),
                    "<" => d.is_negative(),
                    "<=" => !d.is_positive(),
                    ">" => d.is_positive(),
                    _ => !d.is_negative(),
                }))
            }
            "and" => {
                for a in args {
                    if !a.eval(env)?.boolean()? {
                        return Ok(Value::Bool(false));
                    }
                }
                Ok(Value::Bool(true))
            }
            "or" => {
                for a in args {
                    if a.eval(env)?.boolean()? {
                        return Ok(Value::Bool(true));
                    }
                }
                Ok(Value::Bool(false))
            }
            "not" => {
                arity(1)?;
                Ok(Value::Bool(!args[0].eval(env)?.boolean()?))
            }
            "if" => {
                arity(3)?;
                if args[0].eval(env)?.boolean()? {
                    args[1].eval(env)
                } else {
                    args[2].eval(env)
                }
            }
            _ => Err(format!("unknown operator {head}")),
        }
    }
}

const SYMBOLS: [&str; 5] = ["monodromic", "x_factor", "y_factor", "real_factor", "zero_hamiltonian"];

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => write!(f, "{q}"),
            Expr::Name(n) => write!(f, "{n}"),
            Expr::Call(h, a) => {
                write!(f, "({h}")?;
                for e in a {
                    write!(f, " {e}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Sampling modes: which side of which condition the samples lie on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Random,
    OnMonodromic,
    OffMonodromic,
    OnCenter,
    OffCenter,
    OnReversible,
    Hamiltonian,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::Random,
        Mode::OnMonodromic,
        Mode::OffMonodromic,
        Mode::OnCenter,
        Mode::OffCenter,
        Mode::OnReversible,
        Mode::Hamiltonian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Random => "random",
            Mode::OnMonodromic => "on_monodromic",
            Mode::OffMonodromic => "off_monodromic",
            Mode::OnCenter => "on_center",
            Mode::OffCenter => "off_center",
            Mode::OnReversible => "on_reversible",
            Mode::Hamiltonian => "hamiltonian",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown sampling mode {s}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Template {
    Field { p: Expr, q: Expr },
    Split { h: Expr, mu: Expr },
}

/// One family record.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub name: String,
    pub aliases: Vec<String>,
    pub t: TypeVector,
    pub r: i64,
    pub slots: Vec<String>,
    /// Sampled helper parameters that are not part of the field.
    pub aux: Vec<String>,
    lets: Vec<(String, Expr)>,
    template: Template,
    pub domain: Option<Expr>,
    pub monodromic: Option<Expr>,
    pub center: Option<Expr>,
    pub reversible: Option<Expr>,
    pub integrable: Option<Expr>,
    pub reason: Option<Expr>,
    solves: Vec<(Mode, String, Expr)>,
    /// Whether instantiation insists on `gcd(P, Q) = 1`.
    pub coprime: bool,
}

/// Which stated condition to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Monodromic,
    Center,
    Reversible,
    Integrable,
}

impl FamilySpec {
    fn env(&self, params: &[Rational], aux: &[Rational]) -> Result<HashMap<String, Value>> {
        if params.len() != self.slots.len() {
            return Err(Error::Arity { expected: self.slots.len(), got: params.len() });
        }
        let mut env: HashMap<String, Value> = self
            .slots
            .iter()
            .zip(params)
            .chain(self.aux.iter().zip(aux))
            .map(|(n, v)| (n.clone(), Value::Poly(BiPoly::constant(v.clone()))))
            .collect();
        for (n, e) in &self.lets {
            // Lets that need missing aux values are simply left unbound.
            if let Ok(v) = e.eval(&env) {
                env.insert(n.clone(), v);
            }
        }
        Ok(env)
    }

    fn err(&self, e: String) -> Error {
        Error::Catalog(format!("{}: {e}", self.name))
    }

    pub fn instantiate(&self, params: &[Rational]) -> Result<QHField> {
        let env = self.env(params, &[])?;
        let poly = |e: &Expr| e.eval(&env).and_then(Value::poly).map_err(|m| self.err(m));
        let (p, q) = match &self.template {
            Template::Field { p, q } => (poly(p)?, poly(q)?),
            Template::Split { h, mu } => reconstruct(&poly(h)?, &poly(mu)?, self.t),
        };
        let f = QHField::new_unchecked_coprime(p, q, self.t)?;
        if f.r != self.r {
            return Err(self.err(format!("instance has degree {} instead of {}", f.r, self.r)));
        }
        // Split families with a repeated factor and mu = 0 are reducible by
        // construction; only the P/Q families are held to coprimality.
        if self.coprime && matches!(self.template, Template::Field { .. }) {
            QHField::new(f.p, f.q, f.t)
        } else {
            Ok(f)
        }
    }

    fn predicate_expr(&self, c: Condition) -> Option<&Expr> {
        match c {
            Condition::Monodromic => self.monodromic.as_ref(),
            Condition::Center => self.center.as_ref(),
            Condition::Reversible => self.reversible.as_ref(),
            Condition::Integrable => self.integrable.as_ref(),
        }
    }

    fn eval_bool(&self, e: &Expr, env: &HashMap<String, Value>) -> Option<bool> {
        e.eval(env).ok().and_then(|v| v.boolean().ok())
    }

    /// The stated condition at `params`; `None` when the family does not state
    /// it or it depends on auxiliary parameters.
    pub fn condition(&self, c: Condition, params: &[Rational]) -> Result<Option<bool>> {
        let env = self.env(params, &[])?;
        Ok(self.predicate_expr(c).and_then(|e| self.eval_bool(e, &env)))
    }

    /// The monodromy reason the stated factorization predicts.
    pub fn expected_reason(&self, params: &[Rational]) -> Result<Option<MonodromyReason>> {
        let env = self.env(params, &[])?;
        let Some(e) = &self.reason else { return Ok(None) };
        let v = e.eval(&env).map_err(|m| self.err(m))?;
        Ok(match v {
            Value::Sym(s) => Some(match s.as_str() {
                "monodromic" => MonodromyReason::Monodromic,
                "x_factor" => MonodromyReason::XFactor,
                "y_factor" => MonodromyReason::YFactor,
                "real_factor" => MonodromyReason::RealFactor,
                "zero_hamiltonian" => MonodromyReason::ZeroHamiltonian,
                _ => return Err(self.err(format!("unknown reason {s}"))),
            }),
            _ => return Err(self.err("reason must be a symbol".into())),
        })
    }

    fn literal(e: Option<&Expr>) -> Option<bool> {
        match e {
            Some(Expr::Name(n)) if n == "true" => Some(true),
            Some(Expr::Name(n)) if n == "false" => Some(false),
            _ => None,
        }
    }

    fn requirements(&self, mode: Mode) -> Result<Vec<(Condition, bool)>> {
        use Condition::*;
        let req = match mode {
            Mode::Random => vec![],
            Mode::OnMonodromic | Mode::Hamiltonian => vec![(Monodromic, true)],
            Mode::OffMonodromic => vec![(Monodromic, false)],
            Mode::OnCenter => vec![(Monodromic, true), (Center, true)],
            Mode::OffCenter => vec![(Monodromic, true), (Center, false)],
            Mode::OnReversible => vec![(Monodromic, true), (Center, true), (Reversible, true)],
        };
        for &(c, want) in &req {
            match (self.predicate_expr(c), Self::literal(self.predicate_expr(c))) {
                (None, _) => {
                    return Err(Error::Unsupported(format!("{} states no {c:?} condition", self.name)));
                }
                (_, Some(v)) if v != want => {
                    return Err(Error::EmptyManifold(format!(
                        "{}: the {c:?} condition is identically {v}, so {} has no samples",
                        self.name,
                        mode.name()
                    )));
                }
                _ => {}
            }
        }
        if mode == Mode::Hamiltonian && !self.solves.iter().any(|(m, _, _)| *m == mode) {
            return Err(Error::Unsupported(format!("{} has no parametrization of mu = 0", self.name)));
        }
        Ok(req)
    }

    /// Draws one candidate; `None` when it misses the mode's conditions.
    fn try_sample(&self, mode: Mode, rng: &mut ChaCha8Rng, req: &[(Condition, bool)]) -> Option<Vec<Rational>> {
        let mut vals: Vec<Rational> = (0..self.slots.len()).map(|_| draw(rng)).collect();
        let aux: Vec<Rational> = (0..self.aux.len()).map(|_| draw(rng)).collect();
        for (m, slot, e) in &self.solves {
            if *m != mode {
                continue;
            }
            let env = self.env(&vals, &aux).ok()?;
            let v = e.eval(&env).ok()?.constant().ok()?;
            let i = self.slots.iter().position(|s| s == slot)?;
            vals[i] = v;
        }
        let env = self.env(&vals, &aux).ok()?;
        if let Some(d) = &self.domain {
            if !self.eval_bool(d, &env)? {
                return None;
            }
        }
        for &(c, want) in req {
            if self.eval_bool(self.predicate_expr(c)?, &env)? != want {
                return None;
            }
        }
        self.instantiate(&vals).ok()?;
        Some(vals)
    }

    /// `count` deterministic samples for `mode` from `seed`.
    pub fn sample(&self, mode: Mode, count: usize, seed: u64) -> Result<Vec<Vec<Rational>>> {
        let req = self.requirements(mode)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let budget = 2000 * count.max(1) + 10_000;
        let mut tries = 0;
        while out.len() < count {
            if tries >= budget {
                return Err(Error::EmptyManifold(format!(
                    "{}: no {} sample found in {budget} draws",
                    self.name,
                    mode.name()
                )));
            }
            tries += 1;
            if let Some(v) = self.try_sample(mode, &mut rng, &req) {
                out.push(v);
            }
        }
        Ok(out)
    }
}

/// Nonzero rational with numerator and denominator in `[-20, 20]`.
fn draw(rng: &mut ChaCha8Rng) -> Rational {
    let mut n = 0i64;
    while n == 0 {
        n = rng.gen_range(-20..=20);
    }
    let d: i64 = rng.gen_range(1..=20);
    Rational::new(n.into(), d.into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    pub families: Vec<FamilySpec>,
}

const BUILTIN: &str = include_str!("../data/families.catalog");

impl Catalog {
    pub fn builtin() -> &'static Catalog {
        static CAT: OnceLock<Catalog> = OnceLock::new();
        CAT.get_or_init(|| Catalog::parse(BUILTIN).expect("the bundled catalog parses"))
    }

    pub fn get(&self, name: &str) -> Result<&FamilySpec> {
        let n = name.to_ascii_lowercase();
        self.families
            .iter()
            .find(|f| f.name.to_ascii_lowercase() == n || f.aliases.iter().any(|a| a.to_ascii_lowercase() == n))
            .ok_or_else(|| Error::UnknownFamily(name.to_string()))
    }

    pub fn parse(text: &str) -> Result<Catalog> {
        let mut families = Vec::new();
        let mut cur: Option<Builder> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: ln + 1, col: 1, msg };
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            if key == "family" {
                if cur.is_some() {
                    return Err(perr("missing 'end' before new family".into()));
                }
                cur = Some(Builder::new(rest));
                continue;
            }
            let b = cur.as_mut().ok_or_else(|| perr(format!("'{key}' outside a family record")))?;
            let expr = |s: &str| Expr::parse(s).map_err(|m| perr(m.clone()));
            match key {
                "alias" => b.aliases.extend(rest.split_whitespace().map(str::to_string)),
                "type" => {
                    let v: Vec<u32> = rest.split_whitespace().filter_map(|s| s.parse().ok()).collect();
                    if v.len() != 2 {
                        return Err(perr("type needs two integers".into()));
                    }
                    b.t = Some(TypeVector::new(v[0], v[1])?);
                }
                "degree" => b.r = Some(rest.parse().map_err(|_| perr("bad degree".into()))?),
                "slots" => b.slots = rest.split_whitespace().map(str::to_string).collect(),
                "aux" => b.aux = rest.split_whitespace().map(str::to_string).collect(),
                "let" => {
                    let (n, e) = rest.split_once(char::is_whitespace).ok_or_else(|| perr("let needs a name".into()))?;
                    b.lets.push((n.to_string(), expr(e)?));
                }
                "P" => b.p = Some(expr(rest)?),
                "Q" => b.q = Some(expr(rest)?),
                "H" => b.h = Some(expr(rest)?),
                "MU" => b.mu = Some(expr(rest)?),
                "domain" => b.domain = Some(expr(rest)?),
                "monodromic" => b.monodromic = Some(expr(rest)?),
                "center" => b.center = Some(expr(rest)?),
                "reversible" => b.reversible = Some(expr(rest)?),
                "integrable" => b.integrable = Some(expr(rest)?),
                "reason" => b.reason = Some(expr(rest)?),
                "coprime" => b.coprime = rest != "false",
                "solve" => {
                    let mut it = rest.splitn(3, char::is_whitespace);
                    let (Some(m), Some(slot), Some(e)) = (it.next(), it.next(), it.next()) else {
                        return Err(perr("solve needs a mode, a slot and an expression".into()));
                    };
                    b.solves.push((m.parse()?, slot.to_string(), expr(e)?));
                }
                "end" => {
                    let f = cur.take().unwrap().build().map_err(perr)?;
                    families.push(f);
                }
                _ => return Err(perr(format!("unknown key '{key}'"))),
            }
        }
        if cur.is_some() {
            return Err(Error::Catalog("unterminated family record".into()));
        }
        Ok(Catalog { families })
    }
}

#[derive(Default)]
struct Builder {
    name: String,
    aliases: Vec<String>,
    t: Option<TypeVector>,
    r: Option<i64>,
    slots: Vec<String>,
    aux: Vec<String>,
    lets: Vec<(String, Expr)>,
    p: Option<Expr>,
    q: Option<Expr>,
    h: Option<Expr>,
    mu: Option<Expr>,
    domain: Option<Expr>,
    monodromic: Option<Expr>,
    center: Option<Expr>,
    reversible: Option<Expr>,
    integrable: Option<Expr>,
    reason: Option<Expr>,
    solves: Vec<(Mode, String, Expr)>,
    coprime: bool,
}

impl Builder {
    fn new(name: &str) -> Self {
        Builder { name: name.to_string(), coprime: true, ..Default::default() }
    }

    fn build(self) -> std::result::Result<FamilySpec, String> {
        let template = match (self.p, self.q, self.h, self.mu) {
            (Some(p), Some(q), None, None) => Template::Field { p, q },
            (None, None, Some(h), Some(mu)) => Template::Split { h, mu },
            _ => return Err(format!("{}: give either P and Q or H and MU", self.name)),
        };
        for (_, s, _) in &self.solves {
            if !self.slots.contains(s) {
                return Err(format!("{}: solve targets unknown slot {s}", self.name));
            }
        }
        Ok(FamilySpec {
            t: self.t.ok_or(format!("{}: missing type", self.name))?,
            r: self.r.ok_or(format!("{}: missing degree", self.name))?,
            name: self.name,
            aliases: self.aliases,
            slots: self.slots,
            aux: self.aux,
            lets: self.lets,
            template,
            domain: self.domain,
            monodromic: self.monodromic,
            center: self.center,
            reversible: self.reversible,
            integrable: self.integrable,
            reason: self.reason,
            solves: self.solves,
            coprime: self.coprime,
        })
    }
}

/// Formats a parameter vector as `name=value` pairs.
pub fn format_params(f: &FamilySpec, v: &[Rational]) -> String {
    f.slots.iter().zip(v).map(|(n, q)| format!("{n}={q}")).collect::<Vec<_>>().join(", ")
}
