use num_traits::{One, Zero};
use proptest::prelude::*;
use qhcenter::catalog::{Catalog, Condition, Mode};
use qhcenter::cli::parser::{parse_expr, Ast, Var};
use qhcenter::decomposition::{homogeneous_associate, reconstruct};
use qhcenter::monodromy::is_monodromic;
use qhcenter::poly::{euler_operator, qh_degree, qh_split, rat, rat_to_f64};
use qhcenter::{classify, decompose, BiPoly, QHField, Rational, TypeVector, UniPoly};

const TYPES: [(u32, u32); 7] = [(1, 1), (1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 5)];

fn ty(i: usize) -> TypeVector {
    TypeVector::new(TYPES[i].0, TYPES[i].1).unwrap()
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

/// Monomials `x^a y^b` with `t1 a + t2 b = k`.
fn monomials(t: TypeVector, k: u32) -> Vec<(u32, u32)> {
    (0..=k / t.t1).filter_map(|a| {
        let rest = k - a * t.t1;
        (rest % t.t2 == 0).then_some((a, rest / t.t2))
    }).collect()
}

fn qh_poly(t: TypeVector, k: u32, coeffs: &[Rational]) -> BiPoly {
    BiPoly::from_terms(monomials(t, k).into_iter().zip(coeffs.iter().cycle()).map(|((a, b), c)| (a, b, c.clone())))
}

/// A quasi-homogeneous polynomial: type index, degree and coefficients.
fn qh_case(max_k: u32) -> impl Strategy<Value = (TypeVector, u32, BiPoly)> {
    (0..TYPES.len(), 0..=max_k, prop::collection::vec(small_rat(), 12)).prop_map(|(i, k, c)| {
        let t = ty(i);
        (t, k, qh_poly(t, k, &c))
    })
}

/// `P` in degree `r + t1`, `Q` in degree `r + t2`, not both zero.
fn qh_field(max_r: u32) -> impl Strategy<Value = (TypeVector, BiPoly, BiPoly)> {
    (0..TYPES.len(), 0..=max_r, prop::collection::vec(small_rat(), 12), prop::collection::vec(small_rat(), 12))
        .prop_filter_map("zero field", |(i, r, a, b)| {
            let t = ty(i);
            let p = qh_poly(t, r + t.t1, &a);
            let q = qh_poly(t, r + t.t2, &b);
            (!p.is_zero() || !q.is_zero()).then_some((t, p, q))
        })
}

/// Rescales `x -> e^t1 x, y -> e^t2 y` and divides out `e^(r + t_i)`.
fn weighted_rescale(f: &QHField, e: &Rational) -> QHField {
    let sub = |p: &BiPoly, shift: u32| {
        BiPoly::from_terms(p.terms().map(|(m, c)| {
            let w = f.t.weight(m.a, m.b) as i32 - shift as i32;
            (m.a, m.b, c * pow(e, w))
        }))
    };
    QHField::new_unchecked_coprime(sub(&f.p, f.t.t1), sub(&f.q, f.t.t2), f.t).unwrap()
}

fn pow(e: &Rational, k: i32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..k.unsigned_abs() {
        out *= e;
    }
    if k < 0 { out.recip() } else { out }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn euler_identity((t, k, p) in qh_case(14)) {
        prop_assume!(!p.is_zero());
        prop_assert_eq!(qh_degree(&p, t).unwrap(), Some(k as u64));
        prop_assert_eq!(euler_operator(&p, t), p.scale(&rat(k as i64, 1)));
    }

    #[test]
    fn split_reconstructs(i in 0..TYPES.len(), terms in prop::collection::vec((0u32..6, 0u32..6, small_rat()), 1..10)) {
        let t = ty(i);
        let p = BiPoly::from_terms(terms);
        let parts = qh_split(&p, t);
        let mut sum = BiPoly::zero();
        let mut last = None;
        for (k, c) in &parts {
            prop_assert_eq!(qh_degree(c, t).unwrap(), Some(*k));
            prop_assert!(last < Some(*k));
            last = Some(*k);
            sum = sum.add(c);
        }
        prop_assert_eq!(sum, p);
    }

    #[test]
    fn associate_round_trip((t, _k, p) in qh_case(16)) {
        prop_assume!(!p.is_zero());
        let a = homogeneous_associate(&p, t).unwrap();
        prop_assert_eq!(a.expand(t), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn decomposition_reconstructs((t, p, q) in qh_field(4)) {
        let f = QHField::new_unchecked_coprime(p.clone(), q.clone(), t).unwrap();
        let d = decompose(&f).unwrap();
        prop_assert_eq!(d.reconstruct(), (p, q));
        prop_assert_eq!(euler_operator(&d.h, t), d.h.scale(&rat(d.h_degree(), 1)));
        if !d.h.is_zero() {
            prop_assert_eq!(qh_degree(&d.h, t).unwrap(), Some(d.h_degree() as u64));
        }
        if !d.mu.is_zero() {
            prop_assert_eq!(qh_degree(&d.mu, t).unwrap(), Some(d.r as u64));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    // Any other graded pair gives a different field.
    #[test]
    fn decomposition_is_unique((t, p, q) in qh_field(6), c in prop::collection::vec(small_rat(), 12), which in 0..2usize) {
        let f = QHField::new_unchecked_coprime(p.clone(), q.clone(), t).unwrap();
        let d = decompose(&f).unwrap();
        let (mut h, mut mu) = (d.h.clone(), d.mu.clone());
        let delta = if which == 0 { qh_poly(t, d.h_degree() as u32, &c) } else { qh_poly(t, d.r as u32, &c) };
        prop_assume!(!delta.is_zero());
        if which == 0 { h = h.add(&delta) } else { mu = mu.add(&delta) }
        prop_assert_ne!(reconstruct(&h, &mu, t), (p, q));
    }

    #[test]
    fn monodromy_scaling_invariance((t, p, q) in qh_field(4), c in 1i64..30, e in 1i64..6) {
        let f = QHField::new_unchecked_coprime(p, q, t).unwrap();
        let base = is_monodromic(&decompose(&f).unwrap()).unwrap();
        let timed = is_monodromic(&decompose(&f.scaled(&rat(c, 7))).unwrap()).unwrap();
        let e = rat(e, 3);
        let moved = is_monodromic(&decompose(&weighted_rescale(&f, &e)).unwrap()).unwrap();
        prop_assert_eq!((base.monodromic, base.reason), (timed.monodromic, timed.reason));
        prop_assert_eq!((base.monodromic, base.reason), (moved.monodromic, moved.reason));
    }
}

/// Sign changes of `p` on a fine grid over `[-b, b]`.
fn grid_sign_changes(p: &UniPoly, b: f64, step: f64) -> usize {
    let pf = p.to_f64();
    let mut prev = 0.0f64;
    let mut n = 0;
    // irrational offset keeps grid points off rational roots
    let mut x = -b + step * std::f64::consts::FRAC_1_SQRT_2;
    while x < b {
        let v = pf.eval(&x);
        if v != 0.0 {
            if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
                n += 1;
            }
            prev = v;
        }
        x += step;
    }
    n
}

/// `prod (x - r_i/4)^m_i * prod (x^2 + s_j)` with distinct `r_i`.
fn rooted(roots: &[(i64, u32)], quads: &[i64]) -> (UniPoly, UniPoly, usize) {
    let mut seen = std::collections::BTreeSet::new();
    let mut p = UniPoly::constant(rat(3, 2));
    let mut odd = UniPoly::constant(Rational::one());
    for &(r, m) in roots {
        if !seen.insert(r) {
            continue;
        }
        let f = UniPoly::new(vec![rat(-r, 4), Rational::one()]);
        p = p.mul(&f.pow(m));
        odd = odd.mul(&f);
    }
    for &s in quads {
        let q = UniPoly::new(vec![rat(s, 5), Rational::zero(), Rational::one()]);
        p = p.mul(&q);
        odd = odd.mul(&q);
    }
    (p, odd, seen.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sturm_matches_sampling(
        roots in prop::collection::vec((-20i64..=20, 1u32..=3), 0..6),
        quads in prop::collection::vec(1i64..=20, 0..3),
    ) {
        let (p, odd, distinct) = rooted(&roots, &quads);
        prop_assume!(p.degree().unwrap_or(0) <= 10);
        prop_assert_eq!(p.sturm_real_roots().unwrap(), distinct);
        let b = rat_to_f64(&odd.cauchy_bound());
        prop_assert_eq!(grid_sign_changes(&odd, b, 1.0 / 97.0), distinct);
    }

    #[test]
    fn sturm_on_random_polynomials(c in prop::collection::vec(-9i64..=9, 2..=11)) {
        let p = UniPoly::new(c.iter().map(|&v| rat(v, 1)).collect());
        prop_assume!(p.degree().unwrap_or(0) >= 1);
        let n = p.sturm_real_roots().unwrap();
        let iv = p.isolate_real_roots().unwrap();
        prop_assert_eq!(iv.len(), n);
        let b = p.cauchy_bound();
        prop_assert_eq!(p.sturm_count_in(&-b.clone(), &b), n);
        // sampling can merge close roots but never invent one of odd multiplicity
        prop_assert!(grid_sign_changes(&p, rat_to_f64(&b), 1e-3) <= n);
    }

    #[test]
    fn squarefree_reconstructs(
        lin in prop::collection::vec((-10i64..=10, 1u32..=4), 0..4),
        quad in prop::collection::vec((-6i64..=6, 1i64..=9, 1u32..=3), 0..3),
    ) {
        let mut p = UniPoly::constant(rat(-2, 3));
        for &(r, m) in &lin {
            p = p.mul(&UniPoly::new(vec![rat(-r, 1), Rational::one()]).pow(m));
        }
        for &(b, c, m) in &quad {
            p = p.mul(&UniPoly::new(vec![rat(b * b + c, 1), rat(2 * b, 1), Rational::one()]).pow(m));
        }
        let sq = p.squarefree_decomposition().unwrap();
        let mut back = UniPoly::constant(p.lead());
        for (f, m) in &sq {
            prop_assert_eq!(f.gcd(&f.derivative()).degree(), Some(0));
            back = back.mul(&f.pow(*m));
        }
        prop_assert_eq!(back, p);
        for i in 0..sq.len() {
            for j in i + 1..sq.len() {
                prop_assert_eq!(sq[i].0.gcd(&sq[j].0).degree(), Some(0));
            }
        }
    }
}

fn num() -> impl Strategy<Value = Ast> {
    (0i64..50, 1i64..6).prop_map(|(n, d)| Ast::Num(rat(n, d)))
}

fn ast() -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![num(), Just(Ast::Var(Var::X)), Just(Ast::Var(Var::Y))];
    leaf.prop_recursive(5, 40, 2, |inner| {
        let b = |a: Ast| Box::new(a);
        prop_oneof![
            inner.clone().prop_map(move |a| Ast::Neg(b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Ast::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Ast::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Ast::Mul(b(x), b(y))),
            // literal/literal folds on parse, so keep one side symbolic
            (inner.clone(), 1i64..9, 1i64..4)
                .prop_filter("folds", |(x, _, _)| !matches!(x, Ast::Num(_)))
                .prop_map(move |(x, n, d)| Ast::Div(b(x), b(Ast::Num(rat(n, d))))),
            (inner, 0u32..4).prop_map(move |(x, n)| Ast::Pow(b(x), n)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parser_round_trip(a in ast()) {
        let text = a.to_string();
        let back = parse_expr(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(&back, &a, "{}", text);
        prop_assert_eq!(back.to_poly(), a.to_poly());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classification_survives_time_rescale(seed in 0u64..10_000, c in 1i64..40) {
        let fam = Catalog::builtin().get("S11").unwrap();
        let params = fam.sample(Mode::OnMonodromic, 1, seed).unwrap();
        let f = fam.instantiate(&params[0]).unwrap();
        let a = classify(&f).unwrap();
        let b = classify(&f.scaled(&rat(c, 9))).unwrap();
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn reversibility_survives_time_rescale(seed in 0u64..10_000, c in 1i64..40, on in any::<bool>()) {
        let fam = Catalog::builtin().get("S19").unwrap();
        let mode = if on { Mode::OnReversible } else { Mode::OnCenter };
        let params = fam.sample(mode, 1, seed).unwrap();
        let f = fam.instantiate(&params[0]).unwrap();
        let a = qhcenter::reversibility::is_reversible(&f).unwrap();
        let b = qhcenter::reversibility::is_reversible(&f.scaled(&rat(c, 9))).unwrap();
        prop_assert_eq!(a.is_some(), b.is_some());
    }
}

#[test]
fn sampling_is_seeded_and_respects_predicates() {
    let cat = Catalog::builtin();
    for name in ["S11", "S18", "S19", "S24", "S29", "S31"] {
        let fam = cat.get(name).unwrap();
        for (mode, cond, want) in [
            (Mode::OnCenter, Condition::Center, true),
            (Mode::OffCenter, Condition::Center, false),
            (Mode::OnMonodromic, Condition::Monodromic, true),
        ] {
            let Ok(a) = fam.sample(mode, 12, 42) else { continue };
            let b = fam.sample(mode, 12, 42).unwrap();
            assert_eq!(a, b, "{name} {mode:?}");
            assert_ne!(a, fam.sample(mode, 12, 43).unwrap(), "{name} {mode:?}");
            for p in &a {
                assert_eq!(fam.condition(cond, p).unwrap(), Some(want), "{name} {mode:?}");
                let f = fam.instantiate(p).unwrap();
                assert_eq!((f.t, f.r), (fam.t, fam.r));
            }
        }
    }
}
