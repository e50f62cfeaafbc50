use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use irrvec::frames;
use irrvec::gram::{gram_matrix, GramError};
use irrvec::ring::{series_divide, Exponents, VarTable, WeightedDegree};
use irrvec::symbols::{Rank, Symbols};
use irrvec::virasoro::{eigen, partitions_between, ModuleContext, ModuleVector, Partition};
use irrvec::{Poly, Rational, Series};

fn table() -> Arc<VarTable> {
    VarTable::new([("x", 1), ("y", 1), ("z", 0)]).unwrap()
}

fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Up to four terms with small coefficients and exponents in `lo..=2`.
fn poly_in(table: Arc<VarTable>, lo: i16) -> impl Strategy<Value = Poly> {
    let n = table.len();
    prop::collection::vec((-5i64..=5, 1i64..=3, prop::collection::vec(lo..=2i16, n)), 0..4).prop_map(move |terms| {
        Poly::from_terms(&table, terms.into_iter().map(|(a, b, e)| (Exponents::from_vec(e), rational(a, b))))
    })
}

fn laurent() -> impl Strategy<Value = Poly> {
    poly_in(table(), -2)
}

fn ordinary() -> impl Strategy<Value = Poly> {
    poly_in(table(), 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_laws(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_partials_commute(a in laurent()) {
        prop_assert_eq!(a.derivative(0).derivative(1), a.derivative(1).derivative(0));
    }

    #[test]
    fn exact_division_undoes_multiplication(a in laurent(), b in laurent()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
    }

    #[test]
    fn derivative_is_a_derivation(a in laurent(), b in laurent(), v in 0usize..3) {
        let lhs = (&a * &b).derivative(v);
        let rhs = &(&a.derivative(v) * &b) + &(&a * &b.derivative(v));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn series_division_round_trips(q in ordinary(), lead in 1i64..5, rest in ordinary()) {
        let t = table();
        let x = 0;
        let b_poly = &Poly::from_int(&t, lead) + &(&rest * &Poly::var_pow(&t, x, 1));
        let a = Series::from_poly(&(&q * &b_poly), x, None);
        let b = Series::from_poly(&b_poly, x, None);
        let quotient = series_divide(&a, &b, None).unwrap();
        prop_assert_eq!(quotient.to_poly(), Series::from_poly(&q, x, None).to_poly());
    }
}

fn constant_module(rank: usize, eigen: &[(i64, i64)], central: (i64, i64)) -> Arc<ModuleContext<Poly>> {
    let t = table();
    let eigen = eigen.iter().map(|&(n, d)| Poly::from_ratio(&t, n, d)).collect();
    ModuleContext::new(rank, eigen, Poly::from_ratio(&t, central.0, central.1))
}

fn module() -> impl Strategy<Value = Arc<ModuleContext<Poly>>> {
    (0usize..=2).prop_flat_map(|rank| {
        (
            prop::collection::vec((-6i64..=6, 1i64..=3), rank + 1),
            (-6i64..=6, 1i64..=2),
        )
            .prop_map(move |(mut eigen, central)| {
                if eigen[rank].0 == 0 {
                    eigen[rank].0 = 1;
                }
                constant_module(rank, &eigen, central)
            })
    })
}

/// Up to six basis vectors of level at most three with constant
/// coefficients.
fn vector_in(ctx: Arc<ModuleContext<Poly>>, with_cyclic: bool) -> impl Strategy<Value = ModuleVector<Poly>> {
    let pool: Vec<Partition> = partitions_between(if with_cyclic { 0 } else { 1 }, 3);
    prop::collection::vec((prop::sample::select(pool), -4i64..=4), 1..=6).prop_map(move |terms| {
        let t = table();
        terms.into_iter().fold(ModuleVector::zero(&ctx), |v, (lambda, c)| {
            v.add(&ModuleVector::from_terms(&ctx, [(lambda, Poly::from_int(&t, c))]))
        })
    })
}

fn basis_vector(ctx: &Arc<ModuleContext<Poly>>, parts: &[u16]) -> ModuleVector<Poly> {
    let mut parts = parts.to_vec();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    ModuleVector::basis(ctx, Partition::new(parts))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `L_m L_n - L_n L_m = (m - n) L_{m+n} + c/12 (m^3 - m) delta_{m+n,0}`
    /// on PBW basis vectors.
    #[test]
    fn commutator_matches_algebra(
        ctx in module(),
        parts in prop::collection::vec(1u16..=3, 0..3),
        m in -3i64..=4,
        n in -3i64..=4,
    ) {
        let v = basis_vector(&ctx, &parts);
        let lhs = v.apply_word(&[m, n]).sub(&v.apply_word(&[n, m]));
        let mut rhs = v.apply_mode(m + n).scale_int(m - n);
        if m + n == 0 {
            let k = Rational::new((m * m * m - m).into(), 12.into());
            rhs = rhs.add(&v.scale(&ctx.central().scale(&k)));
        }
        prop_assert_eq!(lhs, rhs);
    }

    /// `[L_m, [L_n, L_p]] + [L_n, [L_p, L_m]] + [L_p, [L_m, L_n]] = 0`.
    #[test]
    fn jacobi_identity(
        v in module().prop_flat_map(|ctx| vector_in(ctx, true)),
        m in -2i64..=3,
        n in -2i64..=3,
        p in -2i64..=3,
    ) {
        let bracket = |a: i64, b: i64, c: i64| {
            // [L_a, [L_b, L_c]] v
            let inner = |w: &ModuleVector<Poly>| w.apply_word(&[b, c]).sub(&w.apply_word(&[c, b]));
            inner(&v).apply_mode(a).sub(&inner(&v.apply_mode(a)))
        };
        let total = bracket(m, n, p).add(&bracket(n, p, m)).add(&bracket(p, m, n));
        prop_assert!(total.is_zero(), "{}", total);
    }

    /// Straightening a word of creation modes agrees with building it one
    /// mode at a time from the cyclic vector.
    #[test]
    fn creation_words_straighten_consistently(ctx in module(), word in prop::collection::vec(1u16..=3, 1..4)) {
        let modes: Vec<i64> = word.iter().map(|&p| ctx.mode_of_part(p)).collect();
        let direct = ModuleVector::cyclic(&ctx).apply_word(&modes);
        let stepwise = modes.iter().rev().fold(ModuleVector::cyclic(&ctx), |v, &m| v.apply_mode(m));
        prop_assert_eq!(&direct, &stepwise);
        let mut sorted = word.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if sorted == word {
            prop_assert_eq!(direct, basis_vector(&ctx, &word));
        }
    }

    /// Solving for the shifted constant terms of a vector recovers it.
    #[test]
    fn gram_solve_inverts_forward_map(
        (ctx, v) in module()
            .prop_filter("irregular", |c| c.rank() >= 1)
            .prop_flat_map(|ctx| (Just(ctx.clone()), vector_in(ctx, false))),
    ) {
        let block = gram_matrix(&ctx, 1, 3).unwrap();
        let targets: BTreeMap<Partition, Poly> =
            block.index().iter().map(|mu| (mu.clone(), v.apply_tilde_word(mu).constant_term())).collect();
        prop_assert_eq!(block.solve(&targets).unwrap(), v);
    }

    /// Solving a Gram block reproduces the requested shifted constant terms.
    #[test]
    fn gram_solve_round_trips(ctx in module(), hi in 1u32..=3, values in prop::collection::vec((-4i64..=4, 1i64..=3), 7)) {
        let block = match gram_matrix(&ctx, 1, hi) {
            Ok(b) => b,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let t = table();
        let targets: BTreeMap<Partition, Poly> = partitions_between(1, hi)
            .into_iter()
            .zip(values.iter().cycle())
            .map(|(mu, &(n, d))| (mu, Poly::from_ratio(&t, n, d)))
            .collect();
        let v = match block.solve(&targets) {
            Ok(v) => v,
            Err(GramError::SingularGram) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for (mu, want) in &targets {
            prop_assert_eq!(&v.apply_tilde_word(mu).constant_term(), want);
        }
    }
}

/// A monomial in the coordinates `c_1..c_{r-1}, Lambda` (half) or
/// `c_1..c_r` (integer), with its weight.
fn weighted_monomial(sym: &Symbols, coords: &[usize], exps: &[i64]) -> (Poly, i64) {
    let weights = sym.table().clone();
    let mut p = sym.one();
    let mut w = 0;
    for (&v, &e) in coords.iter().zip(exps) {
        p = &p * &Poly::var_pow(sym.table(), v, e);
        w += weights.weight(v) * e;
    }
    (p, w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The zeroth field is the weight grading.
    #[test]
    fn euler_field_measures_weight(r in 2usize..=4, half in any::<bool>(), exps in prop::collection::vec(-3i64..=3, 4)) {
        let sym = Symbols::new(if half { Rank::half(r) } else { Rank::integer(r) }, 0);
        let set = if half { frames::build_half_fields(&sym) } else { frames::integer_fields(&sym) }.unwrap();
        let (m, w) = weighted_monomial(&sym, &set.coords, &exps);
        prop_assert_eq!(set.fields[0].apply(&m), m.scale_int(w));
    }

    /// The fields raise weight by their index.
    #[test]
    fn fields_are_graded(r in 2usize..=4, n in 0usize..4, exps in prop::collection::vec(-2i64..=2, 4)) {
        prop_assume!(n < r);
        let sym = Symbols::new(Rank::half(r), 0);
        let set = frames::build_half_fields(&sym).unwrap();
        let (m, w) = weighted_monomial(&sym, &set.coords, &exps);
        let image = set.fields[n].apply(&m);
        prop_assert!(image.is_homogeneous_of(w + n as i64) || image.is_zero());
    }
}

#[test]
fn eigenvalues_have_their_index_as_weight() {
    for r in 1..=6 {
        let sym = Symbols::new(Rank::integer(r), 0);
        for n in 1..=2 * r as i64 {
            let e = eigen::general_eigenvalue(&sym, n, &sym.c0(), r);
            assert!(e.is_homogeneous_of(n), "r={r} n={n}: {e}");
        }
    }
}

fn symbolic_module(rho: usize) -> (Symbols, Arc<ModuleContext<Poly>>) {
    let sym = Symbols::new(Rank::integer(rho), 0);
    let eigen = eigen::integer_eigenvalues(&sym, rho, &sym.c0(), eigen::Convention::General).unwrap();
    let ctx = ModuleContext::new(rho, eigen, sym.default_central());
    (sym, ctx)
}

/// Coefficient weight plus the sum of the modes in the PBW word.
fn grade(ctx: &ModuleContext<Poly>, lambda: &Partition, c: &Poly) -> Option<i64> {
    let modes: i64 = lambda.parts().iter().map(|&p| ctx.mode_of_part(p)).sum();
    match c.weighted_degree() {
        WeightedDegree::Homogeneous(w) => Some(w + modes),
        _ => None,
    }
}

#[test]
fn cyclic_vector_is_an_eigenvector() {
    for rho in 1..=2 {
        let (sym, ctx) = symbolic_module(rho);
        let cyclic = ModuleVector::cyclic(&ctx);
        for n in rho as i64..=2 * rho as i64 + 2 {
            let expected = if n <= 2 * rho as i64 {
                eigen::general_eigenvalue(&sym, n, &sym.c0(), rho)
            } else {
                sym.zero()
            };
            assert_eq!(cyclic.apply_mode(n), cyclic.scale(&expected), "rho={rho} n={n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `L_n` raises the combined grade by `n`.
    #[test]
    fn modes_respect_the_grading(rho in 1usize..=2, parts in prop::collection::vec(1u16..=3, 0..3), n in -2i64..=5) {
        let (_, ctx) = symbolic_module(rho);
        let v = basis_vector(&ctx, &parts);
        let lambda = v.terms().keys().next().unwrap().clone();
        let start = grade(&ctx, &lambda, &ctx.one()).unwrap();
        for (mu, c) in v.apply_mode(n).terms() {
            prop_assert_eq!(grade(&ctx, mu, c), Some(start + n), "{} -> {}: {}", lambda, mu, c);
        }
    }
}

/// `{L~_mu L_-lambda}` has weight `rho (len mu + len lambda) + |mu| - |lambda|`.
#[test]
fn gram_entries_are_graded() {
    for rho in 1..=2 {
        let (_, ctx) = symbolic_module(rho);
        let block = gram_matrix(&ctx, 0, 3).unwrap();
        for (i, mu) in block.index().iter().enumerate() {
            for (j, lambda) in block.index().iter().enumerate() {
                let w = rho as i64 * (mu.len() + lambda.len()) as i64 + mu.weight() as i64 - lambda.weight() as i64;
                let e = &block.entries()[i][j];
                assert!(e.is_homogeneous_of(w), "rho={rho} ({mu},{lambda}): {e}");
            }
        }
    }
}
