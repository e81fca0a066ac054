use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varitri_core::forms::BiForm;
use varitri_core::jetalg::{DiffPoly, FieldDecl, JetContext, MultiIndex};
use varitri_core::random::{self, Shape};
use varitri_core::tricomplex::{
    bounded_cohomology, closure_check, enumerate_monomials, induced_map, key_differential, total_differential,
    AlgebraMorphism, BettiTable, ClosureMode, Differential, InternalDifferential, Strand, Truncation,
};

fn ctx_star() -> JetContext {
    JetContext::new(
        vec!["t".into(), "x".into()],
        vec![FieldDecl::new("u", 0), FieldDecl::antifield("ustar", -1, 0)],
    )
    .unwrap()
}

fn small() -> Shape {
    Shape {
        max_jet: 2,
        max_degree: 2,
        max_terms: 2,
        coeff: 3,
    }
}

/// A Koszul-Tate style differential sending `ustar` to a random function of `u`.
fn random_delta(rng: &mut ChaCha8Rng, ctx: &JetContext) -> InternalDifferential {
    let img = random::poly_with_ghost(rng, ctx, &[0], 0, &small());
    InternalDifferential::new(ctx, vec![DiffPoly::zero(), img]).unwrap()
}

fn random_ghost_form(rng: &mut ChaCha8Rng, ctx: &JetContext, shape: &Shape) -> BiForm {
    let degree = varitri_core::forms::FormDegree {
        p: rng.gen_range(0..=2),
        q: rng.gen_range(0..=2),
        gh: -rng.gen_range(0..=2),
    };
    random::form(rng, ctx, degree, shape)
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn delta_anticommutes_with_both_differentials(seed in any::<u64>()) {
        let ctx = ctx_star();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta = random_delta(&mut rng, &ctx);
        prop_assert!(delta.is_square_zero());
        let w = random_ghost_form(&mut rng, &ctx, &small());
        let h = &delta.apply_form(&w.d_h(&ctx)) + &delta.apply_form(&w).d_h(&ctx);
        let v = &delta.apply_form(&w.d_v()) + &delta.apply_form(&w).d_v();
        prop_assert!(h.is_zero(), "delta d_h + d_h delta = {:?}", h.poly());
        prop_assert!(v.is_zero(), "delta d_v + d_v delta = {:?}", v.poly());
    }

    #[test]
    fn total_differential_squares_to_zero(seed in any::<u64>()) {
        let ctx = ctx_star();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta = random_delta(&mut rng, &ctx);
        let w = random_ghost_form(&mut rng, &ctx, &small());
        let dw = total_differential(&w, &delta).unwrap();
        prop_assert!(total_differential(&dw, &delta).unwrap().is_zero());
    }

    #[test]
    fn induced_maps_commute_with_the_differentials(seed in any::<u64>()) {
        let src = JetContext::new(
            vec!["t".into(), "x".into()],
            vec![FieldDecl::new("v", 0), FieldDecl::antifield("vstar", -1, 0)],
        ).unwrap();
        let tgt = ctx_star();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = Shape { max_jet: 1, max_degree: 2, max_terms: 2, coeff: 3 };
        let p = random::poly_with_ghost(&mut rng, &tgt, &[0], 0, &shape);
        let h = random::poly_with_ghost(&mut rng, &src, &[0], 0, &shape);
        let phi = AlgebraMorphism::new(&src, &tgt, vec![p, tgt.u(1)]).unwrap();
        let ds = InternalDifferential::new(&src, vec![DiffPoly::zero(), h.clone()]).unwrap();
        let dt = InternalDifferential::new(&tgt, vec![DiffPoly::zero(), phi.apply(&h)]).unwrap();
        let w = random_ghost_form(&mut rng, &src, &shape);
        let pw = induced_map(&phi, &ds, &dt, &w).unwrap();
        prop_assert_eq!(induced_map(&phi, &ds, &dt, &w.d_h(&src)).unwrap(), pw.d_h(&tgt));
        prop_assert_eq!(induced_map(&phi, &ds, &dt, &w.d_v()).unwrap(), pw.d_v());
        prop_assert_eq!(induced_map(&phi, &ds, &dt, &ds.apply_form(&w)).unwrap(), dt.apply_form(&pw));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closure_accepts_differentials_and_rejects_perturbations(seed in any::<u64>()) {
        let ctx = ctx_star();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta = random_delta(&mut rng, &ctx);
        let shape = Shape { max_jet: 1, max_degree: 3, max_terms: 2, coeff: 3 };
        let (p, q) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
        let eta = random::key(&mut rng, &ctx, 0, p, q, 3, &shape);
        let key = key_differential(&eta, &delta).unwrap().truncated(2);
        let report = closure_check(&key, &delta, ClosureMode::ToDepth).unwrap();
        prop_assert!(report.closed(), "{:?}", report.first_failure());

        let slots = key.slots(ctx.dim());
        let (r, a) = slots[rng.gen_range(0..slots.len())];
        let t = random::form(&mut rng, &ctx, key.slot_degree(r, a), &shape);
        let visible = !delta.apply_form(&t).is_zero()
            || (r < key.depth && (!t.d_h(&ctx).is_zero() || !t.d_v().is_zero()));
        prop_assume!(visible);
        let mut bad = key.clone();
        bad.set(r, a, &key.get(r, a) + &t).unwrap();
        prop_assert!(!closure_check(&bad, &delta, ClosureMode::ToDepth).unwrap().closed());
        prop_assert!(!closure_check(&bad, &delta, ClosureMode::Strict).unwrap().closed());
    }
}

fn check_euler_characteristic(table: &BettiTable) {
    let mut strands: BTreeMap<Strand, Vec<_>> = BTreeMap::new();
    for e in &table.entries {
        strands.entry(e.strand).or_default().push(e);
    }
    for (strand, mut entries) in strands {
        entries.sort_by_key(|e| e.degree);
        for w in entries.windows(2) {
            if w[1].degree == w[0].degree + 1 {
                assert_eq!(w[0].rank_out, w[1].rank_in, "{strand:?}");
            }
        }
        for e in entries.iter().filter(|e| e.certified) {
            assert_eq!(e.betti, e.dim - e.rank_in - e.rank_out);
        }
        let contiguous = entries.windows(2).all(|w| w[1].degree == w[0].degree + 1);
        if !contiguous || !entries.iter().all(|e| e.certified) {
            continue;
        }
        let sign = |d: i64| if d.rem_euclid(2) == 0 { 1 } else { -1 };
        let lo = entries.first().unwrap();
        let hi = entries.last().unwrap();
        let chi_betti: i64 = entries.iter().map(|e| sign(e.degree) * e.betti as i64).sum();
        let chi_dim: i64 = entries.iter().map(|e| sign(e.degree) * e.dim as i64).sum();
        let boundary = sign(lo.degree) * lo.rank_in as i64 + sign(hi.degree) * hi.rank_out as i64;
        assert_eq!(chi_betti + boundary, chi_dim, "{strand:?}");
    }
}

#[test]
fn euler_characteristic_identity() {
    let free = JetContext::new(vec!["x".into()], vec![FieldDecl::new("u", 0)]).unwrap();
    let star = JetContext::new(
        vec!["x".into()],
        vec![FieldDecl::new("u", 0), FieldDecl::antifield("ustar", -1, 0)],
    )
    .unwrap();
    let kt = InternalDifferential::new(&star, vec![DiffPoly::zero(), star.u(0)]).unwrap();
    let cases = [
        (&free, Differential::Vertical, (0, 1), (0, 2), (0, 0)),
        (&free, Differential::Horizontal, (0, 1), (0, 2), (0, 0)),
        (&star, Differential::Internal(kt.clone()), (0, 1), (0, 1), (-2, 0)),
        (&star, Differential::Total(kt), (0, 1), (0, 1), (-2, 0)),
    ];
    for (ctx, diff, p, q, ghost) in cases {
        for max_jet in 1..=2 {
            let trunc = Truncation {
                max_jet,
                max_weight: 2,
                p,
                q,
                ghost,
            };
            check_euler_characteristic(&bounded_cohomology(ctx, diff.clone(), trunc).unwrap());
        }
    }
}

#[test]
fn zero_differential_has_full_betti_numbers() {
    let ctx = JetContext::new(
        vec!["x".into()],
        vec![FieldDecl::new("u", 0), FieldDecl::antifield("ustar", -1, 0)],
    )
    .unwrap();
    let trunc = Truncation {
        max_jet: 1,
        max_weight: 2,
        p: (0, 1),
        q: (0, 1),
        ghost: (-2, 0),
    };
    let table = bounded_cohomology(&ctx, Differential::Internal(InternalDifferential::zero(&ctx)), trunc).unwrap();
    assert!(!table.entries.is_empty());
    for e in &table.entries {
        assert_eq!(e.betti, e.dim, "{e:?}");
    }
}

#[test]
fn quasi_smooth_pieces_have_symmetric_times_exterior_dimension() {
    for n in 1..=2usize {
        let base: Vec<String> = ["t", "x"][2 - n..].iter().map(|s| s.to_string()).collect();
        let ctx = JetContext::new(base, vec![FieldDecl::new("u", 0), FieldDecl::antifield("ustar", -1, 0)]).unwrap();
        for b0 in 0..=2u32 {
            for b1 in 0..=2u32 {
                let max_weight = 4;
                let mut counts: BTreeMap<(i32, u32), i64> = BTreeMap::new();
                for m in enumerate_monomials(&ctx, &[b0, b1], max_weight, 0) {
                    *counts.entry((m.ghost(), m.weight())).or_default() += 1;
                }
                let n0 = MultiIndex::up_to_order(n, b0).len() as i64;
                let n1 = MultiIndex::up_to_order(n, b1).len() as i64;
                for q in 0..=max_weight as i64 {
                    for i in 0..=q {
                        let expected = binomial(n0 + q - i - 1, q - i) * binomial(n1, i);
                        let found = counts.get(&(-(i as i32), q as u32)).copied().unwrap_or(0);
                        assert_eq!(found, expected, "n={n} budgets=({b0},{b1}) q={q} i={i}");
                    }
                }
            }
        }
    }
}
