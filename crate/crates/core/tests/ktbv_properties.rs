use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varitri_core::expr::parse;
use varitri_core::jetalg::{evolutionary_apply, DiffPoly, FieldDecl, JetContext, MultiIndex};
use varitri_core::ktbv::{
    antibracket, bv_differential, bv_extend, hamiltonian_field, kt_extend, master_equation_check,
};
use varitri_core::random::{self, Shape};
use varitri_core::tricomplex::{AlgebraMorphism, InternalDifferential};
use varitri_core::varops::{classes_equal, triviality_check, PdeSystem, TotalDiffOperator};

/// `u` (ghost 0), `c` (ghost 1) and their antifields.
fn ctx() -> JetContext {
    JetContext::new(
        vec!["x".into()],
        vec![
            FieldDecl::new("u", 0),
            FieldDecl::new("c", 1),
            FieldDecl::antifield("ustar", -1, 0),
            FieldDecl::antifield("cstar", -2, 1),
        ],
    )
    .unwrap()
}

fn shape() -> Shape {
    Shape {
        max_jet: 1,
        max_degree: 3,
        max_terms: 2,
        coeff: 3,
    }
}

/// Field and antifield skeletons of each ghost number; random inputs are
/// combinations of these with random functions of `u`.
fn skeletons(g: i32) -> &'static [&'static str] {
    match g {
        -1 => &["ustar", "ustar_x", "cstar*c", "cstar*c_x", "ustar*u_x"],
        0 => &["u", "u_x", "ustar*c", "ustar_x*c", "ustar*c_x", "cstar*c*c_x"],
        _ => &["c", "c_x", "ustar*c*c_x"],
    }
}

fn homogeneous(rng: &mut ChaCha8Rng, ctx: &JetContext) -> (DiffPoly, i32) {
    let g = rng.gen_range(-1..=1);
    let sk = skeletons(g);
    let small = Shape {
        max_jet: 1,
        max_degree: 2,
        max_terms: 1,
        coeff: 3,
    };
    let mut out = DiffPoly::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let m = parse(ctx, sk[rng.gen_range(0..sk.len())]).unwrap();
        out += &random::poly_with_ghost(rng, ctx, &[0], 0, &small) * &m;
    }
    (out, g)
}

fn sign(e: i32) -> DiffPoly {
    DiffPoly::integer(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn antibracket_is_graded_symmetric(seed in any::<u64>()) {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, gf) = homogeneous(&mut rng, &ctx);
        let (g, gg) = homogeneous(&mut rng, &ctx);
        let fg = antibracket(&ctx, &f, &g).unwrap();
        let gf_ = antibracket(&ctx, &g, &f).unwrap();
        prop_assert!(triviality_check(&ctx, &(&fg + &(&sign((gf + 1) * (gg + 1)) * &gf_))));
    }

    #[test]
    fn antibracket_satisfies_jacobi(seed in any::<u64>()) {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, ga) = homogeneous(&mut rng, &ctx);
        let (b, gb) = homogeneous(&mut rng, &ctx);
        let (c, _) = homogeneous(&mut rng, &ctx);
        let br = |x: &DiffPoly, y: &DiffPoly| antibracket(&ctx, x, y).unwrap();
        let lhs = br(&a, &br(&b, &c));
        let rhs = &br(&br(&a, &b), &c) + &(&sign((ga + 1) * (gb + 1)) * &br(&b, &br(&a, &c)));
        prop_assert!(classes_equal(&ctx, &lhs, &rhs));
    }

    #[test]
    fn antibracket_obeys_leibniz_through_hamiltonian_fields(seed in any::<u64>()) {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, gf) = homogeneous(&mut rng, &ctx);
        let (g, gg) = homogeneous(&mut rng, &ctx);
        let (h, _) = homogeneous(&mut rng, &ctx);
        let x = hamiltonian_field(&ctx, &f).unwrap();
        let xf = |p: &DiffPoly| evolutionary_apply(&ctx, &x, p).unwrap();
        prop_assert!(classes_equal(&ctx, &xf(&g), &antibracket(&ctx, &f, &g).unwrap()));
        let lhs = xf(&(&g * &h));
        let rhs = &(&xf(&g) * &h) + &(&sign((gf + 1) * gg) * &(&g * &xf(&h)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ghost_free_densities_commute_with_themselves(seed in any::<u64>()) {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random::poly_with_ghost(&mut rng, &ctx, &[0], 0, &Shape::default());
        prop_assert!(antibracket(&ctx, &l, &l).unwrap().is_zero());
    }

    #[test]
    fn koszul_tate_differentials_square_to_zero(seed in any::<u64>()) {
        let base = JetContext::new(vec!["t".into(), "x".into()], vec![FieldDecl::new("u", 0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random::poly(&mut rng, &base, &Shape::default());
        let (ext, delta) = kt_extend(&PdeSystem::new(base, vec![f.clone()]).unwrap()).unwrap();
        prop_assert!(delta.is_square_zero());
        prop_assert_eq!(delta.image(1), &f);
        let w = random::any_form(&mut rng, &ext, 2, &shape());
        prop_assert!((&delta.apply_form(&w.d_h(&ext)) + &delta.apply_form(&w).d_h(&ext)).is_zero());
        prop_assert!((&delta.apply_form(&w.d_v()) + &delta.apply_form(&w).d_v()).is_zero());
    }

    /// Lagrangians built from the gauge-invariant combination `u_x - v`.
    #[test]
    fn abelian_gauge_models_satisfy_the_master_equation(seed in any::<u64>()) {
        let w_ctx = JetContext::new(vec!["x".into()], vec![FieldDecl::new("w", 0)]).unwrap();
        let ctx = JetContext::new(vec!["x".into()], vec![FieldDecl::new("u", 0), FieldDecl::new("v", 0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lw = random::poly(&mut rng, &w_ctx, &Shape { max_jet: 1, ..shape() });
        let phi = AlgebraMorphism::new(&w_ctx, &ctx, vec![parse(&ctx, "u_x - v").unwrap()]).unwrap();
        let l = phi.apply(&lw);
        let mut r = TotalDiffOperator::zero(2, 1);
        r.add_entry(0, 0, MultiIndex::zero(1), DiffPoly::one());
        r.add_entry(1, 0, MultiIndex::unit(1, 0), DiffPoly::one());
        let model = bv_extend(&ctx, &l, &[r]).unwrap();
        prop_assert!(master_equation_check(&model.context, &model.action).unwrap().holds);
        let d = bv_differential(&model.context, &model.action).unwrap();
        prop_assert!(d.is_square_zero());
        prop_assert!(InternalDifferential::new(&model.context, d.images().to_vec()).is_ok());
    }
}
