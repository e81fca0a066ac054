//! Seeded generators of random polynomials, forms, fields and keys, used by
//! the property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::forms::{BiForm, FormDegree};
use crate::jetalg::{rat, DiffPoly, EvoField, JetContext, MultiIndex};
use crate::tricomplex::FormKey;

/// Size limits for generated objects.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_jet: u32,
    /// Maximal number of jet factors in a coefficient monomial.
    pub max_degree: u32,
    pub max_terms: usize,
    /// Coefficients are drawn from `-coeff..=coeff` without zero.
    pub coeff: i64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_jet: 3,
            max_degree: 3,
            max_terms: 4,
            coeff: 5,
        }
    }
}

fn coefficient(rng: &mut impl Rng, shape: &Shape) -> DiffPoly {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-shape.coeff..=shape.coeff);
    }
    DiffPoly::constant(rat(c))
}

fn multi_index(rng: &mut impl Rng, n: usize, max: u32) -> MultiIndex {
    let all = MultiIndex::up_to_order(n, max);
    all[rng.gen_range(0..all.len())].clone()
}

fn jet(rng: &mut impl Rng, ctx: &JetContext, fields: &[usize], shape: &Shape) -> (DiffPoly, i32) {
    let a = *fields.choose(rng).expect("at least one field");
    let sigma = multi_index(rng, ctx.dim(), shape.max_jet);
    (DiffPoly::from_symbol(ctx.jet_symbol(a, sigma)), ctx.field(a).ghost)
}

/// A polynomial in the jets of the given fields with ghost number `ghost`,
/// possibly zero when the constraint cannot be met.
pub fn poly_with_ghost(rng: &mut impl Rng, ctx: &JetContext, fields: &[usize], ghost: i32, shape: &Shape) -> DiffPoly {
    let mut out = DiffPoly::zero();
    if fields.is_empty() {
        return if ghost == 0 { coefficient(rng, shape) } else { out };
    }
    let terms = rng.gen_range(1..=shape.max_terms);
    for _ in 0..terms {
        for _attempt in 0..64 {
            let k = rng.gen_range(0..=shape.max_degree);
            let mut term = coefficient(rng, shape);
            let mut g = 0;
            for _ in 0..k {
                let (j, gh) = jet(rng, ctx, fields, shape);
                term = &term * &j;
                g += gh;
            }
            if g == ghost && !term.is_zero() {
                out += term;
                break;
            }
        }
    }
    out
}

/// A ghost-zero polynomial in the even fields of the context.
pub fn poly(rng: &mut impl Rng, ctx: &JetContext, shape: &Shape) -> DiffPoly {
    let even: Vec<usize> = (0..ctx.num_fields()).filter(|&a| ctx.field(a).ghost == 0).collect();
    poly_with_ghost(rng, ctx, &even, 0, shape)
}

/// A form homogeneous of the given tri-degree, built from all fields.
pub fn form(rng: &mut impl Rng, ctx: &JetContext, degree: FormDegree, shape: &Shape) -> BiForm {
    let n = ctx.dim();
    let fields: Vec<usize> = (0..ctx.num_fields()).collect();
    let mut out = DiffPoly::zero();
    if degree.p > n || (fields.is_empty() && degree.q > 0) {
        return BiForm::zero();
    }
    for _ in 0..rng.gen_range(1..=shape.max_terms) {
        for _attempt in 0..64 {
            let mut dxs: Vec<usize> = (0..n).collect();
            dxs.shuffle(rng);
            let mut form_part = DiffPoly::one();
            for &i in dxs.iter().take(degree.p) {
                form_part = &form_part * &ctx.dx(i);
            }
            let mut theta_ghost = 0;
            for _ in 0..degree.q {
                let a = *fields.choose(rng).expect("fields");
                let sigma = multi_index(rng, n, shape.max_jet);
                form_part = &form_part * &DiffPoly::from_symbol(ctx.theta_symbol(a, sigma));
                theta_ghost += ctx.field(a).ghost;
            }
            if form_part.is_zero() {
                continue;
            }
            let coef = poly_with_ghost(
                rng,
                ctx,
                &fields,
                degree.gh - theta_ghost,
                &Shape { max_terms: 1, ..*shape },
            );
            let term = &coef * &form_part;
            if !term.is_zero() {
                out += term;
                break;
            }
        }
    }
    BiForm::new(out)
}

/// A form of random bidegree with `p <= n`, `q <= max_q`, ghost zero.
pub fn any_form(rng: &mut impl Rng, ctx: &JetContext, max_q: usize, shape: &Shape) -> BiForm {
    let degree = FormDegree {
        p: rng.gen_range(0..=ctx.dim()),
        q: rng.gen_range(0..=max_q),
        gh: 0,
    };
    form(rng, ctx, degree, shape)
}

/// A ghost-zero evolutionary field on the even fields.
pub fn evo_field(rng: &mut impl Rng, ctx: &JetContext, shape: &Shape) -> EvoField {
    EvoField::new(
        (0..ctx.num_fields())
            .map(|a| {
                if ctx.field(a).ghost == 0 {
                    poly(rng, ctx, shape)
                } else {
                    DiffPoly::zero()
                }
            })
            .collect(),
    )
}

/// A key with every slot filled by a random homogeneous form.
pub fn key(
    rng: &mut impl Rng,
    ctx: &JetContext,
    degree: i32,
    p: usize,
    q: usize,
    depth: usize,
    shape: &Shape,
) -> FormKey {
    let mut k = FormKey::new(degree, p, q, depth);
    for (r, a) in k.slots(ctx.dim()) {
        let w = form(rng, ctx, k.slot_degree(r, a), shape);
        k.set(r, a, w).expect("slot degree");
    }
    k
}
