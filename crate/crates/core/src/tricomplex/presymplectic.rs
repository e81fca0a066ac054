use crate::error::{Error, Result};
use crate::forms::BiForm;
use crate::jetalg::{DiffPoly, JetContext, MultiIndex, Symbol};
use crate::varops::euler_operator;

/// Boundary term and presymplectic current of a Lagrangian.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Presymplectic {
    /// `theta_bdry`, an `(n-1, 1)`-form with
    /// `d_v L ^ vol = sum_A E_A(L) theta^A ^ vol - d_h theta_bdry`.
    pub boundary: BiForm,
    /// `omega = d_v theta_bdry`, an `(n-1, 2)`-form.
    pub omega: BiForm,
}

/// Integrates `d_v L` by parts until only undifferentiated contact forms
/// remain, collecting the horizontal boundary term.
pub fn presymplectic_form(ctx: &JetContext, l: &DiffPoly) -> Result<Presymplectic> {
    if l.has_form_symbols() {
        return Err(Error::Shape("the Lagrangian must be a density coefficient".into()));
    }
    let vol = ctx.volume();
    let mut rest = BiForm::new(l.clone()).d_v().into_poly();
    let mut boundary = DiffPoly::zero();
    // highest contact order first, so each step strictly lowers it
    while let Some((m, c, theta)) = rest
        .terms()
        .filter_map(|(m, c)| {
            let (_, form) = m.split_form();
            let (s, _) = form.factors().first()?.clone();
            (s.multi_index()?.order() > 0).then(|| (m.clone(), c.clone(), s))
        })
        .max_by_key(|(_, _, s)| s.multi_index().map(|x| x.order()))
    {
        let Symbol::Theta(field, sigma) = &theta else {
            unreachable!()
        };
        let i = sigma.counts().iter().position(|&k| k > 0).expect("positive order");
        let tau = sigma.checked_sub(&MultiIndex::unit(ctx.dim(), i)).expect("sub");
        let (coef, _) = m.split_form();
        let f = DiffPoly::from_monomial(coef, c.clone());
        let lower = &f * &DiffPoly::from_symbol(Symbol::Theta(*field, tau.clone()));
        // f theta_sigma = D_i(f theta_tau) - D_i(f) theta_tau
        rest -= DiffPoly::from_monomial(m, c);
        rest -= &f.total_derivative(i) * &DiffPoly::from_symbol(Symbol::Theta(*field, tau));
        // D_i(lower) ^ vol = -d_h(Q) with Q = +-(lower ^ iota_i vol)
        let q0 = &lower * &interior_volume(ctx, i);
        let target = -(&lower.total_derivative(i) * &vol);
        let dq0 = BiForm::new(q0.clone()).d_h(ctx).into_poly();
        let q = if dq0 == target { q0 } else { -q0 };
        debug_assert_eq!(BiForm::new(q.clone()).d_h(ctx).into_poly(), target);
        boundary += q;
    }
    let boundary = BiForm::new(boundary);
    let omega = boundary.d_v();
    debug_assert!(omega.d_v().is_zero());
    debug_assert_eq!(
        rest,
        euler_operator(ctx, l)
            .iter()
            .enumerate()
            .map(|(a, e)| e * &ctx.theta(a, &vec![0; ctx.dim()]))
            .fold(DiffPoly::zero(), |x, y| x + y)
    );
    Ok(Presymplectic { boundary, omega })
}

/// `dx^0 ^ ... ^ dx^{n-1}` with the `i`-th factor removed.
fn interior_volume(ctx: &JetContext, i: usize) -> DiffPoly {
    (0..ctx.dim())
        .filter(|&j| j != i)
        .fold(DiffPoly::one(), |acc, j| &acc * &ctx.dx(j))
}
