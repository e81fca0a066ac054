use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jetalg::{substitute_section, DiffPoly, JetContext, Rational, Symbol};

/// Exact integral of `L` along a polynomial section over a box
/// `prod_i [a_i, b_i]`.
pub fn evaluate_functional(
    ctx: &JetContext,
    l: &DiffPoly,
    section: &[DiffPoly],
    bounds: &[(Rational, Rational)],
) -> Result<Rational> {
    if bounds.len() != ctx.dim() {
        return Err(Error::ComponentCount {
            expected: ctx.dim(),
            found: bounds.len(),
        });
    }
    if l.has_form_symbols() {
        return Err(Error::Shape("the density must not contain form symbols".into()));
    }
    let pulled = substitute_section(ctx, l, section)?;
    let mut total = Rational::zero();
    for (m, c) in pulled.terms() {
        let mut exps = vec![0u32; ctx.dim()];
        for (s, e) in m.factors() {
            match s {
                Symbol::Base(i) => exps[*i as usize] = *e,
                _ => return Err(Error::Shape("pulled-back density is not base-only".into())),
            }
        }
        let mut term = c.clone();
        for ((a, b), e) in bounds.iter().zip(exps) {
            let k = e as i32 + 1;
            term *= (pow(b, k) - pow(a, k)) / Rational::from_integer(k.into());
        }
        total += term;
    }
    Ok(total)
}

fn pow(x: &Rational, k: i32) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * x)
}
