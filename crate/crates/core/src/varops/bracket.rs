use crate::error::{Error, Result};
use crate::jetalg::{evolutionary_apply, DiffPoly, EvoField, JetContext, Symbol};
use crate::ktbv::antibracket;

/// Commutator of evolutionary fields,
/// `[chi, psi]^B = E_chi(psi^B) - (-1)^{|chi||psi|} E_psi(chi^B)`.
pub fn lie_bracket(ctx: &JetContext, chi: &EvoField, psi: &EvoField) -> Result<EvoField> {
    let both_odd = chi.is_odd(ctx)? && psi.is_odd(ctx)?;
    let mut out = Vec::with_capacity(ctx.num_fields());
    for b in 0..ctx.num_fields() {
        let a = evolutionary_apply(ctx, chi, &psi.components[b])?;
        let c = evolutionary_apply(ctx, psi, &chi.components[b])?;
        out.push(if both_odd { a + c } else { a - c });
    }
    let field = EvoField::new(out);
    if field.ghost_shift(ctx).is_err() {
        return Err(Error::GhostMismatch("bracket is not ghost-homogeneous".into()));
    }
    Ok(field)
}

/// Number of antifield factors, when it is the same in every term.
fn antifield_degree(ctx: &JetContext, p: &DiffPoly) -> Option<u32> {
    let mut degree = None;
    for (m, _) in p.terms() {
        let d: u32 = m
            .factors()
            .iter()
            .filter(|(s, _)| matches!(s, Symbol::Jet(f, _) if ctx.field(f.index as usize).antifield_of.is_some()))
            .map(|(_, e)| e)
            .sum();
        match degree {
            None => degree = Some(d),
            Some(k) if k != d => return None,
            _ => {}
        }
    }
    Some(degree.unwrap_or(0))
}

/// Variational Schouten bracket of local multivectors written as densities
/// in the antifields: `[P, Q] = -{P, Q}`, so that for vector fields
/// `P = phi* chi`, `Q = phi* psi` it reproduces `phi* [chi, psi]`.
/// The result is a representative modulo total divergences.
pub fn schouten_bracket(ctx: &JetContext, p: &DiffPoly, q: &DiffPoly) -> Result<DiffPoly> {
    for (name, x) in [("left", p), ("right", q)] {
        if antifield_degree(ctx, x).is_none() {
            return Err(Error::Inhomogeneous(format!("{name} argument mixes antifield degrees")));
        }
    }
    Ok(-antibracket(ctx, p, q)?)
}
