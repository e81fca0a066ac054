use crate::error::Result;
use crate::jetalg::{evolutionary_apply, DiffPoly, EvoField, JetContext, Symbol};

/// `E_A(L) = sum_sigma (-1)^|sigma| D_sigma(dL/du^A_sigma)`, one component per
/// field, with left partials for odd fields.
pub fn euler_operator(ctx: &JetContext, l: &DiffPoly) -> Vec<DiffPoly> {
    let mut out = vec![DiffPoly::zero(); ctx.num_fields()];
    for s in l.jet_symbols() {
        if let Symbol::Jet(field, sigma) = &s {
            let mut term = l.partial_derivative(&s).prolong_derivative(sigma);
            if sigma.order() % 2 == 1 {
                term = -term;
            }
            out[field.index as usize] += term;
        }
    }
    out
}

/// `E_A(L)` for a single field.
pub fn euler_component(l: &DiffPoly, field: usize) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for s in l.jet_symbols() {
        if let Symbol::Jet(f, sigma) = &s {
            if f.index as usize == field {
                let term = l.partial_derivative(&s).prolong_derivative(sigma);
                out += if sigma.order() % 2 == 1 { -term } else { term };
            }
        }
    }
    out
}

/// `sum_A chi^A E_A(L)`.
pub fn insertion_map(ctx: &JetContext, l: &DiffPoly, chi: &EvoField) -> DiffPoly {
    euler_operator(ctx, l)
        .iter()
        .zip(&chi.components)
        .map(|(e, c)| c * e)
        .fold(DiffPoly::zero(), |a, b| a + b)
}

/// True iff the density is a total divergence.
pub fn triviality_check(ctx: &JetContext, f: &DiffPoly) -> bool {
    euler_operator(ctx, f).iter().all(DiffPoly::is_zero)
}

/// Equality of densities modulo total divergences.
pub fn classes_equal(ctx: &JetContext, f: &DiffPoly, g: &DiffPoly) -> bool {
    triviality_check(ctx, &(f - g))
}

/// Lagrangian-mode symmetry test: `E_chi(L)` is a total divergence.
pub fn is_variational_symmetry(ctx: &JetContext, chi: &EvoField, l: &DiffPoly) -> Result<bool> {
    Ok(triviality_check(ctx, &evolutionary_apply(ctx, chi, l)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::jetalg::FieldDecl;

    fn ctx() -> JetContext {
        JetContext::new(vec!["x".into()], vec![FieldDecl::new("u", 0)]).unwrap()
    }

    fn p(ctx: &JetContext, s: &str) -> DiffPoly {
        parse(ctx, s).unwrap()
    }

    #[test]
    fn euler_examples() {
        let ctx = ctx();
        assert_eq!(euler_operator(&ctx, &p(&ctx, "u")), vec![DiffPoly::one()]);
        assert_eq!(euler_operator(&ctx, &p(&ctx, "1/2*u_x^2")), vec![p(&ctx, "-u_xx")]);
        assert_eq!(euler_operator(&ctx, &p(&ctx, "2*u*u_x")), vec![DiffPoly::zero()]);
    }

    #[test]
    fn odd_fields_use_left_partials() {
        let ctx = JetContext::new(vec!["x".into()], vec![FieldDecl::new("b", 1), FieldDecl::new("c", 1)]).unwrap();
        // E_b(b c) = c, E_c(b c) = -b
        assert_eq!(euler_operator(&ctx, &p(&ctx, "b*c")), vec![ctx.u(1), -ctx.u(0)]);
        // b c_x differs from -b_x c by D_x(b c)
        assert!(classes_equal(&ctx, &p(&ctx, "b*c_x"), &p(&ctx, "-b_x*c")));
    }

    #[test]
    fn insertion_examples() {
        let ctx = ctx();
        let one = EvoField::new(vec![DiffPoly::one()]);
        assert_eq!(insertion_map(&ctx, &p(&ctx, "1/2*u_x^2"), &one), p(&ctx, "-u_xx"));
        assert_eq!(
            insertion_map(&ctx, &p(&ctx, "u"), &EvoField::new(vec![ctx.u(0)])),
            ctx.u(0)
        );
        assert!(insertion_map(&ctx, &p(&ctx, "u^3*u_x"), &EvoField::zero(&ctx)).is_zero());
    }

    #[test]
    fn triviality_examples() {
        let ctx = ctx();
        assert!(triviality_check(&ctx, &p(&ctx, "2*u*u_x")));
        assert!(!triviality_check(&ctx, &p(&ctx, "u^2")));
        assert!(triviality_check(&ctx, &p(&ctx, "x^3")));
    }

    #[test]
    fn lagrangian_symmetry_examples() {
        let ctx = ctx();
        let one = EvoField::new(vec![DiffPoly::one()]);
        assert!(is_variational_symmetry(&ctx, &one, &p(&ctx, "1/2*u_x^2")).unwrap());
        assert!(!is_variational_symmetry(&ctx, &one, &p(&ctx, "u^2")).unwrap());
    }
}
