use crate::error::{Error, Result};
use crate::expr;
use crate::forms::BiForm;
use crate::jetalg::{DiffPoly, JetContext, Symbol};

/// An odd derivation raising ghost number by one, fixed by its values on
/// the undifferentiated fields. It commutes with every `D_i`, annihilates
/// `dx`, and acts on contact forms by `delta(theta^A_sigma) = -d_v D_sigma(delta u^A)`,
/// the unique choice anticommuting with `d_v`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InternalDifferential {
    context: JetContext,
    images: Vec<DiffPoly>,
    squares: Vec<DiffPoly>,
}

impl InternalDifferential {
    pub fn context(&self) -> &JetContext {
        &self.context
    }

    pub fn image(&self, field: usize) -> &DiffPoly {
        &self.images[field]
    }

    pub fn images(&self) -> &[DiffPoly] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(DiffPoly::is_zero)
    }

    /// `delta^2(u^A)` for every field.
    pub fn squares(&self) -> &[DiffPoly] {
        &self.squares
    }

    pub fn is_square_zero(&self) -> bool {
        self.squares.iter().all(DiffPoly::is_zero)
    }

    pub fn require_square_zero(&self) -> Result<()> {
        match self.squares.iter().position(|s| !s.is_zero()) {
            Some(a) => Err(Error::NotSquareZero(self.context.field(a).name.clone())),
            None => Ok(()),
        }
    }

    pub fn apply(&self, w: &DiffPoly) -> DiffPoly {
        apply_images(&self.images, w)
    }

    pub fn apply_form(&self, w: &BiForm) -> BiForm {
        BiForm::new(self.apply(w.poly()))
    }
}

fn apply_images(images: &[DiffPoly], w: &DiffPoly) -> DiffPoly {
    w.derive(true, |s| match s {
        Symbol::Jet(f, sigma) => {
            let img = &images[f.index as usize];
            (!img.is_zero()).then(|| img.prolong_derivative(sigma))
        }
        Symbol::Theta(f, sigma) => {
            let img = &images[f.index as usize];
            (!img.is_zero()).then(|| -BiForm::new(img.prolong_derivative(sigma)).d_v().into_poly())
        }
        _ => None,
    })
}

/// Builds `delta` from the images of the fields, given by name. Unlisted
/// fields map to zero.
pub fn extend_delta(ctx: &JetContext, spec: &[(String, DiffPoly)]) -> Result<InternalDifferential> {
    let mut images = vec![DiffPoly::zero(); ctx.num_fields()];
    for (name, img) in spec {
        let a = ctx
            .field_index(name)
            .ok_or_else(|| Error::UndeclaredGenerator(name.clone()))?;
        images[a] = img.clone();
    }
    InternalDifferential::new(ctx, images)
}

impl InternalDifferential {
    pub fn new(ctx: &JetContext, images: Vec<DiffPoly>) -> Result<Self> {
        if images.len() != ctx.num_fields() {
            return Err(Error::ComponentCount {
                expected: ctx.num_fields(),
                found: images.len(),
            });
        }
        for (a, img) in images.iter().enumerate() {
            ctx.check_declared(img)?;
            if img.has_form_symbols() {
                return Err(Error::Shape(format!(
                    "image of `{}` contains form symbols",
                    ctx.field(a).name
                )));
            }
            let want = ctx.field(a).ghost + 1;
            if !img.is_zero() && img.ghost() != Some(want) {
                return Err(Error::GhostMismatch(format!(
                    "image of `{}` must have ghost {want}, got `{}`",
                    ctx.field(a).name,
                    expr::print(ctx, img)
                )));
            }
        }
        let squares = images.iter().map(|img| apply_images(&images, img)).collect();
        Ok(InternalDifferential {
            context: ctx.clone(),
            images,
            squares,
        })
    }

    /// The zero differential.
    pub fn zero(ctx: &JetContext) -> Self {
        InternalDifferential {
            context: ctx.clone(),
            images: vec![DiffPoly::zero(); ctx.num_fields()],
            squares: vec![DiffPoly::zero(); ctx.num_fields()],
        }
    }
}

/// `D = d_h + d_v + delta`.
pub fn total_differential(w: &BiForm, delta: &InternalDifferential) -> Result<BiForm> {
    delta.require_square_zero()?;
    Ok(total_unchecked(w, delta))
}

pub(crate) fn total_unchecked(w: &BiForm, delta: &InternalDifferential) -> BiForm {
    let ctx = delta.context();
    let mut out = w.d_h(ctx);
    out += &w.d_v();
    out += &delta.apply_form(w);
    out
}

/// A ghost-preserving substitution of fields between two contexts over the
/// same base, prolonged to jets and linearized on contact forms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraMorphism {
    source: JetContext,
    target: JetContext,
    images: Vec<DiffPoly>,
}

impl AlgebraMorphism {
    pub fn new(source: &JetContext, target: &JetContext, images: Vec<DiffPoly>) -> Result<Self> {
        if source.base_names() != target.base_names() {
            return Err(Error::InvalidContext("morphism contexts must share the base".into()));
        }
        if images.len() != source.num_fields() {
            return Err(Error::ComponentCount {
                expected: source.num_fields(),
                found: images.len(),
            });
        }
        for (a, img) in images.iter().enumerate() {
            target.check_declared(img)?;
            if img.has_form_symbols() {
                return Err(Error::Shape("morphism images must be functions".into()));
            }
            if !img.is_zero() && img.ghost() != Some(source.field(a).ghost) {
                return Err(Error::GhostMismatch(format!(
                    "image of `{}` must have ghost {}",
                    source.field(a).name,
                    source.field(a).ghost
                )));
            }
        }
        Ok(AlgebraMorphism {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    pub fn identity(ctx: &JetContext) -> Self {
        AlgebraMorphism {
            source: ctx.clone(),
            target: ctx.clone(),
            images: (0..ctx.num_fields()).map(|a| ctx.u(a)).collect(),
        }
    }

    pub fn apply(&self, w: &DiffPoly) -> DiffPoly {
        w.substitute(|s| match s {
            Symbol::Jet(f, sigma) => Some(self.images[f.index as usize].prolong_derivative(sigma)),
            Symbol::Theta(f, sigma) => Some(
                BiForm::new(self.images[f.index as usize].prolong_derivative(sigma))
                    .d_v()
                    .into_poly(),
            ),
            _ => None,
        })
    }

    /// Checks `phi . delta_source = delta_target . phi` on every source field.
    pub fn check_intertwines(
        &self,
        delta_source: &InternalDifferential,
        delta_target: &InternalDifferential,
    ) -> Result<()> {
        for a in 0..self.source.num_fields() {
            let lhs = self.apply(delta_source.image(a));
            let rhs = delta_target.apply(&self.images[a]);
            if lhs != rhs {
                return Err(Error::NotIntertwining(self.source.field(a).name.clone()));
            }
        }
        Ok(())
    }

    pub fn target(&self) -> &JetContext {
        &self.target
    }
}

/// Pulls a form through a morphism after checking that it intertwines the
/// internal differentials.
pub fn induced_map(
    phi: &AlgebraMorphism,
    delta_source: &InternalDifferential,
    delta_target: &InternalDifferential,
    w: &BiForm,
) -> Result<BiForm> {
    phi.check_intertwines(delta_source, delta_target)?;
    Ok(BiForm::new(phi.apply(w.poly())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::jetalg::FieldDecl;

    fn ctx_star() -> JetContext {
        JetContext::new(
            vec!["t".into(), "x".into()],
            vec![FieldDecl::new("u", 0), FieldDecl::antifield("ustar", -1, 0)],
        )
        .unwrap()
    }

    #[test]
    fn square_of_koszul_tate_on_a_free_field() {
        let ctx = ctx_star();
        let delta = extend_delta(&ctx, &[("ustar".into(), parse(&ctx, "-u_xx + u").unwrap())]).unwrap();
        assert!(delta.is_square_zero());
        assert!(InternalDifferential::zero(&ctx).is_square_zero());
    }

    #[test]
    fn ghost_degree_is_enforced() {
        let ctx = ctx_star();
        let bad = extend_delta(&ctx, &[("u".into(), parse(&ctx, "u").unwrap())]);
        assert!(matches!(bad, Err(Error::GhostMismatch(_))));
    }

    #[test]
    fn non_square_zero_is_reported() {
        let ctx = JetContext::new(
            vec!["x".into()],
            vec![FieldDecl::new("u", 0), FieldDecl::new("c", 1), FieldDecl::new("e", 2)],
        )
        .unwrap();
        let delta = extend_delta(&ctx, &[("u".into(), ctx.u(1)), ("c".into(), ctx.u(2))]).unwrap();
        assert_eq!(delta.squares()[0], ctx.u(2));
        assert!(matches!(
            total_differential(&BiForm::new(ctx.u(0)), &delta),
            Err(Error::NotSquareZero(_))
        ));
    }

    #[test]
    fn total_differential_examples() {
        let ctx = ctx_star();
        let zero = InternalDifferential::zero(&ctx);
        let f = BiForm::new(parse(&ctx, "u^2*u_x").unwrap());
        assert_eq!(total_differential(&f, &zero).unwrap(), &f.d_h(&ctx) + &f.d_v());

        let delta = extend_delta(&ctx, &[("ustar".into(), parse(&ctx, "-u_xx + u").unwrap())]).unwrap();
        let d = total_differential(&BiForm::new(ctx.u(1)), &delta).unwrap();
        let expected = parse(&ctx, "-u_xx + u + dx(t)*ustar_t + dx(x)*ustar_x + th(ustar)").unwrap();
        assert_eq!(d.into_poly(), expected);
    }

    #[test]
    fn delta_anticommutes_with_both_differentials() {
        let ctx = ctx_star();
        let delta = extend_delta(&ctx, &[("ustar".into(), parse(&ctx, "-u_xx + u^2").unwrap())]).unwrap();
        let w = BiForm::new(parse(&ctx, "ustar_x*u*th(u,[0,1])*dx(t) + ustar*th(ustar)").unwrap());
        let a = &delta.apply_form(&w.d_h(&ctx)) + &delta.apply_form(&w).d_h(&ctx);
        let b = &delta.apply_form(&w.d_v()) + &delta.apply_form(&w).d_v();
        assert!(a.is_zero());
        assert!(b.is_zero());
        let dd = total_differential(&total_differential(&w, &delta).unwrap(), &delta).unwrap();
        assert!(dd.is_zero());
    }

    #[test]
    fn induced_map_examples() {
        let src = JetContext::new(vec!["x".into()], vec![FieldDecl::new("v", 0)]).unwrap();
        let tgt = JetContext::new(vec!["x".into()], vec![FieldDecl::new("u", 0)]).unwrap();
        let phi = AlgebraMorphism::new(&src, &tgt, vec![parse(&tgt, "u^2").unwrap()]).unwrap();
        let (zs, zt) = (InternalDifferential::zero(&src), InternalDifferential::zero(&tgt));
        let vx = BiForm::new(parse(&src, "v_x").unwrap());
        assert_eq!(
            induced_map(&phi, &zs, &zt, &vx).unwrap().into_poly(),
            parse(&tgt, "2*u*u_x").unwrap()
        );
        let th = BiForm::new(parse(&src, "th(v)").unwrap());
        assert_eq!(
            induced_map(&phi, &zs, &zt, &th).unwrap().into_poly(),
            parse(&tgt, "2*u*th(u)").unwrap()
        );
        let id = AlgebraMorphism::identity(&src);
        let w = BiForm::new(parse(&src, "v*v_xx*th(v,[1])*dx(x)").unwrap());
        assert_eq!(induced_map(&id, &zs, &zs, &w).unwrap(), w);
    }

    #[test]
    fn non_intertwining_morphisms_are_rejected() {
        let ctx = ctx_star();
        let delta = extend_delta(&ctx, &[("ustar".into(), ctx.u(0))]).unwrap();
        let zero = InternalDifferential::zero(&ctx);
        let id = AlgebraMorphism::identity(&ctx);
        let err = induced_map(&id, &delta, &zero, &BiForm::new(ctx.u(1)));
        assert!(matches!(err, Err(Error::NotIntertwining(_))));
    }
}
