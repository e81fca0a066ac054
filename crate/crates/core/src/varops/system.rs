use std::collections::HashMap;

use super::euler::{euler_operator, triviality_check};
use super::operator::TotalDiffOperator;
use crate::error::{Error, Result};
use crate::forms::BiForm;
use crate::jetalg::{evolutionary_apply, DiffPoly, EvoField, JetContext, MultiIndex, Symbol};

/// Passes of substitution allowed before a presentation is declared ill-posed.
pub const REDUCTION_BOUND: usize = 256;

/// A pass/fail answer with the offending residues when it fails.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Verdict {
    pub holds: bool,
    pub residues: Vec<DiffPoly>,
}

impl Verdict {
    fn from_residues(residues: Vec<DiffPoly>) -> Self {
        Verdict {
            holds: residues.iter().all(DiffPoly::is_zero),
            residues,
        }
    }
}

/// One relation `u^A_sigma = rhs` of an orthonomic presentation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolvedRelation {
    pub field: usize,
    pub sigma: MultiIndex,
    pub rhs: DiffPoly,
}

/// A system of PDEs `F_a = 0` on ghost-zero fields.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PdeSystem {
    pub context: JetContext,
    pub equations: Vec<DiffPoly>,
    solved_form: Option<Vec<SolvedRelation>>,
    /// Operators `Z` with `Z(F) = 0` identically; one row each, one column
    /// per equation.
    pub noether_ops: Vec<TotalDiffOperator>,
}

impl PdeSystem {
    pub fn new(context: JetContext, equations: Vec<DiffPoly>) -> Result<Self> {
        for (a, f) in equations.iter().enumerate() {
            context.check_declared(f)?;
            if f.has_form_symbols() {
                return Err(Error::Shape(format!("equation {a} contains form symbols")));
            }
            if !f.is_zero() && f.ghost() != Some(0) {
                return Err(Error::GhostMismatch(format!("equation {a} must have ghost number 0")));
            }
        }
        Ok(PdeSystem {
            context,
            equations,
            solved_form: None,
            noether_ops: Vec::new(),
        })
    }

    pub fn with_solved_form(mut self, relations: Vec<SolvedRelation>) -> Result<Self> {
        for (i, r) in relations.iter().enumerate() {
            self.context.check_declared(&r.rhs)?;
            if relations[..i].iter().any(|q| q.field == r.field && q.sigma == r.sigma) {
                return Err(Error::InvalidSolvedForm("repeated left-hand side".into()));
            }
        }
        for r in &relations {
            for s in r.rhs.symbols() {
                if let Symbol::Jet(f, tau) = &s {
                    if let Some(q) = relations
                        .iter()
                        .find(|q| q.field == f.index as usize && q.sigma.divides(tau))
                    {
                        return Err(Error::InvalidSolvedForm(format!(
                            "right-hand side of {} contains a derivative of {}",
                            describe(&self.context, r.field, &r.sigma),
                            describe(&self.context, q.field, &q.sigma)
                        )));
                    }
                }
            }
            if r.rhs.has_form_symbols() {
                return Err(Error::InvalidSolvedForm("right-hand side contains forms".into()));
            }
        }
        self.solved_form = Some(relations);
        Ok(self)
    }

    pub fn with_noether_ops(mut self, ops: Vec<TotalDiffOperator>) -> Result<Self> {
        for (i, z) in ops.iter().enumerate() {
            if z.rows() != 1 || z.cols() != self.equations.len() {
                return Err(Error::Shape(format!(
                    "Noether operator {i} must be 1 x {}",
                    self.equations.len()
                )));
            }
        }
        self.noether_ops = ops;
        Ok(self)
    }

    pub fn solved_form(&self) -> Option<&[SolvedRelation]> {
        self.solved_form.as_deref()
    }

    /// Normal form modulo the differential ideal, by exhaustive substitution
    /// of the distinguished jet variables and their prolongations.
    pub fn reduce(&self, f: &DiffPoly) -> Result<DiffPoly> {
        let relations = self.solved_form.as_ref().ok_or(Error::NoSolvedForm)?;
        let mut cache: HashMap<Symbol, Option<DiffPoly>> = HashMap::new();
        let mut current = f.clone();
        for _ in 0..REDUCTION_BOUND {
            let mut hit = false;
            let next = current.substitute(|s| {
                let img = cache
                    .entry(s.clone())
                    .or_insert_with(|| lead_image(relations, s))
                    .clone();
                hit |= img.is_some();
                img
            });
            if !hit {
                return Ok(current);
            }
            current = next;
        }
        Err(Error::ReductionBound(REDUCTION_BOUND))
    }

    /// Membership in the differential ideal.
    pub fn in_ideal(&self, f: &DiffPoly) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }
}

fn describe(ctx: &JetContext, field: usize, sigma: &MultiIndex) -> String {
    crate::expr::print(ctx, &DiffPoly::from_symbol(ctx.jet_symbol(field, sigma.clone())))
}

fn lead_image(relations: &[SolvedRelation], s: &Symbol) -> Option<DiffPoly> {
    let Symbol::Jet(f, tau) = s else { return None };
    relations
        .iter()
        .filter(|r| r.field == f.index as usize)
        .find_map(|r| tau.checked_sub(&r.sigma).map(|rest| r.rhs.prolong_derivative(&rest)))
}

/// `d_h J` reduced modulo the equations, for a horizontal `(n-1)`-form `J`.
/// The residue is the coefficient of the volume form.
pub fn conservation_check(sys: &PdeSystem, j: &BiForm) -> Result<Verdict> {
    let ctx = &sys.context;
    let n = ctx.dim();
    for m in j.poly().terms().map(|(m, _)| m) {
        let deg = m.form_degree();
        if deg != (n - 1, 0) {
            return Err(Error::Bidegree {
                expected: format!("({}, 0)", n - 1),
                found: format!("({}, {})", deg.0, deg.1),
            });
        }
    }
    let dj = j.d_h(ctx);
    let coeff = volume_coefficient(ctx, dj.poly());
    Ok(Verdict::from_residues(vec![sys.reduce(&coeff)?]))
}

/// Coefficient `c` of a top horizontal form `c * dx^0 ^ ... ^ dx^{n-1}`.
pub fn volume_coefficient(ctx: &JetContext, top: &DiffPoly) -> DiffPoly {
    let vol = ctx.volume();
    let (vm, _) = vol.terms().next().expect("volume form");
    let mut out = DiffPoly::zero();
    for (m, c) in top.terms() {
        let (coef, form) = m.split_form();
        if &form == vm {
            out.add_term(coef, c.clone());
        }
    }
    out
}

/// What a symmetry is tested against.
pub enum SymmetryTarget<'a> {
    Lagrangian(&'a DiffPoly),
    System(&'a PdeSystem),
}

/// Lagrangian mode: `E_chi(L)` is a total divergence. Equation mode: the
/// linearization `l_F(chi)` vanishes modulo the equations.
pub fn symmetry_check(ctx: &JetContext, chi: &EvoField, target: SymmetryTarget<'_>) -> Result<Verdict> {
    if chi.ghost_shift(ctx)?.unwrap_or(0) != 0 {
        return Err(Error::GhostMismatch(
            "symmetry characteristic must have ghost shift 0".into(),
        ));
    }
    match target {
        SymmetryTarget::Lagrangian(l) => {
            let var = evolutionary_apply(ctx, chi, l)?;
            let holds = triviality_check(ctx, &var);
            Ok(Verdict {
                holds,
                residues: if holds { Vec::new() } else { euler_operator(ctx, &var) },
            })
        }
        SymmetryTarget::System(sys) => {
            if sys.solved_form().is_none() {
                return Err(Error::NoSymmetryTarget);
            }
            let residues = sys
                .equations
                .iter()
                .map(|f| sys.reduce(&evolutionary_apply(ctx, chi, f)?))
                .collect::<Result<Vec<_>>>()?;
            Ok(Verdict::from_residues(residues))
        }
    }
}

/// `R^dagger(E(L)) = 0` identically, for `R` mapping gauge parameters to
/// field variations.
pub fn noether_identity_check(ctx: &JetContext, r: &TotalDiffOperator, l: &DiffPoly) -> Result<Verdict> {
    if r.rows() != ctx.num_fields() {
        return Err(Error::Shape(format!(
            "operator has {} rows for {} fields",
            r.rows(),
            ctx.num_fields()
        )));
    }
    let e = euler_operator(ctx, l);
    Ok(Verdict::from_residues(r.adjoint().apply(&e)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::jetalg::FieldDecl;

    fn kdv() -> PdeSystem {
        let ctx = JetContext::new(vec!["t".into(), "x".into()], vec![FieldDecl::new("u", 0)]).unwrap();
        let f = parse(&ctx, "u_t - 6*u*u_x - u_xxx").unwrap();
        let rhs = parse(&ctx, "6*u*u_x + u_xxx").unwrap();
        PdeSystem::new(ctx, vec![f])
            .unwrap()
            .with_solved_form(vec![SolvedRelation {
                field: 0,
                sigma: MultiIndex::unit(2, 0),
                rhs,
            }])
            .unwrap()
    }

    fn maxwell() -> (JetContext, DiffPoly) {
        let ctx = JetContext::new(
            vec!["t".into(), "x".into()],
            vec![FieldDecl::new("At", 0), FieldDecl::new("Ax", 0)],
        )
        .unwrap();
        let l = parse(&ctx, "1/2*(Ax_[1,0] - At_[0,1])^2").unwrap();
        (ctx, l)
    }

    #[test]
    fn reduction_examples() {
        let sys = kdv();
        let ctx = &sys.context;
        let p = |s: &str| parse(ctx, s).unwrap();
        assert_eq!(sys.reduce(&p("u_t")).unwrap(), p("6*u*u_x + u_xxx"));
        assert_eq!(sys.reduce(&p("u_tx")).unwrap(), p("6*u_x^2 + 6*u*u_xx + u_xxxx"));
        assert_eq!(sys.reduce(&p("u_x")).unwrap(), p("u_x"));
        assert!(sys.in_ideal(&sys.equations[0].total_derivative(1)).unwrap());
    }

    #[test]
    fn reduction_needs_a_solved_form() {
        let sys = kdv();
        let bare = PdeSystem::new(sys.context.clone(), sys.equations.clone()).unwrap();
        assert_eq!(bare.reduce(&DiffPoly::one()), Err(Error::NoSolvedForm));
    }

    #[test]
    fn cyclic_presentations_are_rejected() {
        let sys = kdv();
        let ctx = sys.context.clone();
        let bad = SolvedRelation {
            field: 0,
            sigma: MultiIndex::unit(2, 0),
            rhs: parse(&ctx, "u_tx").unwrap(),
        };
        assert!(matches!(
            PdeSystem::new(ctx, vec![]).unwrap().with_solved_form(vec![bad]),
            Err(Error::InvalidSolvedForm(_))
        ));
    }

    #[test]
    fn conservation_examples() {
        let sys = kdv();
        let ctx = &sys.context;
        let j = BiForm::new(parse(ctx, "u*dx(x) + (3*u^2 + u_xx)*dx(t)").unwrap());
        assert!(conservation_check(&sys, &j).unwrap().holds);
        let v = conservation_check(&sys, &BiForm::new(parse(ctx, "u*dx(x)").unwrap())).unwrap();
        assert!(!v.holds);
        assert_eq!(v.residues, vec![parse(ctx, "6*u*u_x + u_xxx").unwrap()]);
        assert!(conservation_check(&sys, &BiForm::zero()).unwrap().holds);
        assert!(matches!(
            conservation_check(&sys, &BiForm::new(ctx.u(0))),
            Err(Error::Bidegree { .. })
        ));
    }

    #[test]
    fn symmetry_examples() {
        let ctx = JetContext::new(vec!["x".into()], vec![FieldDecl::new("u", 0)]).unwrap();
        let one = EvoField::new(vec![DiffPoly::one()]);
        let l = parse(&ctx, "1/2*u_x^2").unwrap();
        assert!(
            symmetry_check(&ctx, &one, SymmetryTarget::Lagrangian(&l))
                .unwrap()
                .holds
        );
        let l = parse(&ctx, "u^2").unwrap();
        assert!(
            !symmetry_check(&ctx, &one, SymmetryTarget::Lagrangian(&l))
                .unwrap()
                .holds
        );

        let sys = kdv();
        let ux = EvoField::new(vec![parse(&sys.context, "u_x").unwrap()]);
        assert!(
            symmetry_check(&sys.context, &ux, SymmetryTarget::System(&sys))
                .unwrap()
                .holds
        );
        let u = EvoField::new(vec![sys.context.u(0)]);
        assert!(
            !symmetry_check(&sys.context, &u, SymmetryTarget::System(&sys))
                .unwrap()
                .holds
        );
    }

    #[test]
    fn noether_examples() {
        let (ctx, l) = maxwell();
        let mut gauge = TotalDiffOperator::zero(2, 1);
        gauge.add_entry(0, 0, MultiIndex::unit(2, 0), DiffPoly::one());
        gauge.add_entry(1, 0, MultiIndex::unit(2, 1), DiffPoly::one());
        assert!(noether_identity_check(&ctx, &gauge, &l).unwrap().holds);
        let mut bad = TotalDiffOperator::zero(2, 1);
        bad.add_entry(0, 0, MultiIndex::zero(2), DiffPoly::one());
        assert!(!noether_identity_check(&ctx, &bad, &l).unwrap().holds);
        assert!(
            noether_identity_check(&ctx, &TotalDiffOperator::zero(2, 1), &l)
                .unwrap()
                .holds
        );
        assert!(noether_identity_check(&ctx, &TotalDiffOperator::zero(1, 1), &l).is_err());
    }
}
