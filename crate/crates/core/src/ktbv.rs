//! Koszul-Tate resolutions, BV extensions, the anti-bracket and the
//! classical master equation.

use crate::error::{Error, Result};
use crate::jetalg::{DiffPoly, EvoField, FieldDecl, JetContext, Symbol};
use crate::tricomplex::{
    BettiTable, BoundedComplex, ClassBasis, Differential, InternalDifferential, Strand, Truncation,
};
use crate::varops::{euler_component, euler_operator, noether_identity_check, PdeSystem, TotalDiffOperator, Verdict};

fn star(name: &str) -> String {
    format!("{name}star")
}

/// Adds one antifield per equation (`delta phi*_a = F_a`) and one antighost
/// per Noether operator (`delta c*_k = Z_k(phi*)`).
pub fn kt_extend(sys: &PdeSystem) -> Result<(JetContext, InternalDifferential)> {
    let ctx = &sys.context;
    if sys.equations.is_empty() {
        return Ok((ctx.clone(), InternalDifferential::zero(ctx)));
    }
    let paired = sys.equations.len() == ctx.num_fields() && ctx.fields().iter().all(|f| f.ghost == 0);
    let mut extra = Vec::new();
    for a in 0..sys.equations.len() {
        extra.push(if paired {
            FieldDecl::antifield(star(&ctx.field(a).name), -1, a)
        } else {
            FieldDecl::new(format!("eq{}star", a + 1), -1)
        });
    }
    let k = sys.noether_ops.len();
    for i in 0..k {
        let name = if k == 1 {
            "cstar".to_string()
        } else {
            format!("c{}star", i + 1)
        };
        extra.push(FieldDecl::new(name, -2));
    }
    let ext = ctx.extended(extra)?;
    let first = ctx.num_fields();
    let antifields: Vec<DiffPoly> = (0..sys.equations.len()).map(|a| ext.u(first + a)).collect();
    let mut images = vec![DiffPoly::zero(); ext.num_fields()];
    for (a, f) in sys.equations.iter().enumerate() {
        images[first + a] = f.clone();
    }
    for (i, z) in sys.noether_ops.iter().enumerate() {
        images[first + sys.equations.len() + i] = z.apply(&antifields)?.swap_remove(0);
    }
    let delta = InternalDifferential::new(&ext, images)?;
    delta.require_square_zero()?;
    Ok((ext, delta))
}

/// Field content, gauge data and action of a BV extension.
#[derive(Clone, Debug)]
pub struct BvModel {
    pub context: JetContext,
    pub lagrangian: DiffPoly,
    pub gauge_ops: Vec<TotalDiffOperator>,
    pub action: DiffPoly,
    /// Number of original ghost-zero fields, which come first in the context.
    pub num_fields: usize,
    /// Euler-Lagrange system with a solved form, used by the H^0 cross-checks.
    pub system: Option<PdeSystem>,
}

impl BvModel {
    /// Replaces the generated action by a user-supplied one over the same
    /// content.
    pub fn with_action(mut self, action: DiffPoly) -> Result<Self> {
        self.context.check_declared(&action)?;
        self.action = action;
        Ok(self)
    }

    pub fn with_system(mut self, sys: PdeSystem) -> Self {
        self.system = Some(sys);
        self
    }

    /// Ghost fields, in order.
    pub fn ghosts(&self) -> Vec<usize> {
        (self.num_fields..self.context.num_fields())
            .filter(|&i| self.context.field(i).ghost == 1)
            .collect()
    }
}

/// Builds the minimal BV content for `L` with abelian gauge generators
/// `R_k` (rows: fields, columns: gauge parameters) and the first-order
/// action `S = L + sum_A phi*_A R(c)^A`.
pub fn bv_extend(ctx: &JetContext, l: &DiffPoly, gauge_ops: &[TotalDiffOperator]) -> Result<BvModel> {
    if ctx.fields().iter().any(|f| f.ghost != 0) {
        return Err(Error::GhostMismatch("BV extension expects ghost-zero fields".into()));
    }
    for (i, r) in gauge_ops.iter().enumerate() {
        if !noether_identity_check(ctx, r, l)?.holds {
            return Err(Error::GaugeCheck(i));
        }
    }
    let n = ctx.num_fields();
    let params: usize = gauge_ops.iter().map(TotalDiffOperator::cols).sum();
    let ghost_name = |j: usize| {
        if params == 1 {
            "c".to_string()
        } else {
            format!("c{}", j + 1)
        }
    };
    let mut decls: Vec<FieldDecl> = ctx.fields().to_vec();
    decls.extend((0..params).map(|j| FieldDecl::new(ghost_name(j), 1)));
    decls.extend((0..n).map(|a| FieldDecl::antifield(star(&ctx.field(a).name), -1, a)));
    decls.extend((0..params).map(|j| FieldDecl::antifield(star(&ghost_name(j)), -2, n + j)));
    let bv = JetContext::new(ctx.base_names().to_vec(), decls)?;

    let mut action = l.clone();
    let mut offset = 0;
    for r in gauge_ops {
        let ghosts: Vec<DiffPoly> = (0..r.cols()).map(|j| bv.u(n + offset + j)).collect();
        let variation = r.apply(&ghosts)?;
        for (a, v) in variation.iter().enumerate() {
            action += &bv.u(n + params + a) * v;
        }
        offset += r.cols();
    }
    Ok(BvModel {
        context: bv,
        lagrangian: l.clone(),
        gauge_ops: gauge_ops.to_vec(),
        action,
        num_fields: n,
        system: None,
    })
}

/// Right variational derivative, `E^R_A(F) = (-1)^{|A|(|F|+1)} E^L_A(F)`,
/// applied separately to the even and odd parts of `F`.
fn right_euler(ctx: &JetContext, f: &DiffPoly, field: usize) -> DiffPoly {
    let left = euler_component(f, field);
    if !ctx.field(field).is_odd() {
        return left;
    }
    let (even, odd) = f.split_parity();
    -euler_component(&even, field) + euler_component(&odd, field)
}

fn require_antifields(ctx: &JetContext) -> Result<Vec<(usize, usize)>> {
    let pairs = ctx.antifield_pairs();
    if pairs.is_empty() {
        return Err(Error::NoAntifields);
    }
    Ok(pairs)
}

/// Anti-bracket of densities, a representative of its class modulo total
/// divergences:
/// `{F, G} = sum_A E^R_A(F) E^L_{A*}(G) - E^R_{A*}(F) E^L_A(G)`.
pub fn antibracket(ctx: &JetContext, f: &DiffPoly, g: &DiffPoly) -> Result<DiffPoly> {
    let pairs = require_antifields(ctx)?;
    let mut out = DiffPoly::zero();
    for (a, s) in pairs {
        out += &right_euler(ctx, f, a) * &euler_component(g, s);
        out -= &right_euler(ctx, f, s) * &euler_component(g, a);
    }
    Ok(out)
}

/// The evolutionary field `X_F` with `X_F(G)` in the class of `{F, G}`.
pub fn hamiltonian_field(ctx: &JetContext, f: &DiffPoly) -> Result<EvoField> {
    let pairs = require_antifields(ctx)?;
    let mut comps = vec![DiffPoly::zero(); ctx.num_fields()];
    for (a, s) in pairs {
        comps[s] = right_euler(ctx, f, a);
        comps[a] = -right_euler(ctx, f, s);
    }
    Ok(EvoField::new(comps))
}

/// `{S, S} = 0` modulo total divergences. Residues are the Euler components
/// of `{S, S}`.
pub fn master_equation_check(ctx: &JetContext, s: &DiffPoly) -> Result<Verdict> {
    if !s.is_zero() && s.ghost() != Some(0) {
        return Err(Error::GhostMismatch("the action must have ghost number 0".into()));
    }
    let ss = antibracket(ctx, s, s)?;
    let residues = euler_operator(ctx, &ss);
    Ok(Verdict {
        holds: residues.iter().all(DiffPoly::is_zero),
        residues,
    })
}

/// `D_BV = {S, -}` as an internal differential: `D_BV(u) = X_S(u)`.
pub fn bv_differential(ctx: &JetContext, s: &DiffPoly) -> Result<InternalDifferential> {
    if !master_equation_check(ctx, s)?.holds {
        return Err(Error::MasterEquation);
    }
    let x = hamiltonian_field(ctx, s)?;
    let delta = InternalDifferential::new(ctx, x.components)?;
    delta.require_square_zero()?;
    Ok(delta)
}

/// Bounded `H^0(D_BV)` on functions, with cross-checks on each representative.
pub struct H0Report {
    pub table: BettiTable,
    pub classes: ClassBasis,
    pub representatives: Vec<H0Class>,
}

pub struct H0Class {
    pub representative: DiffPoly,
    /// Gauge variation of the antifield- and ghost-free part vanishes
    /// (modulo the equations when a solved form is available).
    pub gauge_invariant: bool,
    /// The antifield- and ghost-free part is nonzero modulo the equations.
    pub nontrivial_on_shell: bool,
}

impl H0Report {
    /// The ghost-zero entry of the Betti table.
    pub fn h0(&self) -> Option<&crate::tricomplex::BettiEntry> {
        self.table.entry(FUNCTIONS, 0)
    }

    pub fn entry(&self, ghost: i64) -> Option<&crate::tricomplex::BettiEntry> {
        self.table.entry(FUNCTIONS, ghost)
    }
}

const FUNCTIONS: Strand = Strand {
    p: Some(0),
    q: Some(0),
    gh: None,
};

/// Runs the bounded BV cohomology at ghost numbers `-1` and `0` on
/// functions (no forms) with jet budget `max_jet` and weight `max_weight`.
pub fn h0_report(model: &BvModel, max_jet: u32, max_weight: u32) -> Result<H0Report> {
    let ctx = &model.context;
    let d = bv_differential(ctx, &model.action)?;
    let trunc = Truncation {
        max_jet,
        max_weight,
        p: (0, 0),
        q: (0, 0),
        ghost: (-1, 0),
    };
    let complex = BoundedComplex::new(ctx, Differential::Internal(d), trunc)?;
    let table = complex.betti_table();
    let classes = complex.class_basis(FUNCTIONS, 0);
    let n = model.num_fields;
    let ghosts = model.ghosts();
    let mut representatives = Vec::new();
    for rep in &classes.representatives {
        let physical = rep.filter(|m| {
            m.factors()
                .iter()
                .all(|(s, _)| !matches!(s, Symbol::Jet(f, _) if f.index as usize >= n))
        });
        let mut variation = DiffPoly::zero();
        let mut offset = 0;
        for r in &model.gauge_ops {
            let params: Vec<DiffPoly> = (0..r.cols()).map(|j| ctx.u(ghosts[offset + j])).collect();
            let mut comps = r.apply(&params)?;
            comps.resize(ctx.num_fields(), DiffPoly::zero());
            variation += crate::jetalg::evolutionary_apply(ctx, &EvoField::new(comps), &physical)?;
            offset += r.cols();
        }
        let (gauge_invariant, nontrivial_on_shell) = match &model.system {
            Some(sys) if sys.solved_form().is_some() => {
                (sys.reduce(&variation)?.is_zero(), !sys.reduce(&physical)?.is_zero())
            }
            _ => (variation.is_zero(), !physical.is_zero()),
        };
        representatives.push(H0Class {
            representative: rep.clone(),
            gauge_invariant,
            nontrivial_on_shell,
        });
    }
    Ok(H0Report {
        table,
        classes,
        representatives,
    })
}
