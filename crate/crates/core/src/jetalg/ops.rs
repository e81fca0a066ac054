use super::{DiffPoly, JetContext, MultiIndex, Rational, Symbol};
use crate::error::{Error, Result};

impl DiffPoly {
    /// Graded left partial derivative with respect to one generator.
    pub fn partial_derivative(&self, g: &Symbol) -> DiffPoly {
        self.derive(g.is_odd(), |s| (s == g).then(DiffPoly::one))
    }

    /// Total derivative `D_i`: differentiates through jet variables and acts
    /// on contact forms by raising their multi-index. `dx` is inert.
    pub fn total_derivative(&self, i: usize) -> DiffPoly {
        self.derive(false, |s| match s {
            Symbol::Base(j) => (*j as usize == i).then(DiffPoly::one),
            Symbol::Dx(_) => None,
            other => other.shifted(i).map(DiffPoly::from_symbol),
        })
    }

    /// `D_sigma`, the composite of total derivatives.
    pub fn prolong_derivative(&self, sigma: &MultiIndex) -> DiffPoly {
        let mut out = self.clone();
        for (i, &c) in sigma.counts().iter().enumerate() {
            for _ in 0..c {
                if out.is_zero() {
                    return out;
                }
                out = out.total_derivative(i);
            }
        }
        out
    }

    /// Every jet-variable symbol occurring in the polynomial.
    pub fn jet_symbols(&self) -> Vec<Symbol> {
        self.symbols()
            .into_iter()
            .filter(|s| matches!(s, Symbol::Jet(..)))
            .collect()
    }

    pub fn depends_on_jets(&self) -> bool {
        self.symbols()
            .iter()
            .any(|s| matches!(s, Symbol::Jet(..) | Symbol::Theta(..)))
    }

    /// Highest jet order appearing, `None` when there are no jet variables.
    pub fn jet_order(&self) -> Option<u32> {
        self.symbols()
            .iter()
            .filter_map(|s| match s {
                Symbol::Jet(_, sigma) | Symbol::Theta(_, sigma) => Some(sigma.order()),
                _ => None,
            })
            .max()
    }
}

/// Characteristic of an evolutionary vector field: one component per field
/// of the context.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EvoField {
    pub components: Vec<DiffPoly>,
}

impl EvoField {
    pub fn new(components: Vec<DiffPoly>) -> Self {
        EvoField { components }
    }

    pub fn zero(ctx: &JetContext) -> Self {
        EvoField {
            components: vec![DiffPoly::zero(); ctx.num_fields()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(DiffPoly::is_zero)
    }

    fn check_len(&self, ctx: &JetContext) -> Result<()> {
        if self.components.len() != ctx.num_fields() {
            return Err(Error::ComponentCount {
                expected: ctx.num_fields(),
                found: self.components.len(),
            });
        }
        Ok(())
    }

    /// Ghost shift `k` with `gh(chi^A) = gh(A) + k` for every nonzero
    /// component; `Ok(None)` for the zero field.
    pub fn ghost_shift(&self, ctx: &JetContext) -> Result<Option<i32>> {
        self.check_len(ctx)?;
        let mut shift = None;
        for (a, comp) in self.components.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            let g = comp
                .ghost()
                .ok_or_else(|| Error::GhostMismatch(format!("component {a} is not ghost-homogeneous")))?;
            let k = g - ctx.field(a).ghost;
            match shift {
                None => shift = Some(k),
                Some(s) if s != k => {
                    return Err(Error::GhostMismatch(format!(
                        "component {a} shifts ghost by {k}, expected {s}"
                    )))
                }
                _ => {}
            }
        }
        Ok(shift)
    }

    /// Parity of the evolutionary derivation.
    pub fn is_odd(&self, ctx: &JetContext) -> Result<bool> {
        Ok(self.ghost_shift(ctx)?.unwrap_or(0).rem_euclid(2) == 1)
    }

    pub fn scale(&self, c: &Rational) -> EvoField {
        EvoField::new(self.components.iter().map(|p| p.scale(c)).collect())
    }
}

impl std::ops::Add for &EvoField {
    type Output = EvoField;
    fn add(self, rhs: &EvoField) -> EvoField {
        EvoField::new(
            self.components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl std::ops::Sub for &EvoField {
    type Output = EvoField;
    fn sub(self, rhs: &EvoField) -> EvoField {
        EvoField::new(
            self.components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

/// `E_chi(f) = sum_{A, sigma} D_sigma(chi^A) df/du^A_sigma` as a graded left
/// derivation. Contact forms and `dx` are left untouched.
pub fn evolutionary_apply(ctx: &JetContext, chi: &EvoField, f: &DiffPoly) -> Result<DiffPoly> {
    let odd = chi.is_odd(ctx)?;
    Ok(f.derive(odd, |s| match s {
        Symbol::Jet(field, sigma) => {
            let comp = &chi.components[field.index as usize];
            (!comp.is_zero()).then(|| comp.prolong_derivative(sigma))
        }
        _ => None,
    }))
}

/// Pulls `f` back along the jet prolongation of a polynomial section.
pub fn substitute_section(ctx: &JetContext, f: &DiffPoly, section: &[DiffPoly]) -> Result<DiffPoly> {
    if section.len() != ctx.num_fields() {
        return Err(Error::ComponentCount {
            expected: ctx.num_fields(),
            found: section.len(),
        });
    }
    for (a, s) in section.iter().enumerate() {
        if s.symbols().iter().any(|sym| !matches!(sym, Symbol::Base(_))) {
            return Err(Error::NonBaseSection(ctx.field(a).name.clone()));
        }
        if ctx.field(a).is_odd() && !s.is_zero() {
            return Err(Error::GhostMismatch(format!(
                "odd field `{}` cannot take a commuting section",
                ctx.field(a).name
            )));
        }
    }
    Ok(f.substitute(|s| match s {
        Symbol::Jet(field, sigma) => Some(section[field.index as usize].prolong_derivative(sigma)),
        _ => None,
    }))
}
