//! Horizontal/contact forms `Omega^(p,q)` with differential-polynomial
//! coefficients.
//!
//! Conventions: `theta^A_sigma = du^A_sigma - sum_i u^A_{sigma+1_i} dx^i`,
//! `d_h = sum_i dx^i ^ D_i`, `d_v u^A_sigma = theta^A_sigma`. A contact
//! symbol has Koszul parity `1 + gh(A)`; every sign comes from the total
//! degree `p + q + gh`.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Neg, Sub};

use crate::error::{Error, Result};
use crate::expr;
use crate::jetalg::{rat, DiffPoly, EvoField, JetContext, Monomial, Rational, Symbol};

/// Tri-degree of a homogeneous form: horizontal, vertical, ghost.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FormDegree {
    pub p: usize,
    pub q: usize,
    pub gh: i32,
}

impl FormDegree {
    pub fn of(m: &Monomial) -> Self {
        let (p, q) = m.form_degree();
        FormDegree { p, q, gh: m.ghost() }
    }

    /// Total Koszul degree `p + q + gh`.
    pub fn total(&self) -> i64 {
        self.p as i64 + self.q as i64 + self.gh as i64
    }
}

/// A finite sum of `coefficient * dx^I ^ theta^J` terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct BiForm(DiffPoly);

impl BiForm {
    pub fn new(p: DiffPoly) -> Self {
        BiForm(p)
    }

    pub fn zero() -> Self {
        BiForm(DiffPoly::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn poly(&self) -> &DiffPoly {
        &self.0
    }

    pub fn into_poly(self) -> DiffPoly {
        self.0
    }

    pub fn scale(&self, c: &Rational) -> BiForm {
        BiForm(self.0.scale(c))
    }

    /// Homogeneous pieces by bidegree `(p, q)`.
    pub fn components(&self) -> BTreeMap<(usize, usize), BiForm> {
        let mut out: BTreeMap<(usize, usize), BiForm> = BTreeMap::new();
        for (m, c) in self.0.terms() {
            out.entry(m.form_degree()).or_default().0.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Homogeneous pieces by tri-degree.
    pub fn tri_components(&self) -> BTreeMap<FormDegree, BiForm> {
        let mut out: BTreeMap<FormDegree, BiForm> = BTreeMap::new();
        for (m, c) in self.0.terms() {
            out.entry(FormDegree::of(m))
                .or_default()
                .0
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// The tri-degree when homogeneous; `None` for zero or mixed forms.
    pub fn degree(&self) -> Option<FormDegree> {
        let comps = self.tri_components();
        (comps.len() == 1).then(|| *comps.keys().next().expect("one"))
    }

    pub fn wedge(&self, other: &BiForm) -> BiForm {
        BiForm(&self.0 * &other.0)
    }

    /// Horizontal differential, bidegree `(1, 0)`.
    pub fn d_h(&self, ctx: &JetContext) -> BiForm {
        let mut out = DiffPoly::zero();
        for i in 0..ctx.dim() {
            let di = self.0.total_derivative(i);
            if !di.is_zero() {
                out += &ctx.dx(i) * &di;
            }
        }
        BiForm(out)
    }

    /// Vertical differential, bidegree `(0, 1)`.
    pub fn d_v(&self) -> BiForm {
        BiForm(self.0.derive(true, |s| match s {
            Symbol::Jet(f, sigma) => Some(DiffPoly::from_symbol(Symbol::Theta(*f, sigma.clone()))),
            _ => None,
        }))
    }

    /// Full de Rham differential `d_h + d_v`.
    pub fn d(&self, ctx: &JetContext) -> BiForm {
        &self.d_h(ctx) + &self.d_v()
    }
}

impl From<DiffPoly> for BiForm {
    fn from(p: DiffPoly) -> Self {
        BiForm(p)
    }
}

impl Add for &BiForm {
    type Output = BiForm;
    fn add(self, rhs: &BiForm) -> BiForm {
        BiForm(&self.0 + &rhs.0)
    }
}

impl Sub for &BiForm {
    type Output = BiForm;
    fn sub(self, rhs: &BiForm) -> BiForm {
        BiForm(&self.0 - &rhs.0)
    }
}

impl Neg for &BiForm {
    type Output = BiForm;
    fn neg(self) -> BiForm {
        BiForm(-&self.0)
    }
}

impl AddAssign<&BiForm> for BiForm {
    fn add_assign(&mut self, rhs: &BiForm) {
        self.0 += &rhs.0;
    }
}

/// `dg` in the `(dx, theta)` basis: `dx^i` for a base coordinate,
/// `theta^A_sigma + sum_i u^A_{sigma+1_i} dx^i` for a jet variable.
pub fn differential_of(ctx: &JetContext, g: &Symbol) -> BiForm {
    match g {
        Symbol::Base(i) => BiForm(ctx.dx(*i as usize)),
        Symbol::Jet(f, sigma) => {
            let mut out = DiffPoly::from_symbol(Symbol::Theta(*f, sigma.clone()));
            for i in 0..ctx.dim() {
                out += &DiffPoly::from_symbol(Symbol::Jet(*f, sigma.raised(i))) * &ctx.dx(i);
            }
            BiForm(out)
        }
        // d of a form generator is not a 1-form in this basis
        Symbol::Dx(_) => BiForm::zero(),
        Symbol::Theta(f, sigma) => BiForm::new(
            (0..ctx.dim())
                .map(|i| &ctx.dx(i) * &DiffPoly::from_symbol(Symbol::Theta(*f, sigma.raised(i))))
                .fold(DiffPoly::zero(), |a, b| a + b),
        ),
    }
}

/// Rewrites `sum coeff * dg_1 ^ ... ^ dg_k` into the contact basis.
pub fn contact_split(ctx: &JetContext, terms: &[(DiffPoly, Vec<Symbol>)]) -> BiForm {
    let mut out = DiffPoly::zero();
    for (coeff, gens) in terms {
        let mut acc = coeff.clone();
        for g in gens {
            acc = &acc * differential_of(ctx, g).poly();
        }
        out += acc;
    }
    BiForm(out)
}

/// Insertion of an evolutionary field: `iota(theta^A_sigma) = D_sigma chi^A`,
/// extended as a graded derivation of bidegree `(0, -1)`.
pub fn interior_product(ctx: &JetContext, chi: &EvoField, w: &BiForm) -> Result<BiForm> {
    let shift = chi.ghost_shift(ctx)?.unwrap_or(0);
    let odd = (shift + 1).rem_euclid(2) == 1;
    Ok(BiForm(w.poly().derive(odd, |s| match s {
        Symbol::Theta(f, sigma) => {
            let comp = &chi.components[f.index as usize];
            (!comp.is_zero()).then(|| comp.prolong_derivative(sigma))
        }
        _ => None,
    })))
}

/// Vertical Lie derivative, the graded commutator of `iota_chi` and `d_v`.
pub fn lie_derivative(ctx: &JetContext, chi: &EvoField, w: &BiForm) -> Result<BiForm> {
    let iota_odd = (chi.ghost_shift(ctx)?.unwrap_or(0) + 1).rem_euclid(2) == 1;
    let a = interior_product(ctx, chi, &w.d_v())?;
    let b = interior_product(ctx, chi, w)?.d_v();
    Ok(if iota_odd { &a + &b } else { &a - &b })
}

/// Homotopy for `d_v` on forms whose terms all have positive jet weight:
/// `h = iota_R / w` termwise with `R` the radial field `(u^A)`, so that
/// `d_v h + h d_v = id`.
pub fn vertical_homotopy(ctx: &JetContext, w: &BiForm) -> Result<BiForm> {
    let radial = EvoField::new((0..ctx.num_fields()).map(|a| ctx.u(a)).collect());
    let mut out = DiffPoly::zero();
    for (m, c) in w.poly().terms() {
        let weight = m.weight();
        if weight == 0 {
            return Err(Error::ZeroWeight(expr::print(
                ctx,
                &DiffPoly::from_monomial(m.clone(), c.clone()),
            )));
        }
        let term = BiForm(DiffPoly::from_monomial(m.clone(), c / rat(weight as i64)));
        out += interior_product(ctx, &radial, &term)?.into_poly();
    }
    Ok(BiForm(out))
}
