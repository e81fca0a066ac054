use std::collections::BTreeMap;

use rayon::prelude::*;

use super::delta::InternalDifferential;
use super::linalg::{eliminate, Echelon, SparseVec};
use crate::error::{Error, Result};
use crate::forms::{BiForm, FormDegree};
use crate::jetalg::{DiffPoly, JetContext, Monomial, MultiIndex, Rational, Symbol};

/// Budget growth allowed while adapting per-field jet orders.
const BUDGET_SLACK: u32 = 32;

/// The differential whose cohomology is computed.
#[derive(Clone, Debug)]
pub enum Differential {
    Horizontal,
    Vertical,
    Internal(InternalDifferential),
    Total(InternalDifferential),
}

impl Differential {
    pub fn name(&self) -> &'static str {
        match self {
            Differential::Horizontal => "d_h",
            Differential::Vertical => "d_v",
            Differential::Internal(_) => "delta",
            Differential::Total(_) => "D",
        }
    }

    pub fn apply(&self, ctx: &JetContext, w: &DiffPoly) -> DiffPoly {
        let f = BiForm::new(w.clone());
        match self {
            Differential::Horizontal => f.d_h(ctx).into_poly(),
            Differential::Vertical => f.d_v().into_poly(),
            Differential::Internal(delta) => delta.apply(w),
            Differential::Total(delta) => super::delta::total_unchecked(&f, delta).into_poly(),
        }
    }

    fn delta(&self) -> Option<&InternalDifferential> {
        match self {
            Differential::Internal(d) | Differential::Total(d) => Some(d),
            _ => None,
        }
    }
}

/// Finite window for a bounded cohomology computation. Ranges are inclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    /// Starting jet order for every field; budgets may grow so that the
    /// internal differential maps generators into the space.
    pub max_jet: u32,
    /// Maximal number of jet and contact factors.
    pub max_weight: u32,
    pub p: (usize, usize),
    pub q: (usize, usize),
    pub ghost: (i32, i32),
}

/// The tri-degree components held fixed along one strand of the complex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Strand {
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub gh: Option<i32>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BettiEntry {
    pub strand: Strand,
    pub degree: i64,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub betti: usize,
    pub certified: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BettiTable {
    pub differential: &'static str,
    /// Jet-order budget per field after adaptation.
    pub budgets: Vec<u32>,
    pub entries: Vec<BettiEntry>,
    /// Some generator image has a weight-zero term, so images from outside
    /// the weight bound can land inside it.
    pub weight_lowering: bool,
    /// A lower window bound is above its natural value (total differential only).
    pub window_cut: bool,
}

impl BettiTable {
    pub fn entry(&self, strand: Strand, degree: i64) -> Option<&BettiEntry> {
        self.entries.iter().find(|e| e.strand == strand && e.degree == degree)
    }

    pub fn certified(&self) -> impl Iterator<Item = &BettiEntry> {
        self.entries.iter().filter(|e| e.certified)
    }
}

/// A truncated cochain complex, enumerated monomial by monomial.
pub struct BoundedComplex {
    ctx: JetContext,
    diff: Differential,
    trunc: Truncation,
    budgets: Vec<u32>,
    weight_lowering: bool,
    window_cut: bool,
    pieces: BTreeMap<(Strand, i64), Vec<Monomial>>,
}

struct PieceMap {
    rank: usize,
    kernel: Vec<SparseVec>,
    leaks: bool,
    images: Vec<DiffPoly>,
}

impl BoundedComplex {
    pub fn new(ctx: &JetContext, diff: Differential, trunc: Truncation) -> Result<Self> {
        if let Some(delta) = diff.delta() {
            if delta.context() != ctx {
                return Err(Error::InvalidContext("differential belongs to another context".into()));
            }
            delta.require_square_zero()?;
        }
        if trunc.p.0 > trunc.p.1 || trunc.q.0 > trunc.q.1 || trunc.ghost.0 > trunc.ghost.1 {
            return Err(Error::Shape("empty truncation window".into()));
        }
        let budgets = adapted_budgets(ctx, &diff, trunc.max_jet);
        let weight_lowering = diff
            .delta()
            .is_some_and(|d| d.images().iter().any(|img| img.terms().any(|(m, _)| m.weight() == 0)));
        let min_ghost = ctx.fields().iter().map(|f| f.ghost).min().unwrap_or(0).min(0);
        let window_cut = matches!(diff, Differential::Total(_))
            && (trunc.p.0 > 0 || trunc.q.0 > 0 || trunc.ghost.0 > min_ghost * trunc.max_weight as i32);
        let mut complex = BoundedComplex {
            ctx: ctx.clone(),
            diff,
            trunc,
            budgets,
            weight_lowering,
            window_cut,
            pieces: BTreeMap::new(),
        };
        complex.enumerate();
        Ok(complex)
    }

    pub fn budgets(&self) -> &[u32] {
        &self.budgets
    }

    fn grading(&self, d: FormDegree) -> (Strand, i64) {
        match self.diff {
            Differential::Horizontal => (
                Strand {
                    p: None,
                    q: Some(d.q),
                    gh: Some(d.gh),
                },
                d.p as i64,
            ),
            Differential::Vertical => (
                Strand {
                    p: Some(d.p),
                    q: None,
                    gh: Some(d.gh),
                },
                d.q as i64,
            ),
            Differential::Internal(_) => (
                Strand {
                    p: Some(d.p),
                    q: Some(d.q),
                    gh: None,
                },
                d.gh as i64,
            ),
            Differential::Total(_) => (
                Strand {
                    p: None,
                    q: None,
                    gh: None,
                },
                d.total(),
            ),
        }
    }

    /// Windows used for enumeration: the degree direction is widened by one
    /// below so that incoming images are complete.
    fn enumeration_window(&self) -> Truncation {
        let mut w = self.trunc.clone();
        match self.diff {
            Differential::Horizontal => w.p.0 = w.p.0.saturating_sub(1),
            Differential::Vertical => w.q.0 = w.q.0.saturating_sub(1),
            Differential::Internal(_) => w.ghost.0 -= 1,
            Differential::Total(_) => {}
        }
        w
    }

    fn in_window(w: &Truncation, d: &FormDegree) -> bool {
        (w.p.0..=w.p.1).contains(&d.p) && (w.q.0..=w.q.1).contains(&d.q) && (w.ghost.0..=w.ghost.1).contains(&d.gh)
    }

    /// Monomials of the ambient space: jet budgets and weight bound respected,
    /// no base coordinates, and for the total differential inside all windows.
    fn in_ambient(&self, m: &Monomial) -> bool {
        if m.weight() > self.trunc.max_weight {
            return false;
        }
        for (s, _) in m.factors() {
            match s {
                Symbol::Base(_) => return false,
                Symbol::Jet(f, sigma) | Symbol::Theta(f, sigma) => {
                    if sigma.order() > self.budgets[f.index as usize] {
                        return false;
                    }
                }
                Symbol::Dx(_) => {}
            }
        }
        !matches!(self.diff, Differential::Total(_)) || Self::in_window(&self.trunc, &FormDegree::of(m))
    }

    fn enumerate(&mut self) {
        let w = self.enumeration_window();
        let n = self.ctx.dim();
        let coefficient_parts = enumerate_monomials(&self.ctx, &self.budgets, w.max_weight, w.q.1 as u32);
        let dx_sets = subsets(n, w.p.0, w.p.1.min(n));
        let mut pieces: BTreeMap<(Strand, i64), Vec<Monomial>> = BTreeMap::new();
        for cm in &coefficient_parts {
            let (coef, theta) = cm.split_form();
            for dxs in &dx_sets {
                let mut factors: Vec<(Symbol, u32)> = coef.factors().to_vec();
                factors.extend(dxs.iter().map(|&i| (Symbol::Dx(i as u16), 1)));
                factors.extend(theta.factors().iter().cloned());
                let m = Monomial::from_sorted(factors);
                let d = FormDegree::of(&m);
                if Self::in_window(&w, &d) {
                    pieces.entry(self.grading(d)).or_default().push(m);
                }
            }
        }
        for v in pieces.values_mut() {
            v.sort();
        }
        self.pieces = pieces;
    }

    fn piece(&self, strand: Strand, degree: i64) -> &[Monomial] {
        self.pieces.get(&(strand, degree)).map(Vec::as_slice).unwrap_or(&[])
    }

    fn map_piece(&self, basis: &[Monomial]) -> PieceMap {
        let images: Vec<DiffPoly> = basis
            .par_iter()
            .map(|m| {
                self.diff.apply(
                    &self.ctx,
                    &DiffPoly::from_monomial(m.clone(), Rational::from_integer(1.into())),
                )
            })
            .collect();
        let leaks = images.iter().any(|img| img.terms().any(|(m, _)| !self.in_ambient(m)));
        let mut rows: BTreeMap<&Monomial, usize> = BTreeMap::new();
        for img in &images {
            for (m, _) in img.terms() {
                rows.insert(m, 0);
            }
        }
        for (i, v) in rows.values_mut().enumerate() {
            *v = i;
        }
        let columns: Vec<SparseVec> = images
            .iter()
            .map(|img| img.terms().map(|(m, c)| (rows[m], c.clone())).collect())
            .collect();
        let e = eliminate(&columns);
        PieceMap {
            rank: e.rank,
            kernel: e.kernel,
            leaks,
            images,
        }
    }

    fn reported_degrees(&self, strand: Strand) -> Vec<i64> {
        let (lo, hi) = match self.diff {
            Differential::Horizontal => (self.trunc.p.0 as i64, self.trunc.p.1.min(self.ctx.dim()) as i64),
            Differential::Vertical => (self.trunc.q.0 as i64, self.trunc.q.1 as i64),
            Differential::Internal(_) => (self.trunc.ghost.0 as i64, self.trunc.ghost.1 as i64),
            Differential::Total(_) => {
                let degs: Vec<i64> = self
                    .pieces
                    .keys()
                    .filter(|(s, _)| *s == strand)
                    .map(|(_, d)| *d)
                    .collect();
                match (degs.iter().min(), degs.iter().max()) {
                    (Some(&a), Some(&b)) => (a, b),
                    _ => return Vec::new(),
                }
            }
        };
        (lo..=hi).collect()
    }

    fn strand_in_window(&self, s: &Strand) -> bool {
        s.p.is_none_or(|p| (self.trunc.p.0..=self.trunc.p.1).contains(&p))
            && s.q.is_none_or(|q| (self.trunc.q.0..=self.trunc.q.1).contains(&q))
            && s.gh
                .is_none_or(|g| (self.trunc.ghost.0..=self.trunc.ghost.1).contains(&g))
    }

    pub fn betti_table(&self) -> BettiTable {
        let mut strands: Vec<Strand> = self.pieces.keys().map(|(s, _)| *s).collect();
        strands.dedup();
        strands.retain(|s| self.strand_in_window(s));
        let mut entries = Vec::new();
        for strand in strands {
            let degrees = self.reported_degrees(strand);
            if degrees.iter().all(|&d| self.piece(strand, d).is_empty()) {
                continue;
            }
            let mut previous: Option<PieceMap> = None;
            let first = degrees.first().copied().unwrap_or(0);
            for &i in &degrees {
                let incoming = match previous.take() {
                    Some(pm) => pm,
                    None => self.map_piece(self.piece(strand, first - 1)),
                };
                let basis = self.piece(strand, i);
                let pm = self.map_piece(basis);
                let inside = image_rank_inside(&incoming, basis);
                entries.push(BettiEntry {
                    strand,
                    degree: i,
                    dim: basis.len(),
                    rank_in: incoming.rank,
                    rank_out: pm.rank,
                    betti: basis.len() - pm.rank - inside,
                    certified: !pm.leaks && !incoming.leaks && !self.weight_lowering && !self.window_cut,
                });
                previous = Some(pm);
            }
        }
        BettiTable {
            differential: self.diff.name(),
            budgets: self.budgets.clone(),
            entries,
            weight_lowering: self.weight_lowering,
            window_cut: self.window_cut,
        }
    }

    /// Cocycles modulo coboundaries in one piece, with representatives.
    pub fn class_basis(&self, strand: Strand, degree: i64) -> ClassBasis {
        let basis = self.piece(strand, degree).to_vec();
        let index: BTreeMap<Monomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let incoming = self.map_piece(self.piece(strand, degree - 1));
        let outgoing = self.map_piece(&basis);
        let mut extra = BTreeMap::new();
        let mut image = Echelon::new();
        for img in &incoming.images {
            image.insert(coordinates(img, &index, &mut extra));
        }
        let mut span = image.clone();
        let mut representatives = Vec::new();
        for k in &outgoing.kernel {
            if span.insert(k.clone()) {
                let mut rep = DiffPoly::zero();
                for (j, c) in k {
                    rep.add_term(basis[*j].clone(), c.clone());
                }
                representatives.push(rep);
            }
        }
        ClassBasis {
            ctx: self.ctx.clone(),
            diff: self.diff.clone(),
            index,
            image,
            representatives,
            certified: !incoming.leaks && !outgoing.leaks && !self.weight_lowering && !self.window_cut,
        }
    }
}

/// Dimension of the part of an incoming image lying in the span of `basis`.
fn image_rank_inside(incoming: &PieceMap, basis: &[Monomial]) -> usize {
    if !incoming.leaks {
        return incoming.rank;
    }
    let index: BTreeMap<Monomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut extra = BTreeMap::new();
    let outside: Vec<SparseVec> = incoming
        .images
        .iter()
        .map(|img| {
            coordinates(img, &index, &mut extra)
                .into_iter()
                .filter(|(j, _)| *j >= basis.len())
                .collect()
        })
        .collect();
    incoming.rank - eliminate(&outside).rank
}

fn coordinates(p: &DiffPoly, index: &BTreeMap<Monomial, usize>, extra: &mut BTreeMap<Monomial, usize>) -> SparseVec {
    let base = index.len();
    p.terms()
        .map(|(m, c)| {
            let i = match index.get(m) {
                Some(&i) => i,
                None => {
                    let next = base + extra.len();
                    *extra.entry(m.clone()).or_insert(next)
                }
            };
            (i, c.clone())
        })
        .collect()
}

/// Cohomology classes of one truncated piece.
pub struct ClassBasis {
    ctx: JetContext,
    diff: Differential,
    index: BTreeMap<Monomial, usize>,
    image: Echelon,
    pub representatives: Vec<DiffPoly>,
    pub certified: bool,
}

impl ClassBasis {
    /// True iff `f` lies in the piece, is closed, and is not a coboundary of
    /// the truncated complex.
    pub fn represents_nonzero_class(&self, f: &DiffPoly) -> bool {
        if f.is_zero() || !self.diff.apply(&self.ctx, f).is_zero() {
            return false;
        }
        let mut v = SparseVec::new();
        for (m, c) in f.terms() {
            match self.index.get(m) {
                Some(&i) => {
                    v.insert(i, c.clone());
                }
                None => return false,
            }
        }
        !self.image.contains(&v)
    }
}

/// Per-field jet budgets: start at `k` and grow until every generator
/// image of the internal differential stays inside the budgets.
fn adapted_budgets(ctx: &JetContext, diff: &Differential, k: u32) -> Vec<u32> {
    let mut budgets = vec![k; ctx.num_fields()];
    let Some(delta) = diff.delta() else { return budgets };
    for _ in 0..=(ctx.num_fields() as u32 * BUDGET_SLACK) {
        let mut changed = false;
        for a in 0..ctx.num_fields() {
            for s in delta.image(a).symbols() {
                if let Symbol::Jet(f, tau) = &s {
                    let need = budgets[a] + tau.order();
                    let b = &mut budgets[f.index as usize];
                    if *b < need {
                        *b = need;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return budgets;
        }
        if budgets.iter().any(|&b| b > k + BUDGET_SLACK) {
            break;
        }
    }
    vec![k; ctx.num_fields()]
}

/// Every monomial in jet variables and contact forms with the given jet
/// budgets, at most `max_weight` factors and at most `max_theta` contact
/// factors. Odd generators appear at most once. No `dx` factors.
pub fn enumerate_monomials(ctx: &JetContext, budgets: &[u32], max_weight: u32, max_theta: u32) -> Vec<Monomial> {
    let mut gens = Vec::new();
    for (a, &b) in budgets.iter().enumerate() {
        for sigma in MultiIndex::up_to_order(ctx.dim(), b) {
            gens.push(ctx.jet_symbol(a, sigma.clone()));
            if max_theta > 0 {
                gens.push(ctx.theta_symbol(a, sigma));
            }
        }
    }
    gens.sort();
    let mut out = Vec::new();
    let mut current = Vec::new();
    extend(&gens, 0, max_weight, max_theta, &mut current, &mut out);
    out
}

fn extend(
    gens: &[Symbol],
    start: usize,
    weight_left: u32,
    theta_left: u32,
    current: &mut Vec<(Symbol, u32)>,
    out: &mut Vec<Monomial>,
) {
    out.push(Monomial::from_sorted(current.clone()));
    if weight_left == 0 {
        return;
    }
    for (i, g) in gens.iter().enumerate().skip(start) {
        let is_theta = matches!(g, Symbol::Theta(..));
        if is_theta && theta_left == 0 {
            continue;
        }
        let max_e = if g.is_odd() { 1 } else { weight_left };
        let max_e = if is_theta { max_e.min(theta_left) } else { max_e };
        for e in 1..=max_e {
            current.push((g.clone(), e));
            extend(
                gens,
                i + 1,
                weight_left - e,
                if is_theta { theta_left - e } else { theta_left },
                current,
                out,
            );
            current.pop();
        }
    }
}

fn subsets(n: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if (lo..=hi).contains(&set.len()) {
            out.push(set);
        }
    }
    out.sort();
    out
}

/// Betti numbers of a bounded truncation of the chosen differential.
pub fn bounded_cohomology(ctx: &JetContext, diff: Differential, trunc: Truncation) -> Result<BettiTable> {
    Ok(BoundedComplex::new(ctx, diff, trunc)?.betti_table())
}
