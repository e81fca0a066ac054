use std::collections::BTreeMap;
use std::fmt;

use super::delta::InternalDifferential;
use crate::error::{Error, Result};
use crate::forms::{BiForm, FormDegree};

/// A truncated key `(theta_N^{(p,q)} | theta_{N-1}^{(p+1,q)} + theta_{N-1}^{(p,q+1)} | ...)`.
/// Component `(r, a)` is `theta_{N-r}^{(p+a, q+r-a)}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormKey {
    pub degree: i32,
    pub p: usize,
    pub q: usize,
    pub depth: usize,
    components: BTreeMap<(usize, usize), BiForm>,
}

impl FormKey {
    pub fn new(degree: i32, p: usize, q: usize, depth: usize) -> Self {
        FormKey {
            degree,
            p,
            q,
            depth,
            components: BTreeMap::new(),
        }
    }

    /// Tri-degree required of component `(r, a)`.
    pub fn slot_degree(&self, r: usize, a: usize) -> FormDegree {
        FormDegree {
            p: self.p + a,
            q: self.q + r - a,
            gh: self.degree - r as i32,
        }
    }

    pub fn set(&mut self, r: usize, a: usize, w: BiForm) -> Result<()> {
        if r > self.depth || a > r {
            return Err(Error::MalformedKey(format!(
                "no slot ({r}, {a}) at depth {}",
                self.depth
            )));
        }
        if !w.is_zero() {
            let want = self.slot_degree(r, a);
            for (deg, _) in w.tri_components() {
                if deg != want {
                    return Err(Error::MalformedKey(format!(
                        "slot ({r}, {a}) needs tri-degree ({}, {}, {}), found ({}, {}, {})",
                        want.p, want.q, want.gh, deg.p, deg.q, deg.gh
                    )));
                }
            }
        }
        if w.is_zero() {
            self.components.remove(&(r, a));
        } else {
            self.components.insert((r, a), w);
        }
        Ok(())
    }

    pub fn get(&self, r: usize, a: usize) -> BiForm {
        self.components.get(&(r, a)).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &BiForm)> {
        self.components.iter()
    }

    /// All slots `(r, a)` up to the depth whose horizontal degree fits in
    /// dimension `n`.
    pub fn slots(&self, n: usize) -> Vec<(usize, usize)> {
        (0..=self.depth)
            .flat_map(|r| (0..=r).map(move |a| (r, a)))
            .filter(|&(_, a)| self.p + a <= n)
            .collect()
    }

    /// The same key cut down to a smaller depth.
    pub fn truncated(&self, depth: usize) -> FormKey {
        FormKey {
            degree: self.degree,
            p: self.p,
            q: self.q,
            depth: depth.min(self.depth),
            components: self
                .components
                .iter()
                .filter(|((r, _), _)| *r <= depth)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.p > n {
            return Err(Error::MalformedKey(format!("p = {} exceeds dimension {n}", self.p)));
        }
        for (&(r, a), w) in &self.components {
            if self.p + a > n && !w.is_zero() {
                return Err(Error::MalformedKey(format!("slot ({r}, {a}) exceeds dimension {n}")));
            }
        }
        Ok(())
    }
}

/// Which operator a relation term applies.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KeyOp {
    Horizontal,
    Vertical,
    Internal,
}

/// One term `op theta_{N-r}^{(p+a, q+r-a)}` of a closure relation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RelationTerm {
    pub op: KeyOp,
    pub r: usize,
    pub a: usize,
}

/// Relation `index` at output slot `a`: the component of `D(key)` of ghost
/// `N - index + 1` and bidegree `(p + a, q + index - a)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    pub index: usize,
    pub a: usize,
    pub terms: Vec<RelationTerm>,
}

fn offset(symbol: &str, k: i64) -> String {
    match k {
        0 => symbol.to_string(),
        k if k > 0 => format!("{symbol}+{k}"),
        k => format!("{symbol}{k}"),
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let op = match t.op {
                    KeyOp::Horizontal => "d_h",
                    KeyOp::Vertical => "d_v",
                    KeyOp::Internal => "delta",
                };
                format!(
                    "{op} theta_{{{}}}^{{({},{})}}",
                    offset("N", -(t.r as i64)),
                    offset("p", t.a as i64),
                    offset("q", (t.r - t.a) as i64)
                )
            })
            .collect();
        write!(f, "{} = 0", parts.join(" + "))
    }
}

/// The closure relations of a key through the given depth, ordered by index
/// and, within an index, by decreasing vertical shift.
pub fn relation_list(depth: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    for index in 0..=depth {
        for b in (0..=index).rev() {
            let a = index - b;
            let mut terms = Vec::new();
            if index > 0 && a > 0 {
                terms.push(RelationTerm {
                    op: KeyOp::Horizontal,
                    r: index - 1,
                    a: a - 1,
                });
            }
            if index > 0 && b > 0 {
                terms.push(RelationTerm {
                    op: KeyOp::Vertical,
                    r: index - 1,
                    a,
                });
            }
            terms.push(RelationTerm {
                op: KeyOp::Internal,
                r: index,
                a,
            });
            out.push(Relation { index, a, terms });
        }
    }
    out
}

/// How the boundary relations at depth `R + 1` are treated.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClosureMode {
    /// Boundary relations must hold with the missing terms read as zero.
    Strict,
    /// Boundary relations are reported but not required.
    ToDepth,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RelationStatus {
    Holds,
    Fails,
    Unresolved,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RelationResult {
    pub relation: Relation,
    pub residue: BiForm,
    pub status: RelationStatus,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosureReport {
    pub mode: ClosureMode,
    pub results: Vec<RelationResult>,
}

impl ClosureReport {
    pub fn closed(&self) -> bool {
        self.results.iter().all(|r| r.status != RelationStatus::Fails)
    }

    pub fn first_failure(&self) -> Option<&RelationResult> {
        self.results.iter().find(|r| r.status == RelationStatus::Fails)
    }
}

fn apply(op: KeyOp, w: &BiForm, delta: &InternalDifferential) -> BiForm {
    match op {
        KeyOp::Horizontal => w.d_h(delta.context()),
        KeyOp::Vertical => w.d_v(),
        KeyOp::Internal => delta.apply_form(w),
    }
}

fn evaluate(key: &FormKey, rel: &Relation, delta: &InternalDifferential) -> BiForm {
    let mut out = BiForm::zero();
    for t in &rel.terms {
        if t.r <= key.depth {
            out += &apply(t.op, &key.get(t.r, t.a), delta);
        }
    }
    out
}

/// Checks the closure relations of a key under `D = d_h + d_v + delta`.
pub fn closure_check(key: &FormKey, delta: &InternalDifferential, mode: ClosureMode) -> Result<ClosureReport> {
    delta.require_square_zero()?;
    let n = delta.context().dim();
    key.validate(n)?;
    let mut results = Vec::new();
    for rel in relation_list(key.depth + 1) {
        if key.p + rel.a > n {
            continue;
        }
        let residue = evaluate(key, &rel, delta);
        let boundary = rel.index == key.depth + 1;
        let status = match (residue.is_zero(), boundary, mode) {
            (true, _, _) => RelationStatus::Holds,
            (false, true, ClosureMode::ToDepth) => RelationStatus::Unresolved,
            (false, _, _) => RelationStatus::Fails,
        };
        results.push(RelationResult {
            relation: rel,
            residue,
            status,
        });
    }
    Ok(ClosureReport { mode, results })
}

/// `D` applied to a key: a key of degree `N + 1` and the same depth, whose
/// component `(r, a)` is relation `r` at slot `a` evaluated on the input.
pub fn key_differential(key: &FormKey, delta: &InternalDifferential) -> Result<FormKey> {
    delta.require_square_zero()?;
    let n = delta.context().dim();
    key.validate(n)?;
    let mut out = FormKey::new(key.degree + 1, key.p, key.q, key.depth);
    for rel in relation_list(key.depth) {
        if key.p + rel.a > n {
            continue;
        }
        out.set(rel.index, rel.a, evaluate(key, &rel, delta))?;
    }
    Ok(out)
}
