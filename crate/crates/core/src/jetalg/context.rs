use std::collections::HashSet;

use super::{DiffPoly, FieldRef, MultiIndex, Symbol};
use crate::error::{Error, Result};

/// A dependent variable together with its ghost number.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldDecl {
    pub name: String,
    pub ghost: i32,
    /// For antifields: index of the field this one is conjugate to.
    pub antifield_of: Option<usize>,
}

impl FieldDecl {
    pub fn new(name: impl Into<String>, ghost: i32) -> Self {
        FieldDecl {
            name: name.into(),
            ghost,
            antifield_of: None,
        }
    }

    pub fn antifield(name: impl Into<String>, ghost: i32, of: usize) -> Self {
        FieldDecl {
            name: name.into(),
            ghost,
            antifield_of: Some(of),
        }
    }

    pub fn is_odd(&self) -> bool {
        self.ghost.rem_euclid(2) == 1
    }
}

/// Base coordinates and graded field content of a jet space.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct JetContext {
    base: Vec<String>,
    fields: Vec<FieldDecl>,
}

pub(crate) fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
        && !matches!(name, "dx" | "th" | "d")
}

impl JetContext {
    pub fn new(base: Vec<String>, fields: Vec<FieldDecl>) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::InvalidContext("at least one base coordinate is required".into()));
        }
        let mut seen = HashSet::new();
        for name in base.iter().chain(fields.iter().map(|f| &f.name)) {
            if !valid_identifier(name) {
                return Err(Error::InvalidContext(format!("`{name}` is not a valid identifier")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidContext(format!("name `{name}` declared twice")));
            }
        }
        for (i, f) in fields.iter().enumerate() {
            if let Some(j) = f.antifield_of {
                let partner = fields.get(j).ok_or_else(|| {
                    Error::InvalidContext(format!("`{}` is the antifield of an unknown field", f.name))
                })?;
                if j == i || partner.antifield_of.is_some() {
                    return Err(Error::InvalidContext(format!(
                        "`{}` must be conjugate to a non-antifield",
                        f.name
                    )));
                }
                if f.ghost != -1 - partner.ghost {
                    return Err(Error::GhostMismatch(format!(
                        "antifield `{}` must have ghost {}",
                        f.name,
                        -1 - partner.ghost
                    )));
                }
            }
        }
        let mut partners = HashSet::new();
        if !fields.iter().filter_map(|f| f.antifield_of).all(|j| partners.insert(j)) {
            return Err(Error::InvalidContext("a field has two antifields".into()));
        }
        Ok(JetContext { base, fields })
    }

    /// Base coordinates only, no fields.
    pub fn base_only(base: Vec<String>) -> Result<Self> {
        Self::new(base, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base_names(&self) -> &[String] {
        &self.base
    }

    pub fn fields(&self) -> &[FieldDecl] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> &FieldDecl {
        &self.fields[i]
    }

    pub fn num_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn base_index(&self, name: &str) -> Option<usize> {
        self.base.iter().position(|b| b == name)
    }

    pub fn field_ref(&self, i: usize) -> FieldRef {
        FieldRef {
            index: i as u16,
            ghost: self.fields[i].ghost,
        }
    }

    /// Context with extra fields appended.
    pub fn extended(&self, extra: impl IntoIterator<Item = FieldDecl>) -> Result<Self> {
        let mut fields = self.fields.clone();
        fields.extend(extra);
        Self::new(self.base.clone(), fields)
    }

    /// `(field, antifield)` index pairs.
    pub fn antifield_pairs(&self) -> Vec<(usize, usize)> {
        self.fields
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.antifield_of.map(|j| (j, i)))
            .collect()
    }

    pub fn antifield_of(&self, field: usize) -> Option<usize> {
        self.fields.iter().position(|f| f.antifield_of == Some(field))
    }

    pub fn x(&self, i: usize) -> DiffPoly {
        DiffPoly::from_symbol(Symbol::Base(i as u16))
    }

    pub fn zero_index(&self) -> MultiIndex {
        MultiIndex::zero(self.dim())
    }

    pub fn jet_symbol(&self, field: usize, sigma: MultiIndex) -> Symbol {
        debug_assert_eq!(sigma.dim(), self.dim());
        Symbol::Jet(self.field_ref(field), sigma)
    }

    pub fn theta_symbol(&self, field: usize, sigma: MultiIndex) -> Symbol {
        debug_assert_eq!(sigma.dim(), self.dim());
        Symbol::Theta(self.field_ref(field), sigma)
    }

    pub fn jet(&self, field: usize, counts: &[u16]) -> DiffPoly {
        DiffPoly::from_symbol(self.jet_symbol(field, MultiIndex::from_counts(counts.to_vec())))
    }

    /// The undifferentiated field `u^A`.
    pub fn u(&self, field: usize) -> DiffPoly {
        DiffPoly::from_symbol(self.jet_symbol(field, self.zero_index()))
    }

    pub fn dx(&self, i: usize) -> DiffPoly {
        DiffPoly::from_symbol(Symbol::Dx(i as u16))
    }

    pub fn theta(&self, field: usize, counts: &[u16]) -> DiffPoly {
        DiffPoly::from_symbol(self.theta_symbol(field, MultiIndex::from_counts(counts.to_vec())))
    }

    /// `dx^0 ^ ... ^ dx^{n-1}`.
    pub fn volume(&self) -> DiffPoly {
        (0..self.dim()).fold(DiffPoly::one(), |acc, i| &acc * &self.dx(i))
    }

    /// Checks that a symbol refers to something declared here.
    pub fn declares(&self, s: &Symbol) -> bool {
        match s {
            Symbol::Base(i) | Symbol::Dx(i) => (*i as usize) < self.dim(),
            Symbol::Jet(f, sigma) | Symbol::Theta(f, sigma) => {
                (f.index as usize) < self.fields.len()
                    && self.fields[f.index as usize].ghost == f.ghost
                    && sigma.dim() == self.dim()
            }
        }
    }

    pub fn check_declared(&self, p: &DiffPoly) -> Result<()> {
        match p.symbols().into_iter().find(|s| !self.declares(s)) {
            Some(s) => Err(Error::UndeclaredGenerator(format!("{s:?}"))),
            None => Ok(()),
        }
    }
}
