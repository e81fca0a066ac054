use super::MultiIndex;

/// A declared field as seen from inside a polynomial: its position in the
/// context plus its ghost number, so that parities are known without a
/// context lookup.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FieldRef {
    pub index: u16,
    pub ghost: i32,
}

impl FieldRef {
    pub fn is_odd(&self) -> bool {
        self.ghost.rem_euclid(2) == 1
    }
}

/// Generators of the graded form algebra over the jet space.
///
/// The derived order puts base coordinates first, then jet variables
/// (by field, then graded multi-index), then `dx^i`, then contact forms.
/// Canonical monomials are sorted in this order, so every term reads as
/// `coefficient * dx^I ^ theta^J`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Symbol {
    Base(u16),
    Jet(FieldRef, MultiIndex),
    Dx(u16),
    Theta(FieldRef, MultiIndex),
}

impl Symbol {
    /// Koszul parity of the symbol (total degree mod 2).
    pub fn is_odd(&self) -> bool {
        match self {
            Symbol::Base(_) => false,
            Symbol::Jet(f, _) => f.is_odd(),
            Symbol::Dx(_) => true,
            Symbol::Theta(f, _) => !f.is_odd(),
        }
    }

    pub fn ghost(&self) -> i32 {
        match self {
            Symbol::Base(_) | Symbol::Dx(_) => 0,
            Symbol::Jet(f, _) | Symbol::Theta(f, _) => f.ghost,
        }
    }

    pub fn is_form(&self) -> bool {
        matches!(self, Symbol::Dx(_) | Symbol::Theta(..))
    }

    pub fn field(&self) -> Option<FieldRef> {
        match self {
            Symbol::Jet(f, _) | Symbol::Theta(f, _) => Some(*f),
            _ => None,
        }
    }

    pub fn multi_index(&self) -> Option<&MultiIndex> {
        match self {
            Symbol::Jet(_, s) | Symbol::Theta(_, s) => Some(s),
            _ => None,
        }
    }

    /// The symbol after one more total derivative in direction `i`, if the
    /// symbol carries a multi-index.
    pub fn shifted(&self, i: usize) -> Option<Symbol> {
        match self {
            Symbol::Jet(f, s) => Some(Symbol::Jet(*f, s.raised(i))),
            Symbol::Theta(f, s) => Some(Symbol::Theta(*f, s.raised(i))),
            _ => None,
        }
    }
}
