use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Symbol;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Sorted product of generators. Odd generators appear with exponent 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn from_symbol(s: Symbol) -> Self {
        Monomial(vec![(s, 1)])
    }

    /// Builds a monomial from factors that are already sorted and reduced.
    pub(crate) fn from_sorted(factors: Vec<(Symbol, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        Monomial(factors)
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.0.iter().filter(|(s, e)| s.is_odd() && e % 2 == 1).count() % 2 == 1
    }

    pub fn ghost(&self) -> i32 {
        self.0.iter().map(|(s, e)| s.ghost() * *e as i32).sum()
    }

    /// `(p, q)`: number of `dx` and contact factors.
    pub fn form_degree(&self) -> (usize, usize) {
        self.0.iter().fold((0, 0), |(p, q), (s, e)| match s {
            Symbol::Dx(_) => (p + *e as usize, q),
            Symbol::Theta(..) => (p, q + *e as usize),
            _ => (p, q),
        })
    }

    /// Jet-variable factors plus contact factors, with multiplicity.
    pub fn weight(&self) -> u32 {
        self.0
            .iter()
            .filter(|(s, _)| matches!(s, Symbol::Jet(..) | Symbol::Theta(..)))
            .map(|(_, e)| e)
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.0
            .binary_search_by(|(t, _)| t.cmp(s))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// Splits into the coefficient part (base and jet factors) and the
    /// form part (`dx` and contact factors). No sign arises: the coefficient
    /// part already precedes the form part.
    pub fn split_form(&self) -> (Monomial, Monomial) {
        let k = self.0.iter().position(|(s, _)| s.is_form()).unwrap_or(self.0.len());
        (Monomial(self.0[..k].to_vec()), Monomial(self.0[k..].to_vec()))
    }

    /// Graded product. Returns `None` when an odd generator would repeat,
    /// otherwise the product and whether the Koszul sign is negative.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let a = &self.0;
        let b = &other.0;
        // odd_suffix[i] = number of odd factors in a[i..]
        let mut odd_suffix = vec![0usize; a.len() + 1];
        for i in (0..a.len()).rev() {
            odd_suffix[i] = odd_suffix[i + 1] + usize::from(a[i].0.is_odd());
        }
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut negative = false;
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() {
                out.push(a[i].clone());
                i += 1;
                continue;
            }
            if i == a.len() {
                out.push(b[j].clone());
                j += 1;
                continue;
            }
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    if b[j].0.is_odd() && odd_suffix[i] % 2 == 1 {
                        negative = !negative;
                    }
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if a[i].0.is_odd() {
                        return None;
                    }
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        Some((Monomial(out), negative))
    }
}

/// Exact-rational polynomial in graded-commuting generators.
///
/// Elements without form generators are differential polynomials; the
/// same type carries horizontal and contact forms, wrapped by
/// [`crate::forms::BiForm`]. Zero coefficients are never stored, so
/// structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_monomial(Monomial::one(), c)
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(rat(n))
    }

    pub fn from_symbol(s: Symbol) -> Self {
        Self::from_monomial(Monomial::from_symbol(s), Rational::one())
    }

    pub fn from_monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// The constant value, if the polynomial has no generators.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut out = DiffPoly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Ghost number if every term agrees on it; zero is homogeneous of any
    /// ghost and reports `None`.
    pub fn ghost(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(Monomial::ghost);
        let g = it.next()?;
        it.all(|h| h == g).then_some(g)
    }

    pub fn is_ghost_homogeneous(&self) -> bool {
        self.is_zero() || self.ghost().is_some()
    }

    /// Koszul parity if homogeneous (`None` for zero or mixed parity).
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(Monomial::is_odd);
        let p = it.next()?;
        it.all(|h| h == p).then_some(p)
    }

    /// Splits into even and odd parts.
    pub fn split_parity(&self) -> (DiffPoly, DiffPoly) {
        let (odd, even): (BTreeMap<_, _>, BTreeMap<_, _>) = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.clone()))
            .partition(|(m, _)| m.is_odd());
        (DiffPoly { terms: even }, DiffPoly { terms: odd })
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(s, _)| s.clone()))
            .collect()
    }

    pub fn has_form_symbols(&self) -> bool {
        self.terms.keys().any(|m| m.factors().iter().any(|(s, _)| s.is_form()))
    }

    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies the parity-preserving algebra homomorphism that sends each
    /// generator `s` to `image(s)`, or leaves it fixed when `image` returns
    /// `None`.
    pub fn substitute(&self, mut image: impl FnMut(&Symbol) -> Option<DiffPoly>) -> DiffPoly {
        let mut cache: HashMap<Symbol, Option<DiffPoly>> = HashMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = DiffPoly::constant(c.clone());
            for (s, e) in m.factors() {
                let img = cache.entry(s.clone()).or_insert_with(|| image(s)).clone();
                let factor = img.unwrap_or_else(|| DiffPoly::from_symbol(s.clone()));
                acc = &acc * &factor.pow(*e);
                if acc.is_zero() {
                    break;
                }
            }
            out += acc;
        }
        out
    }

    /// Applies the graded left derivation of the given parity that sends
    /// each generator `s` to `image(s)` (`None` meaning zero).
    ///
    /// On a monomial `s_1 ... s_k` the derivation acts as
    /// `sum_j (-1)^{|d| (|s_1| + ... + |s_{j-1}|)} s_1 ... d(s_j) ... s_k`.
    pub fn derive(&self, odd: bool, mut image: impl FnMut(&Symbol) -> Option<DiffPoly>) -> DiffPoly {
        let mut cache: HashMap<Symbol, Option<DiffPoly>> = HashMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let factors = m.factors();
            let mut prefix_odd = false;
            for (j, (s, e)) in factors.iter().enumerate() {
                let img = cache.entry(s.clone()).or_insert_with(|| image(s));
                if let Some(v) = img.as_ref().filter(|v| !v.is_zero()) {
                    let mut coeff = c * rat(*e as i64);
                    if odd && prefix_odd {
                        coeff = -coeff;
                    }
                    let prefix = Monomial(factors[..j].to_vec());
                    let mut rest = Vec::with_capacity(factors.len() - j);
                    if *e > 1 {
                        rest.push((s.clone(), e - 1));
                    }
                    rest.extend_from_slice(&factors[j + 1..]);
                    let left = DiffPoly::from_monomial(prefix, coeff);
                    let right = DiffPoly::from_monomial(Monomial(rest), Rational::one());
                    out += &(&left * v) * &right;
                }
                if s.is_odd() && e % 2 == 1 {
                    prefix_odd = !prefix_odd;
                }
            }
        }
        out
    }
}

impl From<Symbol> for DiffPoly {
    fn from(s: Symbol) -> Self {
        DiffPoly::from_symbol(s)
    }
}

impl From<Rational> for DiffPoly {
    fn from(c: Rational) -> Self {
        DiffPoly::constant(c)
    }
}

impl AddAssign<DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: DiffPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl SubAssign<DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: DiffPoly) {
        *self -= &rhs;
    }
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for DiffPoly {
    type Output = DiffPoly;
    fn add(mut self, rhs: DiffPoly) -> DiffPoly {
        self += rhs;
        self
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for DiffPoly {
    type Output = DiffPoly;
    fn sub(mut self, rhs: DiffPoly) -> DiffPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(mut self) -> DiffPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if let Some((m, negative)) = ma.mul(mb) {
                    let c = ca * cb;
                    out.add_term(m, if negative { -c } else { c });
                }
            }
        }
        out
    }
}

impl Mul for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetalg::{FieldRef, MultiIndex};

    fn odd(i: u16) -> Symbol {
        Symbol::Jet(FieldRef { index: i, ghost: 1 }, MultiIndex::zero(1))
    }

    #[test]
    fn odd_generators_anticommute() {
        let c1 = DiffPoly::from_symbol(odd(0));
        let c2 = DiffPoly::from_symbol(odd(1));
        assert!((&c1 * &c1).is_zero());
        assert_eq!(&c2 * &c1, -(&c1 * &c2));
    }

    #[test]
    fn left_derivative_sign() {
        // d/dc2 (c1 c2) = -c1 for odd c1, c2
        let c1 = DiffPoly::from_symbol(odd(0));
        let c2 = DiffPoly::from_symbol(odd(1));
        let target = odd(1);
        let d = (&c1 * &c2).derive(true, |s| (*s == target).then(DiffPoly::one));
        assert_eq!(d, -c1);
    }
}
