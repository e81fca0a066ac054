use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::One;

/// Unordered derivative multi-index: one count per base coordinate.
///
/// Total derivatives commute, so `D_t D_x` and `D_x D_t` share the same
/// index `[1, 1]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u16>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn from_counts(counts: Vec<u16>) -> Self {
        MultiIndex(counts)
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = Self::zero(n);
        m.0[i] = 1;
        m
    }

    pub fn counts(&self) -> &[u16] {
        &self.0
    }

    /// Number of base coordinates this index ranges over.
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|&c| c as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn raised(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.0[i] += 1;
        m
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<Self> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Product of per-coordinate binomials `C(self_i, sub_i)`.
    pub fn binomial(&self, sub: &MultiIndex) -> BigInt {
        self.0.iter().zip(&sub.0).fold(BigInt::one(), |acc, (&n, &k)| {
            acc * binomial(BigInt::from(n), BigInt::from(k))
        })
    }

    /// Every multi-index `tau <= self`, in canonical order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &c in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=c).map(move |k| {
                        let mut p = prefix.clone();
                        p.push(k);
                        p
                    })
                })
                .collect();
        }
        let mut out: Vec<_> = out.into_iter().map(MultiIndex).collect();
        out.sort();
        out
    }

    /// All multi-indices over `n` coordinates of order at most `k`, sorted.
    pub fn up_to_order(n: usize, k: u32) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(n)];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u16>| {
                    let used: u32 = prefix.iter().map(|&c| c as u32).sum();
                    (0..=(k - used) as u16).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        let mut out: Vec<_> = out.into_iter().map(MultiIndex).collect();
        out.sort();
        out
    }
}

/// Graded order: lower total order first, then earlier coordinates first
/// (`u_t` before `u_x` for base `(t, x)`).
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
