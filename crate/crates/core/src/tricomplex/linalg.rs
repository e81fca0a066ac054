//! Exact sparse elimination over the rationals.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::jetalg::Rational;

/// Sparse vector: index to nonzero coefficient.
pub type SparseVec = BTreeMap<usize, Rational>;

fn axpy(y: &mut SparseVec, a: &Rational, x: &SparseVec) {
    for (i, v) in x {
        let entry = y.entry(*i).or_insert_with(Rational::zero);
        *entry += a * v;
        if entry.is_zero() {
            y.remove(i);
        }
    }
}

/// Incremental column echelon form. Each inserted vector is reduced against
/// the stored pivots; a vector that reduces to zero yields a dependency.
#[derive(Default, Clone, Debug)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` to its normal form modulo the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let mut cursor = 0usize;
        while let Some((lead, coeff)) = v.range(cursor..).next().map(|(&k, c)| (k, c.clone())) {
            match self.pivots.get(&lead) {
                Some(p) => {
                    let factor = -(coeff / &p[&lead]);
                    axpy(&mut v, &factor, p);
                }
                None => cursor = lead + 1,
            }
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts `v`, returning `true` when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(&v);
        match r.keys().next() {
            Some(&lead) => {
                self.pivots.insert(lead, r);
                true
            }
            None => false,
        }
    }
}

/// Rank and kernel of a linear map given by its column images.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub rank: usize,
    /// Kernel basis, in source coordinates.
    pub kernel: Vec<SparseVec>,
}

/// Eliminates the columns, tracking combinations so that dependencies give
/// a kernel basis.
pub fn eliminate(columns: &[SparseVec]) -> Elimination {
    let blocks = split_blocks(columns);
    let parts: Vec<Elimination> = blocks.par_iter().map(|cols| eliminate_block(columns, cols)).collect();
    let mut rank = 0;
    let mut kernel = Vec::new();
    for part in parts {
        rank += part.rank;
        kernel.extend(part.kernel);
    }
    kernel.sort_by(|a, b| a.keys().next().cmp(&b.keys().next()));
    Elimination { rank, kernel }
}

fn eliminate_block(columns: &[SparseVec], cols: &[usize]) -> Elimination {
    let mut pivots: BTreeMap<usize, SparseVec> = BTreeMap::new();
    let mut combos: BTreeMap<usize, SparseVec> = BTreeMap::new();
    let mut kernel = Vec::new();
    for &j in cols {
        let mut v = columns[j].clone();
        let mut combo: SparseVec = BTreeMap::new();
        combo.insert(j, Rational::from_integer(1.into()));
        let mut cursor = 0usize;
        while let Some((lead, coeff)) = v.range(cursor..).next().map(|(&k, c)| (k, c.clone())) {
            match pivots.get(&lead) {
                Some(p) => {
                    let factor = -(coeff / &p[&lead]);
                    axpy(&mut v, &factor, p);
                    axpy(&mut combo, &factor, &combos[&lead]);
                }
                None => cursor = lead + 1,
            }
        }
        match v.keys().next() {
            Some(&lead) => {
                pivots.insert(lead, v);
                combos.insert(lead, combo);
            }
            None => kernel.push(combo),
        }
    }
    Elimination {
        rank: pivots.len(),
        kernel,
    }
}

/// Groups columns into connected components of the row/column incidence
/// graph; components can be eliminated independently. Zero columns form
/// singleton blocks. Blocks come out ordered by their first column.
fn split_blocks(columns: &[SparseVec]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..columns.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for &row in col.keys() {
            match owner.get(&row) {
                Some(&k) => {
                    let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                None => {
                    owner.insert(row, j);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for j in 0..columns.len() {
        let root = find(&mut parent, j);
        groups.entry(root).or_default().push(j);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetalg::rat;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(i, c)| (i, rat(c))).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let cols = vec![v(&[(0, 1), (1, 2)]), v(&[(0, 2), (1, 4)]), v(&[(2, 1)]), v(&[])];
        let e = eliminate(&cols);
        assert_eq!(e.rank, 2);
        assert_eq!(e.kernel.len(), 2);
        for k in &e.kernel {
            let mut image = SparseVec::new();
            for (j, c) in k {
                axpy(&mut image, c, &cols[*j]);
            }
            assert!(image.is_empty());
        }
    }

    #[test]
    fn echelon_membership() {
        let mut ech = Echelon::new();
        assert!(ech.insert(v(&[(0, 1), (1, 1)])));
        assert!(ech.insert(v(&[(1, 1), (2, 1)])));
        assert!(!ech.insert(v(&[(0, 1), (2, -1)])));
        assert!(ech.contains(&v(&[(0, 2), (1, 3), (2, 1)])));
        assert!(!ech.contains(&v(&[(2, 1)])));
        assert_eq!(ech.rank(), 2);
    }
}
