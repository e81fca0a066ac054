use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jetalg::{DiffPoly, JetContext, MultiIndex, Rational, Symbol};

/// A matrix of linear operators in total derivatives,
/// `(P g)_r = sum_{A, sigma} P[r, A, sigma] * D_sigma(g^A)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TotalDiffOperator {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize, MultiIndex), DiffPoly>,
}

impl TotalDiffOperator {
    pub fn zero(rows: usize, cols: usize) -> Self {
        TotalDiffOperator {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, MultiIndex), &DiffPoly)> {
        self.entries.iter()
    }

    pub fn entry(&self, row: usize, col: usize, sigma: &MultiIndex) -> DiffPoly {
        self.entries
            .get(&(row, col, sigma.clone()))
            .cloned()
            .unwrap_or_default()
    }

    /// Adds `coeff * D_sigma` to entry `(row, col)`.
    pub fn add_entry(&mut self, row: usize, col: usize, sigma: MultiIndex, coeff: DiffPoly) {
        assert!(row < self.rows && col < self.cols, "operator index out of range");
        let key = (row, col, sigma);
        let sum = self.entries.remove(&key).unwrap_or_default() + coeff;
        if !sum.is_zero() {
            self.entries.insert(key, sum);
        }
    }

    pub fn apply(&self, g: &[DiffPoly]) -> Result<Vec<DiffPoly>> {
        if g.len() != self.cols {
            return Err(Error::ComponentCount {
                expected: self.cols,
                found: g.len(),
            });
        }
        let mut out = vec![DiffPoly::zero(); self.rows];
        for ((r, a, sigma), c) in &self.entries {
            out[*r] += c * &g[*a].prolong_derivative(sigma);
        }
        Ok(out)
    }

    /// Formal adjoint: `(P^dagger f)_A = sum_sigma (-1)^|sigma| D_sigma(P[r, A, sigma] f_r)`.
    pub fn adjoint(&self) -> TotalDiffOperator {
        let mut out = TotalDiffOperator::zero(self.cols, self.rows);
        for ((r, a, sigma), c) in &self.entries {
            let sign = if sigma.order() % 2 == 0 { 1 } else { -1 };
            for tau in sigma.sub_indices() {
                let rest = sigma.checked_sub(&tau).expect("sub-index");
                let binom = Rational::from_integer(sigma.binomial(&tau) * sign);
                out.add_entry(*a, *r, tau, c.prolong_derivative(&rest).scale(&binom));
            }
        }
        out
    }

    /// Reads an operator from expressions linear in the jets of the
    /// `sources` fields, which must be even placeholders declared after
    /// every field the coefficients use.
    pub fn from_linear(ctx: &JetContext, rows: &[DiffPoly], sources: &[usize]) -> Result<Self> {
        for &s in sources {
            if ctx.field(s).is_odd() {
                return Err(Error::Shape(format!(
                    "placeholder `{}` must be even",
                    ctx.field(s).name
                )));
            }
        }
        let mut out = TotalDiffOperator::zero(rows.len(), sources.len());
        for (r, row) in rows.iter().enumerate() {
            for (m, c) in row.terms() {
                let mut hit = None;
                let mut rest = Vec::new();
                for (s, e) in m.factors() {
                    let col = match s {
                        Symbol::Jet(f, _) => sources.iter().position(|&x| x == f.index as usize),
                        _ => None,
                    };
                    match col {
                        Some(col) if *e == 1 && hit.is_none() => {
                            hit = Some((col, s.multi_index().expect("jet").clone()));
                        }
                        Some(_) => return Err(Error::Shape(format!("row {r} is not linear in the placeholders"))),
                        None => rest.push((s.clone(), *e)),
                    }
                }
                let (col, sigma) =
                    hit.ok_or_else(|| Error::Shape(format!("row {r} has a term without a placeholder")))?;
                let coeff = DiffPoly::from_monomial(crate::jetalg::Monomial::from_sorted(rest), c.clone());
                out.add_entry(r, col, sigma, coeff);
            }
        }
        Ok(out)
    }
}

/// Linearization `l_F[r, A, sigma] = dF_r / du^A_sigma`.
pub fn frechet_derivative(ctx: &JetContext, f: &[DiffPoly]) -> TotalDiffOperator {
    let mut out = TotalDiffOperator::zero(f.len(), ctx.num_fields());
    for (r, fr) in f.iter().enumerate() {
        for s in fr.jet_symbols() {
            if let Symbol::Jet(field, sigma) = &s {
                out.add_entry(r, field.index as usize, sigma.clone(), fr.partial_derivative(&s));
            }
        }
    }
    out
}

pub fn adjoint_operator(p: &TotalDiffOperator) -> TotalDiffOperator {
    p.adjoint()
}

/// Variationality test: the linearization is formally self-adjoint.
pub fn helmholtz_check(ctx: &JetContext, f: &[DiffPoly]) -> bool {
    if f.len() != ctx.num_fields() {
        return false;
    }
    let l = frechet_derivative(ctx, f);
    l == l.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::jetalg::FieldDecl;

    fn ctx() -> JetContext {
        JetContext::new(vec!["x".into()], vec![FieldDecl::new("u", 0)]).unwrap()
    }

    fn dx_op(ctx: &JetContext, coeff: &str) -> TotalDiffOperator {
        let mut p = TotalDiffOperator::zero(1, 1);
        p.add_entry(0, 0, MultiIndex::unit(1, 0), parse(ctx, coeff).unwrap());
        p
    }

    #[test]
    fn frechet_examples() {
        let ctx = ctx();
        let l = frechet_derivative(&ctx, &[parse(&ctx, "u_xx").unwrap()]);
        assert_eq!(l.entry(0, 0, &MultiIndex::from_counts(vec![2])), DiffPoly::one());
        assert_eq!(l.entries().count(), 1);
        let l = frechet_derivative(&ctx, &[parse(&ctx, "u*u_x").unwrap()]);
        assert_eq!(l.entry(0, 0, &MultiIndex::zero(1)), parse(&ctx, "u_x").unwrap());
        assert_eq!(l.entry(0, 0, &MultiIndex::unit(1, 0)), parse(&ctx, "u").unwrap());
        assert!(frechet_derivative(&ctx, &[parse(&ctx, "x").unwrap()]).is_zero());
    }

    #[test]
    fn adjoint_examples() {
        let ctx = ctx();
        assert_eq!(dx_op(&ctx, "1").adjoint(), dx_op(&ctx, "-1"));
        let mut expected = dx_op(&ctx, "-u");
        expected.add_entry(0, 0, MultiIndex::zero(1), parse(&ctx, "-u_x").unwrap());
        assert_eq!(dx_op(&ctx, "u").adjoint(), expected);
        let mut d2 = TotalDiffOperator::zero(1, 1);
        d2.add_entry(0, 0, MultiIndex::from_counts(vec![2]), DiffPoly::one());
        assert_eq!(d2.adjoint(), d2);
    }

    #[test]
    fn helmholtz_examples() {
        let ctx = ctx();
        assert!(helmholtz_check(&ctx, &[parse(&ctx, "-u_xx + u").unwrap()]));
        assert!(helmholtz_check(&ctx, &[DiffPoly::zero()]));
        let ctx2 = JetContext::new(vec!["t".into(), "x".into()], vec![FieldDecl::new("u", 0)]).unwrap();
        assert!(!helmholtz_check(&ctx2, &[parse(&ctx2, "u_t - u_xx").unwrap()]));
    }

    #[test]
    fn operators_from_linear_expressions() {
        let ctx = JetContext::new(
            vec!["t".into(), "x".into()],
            vec![FieldDecl::new("u", 0), FieldDecl::new("eps", 0)],
        )
        .unwrap();
        let rows = [parse(&ctx, "eps_t").unwrap(), parse(&ctx, "u*eps_x + eps").unwrap()];
        let p = TotalDiffOperator::from_linear(&ctx, &rows, &[1]).unwrap();
        assert_eq!(p.entry(0, 0, &MultiIndex::unit(2, 0)), DiffPoly::one());
        assert_eq!(p.entry(1, 0, &MultiIndex::unit(2, 1)), ctx.u(0));
        assert_eq!(p.entry(1, 0, &MultiIndex::zero(2)), DiffPoly::one());
        let bad = [parse(&ctx, "eps^2").unwrap()];
        assert!(TotalDiffOperator::from_linear(&ctx, &bad, &[1]).is_err());
        let bad = [parse(&ctx, "u").unwrap()];
        assert!(TotalDiffOperator::from_linear(&ctx, &bad, &[1]).is_err());
    }
}
