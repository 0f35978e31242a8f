use std::fmt;

use super::Series;
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};

/// A coordinate change `x ↦ φ(x) = a₁x + a₂x² + …` with `a₁ ≠ 0`, acting on
/// series by substitution.
#[derive(Clone, PartialEq, Eq)]
pub struct CoordChange {
    phi: Series,
}

impl CoordChange {
    pub fn new(phi: Series) -> Result<Self> {
        if !phi.coeff(0).is_zero() {
            return Err(Error::InvalidCoordChange("nonzero constant term".into()));
        }
        if phi.coeff(1).is_zero() {
            return Err(Error::InvalidCoordChange(
                "linear coefficient must be a unit".into(),
            ));
        }
        Ok(CoordChange { phi })
    }

    pub fn identity(ctx: &Field, trunc: usize) -> Self {
        CoordChange {
            phi: Series::x(ctx, trunc.max(1)),
        }
    }

    /// `x + u·x^(l+1)`.
    pub fn elementary(u: &FieldElem, l: usize, trunc: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidCoordChange(
                "elementary change needs l >= 1".into(),
            ));
        }
        let ctx = u.ctx();
        Self::new(Series::from_terms(
            ctx,
            [(1, ctx.one()), (l + 1, u.clone())],
            trunc.max(1),
        )?)
    }

    /// `x ↦ a·x`.
    pub fn scaling(a: &FieldElem, trunc: usize) -> Result<Self> {
        Self::new(Series::monomial(a.ctx(), 1, a.clone(), trunc.max(1))?)
    }

    pub fn as_series(&self) -> &Series {
        &self.phi
    }

    pub fn ctx(&self) -> &Field {
        self.phi.ctx()
    }

    pub fn trunc(&self) -> usize {
        self.phi.trunc()
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.phi.coeff(i)
    }

    pub fn is_identity(&self) -> bool {
        self.phi.terms().all(|(n, c)| n == 1 && c.is_one())
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`. With this convention
    /// `f.compose(&a.compose(&b)) == f.compose(&a).compose(&b)`.
    pub fn compose(&self, other: &CoordChange) -> Result<Self> {
        Ok(CoordChange {
            phi: self.phi.compose(other)?,
        })
    }

    pub fn apply(&self, f: &Series) -> Result<Series> {
        f.compose(self)
    }

    pub fn with_trunc(&self, trunc: usize) -> Self {
        CoordChange {
            phi: self.phi.with_trunc(trunc.max(1)),
        }
    }

    pub fn embed(&self, ctx: &Field) -> Result<Self> {
        Ok(CoordChange {
            phi: self.phi.embed(ctx)?,
        })
    }

    /// Compositional inverse modulo `x^(trunc+1)`, built one coefficient at
    /// a time: if `self(ψ) = x + c·x^n + …` then replacing `ψ` by
    /// `ψ − (c/a₁)·x^n` clears the `x^n` term.
    pub fn inverse(&self) -> Result<Self> {
        let ctx = self.ctx().clone();
        let trunc = self.trunc();
        let a1 = self.coeff(1);
        let a1_inv = a1.inv()?;
        let mut psi = Series::monomial(&ctx, 1, a1_inv.clone(), trunc)?;
        for n in 2..=trunc {
            let cur = self.phi.compose(&CoordChange { phi: psi.clone() })?;
            let c = cur.coeff(n);
            if !c.is_zero() {
                let fix = Series::monomial(&ctx, n, (&c * &a1_inv).neg(), trunc)?;
                psi = psi.add(&fix)?;
            }
        }
        Ok(CoordChange { phi: psi })
    }
}

/// Lifts a coordinate change `ψ` used on `f̄` to the change `χ` that does
/// the same job on `f(x) = f̄(x^(p^e))`.
///
/// `χ(x) = Σ a_i^(1/p^e) x^i`, so that `χ(x)^(p^e) = ψ(x^(p^e))`. The
/// stored coefficients of `ψ` are read as a polynomial, which makes the
/// identity exact up to `p^e·(trunc+1) − 1`; that is the precision of `χ`.
pub fn transport_change(psi: &CoordChange, e: u32) -> CoordChange {
    if e == 0 {
        return psi.clone();
    }
    let ctx = psi.ctx();
    let step = (ctx.p() as usize).pow(e);
    let trunc = step * (psi.trunc() + 1) - 1;
    let terms = psi
        .as_series()
        .terms()
        .map(|(n, c)| (n, c.inverse_frobenius(e)))
        .collect::<Vec<_>>();
    CoordChange {
        phi: Series::from_terms(ctx, terms, trunc).expect("same field"),
    }
}

impl fmt::Display for CoordChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x -> {}", self.phi)
    }
}

impl fmt::Debug for CoordChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoordChange({:?})", self.phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldCtx;

    #[test]
    fn rejects_non_units() {
        let ctx = FieldCtx::prime(3).unwrap();
        assert!(CoordChange::new(Series::from_u64_terms(&ctx, &[(2, 1)], 4)).is_err());
        assert!(CoordChange::new(Series::from_u64_terms(&ctx, &[(0, 1), (1, 1)], 4)).is_err());
        assert!(CoordChange::scaling(&ctx.zero(), 4).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let ctx = FieldCtx::new(3, 2).unwrap();
        let g = ctx.generator();
        let phi = CoordChange::new(
            Series::from_terms(&ctx, [(1, g.clone()), (2, ctx.one()), (4, &g + &g)], 9).unwrap(),
        )
        .unwrap();
        let inv = phi.inverse().unwrap();
        assert!(phi.compose(&inv).unwrap().is_identity());
        assert!(inv.compose(&phi).unwrap().is_identity());
    }

    #[test]
    fn transport_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let psi = CoordChange::new(Series::from_u64_terms(&f2, &[(1, 1), (2, 1)], 4)).unwrap();
        assert_eq!(transport_change(&psi, 0), psi);
        let chi = transport_change(&psi, 1);
        assert_eq!(chi.as_series().support(), vec![1, 2]);
        let sq = chi.as_series().pow(2).unwrap();
        assert_eq!(sq.jet(4).support(), vec![2, 4]);

        let f4 = FieldCtx::new(2, 2).unwrap();
        let g = f4.generator();
        let psi = CoordChange::elementary(&g, 1, 4).unwrap();
        let chi = transport_change(&psi, 1);
        assert_eq!(chi.coeff(2), &g * &g);
        let lhs = chi.as_series().pow(2).unwrap();
        let rhs = psi.as_series().decompress(1);
        assert_eq!(lhs.jet(9), rhs.jet(9));
    }
}
