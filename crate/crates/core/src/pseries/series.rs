use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ff::{binom_mod, valuation, Field, FieldElem};

/// A power series over a finite field, known exactly up to and including
/// the exponent `trunc`.
///
/// Coefficients are stored sparsely; absent exponents are zero. Nothing is
/// known about exponents above `trunc`.
#[derive(Clone)]
pub struct Series {
    ctx: Field,
    trunc: usize,
    coeffs: BTreeMap<usize, FieldElem>,
}

impl Series {
    pub fn zero(ctx: &Field, trunc: usize) -> Self {
        Series {
            ctx: ctx.clone(),
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn monomial(ctx: &Field, n: usize, c: FieldElem, trunc: usize) -> Result<Self> {
        Self::from_terms(ctx, [(n, c)], trunc)
    }

    /// `x` as a series.
    pub fn x(ctx: &Field, trunc: usize) -> Self {
        Self::monomial(ctx, 1, ctx.one(), trunc).expect("same field")
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Repeated
    /// exponents are summed; terms above `trunc` are dropped.
    pub fn from_terms<I>(ctx: &Field, terms: I, trunc: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, FieldElem)>,
    {
        let mut s = Self::zero(ctx, trunc);
        for (n, c) in terms {
            if !ctx.same_field(c.ctx()) {
                return Err(Error::ContextMismatch {
                    left: c.ctx().to_string(),
                    right: ctx.to_string(),
                });
            }
            if n > trunc {
                continue;
            }
            s.add_term(n, &c);
        }
        Ok(s)
    }

    /// Series with coefficients given in the prime field, for tests and
    /// examples: `from_u64_terms(ctx, &[(2, 1), (5, 1)], 10)`.
    pub fn from_u64_terms(ctx: &Field, terms: &[(usize, u64)], trunc: usize) -> Self {
        Self::from_terms(ctx, terms.iter().map(|&(n, c)| (n, ctx.from_u64(c))), trunc)
            .expect("same field")
    }

    fn add_term(&mut self, n: usize, c: &FieldElem) {
        if c.is_zero() || n > self.trunc {
            return;
        }
        let sum = match self.coeffs.get(&n) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, sum);
        }
    }

    pub fn ctx(&self) -> &Field {
        &self.ctx
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, n: usize) -> FieldElem {
        self.coeffs
            .get(&n)
            .cloned()
            .unwrap_or_else(|| self.ctx.zero())
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &FieldElem)> + '_ {
        self.coeffs.iter().map(|(&n, c)| (n, c))
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order of the series; `None` for the zero jet.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    /// `j^n`: the jet of order `min(n, trunc)`.
    pub fn jet(&self, n: usize) -> Self {
        let trunc = n.min(self.trunc);
        Series {
            ctx: self.ctx.clone(),
            trunc,
            coeffs: self
                .coeffs
                .range(..=trunc)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
        }
    }

    /// Same coefficients with a different precision. Raising `trunc` asserts
    /// that the absent coefficients up to the new bound are zero, i.e. the
    /// series is read as a polynomial.
    pub fn with_trunc(&self, trunc: usize) -> Self {
        Series {
            ctx: self.ctx.clone(),
            trunc,
            coeffs: self
                .coeffs
                .range(..=trunc)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
        }
    }

    /// Copy of `self` in the larger field `ctx`.
    pub fn embed(&self, ctx: &Field) -> Result<Self> {
        if ctx.same_field(&self.ctx) {
            return Ok(self.clone());
        }
        let mut coeffs = BTreeMap::new();
        for (&n, c) in &self.coeffs {
            coeffs.insert(n, ctx.embed(c)?);
        }
        Ok(Series {
            ctx: ctx.clone(),
            trunc: self.trunc,
            coeffs,
        })
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx.same_field(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.ctx.to_string(),
                right: other.ctx.to_string(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let mut out = self.jet(other.trunc);
        for (&n, c) in other.coeffs.range(..=out.trunc) {
            out.add_term(n, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Series {
            ctx: self.ctx.clone(),
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|(&n, c)| (n, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElem) -> Result<Self> {
        let mut out = Self::zero(&self.ctx, self.trunc);
        for (&n, a) in &self.coeffs {
            out.add_term(n, &a.try_mul(c)?);
        }
        Ok(out)
    }

    /// Product, exact up to the smaller precision of the two factors.
    ///
    /// When both factors have positive order the product is in fact known
    /// further; that refinement is not tracked.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(&self.ctx, trunc);
        for (&i, a) in &self.coeffs {
            if i > trunc {
                break;
            }
            for (&j, b) in other.coeffs.range(..=trunc - i) {
                out.add_term(i + j, &(a * b));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut exp: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::monomial(&self.ctx, 0, self.ctx.one(), self.trunc)?;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `f ∘ φ`, evaluated by Horner's rule over the sparse exponents.
    ///
    /// The result is exact up to `min(self.trunc, phi.trunc)`.
    pub fn compose(&self, phi: &super::CoordChange) -> Result<Self> {
        let phi = phi.as_series();
        self.check_ctx(phi)?;
        let trunc = self.trunc.min(phi.trunc);
        let phi = phi.jet(trunc);
        let one = |c: &FieldElem| Series::monomial(&self.ctx, 0, c.clone(), trunc);
        let mut iter = self.coeffs.range(..=trunc).rev();
        let Some((&top, c_top)) = iter.next() else {
            return Ok(Self::zero(&self.ctx, trunc));
        };
        let mut acc = one(c_top)?;
        let mut prev = top;
        for (&n, c) in iter {
            acc = acc.mul(&phi.pow((prev - n) as u64)?)?.add(&one(c)?)?;
            prev = n;
        }
        acc.mul(&phi.pow(prev as u64)?)
    }

    /// `f(x + u·x^(l+1))` by expanding each term binomially,
    /// `Σ c_n · binom(n, i) · u^i · x^(n + l·i)`.
    pub fn substitute_elementary(&self, u: &FieldElem, l: usize) -> Result<Self> {
        if !self.ctx.same_field(u.ctx()) {
            return Err(Error::ContextMismatch {
                left: self.ctx.to_string(),
                right: u.ctx().to_string(),
            });
        }
        if l == 0 {
            return Err(Error::InvalidCoordChange(
                "elementary change needs l >= 1".into(),
            ));
        }
        let p = self.ctx.p();
        let mut out = Self::zero(&self.ctx, self.trunc);
        let mut upow = vec![self.ctx.one()];
        for (&n, c) in &self.coeffs {
            let mut i = 0usize;
            while i <= n && n + l * i <= self.trunc {
                let b = binom_mod(n as u64, i as u64, p);
                if b != 0 {
                    while upow.len() <= i {
                        let next = upow.last().unwrap() * u;
                        upow.push(next);
                    }
                    out.add_term(n + l * i, &(c * &upow[i]).scale(b as u64));
                }
                i += 1;
            }
        }
        Ok(out)
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(&self.ctx, self.trunc.saturating_sub(1));
        for (&n, c) in &self.coeffs {
            if n > 0 {
                out.add_term(n - 1, &c.scale(n as u64));
            }
        }
        out
    }

    /// `e(f)`: the minimal `p`-adic valuation over the support.
    pub fn e(&self) -> Result<u32> {
        if self.coeff(0).is_zero() {
            self.coeffs
                .keys()
                .map(|&n| valuation(n as u64, self.ctx.p()))
                .min()
                .ok_or(Error::ZeroSeries)
        } else {
            Err(Error::Precondition(
                "series has a nonzero constant term".into(),
            ))
        }
    }

    /// `(f̄, e)` with `f(x) = f̄(x^(p^e))` and `e(f̄) = 0`.
    pub fn to_bar(&self) -> Result<(Self, u32)> {
        let e = self.e()?;
        let step = (self.ctx.p() as usize).pow(e);
        let bar = Series {
            ctx: self.ctx.clone(),
            trunc: self.trunc / step,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&n, c)| (n / step, c.clone()))
                .collect(),
        };
        Ok((bar, e))
    }

    /// `f(x^(p^e))`. Exponents strictly between multiples of `p^e` are known
    /// to vanish, so the precision grows to `p^e·(trunc+1) − 1`.
    pub fn decompress(&self, e: u32) -> Self {
        let step = (self.ctx.p() as usize).pow(e);
        Series {
            ctx: self.ctx.clone(),
            trunc: step * (self.trunc + 1) - 1,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&n, c)| (n * step, c.clone()))
                .collect(),
        }
    }
}

/// Equality of the known coefficients; precision is part of the value.
impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx) && self.trunc == other.trunc && self.coeffs == other.coeffs
    }
}

impl Eq for Series {}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::format_series(self))
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(x^{}) over {}", self, self.trunc + 1, self.ctx)
    }
}
