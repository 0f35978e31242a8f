//! Dense univariate polynomials with coefficients in a [`FieldCtx`].

use std::fmt;

use super::{is_prime, Field, FieldElem};

/// Polynomial with coefficients low degree first; never has a zero leading
/// coefficient.
#[derive(Clone)]
pub struct Poly {
    ctx: Field,
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero(ctx: &Field) -> Self {
        Poly {
            ctx: ctx.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: &Field) -> Self {
        Self::from_coeffs(ctx, vec![ctx.one()])
    }

    pub fn x(ctx: &Field) -> Self {
        Self::from_coeffs(ctx, vec![ctx.zero(), ctx.one()])
    }

    pub fn from_coeffs(ctx: &Field, mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn ctx(&self) -> &Field {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.ctx.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &FieldElem) -> FieldElem {
        let mut acc = self.ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lead) => {
                let inv = lead.inv().expect("nonzero leading coefficient");
                Poly {
                    ctx: self.ctx.clone(),
                    coeffs: self.coeffs.iter().map(|c| c * &inv).collect(),
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect();
        Self::from_coeffs(&self.ctx, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect();
        Self::from_coeffs(&self.ctx, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.ctx);
        }
        let mut out = vec![self.ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::from_coeffs(&self.ctx, out)
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        Self::from_coeffs(&self.ctx, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Quotient and remainder; panics on division by the zero polynomial.
    pub fn divrem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let inv_lead = divisor.coeffs[dd]
            .inv()
            .expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return (Self::zero(&self.ctx), Self::zero(&self.ctx));
        };
        if sd < dd {
            return (Self::zero(&self.ctx), self.clone());
        }
        let mut quot = vec![self.ctx.zero(); sd - dd + 1];
        for i in (dd..=sd).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let c = &rem[i] * &inv_lead;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = &rem[i - dd + j] - &(&c * d);
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        (
            Self::from_coeffs(&self.ctx, quot),
            Self::from_coeffs(&self.ctx, rem),
        )
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.divrem(divisor).1
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^exp mod modulus`.
    pub fn powmod(&self, mut exp: u128, modulus: &Self) -> Self {
        let mut base = self.rem(modulus);
        let mut acc = Self::one(&self.ctx).rem(modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base).rem(modulus);
            }
        }
        acc
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c})X^{i}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test over the coefficient field `F_Q`.
pub(crate) fn is_irreducible(f: &Poly) -> bool {
    let Some(n) = f.degree() else {
        return false;
    };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let q = f.ctx.size();
    let x = Poly::x(&f.ctx);
    // x^(Q^i) mod f for i = 0..=n
    let mut frob = vec![x.rem(f)];
    for i in 1..=n {
        let next = frob[i - 1].powmod(q, f);
        frob.push(next);
    }
    if frob[n] != x.rem(f) {
        return false;
    }
    prime_factors(n)
        .into_iter()
        .all(|r| frob[n / r].sub(&x).gcd(f).degree() == Some(0))
}

/// Smallest monic irreducible polynomial of degree `deg` over the prime field
/// `base`, ordering coefficient vectors lexicographically from the constant
/// term upwards.
pub(crate) fn smallest_irreducible(base: &Field, deg: usize) -> Vec<u32> {
    debug_assert!(base.deg() == 1 && is_prime(base.p() as u64));
    let p = base.p();
    // digits[0] is the most significant position, i.e. the constant term.
    let mut digits = vec![0u32; deg];
    loop {
        let mut coeffs: Vec<FieldElem> = digits.iter().map(|&c| base.from_u64(c as u64)).collect();
        coeffs.push(base.one());
        let cand = Poly::from_coeffs(base, coeffs);
        if is_irreducible(&cand) {
            let mut out = digits.clone();
            out.push(1);
            return out;
        }
        // increment, last position fastest
        let mut i = deg;
        loop {
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            assert!(
                i > 0,
                "no irreducible polynomial of degree {deg} over F_{p}"
            );
        }
    }
}
