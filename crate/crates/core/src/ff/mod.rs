//! Finite fields `F_{p^k}` in polynomial-basis representation.
//!
//! A [`FieldCtx`] fixes the characteristic, the extension degree and a monic
//! irreducible modulus over `F_p`; elements are coefficient vectors in the
//! generator `g`. The algebraic closure is approximated lazily: whenever an
//! equation has no root in the current field, [`FieldCtx::extend`] produces a
//! larger field together with the embedding of the old one.

mod poly;
mod roots;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use poly::Poly;
pub use roots::{all_roots, find_root, min_root_degree, nth_root, solve_additive, solve_poly};

/// Default cap on the degree of any working field over `F_p`.
pub const DEFAULT_MAX_DEGREE: usize = 24;

/// Fields up to this size are searched exhaustively for roots.
pub const EXHAUSTIVE_LIMIT: u128 = 4096;

pub type Field = Arc<FieldCtx>;

type Rep = SmallVec<[u32; 4]>;

#[derive(Debug)]
struct Embedding {
    parent: Field,
    image: Rep,
}

/// Arithmetic context for `F_{p^k} = F_p[g]/(modulus)`. Immutable once built.
#[derive(Debug)]
pub struct FieldCtx {
    p: u32,
    deg: usize,
    modulus: Vec<u32>,
    parent: Option<Embedding>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `e(n)`: the exponent of the largest power of `p` dividing `n > 0`.
pub fn valuation(mut n: u64, p: u32) -> u32 {
    debug_assert!(n > 0);
    let p = p as u64;
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// `binom(n, k) mod p` by Lucas' theorem.
pub fn binom_mod(mut n: u64, mut k: u64, p: u32) -> u32 {
    let p64 = p as u64;
    let mut acc = 1u64;
    while k > 0 {
        let (nd, kd) = (n % p64, k % p64);
        if kd > nd {
            return 0;
        }
        // small binomial by the multiplicative formula, exact in u64 for nd < p
        let mut b = 1u64;
        for i in 0..kd {
            b = b * (nd - i) / (i + 1);
        }
        acc = acc * (b % p64) % p64;
        n /= p64;
        k /= p64;
    }
    acc as u32
}

impl FieldCtx {
    /// The prime field `F_p`, with modulus `g` (so the generator is 0).
    pub fn prime(p: u32) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Arc::new(FieldCtx {
            p,
            deg: 1,
            modulus: vec![0, 1],
            parent: None,
        }))
    }

    /// `F_{p^deg}` defined by the lexicographically smallest monic irreducible
    /// polynomial of degree `deg` (coefficients compared low degree first).
    pub fn new(p: u32, deg: usize) -> Result<Field> {
        let base = Self::prime(p)?;
        if deg == 0 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        if deg == 1 {
            return Ok(base);
        }
        let modulus = poly::smallest_irreducible(&base, deg);
        Ok(Arc::new(FieldCtx {
            p,
            deg,
            modulus,
            parent: None,
        }))
    }

    /// `F_p[g]/(modulus)` for a user-supplied monic irreducible modulus,
    /// given low degree first.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Field> {
        let base = Self::prime(p)?;
        let modulus: Vec<u32> = modulus.into_iter().map(|c| c % p).collect();
        let Some(&lead) = modulus.last() else {
            return Err(Error::InvalidModulus("empty modulus".into()));
        };
        if lead != 1 || modulus.len() < 2 {
            return Err(Error::InvalidModulus(
                "modulus must be monic of degree at least 1".into(),
            ));
        }
        let as_poly = Poly::from_coeffs(
            &base,
            modulus.iter().map(|&c| base.from_u64(c as u64)).collect(),
        );
        if !poly::is_irreducible(&as_poly) {
            return Err(Error::InvalidModulus(format!(
                "{} is reducible over F_{p}",
                format_g_poly(&modulus, p)
            )));
        }
        Ok(Arc::new(FieldCtx {
            p,
            deg: modulus.len() - 1,
            modulus,
            parent: None,
        }))
    }

    /// Extension of degree `factor` over `self`, i.e. `F_{p^(deg*factor)}`
    /// with the embedding of `self` fixed by the smallest root of the old
    /// modulus.
    pub fn extend(self: &Field, factor: usize, max_degree: usize) -> Result<Field> {
        if factor <= 1 {
            return Ok(self.clone());
        }
        let deg = self.deg * factor;
        if deg > max_degree {
            return Err(Error::Budget {
                what: "field degree",
                needed: deg as u128,
                limit: max_degree as u128,
            });
        }
        let base = FieldCtx::new(self.p, deg)?;
        let old_modulus = Poly::from_coeffs(
            &base,
            self.modulus
                .iter()
                .map(|&c| base.from_u64(c as u64))
                .collect(),
        );
        let image = find_root(&old_modulus)
            .ok_or_else(|| Error::Internal(format!("modulus of {self} has no root in {base}")))?;
        Ok(Arc::new(FieldCtx {
            p: self.p,
            deg,
            modulus: base.modulus.clone(),
            parent: Some(Embedding {
                parent: self.clone(),
                image: image.rep,
            }),
        }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    /// Modulus coefficients, low degree first; monic of length `deg + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn parent(&self) -> Option<&Field> {
        self.parent.as_ref().map(|e| &e.parent)
    }

    /// Image of the parent generator, when this field was built by `extend`.
    pub fn parent_generator_image(self: &Field) -> Option<FieldElem> {
        self.parent.as_ref().map(|e| FieldElem {
            ctx: self.clone(),
            rep: e.image.clone(),
        })
    }

    pub fn size(&self) -> u128 {
        (self.p as u128).pow(self.deg as u32)
    }

    /// Two contexts describe the same field when characteristic and modulus
    /// agree; the embedding history does not matter.
    pub fn same_field(&self, other: &FieldCtx) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }

    pub fn zero(self: &Field) -> FieldElem {
        FieldElem {
            ctx: self.clone(),
            rep: SmallVec::from_elem(0, self.deg),
        }
    }

    pub fn one(self: &Field) -> FieldElem {
        self.from_u64(1)
    }

    pub fn from_u64(self: &Field, n: u64) -> FieldElem {
        let mut rep: Rep = SmallVec::from_elem(0, self.deg);
        rep[0] = (n % self.p as u64) as u32;
        FieldElem {
            ctx: self.clone(),
            rep,
        }
    }

    pub fn from_i64(self: &Field, n: i64) -> FieldElem {
        let p = self.p as i64;
        self.from_u64(n.rem_euclid(p) as u64)
    }

    /// The class of `g`. In a prime field this is 0.
    pub fn generator(self: &Field) -> FieldElem {
        let mut rep: Rep = SmallVec::from_elem(0, self.deg);
        if self.deg == 1 {
            rep[0] = (self.p - self.modulus[0]) % self.p;
        } else {
            rep[1] = 1;
        }
        FieldElem {
            ctx: self.clone(),
            rep,
        }
    }

    /// Element from polynomial-basis coordinates (reduced mod `p`, padded).
    pub fn elem(self: &Field, coords: &[u32]) -> Result<FieldElem> {
        if coords.len() > self.deg {
            return Err(Error::OutsideField(format!(
                "{} coordinates for a degree-{} field",
                coords.len(),
                self.deg
            )));
        }
        let mut rep: Rep = SmallVec::from_elem(0, self.deg);
        for (r, &c) in rep.iter_mut().zip(coords) {
            *r = c % self.p;
        }
        Ok(FieldElem {
            ctx: self.clone(),
            rep,
        })
    }

    /// Element whose coordinates are the base-`p` digits of `index`.
    pub fn elem_from_index(self: &Field, mut index: u128) -> FieldElem {
        let mut rep: Rep = SmallVec::from_elem(0, self.deg);
        for r in rep.iter_mut() {
            *r = (index % self.p as u128) as u32;
            index /= self.p as u128;
        }
        FieldElem {
            ctx: self.clone(),
            rep,
        }
    }

    /// All elements in index order.
    pub fn elements(self: &Field) -> impl Iterator<Item = FieldElem> {
        let ctx = self.clone();
        (0..self.size()).map(move |i| ctx.elem_from_index(i))
    }

    /// Image of `a` under the canonical embedding into `self`.
    ///
    /// Works for elements of `self`, of the prime field, and of any field on
    /// the chain of parents that `self` was extended from.
    pub fn embed(self: &Field, a: &FieldElem) -> Result<FieldElem> {
        if self.same_field(&a.ctx) {
            return Ok(FieldElem {
                ctx: self.clone(),
                rep: a.rep.clone(),
            });
        }
        if a.ctx.p == self.p && a.ctx.deg == 1 {
            return Ok(self.from_u64(a.rep[0] as u64));
        }
        if let Some(emb) = &self.parent {
            let in_parent = emb.parent.embed(a)?;
            let image = FieldElem {
                ctx: self.clone(),
                rep: emb.image.clone(),
            };
            let mut acc = self.zero();
            for &c in in_parent.rep.iter().rev() {
                acc = &(&acc * &image) + &self.from_u64(c as u64);
            }
            return Ok(acc);
        }
        Err(Error::ContextMismatch {
            left: a.ctx.to_string(),
            right: self.to_string(),
        })
    }

    fn check(&self, a: &FieldElem, b: &FieldElem) -> Result<()> {
        if self.same_field(&b.ctx) && self.same_field(&a.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: a.ctx.to_string(),
                right: b.ctx.to_string(),
            })
        }
    }

    fn mul_rep(&self, a: &[u32], b: &[u32]) -> Rep {
        let p = self.p as u64;
        if self.deg == 1 {
            return SmallVec::from_elem(((a[0] as u64 * b[0] as u64) % p) as u32, 1);
        }
        let k = self.deg;
        let mut prod = [0u64; 64];
        let mut prod_vec;
        let prod: &mut [u64] = if 2 * k - 1 <= 64 {
            &mut prod[..2 * k - 1]
        } else {
            prod_vec = vec![0u64; 2 * k - 1];
            &mut prod_vec
        };
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..k {
                let sub = c * self.modulus[j] as u64 % p;
                prod[i - k + j] = (prod[i - k + j] + p - sub) % p;
            }
        }
        prod[..k].iter().map(|&c| c as u32).collect()
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={},deg={},modulus={}",
            self.p,
            self.deg,
            format_g_poly(&self.modulus, self.p)
        )
    }
}

/// Renders coordinates (low degree first) as a polynomial in `g`,
/// highest degree first: `2*g^2+1`, `g+1`, `0`.
pub(crate) fn format_g_poly(coords: &[u32], _p: u32) -> String {
    let mut parts = Vec::new();
    for (i, &c) in coords.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "g".to_string(),
            _ => format!("g^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

/// An element of a [`FieldCtx`].
///
/// Operators on references panic when the operands live in different
/// fields; the `try_*` methods report [`Error::ContextMismatch`] instead.
#[derive(Clone)]
pub struct FieldElem {
    ctx: Field,
    rep: Rep,
}

impl FieldElem {
    pub fn ctx(&self) -> &Field {
        &self.ctx
    }

    /// Polynomial-basis coordinates, low degree first.
    pub fn coords(&self) -> &[u32] {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.rep[0] == 1 && self.rep[1..].iter().all(|&c| c == 0)
    }

    /// Base-`p` index of the coordinate vector; the order used by all
    /// exhaustive searches.
    pub fn index(&self) -> u128 {
        self.rep
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.ctx.p as u128 + c as u128)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.ctx.check(self, other)?;
        let p = self.ctx.p;
        let rep = self
            .rep
            .iter()
            .zip(&other.rep)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        Ok(FieldElem {
            ctx: self.ctx.clone(),
            rep,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.ctx.check(self, other)?;
        let p = self.ctx.p;
        let rep = self
            .rep
            .iter()
            .zip(&other.rep)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        Ok(FieldElem {
            ctx: self.ctx.clone(),
            rep,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.ctx.check(self, other)?;
        Ok(FieldElem {
            ctx: self.ctx.clone(),
            rep: self.ctx.mul_rep(&self.rep, &other.rep),
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.ctx.check(self, other)?;
        let inv = other.inv()?;
        self.try_mul(&inv)
    }

    pub fn neg(&self) -> Self {
        let p = self.ctx.p;
        FieldElem {
            ctx: self.ctx.clone(),
            rep: self.rep.iter().map(|&a| (p - a) % p).collect(),
        }
    }

    pub fn scale(&self, n: u64) -> Self {
        let p = self.ctx.p as u64;
        let n = n % p;
        FieldElem {
            ctx: self.ctx.clone(),
            rep: self
                .rep
                .iter()
                .map(|&a| (a as u64 * n % p) as u32)
                .collect(),
        }
    }

    pub fn pow(&self, mut exp: u128) -> Self {
        let mut base = self.rep.clone();
        let mut acc: Rep = SmallVec::from_elem(0, self.ctx.deg);
        acc[0] = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.ctx.mul_rep(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.ctx.mul_rep(&base, &base);
            }
        }
        FieldElem {
            ctx: self.ctx.clone(),
            rep: acc,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.ctx.size() - 2))
    }

    /// `a^(p^i)`.
    pub fn frobenius(&self, i: u32) -> Self {
        let i = i as usize % self.ctx.deg;
        let mut a = self.clone();
        for _ in 0..i {
            a = a.pow(self.ctx.p as u128);
        }
        a
    }

    /// The unique `b` with `b^(p^i) = a`.
    pub fn inverse_frobenius(&self, i: u32) -> Self {
        let k = self.ctx.deg;
        let back = (k - i as usize % k) % k;
        self.frobenius(back as u32)
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx) && self.rep == other.rep
    }
}

impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.p.hash(state);
        self.rep.hash(state);
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_g_poly(&self.rep, self.ctx.p))
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in F_{}^{}", self, self.ctx.p, self.ctx.deg)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl std::ops::$trait<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$try(rhs)
                    .expect(concat!("FieldElem::", stringify!($method)))
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl std::ops::Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::neg(self)
    }
}
