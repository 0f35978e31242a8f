//! Reference implementations used to check the library: plain dense
//! polynomial arithmetic, the support invariants straight from their
//! definitions, and random generators.

#![allow(dead_code)]

use charp::ff::{Field, FieldCtx, FieldElem};
use charp::pseries::{CoordChange, Series};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn field(p: u32, deg: usize) -> Field {
    FieldCtx::new(p, deg).unwrap()
}

pub fn v(n: u64, p: u32) -> u32 {
    let mut n = n;
    let mut i = 0;
    while n.is_multiple_of(p as u64) {
        n /= p as u64;
        i += 1;
    }
    i
}

fn pw(p: u32, e: u32) -> u64 {
    (p as u64).pow(e)
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// `(m, e, q, k, dbar, d)` straight from the definitions.
pub fn brute_basic(delta: &[u64], p: u32) -> (u64, u32, u64, u64, u64, u64) {
    let m = *delta.iter().min().unwrap();
    let e = delta.iter().map(|&n| v(n, p)).min().unwrap();
    let q = *delta.iter().filter(|&&n| v(n, p) == e).min().unwrap();
    let k = if m == q {
        1
    } else {
        delta
            .iter()
            .filter(|&&n| m <= n && n < q)
            .map(|&n| ceil_div(q - n, pw(p, v(n, p)) - pw(p, e)))
            .max()
            .unwrap()
    };
    let dbar = 2 * q - m;
    let d = q + pw(p, e) * (k - 1);
    (m, e, q, k, dbar, d)
}

pub fn brute_k_at(delta: &[u64], p: u32, n: u64) -> u64 {
    let (_, e, q, ..) = brute_basic(delta, p);
    ceil_div(q - n, pw(p, v(n, p)) - pw(p, e))
}

pub fn brute_lambda_bar(delta: &[u64], p: u32) -> Vec<u64> {
    let (m, e, q, _, dbar, _) = brute_basic(delta, p);
    let mut out: Vec<u64> = (m + 1..=dbar).filter(|&n| v(n, p) > e).collect();
    if !out.contains(&q) {
        out.push(q);
    }
    out.sort_unstable();
    out
}

/// `Λ(Δ)` and the case number for `e(Δ) = 0`.
pub fn brute_lambda(delta: &[u64], p: u32) -> (Vec<u64>, u8) {
    let (m, e, q, k, _, d) = brute_basic(delta, p);
    assert_eq!(e, 0);
    let em = v(m, p);
    if em == 0 {
        return (Vec::new(), 0);
    }
    let delta0: Vec<u64> = delta.iter().copied().filter(|&n| n < q).collect();
    let (_, e0, q0, k0, _, _) = brute_basic(&delta0, p);
    let lambda0: Vec<u64> = brute_lambda_bar(&delta0, p)
        .into_iter()
        .filter(|&n| n < q)
        .collect();
    let range = q..=d;
    let (l1, case): (Vec<u64>, u8) = if em == e0 {
        return (range.filter(|&n| v(n, p) < em).collect(), 1);
    } else if e0 > 1 {
        (range.collect(), 2)
    } else if k > brute_k_at(delta, p, q0) {
        (range.collect(), 3)
    } else if k0 >= (q - q0) / p as u64 {
        (range.filter(|&n| v(n, p) != 1).collect(), 4)
    } else {
        (range.filter(|&n| v(n, p) == 0).collect(), 5)
    };
    let mut out = lambda0;
    out.extend(l1);
    out.sort_unstable();
    out.dedup();
    (out, case)
}

/// Dense coefficients `c_0..=c_trunc`.
pub fn dense(f: &Series) -> Vec<FieldElem> {
    (0..=f.trunc()).map(|n| f.coeff(n)).collect()
}

fn dense_mul(a: &[FieldElem], b: &[FieldElem], ctx: &Field) -> Vec<FieldElem> {
    let len = a.len().min(b.len());
    let mut out = vec![ctx.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// `j^trunc(f ∘ φ)` by summing `c_n φ^n` with schoolbook products, in
/// the field of `φ`.
pub fn brute_compose(f: &Series, phi: &Series, trunc: usize) -> Vec<FieldElem> {
    let ctx = phi.ctx().clone();
    let f = f.embed(&ctx).unwrap();
    let phi_d: Vec<FieldElem> = (0..=trunc).map(|n| phi.coeff(n)).collect();
    let mut out = vec![ctx.zero(); trunc + 1];
    let mut power = vec![ctx.zero(); trunc + 1];
    power[0] = ctx.one();
    for n in 0..=trunc {
        let c = f.coeff(n);
        if !c.is_zero() {
            for (o, x) in out.iter_mut().zip(&power) {
                *o = &*o + &(&c * x);
            }
        }
        power = dense_mul(&power, &phi_d, &ctx);
    }
    out
}

pub fn dense_eq_series(a: &[FieldElem], s: &Series) -> bool {
    a.iter().enumerate().all(|(n, c)| *c == s.coeff(n))
}

/// `ord(f')` by reading `n·c_n` off the coefficients; `None` if `f' = 0`
/// within the precision.
pub fn brute_ord_derivative(f: &Series) -> Option<u64> {
    (1..=f.trunc())
        .find(|&n| !f.coeff(n).scale(n as u64).is_zero())
        .map(|n| n as u64 - 1)
}

pub fn all_roots_exhaustive(coeffs: &[FieldElem], ctx: &Field) -> Vec<FieldElem> {
    ctx.elements()
        .filter(|x| {
            let mut acc = ctx.zero();
            for c in coeffs.iter().rev() {
                acc = &(&acc * x) + c;
            }
            acc.is_zero()
        })
        .collect()
}

pub fn random_elem(rng: &mut ChaCha8Rng, ctx: &Field) -> FieldElem {
    ctx.elem_from_index(rng.gen_range(0..ctx.size()))
}

pub fn random_nonzero(rng: &mut ChaCha8Rng, ctx: &Field) -> FieldElem {
    ctx.elem_from_index(rng.gen_range(1..ctx.size()))
}

/// Random `f` with `e(f) = 0` and `q(f) ≤ qmax`: a random support in
/// `[1, qmax]` containing an exponent prime to `p`, precision `d̄(f) + 1`,
/// and (half the time) random terms between `qmax` and the precision.
/// Most draws have `p | m`.
pub fn random_e0_series(rng: &mut ChaCha8Rng, ctx: &Field, qmax: usize) -> Series {
    let p = ctx.p() as usize;
    loop {
        let density = rng.gen_range(0.15..0.6);
        let mut terms: Vec<(usize, FieldElem)> = Vec::new();
        for n in 1..=qmax {
            if rng.gen_bool(density) {
                terms.push((n, random_nonzero(rng, ctx)));
            }
        }
        if qmax > p && rng.gen_bool(0.7) {
            // below a chosen q keep only multiples of r, so p | m
            let r = if rng.gen_bool(0.3) && p * p < qmax {
                p * p
            } else {
                p
            };
            let units: Vec<usize> = (2..=qmax).filter(|n| n % p != 0).collect();
            let q = units[rng.gen_range(0..units.len())];
            terms.retain(|(n, _)| *n > q || n % r == 0);
            if !terms.iter().any(|(n, _)| *n < q) && q > r {
                let k = rng.gen_range(1..=(q - 1) / r);
                terms.push((k * r, random_nonzero(rng, ctx)));
            }
            terms.retain(|(n, _)| *n != q);
            terms.push((q, random_nonzero(rng, ctx)));
        }
        if !terms.iter().any(|(n, _)| n % p != 0) {
            let units: Vec<usize> = (1..=qmax).filter(|n| n % p != 0).collect();
            let n = units[rng.gen_range(0..units.len())];
            terms.retain(|(k, _)| *k != n);
            terms.push((n, random_nonzero(rng, ctx)));
        }
        let delta: Vec<u64> = {
            let mut d: Vec<u64> = terms.iter().map(|(n, _)| *n as u64).collect();
            d.sort_unstable();
            d
        };
        let (.., dbar, _) = brute_basic(&delta, p as u32);
        let trunc = dbar as usize + 1;
        if rng.gen_bool(0.5) {
            for n in qmax + 1..=trunc {
                if rng.gen_bool(0.3) {
                    terms.push((n, random_nonzero(rng, ctx)));
                }
            }
        }
        let f = Series::from_terms(ctx, terms, trunc.max(qmax)).unwrap();
        if !f.is_zero() {
            return f;
        }
    }
}

/// Random coordinate change `a_1 x + … + a_trunc x^trunc`.
pub fn random_change(rng: &mut ChaCha8Rng, ctx: &Field, trunc: usize) -> CoordChange {
    let mut terms = vec![(1, random_nonzero(rng, ctx))];
    let density = rng.gen_range(0.1..0.9);
    for n in 2..=trunc {
        if rng.gen_bool(density) {
            terms.push((n, random_nonzero(rng, ctx)));
        }
    }
    CoordChange::new(Series::from_terms(ctx, terms, trunc).unwrap()).unwrap()
}
