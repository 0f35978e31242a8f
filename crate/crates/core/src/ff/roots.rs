//! Root finding over `F_Q`, with on-demand extension for polynomials that
//! have no root in the current field.
//!
//! Small fields (at most [`EXHAUSTIVE_LIMIT`] elements) are searched
//! exhaustively. Larger ones use `gcd(f, X^Q - X)` followed by equal-degree
//! splitting. Whichever path runs, the returned root is the one with the
//! smallest index, so results do not depend on the strategy.

use std::collections::BTreeMap;

use super::{Field, FieldElem, Poly, EXHAUSTIVE_LIMIT};
use crate::error::{Error, Result};

/// Smallest-index root of `f` in its coefficient field, if any.
pub fn find_root(f: &Poly) -> Option<FieldElem> {
    let ctx = f.ctx();
    match f.degree() {
        None => return Some(ctx.zero()),
        Some(0) => return None,
        Some(1) => {
            let r = &f.coeff(0).neg() / &f.coeff(1);
            return Some(r);
        }
        _ => {}
    }
    if ctx.size() <= EXHAUSTIVE_LIMIT {
        return ctx.elements().find(|a| f.eval(a).is_zero());
    }
    all_roots(f).into_iter().next()
}

/// All distinct roots of a nonzero `f` in its coefficient field, sorted by
/// index.
pub fn all_roots(f: &Poly) -> Vec<FieldElem> {
    let ctx = f.ctx();
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut roots = if ctx.size() <= EXHAUSTIVE_LIMIT {
        ctx.elements().filter(|a| f.eval(a).is_zero()).collect()
    } else {
        let f = f.monic();
        let x = Poly::x(ctx);
        let xq = x.powmod(ctx.size(), &f);
        let g = f.gcd(&xq.sub(&x));
        let mut out = Vec::new();
        split_linear(&g, &mut out);
        out
    };
    roots.sort_by_key(|r| r.index());
    roots
}

/// Splits a product of distinct linear factors into its roots.
fn split_linear(g: &Poly, out: &mut Vec<FieldElem>) {
    let ctx = g.ctx();
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            out.push(&g.coeff(0).neg() / &g.coeff(1));
            return;
        }
        _ => {}
    }
    let deg = g.degree().unwrap();
    let x = Poly::x(ctx);
    let q = ctx.size();
    for idx in 1..q {
        let delta = ctx.elem_from_index(idx);
        let h = if ctx.p() == 2 {
            let mut t = x.scale(&delta).rem(g);
            let mut acc = t.clone();
            for _ in 1..ctx.deg() {
                t = t.mul(&t).rem(g);
                acc = acc.add(&t);
            }
            g.gcd(&acc)
        } else {
            let shifted = x.add(&Poly::from_coeffs(ctx, vec![delta]));
            let pw = shifted.powmod((q - 1) / 2, g);
            g.gcd(&pw.sub(&Poly::one(ctx)))
        };
        match h.degree() {
            Some(d) if d > 0 && d < deg => {
                let (rest, _) = g.divrem(&h);
                split_linear(&h, out);
                split_linear(&rest, out);
                return;
            }
            _ => {}
        }
    }
    unreachable!("equal-degree splitting found no separating element");
}

/// Smallest `j ≤ limit` such that `f` has a root in the degree-`j` extension
/// of its coefficient field, i.e. the minimal degree of an irreducible factor.
pub fn min_root_degree(f: &Poly, limit: usize) -> Option<usize> {
    let deg = f.degree()?;
    if deg == 0 {
        return None;
    }
    let ctx = f.ctx();
    let f = f.monic();
    let x = Poly::x(ctx);
    let mut y = x.rem(&f);
    for j in 1..=limit.min(deg) {
        y = y.powmod(ctx.size(), &f);
        if f.gcd(&y.sub(&x)).degree().unwrap_or(0) > 0 {
            return Some(j);
        }
    }
    None
}

/// Some `b` in the field of `a` with `b^n = a`, if one exists there.
pub fn nth_root(a: &FieldElem, n: u64) -> Option<FieldElem> {
    let ctx = a.ctx();
    if n == 0 {
        return a.is_one().then(|| ctx.one());
    }
    let mut coeffs = vec![ctx.zero(); n as usize + 1];
    coeffs[0] = a.neg();
    coeffs[n as usize] = ctx.one();
    find_root(&Poly::from_coeffs(ctx, coeffs))
}

/// Root of `Σ coeffs[i]·X^i`, extending the field when necessary.
///
/// Returns the root and the field it lives in, which extends the field of
/// the coefficients. A zero polynomial has every element as a root and
/// yields 0.
pub fn solve_poly(coeffs: &[FieldElem], max_degree: usize) -> Result<(FieldElem, Field)> {
    let ctx = coeffs
        .first()
        .ok_or_else(|| Error::Precondition("empty polynomial".into()))?
        .ctx()
        .clone();
    let f = Poly::from_coeffs(&ctx, coeffs.to_vec());
    match f.degree() {
        None => return Ok((ctx.zero(), ctx)),
        Some(0) => return Err(Error::NoSolution(format!("{f:?} is a nonzero constant"))),
        _ => {}
    }
    if let Some(r) = find_root(&f) {
        return Ok((r, ctx));
    }
    let deg = f.degree().unwrap();
    let j = min_root_degree(&f, deg)
        .ok_or_else(|| Error::Internal(format!("no irreducible factor found for {f:?}")))?;
    let bigger = ctx.extend(j, max_degree)?;
    let lifted: Vec<FieldElem> = f
        .coeffs()
        .iter()
        .map(|c| bigger.embed(c))
        .collect::<Result<_>>()?;
    let lifted = Poly::from_coeffs(&bigger, lifted);
    let r = find_root(&lifted)
        .ok_or_else(|| Error::Internal(format!("no root of {lifted:?} after extension")))?;
    Ok((r, bigger))
}

/// Solves `Σ_e a_e·X^(p^e) + b = 0` over the algebraic closure.
///
/// `terms` maps the level `e` to `a_e`; at least one `a_e` must be nonzero.
pub fn solve_additive(
    terms: &BTreeMap<u32, FieldElem>,
    constant: &FieldElem,
    max_degree: usize,
) -> Result<(FieldElem, Field)> {
    if terms.values().all(|a| a.is_zero()) {
        return Err(Error::Precondition(
            "additive polynomial has no nonzero term".into(),
        ));
    }
    let ctx = constant.ctx().clone();
    let p = ctx.p() as usize;
    let top = *terms.keys().next_back().unwrap();
    let mut coeffs = vec![ctx.zero(); p.pow(top) + 1];
    coeffs[0] = constant.clone();
    for (&e, a) in terms {
        let slot = &mut coeffs[p.pow(e)];
        *slot = slot.try_add(a)?;
    }
    solve_poly(&coeffs, max_degree)
}
