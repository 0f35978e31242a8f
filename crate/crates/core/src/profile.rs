//! Combinatorial invariants of a support set `Δ ⊂ N \ {0}`: `m, e, q, k,
//! d̄, d`, the sets `Λ̄, Λ₀, Λ₁, Λ₁′, Λ₁″` and the case split that defines
//! `Λ(Δ)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::valuation;
use crate::pseries::Series;

/// Largest `nmax` accepted by [`enumerate_supports`] without a size cap.
pub const MAX_POWERSET_NMAX: u64 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Case {
    Case0,
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BasicInvariants {
    pub m: u64,
    pub e: u32,
    pub q: u64,
    #[serde(rename = "k")]
    pub kcap: u64,
    pub dbar: u64,
    pub d: u64,
}

/// `Δ₀ = {n ∈ Δ : n < q}` with `e₀ = e(Δ₀)` and `q₀ = q(Δ₀)`; present when
/// `e(m) > e(Δ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubData {
    pub delta0: Vec<u64>,
    pub e0: u32,
    pub q0: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportProfile {
    pub delta: Vec<u64>,
    pub p: u32,
    pub m: u64,
    pub e: u32,
    pub q: u64,
    #[serde(rename = "k")]
    pub kcap: u64,
    pub dbar: u64,
    pub d: u64,
    pub case: Case,
    pub lambda: Vec<u64>,
    pub lambda_bar: Vec<u64>,
    pub lambda0: Vec<u64>,
    pub lambda1: Vec<u64>,
    pub lambda1_prime: Vec<u64>,
    pub lambda1_dblprime: Vec<u64>,
    pub sub: Option<SubData>,
}

impl SupportProfile {
    pub fn basic(&self) -> BasicInvariants {
        BasicInvariants {
            m: self.m,
            e: self.e,
            q: self.q,
            kcap: self.kcap,
            dbar: self.dbar,
            d: self.d,
        }
    }
}

fn normalize(delta: &[u64]) -> Result<Vec<u64>> {
    let set: BTreeSet<u64> = delta.iter().copied().collect();
    if set.is_empty() {
        return Err(Error::EmptySupport);
    }
    if set.contains(&0) {
        return Err(Error::ZeroInSupport);
    }
    Ok(set.into_iter().collect())
}

fn ppow(p: u32, e: u32) -> u64 {
    (p as u64).pow(e)
}

/// `k_Δ(n) = ⌈(q − n)/(p^e(n) − p^e(Δ))⌉` for `n ∈ Δ`, `m ≤ n < q`.
pub fn k_delta(n: u64, q: u64, e: u32, p: u32) -> u64 {
    let den = ppow(p, valuation(n, p)) - ppow(p, e);
    (q - n).div_ceil(den)
}

/// `(m, e, q, k, d̄, d)`, with `k = 1` when `m = q`.
pub fn basic_invariants(delta: &[u64], p: u32) -> Result<BasicInvariants> {
    let delta = normalize(delta)?;
    Ok(basic_sorted(&delta, p))
}

fn basic_sorted(delta: &[u64], p: u32) -> BasicInvariants {
    let m = delta[0];
    let e = delta.iter().map(|&n| valuation(n, p)).min().unwrap();
    let q = *delta.iter().find(|&&n| valuation(n, p) == e).unwrap();
    let kcap = if m == q {
        1
    } else {
        delta
            .iter()
            .take_while(|&&n| n < q)
            .map(|&n| k_delta(n, q, e, p))
            .max()
            .unwrap()
    };
    BasicInvariants {
        m,
        e,
        q,
        kcap,
        dbar: 2 * q - m,
        d: q + ppow(p, e) * (kcap - 1),
    }
}

/// `Λ̄(Δ) = {n : m < n ≤ d̄, e(n) > e(Δ)} ∪ {q}`.
pub fn lambda_bar(delta: &[u64], p: u32) -> Result<Vec<u64>> {
    let b = basic_invariants(delta, p)?;
    Ok(lambda_bar_of(&b, p))
}

fn lambda_bar_of(b: &BasicInvariants, p: u32) -> Vec<u64> {
    let mut out: BTreeSet<u64> = (b.m + 1..=b.dbar)
        .filter(|&n| valuation(n, p) > b.e)
        .collect();
    out.insert(b.q);
    out.into_iter().collect()
}

/// `Λ(Δ)` and the case that defines it; requires `e(Δ) = 0`.
pub fn lambda_of(delta: &[u64], p: u32) -> Result<(Vec<u64>, Case)> {
    let prof = profile_e0(&normalize(delta)?, p)?;
    Ok((prof.lambda, prof.case))
}

fn profile_e0(delta: &[u64], p: u32) -> Result<SupportProfile> {
    let b = basic_sorted(delta, p);
    if b.e != 0 {
        return Err(Error::NonzeroValuation(b.e));
    }
    let (q, d) = (b.q, b.d);
    let lambda_bar = lambda_bar_of(&b, p);
    let window = |keep: &dyn Fn(u32) -> bool| -> Vec<u64> {
        (q..=d).filter(|&n| keep(valuation(n, p))).collect()
    };
    let lambda1 = window(&|_| true);
    let lambda1_prime = window(&|v| v != 1);
    let lambda1_dblprime = window(&|v| v == 0);
    let em = valuation(b.m, p);

    let mut prof = SupportProfile {
        delta: delta.to_vec(),
        p,
        m: b.m,
        e: b.e,
        q,
        kcap: b.kcap,
        dbar: b.dbar,
        d,
        case: Case::Case0,
        lambda: Vec::new(),
        lambda_bar,
        lambda0: Vec::new(),
        lambda1,
        lambda1_prime,
        lambda1_dblprime,
        sub: None,
    };
    if em == 0 {
        return Ok(prof);
    }

    let delta0: Vec<u64> = delta.iter().copied().take_while(|&n| n < q).collect();
    let b0 = basic_sorted(&delta0, p);
    prof.lambda0 = lambda_bar_of(&b0, p)
        .into_iter()
        .filter(|&n| n < q)
        .collect();
    prof.sub = Some(SubData {
        delta0,
        e0: b0.e,
        q0: b0.q,
    });

    let union = |a: &[u64], b: &[u64]| -> Vec<u64> {
        a.iter()
            .chain(b)
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    };
    let (case, lambda) = if em == b0.e {
        (Case::Case1, window(&|v| v < em))
    } else if b0.e > 1 {
        (Case::Case2, union(&prof.lambda0, &prof.lambda1))
    } else if b.kcap > k_delta(b0.q, q, 0, p) {
        (Case::Case3, union(&prof.lambda0, &prof.lambda1))
    } else if b0.kcap >= (q - b0.q) / p as u64 {
        (Case::Case4, union(&prof.lambda0, &prof.lambda1_prime))
    } else {
        (Case::Case5, union(&prof.lambda0, &prof.lambda1_dblprime))
    };
    prof.case = case;
    prof.lambda = lambda;
    Ok(prof)
}

/// Full profile of `Δ`. For `e(Δ) > 0` everything except `Λ̄` is obtained
/// from `Δ / p^e` and scaled back by `p^e`; `k` is not scaled.
pub fn profile_of_support(delta: &[u64], p: u32) -> Result<SupportProfile> {
    let delta = normalize(delta)?;
    let e = delta.iter().map(|&n| valuation(n, p)).min().unwrap();
    if e == 0 {
        return profile_e0(&delta, p);
    }
    let s = ppow(p, e);
    let bar: Vec<u64> = delta.iter().map(|&n| n / s).collect();
    let pb = profile_e0(&bar, p)?;
    let scale = |v: &[u64]| v.iter().map(|&n| n * s).collect::<Vec<_>>();
    let b = basic_sorted(&delta, p);
    debug_assert_eq!(b.d, pb.d * s);
    Ok(SupportProfile {
        delta: delta.clone(),
        p,
        m: b.m,
        e,
        q: b.q,
        kcap: b.kcap,
        dbar: b.dbar,
        d: b.d,
        case: pb.case,
        lambda: scale(&pb.lambda),
        lambda_bar: lambda_bar_of(&b, p),
        lambda0: scale(&pb.lambda0),
        lambda1: scale(&pb.lambda1),
        lambda1_prime: scale(&pb.lambda1_prime),
        lambda1_dblprime: scale(&pb.lambda1_dblprime),
        sub: pb.sub.map(|sd| SubData {
            delta0: scale(&sd.delta0),
            e0: sd.e0 + e,
            q0: sd.q0 * s,
        }),
    })
}

/// Profile of `supp(f)` for `f` with `ord(f) ≥ 1`.
///
/// When `e(f) = 0` the jet certifies `q`, and every invariant depends only
/// on `supp(f) ∩ [1, q]`. When `e(f) > 0` no finite jet can certify `e`; the
/// series is then read as the polynomial given by its stored terms.
pub fn profile_of_series(f: &Series) -> Result<SupportProfile> {
    if f.is_zero() {
        return Err(Error::ZeroSeries);
    }
    if !f.coeff(0).is_zero() {
        return Err(Error::Precondition(
            "series has a nonzero constant term".into(),
        ));
    }
    let delta: Vec<u64> = f.support().into_iter().map(|n| n as u64).collect();
    profile_of_support(&delta, f.ctx().p())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub count: usize,
    pub bound: u64,
    pub equality_required: bool,
}

/// Checks `♯Λ(Δ) ≤ ⌊q/p⌋`, with equality when `m = p`.
pub fn verify_bound(delta: &[u64], p: u32) -> Result<BoundReport> {
    let prof = profile_e0(&normalize(delta)?, p)?;
    check_bound(&prof)
}

pub fn check_bound(prof: &SupportProfile) -> Result<BoundReport> {
    let p = prof.p as u64;
    let count = prof.lambda.len();
    let bound = prof.q / p;
    let equality_required = prof.m == p;
    let ok = if equality_required {
        count as u64 == bound
    } else {
        count as u64 <= bound
    };
    if ok {
        Ok(BoundReport {
            count,
            bound,
            equality_required,
        })
    } else {
        Err(Error::BoundViolation {
            delta: prof.delta.clone(),
            count,
            bound,
        })
    }
}

/// The identity `k + n/p^e(n) − 1 = ⌊d/p^e(n)⌋`, checked for every `n` that
/// attains `k(Δ) = k_Δ(n)`. Returns the failing `n`, if any. Vacuous when
/// `m = q`.
pub fn kcap_identity_witness_failure(prof: &SupportProfile) -> Option<u64> {
    if prof.e != 0 || prof.m == prof.q {
        return None;
    }
    let p = prof.p;
    prof.delta
        .iter()
        .copied()
        .take_while(|&n| n < prof.q)
        .filter(|&n| k_delta(n, prof.q, 0, p) == prof.kcap)
        .find(|&n| {
            let s = ppow(p, valuation(n, p));
            prof.kcap + n / s - 1 != prof.d / s
        })
}

/// Every nonempty `Δ ⊆ [1, nmax]` with `e(Δ) = 0`, in increasing bitmask
/// order (bit `i−1` stands for `i`), optionally restricted to `|Δ| ≤ max_size`.
pub fn enumerate_supports(
    p: u32,
    nmax: u64,
    max_size: Option<usize>,
) -> Result<impl Iterator<Item = Vec<u64>>> {
    if max_size.is_none() && nmax > MAX_POWERSET_NMAX {
        return Err(Error::Budget {
            what: "support enumeration nmax",
            needed: nmax as u128,
            limit: MAX_POWERSET_NMAX as u128,
        });
    }
    if nmax > 63 {
        return Err(Error::Budget {
            what: "support enumeration nmax",
            needed: nmax as u128,
            limit: 63,
        });
    }
    let unit_mask: u64 = (1..=nmax)
        .filter(|&n| n % p as u64 != 0)
        .fold(0, |acc, n| acc | 1 << (n - 1));
    let iter: Box<dyn Iterator<Item = u64>> = match max_size {
        None => Box::new(1..1u64 << nmax),
        Some(k) => Box::new(SubsetsUpTo::new(nmax as u32, k as u32)),
    };
    Ok(iter
        .filter(move |mask| mask & unit_mask != 0)
        .map(|mask| (1..=64u64).filter(|&i| mask >> (i - 1) & 1 == 1).collect()))
}

/// Bitmasks over `n` bits with between 1 and `k` bits set, in increasing
/// numeric order.
struct SubsetsUpTo {
    next: u64,
    end: u64,
    k: u32,
}

impl SubsetsUpTo {
    fn new(n: u32, k: u32) -> Self {
        SubsetsUpTo {
            next: 1,
            end: if n == 64 { u64::MAX } else { 1 << n },
            k,
        }
    }
}

impl Iterator for SubsetsUpTo {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        while self.next < self.end {
            let cur = self.next;
            if cur.count_ones() <= self.k {
                self.next += 1;
                return Some(cur);
            }
            // skip to the next value whose lowest set bit is higher
            self.next = cur + (cur & cur.wrapping_neg());
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(delta: &[u64], p: u32) -> (u64, u32, u64, u64, u64, u64) {
        let b = basic_invariants(delta, p).unwrap();
        (b.m, b.e, b.q, b.kcap, b.dbar, b.d)
    }

    #[test]
    fn basic_examples() {
        assert_eq!(b(&[3, 5], 2), (3, 0, 3, 1, 3, 3));
        assert_eq!(b(&[2, 5], 2), (2, 0, 5, 3, 8, 7));
        assert_eq!(b(&[4, 6, 7], 2), (4, 0, 7, 1, 10, 7));
        assert_eq!(basic_invariants(&[], 2), Err(Error::EmptySupport));
        assert_eq!(basic_invariants(&[0, 1], 2), Err(Error::ZeroInSupport));
    }

    #[test]
    fn lambda_bar_examples() {
        assert_eq!(lambda_bar(&[2, 3], 2).unwrap(), vec![3, 4]);
        assert_eq!(lambda_bar(&[3], 2).unwrap(), vec![3]);
        assert_eq!(lambda_bar(&[4, 6], 2).unwrap(), vec![6, 8]);
        assert_eq!(lambda_bar(&[2, 4, 5], 2).unwrap(), vec![4, 5, 6, 8]);
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_of(&[2, 5], 2).unwrap(), (vec![5, 7], Case::Case1));
        assert_eq!(lambda_of(&[4, 6, 7], 2).unwrap(), (vec![6, 7], Case::Case4));
        assert_eq!(
            lambda_of(&[8, 12, 13], 2).unwrap(),
            (vec![12, 13], Case::Case2)
        );
        assert_eq!(lambda_of(&[4, 6], 2), Err(Error::NonzeroValuation(1)));
    }

    #[test]
    fn scaled_profile() {
        let prof = profile_of_support(&[4, 6], 2).unwrap();
        assert_eq!((prof.m, prof.e, prof.q, prof.d), (4, 1, 6, 6));
        assert_eq!(prof.lambda, vec![6]);
        assert_eq!(prof.case, Case::Case1);
    }

    #[test]
    fn bound_examples() {
        let r = verify_bound(&[2, 5], 2).unwrap();
        assert_eq!((r.count, r.bound, r.equality_required), (2, 2, true));
        assert_eq!(verify_bound(&[3, 5], 2).unwrap().count, 0);
        let r = verify_bound(&[4, 6, 7], 2).unwrap();
        assert_eq!((r.count, r.bound), (2, 3));
    }

    #[test]
    fn kcap_identity_on_examples() {
        for delta in [&[2u64, 5][..], &[4, 6, 7], &[6, 7], &[8, 12, 13]] {
            let prof = profile_of_support(delta, 2).unwrap();
            assert_eq!(kcap_identity_witness_failure(&prof), None, "{delta:?}");
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_supports(2, 3, None).unwrap().count(), 6);
        let one: Vec<_> = enumerate_supports(2, 1, None).unwrap().collect();
        assert_eq!(one, vec![vec![1]]);
        let three: Vec<_> = enumerate_supports(3, 2, None).unwrap().collect();
        assert_eq!(three, vec![vec![1], vec![2], vec![1, 2]]);
        assert!(enumerate_supports(2, 30, None).is_err());
        let capped: Vec<_> = enumerate_supports(2, 4, Some(1)).unwrap().collect();
        assert_eq!(capped, vec![vec![1], vec![3]]);
        let capped2 = enumerate_supports(2, 10, Some(2)).unwrap().count();
        // singletons and pairs with at least one odd element: 5 + (45 - 10)
        assert_eq!(capped2, 40);
    }
}
