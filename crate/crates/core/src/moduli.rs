//! Milnor number, right modality and the μ-constant stratum of the
//! unfolding `f + Σ_{i ≤ μ} t_i x^i`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{valuation, FieldElem};
use crate::profile::profile_of_series;
use crate::pseries::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Milnor {
    Finite(u64),
    /// `f' ≡ 0`; carries `e(f) > 0`.
    Infinite {
        e: u32,
    },
}

impl Milnor {
    pub fn finite(self) -> Option<u64> {
        match self {
            Milnor::Finite(mu) => Some(mu),
            Milnor::Infinite { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuliReport {
    pub mu: Option<u64>,
    pub e: u32,
    pub modality: Option<u64>,
    pub unfolding_basis: Vec<u64>,
    pub stratum_dim: Option<u64>,
    pub stratum_free_exponents: Vec<u64>,
    pub lambda_count: usize,
}

/// `μ(f) = ord(f')`, cross-checked against `q(f) − 1`.
pub fn milnor(f: &Series) -> Result<Milnor> {
    let prof = profile_of_series(f)?;
    let direct = f.derivative().ord();
    match (direct, prof.e) {
        (Some(ord), 0) => {
            let mu = ord as u64;
            if mu + 1 != prof.q {
                return Err(Error::Internal(format!(
                    "ord(f') = {mu} but q(f) = {}",
                    prof.q
                )));
            }
            Ok(Milnor::Finite(mu))
        }
        (None, e) if e > 0 => Ok(Milnor::Infinite { e }),
        (ord, e) => Err(Error::Internal(format!(
            "ord(f') = {ord:?} inconsistent with e(f) = {e}"
        ))),
    }
}

fn finite_mu(f: &Series) -> Result<u64> {
    match milnor(f)? {
        Milnor::Finite(mu) => Ok(mu),
        Milnor::Infinite { e } => Err(Error::InfiniteMilnor(e)),
    }
}

/// Right modality `⌊μ/p⌋`.
pub fn modality(f: &Series) -> Result<u64> {
    Ok(finite_mu(f)? / f.ctx().p() as u64)
}

/// Exponents `1..=μ` of the monomial basis of `⟨x⟩/⟨x·f'⟩`.
///
/// Confirms the quotient dimension on the way: `ord(x·f') = μ + 1`, so
/// `x^(μ+1)` and everything above lie in the ideal.
pub fn unfolding_basis(f: &Series) -> Result<Vec<u64>> {
    let mu = finite_mu(f)?;
    let df = f.derivative();
    let xf = Series::from_terms(
        f.ctx(),
        df.terms().map(|(n, c)| (n + 1, c.clone())),
        df.trunc() + 1,
    )?;
    if xf.ord() != Some(mu as usize + 1) {
        return Err(Error::Internal(format!(
            "ord(x f') = {:?}, expected {}",
            xf.ord(),
            mu + 1
        )));
    }
    Ok((1..=mu).collect())
}

/// Free coordinates `{i ≤ μ : p | i}` of the μ-constant stratum.
pub fn stratum_free_exponents(mu: u64, p: u32) -> Vec<u64> {
    (1..=mu).filter(|i| i % p as u64 == 0).collect()
}

/// `(dim Σ_μ, free exponents)`.
pub fn stratum_dim(f: &Series) -> Result<(u64, Vec<u64>)> {
    let mu = finite_mu(f)?;
    let free = stratum_free_exponents(mu, f.ctx().p());
    Ok((free.len() as u64, free))
}

/// `f + Σ t_i x^i`.
pub fn perturb(f: &Series, t: &BTreeMap<u64, FieldElem>) -> Result<Series> {
    let shift = Series::from_terms(
        f.ctx(),
        t.iter().map(|(&i, c)| (i as usize, c.clone())),
        f.trunc(),
    )?;
    f.add(&shift)
}

/// Milnor number of `f_t` as read off the stratum description: the
/// smallest `i` with `t_i ≠ 0` and `p ∤ i` gives `μ(f_t) = i − 1`; without
/// such `i` the Milnor number stays `μ(f)`.
pub fn predicted_perturbed_milnor(mu: u64, p: u32, t: &BTreeMap<u64, FieldElem>) -> u64 {
    t.iter()
        .filter(|(&i, c)| i <= mu && !c.is_zero() && valuation(i, p) == 0)
        .map(|(&i, _)| i - 1)
        .next()
        .unwrap_or(mu)
}

pub fn moduli_report(f: &Series) -> Result<ModuliReport> {
    let prof = profile_of_series(f)?;
    let mu = milnor(f)?.finite();
    let p = f.ctx().p();
    let (unfolding_basis, stratum_dim, stratum_free_exponents) = match mu {
        Some(mu) => {
            let free = stratum_free_exponents(mu, p);
            (unfolding_basis(f)?, Some(free.len() as u64), free)
        }
        None => (Vec::new(), None, Vec::new()),
    };
    Ok(ModuliReport {
        mu,
        e: prof.e,
        modality: mu.map(|mu| mu / p as u64),
        unfolding_basis,
        stratum_dim,
        stratum_free_exponents,
        lambda_count: prof.lambda.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{Field, FieldCtx};
    use crate::profile::{enumerate_supports, profile_of_support};
    use crate::pseries::parse_series;

    fn series(p: u32, s: &str) -> Series {
        let ctx: Field = FieldCtx::prime(p).unwrap();
        parse_series(s, &ctx, None).unwrap()
    }

    #[test]
    fn milnor_examples() {
        assert_eq!(milnor(&series(2, "x^2 + x^5")).unwrap(), Milnor::Finite(4));
        for p in [2, 3, 5] {
            let f = series(p, &format!("x^{}", p + 1));
            assert_eq!(milnor(&f).unwrap(), Milnor::Finite(p as u64));
        }
        assert_eq!(
            milnor(&series(2, "x^4")).unwrap(),
            Milnor::Infinite { e: 2 }
        );
    }

    #[test]
    fn modality_examples() {
        assert_eq!(modality(&series(2, "x^3")).unwrap(), 1);
        assert_eq!(modality(&series(2, "x^2 + x^5")).unwrap(), 2);
        assert_eq!(modality(&series(5, "x^3")).unwrap(), 0);
        assert_eq!(
            modality(&series(2, "x^4")).unwrap_err(),
            Error::InfiniteMilnor(2)
        );
    }

    #[test]
    fn unfolding_examples() {
        assert_eq!(
            unfolding_basis(&series(2, "x^2 + x^5")).unwrap(),
            vec![1, 2, 3, 4]
        );
        assert_eq!(unfolding_basis(&series(3, "x^2")).unwrap(), vec![1]);
        assert_eq!(
            unfolding_basis(&series(2, "x^7")).unwrap(),
            (1..=6).collect::<Vec<_>>()
        );
    }

    #[test]
    fn stratum_examples() {
        assert_eq!(stratum_free_exponents(4, 2), vec![2, 4]);
        assert_eq!(stratum_free_exponents(1, 7), Vec::<u64>::new());
        assert_eq!(stratum_free_exponents(7, 3), vec![3, 6]);
        assert_eq!(
            stratum_dim(&series(2, "x^2 + x^5")).unwrap(),
            (2, vec![2, 4])
        );
    }

    #[test]
    fn perturbation_drops_milnor() {
        let f = series(3, "x^3 + x^8");
        let ctx = f.ctx().clone();
        let mu = finite_mu(&f).unwrap();
        assert_eq!(mu, 7);
        let t = BTreeMap::from([(3, ctx.one()), (5, ctx.from_u64(2)), (7, ctx.one())]);
        let ft = perturb(&f, &t).unwrap();
        assert_eq!(finite_mu(&ft).unwrap(), 4);
        assert_eq!(predicted_perturbed_milnor(mu, 3, &t), 4);
        let free = BTreeMap::from([(3, ctx.one()), (6, ctx.one())]);
        assert_eq!(finite_mu(&perturb(&f, &free).unwrap()).unwrap(), mu);
    }

    #[test]
    fn lambda_sizes_within_modality_for_small_mu() {
        // Families indexed by supports with q(Δ) ≤ μ + 1 never need more
        // than ⌊μ/p⌋ parameters, with equality reached at m = p.
        for p in [2u32, 3] {
            for mu in 1..=12u64 {
                let mut best = 0;
                for delta in enumerate_supports(p, mu + 1, None).unwrap() {
                    let prof = profile_of_support(&delta, p).unwrap();
                    if prof.q <= mu + 1 {
                        best = best.max(prof.lambda.len() as u64);
                    }
                }
                assert_eq!(best, mu / p as u64, "p={p} mu={mu}");
            }
        }
    }

    #[test]
    fn report_for_infinite_milnor() {
        let r = moduli_report(&series(2, "x^4 + x^6")).unwrap();
        assert_eq!((r.mu, r.e, r.modality), (None, 1, None));
        let r = moduli_report(&series(2, "x^2 + x^5")).unwrap();
        assert_eq!(
            (r.mu, r.modality, r.stratum_dim, r.lambda_count),
            (Some(4), Some(2), Some(2), 2)
        );
    }
}
