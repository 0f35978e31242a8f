//! Serializable reports shared by the command line tool and the C API.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{format_g_poly, Field, FieldCtx};
use crate::moduli::{milnor, moduli_report, Milnor};
use crate::profile::{profile_of_series, SupportProfile};
use crate::pseries::{format_series, parse_series, parse_terms, CoordChange, Series};
use crate::reduce::{determinacy_bound, match_jets, normal_form, Determinacy, ReduceOptions};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub deg: usize,
    pub modulus: String,
}

impl FieldInfo {
    pub fn of(ctx: &FieldCtx) -> Self {
        FieldInfo {
            p: ctx.p(),
            deg: ctx.deg(),
            modulus: format_g_poly(ctx.modulus(), ctx.p()),
        }
    }
}

/// Field from the command line triple `(p, deg, modulus)`. The modulus is
/// a polynomial in `g` such as `g^2+g+1`; `deg`, when given, must match it.
pub fn resolve_field(p: u32, deg: Option<usize>, modulus: Option<&str>) -> Result<Field> {
    match modulus {
        None => FieldCtx::new(p, deg.unwrap_or(1)),
        Some(text) => {
            let prime = FieldCtx::prime(p)?;
            let terms = parse_terms(&text.replace('g', "x"), &prime)?;
            let top = terms.keys().next_back().copied().unwrap_or(0);
            if let Some(deg) = deg.filter(|&d| d != top) {
                return Err(Error::InvalidModulus(format!(
                    "modulus has degree {top}, --deg says {deg}"
                )));
            }
            let coeffs = (0..=top)
                .map(|i| terms.get(&i).map_or(0, |c| c.index() as u32))
                .collect();
            FieldCtx::with_modulus(p, coeffs)
        }
    }
}

/// Parses `text` and fixes the precision: an explicit `trunc` wins,
/// otherwise `max(largest exponent, d̄(f) + 1)`.
pub fn parse_with_default_trunc(text: &str, ctx: &Field, trunc: Option<usize>) -> Result<Series> {
    let f = parse_series(text, ctx, trunc)?;
    if trunc.is_some() {
        return Ok(f);
    }
    Ok(f.with_trunc(f.trunc().max(default_trunc(&f).unwrap_or(0))))
}

/// `d̄(f) + 1` for the part of `f` without constant term, when defined.
pub fn default_trunc(f: &Series) -> Option<usize> {
    let c = f.coeff(0);
    let g = if c.is_zero() {
        f.clone()
    } else {
        f.sub(&Series::monomial(f.ctx(), 0, c, f.trunc()).ok()?)
            .ok()?
    };
    profile_of_series(&g)
        .ok()
        .map(|prof| prof.dbar as usize + 1)
}

fn non_constant(f: &Series) -> Result<Series> {
    let c = f.coeff(0);
    if c.is_zero() {
        return Ok(f.clone());
    }
    if f.support() == [0] {
        return Err(Error::ConstantSeries);
    }
    f.sub(&Series::monomial(f.ctx(), 0, c, f.trunc())?)
}

pub fn coord_terms(phi: &CoordChange) -> Vec<(usize, String)> {
    phi.as_series()
        .terms()
        .map(|(n, c)| (n, c.to_string()))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantsReport {
    pub field: FieldInfo,
    pub trunc: usize,
    #[serde(flatten)]
    pub profile: SupportProfile,
}

pub fn invariants_report(f: &Series) -> Result<InvariantsReport> {
    Ok(InvariantsReport {
        field: FieldInfo::of(f.ctx()),
        trunc: f.trunc(),
        profile: profile_of_series(&non_constant(f)?)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalFormReport {
    pub m: u64,
    pub lambda: BTreeMap<String, String>,
    pub leading: String,
    pub constant: Option<String>,
    pub normal_form: String,
    pub phi: Vec<(usize, String)>,
    pub guarantee_order: u64,
    /// Field of the normal form and of `phi`; may extend the input field.
    pub field: FieldInfo,
    pub input_field: FieldInfo,
    pub trunc: usize,
    pub case: String,
    pub steps: usize,
}

pub fn normal_form_report(f: &Series, opts: &ReduceOptions) -> Result<NormalFormReport> {
    let nf = normal_form(f, opts)?;
    let mut shown = nf.series.clone();
    if let Some(c) = &nf.constant {
        shown = shown.add(&Series::monomial(&nf.ctx, 0, c.clone(), shown.trunc())?)?;
    }
    Ok(NormalFormReport {
        m: nf.m,
        lambda: nf
            .lambda
            .iter()
            .map(|(n, c)| (n.to_string(), c.to_string()))
            .collect(),
        leading: nf.leading.to_string(),
        constant: nf.constant.as_ref().map(|c| c.to_string()),
        normal_form: format_series(&shown),
        phi: coord_terms(&nf.phi),
        guarantee_order: nf.guarantee_order,
        field: FieldInfo::of(&nf.ctx),
        input_field: FieldInfo::of(f.ctx()),
        trunc: f.trunc(),
        case: nf.case.to_string(),
        steps: nf.steps.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MilnorReport {
    pub field: FieldInfo,
    pub trunc: usize,
    /// `null` when infinite.
    pub mu: Option<u64>,
    pub infinite: bool,
    pub e: u32,
}

pub fn milnor_report(f: &Series) -> Result<MilnorReport> {
    let g = non_constant(f)?;
    let (mu, e) = match milnor(&g)? {
        Milnor::Finite(mu) => (Some(mu), 0),
        Milnor::Infinite { e } => (None, e),
    };
    Ok(MilnorReport {
        field: FieldInfo::of(f.ctx()),
        trunc: f.trunc(),
        mu,
        infinite: mu.is_none(),
        e,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModalityReport {
    pub mu: u64,
    pub modality: u64,
    pub unfolding_basis: Vec<u64>,
    pub stratum_dim: u64,
    pub stratum_free_exponents: Vec<u64>,
    pub lambda_count: usize,
    pub field: FieldInfo,
    pub trunc: usize,
}

/// Fails with [`Error::InfiniteMilnor`] when `e(f) > 0`.
pub fn modality_report(f: &Series) -> Result<ModalityReport> {
    let g = non_constant(f)?;
    let r = moduli_report(&g)?;
    let (Some(mu), Some(modality), Some(stratum_dim)) = (r.mu, r.modality, r.stratum_dim) else {
        return Err(Error::InfiniteMilnor(r.e));
    };
    Ok(ModalityReport {
        mu,
        modality,
        unfolding_basis: r.unfolding_basis,
        stratum_dim,
        stratum_free_exponents: r.stratum_free_exponents,
        lambda_count: r.lambda_count,
        field: FieldInfo::of(f.ctx()),
        trunc: f.trunc(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DeterminacyReport {
    pub d: u64,
    /// `e(f) > 0`: `f` is then only determined among series with the same
    /// `e`.
    pub infinite_milnor: bool,
    pub e: u32,
    pub field: FieldInfo,
    pub trunc: usize,
}

pub fn determinacy_report(f: &Series) -> Result<DeterminacyReport> {
    let g = non_constant(f)?;
    let (d, e) = match determinacy_bound(&g)? {
        Determinacy::Finite(d) => (d, 0),
        Determinacy::InfiniteMilnor { e, d } => (d, e),
    };
    Ok(DeterminacyReport {
        d,
        infinite_milnor: e > 0,
        e,
        field: FieldInfo::of(f.ctx()),
        trunc: f.trunc(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub matched: bool,
    /// Order up to which `f ∘ phi` and `g` agree.
    pub order: Option<u64>,
    pub phi: Option<Vec<(usize, String)>>,
    pub field: FieldInfo,
    pub trunc: usize,
    pub reason: Option<String>,
}

/// `matched = false` with a reason when the preconditions fail (different
/// `e`, or jets of order `d(f)` differ); other errors propagate.
pub fn match_report(f: &Series, g: &Series, opts: &ReduceOptions) -> Result<MatchReport> {
    let trunc = f.trunc().min(g.trunc());
    match match_jets(f, g, opts) {
        Ok(phi) => Ok(MatchReport {
            matched: true,
            order: Some(profile_of_series(f)?.dbar),
            phi: Some(coord_terms(&phi)),
            field: FieldInfo::of(phi.ctx()),
            trunc,
            reason: None,
        }),
        Err(Error::Precondition(reason)) => Ok(MatchReport {
            matched: false,
            order: None,
            phi: None,
            field: FieldInfo::of(f.ctx()),
            trunc,
            reason: Some(reason),
        }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCounterexample {
    pub delta: Vec<u64>,
    pub m: u64,
    pub q: u64,
    pub case: String,
    pub lambda: Vec<u64>,
    pub count: usize,
    pub bound: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundSurvey {
    pub p: u32,
    pub nmax: u64,
    pub mode: &'static str,
    pub seed: Option<u64>,
    pub supports_checked: u64,
    /// Supports with `♯Λ > ⌊q/p⌋`, or `♯Λ ≠ ⌊q/p⌋` when `m = p`.
    pub violations: u64,
    pub equality_cases: u64,
    pub equality_failures: u64,
    /// Supports where `k + n/p^e(n) − 1 = ⌊d/p^e(n)⌋` fails for some `n`
    /// attaining `k`.
    pub kcap_identity_failures: u64,
    /// The first violations in enumeration order.
    pub counterexamples: Vec<BoundCounterexample>,
}

const SHOWN_COUNTEREXAMPLES: usize = 10;

/// Checks `♯Λ(Δ) ≤ ⌊q/p⌋` (equality at `m = p`) over every `Δ ⊆ [1, nmax]`
/// with `e(Δ) = 0`, or over `samples` random such supports drawn with
/// `seed`.
pub fn lambda_bound_survey(
    p: u32,
    nmax: u64,
    samples: Option<u64>,
    seed: u64,
    budget: u128,
) -> Result<BoundSurvey> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    if !crate::ff::is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    let supports: Box<dyn Iterator<Item = Vec<u64>>> = match samples {
        None => {
            let needed = 1u128.checked_shl(nmax as u32).unwrap_or(u128::MAX);
            if needed > budget {
                return Err(Error::Budget {
                    what: "support enumeration",
                    needed,
                    limit: budget,
                });
            }
            Box::new(crate::profile::enumerate_supports(p, nmax, None)?)
        }
        Some(n) => {
            if nmax == 0 || nmax > 63 {
                return Err(Error::Budget {
                    what: "sampled support range",
                    needed: nmax as u128,
                    limit: 63,
                });
            }
            if n as u128 > budget {
                return Err(Error::Budget {
                    what: "support samples",
                    needed: n as u128,
                    limit: budget,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let units: Vec<u64> = (1..=nmax).filter(|i| i % p as u64 != 0).collect();
            if units.is_empty() {
                return Err(Error::Precondition(format!(
                    "no exponent in [1, {nmax}] is prime to {p}"
                )));
            }
            Box::new((0..n).map(move |_| {
                let mut delta: Vec<u64> = (1..=nmax).filter(|_| rng.gen_bool(0.5)).collect();
                if delta.iter().all(|i| i % p as u64 == 0) {
                    delta.push(units[rng.gen_range(0..units.len())]);
                    delta.sort_unstable();
                }
                delta
            }))
        }
    };
    let mut survey = BoundSurvey {
        p,
        nmax,
        mode: if samples.is_some() {
            "sampled"
        } else {
            "exhaustive"
        },
        seed: samples.map(|_| seed),
        supports_checked: 0,
        violations: 0,
        equality_cases: 0,
        equality_failures: 0,
        kcap_identity_failures: 0,
        counterexamples: Vec::new(),
    };
    for delta in supports {
        let prof = crate::profile::profile_of_support(&delta, p)?;
        survey.supports_checked += 1;
        let equality = prof.m == p as u64;
        survey.equality_cases += equality as u64;
        if crate::profile::kcap_identity_witness_failure(&prof).is_some() {
            survey.kcap_identity_failures += 1;
        }
        if let Err(Error::BoundViolation { count, bound, .. }) = crate::profile::check_bound(&prof)
        {
            survey.violations += 1;
            survey.equality_failures += equality as u64;
            if survey.counterexamples.len() < SHOWN_COUNTEREXAMPLES {
                survey.counterexamples.push(BoundCounterexample {
                    delta: prof.delta.clone(),
                    m: prof.m,
                    q: prof.q,
                    case: prof.case.to_string(),
                    lambda: prof.lambda.clone(),
                    count,
                    bound,
                });
            }
        }
    }
    Ok(survey)
}
