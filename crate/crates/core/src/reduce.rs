//! Normal forms under right equivalence, with explicit coordinate changes.
//!
//! Everything is driven by one elimination step: substitute
//! `x ↦ x + u·x^(l+1)` into the current series and choose `u` so that the
//! coefficient at a target exponent `t` takes a prescribed value. The
//! substitution sends `c_n x^n` to `Σ_i binom(n, i) u^i c_n x^(n + l·i)`, and
//! `binom(n, i)` vanishes mod `p` unless `p^e(n)` divides `i`, so each term
//! first moves at `n + l·p^e(n)`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::ff::{binom_mod, nth_root, solve_poly, valuation, Field, FieldElem, DEFAULT_MAX_DEGREE};
use crate::profile::{profile_of_series, Case, SupportProfile};
use crate::pseries::{transport_change, CoordChange, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Largest degree over `F_p` any working field may reach.
    pub max_field_degree: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            max_field_degree: DEFAULT_MAX_DEGREE,
        }
    }
}

/// Audit record of one substitution `x ↦ x + u·x^(shift+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElimStep {
    pub target: usize,
    pub shift: usize,
    pub u: FieldElem,
    /// Coefficients of the solved polynomial in `U`, keyed by power; the
    /// power 0 entry is `c_t − wanted`.
    pub equation: BTreeMap<usize, FieldElem>,
    /// No coefficient below the target moved.
    pub exact: bool,
}

#[derive(Debug, Clone)]
pub struct NormalFormResult {
    pub m: u64,
    /// `λ_n` for every `n ∈ Λ(f)`; zero values are kept.
    pub lambda: BTreeMap<u64, FieldElem>,
    /// Coefficient of `x^m` in the normal form: 1 unless no suitable root
    /// exists in the final field.
    pub leading: FieldElem,
    /// Constant term of the input, carried along unchanged.
    pub constant: Option<FieldElem>,
    pub phi: CoordChange,
    /// `d(f)`: the normal form agrees with `f ∘ phi` up to this order.
    pub guarantee_order: u64,
    pub case: Case,
    pub ctx: Field,
    pub steps: Vec<ElimStep>,
    /// The normal form as a series of precision `guarantee_order`, without
    /// the constant term.
    pub series: Series,
    pub profile: SupportProfile,
}

/// `d(f)`, or the `e(f) > 0` marker together with the scaled `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Determinacy {
    Finite(u64),
    InfiniteMilnor { e: u32, d: u64 },
}

fn poly_is_nonconstant(poly: &BTreeMap<usize, FieldElem>) -> bool {
    poly.iter().any(|(&i, c)| i > 0 && !c.is_zero())
}

/// The polynomial `P(U)` with `coeff_t(h ∘ (x + U·x^(l+1))) = c_t + P(U)`,
/// or `None` when some exponent below `t` outside `movable` would change.
fn shift_polynomial(
    h: &Series,
    t: usize,
    l: usize,
    movable: &BTreeSet<usize>,
) -> Option<(BTreeMap<usize, FieldElem>, bool)> {
    let p = h.ctx().p();
    let mut poly: BTreeMap<usize, FieldElem> = BTreeMap::new();
    let mut exact = true;
    for (n, c) in h.terms() {
        if n >= t {
            break;
        }
        let step = (p as usize).pow(valuation(n as u64, p));
        let mut i = step;
        while i <= n && n + l * i <= t {
            let b = binom_mod(n as u64, i as u64, p);
            if b != 0 {
                let s = n + l * i;
                if s < t {
                    exact = false;
                    if !movable.contains(&s) {
                        return None;
                    }
                } else {
                    let term = c.scale(b as u64);
                    let slot = poly.entry(i).or_insert_with(|| h.ctx().zero());
                    *slot = &*slot + &term;
                }
            }
            i += step;
        }
    }
    Some((poly, exact))
}

/// One elimination step at exponent `t`: sets the coefficient of `x^t` to
/// `wanted` (zero when `None`).
///
/// Coefficients below `t` change only at exponents in `movable`. A shift
/// with no effect below `t` is preferred; otherwise the smallest admissible
/// shift is used. The series may come back in an extension field.
pub fn eliminate_at(
    h: &Series,
    t: usize,
    movable: &BTreeSet<usize>,
    wanted: Option<&FieldElem>,
    opts: &ReduceOptions,
) -> Result<(ElimStep, Series)> {
    let ctx = h.ctx().clone();
    let wanted = match wanted {
        Some(w) => ctx.embed(w)?,
        None => ctx.zero(),
    };
    let ct = h.coeff(t);
    let m = h.ord().ok_or(Error::ZeroSeries)?;
    if t > h.trunc() {
        return Err(Error::TruncTooSmall {
            needed: t,
            have: h.trunc(),
        });
    }
    if ct == wanted {
        let step = ElimStep {
            target: t,
            shift: 0,
            u: ctx.zero(),
            equation: BTreeMap::new(),
            exact: true,
        };
        return Ok((step, h.clone()));
    }
    let mut fallback = None;
    let mut chosen = None;
    for l in 1..=t.saturating_sub(m) {
        if let Some((poly, exact)) = shift_polynomial(h, t, l, movable) {
            if !poly_is_nonconstant(&poly) {
                continue;
            }
            if exact {
                chosen = Some((l, poly, true));
                break;
            }
            if fallback.is_none() {
                fallback = Some((l, poly, false));
            }
        }
    }
    let Some((l, mut poly, exact)) = chosen.or(fallback) else {
        return Err(Error::NoEliminationShift {
            target: t,
            state: format!("{h:?}"),
        });
    };
    poly.insert(0, &ct - &wanted);
    let degree = *poly.keys().next_back().unwrap();
    let mut dense = vec![ctx.zero(); degree + 1];
    for (&i, c) in &poly {
        dense[i] = c.clone();
    }
    let (u, new_ctx) = solve_poly(&dense, opts.max_field_degree)?;
    let h = h.embed(&new_ctx)?;
    let out = h.substitute_elementary(&u, l)?;

    let wanted = new_ctx.embed(&wanted)?;
    if out.coeff(t) != wanted {
        return Err(Error::Internal(format!(
            "elimination at {t} left {} instead of {wanted}",
            out.coeff(t)
        )));
    }
    for s in m..t {
        if !movable.contains(&s) && out.coeff(s) != h.coeff(s) {
            return Err(Error::Internal(format!(
                "elimination at {t} changed the coefficient at {s}"
            )));
        }
    }
    let equation = poly
        .into_iter()
        .map(|(i, c)| Ok((i, new_ctx.embed(&c)?)))
        .collect::<Result<_>>()?;
    let step = ElimStep {
        target: t,
        shift: l,
        u,
        equation,
        exact,
    };
    Ok((step, out))
}

/// Running state of a reduction: the current series, the accumulated
/// coordinate change and the audit trail. All three live in the same field.
struct Reduction {
    h: Series,
    phi: CoordChange,
    steps: Vec<ElimStep>,
}

impl Reduction {
    fn new(h: Series) -> Self {
        let phi = CoordChange::identity(h.ctx(), h.trunc());
        Reduction {
            h,
            phi,
            steps: Vec::new(),
        }
    }

    fn ctx(&self) -> &Field {
        self.h.ctx()
    }

    fn eliminate(
        &mut self,
        t: usize,
        movable: &BTreeSet<usize>,
        wanted: Option<&FieldElem>,
        opts: &ReduceOptions,
    ) -> Result<()> {
        let (step, h) = eliminate_at(&self.h, t, movable, wanted, opts)?;
        if step.shift == 0 {
            return Ok(());
        }
        let phi = self.phi.as_series().embed(h.ctx())?;
        let phi = phi.substitute_elementary(&step.u, step.shift)?;
        self.phi = CoordChange::new(phi)?;
        self.h = h;
        self.steps.push(step);
        Ok(())
    }

    /// Applies `x ↦ a·x`.
    fn scale(&mut self, a: &FieldElem) -> Result<()> {
        let scaled = |s: &Series| -> Result<Series> {
            let terms = s
                .terms()
                .map(|(n, c)| (n, c * &a.pow(n as u128)))
                .collect::<Vec<_>>();
            Series::from_terms(s.ctx(), terms, s.trunc())
        };
        self.h = scaled(&self.h)?;
        self.phi = CoordChange::new(scaled(self.phi.as_series())?)?;
        Ok(())
    }

    /// Scales the leading coefficient `c_m` to 1 if an `m`-th root of
    /// `1/c_m` exists, extending the field when `extend` is set.
    fn normalize_leading(&mut self, extend: bool, opts: &ReduceOptions) -> Result<()> {
        let m = self.h.ord().ok_or(Error::ZeroSeries)?;
        let target = self.h.coeff(m).inv()?;
        if target.is_one() {
            return Ok(());
        }
        let root = match nth_root(&target, m as u64) {
            Some(a) => a,
            None if extend => {
                let mut coeffs = vec![self.ctx().zero(); m + 1];
                coeffs[0] = target.neg();
                coeffs[m] = self.ctx().one();
                let (a, ctx) = solve_poly(&coeffs, opts.max_field_degree)?;
                self.h = self.h.embed(&ctx)?;
                self.phi = self.phi.embed(&ctx)?;
                a
            }
            None => return Ok(()),
        };
        self.scale(&root)
    }
}

fn check_unit_free(f: &Series) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroSeries);
    }
    if !f.coeff(0).is_zero() {
        return Err(Error::Precondition(
            "series has a nonzero constant term".into(),
        ));
    }
    Ok(())
}

/// Reduces `f` with `e(m(f)) = e(f)` to `x^m`.
///
/// For `e(f) = 0` every exponent above `m` is cleared with the shift
/// `t − m`; otherwise the compressed series is reduced and the change is
/// lifted. The returned series is `j^trunc(f ∘ φ)`, which is exactly `x^m`.
pub fn reduce_monomial(f: &Series, opts: &ReduceOptions) -> Result<(Series, CoordChange)> {
    check_unit_free(f)?;
    let p = f.ctx().p();
    let m = f.ord().unwrap();
    let e = f.e()?;
    if valuation(m as u64, p) != e {
        return Err(Error::Precondition(format!(
            "e(m) = {} differs from e(f) = {e}",
            valuation(m as u64, p)
        )));
    }
    if e > 0 {
        let (bar, e) = f.to_bar()?;
        let (_, psi) = reduce_monomial(&bar, opts)?;
        let chi = transport_change(&psi, e);
        let f = f.embed(chi.ctx())?;
        let out = f.compose(&chi)?;
        return Ok((out, chi.with_trunc(f.trunc())));
    }
    let mut red = Reduction::new(f.clone());
    let keep = BTreeSet::from([m]);
    for t in m + 1..=f.trunc() {
        red.eliminate(t, &keep, None, opts)?;
    }
    red.normalize_leading(true, opts)?;
    Ok((red.h, red.phi))
}

/// Pre-normal form: support in `{m} ∪ Λ̄(f)`, for `e(f) = 0`.
///
/// Splits `f = f₀ + f₁` into the terms of exponent prime to `p` and the
/// rest, reduces `f₀` to `x^q`, applies the same change to `f`, and keeps
/// the jet of order `d̄(f)`.
pub fn prenormal(f: &Series, opts: &ReduceOptions) -> Result<(Series, CoordChange)> {
    check_unit_free(f)?;
    let prof = profile_of_series(f)?;
    if prof.e != 0 {
        return Err(Error::NonzeroValuation(prof.e));
    }
    let dbar = prof.dbar as usize;
    if f.trunc() < dbar {
        return Err(Error::TruncTooSmall {
            needed: dbar,
            have: f.trunc(),
        });
    }
    let p = f.ctx().p() as usize;
    let f0 = Series::from_terms(
        f.ctx(),
        f.terms()
            .filter(|(n, _)| n % p != 0)
            .map(|(n, c)| (n, c.clone())),
        f.trunc(),
    )?;
    let (_, phi) = reduce_monomial(&f0, opts)?;
    let g = f.embed(phi.ctx())?.compose(&phi)?;
    Ok((g.jet(dbar), phi))
}

/// Normal form `x^m + Σ_{n ∈ Λ(f)} λ_n x^n` with its witness.
///
/// All cases go through the same loop: every exponent `t ∈ (m, d]` outside
/// `{m} ∪ Λ(f)` is cleared in increasing order, with exponents of the keep
/// set allowed to absorb side effects.
pub fn normal_form(f: &Series, opts: &ReduceOptions) -> Result<NormalFormResult> {
    if f.is_zero() {
        return Err(Error::ZeroSeries);
    }
    let constant = f.coeff(0);
    if f.support() == [0] {
        return Err(Error::ConstantSeries);
    }
    let constant = (!constant.is_zero()).then_some(constant);
    let f = match &constant {
        Some(c) => f.sub(&Series::monomial(f.ctx(), 0, c.clone(), f.trunc())?)?,
        None => f.clone(),
    };
    let prof = profile_of_series(&f)?;
    if f.trunc() < prof.dbar as usize {
        return Err(Error::TruncTooSmall {
            needed: prof.dbar as usize,
            have: f.trunc(),
        });
    }
    let mut res = if prof.e == 0 {
        normal_form_e0(&f, &prof, opts)?
    } else {
        let (bar, e) = f.to_bar()?;
        let inner = normal_form_e0(&bar, &profile_of_series(&bar)?, opts)?;
        let s = (f.ctx().p() as u64).pow(e);
        let chi = transport_change(&inner.phi, e).with_trunc(f.trunc());
        NormalFormResult {
            m: prof.m,
            lambda: inner.lambda.into_iter().map(|(n, c)| (n * s, c)).collect(),
            leading: inner.leading,
            constant: None,
            phi: chi,
            guarantee_order: prof.d,
            case: prof.case,
            ctx: inner.ctx,
            steps: inner.steps,
            series: inner.series.decompress(e).jet(prof.d as usize),
            profile: prof,
        }
    };
    res.constant = match constant {
        Some(c) => Some(res.ctx.embed(&c)?),
        None => None,
    };
    Ok(res)
}

fn normal_form_e0(
    f: &Series,
    prof: &SupportProfile,
    opts: &ReduceOptions,
) -> Result<NormalFormResult> {
    let m = prof.m as usize;
    let d = prof.d as usize;
    let keep: BTreeSet<usize> = std::iter::once(m)
        .chain(prof.lambda.iter().map(|&n| n as usize))
        .collect();
    let mut red = Reduction::new(f.clone());
    for t in m + 1..=d {
        if !keep.contains(&t) {
            red.eliminate(t, &keep, None, opts)?;
        }
    }
    red.normalize_leading(false, opts)?;
    let series = red.h.jet(d);
    if let Some(stray) = series.support().into_iter().find(|n| !keep.contains(n)) {
        return Err(Error::Internal(format!(
            "normal form has a term at {stray} outside the keep set"
        )));
    }
    let lambda = prof
        .lambda
        .iter()
        .map(|&n| (n, series.coeff(n as usize)))
        .collect();
    Ok(NormalFormResult {
        m: prof.m,
        lambda,
        leading: series.coeff(m),
        constant: None,
        phi: red.phi,
        guarantee_order: prof.d,
        case: prof.case,
        ctx: red.h.ctx().clone(),
        steps: red.steps,
        series,
        profile: prof.clone(),
    })
}

/// A coordinate change `φ` with `j^d̄(f ∘ φ) = j^d̄(g)`, for `e(f) = e(g)` and
/// `j^d(f) = j^d(g)` where `d = d(f)` and `d̄ = d̄(f)`.
///
/// Every step uses a shift with no effect below the target.
pub fn match_jets(f: &Series, g: &Series, opts: &ReduceOptions) -> Result<CoordChange> {
    check_unit_free(f)?;
    check_unit_free(g)?;
    let ctx = if f.ctx().deg() >= g.ctx().deg() {
        f.ctx().clone()
    } else {
        g.ctx().clone()
    };
    let f = f.embed(&ctx)?;
    let g = g.embed(&ctx)?;
    let pf = profile_of_series(&f)?;
    let eg = g.e()?;
    if pf.e != eg {
        return Err(Error::Precondition(format!(
            "e(f) = {} but e(g) = {eg}",
            pf.e
        )));
    }
    let (d, dbar) = (pf.d as usize, pf.dbar as usize);
    let have = f.trunc().min(g.trunc());
    if have < dbar {
        return Err(Error::TruncTooSmall { needed: dbar, have });
    }
    if f.jet(d) != g.jet(d) {
        return Err(Error::Precondition(format!("jets of order {d} differ")));
    }
    if pf.e > 0 {
        let (fb, e) = f.to_bar()?;
        let (gb, _) = g.to_bar()?;
        let psi = match_jets(&fb, &gb, opts)?;
        return Ok(transport_change(&psi, e).with_trunc(f.trunc()));
    }
    let mut red = Reduction::new(f.jet(dbar));
    let none = BTreeSet::new();
    for t in d + 1..=dbar {
        let want = red.ctx().embed(&g.coeff(t))?;
        red.eliminate(t, &none, Some(&want), opts)?;
    }
    Ok(red.phi)
}

/// `d(f)` when `e(f) = 0`; otherwise the marker with `e(f)` and the scaled
/// `d`.
pub fn determinacy_bound(f: &Series) -> Result<Determinacy> {
    let prof = profile_of_series(f)?;
    Ok(if prof.e == 0 {
        Determinacy::Finite(prof.d)
    } else {
        Determinacy::InfiniteMilnor {
            e: prof.e,
            d: prof.d,
        }
    })
}
