//! Exhaustive jet-space model of right equivalence over a small finite field.
//!
//! A jet of order `d` is `c_1 x + … + c_d x^d`; it is stored as a dense
//! index `Σ c_i·Q^(d−i)` with field elements numbered by
//! [`FieldElem::index`], so that index order is lexicographic order on
//! `(c_1, …, c_d)`. The group of truncated changes
//! `a_1 x + … + a_d x^d` (`a_1 ≠ 0`) acts by composition. Orbits are
//! found by sweeping the jets in index order and applying the whole group
//! to each jet not yet reached, which makes every representative the
//! smallest member of its class.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::profile::basic_invariants;
use crate::pseries::{format_series, CoordChange, Series};
use crate::reduce::{normal_form, ReduceOptions};
use crate::report::FieldInfo;

pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// Largest field for which addition and multiplication tables are built.
const MAX_TABLE_FIELD: u128 = 1 << 10;

const NONE: u32 = u32::MAX;

/// Addition and multiplication tables over element indices.
#[derive(Debug, Clone)]
pub struct FieldTables {
    ctx: Field,
    q: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    elems: Vec<FieldElem>,
}

impl FieldTables {
    pub fn new(ctx: &Field) -> Result<Self> {
        if ctx.size() > MAX_TABLE_FIELD {
            return Err(Error::Budget {
                what: "field tables",
                needed: ctx.size(),
                limit: MAX_TABLE_FIELD,
            });
        }
        let elems: Vec<FieldElem> = ctx.elements().collect();
        let q = elems.len();
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                add[i * q + j] = (a + b).index() as u32;
                mul[i * q + j] = (a * b).index() as u32;
            }
        }
        Ok(FieldTables {
            ctx: ctx.clone(),
            q,
            add,
            mul,
            elems,
        })
    }

    pub fn ctx(&self) -> &Field {
        &self.ctx
    }

    pub fn size(&self) -> usize {
        self.q
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q + b as usize]
    }

    pub fn elem(&self, i: u32) -> &FieldElem {
        &self.elems[i as usize]
    }
}

/// Dense jets of order `d` and the truncated group acting on them.
#[derive(Debug, Clone)]
pub struct JetSpace {
    tables: FieldTables,
    d: usize,
    jets: usize,
    group: usize,
}

impl JetSpace {
    pub fn new(ctx: &Field, d: usize, budget: u128) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("jet order must be at least 1".into()));
        }
        let size = ctx.size();
        let needed = size.checked_pow(d as u32).unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::Budget {
                what: "jet space",
                needed,
                limit: budget,
            });
        }
        let tables = FieldTables::new(ctx)?;
        let jets = needed as usize;
        let group = jets / tables.q * (tables.q - 1);
        Ok(JetSpace {
            tables,
            d,
            jets,
            group,
        })
    }

    pub fn ctx(&self) -> &Field {
        &self.tables.ctx
    }

    pub fn order(&self) -> usize {
        self.d
    }

    /// Number of jets, the zero jet included.
    pub fn jet_count(&self) -> usize {
        self.jets
    }

    pub fn group_size(&self) -> usize {
        self.group
    }

    pub fn encode(&self, coeffs: &[u32]) -> usize {
        coeffs
            .iter()
            .fold(0, |acc, &c| acc * self.tables.q + c as usize)
    }

    pub fn decode(&self, mut idx: usize) -> Vec<u32> {
        let mut out = vec![0; self.d];
        for slot in out.iter_mut().rev() {
            *slot = (idx % self.tables.q) as u32;
            idx /= self.tables.q;
        }
        out
    }

    /// Coefficients `a_1..a_d` of the `idx`-th group element.
    pub fn group_elem(&self, idx: usize) -> Vec<u32> {
        let tail = self.jets / self.tables.q;
        let mut out = self.decode(idx % tail);
        // decode of a number below Q^(d-1) leaves the leading slot free
        out[0] = (idx / tail + 1) as u32;
        out
    }

    fn group_index(&self, a: &[u32]) -> usize {
        let tail = self.jets / self.tables.q;
        (a[0] as usize - 1) * tail + self.encode(&[&[0], &a[1..]].concat())
    }

    /// `φ, φ², …, φ^d` truncated at order `d`.
    fn powers(&self, phi: &[u32]) -> Vec<Vec<u32>> {
        let d = self.d;
        let t = &self.tables;
        let mut out = vec![phi.to_vec()];
        for _ in 1..d {
            let prev = out.last().unwrap();
            let mut next = vec![0u32; d];
            for (i, &a) in prev.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                // prev[i] is the coefficient of x^(i+1)
                for (j, &b) in phi.iter().enumerate() {
                    let k = i + j + 1;
                    if k >= d {
                        break;
                    }
                    next[k] = t.add(next[k], t.mul(a, b));
                }
            }
            out.push(next);
        }
        out
    }

    fn compose_with(&self, f: &[u32], powers: &[Vec<u32>]) -> Vec<u32> {
        let t = &self.tables;
        let mut out = vec![0u32; self.d];
        for (i, &c) in f.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (slot, &b) in out.iter_mut().zip(&powers[i]).skip(i) {
                *slot = t.add(*slot, t.mul(c, b));
            }
        }
        out
    }

    /// Index of `j^d(f ∘ φ)` for jet index `f` and group index `g`.
    pub fn act(&self, f: usize, g: usize) -> usize {
        let pw = self.powers(&self.group_elem(g));
        self.encode(&self.compose_with(&self.decode(f), &pw))
    }

    pub fn jet_series(&self, idx: usize) -> Series {
        let terms = self
            .decode(idx)
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i + 1, self.tables.elem(c).clone()))
            .collect::<Vec<_>>();
        Series::from_terms(self.ctx(), terms, self.d).expect("coefficients lie in the field")
    }

    /// Index of `j^d(f)`; `f` must have no constant term.
    pub fn jet_index(&self, f: &Series) -> Result<usize> {
        let f = f.embed(self.ctx())?;
        if !f.coeff(0).is_zero() {
            return Err(Error::Precondition(
                "jets are taken without constant term".into(),
            ));
        }
        let coeffs: Vec<u32> = (1..=self.d).map(|n| f.coeff(n).index() as u32).collect();
        Ok(self.encode(&coeffs))
    }

    pub fn coord_change(&self, g: usize) -> CoordChange {
        let phi = self.jet_series(self.encode(&self.group_elem(g)));
        CoordChange::new(phi).expect("group elements are invertible")
    }

    fn group_index_of(&self, phi: &CoordChange) -> Result<usize> {
        let phi = phi.embed(self.ctx())?;
        let a: Vec<u32> = (1..=self.d).map(|n| phi.coeff(n).index() as u32).collect();
        Ok(self.group_index(&a))
    }
}

/// All truncated coordinate changes of order `d`, in group index order.
pub fn enumerate_group(ctx: &Field, d: usize, budget: u128) -> Result<Vec<CoordChange>> {
    let space = JetSpace::new(ctx, d, budget)?;
    Ok((0..space.group_size())
        .map(|g| space.coord_change(g))
        .collect())
}

/// Right invariants of a class as far as the jet certifies them: `m`
/// always, the rest once some exponent prime to `p` occurs, i.e. once
/// `q(f) ≤ d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JetInvariants {
    pub m: u64,
    pub e: Option<u32>,
    pub q: Option<u64>,
    pub k: Option<u64>,
    pub dbar: Option<u64>,
    pub d: Option<u64>,
    pub mu: Option<u64>,
}

impl JetInvariants {
    fn of_coeffs(coeffs: &[u32], p: u32) -> Option<Self> {
        let delta: Vec<u64> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, _)| i as u64 + 1)
            .collect();
        let m = *delta.first()?;
        let certified = delta.iter().any(|n| n % p as u64 != 0);
        if !certified {
            return Some(JetInvariants {
                m,
                e: None,
                q: None,
                k: None,
                dbar: None,
                d: None,
                mu: None,
            });
        }
        let b = basic_invariants(&delta, p).expect("nonempty support without 0");
        Some(JetInvariants {
            m,
            e: Some(b.e),
            q: Some(b.q),
            k: Some(b.kcap),
            dbar: Some(b.dbar),
            d: Some(b.d),
            mu: Some(b.q - 1),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitClass {
    /// Smallest jet index in the class.
    pub representative: usize,
    pub size: usize,
    pub invariants: JetInvariants,
}

#[derive(Debug, Clone)]
pub struct OrbitTable {
    space: JetSpace,
    orbit_of: Vec<u32>,
    /// Group index `g` with `rep ∘ g = jet`.
    via: Vec<u32>,
    pub classes: Vec<OrbitClass>,
}

impl OrbitTable {
    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    /// Class number of a nonzero jet.
    pub fn orbit_of(&self, jet: usize) -> Option<usize> {
        match self.orbit_of[jet] {
            NONE => None,
            o => Some(o as usize),
        }
    }

    pub fn orbit_of_series(&self, f: &Series) -> Result<Option<usize>> {
        Ok(self.orbit_of(self.space.jet_index(f)?))
    }

    /// `φ` with `j^d(rep ∘ φ) = jet`.
    pub fn witness_from_rep(&self, jet: usize) -> Option<CoordChange> {
        self.orbit_of(jet)?;
        Some(self.space.coord_change(self.via[jet] as usize))
    }

    /// `ψ` with `j^d(jet ∘ ψ) = rep`.
    pub fn witness_to_rep(&self, jet: usize) -> Result<Option<CoordChange>> {
        match self.witness_from_rep(jet) {
            None => Ok(None),
            Some(phi) => Ok(Some(phi.inverse()?)),
        }
    }

    pub fn summary(&self) -> OrbitSummary {
        OrbitSummary {
            field: FieldInfo::of(self.space.ctx()),
            jet_order: self.space.order(),
            jets: self.space.jet_count() - 1,
            group_size: self.space.group_size(),
            orbit_count: self.classes.len(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassSummary {
                    representative: format_series(&self.space.jet_series(c.representative)),
                    size: c.size,
                    invariants: c.invariants.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassSummary {
    pub representative: String,
    pub size: usize,
    pub invariants: JetInvariants,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitSummary {
    pub field: FieldInfo,
    pub jet_order: usize,
    pub jets: usize,
    pub group_size: usize,
    pub orbit_count: usize,
    pub classes: Vec<ClassSummary>,
}

pub fn orbit_partition(ctx: &Field, d: usize, budget: u128) -> Result<OrbitTable> {
    let space = JetSpace::new(ctx, d, budget)?;
    let n = space.jet_count();
    let mut orbit_of = vec![NONE; n];
    let mut via = vec![NONE; n];
    let mut classes = Vec::new();
    let all_powers: Vec<Vec<Vec<u32>>> = (0..space.group_size())
        .map(|g| space.powers(&space.group_elem(g)))
        .collect();
    let p = ctx.p();
    for rep in 1..n {
        if orbit_of[rep] != NONE {
            continue;
        }
        let id = classes.len() as u32;
        let coeffs = space.decode(rep);
        let mut size = 0;
        for (g, pw) in all_powers.iter().enumerate() {
            let img = space.encode(&space.compose_with(&coeffs, pw));
            if orbit_of[img] == NONE {
                orbit_of[img] = id;
                via[img] = g as u32;
                size += 1;
            } else if orbit_of[img] != id {
                return Err(Error::Internal(format!(
                    "jet {img} reached from two classes"
                )));
            }
        }
        classes.push(OrbitClass {
            representative: rep,
            size,
            invariants: JetInvariants::of_coeffs(&coeffs, p).expect("nonzero jet"),
        });
    }
    Ok(OrbitTable {
        space,
        orbit_of,
        via,
        classes,
    })
}

#[derive(Debug, Clone)]
pub enum Equivalence {
    /// `φ` with `j^d(f ∘ φ) = j^d(g)`.
    Equivalent(CoordChange),
    /// No truncated change over this field works; says nothing about
    /// larger fields.
    NotEquivalent { field: FieldInfo },
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent(_))
    }
}

/// Searches the whole group of order-`d` changes over `ctx`.
pub fn check_equivalence(
    f: &Series,
    g: &Series,
    ctx: &Field,
    d: usize,
    budget: u128,
) -> Result<Equivalence> {
    let space = JetSpace::new(ctx, d, budget)?;
    let fi = space.decode(space.jet_index(f)?);
    let gi = space.jet_index(g)?;
    for g_idx in 0..space.group_size() {
        let pw = space.powers(&space.group_elem(g_idx));
        if space.encode(&space.compose_with(&fi, &pw)) == gi {
            return Ok(Equivalence::Equivalent(space.coord_change(g_idx)));
        }
    }
    Ok(Equivalence::NotEquivalent {
        field: FieldInfo::of(ctx),
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub field: FieldInfo,
    pub jet_order: usize,
    pub m_filter: Option<u64>,
    pub jets: usize,
    pub orbits: usize,
    /// Jets with `e = 0` and `d(f) ≤ d` whose normal form was checked.
    pub classified: usize,
    /// Of those, inputs that meet their normal form only over an extension
    /// of the field (orbits are field-relative, determinacy is not).
    pub extended: usize,
    /// Classes with `m = p` examined for uniqueness of the `λ`-vector.
    pub uniqueness_orbits: usize,
    pub distinct_lambda_vectors: usize,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive cross-check of the normal form engine against the orbit
/// table: normal forms lie in the orbit of their input, certified
/// invariants are constant on classes, and for `m = p` different
/// `λ`-vectors never share a class.
pub fn validate_classification(
    ctx: &Field,
    d: usize,
    m_filter: Option<u64>,
    budget: u128,
    opts: &ReduceOptions,
) -> Result<ValidationReport> {
    let table = orbit_partition(ctx, d, budget)?;
    let space = table.space();
    let p = ctx.p();
    let mut report = ValidationReport {
        field: FieldInfo::of(ctx),
        jet_order: d,
        m_filter,
        jets: space.jet_count() - 1,
        orbits: table.classes.len(),
        ..Default::default()
    };
    let mut ext_tables: BTreeMap<usize, Option<OrbitTable>> = BTreeMap::new();
    let mut lambda_by_orbit: BTreeMap<usize, BTreeSet<Vec<String>>> = BTreeMap::new();
    let mut all_lambdas: BTreeSet<Vec<String>> = BTreeSet::new();

    for jet in 1..space.jet_count() {
        let o = table.orbit_of(jet).unwrap();
        let coeffs = space.decode(jet);
        let inv = JetInvariants::of_coeffs(&coeffs, p).unwrap();
        if inv != table.classes[o].invariants {
            report.violations.push(format!(
                "invariants differ inside class {o}: {} vs representative {}",
                format_series(&space.jet_series(jet)),
                format_series(&space.jet_series(table.classes[o].representative)),
            ));
        }
        let back = table.witness_to_rep(jet)?.unwrap();
        if space.act(jet, space.group_index_of(&back)?) != table.classes[o].representative {
            report
                .violations
                .push(format!("stored witness fails for jet {jet}"));
        }

        if m_filter.is_some_and(|m| m != inv.m) {
            continue;
        }
        let (Some(0), Some(dbar), Some(df)) = (inv.e, inv.dbar, inv.d) else {
            continue;
        };
        if df > d as u64 {
            continue;
        }
        report.classified += 1;
        let f = space.jet_series(jet).with_trunc(d.max(dbar as usize));
        let nf = normal_form(&f, opts)?;
        let nf_jet = nf.series.with_trunc(d);
        let label = format_series(&f);
        match same_orbit_somewhere(&f, &nf_jet, &table, &mut ext_tables, budget)? {
            Some(deg) if deg > ctx.deg() => report.extended += 1,
            Some(_) => {}
            None => report.violations.push(format!(
                "normal form {} of {label} not found in the orbit of the input over any field within budget",
                format_series(&nf.series)
            )),
        }

        if inv.m == p as u64 && nf.ctx.same_field(ctx) {
            let key: Vec<String> = nf.lambda.iter().map(|(n, c)| format!("{n}:{c}")).collect();
            let is_normal = f
                .support()
                .iter()
                .all(|&n| n as u64 == inv.m || nf.lambda.contains_key(&(n as u64)))
                && f.coeff(inv.m as usize).is_one();
            if is_normal && nf.lambda.iter().any(|(&n, c)| &f.coeff(n as usize) != c) {
                report.violations.push(format!(
                    "normal form of the normal form {label} has different parameters"
                ));
            }
            all_lambdas.insert(key.clone());
            lambda_by_orbit.entry(o).or_default().insert(key);
        }
    }

    report.uniqueness_orbits = lambda_by_orbit.len();
    report.distinct_lambda_vectors = all_lambdas.len();
    for (o, keys) in &lambda_by_orbit {
        if keys.len() > 1 {
            report.violations.push(format!(
                "class of {} contains normal forms with parameters {:?}",
                format_series(&space.jet_series(table.classes[*o].representative)),
                keys
            ));
        }
    }
    Ok(report)
}

/// Degree of the smallest field, among the field of `g` and its extensions
/// within `budget`, over which `f` and `g` share an orbit.
fn same_orbit_somewhere(
    f: &Series,
    g: &Series,
    base: &OrbitTable,
    cache: &mut BTreeMap<usize, Option<OrbitTable>>,
    budget: u128,
) -> Result<Option<usize>> {
    let base_ctx = base.space().ctx();
    if g.ctx().same_field(base_ctx) && base.orbit_of_series(f)? == base.orbit_of_series(g)? {
        return Ok(Some(base_ctx.deg()));
    }
    let d = base.space().order();
    let start = g.ctx().clone();
    for factor in 1.. {
        let cand = if factor == 1 {
            start.clone()
        } else {
            start.extend(factor, usize::MAX)?
        };
        if cand.same_field(base_ctx) {
            continue;
        }
        if cand.size().checked_pow(d as u32).is_none_or(|n| n > budget) {
            return Ok(None);
        }
        let table = match cache.entry(cand.deg()) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(orbit_partition(&cand, d, budget).ok())
            }
        };
        let Some(table) = table else {
            return Ok(None);
        };
        // embed through `cand` so that the tower of `g` is respected
        let fe = f.embed(&cand)?;
        let ge = g.embed(&cand)?;
        if table.orbit_of_series(&fe)? == table.orbit_of_series(&ge)? {
            return Ok(Some(cand.deg()));
        }
    }
    unreachable!()
}
