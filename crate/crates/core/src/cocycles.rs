//! Abelian 3-cocycles `(h, c)`: constructors, coboundaries, the coherence
//! checks, the trace map and equivalence tests.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::{gcd, lcm, residue, Group, GroupElement};
use crate::intmat;
use crate::presentations::Presentation;
use crate::quadforms::{diagonal_torsion, QuadraticForm, DEFAULT_BOX};
use crate::target::{TargetGroup, Value};

/// Largest group order accepted by [`coboundary_witness`].
pub const WITNESS_MAX_ORDER: u64 = 16;

/// Default cap on the number of failing tuples kept in a report.
pub const DEFAULT_MAX_FAILURES: usize = 100_000;

#[derive(Debug, Clone)]
enum Backend {
    Presentation(Arc<Presentation>),
    Quinn(Arc<QuadraticForm>),
    Exponential(Arc<ExpParams>),
    Table(Arc<CocycleTable>),
    Coboundary(Arc<KMap>),
    Combination(Vec<(i128, Cocycle)>),
}

#[derive(Debug, Clone)]
struct ExpParams {
    moduli: Vec<u64>,
    p: Vec<u64>,
    q: Vec<(usize, usize, u64)>,
}

/// Which construction backs a cocycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Presentation,
    Quinn,
    Exponential,
    Table,
    Coboundary,
    Combination,
}

/// A pair of evaluators `h: G³ → M`, `c: G² → M`.
#[derive(Debug, Clone)]
pub struct Cocycle {
    group: Group,
    target: TargetGroup,
    backend: Backend,
}

impl Cocycle {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn target(&self) -> TargetGroup {
        self.target
    }

    pub fn backend(&self) -> BackendKind {
        match self.backend {
            Backend::Presentation(_) => BackendKind::Presentation,
            Backend::Quinn(_) => BackendKind::Quinn,
            Backend::Exponential(_) => BackendKind::Exponential,
            Backend::Table(_) => BackendKind::Table,
            Backend::Coboundary(_) => BackendKind::Coboundary,
            Backend::Combination(_) => BackendKind::Combination,
        }
    }

    /// The zero cocycle.
    pub fn zero(group: Group, target: TargetGroup) -> Cocycle {
        Cocycle {
            group,
            target,
            backend: Backend::Combination(Vec::new()),
        }
    }

    pub fn from_table(table: CocycleTable) -> Cocycle {
        Cocycle {
            group: table.group.clone(),
            target: table.target,
            backend: Backend::Table(Arc::new(table)),
        }
    }

    pub fn h(&self, x: &GroupElement, y: &GroupElement, z: &GroupElement) -> Result<Value> {
        for e in [x, y, z] {
            self.group.check_element(e)?;
        }
        Ok(self.h_coords(x.coords(), y.coords(), z.coords()))
    }

    pub fn c(&self, x: &GroupElement, y: &GroupElement) -> Result<Value> {
        self.group.check_element(x)?;
        self.group.check_element(y)?;
        Ok(self.c_coords(x.coords(), y.coords()))
    }

    // Arguments are canonical coordinates.
    pub(crate) fn h_coords(&self, x: &[i64], y: &[i64], z: &[i64]) -> Value {
        match &self.backend {
            Backend::Presentation(p) => {
                let yz: Vec<i64> = y
                    .iter()
                    .zip(z)
                    .zip(self.group.moduli())
                    .map(|((a, b), &n)| residue(a + b, n))
                    .collect();
                let (ls, ly, lz) = (p.lift_coords(&yz), p.lift_coords(y), p.lift_coords(z));
                let l: Vec<i64> = ls.iter().zip(&ly).zip(&lz).map(|((a, b), c)| a - b - c).collect();
                -p.pairing(&p.lift_coords(x), &l)
            }
            Backend::Quinn(q) => {
                let mut acc = self.target.zero();
                for (j, &n) in self.group.moduli().iter().enumerate() {
                    if n != 0 && x[j] != 0 && y[j] + z[j] >= n as i64 {
                        acc = acc + q.diag(j).scale(x[j] as i128 * n as i128);
                    }
                }
                acc
            }
            Backend::Exponential(e) => {
                let mut acc = self.target.zero();
                for (k, &n) in e.moduli.iter().enumerate() {
                    let carry = residue(y[k], n) + residue(z[k], n) - residue(y[k] + z[k], n);
                    let m = x[k] as i128 * carry as i128 * e.p[k] as i128;
                    if m != 0 {
                        acc = acc + Value::qz(m, diagonal_torsion(n));
                    }
                }
                acc
            }
            Backend::Table(t) => t.h[t.triple_index(x, y, z)],
            Backend::Coboundary(k) => {
                let m = self.group.moduli();
                let add = |a: &[i64], b: &[i64]| -> Vec<i64> {
                    a.iter().zip(b).zip(m).map(|((p, q), &n)| residue(p + q, n)).collect()
                };
                k.at(y, z) - k.at(&add(x, y), z) + k.at(x, &add(y, z)) - k.at(x, y)
            }
            Backend::Combination(terms) => terms
                .iter()
                .fold(self.target.zero(), |acc, (s, w)| acc + w.h_coords(x, y, z).scale(*s)),
        }
    }

    pub(crate) fn c_coords(&self, x: &[i64], y: &[i64]) -> Value {
        match &self.backend {
            Backend::Presentation(p) => p.pairing(&p.lift_coords(x), &p.lift_coords(y)),
            Backend::Quinn(q) => {
                let r = x.len();
                let mut acc = self.target.zero();
                for i in 0..r {
                    if x[i] == 0 {
                        continue;
                    }
                    for j in i..r {
                        let m = x[i] as i128 * y[j] as i128;
                        if m != 0 {
                            acc = acc + q.sigma(i, j).scale(m);
                        }
                    }
                }
                acc
            }
            Backend::Exponential(e) => {
                let mut acc = self.target.zero();
                for &(k, l, qkl) in &e.q {
                    let m = x[k] as i128 * y[l] as i128 * qkl as i128;
                    if m != 0 {
                        acc = acc + Value::qz(m, gcd(e.moduli[k], e.moduli[l]));
                    }
                }
                for (k, &n) in e.moduli.iter().enumerate() {
                    let m = x[k] as i128 * y[k] as i128 * e.p[k] as i128;
                    if m != 0 {
                        acc = acc + Value::qz(m, diagonal_torsion(n));
                    }
                }
                acc
            }
            Backend::Table(t) => t.c[t.pair_index(x, y)],
            Backend::Coboundary(k) => k.at(y, x) - k.at(x, y),
            Backend::Combination(terms) => terms
                .iter()
                .fold(self.target.zero(), |acc, (s, w)| acc + w.c_coords(x, y).scale(*s)),
        }
    }

    fn combine(&self, other: &Cocycle, sign: i128) -> Result<Cocycle> {
        if self.group != other.group || self.target != other.target {
            return Err(Error::GroupMismatch);
        }
        Ok(Cocycle {
            group: self.group.clone(),
            target: self.target,
            backend: Backend::Combination(vec![(1, self.clone()), (sign, other.clone())]),
        })
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Cocycle) -> Result<Cocycle> {
        self.combine(other, 1)
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &Cocycle) -> Result<Cocycle> {
        self.combine(other, -1)
    }

    pub fn neg(&self) -> Cocycle {
        Cocycle {
            group: self.group.clone(),
            target: self.target,
            backend: Backend::Combination(vec![(-1, self.clone())]),
        }
    }

    /// Dense tables of `h` and `c` in lexicographic order.
    pub fn materialize(&self) -> Result<CocycleTable> {
        let elems: Vec<GroupElement> = self.group.elements()?.collect();
        let n = elems.len();
        let h: Vec<Value> = (0..n * n * n)
            .into_par_iter()
            .map(|i| {
                self.h_coords(
                    elems[i / (n * n)].coords(),
                    elems[(i / n) % n].coords(),
                    elems[i % n].coords(),
                )
            })
            .collect();
        let c = (0..n * n)
            .map(|i| self.c_coords(elems[i / n].coords(), elems[i % n].coords()))
            .collect();
        Ok(CocycleTable {
            group: self.group.clone(),
            target: self.target,
            h,
            c,
        })
    }
}

/// `h`, `c` stored densely over a finite group; `h` is indexed by
/// `(i_x·N + i_y)·N + i_z` and `c` by `i_x·N + i_y` in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleTable {
    group: Group,
    target: TargetGroup,
    h: Vec<Value>,
    c: Vec<Value>,
}

impl CocycleTable {
    pub fn new(group: Group, target: TargetGroup, h: Vec<Value>, c: Vec<Value>) -> Result<Self> {
        let n = group.order().ok_or(Error::InfiniteGroup)? as usize;
        if h.len() != n * n * n {
            return Err(Error::LengthMismatch {
                expected: n * n * n,
                found: h.len(),
            });
        }
        if c.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                found: c.len(),
            });
        }
        if h.iter().chain(&c).any(|v| v.target() != target) {
            return Err(Error::MixedTargets);
        }
        Ok(CocycleTable { group, target, h, c })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn target(&self) -> TargetGroup {
        self.target
    }

    pub fn h_values(&self) -> &[Value] {
        &self.h
    }

    pub fn c_values(&self) -> &[Value] {
        &self.c
    }

    fn index(&self, x: &[i64]) -> usize {
        x.iter()
            .zip(self.group.moduli())
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    }

    fn triple_index(&self, x: &[i64], y: &[i64], z: &[i64]) -> usize {
        let n = self.c.len().isqrt();
        (self.index(x) * n + self.index(y)) * n + self.index(z)
    }

    fn pair_index(&self, x: &[i64], y: &[i64]) -> usize {
        let n = self.c.len().isqrt();
        self.index(x) * n + self.index(y)
    }

    /// Overwrites one associator value.
    pub fn set_h(&mut self, x: &GroupElement, y: &GroupElement, z: &GroupElement, v: Value) -> Result<()> {
        for e in [x, y, z] {
            self.group.check_element(e)?;
        }
        if v.target() != self.target {
            return Err(Error::MixedTargets);
        }
        let i = self.triple_index(x.coords(), y.coords(), z.coords());
        self.h[i] = v;
        Ok(())
    }

    pub fn set_c(&mut self, x: &GroupElement, y: &GroupElement, v: Value) -> Result<()> {
        self.group.check_element(x)?;
        self.group.check_element(y)?;
        if v.target() != self.target {
            return Err(Error::MixedTargets);
        }
        let i = self.pair_index(x.coords(), y.coords());
        self.c[i] = v;
        Ok(())
    }
}

/// A normalized 2-cochain `k: G² → M` on a finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KMap {
    group: Group,
    target: TargetGroup,
    values: Vec<Value>,
}

impl KMap {
    /// `values` in lexicographic order over `G²`; requires `k(x,0) = k(0,y) = 0`.
    pub fn new(group: Group, target: TargetGroup, values: Vec<Value>) -> Result<Self> {
        let n = group.order().ok_or(Error::InfiniteGroup)? as usize;
        if values.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        if values.iter().any(|v| v.target() != target) {
            return Err(Error::MixedTargets);
        }
        for i in 0..n {
            for (a, b) in [(i, 0), (0, i)] {
                if !values[a * n + b].is_zero() {
                    return Err(Error::NotNormalized {
                        x: group.element_at(a),
                        y: group.element_at(b),
                    });
                }
            }
        }
        Ok(KMap { group, target, values })
    }

    pub fn from_fn<F>(group: Group, target: TargetGroup, f: F) -> Result<Self>
    where
        F: Fn(&GroupElement, &GroupElement) -> Value,
    {
        let elems: Vec<GroupElement> = group.elements()?.collect();
        let values = elems
            .iter()
            .flat_map(|x| elems.iter().map(|y| f(x, y)).collect::<Vec<_>>())
            .collect();
        KMap::new(group, target, values)
    }

    pub fn zero(group: Group, target: TargetGroup) -> Result<Self> {
        KMap::from_fn(group, target, |_, _| target.zero())
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn value(&self, x: &GroupElement, y: &GroupElement) -> Result<Value> {
        self.group.check_element(x)?;
        self.group.check_element(y)?;
        Ok(self.at(x.coords(), y.coords()))
    }

    fn at(&self, x: &[i64], y: &[i64]) -> Value {
        let idx = |v: &[i64]| {
            v.iter()
                .zip(self.group.moduli())
                .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
        };
        let n = self.values.len().isqrt();
        self.values[idx(x) * n + idx(y)]
    }
}

/// `h(x,y,z) = k(y,z) − k(x+y,z) + k(x,y+z) − k(x,y)`, `c(x,y) = k(y,x) − k(x,y)`.
///
/// This sign of `c` is the one for which both hexagon identities hold with
/// the given `h`.
pub fn coboundary(k: &KMap) -> Cocycle {
    Cocycle {
        group: k.group.clone(),
        target: k.target,
        backend: Backend::Coboundary(Arc::new(k.clone())),
    }
}

/// `h(x,y,z) = −C(x̃, L(y,z))`, `c(x,y) = C(x̃, ỹ)` for an admissible,
/// optimal presentation of `q`.
pub fn cocycle_from_presentation(p: &Presentation, q: &QuadraticForm) -> Result<Cocycle> {
    p.require_admissible_optimal(q)?;
    Ok(Cocycle {
        group: p.group().clone(),
        target: p.target(),
        backend: Backend::Presentation(Arc::new(p.clone())),
    })
}

/// The closed-form cocycle
/// `h(x,y,z) = Σ_{j finite, y_j+z_j ≥ n_j} x_j n_j σ_jj`,
/// `c(x,y) = Σ_{i≤j} x_i y_j σ_ij`.
pub fn quinn_cocycle(q: &QuadraticForm) -> Cocycle {
    Cocycle {
        group: q.group().clone(),
        target: q.target(),
        backend: Backend::Quinn(Arc::new(q.clone())),
    }
}

/// Whether the associator of [`quinn_cocycle`] vanishes identically, i.e.
/// `n_j q(e_j) = 0` for every finite generator.
pub fn quinn_associator_vanishes(q: &QuadraticForm) -> bool {
    q.group()
        .moduli()
        .iter()
        .enumerate()
        .all(|(j, &n)| n == 0 || q.diag(j).scale(n as i128).is_zero())
}

/// Contribution of the generator `j` to the associator of [`quinn_cocycle`].
pub fn quinn_associator_term(q: &QuadraticForm, j: usize, x: &[i64], y: &[i64], z: &[i64]) -> Value {
    let n = q.group().moduli()[j];
    if n == 0 || y[j] + z[j] < n as i64 {
        return q.target().zero();
    }
    q.diag(j).scale(x[j] as i128 * n as i128)
}

/// The associator for arbitrary integer representatives:
/// `Σ_{i≤j, n_j>0} x_i (⌊(y_j+z_j)/n_j⌋ − ⌊y_j/n_j⌋ − ⌊z_j/n_j⌋) n_j σ_ij`.
pub fn floor_associator(q: &QuadraticForm, x: &[i64], y: &[i64], z: &[i64]) -> Value {
    let m = q.group().moduli();
    let mut acc = q.target().zero();
    for (j, &n) in m.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let n = n as i64;
        let carry = (y[j] + z[j]).div_euclid(n) - y[j].div_euclid(n) - z[j].div_euclid(n);
        if carry == 0 {
            continue;
        }
        for i in 0..=j {
            let f = x[i] as i128 * carry as i128 * n as i128;
            if f != 0 {
                acc = acc + q.sigma(i, j).scale(f);
            }
        }
    }
    acc
}

/// `h(x,y,z) = Σ_i n_i x_i ⌊(y_i+z_i)/n_i⌋ σ_ii` on canonical representatives.
pub fn kapustin_saulina_associator(q: &QuadraticForm, x: &[i64], y: &[i64], z: &[i64]) -> Value {
    let mut acc = q.target().zero();
    for (i, &n) in q.group().moduli().iter().enumerate() {
        if n == 0 {
            continue;
        }
        let f = n as i128 * x[i] as i128 * (y[i] + z[i]).div_euclid(n as i64) as i128;
        if f != 0 {
            acc = acc + q.diag(i).scale(f);
        }
    }
    acc
}

/// The cocycle read off the exponents `p^(k)`, `q^(k,l)` of a `Q/Z`-valued
/// form on a finite group.
pub fn exp_cocycle(q: &QuadraticForm) -> Result<Cocycle> {
    if !q.group().is_finite() {
        return Err(Error::InfiniteGroup);
    }
    if q.target() != TargetGroup::QmodZ {
        return Err(Error::TargetNotQmodZ);
    }
    let params = q.parameters()?;
    Ok(Cocycle {
        group: q.group().clone(),
        target: q.target(),
        backend: Backend::Exponential(Arc::new(ExpParams {
            moduli: q.group().moduli().to_vec(),
            p: params.p,
            q: params.q.into_iter().map(|((k, l), v)| (k, l, v)).collect(),
        })),
    })
}

/// Identity families checked by [`verify_cocycle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// `h(x,y,z)+h(u,x+y,z)+h(u,x,y) = h(u,x,y+z)+h(u+x,y,z)`, tuple `(u,x,y,z)`.
    Pentagon,
    /// `h(y,z,x)+c(x,y+z)+h(x,y,z) = c(x,z)+h(y,x,z)+c(x,y)`, tuple `(x,y,z)`.
    Hexagon,
    /// `−h(z,x,y)+c(x+y,z)−h(x,y,z) = c(x,z)−h(x,z,y)+c(y,z)`, tuple `(x,y,z)`.
    InverseHexagon,
    /// `h` and `c` vanish when an argument is `0`; tuple is the arguments.
    Normalization,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Pentagon => "pentagon",
            Family::Hexagon => "hexagon",
            Family::InverseHexagon => "inverse-hexagon",
            Family::Normalization => "normalization",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub family: Family,
    pub tuple: Vec<GroupElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyStats {
    pub family: Family,
    pub checked: u64,
    pub failed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Exhaustive,
    Box(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub domain: Domain,
    pub families: Vec<FamilyStats>,
    /// Failing tuples in family order, then lexicographic tuple order.
    pub failures: Vec<Failure>,
    /// Whether failures beyond the configured cap were dropped.
    pub truncated: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(|f| f.failed == 0)
    }

    pub fn total_failures(&self) -> u64 {
        self.families.iter().map(|f| f.failed).sum()
    }

    pub fn stats(&self, family: Family) -> Option<&FamilyStats> {
        self.families.iter().find(|f| f.family == family)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Half-width of the coordinate box used on free factors.
    pub box_bound: i64,
    pub max_failures: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            box_bound: DEFAULT_BOX,
            max_failures: DEFAULT_MAX_FAILURES,
        }
    }
}

/// Values reduced to integers modulo a common modulus (0 for `Z`).
struct Packed {
    modulus: i128,
    h: Vec<i128>,
    c: Vec<i128>,
}

fn pack(target: TargetGroup, h: &[Value], c: &[Value]) -> Result<Packed> {
    match target {
        TargetGroup::QmodZ => {
            let mut d = 1u64;
            for v in h.iter().chain(c) {
                let den = v.as_qz().expect("Q/Z value").den();
                d = lcm(d, den);
                if d == 0 || d > (1u64 << 62) {
                    return Err(Error::Overflow);
                }
            }
            let conv = |v: &Value| {
                let v = v.as_qz().expect("Q/Z value");
                (v.num() as i128) * (d / v.den()) as i128
            };
            Ok(Packed {
                modulus: d as i128,
                h: h.iter().map(conv).collect(),
                c: c.iter().map(conv).collect(),
            })
        }
        TargetGroup::ZmodN(n) => {
            let conv = |v: &Value| match v {
                Value::Mod { residue, .. } => *residue as i128,
                _ => unreachable!("value from another target"),
            };
            Ok(Packed {
                modulus: n as i128,
                h: h.iter().map(conv).collect(),
                c: c.iter().map(conv).collect(),
            })
        }
        TargetGroup::Integers => {
            let conv = |v: &Value| match v {
                Value::Int(k) => *k,
                _ => unreachable!("value from another target"),
            };
            Ok(Packed {
                modulus: 0,
                h: h.iter().map(conv).collect(),
                c: c.iter().map(conv).collect(),
            })
        }
    }
}

impl Packed {
    fn eq(&self, a: i128, b: i128) -> bool {
        if self.modulus == 0 {
            a == b
        } else {
            (a - b).rem_euclid(self.modulus) == 0
        }
    }
}

/// Runs the pentagon, both hexagons and normalization over `G` (exhaustive)
/// or, with free factors, over the coordinate box.
pub fn verify_cocycle(w: &Cocycle, opts: VerifyOptions) -> Result<VerifyReport> {
    if w.group.is_finite() {
        verify_finite(w, opts)
    } else {
        Ok(verify_box(w, opts))
    }
}

struct Collector {
    family: Family,
    checked: u64,
    failed: u64,
    tuples: Vec<Vec<usize>>,
}

fn merge(parts: Vec<Collector>, family: Family) -> Collector {
    let mut out = Collector {
        family,
        checked: 0,
        failed: 0,
        tuples: Vec::new(),
    };
    for p in parts {
        out.checked += p.checked;
        out.failed += p.failed;
        out.tuples.extend(p.tuples);
    }
    out
}

fn collector(family: Family) -> Collector {
    Collector {
        family,
        checked: 0,
        failed: 0,
        tuples: Vec::new(),
    }
}

impl Collector {
    fn record(&mut self, ok: bool, cap: usize, tuple: impl FnOnce() -> Vec<usize>) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.tuples.len() < cap {
                self.tuples.push(tuple());
            }
        }
    }
}

fn finish(domain: Domain, cols: Vec<Collector>, elems: &[GroupElement], cap: usize) -> VerifyReport {
    let mut failures = Vec::new();
    let mut truncated = false;
    let families = cols
        .iter()
        .map(|c| FamilyStats {
            family: c.family,
            checked: c.checked,
            failed: c.failed,
        })
        .collect();
    for c in cols {
        if c.failed as usize > c.tuples.len() {
            truncated = true;
        }
        for t in c.tuples {
            if failures.len() >= cap {
                truncated = true;
                break;
            }
            failures.push(Failure {
                family: c.family,
                tuple: t.iter().map(|&i| elems[i].clone()).collect(),
            });
        }
    }
    VerifyReport {
        domain,
        families,
        failures,
        truncated,
    }
}

fn verify_finite(w: &Cocycle, opts: VerifyOptions) -> Result<VerifyReport> {
    let table = match &w.backend {
        Backend::Table(t) => (**t).clone(),
        _ => w.materialize()?,
    };
    let elems: Vec<GroupElement> = w.group.elements()?.collect();
    let n = elems.len();
    let packed = pack(w.target, &table.h, &table.c)?;
    let mut add = vec![0usize; n * n];
    for (a, x) in elems.iter().enumerate() {
        for (b, y) in elems.iter().enumerate() {
            add[a * n + b] = w.group.index_of(&w.group.add(x, y)?);
        }
    }
    let cap = opts.max_failures;
    let h = |a: usize, b: usize, c: usize| packed.h[(a * n + b) * n + c];
    let cc = |a: usize, b: usize| packed.c[a * n + b];
    let s = |a: usize, b: usize| add[a * n + b];

    let pentagon = merge(
        (0..n)
            .into_par_iter()
            .map(|u| {
                let mut col = collector(Family::Pentagon);
                for x in 0..n {
                    let ux = s(u, x);
                    for y in 0..n {
                        let xy = s(x, y);
                        let uxy = h(u, x, y);
                        for z in 0..n {
                            let lhs = h(x, y, z) + h(u, xy, z) + uxy;
                            let rhs = h(u, x, s(y, z)) + h(ux, y, z);
                            col.record(packed.eq(lhs, rhs), cap, || vec![u, x, y, z]);
                        }
                    }
                }
                col
            })
            .collect(),
        Family::Pentagon,
    );
    let mut hexagon = collector(Family::Hexagon);
    let mut inverse = collector(Family::InverseHexagon);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let lhs = h(y, z, x) + cc(x, s(y, z)) + h(x, y, z);
                let rhs = cc(x, z) + h(y, x, z) + cc(x, y);
                hexagon.record(packed.eq(lhs, rhs), cap, || vec![x, y, z]);
                let lhs = -h(z, x, y) + cc(s(x, y), z) - h(x, y, z);
                let rhs = cc(x, z) - h(x, z, y) + cc(y, z);
                inverse.record(packed.eq(lhs, rhs), cap, || vec![x, y, z]);
            }
        }
    }
    let mut norm = collector(Family::Normalization);
    for a in 0..n {
        for b in 0..n {
            norm.record(packed.eq(h(0, a, b), 0), cap, || vec![0, a, b]);
            norm.record(packed.eq(h(a, 0, b), 0), cap, || vec![a, 0, b]);
            norm.record(packed.eq(h(a, b, 0), 0), cap, || vec![a, b, 0]);
        }
        norm.record(packed.eq(cc(a, 0), 0), cap, || vec![a, 0]);
        norm.record(packed.eq(cc(0, a), 0), cap, || vec![0, a]);
    }
    Ok(finish(
        Domain::Exhaustive,
        vec![pentagon, hexagon, inverse, norm],
        &elems,
        cap,
    ))
}

fn verify_box(w: &Cocycle, opts: VerifyOptions) -> VerifyReport {
    let g = &w.group;
    let elems: Vec<GroupElement> = g.box_elements(opts.box_bound).collect();
    let n = elems.len();
    let cap = opts.max_failures;
    let add = |a: &GroupElement, b: &GroupElement| g.add(a, b).expect("box arithmetic stays small");
    let h = |a: &GroupElement, b: &GroupElement, c: &GroupElement| w.h_coords(a.coords(), b.coords(), c.coords());
    let cc = |a: &GroupElement, b: &GroupElement| w.c_coords(a.coords(), b.coords());
    let zero = g.zero();
    let pentagon = merge(
        (0..n)
            .into_par_iter()
            .map(|ui| {
                let u = &elems[ui];
                let mut col = collector(Family::Pentagon);
                for (xi, x) in elems.iter().enumerate() {
                    let ux = add(u, x);
                    for (yi, y) in elems.iter().enumerate() {
                        let xy = add(x, y);
                        let uxy = h(u, x, y);
                        for (zi, z) in elems.iter().enumerate() {
                            let lhs = h(x, y, z) + h(u, &xy, z) + uxy;
                            let rhs = h(u, x, &add(y, z)) + h(&ux, y, z);
                            col.record(lhs == rhs, cap, || vec![ui, xi, yi, zi]);
                        }
                    }
                }
                col
            })
            .collect(),
        Family::Pentagon,
    );
    let mut hexagon = collector(Family::Hexagon);
    let mut inverse = collector(Family::InverseHexagon);
    for (xi, x) in elems.iter().enumerate() {
        for (yi, y) in elems.iter().enumerate() {
            for (zi, z) in elems.iter().enumerate() {
                let lhs = h(y, z, x) + cc(x, &add(y, z)) + h(x, y, z);
                let rhs = cc(x, z) + h(y, x, z) + cc(x, y);
                hexagon.record(lhs == rhs, cap, || vec![xi, yi, zi]);
                let lhs = -h(z, x, y) + cc(&add(x, y), z) - h(x, y, z);
                let rhs = cc(x, z) - h(x, z, y) + cc(y, z);
                inverse.record(lhs == rhs, cap, || vec![xi, yi, zi]);
            }
        }
    }
    // the box is symmetric, so it contains 0
    let zi = elems.iter().position(|e| e == &zero).expect("box contains zero");
    let mut norm = collector(Family::Normalization);
    for (ai, a) in elems.iter().enumerate() {
        for (bi, b) in elems.iter().enumerate() {
            norm.record(h(&zero, a, b).is_zero(), cap, || vec![zi, ai, bi]);
            norm.record(h(a, &zero, b).is_zero(), cap, || vec![ai, zi, bi]);
            norm.record(h(a, b, &zero).is_zero(), cap, || vec![ai, bi, zi]);
        }
        norm.record(cc(a, &zero).is_zero(), cap, || vec![ai, zi]);
        norm.record(cc(&zero, a).is_zero(), cap, || vec![zi, ai]);
    }
    finish(
        Domain::Box(opts.box_bound),
        vec![pentagon, hexagon, inverse, norm],
        &elems,
        cap,
    )
}

fn domain_points(group: &Group) -> Vec<GroupElement> {
    match group.elements() {
        Ok(it) => it.collect(),
        Err(_) => group.box_elements(DEFAULT_BOX).collect(),
    }
}

/// The quadratic form `x ↦ c(x,x)`, read off generator values and checked
/// pointwise (exhaustively on finite groups, on the default box otherwise).
pub fn trace(w: &Cocycle) -> Result<QuadraticForm> {
    let g = &w.group;
    let r = g.rank();
    let gens: Vec<GroupElement> = (0..r).map(|k| g.generator(k)).collect();
    let diag = gens.iter().map(|e| w.c_coords(e.coords(), e.coords())).collect();
    let mut off = std::collections::BTreeMap::new();
    for k in 0..r {
        for l in k + 1..r {
            let v = w.c_coords(gens[k].coords(), gens[l].coords()) + w.c_coords(gens[l].coords(), gens[k].coords());
            off.insert((k, l), v);
        }
    }
    let q = QuadraticForm::from_params(g.clone(), w.target, diag, off)
        .map_err(|e| Error::TraceNotQuadratic(e.to_string()))?;
    for x in domain_points(g) {
        let (cxx, qx) = (w.c_coords(x.coords(), x.coords()), q.evaluate(&x)?);
        if cxx != qx {
            return Err(Error::TraceNotQuadratic(format!(
                "c({x},{x}) = {cxx} differs from the generator polynomial value {qx}"
            )));
        }
    }
    Ok(q)
}

/// Whether two cocycles have the same trace.
pub fn cohomologous(w1: &Cocycle, w2: &Cocycle) -> Result<bool> {
    if w1.group != w2.group || w1.target != w2.target {
        return Err(Error::GroupMismatch);
    }
    Ok(trace(w1)? == trace(w2)?)
}

/// A normalized `k` with values in `(1/den_bound)Z/Z` and
/// `w1 − w2 = coboundary(k)`, found by solving the linear system over
/// `Z/den_bound`. `None` means no witness with that denominator exists.
pub fn coboundary_witness(w1: &Cocycle, w2: &Cocycle, den_bound: u64) -> Result<Option<KMap>> {
    if w1.group != w2.group || w1.target != w2.target {
        return Err(Error::GroupMismatch);
    }
    if w1.target != TargetGroup::QmodZ {
        return Err(Error::TargetNotQmodZ);
    }
    let order = w1.group.order().ok_or(Error::InfiniteGroup)?;
    if order > WITNESS_MAX_ORDER {
        return Err(Error::SearchSpaceTooLarge {
            size: order as u128,
            limit: WITNESS_MAX_ORDER as u128,
        });
    }
    if den_bound == 0 {
        return Err(Error::Parse("denominator bound must be positive".into()));
    }
    let diff = w1.sub(w2)?.materialize()?;
    let to_num = |v: &Value| -> Option<u64> {
        let v = v.as_qz().expect("Q/Z value");
        den_bound
            .is_multiple_of(v.den())
            .then(|| v.num() * (den_bound / v.den()))
    };
    let n = order as usize;
    let g = &w1.group;
    let elems: Vec<GroupElement> = g.elements()?.collect();
    let s = |a: usize, b: usize| g.index_of(&g.add(&elems[a], &elems[b]).expect("finite arithmetic"));
    let unknowns = (n - 1) * (n - 1);
    let var = |a: usize, b: usize| (a != 0 && b != 0).then(|| (a - 1) * (n - 1) + (b - 1));
    let d = den_bound;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut push = |terms: &[(Option<usize>, i64)], value: &Value, rows: &mut Vec<Vec<u64>>| -> bool {
        let Some(b) = to_num(value) else { return false };
        let mut row = vec![0u64; unknowns];
        for &(v, coef) in terms {
            if let Some(i) = v {
                row[i] = (row[i] as i64 + coef).rem_euclid(d as i64) as u64;
            }
        }
        rows.push(row);
        rhs.push(b);
        true
    };
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let terms = [
                    (var(y, z), 1),
                    (var(s(x, y), z), -1),
                    (var(x, s(y, z)), 1),
                    (var(x, y), -1),
                ];
                if !push(&terms, &diff.h[(x * n + y) * n + z], &mut rows) {
                    return Ok(None);
                }
            }
            let terms = [(var(y, x), 1), (var(x, y), -1)];
            if !push(&terms, &diff.c[x * n + y], &mut rows) {
                return Ok(None);
            }
        }
    }
    let Some(sol) = intmat::solve_mod(&rows, &rhs, unknowns, d) else {
        return Ok(None);
    };
    let mut values = vec![Value::qz(0, 1); n * n];
    for a in 1..n {
        for b in 1..n {
            values[a * n + b] = Value::qz(sol[var(a, b).unwrap()] as i128, d);
        }
    }
    let k = KMap::new(g.clone(), w1.target, values)?;
    debug_assert_eq!(coboundary(&k).materialize()?, diff);
    Ok(Some(k))
}

/// Whether `c(x,y) + c(y,x) = 0` for all pairs (exhaustive, or on the box
/// of half-width `bound` when `G` has free factors).
pub fn is_symmetric(w: &Cocycle, bound: i64) -> bool {
    let points: Vec<GroupElement> = match w.group.elements() {
        Ok(it) => it.collect(),
        Err(_) => w.group.box_elements(bound).collect(),
    };
    points.iter().all(|x| {
        points
            .iter()
            .all(|y| (w.c_coords(x.coords(), y.coords()) + w.c_coords(y.coords(), x.coords())).is_zero())
    })
}
