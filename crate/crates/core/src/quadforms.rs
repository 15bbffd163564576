//! Quadratic forms `q: G → M` described by generator data, their
//! polarization, enumeration over the parameter grid, and the search for a
//! bilinear `S` with `q(x) = S(x,x)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::groups::{gcd, Group, GroupElement};
use crate::target::{QZValue, TargetGroup, Value};

/// Default half-width of the coordinate box used on free factors.
pub const DEFAULT_BOX: i64 = 3;

/// Default node ceiling for the bilinear witness search.
pub const DEFAULT_SEARCH_LIMIT: u128 = 1 << 22;

/// `gcd(n², 2n)`, the order bound for `q(e)` on a factor `Z/n` (0 for `Z`).
pub fn diagonal_torsion(n: u64) -> u64 {
    gcd(n * n, 2 * n)
}

/// A quadratic form given by `q(e_k)` and `b(e_k, e_l)` for `k < l`.
///
/// `q(x) = Σ x_k² q(e_k) + Σ_{k<l} x_k x_l b(e_k, e_l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    group: Group,
    target: TargetGroup,
    diag: Vec<Value>,
    // zero entries are dropped so that equality is structural
    offdiag: BTreeMap<(usize, usize), Value>,
}

/// Integer exponents `p^(k)`, `q^(k,l)` of a `Q/Z`-valued form on a finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormParameters {
    pub p: Vec<u64>,
    pub q: BTreeMap<(usize, usize), u64>,
}

impl QuadraticForm {
    /// Validated construction from generator values.
    pub fn from_params(
        group: Group,
        target: TargetGroup,
        diag: Vec<Value>,
        offdiag: BTreeMap<(usize, usize), Value>,
    ) -> Result<Self> {
        let r = group.rank();
        if diag.len() != r {
            return Err(Error::LengthMismatch {
                expected: r,
                found: diag.len(),
            });
        }
        for (k, v) in diag.iter().enumerate() {
            if v.target() != target {
                return Err(Error::MixedTargets);
            }
            let t = diagonal_torsion(group.moduli()[k]);
            if t != 0 && !v.scale(t as i128).is_zero() {
                return Err(Error::TorsionViolation {
                    k,
                    l: None,
                    value: v.to_string(),
                });
            }
        }
        let mut clean = BTreeMap::new();
        for (&(k, l), v) in &offdiag {
            if k >= l || l >= r {
                return Err(Error::Parse(format!(
                    "off-diagonal index ({k},{l}) must satisfy k < l < {r}"
                )));
            }
            if v.target() != target {
                return Err(Error::MixedTargets);
            }
            let t = gcd(group.moduli()[k], group.moduli()[l]);
            if t != 0 && !v.scale(t as i128).is_zero() {
                return Err(Error::TorsionViolation {
                    k,
                    l: Some(l),
                    value: v.to_string(),
                });
            }
            if !v.is_zero() {
                clean.insert((k, l), *v);
            }
        }
        Ok(QuadraticForm {
            group,
            target,
            diag,
            offdiag: clean,
        })
    }

    /// Form over `Q/Z` with `q(e_k) = p_k / gcd(n_k², 2n_k)` and
    /// `b(e_k, e_l) = q_kl / gcd(n_k, n_l)`; all moduli involved must be finite.
    pub fn from_exponents(group: Group, p: &[u64], q: &BTreeMap<(usize, usize), u64>) -> Result<Self> {
        if p.len() != group.rank() {
            return Err(Error::LengthMismatch {
                expected: group.rank(),
                found: p.len(),
            });
        }
        let mut diag = Vec::with_capacity(p.len());
        for (k, &pk) in p.iter().enumerate() {
            let t = diagonal_torsion(group.moduli()[k]);
            if t == 0 {
                return Err(Error::Parse(format!(
                    "exponent parameters need a finite modulus at generator {k}"
                )));
            }
            diag.push(Value::qz(pk as i128, t));
        }
        let mut off = BTreeMap::new();
        for (&(k, l), &qkl) in q {
            if k >= l || l >= group.rank() {
                return Err(Error::Parse(format!("off-diagonal index ({k},{l}) out of range")));
            }
            let t = gcd(group.moduli()[k], group.moduli()[l]);
            if t == 0 {
                return Err(Error::Parse(format!(
                    "exponent parameters need a finite modulus at ({k},{l})"
                )));
            }
            off.insert((k, l), Value::qz(qkl as i128, t));
        }
        QuadraticForm::from_params(group, TargetGroup::QmodZ, diag, off)
    }

    pub fn zero(group: Group, target: TargetGroup) -> Self {
        let diag = vec![target.zero(); group.rank()];
        QuadraticForm {
            group,
            target,
            diag,
            offdiag: BTreeMap::new(),
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn target(&self) -> TargetGroup {
        self.target
    }

    /// `q(e_k)`.
    pub fn diag(&self, k: usize) -> Value {
        self.diag[k]
    }

    pub fn diag_values(&self) -> &[Value] {
        &self.diag
    }

    /// Nonzero `b(e_k, e_l)` for `k < l`.
    pub fn offdiag_values(&self) -> &BTreeMap<(usize, usize), Value> {
        &self.offdiag
    }

    /// `b(e_k, e_l)` for any `k, l` (symmetric; `2 q(e_k)` on the diagonal).
    pub fn generator_polarization(&self, k: usize, l: usize) -> Value {
        use std::cmp::Ordering::*;
        match k.cmp(&l) {
            Equal => self.diag[k].scale(2),
            Less => self.offdiag.get(&(k, l)).copied().unwrap_or(self.target.zero()),
            Greater => self.offdiag.get(&(l, k)).copied().unwrap_or(self.target.zero()),
        }
    }

    /// Upper triangular table: `b(e_i,e_j)` for `i < j`, `q(e_i)` on the
    /// diagonal, zero below.
    pub fn sigma(&self, i: usize, j: usize) -> Value {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.generator_polarization(i, j),
            Equal => self.diag[i],
            Greater => self.target.zero(),
        }
    }

    fn eval_raw(&self, x: &[i64]) -> Value {
        let mut acc = self.target.zero();
        for (k, &xk) in x.iter().enumerate() {
            if xk != 0 {
                acc = acc + self.diag[k].scale(xk as i128 * xk as i128);
            }
        }
        for (&(k, l), v) in &self.offdiag {
            let m = x[k] as i128 * x[l] as i128;
            if m != 0 {
                acc = acc + v.scale(m);
            }
        }
        acc
    }

    pub fn evaluate(&self, x: &GroupElement) -> Result<Value> {
        self.group.check_element(x)?;
        Ok(self.eval_raw(x.coords()))
    }

    /// `q` on an arbitrary integer representative; agrees with
    /// [`QuadraticForm::evaluate`] on its class.
    pub fn evaluate_raw(&self, x: &[i64]) -> Result<Value> {
        if x.len() != self.group.rank() {
            return Err(Error::LengthMismatch {
                expected: self.group.rank(),
                found: x.len(),
            });
        }
        Ok(self.eval_raw(x))
    }

    /// `b(x,y) = q(x+y) - q(x) - q(y)`.
    pub fn polarization(&self, x: &GroupElement, y: &GroupElement) -> Result<Value> {
        let s = self.group.add(x, y)?;
        Ok(self.evaluate(&s)? - self.evaluate(x)? - self.evaluate(y)?)
    }

    pub fn polarization_is_zero(&self) -> bool {
        self.offdiag.is_empty() && self.diag.iter().all(|v| v.scale(2).is_zero())
    }

    /// Pointwise sum.
    pub fn add(&self, other: &QuadraticForm) -> Result<QuadraticForm> {
        if self.group != other.group || self.target != other.target {
            return Err(Error::GroupMismatch);
        }
        let diag = self.diag.iter().zip(&other.diag).map(|(a, b)| *a + *b).collect();
        let mut off = self.offdiag.clone();
        for (key, v) in &other.offdiag {
            let e = off.entry(*key).or_insert(self.target.zero());
            *e = *e + *v;
        }
        QuadraticForm::from_params(self.group.clone(), self.target, diag, off)
    }

    /// Reads the exponents back off a `Q/Z`-valued form on a finite group.
    pub fn parameters(&self) -> Result<FormParameters> {
        if self.target != TargetGroup::QmodZ {
            return Err(Error::TargetNotQmodZ);
        }
        if !self.group.is_finite() {
            return Err(Error::InfiniteGroup);
        }
        let m = self.group.moduli();
        let numerator = |v: Value, t: u64| -> u64 {
            let v = v.as_qz().expect("Q/Z value");
            v.num() * (t / v.den())
        };
        let p = (0..m.len())
            .map(|k| numerator(self.diag[k], diagonal_torsion(m[k])))
            .collect();
        let q = self
            .offdiag
            .iter()
            .map(|(&(k, l), &v)| ((k, l), numerator(v, gcd(m[k], m[l]))))
            .collect();
        Ok(FormParameters { p, q })
    }
}

/// Number of quadratic forms `G → Q/Z`:
/// `∏_k gcd(2n_k, n_k²) · ∏_{k<l} gcd(n_k, n_l)`.
pub fn count_forms(group: &Group) -> Result<u128> {
    if !group.is_finite() {
        return Err(Error::InfiniteGroup);
    }
    Ok(parameter_ranges(group).iter().map(|&n| n as u128).product())
}

fn parameter_ranges(group: &Group) -> Vec<u64> {
    let m = group.moduli();
    let mut ranges: Vec<u64> = m.iter().map(|&n| diagonal_torsion(n)).collect();
    for k in 0..m.len() {
        for l in k + 1..m.len() {
            ranges.push(gcd(m[k], m[l]));
        }
    }
    ranges
}

/// Every `Q/Z`-valued quadratic form on a finite group, exactly once.
pub fn enumerate_forms(group: &Group) -> Result<FormEnumerator> {
    if !group.is_finite() {
        return Err(Error::InfiniteGroup);
    }
    let ranges = parameter_ranges(group);
    Ok(FormEnumerator {
        group: group.clone(),
        next: Some(vec![0; ranges.len()]),
        ranges,
    })
}

/// Odometer over the exponent grid; the diagonal exponents come first, then
/// the pairs `(k, l)` in lexicographic order, last parameter fastest.
#[derive(Debug, Clone)]
pub struct FormEnumerator {
    group: Group,
    ranges: Vec<u64>,
    next: Option<Vec<u64>>,
}

impl Iterator for FormEnumerator {
    type Item = QuadraticForm;

    fn next(&mut self) -> Option<QuadraticForm> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        for i in (0..succ.len()).rev() {
            if succ[i] + 1 < self.ranges[i] {
                succ[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        let r = self.group.rank();
        let mut q = BTreeMap::new();
        let mut idx = r;
        for k in 0..r {
            for l in k + 1..r {
                q.insert((k, l), cur[idx]);
                idx += 1;
            }
        }
        Some(QuadraticForm::from_exponents(self.group.clone(), &cur[..r], &q).expect("grid parameters are valid"))
    }
}

/// A failed identity found by [`validate_form`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormViolation {
    ZeroNotZero {
        value: Value,
    },
    NotEven {
        x: GroupElement,
        q_x: Value,
        q_neg_x: Value,
    },
    NotBilinear {
        x: GroupElement,
        y: GroupElement,
        z: GroupElement,
    },
    ScalarLaw {
        x: GroupElement,
        n: i64,
    },
}

#[derive(Debug, Clone, Default)]
pub struct FormReport {
    pub checks: usize,
    pub violations: Vec<FormViolation>,
}

impl FormReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `q(0)=0`, `q(x)=q(-x)`, biadditivity of the polarization and
/// `q(nx)=n²q(x)`. Exhaustive on finite groups; on the coordinate box of
/// half-width `bound` otherwise.
pub fn validate_form(q: &QuadraticForm, bound: i64) -> FormReport {
    validate_quadratic_map(q.group(), bound, |x| q.eval_raw(x.coords()))
}

/// [`validate_form`] for an arbitrary map given pointwise.
pub fn validate_quadratic_map<F>(group: &Group, bound: i64, f: F) -> FormReport
where
    F: Fn(&GroupElement) -> Value,
{
    let mut report = FormReport::default();
    let points: Vec<GroupElement> = match group.elements() {
        Ok(it) => it.collect(),
        Err(_) => group.box_elements(bound).collect(),
    };
    let max_n = group.exponent().map(|e| e as i64).unwrap_or(bound);
    let q0 = f(&group.zero());
    report.checks += 1;
    if !q0.is_zero() {
        report.violations.push(FormViolation::ZeroNotZero { value: q0 });
    }
    let add = |a: &GroupElement, b: &GroupElement| group.add(a, b).expect("element arithmetic");
    let b = |x: &GroupElement, y: &GroupElement| f(&add(x, y)) - f(x) - f(y);
    for x in &points {
        let qx = f(x);
        let qn = f(&group.neg(x).expect("element arithmetic"));
        report.checks += 1;
        if qx != qn {
            report.violations.push(FormViolation::NotEven {
                x: x.clone(),
                q_x: qx,
                q_neg_x: qn,
            });
        }
        for n in 0..=max_n {
            report.checks += 1;
            let nx = group.scale(n, x).expect("element arithmetic");
            if f(&nx) != qx.scale(n as i128 * n as i128) {
                report.violations.push(FormViolation::ScalarLaw { x: x.clone(), n });
            }
        }
    }
    for x in &points {
        for y in &points {
            let xy = add(x, y);
            for z in &points {
                report.checks += 1;
                if b(&xy, z) != b(x, z) + b(y, z) {
                    report.violations.push(FormViolation::NotBilinear {
                        x: x.clone(),
                        y: y.clone(),
                        z: z.clone(),
                    });
                }
            }
        }
    }
    report
}

/// A bilinear form on `G` given by its generator matrix `S(e_k, e_l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearForm {
    group: Group,
    target: TargetGroup,
    entries: Vec<Vec<Value>>,
}

impl BilinearForm {
    pub fn new(group: Group, target: TargetGroup, entries: Vec<Vec<Value>>) -> Result<Self> {
        let r = group.rank();
        if entries.len() != r || entries.iter().any(|row| row.len() != r) {
            return Err(Error::LengthMismatch {
                expected: r,
                found: entries.len(),
            });
        }
        let m = group.moduli();
        for (k, row) in entries.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                if v.target() != target {
                    return Err(Error::MixedTargets);
                }
                let t = gcd(m[k], m[l]);
                if t != 0 && !v.scale(t as i128).is_zero() {
                    return Err(Error::TorsionViolation {
                        k,
                        l: Some(l),
                        value: v.to_string(),
                    });
                }
            }
        }
        Ok(BilinearForm { group, target, entries })
    }

    pub fn zero(group: Group, target: TargetGroup) -> Self {
        let r = group.rank();
        BilinearForm {
            group,
            target,
            entries: vec![vec![target.zero(); r]; r],
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn target(&self) -> TargetGroup {
        self.target
    }

    pub fn entries(&self) -> &[Vec<Value>] {
        &self.entries
    }

    pub fn entry(&self, k: usize, l: usize) -> Value {
        self.entries[k][l]
    }

    pub fn eval_raw(&self, x: &[i64], y: &[i64]) -> Value {
        let mut acc = self.target.zero();
        for (k, &xk) in x.iter().enumerate() {
            if xk == 0 {
                continue;
            }
            for (l, &yl) in y.iter().enumerate() {
                if yl != 0 {
                    acc = acc + self.entries[k][l].scale(xk as i128 * yl as i128);
                }
            }
        }
        acc
    }

    pub fn evaluate(&self, x: &GroupElement, y: &GroupElement) -> Result<Value> {
        self.group.check_element(x)?;
        self.group.check_element(y)?;
        Ok(self.eval_raw(x.coords(), y.coords()))
    }
}

/// How a witness search concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessMethod {
    /// Zero polarization: `S(x,y) = Σ x_i y_i q(γ_i)` over an `F_2`-basis of `G/2G`.
    Symmetric,
    /// Lexicographic search over the generator value grids.
    GridSearch,
}

#[derive(Debug, Clone)]
pub struct WitnessSearch {
    pub witness: Option<BilinearForm>,
    pub method: WitnessMethod,
    /// Number of generator matrices in the grid.
    pub grid_size: u128,
    /// Search nodes visited (0 for the symmetric construction).
    pub nodes_visited: u128,
}

/// Some `S` with `q(x) = S(x,x)` for every `x`, or `None` when none exists.
pub fn bilinear_witness(q: &QuadraticForm) -> Result<Option<BilinearForm>> {
    Ok(search_bilinear_witness(q, DEFAULT_SEARCH_LIMIT)?.witness)
}

/// [`bilinear_witness`] with a node ceiling and the search statistics.
pub fn search_bilinear_witness(q: &QuadraticForm, limit: u128) -> Result<WitnessSearch> {
    if q.polarization_is_zero() {
        return Ok(WitnessSearch {
            witness: Some(symmetric_witness(q)),
            method: WitnessMethod::Symmetric,
            grid_size: 0,
            nodes_visited: 0,
        });
    }
    let group = q.group();
    if !group.is_finite() {
        return Err(Error::InfiniteGroup);
    }
    let r = group.rank();
    let m = group.moduli();
    let mut grids = Vec::with_capacity(r * r);
    for k in 0..r {
        for l in 0..r {
            grids.push(q.target().torsion_grid(gcd(m[k], m[l])).ok_or(Error::InfiniteGroup)?);
        }
    }
    let grid_size = grids.iter().fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128));
    let mut search = GridSearch {
        q,
        r,
        grids: &grids,
        chosen: vec![0; r * r],
        nodes: 0,
        limit,
    };
    let found = search.run(0)?;
    let witness = if found {
        let entries = (0..r)
            .map(|k| (0..r).map(|l| grids[k * r + l][search.chosen[k * r + l]]).collect())
            .collect();
        let s = BilinearForm::new(group.clone(), q.target(), entries)?;
        debug_assert!(group
            .elements()
            .unwrap()
            .all(|x| s.eval_raw(x.coords(), x.coords()) == q.eval_raw(x.coords())));
        Some(s)
    } else {
        None
    };
    Ok(WitnessSearch {
        witness,
        method: WitnessMethod::GridSearch,
        grid_size,
        nodes_visited: search.nodes,
    })
}

struct GridSearch<'a> {
    q: &'a QuadraticForm,
    r: usize,
    grids: &'a [Vec<Value>],
    chosen: Vec<usize>,
    nodes: u128,
    limit: u128,
}

impl GridSearch<'_> {
    // Cells are filled in row-major order. A diagonal cell is checked against
    // q(e_k) when assigned, an off-diagonal pair when its second cell (l, k)
    // with l > k is assigned.
    fn run(&mut self, cell: usize) -> Result<bool> {
        if cell == self.r * self.r {
            return Ok(true);
        }
        let (k, l) = (cell / self.r, cell % self.r);
        for idx in 0..self.grids[cell].len() {
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(Error::SearchSpaceTooLarge {
                    size: self.nodes,
                    limit: self.limit,
                });
            }
            self.chosen[cell] = idx;
            let v = self.grids[cell][idx];
            let ok = if k == l {
                v == self.q.diag(k)
            } else if k > l {
                let partner = self.grids[l * self.r + k][self.chosen[l * self.r + k]];
                v + partner == self.q.generator_polarization(l, k)
            } else {
                true
            };
            if ok && self.run(cell + 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// The bilinear form `S(x,y) = Σ_i x_i y_i q(γ_i)` for a form with zero
/// polarization, where `γ_i` runs over the generators of even or infinite
/// order (an `F_2`-basis of `G/2G`); generators of odd order lie in `2G`.
pub fn symmetric_witness(q: &QuadraticForm) -> BilinearForm {
    assert!(q.polarization_is_zero(), "symmetric witness needs zero polarization");
    let group = q.group().clone();
    let r = group.rank();
    let target = q.target();
    let mut entries = vec![vec![target.zero(); r]; r];
    for (k, &n) in group.moduli().iter().enumerate() {
        if n % 2 == 0 {
            entries[k][k] = q.diag(k);
        } else {
            // q(e_k) is killed by 2 and by the odd n, hence zero
            debug_assert!(q.diag(k).is_zero());
        }
    }
    BilinearForm { group, target, entries }
}

/// Convenience constructor for `Q/Z` values used throughout the tests.
pub fn qz(num: i128, den: u64) -> Value {
    Value::QZ(QZValue::new(num, den))
}
