//! Presentations `(F₀, π, C)` of a quadratic form: a free module `F₀ = Z^r`,
//! a surjection `π: F₀ → G` with kernel `F₁`, and a bilinear form `C` on `F₀`.

use crate::error::{Error, Result};
use crate::groups::{Group, GroupElement};
use crate::intmat::{self, Matrix};
use crate::quadforms::{BilinearForm, QuadraticForm, DEFAULT_BOX};
use crate::target::{TargetGroup, Value};

/// Upper bound on the number of `F₀` box points used for optimality checks.
pub const OPTIMALITY_BOX_POINTS: usize = 100_000;

/// Largest group order for which `C(L(u,x),L(y,z)) = 0` is checked over
/// all of `G⁴`.
pub const ISOTROPY_EXHAUSTIVE_ORDER: u64 = 32;

/// How `F₁` enters the presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relations {
    /// `π` is the coordinate map `Z^r → ⊕ Z/n_j`; `F₁` is spanned by `n_j e_j`.
    Diagonal(Vec<u64>),
    /// Explicit generators of `F₁ ⊂ Z^r` (rows), checked to span `ker π`.
    Matrix(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    group: Group,
    target: TargetGroup,
    relations: Relations,
    /// `π(e_i)` as raw coordinates in `G`, one row per basis vector of `F₀`.
    projection: Vec<Vec<i64>>,
    /// A basis of `F₁`.
    kernel: Vec<Vec<i64>>,
    /// Lifts of the generators of `G`; the lift of `x` is `Σ x_k s_k`.
    section: Vec<Vec<i64>>,
    c: Vec<Vec<Value>>,
}

fn to_i64(m: Matrix) -> Result<Vec<Vec<i64>>> {
    m.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| i64::try_from(x).map_err(|_| Error::Overflow))
                .collect()
        })
        .collect()
}

fn widen(rows: &[Vec<i64>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

impl Presentation {
    /// `F₀ = Z^r` with `π` the coordinate projection onto `G`.
    pub fn diagonal(group: Group, target: TargetGroup, c: Vec<Vec<Value>>) -> Result<Self> {
        let r = group.rank();
        check_matrix(&c, r, target)?;
        let projection = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
        let kernel = group
            .moduli()
            .iter()
            .enumerate()
            .filter(|(_, &n)| n != 0)
            .map(|(j, &n)| {
                let mut row = vec![0i64; r];
                row[j] = n as i64;
                row
            })
            .collect();
        let section = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
        Ok(Presentation {
            relations: Relations::Diagonal(group.moduli().to_vec()),
            group,
            target,
            projection,
            kernel,
            section,
            c,
        })
    }

    /// General presentation from the images `π(e_i)`. When `relations` is
    /// given it must span `ker π`; otherwise a basis is computed.
    pub fn with_projection(
        group: Group,
        target: TargetGroup,
        projection: Vec<Vec<i64>>,
        relations: Option<Vec<Vec<i64>>>,
        c: Vec<Vec<Value>>,
    ) -> Result<Self> {
        let r = projection.len();
        let t = group.rank();
        check_matrix(&c, r, target)?;
        if projection.iter().any(|row| row.len() != t) {
            return Err(Error::InvalidPresentation(format!(
                "projection rows must have length {t}"
            )));
        }
        // x ↦ xP is zero in G iff (x, w)·[P; diag(m)] = 0 for some w
        let mut stacked = widen(&projection);
        for (j, &n) in group.moduli().iter().enumerate() {
            let mut row = vec![0i128; t];
            row[j] = n as i128;
            stacked.push(row);
        }
        let mut section = Vec::with_capacity(t);
        for k in 0..t {
            let mut target_row = vec![0i128; t];
            target_row[k] = 1;
            let sol = intmat::solve_left(&stacked, t, &target_row)?.ok_or_else(|| {
                Error::InvalidPresentation(format!("projection is not surjective: generator {k} has no preimage"))
            })?;
            section.push(to_i64(vec![sol[..r].to_vec()])?.remove(0));
        }
        let raw_kernel: Matrix = intmat::left_kernel(&stacked, t)?
            .into_iter()
            .map(|row| row[..r].to_vec())
            .collect();
        let kernel_basis = intmat::hermite_rows(&raw_kernel, r)?;
        let kernel = match relations {
            None => to_i64(kernel_basis)?,
            Some(rows) => {
                if rows.iter().any(|row| row.len() != r) {
                    return Err(Error::InvalidPresentation(format!(
                        "relation rows must have length {r}"
                    )));
                }
                let echelon = intmat::hermite_rows(&widen(&rows), r)?;
                for row in &rows {
                    let img = project_raw(&projection, row, t);
                    if group.reduce(&img)? != group.zero() {
                        return Err(Error::InvalidPresentation(format!(
                            "relation {row:?} is not in the kernel of π"
                        )));
                    }
                }
                for v in &kernel_basis {
                    if !intmat::lattice_contains(&echelon, v)? {
                        return Err(Error::InvalidPresentation(format!(
                            "relations do not span the kernel of π (missing {v:?})"
                        )));
                    }
                }
                to_i64(echelon)?
            }
        };
        Ok(Presentation {
            relations: Relations::Matrix(kernel.clone()),
            group,
            target,
            projection,
            kernel,
            section,
            c,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn target(&self) -> TargetGroup {
        self.target
    }

    /// Rank of `F₀`.
    pub fn rank(&self) -> usize {
        self.projection.len()
    }

    pub fn relations(&self) -> &Relations {
        &self.relations
    }

    pub fn projection(&self) -> &[Vec<i64>] {
        &self.projection
    }

    /// A basis of `F₁ = ker π`.
    pub fn kernel_basis(&self) -> &[Vec<i64>] {
        &self.kernel
    }

    pub fn matrix(&self) -> &[Vec<Value>] {
        &self.c
    }

    fn with_matrix(&self, c: Vec<Vec<Value>>) -> Presentation {
        Presentation { c, ..self.clone() }
    }

    /// `C(u, v)` for `u, v ∈ F₀`.
    pub fn pairing(&self, u: &[i64], v: &[i64]) -> Value {
        let mut acc = self.target.zero();
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj != 0 {
                    acc = acc + self.c[i][j].scale(ui as i128 * vj as i128);
                }
            }
        }
        acc
    }

    /// `π(u)` as a canonical element.
    pub fn project(&self, u: &[i64]) -> Result<GroupElement> {
        if u.len() != self.rank() {
            return Err(Error::LengthMismatch {
                expected: self.rank(),
                found: u.len(),
            });
        }
        self.group.reduce(&project_raw(&self.projection, u, self.group.rank()))
    }

    /// `Q(u) = q(π u)`.
    pub fn pulled_back(&self, q: &QuadraticForm, u: &[i64]) -> Value {
        q.evaluate_raw(&project_raw(&self.projection, u, self.group.rank()))
            .expect("projection has the group's rank")
    }

    /// The admissible lift: on a diagonal presentation the coordinatewise
    /// residue representative.
    pub fn lift(&self, x: &GroupElement) -> Result<Vec<i64>> {
        self.group.check_element(x)?;
        Ok(self.lift_coords(x.coords()))
    }

    pub(crate) fn lift_coords(&self, x: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.rank()];
        for (k, &xk) in x.iter().enumerate() {
            if xk != 0 {
                for (o, &s) in out.iter_mut().zip(&self.section[k]) {
                    *o += xk * s;
                }
            }
        }
        out
    }

    /// `L(x, y) = lift(x+y) − lift(x) − lift(y)`, an element of `F₁`.
    pub fn l_function(&self, x: &GroupElement, y: &GroupElement) -> Result<Vec<i64>> {
        let s = self.group.add(x, y)?;
        let (ls, lx, ly) = (self.lift(&s)?, self.lift(x)?, self.lift(y)?);
        Ok(ls.iter().zip(&lx).zip(&ly).map(|((a, b), c)| a - b - c).collect())
    }

    pub(crate) fn check_form(&self, q: &QuadraticForm) -> Result<()> {
        if q.group() != &self.group || q.target() != self.target {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    /// First failure of `C(e_i,e_j) + C(e_j,e_i) = b(πe_i, πe_j)`.
    fn polarization_failure(&self, q: &QuadraticForm) -> Option<(usize, usize, Value, Value)> {
        let r = self.rank();
        for i in 0..r {
            for j in i..r {
                let lhs = self.c[i][j] + self.c[j][i];
                let rhs = self.basis_polarization(q, i, j);
                if lhs != rhs {
                    return Some((i, j, lhs, rhs));
                }
            }
        }
        None
    }

    fn basis_polarization(&self, q: &QuadraticForm, i: usize, j: usize) -> Value {
        let mut ei = vec![0i64; self.rank()];
        let mut ej = vec![0i64; self.rank()];
        ei[i] += 1;
        ej[j] += 1;
        let sum: Vec<i64> = ei.iter().zip(&ej).map(|(a, b)| a + b).collect();
        self.pulled_back(q, &sum) - self.pulled_back(q, &ei) - self.pulled_back(q, &ej)
    }

    /// First failure of `C(f, f) = 0` and `C(f,f') + C(f',f) = 0` on `F₁`.
    fn kernel_alternation_failure(&self) -> Option<String> {
        for (a, f) in self.kernel.iter().enumerate() {
            let v = self.pairing(f, f);
            if !v.is_zero() {
                return Some(format!("C(f{a},f{a}) = {v} for f{a} = {f:?}"));
            }
            for (b, g) in self.kernel.iter().enumerate().skip(a + 1) {
                let s = self.pairing(f, g) + self.pairing(g, f);
                if !s.is_zero() {
                    return Some(format!("C(f{a},f{b}) + C(f{b},f{a}) = {s}"));
                }
            }
        }
        None
    }

    fn require_pre_admissible(&self, q: &QuadraticForm) -> Result<()> {
        if let Some((i, j, lhs, rhs)) = self.polarization_failure(q) {
            return Err(Error::NotPreAdmissible {
                axiom: "polarization".into(),
                detail: format!("C(e{i},e{j}) + C(e{j},e{i}) = {lhs} but b(πe{i},πe{j}) = {rhs}"),
            });
        }
        if let Some(detail) = self.kernel_alternation_failure() {
            return Err(Error::NotPreAdmissible {
                axiom: "isotropy of F1".into(),
                detail,
            });
        }
        Ok(())
    }

    /// First pair of `F₁` basis vectors with `C(f_a, f_b) ≠ 0`.
    pub fn admissibility_witness(&self) -> Option<(Vec<i64>, Vec<i64>, Value)> {
        for f in &self.kernel {
            for g in &self.kernel {
                let v = self.pairing(f, g);
                if !v.is_zero() {
                    return Some((f.clone(), g.clone(), v));
                }
            }
        }
        None
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility_witness().is_none()
    }

    /// `Q(e_i) = C(e_i, e_i)` on the basis; together with the polarization
    /// axiom this gives `Q(x) = C(x,x)` on all of `F₀`.
    fn optimality_failure(&self, q: &QuadraticForm) -> Option<(usize, Value, Value)> {
        (0..self.rank()).find_map(|i| {
            let mut e = vec![0i64; self.rank()];
            e[i] = 1;
            let (lhs, rhs) = (self.pulled_back(q, &e), self.c[i][i]);
            (lhs != rhs).then_some((i, lhs, rhs))
        })
    }

    /// Checks the hypotheses of the cocycle construction.
    pub fn require_admissible_optimal(&self, q: &QuadraticForm) -> Result<()> {
        self.check_form(q)?;
        if let Some((i, j, lhs, rhs)) = self.polarization_failure(q) {
            return Err(Error::PresentationNotAdmissible(format!(
                "polarization axiom fails at (e{i},e{j}): {lhs} vs {rhs}"
            )));
        }
        if let Some((f, g, v)) = self.admissibility_witness() {
            return Err(Error::PresentationNotAdmissible(format!("C({f:?},{g:?}) = {v}")));
        }
        if let Some((i, lhs, rhs)) = self.optimality_failure(q) {
            return Err(Error::PresentationNotOptimal(format!(
                "Q(e{i}) = {lhs} but C(e{i},e{i}) = {rhs}"
            )));
        }
        Ok(())
    }
}

fn project_raw(projection: &[Vec<i64>], u: &[i64], t: usize) -> Vec<i64> {
    let mut out = vec![0i64; t];
    for (row, &ui) in projection.iter().zip(u) {
        if ui != 0 {
            for (o, &p) in out.iter_mut().zip(row) {
                *o += ui * p;
            }
        }
    }
    out
}

fn check_matrix(c: &[Vec<Value>], r: usize, target: TargetGroup) -> Result<()> {
    if c.len() != r || c.iter().any(|row| row.len() != r) {
        return Err(Error::InvalidPresentation(format!("C must be a {r}×{r} matrix")));
    }
    if c.iter().flatten().any(|v| v.target() != target) {
        return Err(Error::MixedTargets);
    }
    Ok(())
}

/// The diagonal presentation with `C(e_i,e_j) = b(e_i,e_j)` for `i < j`,
/// `q(e_i)` for `i = j` and `0` below the diagonal.
pub fn standard_presentation(q: &QuadraticForm) -> Presentation {
    let r = q.group().rank();
    let c = (0..r).map(|i| (0..r).map(|j| q.sigma(i, j)).collect()).collect();
    Presentation::diagonal(q.group().clone(), q.target(), c).expect("σ has the right shape")
}

/// The diagonal presentation with `C = S`, for a bilinear `S` with
/// `S(x,x) = q(x)`. `C` vanishes against `F₁`, so the associator of the
/// resulting cocycle is zero.
pub fn from_bilinear(s: &BilinearForm, q: &QuadraticForm) -> Result<Presentation> {
    if s.group() != q.group() || s.target() != q.target() {
        return Err(Error::GroupMismatch);
    }
    let group = q.group();
    let points: Box<dyn Iterator<Item = GroupElement>> = match group.elements() {
        Ok(it) => Box::new(it),
        Err(_) => Box::new(group.box_elements(DEFAULT_BOX)),
    };
    for x in points {
        if s.eval_raw(x.coords(), x.coords()) != q.evaluate(&x)? {
            return Err(Error::WitnessMismatch { x });
        }
    }
    Presentation::diagonal(group.clone(), q.target(), s.entries().to_vec())
}

/// Replaces `C` by `C − J` so that `Q(x) = C(x,x)` on `F₀`.
///
/// `L(x) = C(x,x) − Q(x)` is a homomorphism `F₀/2F₀ → M[2]` vanishing on
/// the image of `F₁`. With an `F₂`-basis `γ` of `F₀/2F₀` listing a basis of
/// that image first, `J(x,y) = Σ_i x̄_i ȳ_i L(γ_i)`.
pub fn optimize(p: &Presentation, q: &QuadraticForm) -> Result<Presentation> {
    p.check_form(q)?;
    p.require_pre_admissible(q)?;
    let r = p.rank();
    let mut basis: Vec<Vec<u8>> = Vec::new();
    let mut echelon: Vec<(usize, Vec<u8>)> = Vec::new();
    let candidates = p
        .kernel
        .iter()
        .map(|f| f.iter().map(|&x| (x.rem_euclid(2)) as u8).collect::<Vec<u8>>())
        .chain((0..r).map(|j| (0..r).map(|i| u8::from(i == j)).collect()));
    for v in candidates {
        let mut w = v.clone();
        for (pivot, row) in &echelon {
            if w[*pivot] == 1 {
                for (a, b) in w.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
        if let Some(pivot) = w.iter().position(|&x| x == 1) {
            echelon.push((pivot, w));
            basis.push(v);
        }
    }
    debug_assert_eq!(basis.len(), r);
    let inverse = f2_inverse(&basis);
    let l_values: Vec<Value> = basis
        .iter()
        .map(|g| {
            let g: Vec<i64> = g.iter().map(|&b| b as i64).collect();
            p.pairing(&g, &g) - p.pulled_back(q, &g)
        })
        .collect();
    // coordinates of e_a in the basis γ are the rows of Γ⁻¹
    let c = (0..r)
        .map(|a| {
            (0..r)
                .map(|b| {
                    let mut j = p.target.zero();
                    for (i, l) in l_values.iter().enumerate() {
                        if inverse[a][i] & inverse[b][i] == 1 {
                            j = j + *l;
                        }
                    }
                    p.c[a][b] - j
                })
                .collect()
        })
        .collect();
    Ok(p.with_matrix(c))
}

fn f2_inverse(rows: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let n = rows.len();
    let mut a: Vec<Vec<u8>> = rows.to_vec();
    let mut inv: Vec<Vec<u8>> = (0..n).map(|i| (0..n).map(|j| u8::from(i == j)).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| a[i][col] == 1).expect("basis is invertible");
        a.swap(col, piv);
        inv.swap(col, piv);
        for i in 0..n {
            if i != col && a[i][col] == 1 {
                let (ar, ir) = (a[col].clone(), inv[col].clone());
                for k in 0..n {
                    a[i][k] ^= ar[k];
                    inv[i][k] ^= ir[k];
                }
            }
        }
    }
    inv
}

/// Subtracts an alternating form `A` extending `C|_{F₁}` so that the result
/// vanishes on `F₁ × F₁`. Needs a divisible target.
///
/// With `U·K·V = D` for the kernel basis `K`, the vectors `w_i` (rows of
/// `V⁻¹`) form a basis of `F₀` with `F₁` spanned by `d_i w_i`; `A` is defined
/// on the `w_i` by dividing the transformed Gram matrix by `d_i d_j`.
pub fn make_admissible(p: &Presentation) -> Result<Presentation> {
    if !p.target.is_divisible() {
        return Err(Error::TargetNotDivisible);
    }
    if let Some(detail) = p.kernel_alternation_failure() {
        return Err(Error::NotPreAdmissible {
            axiom: "isotropy of F1".into(),
            detail,
        });
    }
    let s = p.kernel.len();
    let r = p.rank();
    if s == 0 {
        return Ok(p.clone());
    }
    let k = widen(&p.kernel);
    let snf = intmat::smith(&k, r)?;
    let gram: Vec<Vec<Value>> = p
        .kernel
        .iter()
        .map(|f| p.kernel.iter().map(|g| p.pairing(f, g)).collect())
        .collect();
    // transformed Gram matrix U·gram·Uᵀ
    let zero = p.target.zero();
    let mut aw = vec![vec![zero; r]; r];
    for i in 0..snf.rank() {
        for j in i + 1..snf.rank() {
            let mut v = zero;
            for (a, row) in gram.iter().enumerate() {
                for (b, g) in row.iter().enumerate() {
                    let m = snf.u[i][a].checked_mul(snf.u[j][b]).ok_or(Error::Overflow)?;
                    if m != 0 {
                        v = v + g.scale(m);
                    }
                }
            }
            let den = snf.diag[i].checked_mul(snf.diag[j]).ok_or(Error::Overflow)?;
            let divided = v
                .as_qz()
                .ok_or(Error::TargetNotQmodZ)?
                .divide(u64::try_from(den).map_err(|_| Error::Overflow)?)
                .ok_or(Error::Overflow)?;
            aw[i][j] = Value::QZ(divided);
            aw[j][i] = -Value::QZ(divided);
        }
    }
    // back to the standard basis: A = V·A_w·Vᵀ
    let mut c = p.c.clone();
    for (a, crow) in c.iter_mut().enumerate() {
        for (b, cab) in crow.iter_mut().enumerate() {
            let mut v = zero;
            for i in 0..r {
                if snf.v[a][i] == 0 {
                    continue;
                }
                for j in 0..r {
                    let m = snf.v[a][i].checked_mul(snf.v[b][j]).ok_or(Error::Overflow)?;
                    if m != 0 && !aw[i][j].is_zero() {
                        v = v + aw[i][j].scale(m);
                    }
                }
            }
            *cab = *cab - v;
        }
    }
    let out = p.with_matrix(c);
    debug_assert!(out.is_admissible());
    Ok(out)
}

/// Outcome of one family of checks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckResult {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(describe());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationReport {
    pub polarization: CheckResult,
    pub kernel_isotropy: CheckResult,
    pub pre_admissible: bool,
    pub admissible: bool,
    /// First `F₁` basis pair with nonzero pairing and its value.
    pub admissibility_witness: Option<(Vec<i64>, Vec<i64>, Value)>,
    pub optimality: CheckResult,
    pub optimal: bool,
    pub lift_section: CheckResult,
    pub l_zero: CheckResult,
    pub l_symmetric: CheckResult,
    pub l_cocycle: CheckResult,
    pub l_in_kernel: CheckResult,
    /// `C(L(u,x), L(y,z)) = 0`; `None` when the domain is too large.
    pub l_isotropic: Option<CheckResult>,
    /// `None` for exhaustive checks over `G`, else the coordinate box bound.
    pub box_bound: Option<i64>,
}

impl PresentationReport {
    /// All lift and `L` properties that are expected for this presentation.
    pub fn lift_properties_hold(&self) -> bool {
        self.lift_section.passed()
            && self.l_zero.passed()
            && self.l_symmetric.passed()
            && self.l_cocycle.passed()
            && self.l_in_kernel.passed()
            && (!self.admissible || self.l_isotropic.as_ref().is_none_or(|c| c.passed()))
    }
}

/// Checks the presentation axioms, admissibility, optimality and the lift
/// and `L` identities. Exhaustive over `G` when finite, else over the box
/// of half-width `bound`.
pub fn validate_presentation(p: &Presentation, q: &QuadraticForm, bound: i64) -> Result<PresentationReport> {
    p.check_form(q)?;
    let r = p.rank();
    let mut polarization = CheckResult::default();
    for i in 0..r {
        for j in 0..r {
            let lhs = p.c[i][j] + p.c[j][i];
            let rhs = p.basis_polarization(q, i, j);
            polarization.record(lhs == rhs, || {
                format!("C(e{i},e{j}) + C(e{j},e{i}) = {lhs} but b(πe{i},πe{j}) = {rhs}")
            });
        }
    }
    let mut kernel_isotropy = CheckResult::default();
    for (a, f) in p.kernel.iter().enumerate() {
        let v = p.pairing(f, f);
        kernel_isotropy.record(v.is_zero(), || format!("C(f{a},f{a}) = {v} for f{a} = {f:?}"));
    }
    let pre_admissible = polarization.passed() && kernel_isotropy.passed();
    let admissibility_witness = p.admissibility_witness();
    let admissible = pre_admissible && admissibility_witness.is_none();

    let mut optimality = CheckResult::default();
    let mut b = bound.max(1);
    while b > 1 && (2 * b as usize + 1).saturating_pow(r as u32) > OPTIMALITY_BOX_POINTS {
        b -= 1;
    }
    let mut f0_points: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
    f0_points.extend(Group::from_moduli(vec![0; r]).box_elements(b).map(|x| x.into_coords()));
    for u in &f0_points {
        let (lhs, rhs) = (p.pulled_back(q, u), p.pairing(u, u));
        optimality.record(lhs == rhs, || format!("Q({u:?}) = {lhs} but C(x,x) = {rhs}"));
    }
    let optimal = optimality.passed();

    let group = &p.group;
    let (points, box_bound): (Vec<GroupElement>, Option<i64>) = match group.elements() {
        Ok(it) => (it.collect(), None),
        Err(_) => (group.box_elements(bound).collect(), Some(bound)),
    };
    let zero = group.zero();
    let mut lift_section = CheckResult::default();
    lift_section.record(p.lift(&zero)?.iter().all(|&c| c == 0), || "lift(0) ≠ 0".into());
    for x in &points {
        let back = p.project(&p.lift(x)?)?;
        lift_section.record(&back == x, || format!("π(lift({x})) = {back}"));
    }
    let mut l_zero = CheckResult::default();
    let mut l_symmetric = CheckResult::default();
    let mut l_cocycle = CheckResult::default();
    let mut l_in_kernel = CheckResult::default();
    let n = points.len();
    let mut l_table = vec![Vec::new(); n * n];
    for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate() {
            l_table[i * n + j] = p.l_function(x, y)?;
        }
    }
    for (i, x) in points.iter().enumerate() {
        let l0 = p.l_function(&zero, x)?;
        l_zero.record(l0.iter().all(|&c| c == 0), || format!("L(0,{x}) = {l0:?}"));
        for (j, y) in points.iter().enumerate() {
            let lxy = &l_table[i * n + j];
            l_symmetric.record(lxy == &l_table[j * n + i], || format!("L({x},{y}) ≠ L({y},{x})"));
            let img = p.project(lxy)?;
            l_in_kernel.record(img.is_zero(), || format!("π(L({x},{y})) = {img}"));
            let xy = group.add(x, y)?;
            for z in &points {
                let yz = group.add(y, z)?;
                let lhs: Vec<i64> = p
                    .l_function(&xy, z)?
                    .iter()
                    .zip(&p.l_function(x, &yz)?)
                    .map(|(a, b)| a - b)
                    .collect();
                let rhs: Vec<i64> = p.l_function(y, z)?.iter().zip(lxy).map(|(a, b)| a - b).collect();
                l_cocycle.record(lhs == rhs, || format!("L-identity fails at ({x},{y},{z})"));
            }
        }
    }
    let l_isotropic = if group.order().is_some_and(|o| o <= ISOTROPY_EXHAUSTIVE_ORDER) {
        let mut res = CheckResult::default();
        for a in 0..n * n {
            for b in 0..n * n {
                let v = p.pairing(&l_table[a], &l_table[b]);
                res.record(v.is_zero(), || {
                    let (u, x, y, z) = (&points[a / n], &points[a % n], &points[b / n], &points[b % n]);
                    format!("C(L({u},{x}),L({y},{z})) = {v}")
                });
            }
        }
        Some(res)
    } else {
        None
    };
    Ok(PresentationReport {
        polarization,
        kernel_isotropy,
        pre_admissible,
        admissible,
        admissibility_witness,
        optimality,
        optimal,
        lift_section,
        l_zero,
        l_symmetric,
        l_cocycle,
        l_in_kernel,
        l_isotropic,
        box_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::{enumerate_forms, qz};
    use std::collections::BTreeMap;

    fn g(m: &[u64]) -> Group {
        Group::from_moduli(m.to_vec())
    }

    fn form_1d(n: u64, v: Value, target: TargetGroup) -> QuadraticForm {
        QuadraticForm::from_params(g(&[n]), target, vec![v], BTreeMap::new()).unwrap()
    }

    fn example_24() -> QuadraticForm {
        let mut off = BTreeMap::new();
        off.insert((0, 1), qz(1, 2));
        QuadraticForm::from_params(g(&[2, 4]), TargetGroup::QmodZ, vec![qz(1, 4), qz(1, 8)], off).unwrap()
    }

    /// `Z³ → Z`, `(x₁,x₂,x₃) ↦ Σxᵢ`, with `C = v·(2 / 1 / 0)` above / on / below the diagonal.
    fn sum_presentation(v: Value, target: TargetGroup) -> (Presentation, QuadraticForm) {
        let c = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => v.scale(2),
                        std::cmp::Ordering::Equal => v,
                        std::cmp::Ordering::Greater => target.zero(),
                    })
                    .collect()
            })
            .collect();
        let p = Presentation::with_projection(g(&[0]), target, vec![vec![1]; 3], None, c).unwrap();
        (p, form_1d(0, v, target))
    }

    #[test]
    fn standard_presentation_examples() {
        let q = form_1d(2, qz(1, 4), TargetGroup::QmodZ);
        let p = standard_presentation(&q);
        assert_eq!(p.rank(), 1);
        assert_eq!(p.matrix(), &[vec![qz(1, 4)]]);
        let p = standard_presentation(&example_24());
        assert_eq!(p.matrix(), &[vec![qz(1, 4), qz(1, 2)], vec![qz(0, 1), qz(1, 8)]]);
        let z = QuadraticForm::zero(g(&[2, 2]), TargetGroup::QmodZ);
        assert!(standard_presentation(&z).matrix().iter().flatten().all(|v| v.is_zero()));
    }

    #[test]
    fn standard_presentations_validate_on_2x2() {
        for q in enumerate_forms(&g(&[2, 2])).unwrap() {
            let rep = validate_presentation(&standard_presentation(&q), &q, DEFAULT_BOX).unwrap();
            assert!(rep.pre_admissible && rep.admissible && rep.optimal, "{rep:?}");
            assert!(rep.lift_properties_hold());
            assert!(rep.l_isotropic.as_ref().unwrap().passed());
        }
    }

    #[test]
    fn lift_and_l_examples() {
        let q = form_1d(2, qz(1, 4), TargetGroup::QmodZ);
        let p = standard_presentation(&q);
        let one = q.group().reduce(&[1]).unwrap();
        assert_eq!(p.l_function(&one, &one).unwrap(), vec![-2]);
        assert_eq!(p.l_function(&q.group().zero(), &one).unwrap(), vec![0]);
        let p = standard_presentation(&example_24());
        let grp = g(&[2, 4]);
        let (x, y) = (grp.reduce(&[1, 3]).unwrap(), grp.reduce(&[1, 2]).unwrap());
        assert_eq!(p.l_function(&x, &y).unwrap(), vec![-2, -4]);
        assert_eq!(p.lift(&x).unwrap(), vec![1, 3]);
    }

    #[test]
    fn from_bilinear_examples() {
        let q = form_1d(2, qz(1, 2), TargetGroup::QmodZ);
        let s = BilinearForm::new(g(&[2]), TargetGroup::QmodZ, vec![vec![qz(1, 2)]]).unwrap();
        let p = from_bilinear(&s, &q).unwrap();
        let rep = validate_presentation(&p, &q, DEFAULT_BOX).unwrap();
        assert!(rep.admissible && rep.optimal);
        let q = form_1d(2, qz(1, 4), TargetGroup::QmodZ);
        let s = BilinearForm::zero(g(&[2]), TargetGroup::QmodZ);
        assert_eq!(
            from_bilinear(&s, &q),
            Err(Error::WitnessMismatch {
                x: g(&[2]).reduce(&[1]).unwrap()
            })
        );
        let t = Group::trivial();
        let q = QuadraticForm::zero(t.clone(), TargetGroup::QmodZ);
        let p = from_bilinear(&BilinearForm::zero(t, TargetGroup::QmodZ), &q).unwrap();
        assert_eq!(p.rank(), 0);
    }

    #[test]
    fn optimize_binary_example() {
        let z2 = TargetGroup::zmod(2).unwrap();
        let q = form_1d(2, z2.from_integer(1), z2);
        let p = Presentation::diagonal(g(&[2]), z2, vec![vec![z2.zero()]]).unwrap();
        let rep = validate_presentation(&p, &q, DEFAULT_BOX).unwrap();
        assert!(rep.admissible && !rep.optimal);
        let opt = optimize(&p, &q).unwrap();
        assert_eq!(opt.matrix(), &[vec![z2.from_integer(1)]]);
        let rep = validate_presentation(&opt, &q, DEFAULT_BOX).unwrap();
        assert!(rep.admissible && rep.optimal);
    }

    #[test]
    fn optimize_keeps_optimal_input() {
        for q in enumerate_forms(&g(&[2, 4])).unwrap() {
            let p = standard_presentation(&q);
            assert_eq!(optimize(&p, &q).unwrap(), p);
        }
    }

    #[test]
    fn optimize_repairs_every_diagonal_defect() {
        // shifting the diagonal by 2-torsion keeps the polarization axiom
        for m in [[2u64, 2], [2, 4]] {
            for q in enumerate_forms(&g(&m)).unwrap() {
                let std = standard_presentation(&q);
                let mut c = std.matrix().to_vec();
                c[0][0] = c[0][0] + qz(1, 2);
                c[1][1] = c[1][1] + qz(1, 2);
                let p = std.with_matrix(c);
                let before = validate_presentation(&p, &q, DEFAULT_BOX).unwrap();
                assert!(before.admissible && !before.optimal);
                let rep = validate_presentation(&optimize(&p, &q).unwrap(), &q, DEFAULT_BOX).unwrap();
                assert!(rep.admissible && rep.optimal, "{rep:?}");
            }
        }
    }

    #[test]
    fn optimize_rejects_broken_polarization() {
        let q = example_24();
        let mut p = standard_presentation(&q);
        p.c[0][1] = qz(0, 1);
        assert!(matches!(
            optimize(&p, &q),
            Err(Error::NotPreAdmissible { axiom, .. }) if axiom == "polarization"
        ));
        let rep = validate_presentation(&p, &q, DEFAULT_BOX).unwrap();
        assert!(!rep.pre_admissible);
        assert_eq!(rep.polarization.failures.len(), 2);
        assert!(rep.polarization.failures[0].contains("C(e0,e1)"));
    }

    #[test]
    fn sum_presentation_over_integers() {
        let (p, q) = sum_presentation(Value::Int(1), TargetGroup::Integers);
        assert_eq!(p.kernel_basis(), &[vec![1, 0, -1], vec![0, 1, -1]]);
        let rep = validate_presentation(&p, &q, DEFAULT_BOX).unwrap();
        assert!(rep.pre_admissible && rep.optimal && !rep.admissible);
        let (f, g2, v) = rep.admissibility_witness.unwrap();
        assert_eq!((f, g2, v), (vec![1, 0, -1], vec![0, 1, -1], Value::Int(1)));
        assert_eq!(optimize(&p, &q).unwrap(), p);
        assert_eq!(make_admissible(&p), Err(Error::TargetNotDivisible));
    }

    #[test]
    fn make_admissible_sum_presentation() {
        for den in [2u64, 3, 5, 7] {
            let (p, q) = sum_presentation(qz(1, den), TargetGroup::QmodZ);
            if den > 2 {
                assert!(!p.is_admissible());
            }
            let fixed = make_admissible(&p).unwrap();
            assert!(fixed.is_admissible());
            for u in Group::from_moduli(vec![0; 3]).box_elements(3) {
                assert_eq!(fixed.pairing(u.coords(), u.coords()), p.pairing(u.coords(), u.coords()));
            }
            let rep = validate_presentation(&fixed, &q, DEFAULT_BOX).unwrap();
            assert!(rep.pre_admissible && rep.admissible && rep.optimal);
        }
    }

    #[test]
    fn make_admissible_on_standard_presentations() {
        for q in enumerate_forms(&g(&[2, 4])).unwrap() {
            let p = standard_presentation(&q);
            let fixed = make_admissible(&p).unwrap();
            for f in p.kernel_basis() {
                for h in p.kernel_basis() {
                    assert_eq!(fixed.pairing(f, h), p.pairing(f, h));
                }
            }
            for x in Group::from_moduli(vec![0; 2]).box_elements(3) {
                assert_eq!(fixed.pairing(x.coords(), x.coords()), p.pairing(x.coords(), x.coords()));
            }
        }
    }

    #[test]
    fn explicit_relations_are_checked() {
        let target = TargetGroup::Integers;
        let c = vec![vec![Value::Int(0); 3]; 3];
        let ok = Presentation::with_projection(
            g(&[0]),
            target,
            vec![vec![1]; 3],
            Some(vec![vec![1, -1, 0], vec![0, 1, -1]]),
            c.clone(),
        );
        assert!(ok.is_ok());
        let short =
            Presentation::with_projection(g(&[0]), target, vec![vec![1]; 3], Some(vec![vec![1, -1, 0]]), c.clone());
        assert!(matches!(short, Err(Error::InvalidPresentation(_))));
        let wrong = Presentation::with_projection(g(&[0]), target, vec![vec![1]; 3], Some(vec![vec![1, 0, 0]]), c);
        assert!(matches!(wrong, Err(Error::InvalidPresentation(_))));
        let not_onto = Presentation::with_projection(g(&[0]), target, vec![vec![2]], None, vec![vec![Value::Int(0)]]);
        assert!(matches!(not_onto, Err(Error::InvalidPresentation(_))));
    }

    #[test]
    fn non_diagonal_finite_presentation() {
        // Z² → Z/4 via (1, 2)
        let q = form_1d(4, qz(1, 8), TargetGroup::QmodZ);
        let proj = vec![vec![1], vec![2]];
        let zero = vec![vec![qz(0, 1); 2]; 2];
        let p = Presentation::with_projection(g(&[4]), TargetGroup::QmodZ, proj, None, zero).unwrap();
        for f in p.kernel_basis() {
            assert!(p.project(f).unwrap().is_zero());
        }
        let rep = validate_presentation(&p, &q, DEFAULT_BOX).unwrap();
        assert!(rep.lift_section.passed() && rep.l_in_kernel.passed());
    }
}
