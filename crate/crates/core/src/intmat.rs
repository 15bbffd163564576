//! Exact integer matrix algorithms: Smith and Hermite normal forms, lattice
//! membership, integer solving, and linear systems over `Z/d`.

use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<i128>>;

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

fn sub_mul(a: i128, f: i128, b: i128) -> Result<i128> {
    a.checked_sub(mul(f, b)?).ok_or(Error::Overflow)
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![0i128; cols]; a.len()];
    for (i, row) in a.iter().enumerate() {
        debug_assert_eq!(row.len(), inner);
        for (k, &aik) in row.iter().enumerate() {
            if aik == 0 {
                continue;
            }
            for j in 0..cols {
                out[i][j] = out[i][j].checked_add(mul(aik, b[k][j])?).ok_or(Error::Overflow)?;
            }
        }
    }
    Ok(out)
}

/// `x · A` for a row vector `x`.
pub fn vecmat(x: &[i128], a: &Matrix) -> Result<Vec<i128>> {
    Ok(matmul(&vec![x.to_vec()], a)?.remove(0))
}

/// Smith normal form `U · A · V = D` with unimodular `U`, `V`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: Matrix,
    pub v: Matrix,
    /// Nonzero invariant factors `d_0 | d_1 | …`, length = rank.
    pub diag: Vec<i128>,
    pub rows: usize,
    pub cols: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

pub fn smith(a: &Matrix, cols: usize) -> Result<Smith> {
    let m = a.len();
    let n = cols;
    let mut d = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if d[i][j] != 0 && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        for row in d.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d[i][t] != 0 {
                    let f = d[i][t].div_euclid(d[t][t]);
                    for j in 0..n {
                        d[i][j] = sub_mul(d[i][j], f, d[t][j])?;
                    }
                    for j in 0..m {
                        u[i][j] = sub_mul(u[i][j], f, u[t][j])?;
                    }
                    if d[i][t] != 0 {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if d[t][j] != 0 {
                    let f = d[t][j].div_euclid(d[t][t]);
                    for i in 0..m {
                        d[i][j] = sub_mul(d[i][j], f, d[i][t])?;
                    }
                    for i in 0..n {
                        v[i][j] = sub_mul(v[i][j], f, v[i][t])?;
                    }
                    if d[t][j] != 0 {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                // divisibility: fold an offending row into row t and retry
                let mut offender = None;
                'scan: for i in t + 1..m {
                    for j in t + 1..n {
                        if d[i][j] % d[t][t] != 0 {
                            offender = Some(i);
                            break 'scan;
                        }
                    }
                }
                match offender {
                    None => break,
                    Some(i) => {
                        for j in 0..n {
                            d[t][j] = d[t][j].checked_add(d[i][j]).ok_or(Error::Overflow)?;
                        }
                        for j in 0..m {
                            u[t][j] = u[t][j].checked_add(u[i][j]).ok_or(Error::Overflow)?;
                        }
                        continue;
                    }
                }
            }
            // move the smallest entry of row/column t to the pivot
            let mut bi = (t, t);
            for i in t..m {
                if d[i][t] != 0 && d[i][t].abs() < d[bi.0][bi.1].abs() {
                    bi = (i, t);
                }
            }
            for j in t..n {
                if d[t][j] != 0 && d[t][j].abs() < d[bi.0][bi.1].abs() {
                    bi = (t, j);
                }
            }
            if bi.0 != t {
                d.swap(t, bi.0);
                u.swap(t, bi.0);
            }
            if bi.1 != t {
                for row in d.iter_mut() {
                    row.swap(t, bi.1);
                }
                for row in v.iter_mut() {
                    row.swap(t, bi.1);
                }
            }
        }
        if d[t][t] < 0 {
            for j in 0..n {
                d[t][j] = -d[t][j];
            }
            for j in 0..m {
                u[t][j] = -u[t][j];
            }
        }
        diag.push(d[t][t]);
        t += 1;
    }
    Ok(Smith {
        u,
        v,
        diag,
        rows: m,
        cols: n,
    })
}

/// Row echelon basis of the lattice spanned by `rows` (zero rows dropped).
/// Pivots are positive and entries above a pivot are reduced into `[0, pivot)`.
pub fn hermite_rows(rows: &Matrix, cols: usize) -> Result<Matrix> {
    let mut a: Matrix = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let mut r = 0;
    for c in 0..cols {
        loop {
            let mut best: Option<usize> = None;
            for i in r..a.len() {
                if a[i][c] != 0 && best.is_none_or(|b| a[i][c].abs() < a[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(r, b);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][c] != 0 {
                    let f = a[i][c].div_euclid(a[r][c]);
                    for j in 0..cols {
                        a[i][j] = sub_mul(a[i][j], f, a[r][j])?;
                    }
                    if a[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                if a[r][c] < 0 {
                    for x in a[r].iter_mut() {
                        *x = -*x;
                    }
                }
                for i in 0..r {
                    let f = a[i][c].div_euclid(a[r][c]);
                    if f != 0 {
                        for j in 0..cols {
                            a[i][j] = sub_mul(a[i][j], f, a[r][j])?;
                        }
                    }
                }
                r += 1;
                break;
            }
        }
    }
    a.truncate(r);
    Ok(a)
}

/// Whether `v` lies in the lattice with echelon basis `basis` (as produced by
/// [`hermite_rows`]).
pub fn lattice_contains(basis: &Matrix, v: &[i128]) -> Result<bool> {
    let mut v = v.to_vec();
    for row in basis {
        let Some(c) = row.iter().position(|&x| x != 0) else {
            continue;
        };
        if v[c] % row[c] != 0 {
            return Ok(false);
        }
        let f = v[c] / row[c];
        for j in 0..v.len() {
            v[j] = sub_mul(v[j], f, row[j])?;
        }
    }
    Ok(v.iter().all(|&x| x == 0))
}

/// A basis of the left kernel `{x : x·A = 0}` of an `m × cols` matrix.
pub fn left_kernel(a: &Matrix, cols: usize) -> Result<Matrix> {
    let s = smith(a, cols)?;
    Ok(s.u[s.rank()..].to_vec())
}

/// An integer row vector `x` with `x · A = b`, if one exists.
pub fn solve_left(a: &Matrix, cols: usize, b: &[i128]) -> Result<Option<Vec<i128>>> {
    let s = smith(a, cols)?;
    let bv = vecmat(b, &s.v)?;
    let mut y = vec![0i128; a.len()];
    for (j, &val) in bv.iter().enumerate() {
        if j < s.rank() {
            if val % s.diag[j] != 0 {
                return Ok(None);
            }
            y[j] = val / s.diag[j];
        } else if val != 0 {
            return Ok(None);
        }
    }
    Ok(Some(vecmat(&y, &s.u)?))
}

fn factorize(mut d: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            let mut e = 0;
            while d.is_multiple_of(p) {
                d /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if d > 1 {
        out.push((d, 1));
    }
    out
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, a as i128 % m as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

fn valuation(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x != 0 && x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

// Elimination over Z/p^e with full pivoting on minimal p-valuation.
fn solve_prime_power(a: &[Vec<u64>], b: &[u64], n: usize, p: u64, e: u32) -> Option<Vec<u64>> {
    let q = p.pow(e);
    let mm = |x: u64, y: u64| ((x as u128 * y as u128) % q as u128) as u64;
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&x| x % q).collect()).collect();
    let mut rhs: Vec<u64> = b.iter().map(|&x| x % q).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut vals = Vec::new();
    let mut rank = 0;
    while rank < m.len().min(n) {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in m.iter().enumerate().skip(rank) {
            for (j, &x) in row.iter().enumerate().skip(rank) {
                if x != 0 {
                    let v = valuation(x, p);
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, v)) = best else { break };
        m.swap(rank, pi);
        rhs.swap(rank, pi);
        for row in m.iter_mut() {
            row.swap(rank, pj);
        }
        perm.swap(rank, pj);
        let pv = p.pow(v);
        let unit = inverse_mod(m[rank][rank] / pv, q).expect("unit part is invertible");
        for x in m[rank].iter_mut() {
            *x = mm(*x, unit);
        }
        rhs[rank] = mm(rhs[rank], unit);
        let pivot_row = m[rank].clone();
        let pivot_rhs = rhs[rank];
        for i in rank + 1..m.len() {
            if m[i][rank] == 0 {
                continue;
            }
            let f = m[i][rank] / pv;
            for (x, &y) in m[i].iter_mut().zip(&pivot_row) {
                *x = (*x + q - mm(f, y)) % q;
            }
            rhs[i] = (rhs[i] + q - mm(f, pivot_rhs)) % q;
        }
        vals.push(pv);
        rank += 1;
    }
    if rhs[rank..].iter().any(|&x| x != 0) {
        return None;
    }
    // back substitution; entries right of a pivot are divisible by it
    let mut y = vec![0u64; n];
    for i in (0..rank).rev() {
        let mut r = rhs[i];
        for j in i + 1..rank {
            r = (r + q - mm(m[i][j], y[j])) % q;
        }
        if !r.is_multiple_of(vals[i]) {
            return None;
        }
        y[i] = r / vals[i];
    }
    let mut x = vec![0u64; n];
    for (slot, &col) in perm.iter().enumerate() {
        x[col] = y[slot];
    }
    Some(x)
}

/// A solution of `A x ≡ b (mod d)` with entries in `[0, d)`, if one exists.
/// Free variables are set to zero in each prime-power component.
pub fn solve_mod(a: &[Vec<u64>], b: &[u64], n: usize, d: u64) -> Option<Vec<u64>> {
    assert!(d >= 1, "modulus must be positive");
    let mut x = vec![0u64; n];
    let mut modulus = 1u64;
    for (p, e) in factorize(d) {
        let q = p.pow(e);
        let part = solve_prime_power(a, b, n, p, e)?;
        // CRT: combine x (mod modulus) with part (mod q)
        let inv = inverse_mod(modulus % q, q).expect("coprime moduli");
        for (xi, &pi) in x.iter_mut().zip(&part) {
            let diff = (pi + q - *xi % q) % q;
            let t = ((diff as u128 * inv as u128) % q as u128) as u64;
            *xi += modulus * t;
        }
        modulus *= q;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_smith(a: &Matrix, cols: usize) {
        let s = smith(a, cols).unwrap();
        let d = matmul(&matmul(&s.u, a).unwrap(), &s.v).unwrap();
        for i in 0..a.len() {
            for j in 0..cols {
                let want = if i == j && i < s.rank() { s.diag[i] } else { 0 };
                assert_eq!(d[i][j], want, "{a:?}");
            }
        }
        for w in s.diag.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
    }

    #[test]
    fn smith_small_cases() {
        check_smith(&vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
        check_smith(&vec![vec![2, 0], vec![0, 3]], 2);
        check_smith(&vec![vec![1, 1, 1]], 3);
        check_smith(&vec![vec![0, 0], vec![0, 0]], 2);
        let s = smith(&vec![vec![2, 0], vec![0, 3]], 2).unwrap();
        assert_eq!(s.diag, vec![1, 6]);
    }

    #[test]
    fn kernel_of_sum_map() {
        let a = vec![vec![1], vec![1], vec![1]];
        let k = left_kernel(&a, 1).unwrap();
        assert_eq!(k.len(), 2);
        let h = hermite_rows(&k, 3).unwrap();
        assert_eq!(h, vec![vec![1, 0, -1], vec![0, 1, -1]]);
    }

    #[test]
    fn membership() {
        let basis = hermite_rows(&vec![vec![2, 0], vec![0, 4]], 2).unwrap();
        assert!(lattice_contains(&basis, &[-2, 8]).unwrap());
        assert!(!lattice_contains(&basis, &[1, 0]).unwrap());
    }

    #[test]
    fn solve_left_examples() {
        let a = vec![vec![2, 0], vec![0, 3]];
        assert_eq!(solve_left(&a, 2, &[4, 9]).unwrap(), Some(vec![2, 3]));
        assert_eq!(solve_left(&a, 2, &[1, 0]).unwrap(), None);
    }

    #[test]
    fn solve_mod_examples() {
        // 2x ≡ 1 mod 4 has no solution; 2x ≡ 2 mod 4 does
        assert_eq!(solve_mod(&[vec![2]], &[1], 1, 4), None);
        let x = solve_mod(&[vec![2]], &[2], 1, 4).unwrap();
        assert_eq!((2 * x[0]) % 4, 2);
        let a = vec![vec![1, 1], vec![1, 5]];
        let x = solve_mod(&a, &[3, 7], 2, 12).unwrap();
        assert_eq!(solve_mod(&a, &[3, 1], 2, 12), None);
        assert_eq!((x[0] + x[1]) % 12, 3);
        assert_eq!((x[0] + 5 * x[1]) % 12, 7);
    }

    proptest! {
        #[test]
        fn smith_is_a_valid_decomposition(entries in proptest::collection::vec(-9i128..=9, 12)) {
            let a: Matrix = entries.chunks(4).map(|c| c.to_vec()).collect();
            check_smith(&a, 4);
        }

        #[test]
        fn solve_mod_finds_planted_solutions(
            entries in proptest::collection::vec(0u64..36, 12),
            x in proptest::collection::vec(0u64..36, 3),
            d in prop::sample::select(vec![2u64, 4, 6, 8, 12, 36]),
        ) {
            let a: Vec<Vec<u64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let b: Vec<u64> = a.iter().map(|r| r.iter().zip(&x).map(|(p, q)| p * q).sum::<u64>() % d).collect();
            let sol = solve_mod(&a, &b, 3, d).expect("planted solution exists");
            for (row, &bi) in a.iter().zip(&b) {
                prop_assert_eq!(row.iter().zip(&sol).map(|(p, q)| p * q).sum::<u64>() % d, bi);
            }
        }

        #[test]
        fn hermite_preserves_lattice(entries in proptest::collection::vec(-6i128..=6, 9)) {
            let a: Matrix = entries.chunks(3).map(|c| c.to_vec()).collect();
            let h = hermite_rows(&a, 3).unwrap();
            for row in &a {
                prop_assert!(lattice_contains(&h, row).unwrap());
            }
            for row in &h {
                prop_assert!(solve_left(&a, 3, row).unwrap().is_some());
            }
        }
    }
}
