//! Finitely generated abelian groups `Z/n_0 ⊕ ... ⊕ Z/n_{r-1}` where a zero
//! modulus stands for a free factor `Z`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finitely generated abelian group given by its cyclic moduli.
///
/// The order of the moduli is the fixed total order on the generators used by
/// every formula in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Group {
    moduli: Vec<u64>,
}

/// An element of a [`Group`] in canonical coordinates: `0 <= x_j < n_j` on
/// finite factors, unconstrained on free ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<i64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Remainder of `x` modulo `n` in `{0, ..., n-1}`; `n = 0` leaves `x` alone.
pub fn residue(x: i64, n: u64) -> i64 {
    if n == 0 {
        x
    } else {
        (x as i128).rem_euclid(n as i128) as i64
    }
}

/// `gcd` on non-negative integers with `gcd(0, n) = n`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `lcm` with `lcm(0, n) = 0`.
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

impl Group {
    /// Builds a group from signed moduli, rejecting negative entries.
    pub fn new(moduli: &[i64]) -> Result<Self> {
        let mut out = Vec::with_capacity(moduli.len());
        for (index, &value) in moduli.iter().enumerate() {
            if value < 0 {
                return Err(Error::NegativeModulus { index, value });
            }
            out.push(value as u64);
        }
        Ok(Group { moduli: out })
    }

    pub fn from_moduli(moduli: Vec<u64>) -> Self {
        Group { moduli }
    }

    pub fn trivial() -> Self {
        Group { moduli: Vec::new() }
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_finite(&self) -> bool {
        self.moduli.iter().all(|&n| n != 0)
    }

    /// The order, or `None` when some factor is free.
    pub fn order(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        Some(self.moduli.iter().product())
    }

    /// Least common multiple of the finite moduli; `None` for infinite groups.
    pub fn exponent(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        Some(self.moduli.iter().fold(1, |acc, &n| lcm(acc, n)))
    }

    /// Indices of the free factors (modulus 0).
    pub fn free_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.moduli.iter().enumerate().filter(|(_, &n)| n == 0).map(|(i, _)| i)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.moduli.len() {
            return Err(Error::LengthMismatch {
                expected: self.moduli.len(),
                found: len,
            });
        }
        Ok(())
    }

    /// Canonical representative of a raw integer vector.
    pub fn reduce(&self, raw: &[i64]) -> Result<GroupElement> {
        self.check_len(raw.len())?;
        Ok(self.reduce_unchecked(raw))
    }

    pub(crate) fn reduce_unchecked(&self, raw: &[i64]) -> GroupElement {
        GroupElement {
            coords: raw.iter().zip(&self.moduli).map(|(&x, &n)| residue(x, n)).collect(),
        }
    }

    /// Whether `x` has the right length and canonical coordinates.
    pub fn contains(&self, x: &GroupElement) -> bool {
        x.coords.len() == self.moduli.len()
            && x.coords
                .iter()
                .zip(&self.moduli)
                .all(|(&c, &n)| n == 0 || (0..n as i64).contains(&c))
    }

    pub(crate) fn check_element(&self, x: &GroupElement) -> Result<()> {
        self.check_len(x.coords.len())?;
        if !self.contains(x) {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.moduli.len()],
        }
    }

    /// The `k`-th standard generator.
    pub fn generator(&self, k: usize) -> GroupElement {
        let mut coords = vec![0; self.moduli.len()];
        coords[k] = 1;
        self.reduce_unchecked(&coords)
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check_len(x.coords.len())?;
        self.check_len(y.coords.len())?;
        let mut coords = Vec::with_capacity(self.moduli.len());
        for ((&a, &b), &n) in x.coords.iter().zip(&y.coords).zip(&self.moduli) {
            let s = a.checked_add(b).ok_or(Error::Overflow)?;
            coords.push(residue(s, n));
        }
        Ok(GroupElement { coords })
    }

    pub fn neg(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check_len(x.coords.len())?;
        let mut coords = Vec::with_capacity(self.moduli.len());
        for (&a, &n) in x.coords.iter().zip(&self.moduli) {
            coords.push(residue(a.checked_neg().ok_or(Error::Overflow)?, n));
        }
        Ok(GroupElement { coords })
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.add(x, &self.neg(y)?)
    }

    /// `k·x`.
    pub fn scale(&self, k: i64, x: &GroupElement) -> Result<GroupElement> {
        self.check_len(x.coords.len())?;
        let mut coords = Vec::with_capacity(self.moduli.len());
        for (&a, &n) in x.coords.iter().zip(&self.moduli) {
            coords.push(residue(a.checked_mul(k).ok_or(Error::Overflow)?, n));
        }
        Ok(GroupElement { coords })
    }

    /// All elements in lexicographic order (last coordinate fastest).
    pub fn elements(&self) -> Result<Elements> {
        if !self.is_finite() {
            return Err(Error::InfiniteGroup);
        }
        Ok(Elements::new(self.moduli.iter().map(|&n| (0, n as i64 - 1)).collect()))
    }

    /// Elements whose finite coordinates range fully and whose free
    /// coordinates lie in `[-bound, bound]`, in lexicographic order.
    pub fn box_elements(&self, bound: i64) -> Elements {
        Elements::new(
            self.moduli
                .iter()
                .map(|&n| if n == 0 { (-bound, bound) } else { (0, n as i64 - 1) })
                .collect(),
        )
    }

    /// Position of a canonical element in the lexicographic enumeration.
    pub fn index_of(&self, x: &GroupElement) -> usize {
        let mut idx = 0usize;
        for (&c, &n) in x.coords.iter().zip(&self.moduli) {
            idx = idx * n as usize + c as usize;
        }
        idx
    }

    /// Inverse of [`Group::index_of`] for finite groups.
    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0i64; self.moduli.len()];
        for (slot, &n) in coords.iter_mut().zip(&self.moduli).rev() {
            *slot = (index % n as usize) as i64;
            index /= n as usize;
        }
        GroupElement { coords }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, n) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "]")
    }
}

/// Odometer over a product of integer ranges.
#[derive(Debug, Clone)]
pub struct Elements {
    ranges: Vec<(i64, i64)>,
    next: Option<Vec<i64>>,
}

impl Elements {
    fn new(ranges: Vec<(i64, i64)>) -> Self {
        let next = if ranges.iter().any(|(lo, hi)| lo > hi) {
            None
        } else {
            Some(ranges.iter().map(|r| r.0).collect())
        };
        Elements { ranges, next }
    }
}

impl Iterator for Elements {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut advanced = false;
        for i in (0..succ.len()).rev() {
            if succ[i] < self.ranges[i].1 {
                succ[i] += 1;
                advanced = true;
                break;
            }
            succ[i] = self.ranges[i].0;
        }
        if advanced {
            self.next = Some(succ);
        }
        Some(GroupElement { coords: current })
    }
}
