//! Coefficient groups `M`: `Q/Z` (torsion of `C^×` via `x ↦ exp(2πi x)`),
//! `Z/n`, and `Z`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::groups::gcd;

/// An element of `Q/Z` as a reduced fraction `num/den` with `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QZValue {
    num: u64,
    den: u64,
}

impl QZValue {
    pub const ZERO: QZValue = QZValue { num: 0, den: 1 };

    /// The class of `num/den` modulo 1. Panics on `den == 0`.
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0, "Q/Z denominator must be positive");
        let r = num.rem_euclid(den as i128) as u64;
        let g = gcd(r, den);
        QZValue {
            num: r / g,
            den: den / g,
        }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    /// Order of the value in `Q/Z`.
    pub fn torsion_order(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn scale(self, k: i128) -> Self {
        let k = k.rem_euclid(self.den as i128) as u128;
        QZValue::new((k * self.num as u128 % self.den as u128) as i128, self.den)
    }

    /// Solution of `d·x = self` with the smallest non-negative numerator over
    /// the common denominator `d·den`; `None` if `d == 0` and `self != 0`.
    pub fn divide(self, d: u64) -> Option<Self> {
        if d == 0 {
            return self.is_zero().then_some(self);
        }
        Some(QZValue::new(self.num as i128, self.den.checked_mul(d)?))
    }
}

impl Add for QZValue {
    type Output = QZValue;

    fn add(self, rhs: QZValue) -> QZValue {
        let g = gcd(self.den, rhs.den);
        let den = self.den / g * rhs.den;
        let a = self.num as u128 * (rhs.den / g) as u128;
        let b = rhs.num as u128 * (self.den / g) as u128;
        QZValue::new(((a + b) % den as u128) as i128, den)
    }
}

impl Neg for QZValue {
    type Output = QZValue;

    fn neg(self) -> QZValue {
        QZValue::new(-(self.num as i128), self.den)
    }
}

impl fmt::Display for QZValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for QZValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: i128 = n.parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den: u64 = d
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(QZValue::new(num, den))
    }
}

/// Which coefficient group values live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetGroup {
    QmodZ,
    ZmodN(u64),
    Integers,
}

impl TargetGroup {
    pub fn zmod(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTarget("Z/n requires n >= 1".into()));
        }
        Ok(TargetGroup::ZmodN(n))
    }

    pub fn is_divisible(self) -> bool {
        matches!(self, TargetGroup::QmodZ)
    }

    pub fn zero(self) -> Value {
        match self {
            TargetGroup::QmodZ => Value::QZ(QZValue::ZERO),
            TargetGroup::ZmodN(n) => Value::Mod { residue: 0, modulus: n },
            TargetGroup::Integers => Value::Int(0),
        }
    }

    /// The image of an integer `k` (the class of `k·1`; zero in `Q/Z`).
    pub fn from_integer(self, k: i128) -> Value {
        match self {
            TargetGroup::QmodZ => Value::QZ(QZValue::ZERO),
            TargetGroup::ZmodN(n) => Value::Mod {
                residue: k.rem_euclid(n as i128) as u64,
                modulus: n,
            },
            TargetGroup::Integers => Value::Int(k),
        }
    }

    /// Every value `v` with `n·v = 0`, smallest first; `None` if infinite.
    pub fn torsion_grid(self, n: u64) -> Option<Vec<Value>> {
        match self {
            TargetGroup::QmodZ => {
                if n == 0 {
                    return None;
                }
                Some((0..n).map(|t| Value::QZ(QZValue::new(t as i128, n))).collect())
            }
            TargetGroup::ZmodN(m) => {
                let g = gcd(n, m);
                let step = m / g;
                Some(
                    (0..g)
                        .map(|t| Value::Mod {
                            residue: t * step,
                            modulus: m,
                        })
                        .collect(),
                )
            }
            TargetGroup::Integers => (n != 0).then(|| vec![Value::Int(0)]),
        }
    }

    /// Parses a value of this group: `"num/den"` for `Q/Z`, an integer otherwise.
    pub fn parse_value(self, s: &str) -> Result<Value> {
        match self {
            TargetGroup::QmodZ => Ok(Value::QZ(s.parse()?)),
            _ => {
                let k: i128 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad integer value {s:?}")))?;
                Ok(self.from_integer(k))
            }
        }
    }
}

impl fmt::Display for TargetGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetGroup::QmodZ => write!(f, "Q/Z"),
            TargetGroup::ZmodN(n) => write!(f, "Z/{n}"),
            TargetGroup::Integers => write!(f, "Z"),
        }
    }
}

impl FromStr for TargetGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Q/Z" | "QmodZ" => Ok(TargetGroup::QmodZ),
            "Z" => Ok(TargetGroup::Integers),
            other => {
                let n = other
                    .strip_prefix("Z/")
                    .and_then(|n| n.parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown coefficient group {other:?}")))?;
                TargetGroup::zmod(n)
            }
        }
    }
}

/// A value in one of the coefficient groups.
///
/// The operator impls panic when values from different groups meet; the
/// `checked_*` methods report [`Error::MixedTargets`] instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Value {
    QZ(QZValue),
    Mod { residue: u64, modulus: u64 },
    Int(i128),
}

impl Value {
    pub fn qz(num: i128, den: u64) -> Value {
        Value::QZ(QZValue::new(num, den))
    }

    pub fn target(self) -> TargetGroup {
        match self {
            Value::QZ(_) => TargetGroup::QmodZ,
            Value::Mod { modulus, .. } => TargetGroup::ZmodN(modulus),
            Value::Int(_) => TargetGroup::Integers,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Value::QZ(v) => v.is_zero(),
            Value::Mod { residue, .. } => residue == 0,
            Value::Int(k) => k == 0,
        }
    }

    /// Order of the value; `None` for nonzero integers.
    pub fn torsion_order(self) -> Option<u64> {
        match self {
            Value::QZ(v) => Some(v.torsion_order()),
            Value::Mod { residue, modulus } => Some(modulus / gcd(residue, modulus)),
            Value::Int(0) => Some(1),
            Value::Int(_) => None,
        }
    }

    pub fn checked_add(self, rhs: Value) -> Result<Value> {
        match (self, rhs) {
            (Value::QZ(a), Value::QZ(b)) => Ok(Value::QZ(a + b)),
            (
                Value::Mod { residue: a, modulus: m },
                Value::Mod {
                    residue: b,
                    modulus: m2,
                },
            ) if m == m2 => Ok(Value::Mod {
                residue: ((a as u128 + b as u128) % m as u128) as u64,
                modulus: m,
            }),
            (Value::Int(a), Value::Int(b)) => a.checked_add(b).map(Value::Int).ok_or(Error::Overflow),
            _ => Err(Error::MixedTargets),
        }
    }

    pub fn checked_sub(self, rhs: Value) -> Result<Value> {
        self.checked_add(-rhs)
    }

    pub fn checked_eq(self, rhs: Value) -> Result<bool> {
        if self.target() != rhs.target() {
            return Err(Error::MixedTargets);
        }
        Ok(self == rhs)
    }

    /// `k·self`.
    pub fn scale(self, k: i128) -> Value {
        match self {
            Value::QZ(v) => Value::QZ(v.scale(k)),
            Value::Mod { residue, modulus } => {
                let k = k.rem_euclid(modulus as i128) as u128;
                Value::Mod {
                    residue: (k * residue as u128 % modulus as u128) as u64,
                    modulus,
                }
            }
            Value::Int(a) => Value::Int(a.checked_mul(k).expect("integer coefficient overflow")),
        }
    }

    pub fn as_qz(self) -> Option<QZValue> {
        match self {
            Value::QZ(v) => Some(v),
            _ => None,
        }
    }
}

impl Add for Value {
    type Output = Value;

    fn add(self, rhs: Value) -> Value {
        self.checked_add(rhs).expect("incompatible coefficient values")
    }
}

impl Sub for Value {
    type Output = Value;

    fn sub(self, rhs: Value) -> Value {
        self.checked_sub(rhs).expect("incompatible coefficient values")
    }
}

impl Neg for Value {
    type Output = Value;

    fn neg(self) -> Value {
        match self {
            Value::QZ(v) => Value::QZ(-v),
            Value::Mod { residue, modulus } => Value::Mod {
                residue: (modulus - residue) % modulus,
                modulus,
            },
            Value::Int(a) => Value::Int(-a),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::QZ(v) => write!(f, "{v}"),
            Value::Mod { residue, .. } => write!(f, "{residue}"),
            Value::Int(a) => write!(f, "{a}"),
        }
    }
}

/// Sum of values in `target` (zero for an empty iterator).
pub fn sum_values(target: TargetGroup, values: impl IntoIterator<Item = Value>) -> Value {
    values.into_iter().fold(target.zero(), |acc, v| acc + v)
}
