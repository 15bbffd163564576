//! Skeletal braided categorical groups: one object per element of `G`,
//! automorphisms `M`, associator `h` and braiding `c`.

use std::fmt;

use crate::cocycles::{cocycle_from_presentation, Cocycle, Domain};
use crate::error::{Error, Result};
use crate::groups::GroupElement;
use crate::presentations::from_bilinear;
use crate::quadforms::{search_bilinear_witness, BilinearForm, QuadraticForm, WitnessMethod, DEFAULT_SEARCH_LIMIT};
use crate::target::{TargetGroup, Value};

#[derive(Debug, Clone)]
pub struct SkeletalModel {
    cocycle: Cocycle,
}

impl SkeletalModel {
    pub fn new(cocycle: Cocycle) -> Self {
        SkeletalModel { cocycle }
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    /// `a_{X,Y,Z}: (X⊗Y)⊗Z → X⊗(Y⊗Z)`, the automorphism `h(X,Y,Z)`.
    pub fn associator(&self, x: &GroupElement, y: &GroupElement, z: &GroupElement) -> Result<Value> {
        self.cocycle.h(x, y, z)
    }

    /// `s_{X,Y}: X⊗Y → Y⊗X`, the automorphism `c(X,Y)`.
    pub fn braiding(&self, x: &GroupElement, y: &GroupElement) -> Result<Value> {
        self.cocycle.c(x, y)
    }
}

/// The identities checked by [`normal_form_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NormalFormIdentity {
    /// `a_{X,Y,Z} = s_{X,Y} + s_{X,Z} − s_{X,Y⊗Z}`.
    Left,
    /// `a_{Z,X,Y} = s_{X⊗Y,Z} − s_{X,Z} − s_{Y,Z}`.
    Right,
    /// `a_{X,Y,Z} = a_{X,Z,Y}`.
    Swap,
}

impl NormalFormIdentity {
    pub fn name(self) -> &'static str {
        match self {
            NormalFormIdentity::Left => "left",
            NormalFormIdentity::Right => "right",
            NormalFormIdentity::Swap => "swap",
        }
    }
}

impl fmt::Display for NormalFormIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalFormVerdict {
    Pass,
    Fail,
    /// Identities fail over a non-divisible target, where a normal form
    /// need not exist.
    NoGuarantee,
}

impl NormalFormVerdict {
    pub fn name(self) -> &'static str {
        match self {
            NormalFormVerdict::Pass => "pass",
            NormalFormVerdict::Fail => "fail",
            NormalFormVerdict::NoGuarantee => "not applicable: target not divisible",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormReport {
    pub verdict: NormalFormVerdict,
    pub domain: Domain,
    /// `(identity, checked, failed)` per identity.
    pub counts: Vec<(NormalFormIdentity, u64, u64)>,
    pub failures: Vec<(NormalFormIdentity, [GroupElement; 3])>,
}

impl NormalFormReport {
    pub fn passed(&self) -> bool {
        self.verdict == NormalFormVerdict::Pass
    }
}

/// Checks both normal-form identities and the swap corollary for every
/// triple (exhaustive on finite groups, on the box of half-width `bound`
/// otherwise).
pub fn normal_form_report(m: &SkeletalModel, bound: i64) -> NormalFormReport {
    let w = &m.cocycle;
    let g = w.group();
    let (points, domain): (Vec<GroupElement>, Domain) = match g.elements() {
        Ok(it) => (it.collect(), Domain::Exhaustive),
        Err(_) => (g.box_elements(bound).collect(), Domain::Box(bound)),
    };
    let h = |a: &GroupElement, b: &GroupElement, c: &GroupElement| w.h_coords(a.coords(), b.coords(), c.coords());
    let s = |a: &GroupElement, b: &GroupElement| w.c_coords(a.coords(), b.coords());
    let add = |a: &GroupElement, b: &GroupElement| g.add(a, b).expect("element arithmetic");
    let mut counts = [
        (NormalFormIdentity::Left, 0u64, 0u64),
        (NormalFormIdentity::Right, 0, 0),
        (NormalFormIdentity::Swap, 0, 0),
    ];
    let mut failures = Vec::new();
    for x in &points {
        for y in &points {
            let xy = add(x, y);
            for z in &points {
                let checks = [
                    h(x, y, z) == s(x, y) + s(x, z) - s(x, &add(y, z)),
                    h(z, x, y) == s(&xy, z) - s(x, z) - s(y, z),
                    h(x, y, z) == h(x, z, y),
                ];
                for (slot, ok) in checks.into_iter().enumerate() {
                    counts[slot].1 += 1;
                    if !ok {
                        counts[slot].2 += 1;
                        failures.push((counts[slot].0, [x.clone(), y.clone(), z.clone()]));
                    }
                }
            }
        }
    }
    failures.sort_by_key(|(id, _)| *id);
    let verdict = if failures.is_empty() {
        NormalFormVerdict::Pass
    } else if w.target().is_divisible() {
        NormalFormVerdict::Fail
    } else {
        NormalFormVerdict::NoGuarantee
    };
    NormalFormReport {
        verdict,
        domain,
        counts: counts.to_vec(),
        failures,
    }
}

/// Record of an exhausted witness search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCertificate {
    pub grid_size: u128,
    pub nodes_visited: u128,
}

/// Whether `q` admits a skeletal model with trivial associator.
#[derive(Debug, Clone)]
pub enum StrictDecision {
    /// `q(x) = S(x,x)`; `cocycle` is `(0, S)`.
    Yes {
        witness: BilinearForm,
        method: WitnessMethod,
        cocycle: Cocycle,
    },
    No {
        certificate: SearchCertificate,
    },
}

impl StrictDecision {
    pub fn is_yes(&self) -> bool {
        matches!(self, StrictDecision::Yes { .. })
    }
}

pub fn strictifiable(q: &QuadraticForm) -> Result<StrictDecision> {
    strictifiable_with_limit(q, DEFAULT_SEARCH_LIMIT)
}

/// [`strictifiable`] with an explicit node ceiling for the witness search.
pub fn strictifiable_with_limit(q: &QuadraticForm, limit: u128) -> Result<StrictDecision> {
    if !q.group().is_finite() {
        return Err(Error::InfiniteGroup);
    }
    if q.target() != TargetGroup::QmodZ {
        return Err(Error::TargetNotQmodZ);
    }
    let search = search_bilinear_witness(q, limit)?;
    Ok(match search.witness {
        Some(s) => {
            let cocycle = cocycle_from_presentation(&from_bilinear(&s, q)?, q)?;
            StrictDecision::Yes {
                witness: s,
                method: search.method,
                cocycle,
            }
        }
        None => StrictDecision::No {
            certificate: SearchCertificate {
                grid_size: search.grid_size,
                nodes_visited: search.nodes_visited,
            },
        },
    })
}
