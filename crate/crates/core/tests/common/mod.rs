#![allow(dead_code)]

use abelian_cocycles::cocycles::{Cocycle, CocycleTable};
use abelian_cocycles::quadforms::enumerate_forms;
use abelian_cocycles::{Group, QuadraticForm};

pub const SWEEP_GROUPS: &[&[u64]] = &[
    &[2],
    &[3],
    &[4],
    &[2, 2],
    &[2, 4],
    &[3, 3],
    &[2, 2, 2],
    &[6],
    &[4, 4],
    &[2, 6],
];

pub fn group(m: &[u64]) -> Group {
    Group::from_moduli(m.to_vec())
}

pub fn forms(m: &[u64]) -> Vec<QuadraticForm> {
    enumerate_forms(&group(m)).unwrap().collect()
}

pub fn table(w: &Cocycle) -> CocycleTable {
    w.materialize().unwrap()
}
