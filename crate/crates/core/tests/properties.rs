//! Randomized and structural properties of cocycles, coboundaries and models.

mod common;

use std::collections::BTreeMap;

use abelian_cocycles::cocycles::{
    coboundary, coboundary_witness, cohomologous, quinn_cocycle, trace, verify_cocycle, Cocycle, Family, KMap,
    VerifyOptions,
};
use abelian_cocycles::quadforms::{qz, WitnessMethod, DEFAULT_BOX};
use abelian_cocycles::skeletal::{strictifiable, StrictDecision};
use abelian_cocycles::{Group, GroupElement, QuadraticForm, TargetGroup};
use common::{forms, group, table, SWEEP_GROUPS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_kmap(rng: &mut ChaCha8Rng, g: &Group, den: u64) -> KMap {
    let n = g.order().unwrap() as usize;
    let values = (0..n * n)
        .map(|i| {
            if i < n || i % n == 0 {
                qz(0, 1)
            } else {
                qz(rng.gen_range(0..den) as i128, den)
            }
        })
        .collect();
    KMap::new(g.clone(), TargetGroup::QmodZ, values).unwrap()
}

#[test]
fn quinn_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for m in SWEEP_GROUPS {
        let fs = forms(m);
        for _ in 0..100 {
            let a = &fs[rng.gen_range(0..fs.len())];
            let b = &fs[rng.gen_range(0..fs.len())];
            let sum = quinn_cocycle(&a.add(b).unwrap());
            let pointwise = quinn_cocycle(a).add(&quinn_cocycle(b)).unwrap();
            assert_eq!(table(&sum), table(&pointwise), "{m:?}");
        }
    }
}

#[test]
fn coboundaries_verify_and_have_zero_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for m in [&[2u64, 2][..], &[3]] {
        let g = group(m);
        let zero = QuadraticForm::zero(g.clone(), TargetGroup::QmodZ);
        let fs = forms(m);
        for _ in 0..50 {
            let k = random_kmap(&mut rng, &g, 12);
            let d = coboundary(&k);
            assert!(verify_cocycle(&d, VerifyOptions::default()).unwrap().passed());
            assert_eq!(trace(&d).unwrap(), zero);
            let w = quinn_cocycle(&fs[rng.gen_range(0..fs.len())]);
            let shifted = w.add(&d).unwrap();
            assert!(cohomologous(&w, &shifted).unwrap());
            assert!(verify_cocycle(&shifted, VerifyOptions::default()).unwrap().passed());
        }
    }
}

#[test]
fn coboundary_witness_recovers_a_cochain() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = group(&[2, 2]);
    for _ in 0..10 {
        let k = random_kmap(&mut rng, &g, 4);
        let q = &forms(&[2, 2])[rng.gen_range(0..32)];
        let w = quinn_cocycle(q);
        let shifted = w.add(&coboundary(&k)).unwrap();
        let found = coboundary_witness(&shifted, &w, 4)
            .unwrap()
            .expect("a witness with denominator 4 exists");
        assert_eq!(table(&w.add(&coboundary(&found)).unwrap()), table(&shifted));
    }
    let q1 = QuadraticForm::from_exponents(g.clone(), &[1, 0], &BTreeMap::new()).unwrap();
    let q0 = QuadraticForm::zero(g, TargetGroup::QmodZ);
    assert!(coboundary_witness(&quinn_cocycle(&q1), &quinn_cocycle(&q0), 8)
        .unwrap()
        .is_none());
}

fn box_triples(g: &Group, bound: i64) -> Vec<GroupElement> {
    g.box_elements(bound).collect()
}

#[test]
fn free_factors_never_carry_associator() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let g = Group::from_moduli(vec![0]);
        let d = qz(rng.gen_range(0..60), 60);
        let q = QuadraticForm::from_params(g.clone(), TargetGroup::QmodZ, vec![d], BTreeMap::new()).unwrap();
        let w = quinn_cocycle(&q);
        let pts = box_triples(&g, DEFAULT_BOX);
        for x in &pts {
            for y in &pts {
                for z in &pts {
                    assert!(w.h(x, y, z).unwrap().is_zero());
                }
            }
        }
        assert!(verify_cocycle(&w, VerifyOptions::default()).unwrap().passed());
        assert_eq!(trace(&w).unwrap(), q);
    }
    for _ in 0..20 {
        let g = Group::from_moduli(vec![0, 2]);
        let d0 = qz(rng.gen_range(0..60), 60);
        let d1 = qz(rng.gen_range(0..4), 4);
        let b = qz(rng.gen_range(0..2), 2);
        let off = BTreeMap::from([((0, 1), b)]);
        let q = QuadraticForm::from_params(g.clone(), TargetGroup::QmodZ, vec![d0, d1], off).unwrap();
        let w = quinn_cocycle(&q);
        let pts = box_triples(&g, DEFAULT_BOX);
        for x in &pts {
            for y in &pts {
                for z in &pts {
                    let finite_only = q.diag(1).scale((x.coords()[1] * 2) as i128);
                    let expected = if y.coords()[1] + z.coords()[1] >= 2 {
                        finite_only
                    } else {
                        qz(0, 1)
                    };
                    assert_eq!(w.h(x, y, z).unwrap(), expected);
                }
            }
        }
        assert!(verify_cocycle(&w, VerifyOptions::default()).unwrap().passed());
    }
}

/// The five `h` triples read by the pentagon instance `(u,x,y,z)`.
fn pentagon_triples(g: &Group, t: &[GroupElement]) -> [[GroupElement; 3]; 5] {
    let (u, x, y, z) = (&t[0], &t[1], &t[2], &t[3]);
    let s = |a: &GroupElement, b: &GroupElement| g.add(a, b).unwrap();
    [
        [x.clone(), y.clone(), z.clone()],
        [u.clone(), s(x, y), z.clone()],
        [u.clone(), x.clone(), y.clone()],
        [u.clone(), x.clone(), s(y, z)],
        [s(u, x), y.clone(), z.clone()],
    ]
}

#[test]
fn single_perturbation_is_detected() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for m in [&[2u64, 2][..], &[3], &[4], &[2, 4]] {
        let fs = forms(m);
        for _ in 0..10 {
            let q = &fs[rng.gen_range(0..fs.len())];
            let mut t = table(&quinn_cocycle(q));
            let g = t.group().clone();
            let n = g.order().unwrap() as usize;
            let [x, y, z] = [0; 3].map(|_| g.element_at(rng.gen_range(1..n)));
            let old = quinn_cocycle(q).h(&x, &y, &z).unwrap();
            t.set_h(&x, &y, &z, old + qz(1, 12)).unwrap();
            let r = verify_cocycle(&Cocycle::from_table(t), VerifyOptions::default()).unwrap();
            assert!(!r.passed());
            let perturbed = [x, y, z];
            assert!(
                r.failures
                    .iter()
                    .filter(|f| f.family == Family::Pentagon)
                    .any(|f| pentagon_triples(&g, &f.tuple).contains(&perturbed)),
                "perturbed triple missing from the pentagon failures on {m:?}"
            );
        }
    }
}

#[test]
fn strictifiability_on_small_groups() {
    let g = group(&[2]);
    for (v, yes) in [((0, 1), true), ((1, 2), true), ((1, 4), false), ((3, 4), false)] {
        let q = QuadraticForm::from_params(g.clone(), TargetGroup::QmodZ, vec![qz(v.0, v.1)], BTreeMap::new()).unwrap();
        assert_eq!(strictifiable(&q).unwrap().is_yes(), yes, "q(1) = {}/{}", v.0, v.1);
    }
    for m in [&[2u64, 2][..], &[2, 4]] {
        for q in forms(m).into_iter().filter(|q| q.polarization_is_zero()) {
            match strictifiable(&q).unwrap() {
                StrictDecision::Yes { cocycle, method, .. } => {
                    assert_eq!(method, WitnessMethod::Symmetric);
                    let t = table(&cocycle);
                    assert!(t.h_values().iter().all(|v| v.is_zero()));
                    assert!(verify_cocycle(&cocycle, VerifyOptions::default()).unwrap().passed());
                    assert_eq!(trace(&cocycle).unwrap(), q);
                }
                StrictDecision::No { .. } => panic!("zero-polarization form must be strictifiable"),
            }
        }
    }
}
