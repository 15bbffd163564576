//! Acceptance suite: one pass/fail line per criterion, exit status 1 if any
//! criterion fails.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use abelian_cocycles::cocycles::{
    coboundary, cocycle_from_presentation, cohomologous, exp_cocycle, kapustin_saulina_associator,
    quinn_associator_term, quinn_cocycle, trace, verify_cocycle, Cocycle, Family, KMap, VerifyOptions,
};
use abelian_cocycles::presentations::{
    make_admissible, optimize, standard_presentation, validate_presentation, Presentation,
};
use abelian_cocycles::quadforms::{count_forms, enumerate_forms, qz, WitnessMethod};
use abelian_cocycles::skeletal::{normal_form_report, strictifiable, NormalFormVerdict, SkeletalModel, StrictDecision};
use abelian_cocycles::{Group, GroupElement, QuadraticForm, TargetGroup, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value as Json;

const SWEEP_GROUPS: &[&[u64]] = &[
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
/// Largest group order included in the exhaustive sweeps.
const SWEEP_MAX_ORDER: u64 = 16;
const AC1_LIMIT: Duration = Duration::from_secs(1);
const AC2_LIMIT: Duration = Duration::from_secs(1);
const AC3_LIMIT: Duration = Duration::from_secs(120);
const AC10_LIMIT: Duration = Duration::from_secs(10);
const AC6_PAIRS: usize = 100;
const AC9_KMAPS: usize = 50;
/// Denominators of random cochain values in AC-09.
const AC9_MAX_DEN: u64 = 12;
const AC11_TRIALS: usize = 25;
const AC12_TRIALS: usize = 40;
/// Half-width of the coordinate box for free factors.
const BOX: i64 = 3;
const SEED: u64 = 0x5eed_ab3c;

type Outcome = Result<String, String>;
/// `(id, name, check, time limit)`.
type Criterion = (&'static str, &'static str, fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group(m: &[u64]) -> Group {
    Group::from_moduli(m.to_vec())
}

fn sweep_groups() -> impl Iterator<Item = Group> {
    SWEEP_GROUPS
        .iter()
        .map(|m| group(m))
        .filter(|g| g.order().unwrap() <= SWEEP_MAX_ORDER)
}

fn forms(g: &Group) -> Vec<QuadraticForm> {
    enumerate_forms(g).unwrap().collect()
}

fn table(w: &Cocycle) -> abelian_cocycles::cocycles::CocycleTable {
    w.materialize().unwrap()
}

fn ac01() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_abcocycle"))
        .args(["classify", "--group", "2,2", "--split-torsion", "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("exit status {}", out.status))?;
    let j: Json = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let (total, low, high) = (&j["forms"], &j["split"]["at_most_2"], &j["split"]["above_2"]);
    ensure(total == 32 && low == 8 && high == 24, || {
        format!("forms {total}, split {low}/{high}")
    })?;
    Ok("32 forms, split 8/24".into())
}

fn ac02() -> Outcome {
    let mut sizes = Vec::new();
    for m in SWEEP_GROUPS {
        let g = group(m);
        let n = count_forms(&g).map_err(|e| e.to_string())?;
        let len = enumerate_forms(&g).map_err(|e| e.to_string())?.count() as u128;
        ensure(n == len, || format!("{g}: count {n}, enumerated {len}"))?;
        sizes.push(format!("{g}:{n}"));
    }
    Ok(sizes.join(" "))
}

fn ac03() -> Outcome {
    let mut cocycles = 0usize;
    for g in sweep_groups() {
        let n = g.order().unwrap();
        let fs = forms(&g);
        fs.par_iter().try_for_each(|q| {
            for (name, w) in [
                ("quinn", quinn_cocycle(q)),
                ("exp", exp_cocycle(q).map_err(|e| e.to_string())?),
            ] {
                let r = verify_cocycle(&w, VerifyOptions::default()).map_err(|e| e.to_string())?;
                let checked = |f| r.stats(f).map_or(0, |s| s.checked);
                ensure(r.passed(), || format!("{name} on {g} fails for {:?}", q.parameters()))?;
                ensure(checked(Family::Pentagon) == n.pow(4), || format!("{g}: pentagon count"))?;
                ensure(checked(Family::Hexagon) == n.pow(3), || format!("{g}: hexagon count"))?;
                ensure(checked(Family::InverseHexagon) == n.pow(3), || {
                    format!("{g}: inverse hexagon count")
                })?;
            }
            Ok::<_, String>(())
        })?;
        cocycles += 2 * fs.len();
    }
    Ok(format!("{cocycles} cocycles verified exhaustively"))
}

fn ac04() -> Outcome {
    let mut n = 0;
    for g in sweep_groups() {
        for q in forms(&g) {
            let t = trace(&quinn_cocycle(&q)).map_err(|e| e.to_string())?;
            ensure(t == q, || format!("{g}: trace differs for {:?}", q.parameters()))?;
            n += 1;
        }
    }
    Ok(format!("{n} forms"))
}

fn ac05() -> Outcome {
    let mut n = 0;
    for g in sweep_groups() {
        let elems: Vec<GroupElement> = g.elements().unwrap().collect();
        let fs = forms(&g);
        fs.par_iter().try_for_each(|q| {
            let quinn = table(&quinn_cocycle(q));
            let exp = table(&exp_cocycle(q).map_err(|e| e.to_string())?);
            let pres = table(&cocycle_from_presentation(&standard_presentation(q), q).map_err(|e| e.to_string())?);
            ensure(quinn == exp, || format!("{g}: quinn and exp differ"))?;
            ensure(quinn == pres, || format!("{g}: quinn and presentation differ"))?;
            let w = quinn_cocycle(q);
            for x in &elems {
                for y in &elems {
                    for z in &elems {
                        let ks = kapustin_saulina_associator(q, x.coords(), y.coords(), z.coords());
                        ensure(w.h(x, y, z).unwrap() == ks, || {
                            format!("{g}: floor formula differs at ({x},{y},{z})")
                        })?;
                    }
                }
            }
            Ok::<_, String>(())
        })?;
        n += fs.len();
    }
    Ok(format!("{n} forms, three constructions and the floor formula"))
}

fn ac06() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut groups = 0;
    for g in sweep_groups() {
        let fs = forms(&g);
        for _ in 0..AC6_PAIRS {
            let (a, b) = (&fs[rng.gen_range(0..fs.len())], &fs[rng.gen_range(0..fs.len())]);
            let sum = table(&quinn_cocycle(&a.add(b).map_err(|e| e.to_string())?));
            let pointwise = table(&quinn_cocycle(a).add(&quinn_cocycle(b)).map_err(|e| e.to_string())?);
            ensure(sum == pointwise, || format!("{g}: not additive"))?;
        }
        groups += 1;
    }
    Ok(format!("{AC6_PAIRS} pairs on each of {groups} groups"))
}

fn ac07() -> Outcome {
    let mut n = 0;
    for g in sweep_groups() {
        for q in forms(&g) {
            let r = normal_form_report(&SkeletalModel::new(quinn_cocycle(&q)), BOX);
            ensure(r.verdict == NormalFormVerdict::Pass, || format!("{g}: {:?}", r.counts))?;
            ensure(
                r.counts.len() == 3 && r.counts.iter().all(|&(_, c, f)| c > 0 && f == 0),
                || format!("{g}: {:?}", r.counts),
            )?;
            n += 1;
        }
    }
    Ok(format!("left, right and swap identities on {n} cocycles"))
}

/// `Z³ → Z` summing coordinates, `C = v·(2 above / 1 on / 0 below the diagonal)`.
fn sum_presentation(v: Value, target: TargetGroup) -> Result<(Presentation, QuadraticForm), String> {
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
    let p = Presentation::with_projection(group(&[0]), target, vec![vec![1]; 3], None, c).map_err(|e| e.to_string())?;
    let q = QuadraticForm::from_params(group(&[0]), target, vec![v], BTreeMap::new()).map_err(|e| e.to_string())?;
    Ok((p, q))
}

fn ac08() -> Outcome {
    let z2 = TargetGroup::zmod(2).unwrap();
    let q = QuadraticForm::from_params(group(&[2]), z2, vec![z2.from_integer(1)], BTreeMap::new())
        .map_err(|e| e.to_string())?;
    let p = Presentation::diagonal(group(&[2]), z2, vec![vec![z2.zero()]]).map_err(|e| e.to_string())?;
    let opt = optimize(&p, &q).map_err(|e| e.to_string())?;
    ensure(opt.matrix() == [vec![z2.from_integer(1)]], || {
        format!("optimized C = {:?}", opt.matrix())
    })?;
    let rep = validate_presentation(&opt, &q, BOX).map_err(|e| e.to_string())?;
    ensure(rep.admissible && rep.optimal, || {
        "optimized presentation not admissible and optimal".into()
    })?;

    let (p, q) = sum_presentation(Value::Int(1), TargetGroup::Integers)?;
    let rep = validate_presentation(&p, &q, BOX).map_err(|e| e.to_string())?;
    ensure(rep.pre_admissible && !rep.admissible, || {
        "Z³ → Z: expected pre-admissible, not admissible".into()
    })?;
    let witness = rep.admissibility_witness.clone().map(|w| w.2);
    ensure(witness == Some(Value::Int(1)), || format!("witness value {witness:?}"))?;

    for den in [2u64, 3, 5, 7] {
        let (p, q) = sum_presentation(qz(1, den), TargetGroup::QmodZ)?;
        let fixed = make_admissible(&p).map_err(|e| e.to_string())?;
        ensure(fixed.is_admissible(), || {
            format!("v = 1/{den}: not admissible after repair")
        })?;
        for u in group(&[0, 0, 0]).box_elements(BOX) {
            let (a, b) = (fixed.pairing(u.coords(), u.coords()), p.pairing(u.coords(), u.coords()));
            ensure(a == b, || format!("v = 1/{den}: C(x,x) changed at {u}: {b} → {a}"))?;
        }
        let rep = validate_presentation(&fixed, &q, BOX).map_err(|e| e.to_string())?;
        ensure(rep.admissible && rep.pre_admissible, || {
            format!("v = 1/{den}: report {rep:?}")
        })?;
    }
    Ok("C=0 → xy; Z³→Z witness 1; repaired over Q/Z for v ∈ {1/2,1/3,1/5,1/7}".into())
}

fn random_kmap(rng: &mut ChaCha8Rng, g: &Group) -> KMap {
    let n = g.order().unwrap() as usize;
    let values = (0..n * n)
        .map(|i| {
            if i < n || i % n == 0 {
                qz(0, 1)
            } else {
                let d = rng.gen_range(1..=AC9_MAX_DEN);
                qz(rng.gen_range(0..d) as i128, d)
            }
        })
        .collect();
    KMap::new(g.clone(), TargetGroup::QmodZ, values).unwrap()
}

fn ac09() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    for m in [&[2u64, 2][..], &[3]] {
        let g = group(m);
        let zero = QuadraticForm::zero(g.clone(), TargetGroup::QmodZ);
        let fs = forms(&g);
        for _ in 0..AC9_KMAPS {
            let d = coboundary(&random_kmap(&mut rng, &g));
            let r = verify_cocycle(&d, VerifyOptions::default()).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("{g}: coboundary fails {:?}", r.families))?;
            ensure(trace(&d).map_err(|e| e.to_string())? == zero, || {
                format!("{g}: nonzero trace")
            })?;
            let w = quinn_cocycle(&fs[rng.gen_range(0..fs.len())]);
            let shifted = w.add(&d).map_err(|e| e.to_string())?;
            ensure(cohomologous(&w, &shifted).map_err(|e| e.to_string())?, || {
                format!("{g}: not cohomologous")
            })?;
        }
    }
    Ok(format!("{AC9_KMAPS} cochains on each of [2,2] and [3]"))
}

fn ac10() -> Outcome {
    let g = group(&[2]);
    for (num, den, yes) in [(0, 1, true), (1, 2, true), (1, 4, false), (3, 4, false)] {
        let q = QuadraticForm::from_params(g.clone(), TargetGroup::QmodZ, vec![qz(num, den)], BTreeMap::new())
            .map_err(|e| e.to_string())?;
        let d = strictifiable(&q).map_err(|e| e.to_string())?;
        ensure(d.is_yes() == yes, || format!("q(1) = {num}/{den}: expected {yes}"))?;
        if let StrictDecision::Yes { cocycle, .. } = d {
            check_strict(&cocycle, &q)?;
        }
    }
    let mut n = 0;
    for m in [&[2u64, 2][..], &[2, 4]] {
        for q in forms(&group(m)).into_iter().filter(|q| q.polarization_is_zero()) {
            match strictifiable(&q).map_err(|e| e.to_string())? {
                StrictDecision::Yes { cocycle, method, .. } => {
                    ensure(method == WitnessMethod::Symmetric, || format!("{m:?}: not symmetric"))?;
                    check_strict(&cocycle, &q)?;
                }
                StrictDecision::No { .. } => return Err(format!("{m:?}: zero-polarization form rejected")),
            }
            n += 1;
        }
    }
    Ok(format!(
        "[2] decided; {n} zero-polarization forms on [2,2] and [2,4] strict"
    ))
}

fn check_strict(w: &Cocycle, q: &QuadraticForm) -> Result<(), String> {
    let t = table(w);
    ensure(t.h_values().iter().all(|v| v.is_zero()), || {
        "strict cocycle has nonzero h".into()
    })?;
    ensure(verify_cocycle(w, VerifyOptions::default()).unwrap().passed(), || {
        "strict cocycle fails".into()
    })?;
    ensure(&trace(w).map_err(|e| e.to_string())? == q, || {
        "strict cocycle has wrong trace".into()
    })
}

fn ac11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 11);
    let mut triples = 0usize;
    for _ in 0..AC11_TRIALS {
        let num = rng.gen_range(0..1000);
        let g = group(&[0]);
        let q = QuadraticForm::from_params(g.clone(), TargetGroup::QmodZ, vec![qz(num, 997)], BTreeMap::new())
            .map_err(|e| e.to_string())?;
        let w = quinn_cocycle(&q);
        let pts: Vec<GroupElement> = g.box_elements(BOX).collect();
        for x in &pts {
            for y in &pts {
                for z in &pts {
                    ensure(w.h(x, y, z).unwrap().is_zero(), || format!("[0]: h({x},{y},{z}) ≠ 0"))?;
                    triples += 1;
                }
            }
        }

        let g = group(&[0, 2]);
        let off = BTreeMap::from([((0, 1), qz(rng.gen_range(0..2), 2))]);
        let diag = vec![qz(rng.gen_range(0..1000), 997), qz(rng.gen_range(0..4), 4)];
        let q = QuadraticForm::from_params(g.clone(), TargetGroup::QmodZ, diag, off).map_err(|e| e.to_string())?;
        let w = quinn_cocycle(&q);
        // The box covers every residue of the finite coordinate.
        let pts: Vec<GroupElement> = g.box_elements(BOX).collect();
        for x in &pts {
            for y in &pts {
                for z in &pts {
                    let (xs, ys, zs) = (x.coords(), y.coords(), z.coords());
                    let free = quinn_associator_term(&q, 0, xs, ys, zs);
                    ensure(free.is_zero(), || format!("[0,2]: free term at ({x},{y},{z})"))?;
                    let finite = quinn_associator_term(&q, 1, xs, ys, zs);
                    ensure(w.h(x, y, z).unwrap() == finite, || {
                        format!("[0,2]: h({x},{y},{z}) has free part")
                    })?;
                    triples += 1;
                }
            }
        }
    }
    Ok(format!("{triples} box triples"))
}

/// Whether a failing instance reads `h` at `t`.
fn involves(g: &Group, family: Family, tuple: &[GroupElement], t: &[GroupElement; 3]) -> bool {
    let s = |a: &GroupElement, b: &GroupElement| g.add(a, b).unwrap();
    let reads: Vec<[GroupElement; 3]> = match family {
        Family::Pentagon => {
            let (u, x, y, z) = (&tuple[0], &tuple[1], &tuple[2], &tuple[3]);
            vec![
                [x.clone(), y.clone(), z.clone()],
                [u.clone(), s(x, y), z.clone()],
                [u.clone(), x.clone(), y.clone()],
                [u.clone(), x.clone(), s(y, z)],
                [s(u, x), y.clone(), z.clone()],
            ]
        }
        Family::Hexagon => {
            let (x, y, z) = (&tuple[0], &tuple[1], &tuple[2]);
            vec![
                [y.clone(), z.clone(), x.clone()],
                [x.clone(), y.clone(), z.clone()],
                [y.clone(), x.clone(), z.clone()],
            ]
        }
        Family::InverseHexagon => {
            let (x, y, z) = (&tuple[0], &tuple[1], &tuple[2]);
            vec![
                [z.clone(), x.clone(), y.clone()],
                [x.clone(), y.clone(), z.clone()],
                [x.clone(), z.clone(), y.clone()],
            ]
        }
        Family::Normalization => {
            if tuple.len() == 3 {
                vec![[tuple[0].clone(), tuple[1].clone(), tuple[2].clone()]]
            } else {
                vec![]
            }
        }
    };
    reads.contains(t)
}

fn ac12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 12);
    let candidates: Vec<Group> = sweep_groups().collect();
    for _ in 0..AC12_TRIALS {
        let g = &candidates[rng.gen_range(0..candidates.len())];
        let fs = forms(g);
        let q = &fs[rng.gen_range(0..fs.len())];
        let w = quinn_cocycle(q);
        let n = g.order().unwrap() as usize;
        let t = [0; 3].map(|_| g.element_at(rng.gen_range(0..n)));
        let den = 2 * g.exponent().unwrap() + 1;
        let old = w.h(&t[0], &t[1], &t[2]).unwrap();
        let mut tab = table(&w);
        tab.set_h(&t[0], &t[1], &t[2], old + qz(1, den))
            .map_err(|e| e.to_string())?;
        let r = verify_cocycle(&Cocycle::from_table(tab), VerifyOptions::default()).map_err(|e| e.to_string())?;
        ensure(!r.passed(), || format!("{g}: perturbation at {t:?} undetected"))?;
        ensure(!r.truncated, || "failure list truncated".into())?;
        ensure(r.failures.iter().any(|f| involves(g, f.family, &f.tuple, &t)), || {
            format!("{g}: no listed failure reads h at ({},{},{})", t[0], t[1], t[2])
        })?;
    }
    Ok(format!("{AC12_TRIALS} single-entry perturbations detected and located"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("AC-01", "classification counts", ac01, Some(AC1_LIMIT)),
        ("AC-02", "count formula matches enumeration", ac02, Some(AC2_LIMIT)),
        (
            "AC-03",
            "quinn and exp cocycles verify exhaustively",
            ac03,
            Some(AC3_LIMIT),
        ),
        ("AC-04", "trace recovers the form", ac04, None),
        ("AC-05", "constructions agree pointwise", ac05, None),
        ("AC-06", "quinn construction is linear", ac06, None),
        ("AC-07", "normal-form identities", ac07, None),
        ("AC-08", "optimizer fidelity", ac08, None),
        ("AC-09", "coboundaries", ac09, None),
        ("AC-10", "strictifiability", ac10, Some(AC10_LIMIT)),
        ("AC-11", "free factors carry no associator", ac11, None),
        ("AC-12", "fault detection", ac12, None),
    ];
    let mut failed = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&result, limit) {
            if elapsed > limit {
                result = Err(format!("took {:.2?}, limit {limit:?}", elapsed));
            }
        }
        match result {
            Ok(detail) => println!("[PASS] {id} {name}: {detail} ({elapsed:.2?})"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {why} ({elapsed:.2?})");
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
