//! JSON and CSV encodings of groups, values, forms, presentations, cocycle
//! tables and reports.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value as Json};

use crate::cocycles::{quinn_associator_vanishes, CocycleTable, Domain, VerifyReport};
use crate::error::{Error, Result};
use crate::groups::{Group, GroupElement};
use crate::presentations::{CheckResult, Presentation, PresentationReport, Relations};
use crate::quadforms::{BilinearForm, QuadraticForm};
use crate::skeletal::{NormalFormReport, StrictDecision};
use crate::target::{TargetGroup, Value};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(obj: &'a Json, key: &str) -> Result<&'a Json> {
    obj.get(key).ok_or_else(|| perr(format!("missing field {key:?}")))
}

pub fn group_to_json(g: &Group) -> Json {
    json!({ "moduli": g.moduli() })
}

pub fn group_from_json(j: &Json) -> Result<Group> {
    let arr = field(j, "moduli")?
        .as_array()
        .ok_or_else(|| perr("moduli must be an array"))?;
    let moduli = arr
        .iter()
        .map(|m| m.as_i64().ok_or_else(|| perr("moduli must be integers")))
        .collect::<Result<Vec<_>>>()?;
    Group::new(&moduli)
}

pub fn element_to_json(x: &GroupElement) -> Json {
    json!(x.coords())
}

/// Values are strings: `"num/den"` in `Q/Z`, the integer otherwise.
pub fn value_to_json(v: &Value) -> Json {
    Json::String(v.to_string())
}

pub fn value_from_json(target: TargetGroup, j: &Json) -> Result<Value> {
    match j {
        Json::String(s) => target.parse_value(s),
        Json::Number(n) if target != TargetGroup::QmodZ => target.parse_value(&n.to_string()),
        _ => Err(perr(format!("expected a value of {target}, found {j}"))),
    }
}

fn target_from_json(j: &Json) -> Result<TargetGroup> {
    match j.get("target") {
        None => Ok(TargetGroup::QmodZ),
        Some(Json::String(s)) => s.parse(),
        Some(other) => Err(perr(format!("target must be a string, found {other}"))),
    }
}

fn values_from_json(target: TargetGroup, j: &Json, what: &str) -> Result<Vec<Value>> {
    j.as_array()
        .ok_or_else(|| perr(format!("{what} must be an array")))?
        .iter()
        .map(|v| value_from_json(target, v))
        .collect()
}

fn matrix_from_json(target: TargetGroup, j: &Json, what: &str) -> Result<Vec<Vec<Value>>> {
    j.as_array()
        .ok_or_else(|| perr(format!("{what} must be an array of rows")))?
        .iter()
        .map(|row| values_from_json(target, row, what))
        .collect()
}

fn int_matrix_from_json(j: &Json, what: &str) -> Result<Vec<Vec<i64>>> {
    j.as_array()
        .ok_or_else(|| perr(format!("{what} must be an array of rows")))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| perr(format!("{what} rows must be arrays")))?
                .iter()
                .map(|x| {
                    x.as_i64()
                        .ok_or_else(|| perr(format!("{what} entries must be integers")))
                })
                .collect()
        })
        .collect()
}

fn matrix_to_json(m: &[Vec<Value>]) -> Json {
    Json::Array(
        m.iter()
            .map(|row| Json::Array(row.iter().map(value_to_json).collect()))
            .collect(),
    )
}

pub fn form_to_json(q: &QuadraticForm) -> Json {
    let mut off = Map::new();
    for (&(k, l), v) in q.offdiag_values() {
        off.insert(format!("{k},{l}"), value_to_json(v));
    }
    json!({
        "group": group_to_json(q.group()),
        "target": q.target().to_string(),
        "diag": q.diag_values().iter().map(value_to_json).collect::<Vec<_>>(),
        "offdiag": off,
    })
}

/// Parses `"k,l"` into an index pair.
pub fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| perr(format!("expected \"k,l\", found {s:?}")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| perr(format!("bad index in {s:?}")))
    };
    Ok((parse(a)?, parse(b)?))
}

pub fn form_from_json(j: &Json) -> Result<QuadraticForm> {
    let group = group_from_json(field(j, "group")?)?;
    let target = target_from_json(j)?;
    let diag = values_from_json(target, field(j, "diag")?, "diag")?;
    let mut off = BTreeMap::new();
    if let Some(o) = j.get("offdiag") {
        let o = o.as_object().ok_or_else(|| perr("offdiag must be an object"))?;
        for (key, v) in o {
            off.insert(parse_pair(key)?, value_from_json(target, v)?);
        }
    }
    QuadraticForm::from_params(group, target, diag, off)
}

pub fn bilinear_to_json(s: &BilinearForm) -> Json {
    matrix_to_json(s.entries())
}

pub fn presentation_to_json(p: &Presentation, q: Option<&QuadraticForm>) -> Json {
    let mut obj = Map::new();
    obj.insert("group".into(), group_to_json(p.group()));
    obj.insert("target".into(), Json::String(p.target().to_string()));
    match p.relations() {
        Relations::Diagonal(m) => {
            obj.insert("relation_moduli".into(), json!(m));
        }
        Relations::Matrix(rows) => {
            obj.insert("projection".into(), json!(p.projection()));
            obj.insert("relation_matrix".into(), json!(rows));
        }
    }
    obj.insert("C".into(), matrix_to_json(p.matrix()));
    if let Some(q) = q {
        obj.insert("form".into(), form_to_json(q));
    }
    Json::Object(obj)
}

/// Reads a presentation and, when present, its `"form"`.
pub fn presentation_from_json(j: &Json) -> Result<(Presentation, Option<QuadraticForm>)> {
    let group = group_from_json(field(j, "group")?)?;
    let target = target_from_json(j)?;
    let c = matrix_from_json(target, field(j, "C")?, "C")?;
    let p = if let Some(proj) = j.get("projection") {
        let projection = int_matrix_from_json(proj, "projection")?;
        let relations = j
            .get("relation_matrix")
            .map(|r| int_matrix_from_json(r, "relation_matrix"))
            .transpose()?;
        Presentation::with_projection(group, target, projection, relations, c)?
    } else {
        if let Some(rm) = j.get("relation_moduli") {
            let rm: Vec<u64> = rm
                .as_array()
                .ok_or_else(|| perr("relation_moduli must be an array"))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .ok_or_else(|| perr("relation_moduli must be non-negative integers"))
                })
                .collect::<Result<_>>()?;
            if rm != group.moduli() {
                return Err(Error::InvalidPresentation(
                    "relation_moduli must equal the group moduli for a diagonal presentation".into(),
                ));
            }
        }
        Presentation::diagonal(group, target, c)?
    };
    let q = j.get("form").map(form_from_json).transpose()?;
    Ok((p, q))
}

pub fn table_to_json(t: &CocycleTable) -> Json {
    json!({
        "group": group_to_json(t.group()),
        "target": t.target().to_string(),
        "order": "lex",
        "h": t.h_values().iter().map(value_to_json).collect::<Vec<_>>(),
        "c": t.c_values().iter().map(value_to_json).collect::<Vec<_>>(),
    })
}

pub fn table_from_json(j: &Json) -> Result<CocycleTable> {
    let group = group_from_json(field(j, "group")?)?;
    let target = target_from_json(j)?;
    if let Some(order) = j.get("order") {
        if order != "lex" {
            return Err(perr(format!("unsupported table order {order}")));
        }
    }
    let h = values_from_json(target, field(j, "h")?, "h")?;
    let c = values_from_json(target, field(j, "c")?, "c")?;
    CocycleTable::new(group, target, h, c)
}

/// The closed-form description of the Quinn cocycle, used when `G` has
/// free factors and no table exists.
pub fn closed_form_record(q: &QuadraticForm) -> Json {
    let r = q.group().rank();
    let sigma: Vec<Vec<Value>> = (0..r).map(|i| (0..r).map(|j| q.sigma(i, j)).collect()).collect();
    json!({
        "group": group_to_json(q.group()),
        "target": q.target().to_string(),
        "form": form_to_json(q),
        "sigma": matrix_to_json(&sigma),
        "associator_identically_zero": quinn_associator_vanishes(q),
    })
}

fn element_csv(x: &GroupElement) -> String {
    x.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
}

/// Two CSV sections separated by a blank line: `x,y,z,value` rows for `h`,
/// then `x,y,value` rows for `c`. Elements are written as `a;b;…`.
pub fn table_to_csv(t: &CocycleTable) -> Result<String> {
    let elems: Vec<GroupElement> = t.group().elements()?.collect();
    let n = elems.len();
    let h_rows = t.h_values().iter().enumerate().map(|(i, v)| {
        let (a, b, c) = (&elems[i / (n * n)], &elems[(i / n) % n], &elems[i % n]);
        vec![element_csv(a), element_csv(b), element_csv(c), v.to_string()]
    });
    let c_rows = t
        .c_values()
        .iter()
        .enumerate()
        .map(|(i, v)| vec![element_csv(&elems[i / n]), element_csv(&elems[i % n]), v.to_string()]);
    let h = csv_section(&["x", "y", "z", "value"], h_rows)?;
    let c = csv_section(&["x", "y", "value"], c_rows)?;
    Ok(format!("{h}\n{c}"))
}

fn csv_section(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let csv_err = |e: csv::Error| perr(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| perr(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| perr(e.to_string()))
}

fn domain_to_json(d: Domain) -> Json {
    match d {
        Domain::Exhaustive => json!("exhaustive"),
        Domain::Box(b) => json!({ "box": b }),
    }
}

pub fn verify_report_to_json(r: &VerifyReport) -> Json {
    json!({
        "passed": r.passed(),
        "domain": domain_to_json(r.domain),
        "families": r.families.iter().map(|f| json!({
            "family": f.family.name(),
            "checked": f.checked,
            "failed": f.failed,
        })).collect::<Vec<_>>(),
        "failures": r.failures.iter().map(|f| json!({
            "family": f.family.name(),
            "tuple": f.tuple.iter().map(element_to_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "truncated": r.truncated,
    })
}

pub fn normal_form_report_to_json(r: &NormalFormReport) -> Json {
    json!({
        "passed": r.passed(),
        "verdict": r.verdict.name(),
        "domain": domain_to_json(r.domain),
        "identities": r.counts.iter().map(|(id, checked, failed)| json!({
            "identity": id.name(),
            "checked": checked,
            "failed": failed,
        })).collect::<Vec<_>>(),
        "failures": r.failures.iter().map(|(id, xyz)| json!({
            "identity": id.name(),
            "tuple": xyz.iter().map(element_to_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn check_to_json(c: &CheckResult) -> Json {
    json!({ "passed": c.passed(), "checked": c.checked, "failures": c.failures })
}

pub fn presentation_report_to_json(r: &PresentationReport) -> Json {
    json!({
        "pre_admissible": r.pre_admissible,
        "admissible": r.admissible,
        "optimal": r.optimal,
        "admissibility_witness": r.admissibility_witness.as_ref().map(|(f, g, v)| json!({
            "f": f, "g": g, "value": value_to_json(v),
        })),
        "polarization": check_to_json(&r.polarization),
        "kernel_isotropy": check_to_json(&r.kernel_isotropy),
        "optimality": check_to_json(&r.optimality),
        "lift_section": check_to_json(&r.lift_section),
        "l_zero": check_to_json(&r.l_zero),
        "l_symmetric": check_to_json(&r.l_symmetric),
        "l_cocycle": check_to_json(&r.l_cocycle),
        "l_in_kernel": check_to_json(&r.l_in_kernel),
        "l_isotropic": r.l_isotropic.as_ref().map(check_to_json),
        "domain": match r.box_bound {
            None => json!("exhaustive"),
            Some(b) => json!({ "box": b }),
        },
    })
}

pub fn decision_to_json(q: &QuadraticForm, d: &StrictDecision) -> Json {
    match d {
        StrictDecision::Yes { witness, method, .. } => json!({
            "form": form_to_json(q),
            "strictifiable": true,
            "method": match method {
                crate::quadforms::WitnessMethod::Symmetric => "symmetric",
                crate::quadforms::WitnessMethod::GridSearch => "grid-search",
            },
            "witness": bilinear_to_json(witness),
        }),
        StrictDecision::No { certificate } => json!({
            "form": form_to_json(q),
            "strictifiable": false,
            "certificate": {
                "grid_size": certificate.grid_size.to_string(),
                "nodes_visited": certificate.nodes_visited.to_string(),
            },
        }),
    }
}
