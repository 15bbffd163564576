use std::collections::BTreeMap;
use std::path::Path;

use abelian_cocycles::cocycles::{cocycle_from_presentation, quinn_cocycle, Cocycle, CocycleTable};
use abelian_cocycles::json;
use abelian_cocycles::presentations::Presentation;
use abelian_cocycles::{Group, QuadraticForm, TargetGroup};
use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value as Json;

use crate::FormArgs;

pub fn parse_group(spec: &str) -> Result<Group> {
    let moduli = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .with_context(|| format!("bad modulus {t:?} in group {spec:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Group::new(&moduli)?)
}

fn split_assignment(s: &str) -> Result<((usize, usize), &str)> {
    let (pair, value) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("expected k,l=v, found {s:?}"))?;
    Ok((json::parse_pair(pair)?, value.trim()))
}

pub fn parse_form(args: &FormArgs) -> Result<QuadraticForm> {
    let group = parse_group(&args.group)?;
    let target: TargetGroup = args.target.parse()?;
    if let Some(diag) = &args.diag {
        let diag = diag
            .split(',')
            .map(|t| target.parse_value(t.trim()))
            .collect::<abelian_cocycles::Result<Vec<_>>>()?;
        let mut off = BTreeMap::new();
        for a in &args.offdiag {
            let (kl, v) = split_assignment(a)?;
            off.insert(kl, target.parse_value(v)?);
        }
        return Ok(QuadraticForm::from_params(group, target, diag, off)?);
    }
    if !args.offdiag.is_empty() {
        bail!("--offdiag requires --diag");
    }
    if args.p.is_none() && args.q.is_empty() {
        return Ok(QuadraticForm::zero(group, target));
    }
    if target != TargetGroup::QmodZ {
        bail!("exponent parameters --p/--q describe Q/Z-valued forms; use --diag/--offdiag for {target}");
    }
    let p = match &args.p {
        Some(p) => p
            .split(',')
            .map(|t| t.trim().parse::<u64>().with_context(|| format!("bad exponent {t:?}")))
            .collect::<Result<Vec<_>>>()?,
        None => vec![0; group.rank()],
    };
    let mut q = BTreeMap::new();
    for a in &args.q {
        let (kl, v) = split_assignment(a)?;
        q.insert(kl, v.parse::<u64>().with_context(|| format!("bad exponent {v:?}"))?);
    }
    Ok(QuadraticForm::from_exponents(group, &p, &q)?)
}

/// Any input a cocycle can be built from.
pub enum CocycleInput {
    Table(CocycleTable),
    Form(QuadraticForm),
    Presentation(Presentation, QuadraticForm),
}

impl CocycleInput {
    pub fn kind(&self) -> &'static str {
        match self {
            CocycleInput::Table(_) => "table",
            CocycleInput::Form(_) => "quinn cocycle of form",
            CocycleInput::Presentation(..) => "presentation cocycle",
        }
    }

    pub fn cocycle(&self) -> Result<Cocycle> {
        Ok(match self {
            CocycleInput::Table(t) => Cocycle::from_table(t.clone()),
            CocycleInput::Form(q) => quinn_cocycle(q),
            CocycleInput::Presentation(p, q) => cocycle_from_presentation(p, q)?,
        })
    }
}

pub fn read_json(path: &Path) -> Result<Json> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Accepts a cocycle table, a closed-form record, a form, or a presentation
/// carrying its form.
pub fn read_cocycle_input(path: &Path) -> Result<CocycleInput> {
    let j = read_json(path)?;
    if j.get("h").is_some() && j.get("c").is_some() {
        return Ok(CocycleInput::Table(json::table_from_json(&j)?));
    }
    if j.get("C").is_some() {
        let (p, q) = json::presentation_from_json(&j)?;
        let q = q.ok_or_else(|| anyhow!("presentation input needs a \"form\" field"))?;
        return Ok(CocycleInput::Presentation(p, q));
    }
    if let Some(form) = j.get("form") {
        return Ok(CocycleInput::Form(json::form_from_json(form)?));
    }
    if j.get("diag").is_some() {
        return Ok(CocycleInput::Form(json::form_from_json(&j)?));
    }
    bail!(
        "{}: not a cocycle table, closed-form record, form or presentation",
        path.display()
    )
}
