use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;

use abelian_cocycles::cocycles::{
    cocycle_from_presentation, exp_cocycle, quinn_cocycle, trace, verify_cocycle, VerifyOptions, VerifyReport,
};
use abelian_cocycles::json;
use abelian_cocycles::presentations::{
    make_admissible, optimize, standard_presentation, validate_presentation, CheckResult, PresentationReport,
};
use abelian_cocycles::quadforms::{count_forms, enumerate_forms};
use abelian_cocycles::skeletal::{normal_form_report, strictifiable_with_limit, SkeletalModel, StrictDecision};
use abelian_cocycles::{Error, QuadraticForm, Value};
use anyhow::{bail, Context, Result};
use serde_json::{json, Value as Json};

use crate::input::{parse_form, parse_group, read_cocycle_input, read_json};
use crate::{Command, Method, Outcome, ReportArgs, ReportFormat, TableFormat};

pub fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Classify {
            group,
            split_torsion,
            format,
        } => classify(&group, split_torsion, format),
        Command::Cocycle {
            form,
            method,
            format,
            output,
        } => {
            let q = parse_form(&form)?;
            let text = emit_cocycle(&q, method, format)?;
            match output {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => write_stdout(&text)?,
            }
            Ok(Outcome::Pass)
        }
        Command::Verify {
            input,
            box_bound,
            threads,
            max_failures,
            out,
        } => {
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
            }
            let src = read_cocycle_input(&input)?;
            let w = src.cocycle()?;
            let report = verify_cocycle(
                &w,
                VerifyOptions {
                    box_bound,
                    max_failures,
                },
            )?;
            let mut text = format!("input: {} on {} with values in {}\n", src.kind(), w.group(), w.target());
            text.push_str(&verify_text(&report));
            emit(&out, text, json::verify_report_to_json(&report))?;
            Ok(outcome(report.passed()))
        }
        Command::Trace { input, out } => {
            let w = read_cocycle_input(&input)?.cocycle()?;
            match trace(&w) {
                Ok(q) => {
                    let zero = q == QuadraticForm::zero(q.group().clone(), q.target());
                    let text = format!(
                        "trace: {}\n",
                        if zero { "zero form".to_string() } else { form_text(&q) }
                    );
                    emit(&out, text, json!({ "form": json::form_to_json(&q), "zero": zero }))?;
                    Ok(Outcome::Pass)
                }
                Err(Error::TraceNotQuadratic(msg)) => {
                    emit(
                        &out,
                        format!("trace is not a quadratic form: {msg}\n"),
                        json!({ "error": msg }),
                    )?;
                    Ok(Outcome::Fail)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::NormalForm { input, box_bound, out } => {
            let w = read_cocycle_input(&input)?.cocycle()?;
            let report = normal_form_report(&SkeletalModel::new(w), box_bound);
            let mut text = String::new();
            for (id, checked, failed) in &report.counts {
                writeln!(text, "{id}: {checked} checked, {failed} failed")?;
            }
            for (id, [x, y, z]) in report.failures.iter().take(TEXT_FAILURES) {
                writeln!(text, "  {id} fails at ({x}, {y}, {z})")?;
            }
            writeln!(text, "verdict: {}", report.verdict.name())?;
            emit(&out, text, json::normal_form_report_to_json(&report))?;
            Ok(outcome(report.passed()))
        }
        Command::Strictify { form, limit, out } => strictify(&parse_form(&form)?, limit, &out),
        Command::Optimize {
            presentation,
            make_admissible: make_adm,
            validate_only,
            box_bound,
            out,
        } => {
            let (mut p, q) = json::presentation_from_json(&read_json(&presentation)?)?;
            if make_adm {
                p = make_admissible(&p)?;
            }
            let Some(q) = q else {
                if !validate_only && !make_adm {
                    bail!("optimizing needs the quadratic form in the \"form\" field");
                }
                let admissible = p.is_admissible();
                let text = format!("admissible: {admissible}\n");
                emit(
                    &out,
                    text,
                    json!({ "presentation": json::presentation_to_json(&p, None), "admissible": admissible }),
                )?;
                return Ok(outcome(admissible));
            };
            if !validate_only {
                p = optimize(&p, &q)?;
            }
            let report = validate_presentation(&p, &q, box_bound)?;
            let pass = report.admissible && report.optimal && report.lift_properties_hold();
            let text = presentation_text(&report);
            let j = json!({
                "presentation": json::presentation_to_json(&p, Some(&q)),
                "report": json::presentation_report_to_json(&report),
            });
            emit(&out, text, j)?;
            Ok(outcome(pass))
        }
    }
}

const TEXT_FAILURES: usize = 20;

fn outcome(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn emit(out: &ReportArgs, text: String, report: Json) -> Result<()> {
    let pretty = serde_json::to_string_pretty(&report)?;
    if let Some(path) = &out.report {
        std::fs::write(path, format!("{pretty}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    match out.format {
        ReportFormat::Text => write_stdout(&text),
        ReportFormat::Json => write_stdout(&format!("{pretty}\n")),
    }
}

/// Writes to standard output, treating a closed pipe as success.
fn write_stdout(s: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(s.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn form_text(q: &QuadraticForm) -> String {
    let diag: Vec<String> = q.diag_values().iter().map(Value::to_string).collect();
    let mut s = format!("q(e_k) = [{}]", diag.join(", "));
    for ((k, l), v) in q.offdiag_values() {
        write!(s, ", b(e_{k},e_{l}) = {v}").unwrap();
    }
    s
}

fn classify(group: &str, split: bool, format: ReportFormat) -> Result<Outcome> {
    let g = parse_group(group)?;
    if !g.is_finite() {
        return Err(Error::InfiniteGroup.into());
    }
    let total = count_forms(&g)?;
    let mut text = format!("group {g}\nquadratic forms: {total}\n");
    let mut report = json!({ "group": json::group_to_json(&g), "forms": u64::try_from(total).map(Json::from).unwrap_or_else(|_| json!(total.to_string())) });
    if split {
        let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
        for q in enumerate_forms(&g)? {
            let t = quinn_cocycle(&q).materialize()?;
            let max = t
                .h_values()
                .iter()
                .chain(t.c_values())
                .filter_map(|v| v.torsion_order())
                .max()
                .unwrap_or(1);
            *histogram.entry(max).or_default() += 1;
        }
        let low: u64 = histogram.range(..=2).map(|(_, n)| n).sum();
        let high: u64 = histogram.range(3..).map(|(_, n)| n).sum();
        for (d, n) in &histogram {
            writeln!(text, "max denominator {d}: {n}")?;
        }
        writeln!(text, "split: {low} (denominators <= 2) + {high} (denominators > 2)")?;
        report["max_denominator_histogram"] =
            Json::Object(histogram.iter().map(|(d, n)| (d.to_string(), json!(n))).collect());
        report["split"] = json!({ "at_most_2": low, "above_2": high });
    }
    match format {
        ReportFormat::Text => write_stdout(&text)?,
        ReportFormat::Json => write_stdout(&format!("{}\n", serde_json::to_string_pretty(&report)?))?,
    }
    Ok(Outcome::Pass)
}

fn emit_cocycle(q: &QuadraticForm, method: Method, format: TableFormat) -> Result<String> {
    if !q.group().is_finite() {
        if method == Method::Exp {
            return Err(Error::InfiniteGroup.into());
        }
        if format == TableFormat::Csv {
            bail!("groups with free factors have no finite table; use --format json for the closed-form record");
        }
        let record = json::closed_form_record(q);
        return Ok(format!("{}\n", serde_json::to_string_pretty(&record)?));
    }
    let w = match method {
        Method::Quinn => quinn_cocycle(q),
        Method::Exp => exp_cocycle(q)?,
        Method::Presentation => cocycle_from_presentation(&standard_presentation(q), q)?,
    };
    let table = w.materialize()?;
    Ok(match format {
        TableFormat::Json => format!("{}\n", serde_json::to_string_pretty(&json::table_to_json(&table))?),
        TableFormat::Csv => json::table_to_csv(&table)?,
    })
}

fn verify_text(r: &VerifyReport) -> String {
    let mut s = String::new();
    let domain = match r.domain {
        abelian_cocycles::cocycles::Domain::Exhaustive => "exhaustive".to_string(),
        abelian_cocycles::cocycles::Domain::Box(b) => format!("box of half-width {b}"),
    };
    writeln!(s, "domain: {domain}").unwrap();
    for f in &r.families {
        writeln!(s, "{}: {} checked, {} failed", f.family.name(), f.checked, f.failed).unwrap();
    }
    for f in r.failures.iter().take(TEXT_FAILURES) {
        let t: Vec<String> = f.tuple.iter().map(|x| x.to_string()).collect();
        writeln!(s, "  {} fails at ({})", f.family.name(), t.join(", ")).unwrap();
    }
    let listed = r.failures.len().min(TEXT_FAILURES) as u64;
    if r.total_failures() > listed {
        writeln!(s, "  ... {} more failing tuples", r.total_failures() - listed).unwrap();
    }
    writeln!(s, "result: {}", if r.passed() { "PASS" } else { "FAIL" }).unwrap();
    s
}

fn check_line(s: &mut String, name: &str, c: &CheckResult) {
    let status = if c.passed() { "ok" } else { "FAILED" };
    writeln!(s, "{name}: {status} ({} checked)", c.checked).unwrap();
    for f in c.failures.iter().take(TEXT_FAILURES) {
        writeln!(s, "  {f}").unwrap();
    }
}

fn presentation_text(r: &PresentationReport) -> String {
    let mut s = String::new();
    check_line(&mut s, "polarization", &r.polarization);
    check_line(&mut s, "kernel isotropy", &r.kernel_isotropy);
    writeln!(s, "pre-admissible: {}", r.pre_admissible).unwrap();
    writeln!(s, "admissible: {}", r.admissible).unwrap();
    if let Some((f, g, v)) = &r.admissibility_witness {
        writeln!(s, "  C({f:?}, {g:?}) = {v} on the relations").unwrap();
    }
    check_line(&mut s, "optimality", &r.optimality);
    writeln!(s, "optimal: {}", r.optimal).unwrap();
    check_line(&mut s, "lift section", &r.lift_section);
    check_line(&mut s, "L(0,x) = L(x,0) = 0", &r.l_zero);
    check_line(&mut s, "L symmetric", &r.l_symmetric);
    check_line(&mut s, "L cocycle", &r.l_cocycle);
    check_line(&mut s, "L in kernel", &r.l_in_kernel);
    if let Some(c) = &r.l_isotropic {
        check_line(&mut s, "C(L,L) = 0", c);
    }
    s
}

fn strictify(q: &QuadraticForm, limit: u128, out: &ReportArgs) -> Result<Outcome> {
    let decision = strictifiable_with_limit(q, limit)?;
    let mut report = json::decision_to_json(q, &decision);
    let (text, pass) = match &decision {
        StrictDecision::Yes { cocycle, .. } => {
            let v = verify_cocycle(cocycle, VerifyOptions::default())?;
            let g = cocycle.group();
            let elems: Vec<_> = g.elements()?.collect();
            let mut h_zero = true;
            'outer: for x in &elems {
                for y in &elems {
                    for z in &elems {
                        if !cocycle.h(x, y, z)?.is_zero() {
                            h_zero = false;
                            break 'outer;
                        }
                    }
                }
            }
            let trace_ok = trace(cocycle).map(|t| &t == q).unwrap_or(false);
            report["cocycle"] = json!({
                "verified": v.passed(),
                "associator_identically_zero": h_zero,
                "trace_matches": trace_ok,
            });
            let text = format!(
                "strictifiable: yes\nemitted cocycle: verified {}, h identically zero {}, trace matches {}\n",
                v.passed(),
                h_zero,
                trace_ok
            );
            (text, v.passed() && h_zero && trace_ok)
        }
        StrictDecision::No { certificate } => (
            format!(
                "strictifiable: no\nexhausted {} candidate grid entries ({} search nodes)\n",
                certificate.grid_size, certificate.nodes_visited
            ),
            true,
        ),
    };
    emit(out, text, report)?;
    Ok(outcome(pass))
}
