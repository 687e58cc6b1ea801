use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::Value;
use zfree_core::colstruct::is_uniform;
use zfree_core::fixper::FixSetII;
use zfree_core::oracle::validate_certificate;
use zfree_core::words::dist;
use zfree_core::{
    classify_auto_point, classify_type_ii, decide_periodic_abelian, fix_basis_abelian,
    fix_ext_patterns, per_ext_patterns, product_dist, Classification, CompletionWord, EndoKind,
    Endomorphism, PatternReport, Point, UcReport,
};

use crate::descriptor::{parse_point, Descriptor};
use crate::error::CliError;
use crate::report::Record;

/// Knobs for the sampling and orbit probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probe {
    pub budget: usize,
    pub horizon: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for Probe {
    fn default() -> Self {
        Probe { budget: 512, horizon: 64, samples: 200, seed: 0 }
    }
}

fn strings<T: ToString>(xs: impl IntoIterator<Item = T>) -> Value {
    Value::Array(xs.into_iter().map(|x| Value::String(x.to_string())).collect())
}

fn integer(x: &BigInt) -> Value {
    x.to_i64().map_or_else(|| Value::String(x.to_string()), Value::from)
}

pub fn echo(e: &Endomorphism) -> Record {
    let d = Descriptor::of(e);
    let mut r = Record::new("endomorphism")
        .field("type", d.kind.clone())
        .field("m", d.m)
        .field("n", d.n)
        .field("Q", d.q.clone().unwrap_or_default())
        .field("P", d.p.clone().unwrap_or_default());
    match e.kind() {
        EndoKind::TypeI(t) => r = r.show("phi", &t.phi),
        EndoKind::TypeII(t) => {
            r = r.show("z", &t.z).field("ell", t.ell.clone()).field("h", t.h.clone());
        }
    }
    r
}

pub fn uc_records(report: &UcReport) -> Vec<Record> {
    let mut out = vec![Record::new("uc")
        .field("uc", report.is_uc)
        .field("failures", strings(&report.failures))];
    if let Some(w) = &report.witness {
        out.push(
            Record::new("witness")
                .show("x", &w.x)
                .show("y", &w.y)
                .show("delta", &w.delta)
                .show("distance", &w.distance)
                .show("image_distance", &w.image_distance),
        );
    }
    out
}

fn pattern_record(kind: &'static str, p: &PatternReport) -> Record {
    Record::new(kind)
        .field("count", p.enumerated)
        .show("formula", &p.formula)
        .field("mismatch", p.mismatch)
        .field("patterns", strings(&p.patterns))
}

pub fn analyze(e: &Endomorphism, points: &[Point], probe: Probe) -> Result<Vec<Record>, CliError> {
    let mut out = vec![echo(e)];
    let uc = e.check_uc();
    out.extend(uc_records(&uc));
    match e.col_structure() {
        Some(col) => {
            let basis = fix_basis_abelian(col);
            let rows: Vec<Value> = basis.basis.iter().map(|v| v.iter().map(integer).collect()).collect();
            out.push(Record::new("fix-basis").field("rank", rows.len()).field("basis", rows));
            out.push(pattern_record("fix-patterns", &fix_ext_patterns(col)));
            out.push(pattern_record("per-patterns", &per_ext_patterns(col)));
        }
        None => out.push(
            Record::new("diagnostic").field("message", "Q fails the column condition; no extension to the completion"),
        ),
    }
    if uc.is_uc && e.is_type_ii() {
        let reps = FixSetII::new(e)?.representatives()?;
        out.push(Record::new("fix-set").field("count", reps.len()).field("representatives", strings(&reps)));
    }
    for p in points {
        match classify(e, p, probe) {
            Ok(r) => out.push(r),
            Err(err) => out.push(Record::new("diagnostic").show("point", p).field("message", err.to_string())),
        }
    }
    Ok(out)
}

fn check_point(e: &Endomorphism, p: &Point) -> Result<(), CliError> {
    if p.abelian.dim() != e.m() {
        return Err(CliError::Domain(format!("point {p} has dimension {}, expected {}", p.abelian.dim(), e.m())));
    }
    let rank = match &p.free {
        CompletionWord::Finite(w) => w.max_generator(),
        CompletionWord::Infinite(b) => b.head().max_generator().max(b.period().max_generator()),
    };
    if rank > e.n() {
        return Err(CliError::Domain(format!("point {p} uses generator {rank} of a rank {} group", e.n())));
    }
    Ok(())
}

fn require_uc(e: &Endomorphism) -> Result<(), CliError> {
    let failures = e.failures();
    if failures.is_empty() {
        return Ok(());
    }
    let why: Vec<String> = failures.iter().map(ToString::to_string).collect();
    Err(CliError::Domain(format!("endomorphism is not uniformly continuous: {}", why.join("; "))))
}

pub fn classify(e: &Endomorphism, p: &Point, probe: Probe) -> Result<Record, CliError> {
    check_point(e, p)?;
    require_uc(e)?;
    let r = Record::new("point").show("point", p);
    if e.is_type_ii() {
        return Ok(match classify_type_ii(e, p)? {
            Classification::Periodic(period) => r.tag("class", "periodic").field("period", period),
            Classification::Wandering(None) => r.tag("class", "wandering"),
            Classification::Wandering(Some(c)) => {
                let mut r = r
                    .tag("class", "wandering")
                    .show("radius", c.radius())
                    .field("N", c.steps)
                    .show("case", c.case);
                if probe.samples > 0 {
                    let chk = validate_certificate(e, p, &c, probe.horizon, probe.samples, probe.seed)?;
                    r = r
                        .field("sampled", chk.points)
                        .field("returns", chk.returns.len())
                        .field("validated", chk.passed());
                }
                r
            }
        });
    }
    let EndoKind::TypeI(t) = e.kind() else { unreachable!() };
    if !t.phi.is_automorphism() || is_uniform(&t.q).is_err() {
        return Err(CliError::Domain(
            "classification covers type II maps and type I automorphisms with uniform Q; this map is neither".into(),
        ));
    }
    let omega = classify_auto_point(e, p, probe.budget)?;
    Ok(r.tag("class", "omega")
        .field("converged", omega.converged)
        .field("period", omega.orbit.len())
        .field("q", omega.q_used)
        .field("strides", omega.steps)
        .field("orbit", strings(&omega.orbit)))
}

pub fn iterate(e: &Endomorphism, p: &Point, steps: u64) -> Result<Vec<Record>, CliError> {
    check_point(e, p)?;
    require_uc(e)?;
    let mut out = Vec::new();
    let mut cur = p.clone();
    for r in 0..=steps {
        if r > 0 {
            cur = e.apply_completion(&cur)?;
        }
        let mut rec = Record::new("step").field("step", r).show("point", &cur);
        if e.is_type_ii() {
            let closed = if r == 0 { p.clone() } else { e.iterate_closed_form(p, r)? };
            rec = rec.field("closed_form", if closed == cur { "match" } else { "mismatch" });
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn orbits(e: &Endomorphism) -> Result<Vec<Record>, CliError> {
    let col = e
        .col_structure()
        .ok_or_else(|| CliError::Domain("Q fails the column condition; no extension to the completion".into()))?;
    let mut out = Vec::new();
    for (kind, rep) in [("fix-orbit", fix_ext_patterns(col)), ("per-orbit", per_ext_patterns(col))] {
        for (pat, a) in rep.patterns.iter().zip(&rep.representatives) {
            let period = decide_periodic_abelian(col, a)?;
            out.push(
                Record::new(kind)
                    .show("pattern", pat)
                    .show("representative", a)
                    .field("period", period),
            );
        }
        out.push(pattern_record(if kind == "fix-orbit" { "fix-patterns" } else { "per-patterns" }, &rep));
    }
    Ok(out)
}

pub fn check_uc(e: &Endomorphism) -> Vec<Record> {
    let mut out = vec![echo(e)];
    out.extend(uc_records(&e.check_uc()));
    out
}

pub fn metric(x: &str, y: &str) -> Result<Record, CliError> {
    let d = if x.trim_start().starts_with('[') || y.trim_start().starts_with('[') {
        product_dist(&parse_point(x)?, &parse_point(y)?)?
    } else {
        let word = |s: &str| s.parse::<CompletionWord>().map_err(|e| CliError::Parse(format!("bad word {s:?}: {e}")));
        dist(&word(x)?, &word(y)?)
    };
    Ok(Record::new("metric").field("x", x).field("y", y).show("distance", d))
}
