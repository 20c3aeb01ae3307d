//! Per-`m` verdicts, batch scans and the JSON report.

use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classgroup::{self, ClassGroupStructure};
use crate::coxeter::{CoxeterDiagram, Cusp, EdgeKind};
use crate::error::{Error, Result};
use crate::isometry::{self, Certificate, IntegralIsometry};
use crate::qform::{is_squarefree, make_form, Branch, Root};
use crate::spinor;
use crate::vinberg::{self, Budget, RunStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Reflective,
    QuasiReflective { rank: u8 },
    NotReflective,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Status::Reflective => f.pad("reflective"),
            Status::QuasiReflective { rank } => f.pad(&format!("quasi-reflective (rank {rank})")),
            Status::NotReflective => f.pad("not reflective"),
            Status::Unknown => f.pad("unknown"),
        }
    }
}

/// m = 3 has a stabilizer with four faces at the base point and is not run.
pub const M3_NOTE: &str =
    "m = 3: fixed verdict; the fundamental polyhedron is a known four-face simplex";

#[derive(Clone, Debug)]
pub struct Verdict {
    pub m: i64,
    pub hat_status: Status,
    pub bi_status: Status,
    /// Set when the run stopped on its budget.
    pub certificate: Option<Certificate>,
    /// The filled vertices of a reflective diagram match no known pattern.
    pub unmatched_filled: bool,
    /// `None` for m = 3.
    pub run_status: Option<RunStatus>,
    /// Diagram of the accepted roots with filled vertices marked.
    pub diagram: Option<CoxeterDiagram>,
    pub cusps: Vec<Cusp>,
    pub class_group: ClassGroupStructure,
    pub h2: u64,
    pub note: Option<&'static str>,
    pub elapsed: Duration,
}

impl Verdict {
    pub fn roots(&self) -> &[Root] {
        self.diagram.as_ref().map(|d| d.roots()).unwrap_or(&[])
    }
}

pub fn classify(m: i64, budget: &Budget) -> Result<Verdict> {
    let start = Instant::now();
    let form = make_form(m)?;
    let class_group = classgroup::group_structure(classgroup::field_discriminant(m)?)?;
    let h2 = classgroup::two_part_order(m)?;
    let mut v = Verdict {
        m,
        hat_status: Status::Reflective,
        bi_status: Status::Reflective,
        certificate: None,
        unmatched_filled: false,
        run_status: None,
        diagram: None,
        cusps: Vec::new(),
        class_group,
        h2,
        note: None,
        elapsed: Duration::ZERO,
    };
    if m == 3 {
        v.note = Some(M3_NOTE);
        v.elapsed = start.elapsed();
        return Ok(v);
    }
    let state = vinberg::run(&form, budget)?;
    let diagram = spinor::mark_filled(state.diagram(), m);
    v.run_status = Some(state.status());
    v.cusps = diagram.cusps();
    if state.status() == RunStatus::Terminated {
        let reading = spinor::bi_verdict_from_reflective_hat(&diagram, m)?;
        v.bi_status = reading.status;
        v.unmatched_filled = reading.unmatched;
    } else {
        let cert = isometry::certify(&state)?;
        let (hat, bi) = match &cert {
            Certificate::LoxodromicSymmetry { .. } | Certificate::CuspBoundViolation { .. } => {
                (Status::NotReflective, Status::NotReflective)
            }
            Certificate::ParabolicRank2 { .. } | Certificate::ParabolicRank1 { .. } => {
                let rank = if matches!(cert, Certificate::ParabolicRank2 { .. }) { 2 } else { 1 };
                let hat = Status::QuasiReflective { rank };
                (hat, if h2 == 1 { hat } else { Status::Unknown })
            }
            Certificate::None => (Status::Unknown, Status::Unknown),
        };
        v.hat_status = hat;
        v.bi_status = bi;
        v.certificate = Some(cert);
    }
    v.diagram = Some(diagram);
    v.elapsed = start.elapsed();
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct ScanOutput {
    /// Sorted by `m`.
    pub verdicts: Vec<Verdict>,
    /// Values that are not square-free.
    pub skipped: Vec<i64>,
}

/// Classifies every `m` independently on up to `jobs` threads.
pub fn scan(ms: &[i64], budget: &Budget, jobs: usize) -> Result<ScanOutput> {
    let mut list: Vec<i64> = ms.to_vec();
    list.sort_unstable();
    list.dedup();
    let (good, skipped): (Vec<i64>, Vec<i64>) = list.into_iter().partition(|&m| is_squarefree(m));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|_| Error::Precondition("could not start worker threads"))?;
    let verdicts = pool.install(|| {
        good.par_iter()
            .map(|&m| classify(m, budget))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(ScanOutput { verdicts, skipped })
}

fn s<T: ToString>(x: T) -> Value {
    Value::String(x.to_string())
}

fn ratio_json<T: Clone + num_integer::Integer + std::fmt::Display>(r: &Ratio<T>) -> Value {
    json!({ "num": s(r.numer()), "den": s(r.denom()) })
}

fn matrix_json(g: &IntegralIsometry) -> Value {
    Value::Array(
        g.mat
            .iter()
            .map(|row| Value::Array(row.iter().map(s).collect()))
            .collect(),
    )
}

fn status_json(st: &Status) -> Value {
    match st {
        Status::Reflective => json!({ "kind": "Reflective" }),
        Status::QuasiReflective { rank } => json!({ "kind": "QuasiReflective", "rank": s(rank) }),
        Status::NotReflective => json!({ "kind": "NotReflective" }),
        Status::Unknown => json!({ "kind": "Unknown" }),
    }
}

fn certificate_json(c: &Certificate) -> Value {
    let vec = |q: &crate::qform::LatticeVector| Value::Array(q.0.iter().map(s).collect());
    match c {
        Certificate::LoxodromicSymmetry { g, weight_bound } => json!({
            "kind": "LoxodromicSymmetry",
            "matrix": matrix_json(g),
            "weight_bound": ratio_json(weight_bound),
        }),
        Certificate::CuspBoundViolation { cusps, reflective_bound, max_cusp_pairs, quasi_bound } => json!({
            "kind": "CuspBoundViolation",
            "cusps": s(cusps),
            "reflective_bound": s(reflective_bound),
            "max_cusp_pairs": s(max_cusp_pairs),
            "quasi_bound": s(quasi_bound),
        }),
        Certificate::ParabolicRank2 { g1, g2, q } => json!({
            "kind": "ParabolicRank2",
            "g1": matrix_json(g1),
            "g2": matrix_json(g2),
            "fixed_point": vec(q),
        }),
        Certificate::ParabolicRank1 { g, q } => json!({
            "kind": "ParabolicRank1",
            "g": matrix_json(g),
            "fixed_point": vec(q),
        }),
        Certificate::None => json!({ "kind": "None" }),
    }
}

/// The versioned JSON report. Integers are decimal strings; vertex numbers
/// start at 1.
pub fn report(v: &Verdict) -> Value {
    let branch = if v.m % 4 == 3 { Branch::B } else { Branch::A };
    let roots: Vec<Value> = v
        .roots()
        .iter()
        .map(|r| {
            json!({
                "coords": r.vec().0.iter().map(s).collect::<Vec<_>>(),
                "norm": s(r.norm()),
                "weight_sq": ratio_json(&r.weight_sq()),
                "in_bi": r.in_bi(),
            })
        })
        .collect();
    let edges: Vec<Value> = v
        .diagram
        .as_ref()
        .map(|d| {
            d.edge_list()
                .into_iter()
                .map(|(i, j, e)| {
                    let mut o = json!({ "i": s(i + 1), "j": s(j + 1) });
                    let (kind, label) = match e {
                        EdgeKind::Angle(n) => ("angle", Some(s(n))),
                        EdgeKind::Cusp => ("cusp", None),
                        EdgeKind::Divergent(c) => ("divergent", Some(s(c))),
                        EdgeKind::RightAngle => unreachable!(),
                    };
                    o["kind"] = s(kind);
                    if let Some(l) = label {
                        o["label"] = l;
                    }
                    o
                })
                .collect()
        })
        .unwrap_or_default();
    let filled: Vec<Value> = v
        .diagram
        .as_ref()
        .map(|d| d.filled_set().into_iter().map(|i| s(i + 1)).collect())
        .unwrap_or_default();
    let cusps: Vec<Value> = v
        .cusps
        .iter()
        .map(|c| {
            json!({
                "point": c.point.0.iter().map(s).collect::<Vec<_>>(),
                "vertices": c.vertices.iter().map(|i| s(i + 1)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut out = json!({
        "schema": 1,
        "m": s(v.m),
        "branch": s(format!("{branch:?}")),
        "run_status": v.run_status.map(|r| s(format!("{r:?}"))).unwrap_or(Value::Null),
        "roots": roots,
        "diagram": { "edges": edges, "filled": filled },
        "cusps": cusps,
        "hat_status": status_json(&v.hat_status),
        "bi_status": status_json(&v.bi_status),
        "class_group": {
            "D": s(v.class_group.d),
            "h": s(v.class_group.h),
            "factors": v.class_group.invariant_factors.iter().map(s).collect::<Vec<_>>(),
            "h2": s(v.h2),
        },
        "elapsed_ms": s(v.elapsed.as_millis()),
    });
    if let Some(c) = &v.certificate {
        out["certificate"] = certificate_json(c);
    }
    if v.unmatched_filled {
        out["warning"] = s("filled vertices form no recognised pattern");
    }
    if let Some(n) = v.note {
        out["note"] = s(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_verdicts() {
        let b = Budget::default();
        let v = classify(33, &b).unwrap();
        assert_eq!(v.hat_status, Status::Reflective);
        assert_eq!(v.bi_status, Status::NotReflective);
        assert_eq!(v.roots().len(), 15);
        let v = classify(3, &b).unwrap();
        assert_eq!((v.hat_status, v.bi_status), (Status::Reflective, Status::Reflective));
        assert!(v.note.is_some());
        let v = classify(14, &b).unwrap();
        assert_eq!(v.bi_status, Status::QuasiReflective { rank: 2 });
        assert!(classify(12, &b).is_err());
    }

    #[test]
    fn report_shape() {
        let v = classify(5, &Budget::default()).unwrap();
        let r = report(&v);
        assert_eq!(r["schema"], 1);
        assert_eq!(r["m"], "5");
        assert_eq!(r["roots"][4]["coords"], json!(["-1", "1", "0", "0"]));
        assert_eq!(r["roots"][4]["weight_sq"], json!({"num": "1", "den": "2"}));
        assert_eq!(r["class_group"]["D"], "-20");
        assert_eq!(r["hat_status"]["kind"], "Reflective");
        assert_eq!(r["diagram"]["filled"], json!(["6"]));
        assert!(r.get("certificate").is_none());
    }

    #[test]
    fn scan_skips_and_sorts() {
        let out = scan(&[7, 4, 5, 5, 1], &Budget::default(), 2).unwrap();
        assert_eq!(out.skipped, vec![4]);
        assert_eq!(out.verdicts.iter().map(|v| v.m).collect::<Vec<_>>(), vec![1, 5, 7]);
    }
}
