//! JSON rendering of verdicts, expansions, and traces. Exact scalars are
//! serialized as rational strings so exact-mode reports are byte-reproducible;
//! float scalars become JSON numbers.

use serde_json::{json, Value};

use orbit_core::averages::{AvgBlockExpansion, HAnalysis, HRule};
use orbit_core::iterates::{BlockExpansion, EmpiricalClass};
use orbit_core::jordan::{BlockVector, Segment};
use orbit_core::scalar::rational_string;
use orbit_core::{BlockKind, Scalar, Verdict, VerdictKind};

pub fn scalar_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact { re, im } => json!({
            "re": rational_string(re),
            "im": rational_string(im),
        }),
        Scalar::Float(z) => json!({ "re": z.re, "im": z.im }),
    }
}

pub fn segment_json(seg: &[Scalar]) -> Value {
    Value::Array(seg.iter().map(scalar_json).collect())
}

pub fn block_vector_json(v: &BlockVector) -> Value {
    Value::Array(v.segments.iter().map(|s| segment_json(s)).collect())
}

pub fn segments_json(segs: &[Segment]) -> Value {
    Value::Array(segs.iter().map(|s| segment_json(s)).collect())
}

pub fn verdict_json(v: &Verdict) -> Value {
    let mut out = json!({
        "kind": v.kind.name(),
        "numerically_uncertain": v.numerically_uncertain,
        "blocks": v.blocks.iter().map(|b| {
            let (kind, limit, away) = match &b.kind {
                BlockKind::Diverges => ("Diverges", Value::Null, Value::Null),
                BlockKind::ConvergesTo(seg) => ("ConvergesTo", segment_json(seg), Value::Null),
                BlockKind::Bounded { away_from_zero } => (
                    "Bounded",
                    Value::Null,
                    away_from_zero.map_or(Value::Null, Value::from),
                ),
            };
            json!({
                "case": b.case.as_str(),
                "kind": kind,
                "limit": limit,
                "away_from_zero": away,
                "witness": b.witness,
                "empirical": b.empirical,
            })
        }).collect::<Vec<_>>(),
    });
    let obj = out.as_object_mut().expect("object");
    match &v.kind {
        VerdictKind::ConvergesToConstant(limit) => {
            obj.insert("limit".to_string(), block_vector_json(limit));
        }
        VerdictKind::BoundedAwayFromZero { f_empirical, g_empirical } => {
            obj.insert("f_empirical".to_string(), json!(f_empirical));
            obj.insert("g_empirical".to_string(), json!(g_empirical));
        }
        _ => {}
    }
    out
}

pub fn iterate_expansion_json(e: &BlockExpansion) -> Value {
    match e {
        BlockExpansion::Geometric(g) => json!({
            "form": "geometric",
            "lambda": scalar_json(&g.lambda),
            "s": g.s,
            "t": g.t,
            "w": g.w,
            "A": segments_json(&g.a),
            "B": segment_json(&g.b),
        }),
        BlockExpansion::Unit(u) => json!({
            "form": "unit",
            "s": u.s,
            "t": u.t,
            "l": u.l,
            "v": segment_json(&u.v),
            "B_seq": segments_json(&u.bseq),
        }),
    }
}

pub fn average_expansion_json(e: &AvgBlockExpansion, h: Option<&HAnalysis>) -> Value {
    let mut out = match e {
        AvgBlockExpansion::Geometric(g) => json!({
            "form": "geometric",
            "lambda": scalar_json(&g.lambda),
            "s": g.s,
            "t": g.t,
            "w": g.w,
            "E": segment_json(&g.e),
            "F": segment_json(&g.f),
            "A_avg": segments_json(&g.a_avg),
        }),
        AvgBlockExpansion::Unit(u) => json!({
            "form": "unit",
            "s": u.s,
            "t": u.t,
            "x_terms": segments_json(&u.x_terms),
            "c_terms": segments_json(&u.c_terms),
        }),
    };
    if let Some(analysis) = h {
        let rule = match &analysis.rule {
            HRule::Degree => json!({"rule": "h-degree"}),
            HRule::DominantX { index } => json!({"rule": "dominant-x", "index": index}),
            HRule::DominantC { index } => json!({"rule": "dominant-c", "index": index}),
        };
        let h_json = json!({
            "rule": rule["rule"].clone(),
            "dominant_index": rule.get("index").cloned().unwrap_or(Value::Null),
            "degree": analysis.h.degree().map_or(Value::Null, Value::from),
            "identically_zero": analysis.h.is_identically_zero(),
            "coefficients": segments_json(analysis.h.poly.coeffs()),
        });
        out.as_object_mut().unwrap().insert("H".to_string(), h_json);
    }
    out
}

pub fn empirical_json(e: &EmpiricalClass) -> Value {
    match e {
        EmpiricalClass::Diverges => json!("Diverges"),
        EmpiricalClass::Bounded => json!("Bounded"),
        EmpiricalClass::ConvergesToZero => json!("ConvergesToZero"),
        EmpiricalClass::BoundedAway { f, g } => json!({
            "BoundedAway": {"f": f, "g": g}
        }),
    }
}

/// First/last norms plus window extrema: enough to audit a trace without
/// dumping it whole.
pub fn norms_summary_json(norms: &[f64]) -> Value {
    let n = norms.len();
    let head: Vec<f64> = norms.iter().take(5).cloned().collect();
    let tail: Vec<f64> = norms.iter().skip(n.saturating_sub(5)).cloned().collect();
    let half = &norms[n / 2..];
    json!({
        "steps": n,
        "first": head,
        "last": tail,
        "window_min": half.iter().cloned().fold(f64::INFINITY, f64::min),
        "window_max": half.iter().cloned().fold(0.0, f64::max),
    })
}

pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
