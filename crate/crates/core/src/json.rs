//! JSON input parsing (with field-named diagnostics) and report rendering.
//!
//! Indices in families, pairings and splits are 1-based on the wire and
//! 0-based in memory. Rationals travel as `"a/b"` strings, floats are rounded
//! to 12 significant digits on output.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::atlas::{MaximizerSet, SfmiAtlas, SfmiPolytope};
use crate::codes::{self, Code, CodePartition};
use crate::dist::{BlockSplit, Distribution, Rational, StateSpace, Weights};
use crate::error::{Error, Result};
use crate::family::{Covering, MarginFamily, Pairing};
use crate::polytope::PolytopeReport;
use crate::search::{CoveringReport, SearchConfig, SearchResult};

/// Display unit for information values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

pub fn read_file(path: &Path) -> Result<Value> {
    let field = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::parse(&field, e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(field, e.to_string()))
}

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::parse(field, "expected an object"))
}

fn member<'a>(obj: &'a Map<String, Value>, key: &str, field: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::parse(join(field, key), "missing"))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], field: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::parse(join(field, k), "unknown field")),
        None => Ok(()),
    }
}

fn join(field: &str, key: &str) -> String {
    if field.is_empty() {
        key.to_string()
    } else {
        format!("{field}.{key}")
    }
}

fn uint(v: &Value, field: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(field, "expected a nonnegative integer"))
}

fn array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(field, "expected an array"))
}

fn uint_list(v: &Value, field: &str) -> Result<Vec<usize>> {
    array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, x)| uint(x, &format!("{field}[{i}]")))
        .collect()
}

/// 1-based index list to 0-based, checking the range `1..=n`.
fn one_based(v: &Value, n: usize, field: &str) -> Result<Vec<usize>> {
    uint_list(v, field)?
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            if x == 0 || x > n {
                Err(Error::parse(
                    format!("{field}[{i}]"),
                    format!("index {x} outside 1..={n}"),
                ))
            } else {
                Ok(x - 1)
            }
        })
        .collect()
}

pub fn parse_rational(s: &str, field: &str) -> Result<Rational> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::parse(field, format!("`{s}` is not a rational a/b")))
    };
    let r = match s.split_once('/') {
        Some((a, b)) => {
            let d = parse_int(b)?;
            if d.is_zero() {
                return Err(Error::parse(field, "zero denominator"));
            }
            Rational::new(parse_int(a)?, d)
        }
        None => Rational::from_integer(parse_int(s)?),
    };
    Ok(r)
}

fn parse_state(v: &Value, space: &StateSpace, field: &str) -> Result<usize> {
    let digits = match v {
        Value::String(s) => codes::word_from_str(s, usize::MAX).map_err(|e| Error::parse(field, e.to_string()))?,
        Value::Array(_) => uint_list(v, field)?,
        _ => return Err(Error::parse(field, "expected an array of symbols or a digit string")),
    };
    if digits.len() != space.n() {
        return Err(Error::parse(
            field,
            format!("state has {} symbols, expected {}", digits.len(), space.n()),
        ));
    }
    space.encode(&digits).map_err(|e| Error::parse(field, e.to_string()))
}

pub fn parse_distribution(v: &Value) -> Result<Distribution> {
    let obj = object(v, "")?;
    reject_unknown(obj, &["cardinalities", "entries"], "")?;
    let cards = uint_list(member(obj, "cardinalities", "")?, "cardinalities")?;
    let space = StateSpace::new(cards).map_err(|e| Error::parse("cardinalities", e.to_string()))?;
    let entries = array(member(obj, "entries", "")?, "entries")?;
    if entries.is_empty() {
        return Err(Error::parse("entries", "no entries"));
    }

    let mut exact: Option<bool> = None;
    let mut rationals = vec![Rational::zero(); space.total()];
    let mut floats = vec![0.0; space.total()];
    let mut seen = vec![false; space.total()];
    for (i, entry) in entries.iter().enumerate() {
        let field = format!("entries[{i}]");
        let e = object(entry, &field)?;
        reject_unknown(e, &["state", "prob"], &field)?;
        let state = parse_state(member(e, "state", &field)?, &space, &join(&field, "state"))?;
        if std::mem::replace(&mut seen[state], true) {
            return Err(Error::parse(join(&field, "state"), "state listed twice"));
        }
        let prob_field = join(&field, "prob");
        let is_exact = match member(e, "prob", &field)? {
            Value::String(s) => {
                rationals[state] = parse_rational(s, &prob_field)?;
                true
            }
            Value::Number(n) => {
                floats[state] = n
                    .as_f64()
                    .ok_or_else(|| Error::parse(&prob_field, "not a finite number"))?;
                false
            }
            _ => return Err(Error::parse(prob_field, "expected a rational string or a number")),
        };
        if *exact.get_or_insert(is_exact) != is_exact {
            return Err(Error::parse(
                prob_field,
                "rational and float probabilities cannot be mixed",
            ));
        }
    }
    let result = if exact == Some(true) {
        Distribution::from_exact(space, rationals)
    } else {
        Distribution::from_float(space, floats)
    };
    result.map_err(|e| Error::parse("entries", e.to_string()))
}

pub fn parse_family(v: &Value) -> Result<MarginFamily> {
    let obj = object(v, "")?;
    reject_unknown(obj, &["n", "sets"], "")?;
    let n = uint(member(obj, "n", "")?, "n")?;
    let sets = array(member(obj, "sets", "")?, "sets")?
        .iter()
        .enumerate()
        .map(|(i, s)| one_based(s, n, &format!("sets[{i}]")))
        .collect::<Result<_>>()?;
    MarginFamily::new(n, sets).map_err(|e| Error::parse("sets", e.to_string()))
}

pub fn parse_pairing(v: &Value) -> Result<Pairing> {
    let obj = object(v, "")?;
    reject_unknown(obj, &["n", "match"], "")?;
    let n = uint(member(obj, "n", "")?, "n")?;
    let matching = one_based(member(obj, "match", "")?, n, "match")?;
    if matching.len() != n {
        return Err(Error::parse(
            "match",
            format!("{} entries, expected {n}", matching.len()),
        ));
    }
    Pairing::new(matching).map_err(|e| Error::parse("match", e.to_string()))
}

pub fn parse_split(v: &Value, n: usize) -> Result<BlockSplit> {
    let obj = object(v, "")?;
    reject_unknown(obj, &["x", "y"], "")?;
    let x = one_based(member(obj, "x", "")?, n, "x")?;
    let y = one_based(member(obj, "y", "")?, n, "y")?;
    BlockSplit::new(n, x, y).map_err(|e| Error::parse("x", e.to_string()))
}

pub fn parse_code(v: &Value, alphabet: usize, field: &str) -> Result<Code> {
    let words = array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let f = format!("{field}[{i}]");
            let s = w.as_str().ok_or_else(|| Error::parse(&f, "expected a digit string"))?;
            codes::word_from_str(s, alphabet).map_err(|e| Error::parse(&f, e.to_string()))
        })
        .collect::<Result<_>>()?;
    Code::new(alphabet, words).map_err(|e| Error::parse(field, e.to_string()))
}

pub fn parse_config(v: &Value) -> Result<SearchConfig> {
    let cfg: SearchConfig = serde_json::from_value(v.clone()).map_err(|e| Error::parse("config", e.to_string()))?;
    cfg.validate().map_err(|e| Error::parse("config", e.to_string()))?;
    Ok(cfg)
}

pub fn rational_str(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn float(x: f64) -> Value {
    if x.is_finite() {
        json!(round12(x))
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn state_label(space: &StateSpace, index: usize) -> String {
    codes::word_to_string(&space.decode(index))
}

/// Round-trips through [`parse_distribution`]; only the support is listed.
pub fn distribution_json(p: &Distribution) -> Value {
    let space = p.space();
    let entries: Vec<Value> = p
        .support()
        .into_iter()
        .map(|s| {
            let prob = match p.weights() {
                Weights::Exact(w) => json!(rational_str(&w[s])),
                Weights::Float(w) => json!(w[s]),
            };
            json!({"state": space.decode(s), "prob": prob})
        })
        .collect();
    json!({"cardinalities": space.cardinalities(), "entries": entries})
}

/// Compact `{"0101": "1/4", ...}` view of a distribution.
pub fn distribution_summary(p: &Distribution) -> Value {
    let space = p.space();
    let mut out = Map::new();
    for s in p.support() {
        let v = match p.weights() {
            Weights::Exact(w) => json!(rational_str(&w[s])),
            Weights::Float(w) => float(w[s]),
        };
        out.insert(state_label(space, s), v);
    }
    Value::Object(out)
}

pub fn family_json(fam: &MarginFamily) -> Value {
    let sets: Vec<Vec<usize>> = fam.sets().iter().map(|s| s.iter().map(|i| i + 1).collect()).collect();
    json!({"n": fam.n(), "sets": sets})
}

pub fn pairing_json(p: &Pairing) -> Value {
    let m: Vec<usize> = p.matching().iter().map(|i| i + 1).collect();
    json!({"n": p.n(), "match": m})
}

pub fn covering_json(c: &Covering) -> Value {
    match c {
        Covering::Connected { order } => json!({"connected": true, "order": order}),
        Covering::Uncovered { index } => json!({"connected": false, "uncovered": index + 1}),
        Covering::Disconnected { components } => {
            let comps: Vec<Vec<usize>> = components.iter().map(|c| c.iter().map(|i| i + 1).collect()).collect();
            json!({"connected": false, "components": comps})
        }
    }
}

pub fn code_json(code: &Code) -> Value {
    json!(code.to_strings())
}

pub fn partition_json(p: &CodePartition) -> Value {
    Value::Array(p.parts().iter().map(code_json).collect())
}

fn rational_vec(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|r| json!(rational_str(r))).collect())
}

pub fn polytope_report_json(report: &PolytopeReport, space: &StateSpace) -> Value {
    let columns: Vec<String> = report.column_labels.iter().map(|&c| state_label(space, c)).collect();
    json!({
        "columns": columns,
        "rank": report.rank,
        "affine_dimension": report.affine_dimension,
        "kernel_dimension": report.kernel_basis.len(),
        "kernel_basis": report.kernel_basis.iter().map(|v| rational_vec(v)).collect::<Vec<_>>(),
        "vertex_count": report.vertices.len(),
        "vertices": report.vertices.iter().map(|v| rational_vec(v)).collect::<Vec<_>>(),
        "vertex_span_dimension": report.vertex_span_dimension(),
        "is_empty": report.is_empty,
        "is_point": report.is_point,
    })
}

pub fn sfmi_polytope_json(poly: &SfmiPolytope, units: Units) -> Value {
    let space = poly.space();
    let vertices: Vec<Value> = (0..poly.report.vertices.len())
        .map(|i| {
            let d = poly.vertex_distribution(i);
            let sfmi = crate::family::sfmi(&d.to_float(), &poly.pairing).unwrap_or(f64::NAN);
            json!({
                "weights": distribution_summary(&d),
                "code_vertex": poly.code_vertices.contains(&i),
                "sfmi": float(units.convert(sfmi)),
            })
        })
        .collect();
    let split = BlockSplit::halves(2 * poly.n).expect("2n ≥ 2");
    let centroid_float = poly.centroid.to_float();
    json!({
        "margin_choice": poly.margin_choice.iter().map(code_json).collect::<Vec<_>>(),
        "support": poly.support.iter().map(|&s| state_label(&space, s)).collect::<Vec<_>>(),
        "affine_dimension": poly.report.affine_dimension,
        "rank": poly.report.rank,
        "vertex_count": poly.report.vertices.len(),
        "vertices": vertices,
        "code_vertices": poly.code_vertices,
        "simplices": poly.simplices,
        "centroid": distribution_summary(&poly.centroid),
        "centroid_is_block_mi_maximizer": crate::atlas::centroid_is_block_mi_maximizer(poly),
        "centroid_measures": {
            "sfmi": float(units.convert(crate::family::sfmi(&centroid_float, &poly.pairing).unwrap_or(f64::NAN))),
            "block_mi": float(units.convert(crate::dist::block_mutual_information(&centroid_float, &split).unwrap_or(f64::NAN))),
            "multi_information": float(units.convert(crate::dist::multi_information(&centroid_float))),
        },
    })
}

pub fn atlas_json(atlas: &SfmiAtlas, units: Units) -> Value {
    let (alphabet, n) = (atlas.alphabet, atlas.n);
    let log_n = (alphabet as f64).ln();
    let violations = atlas.violations();
    json!({
        "alphabet": alphabet,
        "pairs": n,
        "pairing": pairing_json(&atlas.pairing),
        "units": units.name(),
        "summary": {
            "polytopes": atlas.polytopes.len(),
            "expected_polytopes": atlas.expected_polytope_count().to_string(),
            "dimension": atlas.polytopes.first().map(|p| p.report.affine_dimension),
            "vertices_per_polytope": atlas.polytopes.iter().map(|p| p.report.vertices.len()).collect::<Vec<_>>(),
            "code_vertices_total": atlas.code_vertex_count(),
            "multi_information_maximizers_on_2n": codes::checked_pow(codes::factorial(alphabet), 2 * n - 1).to_string(),
            "block_mi_maximizers": if alphabet.pow(n as u32) <= 34 {
                Value::String(codes::factorial(alphabet.pow(n as u32)).to_string())
            } else {
                Value::Null
            },
            "block_mi_maximizers_reached": atlas.polytopes.len(),
            "max_multi_information": float(units.convert((2 * n - 1) as f64 * log_n)),
            "max_block_mi": float(units.convert(n as f64 * log_n)),
            "max_sfmi": float(units.convert(log_n)),
            "polytopes_disjoint": atlas.polytopes_disjoint,
            "supports_disjoint": atlas.supports_disjoint,
            "code_vertices_match_maximizers": atlas.code_vertices_match_maximizers,
            "violations": violations,
        },
        "polytopes": atlas.polytopes.iter().map(|p| sfmi_polytope_json(p, units)).collect::<Vec<_>>(),
    })
}

pub fn maximizer_set_json(set: &MaximizerSet, units: Units) -> Value {
    json!({
        "kind": set.kind.name(),
        "alphabet": set.alphabet,
        "n": set.n,
        "count": set.len(),
        "max_value": float(units.convert(set.max_value())),
        "distributions": set.distributions.iter().map(distribution_summary).collect::<Vec<_>>(),
    })
}

pub fn search_result_json(r: &SearchResult, units: Units) -> Value {
    let space = r.best_point.space();
    let point: Map<String, Value> = r
        .best_point
        .probabilities()
        .iter()
        .enumerate()
        .map(|(s, &p)| (state_label(space, s), float(p)))
        .collect();
    json!({
        "measure": r.measure,
        "units": units.name(),
        "best_value": float(units.convert(r.best_value)),
        "best_restart": r.best_restart,
        "best_point": point,
        "max_observed_value": float(units.convert(r.max_observed_value())),
        "per_restart_values": r.per_restart_values().into_iter().map(|v| float(units.convert(v))).collect::<Vec<_>>(),
        "restarts": r.restarts.iter().map(|s| json!({
            "restart": s.restart,
            "initial_value": float(units.convert(s.initial_value)),
            "final_value": float(units.convert(s.final_value)),
            "iterations": s.iterations,
            "halvings": s.halvings,
            "final_gradient_norm": float(s.final_gradient_norm),
            "termination": s.termination,
            "monotone": s.monotone,
        })).collect::<Vec<_>>(),
        "matched_maximizer": r.matched_maximizer.as_ref().map(|m| json!({
            "index": m.index,
            "total_variation": float(m.total_variation),
        })),
    })
}

pub fn covering_report_json(r: &CoveringReport, units: Units) -> Value {
    json!({
        "alphabet": r.alphabet,
        "n": r.n,
        "family": family_json(&r.family),
        "covering": covering_json(&r.covering),
        "max_i_lambda": float(units.convert(r.max_i_lambda)),
        "max_multi_information": float(units.convert(r.max_multi_information)),
        "maximizer_count": r.maximizer_count,
        "runs_at_max": r.runs_at_max,
        "runs_matched": r.runs_matched,
        "worst_match_distance": float(r.worst_match_distance),
        "witness": r.witness.as_ref().map(|w| json!({
            "distribution": distribution_summary(&w.distribution),
            "i_lambda": float(units.convert(w.i_lambda)),
            "multi_information": float(units.convert(w.multi_information)),
        })),
        "passed": r.passed,
    })
}
