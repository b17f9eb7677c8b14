//! Built-in scenario registry: small worked instances shipped as JSON data
//! under a versioned schema, each with exact and numeric checks.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::Zero;
use serde_json::Value;

use crate::atlas::{self, MaximizerSet};
use crate::codes::{self, Code};
use crate::dist::{self, BlockSplit, Distribution, Rational, StateSpace};
use crate::error::{Error, Result};
use crate::family::{self, MarginFamily};
use crate::json;
use crate::polytope::{self, ConstraintSystem, PolytopeReport, RationalMatrix};
use crate::search::{self, Measure, SearchConfig};

pub const SCHEMA: &str = "factored-info/scenario/v1";

const SOURCES: &[&str] = &[
    include_str!("../scenarios/basics.json"),
    include_str!("../scenarios/example-four.json"),
    include_str!("../scenarios/example-threebinary.json"),
    include_str!("../scenarios/example-sfmi-2x2.json"),
    include_str!("../scenarios/example-sfmi-prime.json"),
    include_str!("../scenarios/appendix-ex2.json"),
    include_str!("../scenarios/appendix-n2N3.json"),
    include_str!("../scenarios/codes-counting.json"),
    include_str!("../scenarios/partitions-counting.json"),
    include_str!("../scenarios/theorem-fmi-connected.json"),
    include_str!("../scenarios/theorem-fmi-disconnected.json"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub kind: String,
    pub parameters: Value,
    pub expected: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioReport {
    pub name: String,
    pub description: String,
    pub checks: Vec<Check>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Default)]
struct Log(Vec<Check>);

impl Log {
    fn push(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            label: label.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, label: impl Into<String>, got: T, want: T) {
        let passed = got == want;
        let detail = if passed {
            format!("{got:?}")
        } else {
            format!("got {got:?}, expected {want:?}")
        };
        self.push(label, passed, detail);
    }

    fn close(&mut self, label: impl Into<String>, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.push(
            label,
            err <= tol,
            format!("{got:.12e} vs {want:.12e}, |diff| {err:.1e} (tol {tol:.0e})"),
        );
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::parse("scenario", e.to_string()))?;
    let schema = str_field(&v, "schema")?;
    if schema != SCHEMA {
        return Err(Error::parse(
            "schema",
            format!("unsupported schema `{schema}`, expected `{SCHEMA}`"),
        ));
    }
    Ok(Scenario {
        name: str_field(&v, "name")?.to_string(),
        description: str_field(&v, "description")?.to_string(),
        kind: str_field(&v, "kind")?.to_string(),
        parameters: v.get("parameters").cloned().unwrap_or(Value::Null),
        expected: v.get("expected").cloned().unwrap_or(Value::Null),
    })
}

/// All built-in scenarios, in registry order.
pub fn registry() -> Vec<Scenario> {
    SOURCES
        .iter()
        .map(|s| parse_scenario(s).expect("built-in scenarios are well-formed"))
        .collect()
}

pub fn names() -> Vec<String> {
    registry().into_iter().map(|s| s.name).collect()
}

pub fn find(name: &str) -> Result<Scenario> {
    registry()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario `{name}`; known: {}", names().join(", "))))
}

/// Runs every check of one scenario. Data errors are returned as `Err`;
/// failed checks are recorded in the report.
pub fn run(s: &Scenario) -> Result<ScenarioReport> {
    let mut log = Log::default();
    match s.kind.as_str() {
        "maximizer_sets" => maximizer_sets(s, &mut log)?,
        "margin_propagation" => margin_propagation(s, &mut log)?,
        "sfmi_polytopes" => sfmi_polytopes(s, &mut log)?,
        "polytope_golden" => polytope_golden(s, &mut log)?,
        "code_counts" => code_counts(s, &mut log)?,
        "partition_counts" => partition_counts(s, &mut log)?,
        "covering_check" => covering_check(s, &mut log)?,
        "measure_cases" => measure_cases(s, &mut log)?,
        other => return Err(Error::parse("kind", format!("unknown scenario kind `{other}`"))),
    }
    Ok(ScenarioReport {
        name: s.name.clone(),
        description: s.description.clone(),
        checks: log.0,
    })
}

pub fn run_all() -> Result<Vec<ScenarioReport>> {
    registry().iter().map(run).collect()
}

// ---- data access ----

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::parse(key, "missing"))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    get(v, key)?
        .as_str()
        .ok_or_else(|| Error::parse(key, "expected a string"))
}

fn uint_field(v: &Value, key: &str) -> Result<usize> {
    get(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(key, "expected a nonnegative integer"))
}

fn bool_field(v: &Value, key: &str) -> Result<bool> {
    get(v, key)?
        .as_bool()
        .ok_or_else(|| Error::parse(key, "expected a boolean"))
}

fn array_field<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    get(v, key)?
        .as_array()
        .ok_or_else(|| Error::parse(key, "expected an array"))
}

fn within(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse { field: inner, message } => Error::parse(format!("{field}.{inner}"), message),
        other => Error::parse(field, other.to_string()),
    }
}

fn strings(v: &Value, field: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| Error::parse(field, "expected an array of strings"))?
        .iter()
        .map(|w| {
            w.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::parse(field, "expected a string"))
        })
        .collect()
}

fn word_lists(v: &Value, field: &str) -> Result<Vec<Vec<String>>> {
    v.as_array()
        .ok_or_else(|| Error::parse(field, "expected an array of word lists"))?
        .iter()
        .map(|w| strings(w, field))
        .collect()
}

fn one_based(v: &Value, field: &str) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| Error::parse(field, "expected an index array"))?
        .iter()
        .map(|x| match x.as_u64() {
            Some(i) if i >= 1 => Ok(i as usize - 1),
            _ => Err(Error::parse(field, "expected 1-based indices")),
        })
        .collect()
}

/// A number, a rational string, or `"c*ln(m)"` / `"ln(m)"`.
fn number(v: &Value, field: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::parse(field, "not finite")),
        Value::String(s) => match s.split_once("ln(") {
            Some((coef, arg)) => {
                let coef = coef.trim().trim_end_matches('*');
                let c = if coef.is_empty() {
                    1.0
                } else {
                    dist::rational_to_f64(&json::parse_rational(coef, field)?)
                };
                let arg: f64 = arg
                    .trim_end_matches(')')
                    .parse()
                    .map_err(|_| Error::parse(field, format!("bad logarithm `{s}`")))?;
                Ok(c * arg.ln())
            }
            None => Ok(dist::rational_to_f64(&json::parse_rational(s, field)?)),
        },
        _ => Err(Error::parse(field, "expected a number or expression")),
    }
}

fn rationals(v: &Value, field: &str) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| Error::parse(field, "expected an array"))?
        .iter()
        .map(|x| match x {
            Value::String(s) => json::parse_rational(s, field),
            Value::Number(n) => n
                .as_i64()
                .map(|i| Rational::from_integer(i.into()))
                .ok_or_else(|| Error::parse(field, "expected an integer or rational string")),
            _ => Err(Error::parse(field, "expected an integer or rational string")),
        })
        .collect()
}

fn integer_matrix(v: &Value, field: &str) -> Result<RationalMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::parse(field, "expected a matrix"))?
        .iter()
        .map(|r| rationals(r, field))
        .collect::<Result<Vec<_>>>()?;
    RationalMatrix::from_rows(rows).map_err(within(field))
}

fn words_distribution(space: &StateSpace, words: &[String], field: &str) -> Result<Distribution> {
    let states = words
        .iter()
        .map(|w| {
            let word = codes::word_from_str(w, usize::MAX)?;
            space.encode(&word)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(within(field))?;
    Distribution::uniform_on(space.clone(), &states).map_err(within(field))
}

/// Either a full distribution document or `{"cardinalities", "uniform_on"}`.
fn distribution(v: &Value, field: &str) -> Result<Distribution> {
    match v.get("uniform_on") {
        Some(words) => {
            let cards = get(v, "cardinalities")
                .and_then(|c| {
                    serde_json::from_value::<Vec<usize>>(c.clone())
                        .map_err(|e| Error::parse("cardinalities", e.to_string()))
                })
                .map_err(within(field))?;
            let space = StateSpace::new(cards).map_err(within(field))?;
            words_distribution(&space, &strings(words, field)?, field)
        }
        None => json::parse_distribution(v).map_err(within(field)),
    }
}

fn key(d: &Distribution) -> Vec<Rational> {
    d.exact_weights().expect("scenario distributions are exact").to_vec()
}

fn average(points: &[Vec<Rational>]) -> Vec<Rational> {
    let count = Rational::from_integer(points.len().into());
    (0..points[0].len())
        .map(|c| points.iter().map(|p| &p[c]).sum::<Rational>() / &count)
        .collect()
}

fn word_set_keys(space: &StateSpace, lists: &[Vec<String>], field: &str) -> Result<BTreeSet<Vec<Rational>>> {
    lists
        .iter()
        .map(|w| words_distribution(space, w, field).map(|d| key(&d)))
        .collect()
}

fn codes_from(v: &Value, alphabet: usize, field: &str) -> Result<Vec<Code>> {
    v.as_array()
        .ok_or_else(|| Error::parse(field, "expected an array of codes"))?
        .iter()
        .enumerate()
        .map(|(i, c)| json::parse_code(c, alphabet, &format!("{field}[{i}]")))
        .collect()
}

fn pow(base: usize, exp: usize) -> u128 {
    codes::checked_pow(base as u128, exp)
}

// ---- scenario kinds ----

fn maximizer_sets(s: &Scenario, log: &mut Log) -> Result<()> {
    let (p, e) = (&s.parameters, &s.expected);
    let alphabet = uint_field(p, "alphabet")?;
    let pairs = uint_field(p, "pairs")?;
    let n = 2 * pairs;
    let space = StateSpace::homogeneous(n, alphabet)?;
    let log_n = (alphabet as f64).ln();

    let listed = word_set_keys(
        &space,
        &word_lists(get(e, "i_maximizers")?, "i_maximizers")?,
        "i_maximizers",
    )?;
    let imax = atlas::enumerate_i_maximizers(alphabet, n)?;
    let imax_set = imax.weight_set();
    log.eq(
        "multi-information maximizers equal the listed set",
        imax_set.len(),
        listed.len(),
    );
    log.push(
        "multi-information maximizer set matches exactly",
        imax_set == listed,
        format!("{} distributions", imax.len()),
    );
    log.eq(
        "multi-information maximizer count is N!^(n-1)",
        imax.len() as u128,
        codes::checked_pow(codes::factorial(alphabet), n - 1),
    );
    let all_pass = imax
        .distributions
        .iter()
        .map(atlas::is_i_maximizer)
        .collect::<Result<Vec<_>>>()?;
    log.push(
        "every listed maximizer passes the exact membership test",
        all_pass.iter().all(|&b| b),
        "",
    );
    let worst = imax
        .distributions
        .iter()
        .map(|d| (dist::multi_information(&d.to_float()) - (n - 1) as f64 * log_n).abs())
        .fold(0.0, f64::max);
    log.close("multi-information of each maximizer is (n-1) log N", worst, 0.0, 1e-12);

    let block_listed = word_set_keys(
        &space,
        &word_lists(get(e, "block_mi_maximizers")?, "block_mi_maximizers")?,
        "block_mi_maximizers",
    )?;
    let block = atlas::enumerate_block_mi_maximizers(alphabet, pairs)?;
    let block_set = block.weight_set();
    log.eq(
        "block MI maximizer count is (N^n)!",
        block.len() as u128,
        codes::factorial(alphabet.pow(pairs as u32)),
    );
    log.push(
        "block MI maximizer set matches the listed set",
        block_set == block_listed,
        format!("{} listed", block_listed.len()),
    );
    let split = BlockSplit::halves(n)?;
    let worst = block
        .distributions
        .iter()
        .map(|d| dist::block_mutual_information(&d.to_float(), &split).map(|v| (v - pairs as f64 * log_n).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    log.close("block MI of each block maximizer is n log N", worst, 0.0, 1e-12);
    let shared = imax_set.intersection(&block_set).count();
    log.eq("the two maximizer sets are disjoint", shared, 0);

    for (k, fam) in array_field(e, "averaged_families")?.iter().enumerate() {
        let field = format!("averaged_families[{k}]");
        let pairing = json::parse_pairing(get(fam, "pairing")?).map_err(within(&field))?;
        let dists: Vec<Distribution> = word_lists(get(fam, "distributions")?, &field)?
            .iter()
            .map(|w| words_distribution(&space, w, &field))
            .collect::<Result<_>>()?;
        let tag = format!(
            "pairing {:?}",
            pairing.matching().iter().map(|i| i + 1).collect::<Vec<_>>()
        );
        log.push(
            format!("{tag}: listed distributions are block MI maximizers"),
            dists.iter().all(|d| block_set.contains(&key(d))),
            format!("{} distributions", dists.len()),
        );
        let worst = dists
            .iter()
            .map(|d| family::sfmi(&d.to_float(), &pairing).map(|v| (v - log_n).abs()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        log.close(
            format!("{tag}: SFMI of each listed distribution is log N"),
            worst,
            0.0,
            1e-12,
        );
        let averaged = dists.iter().all(|d| is_average_of_contained(d, &imax, alphabet, pairs));
        log.push(
            format!("{tag}: each is the average of the N!^(n-1) maximizers inside its support"),
            averaged,
            "",
        );
    }
    Ok(())
}

fn is_average_of_contained(d: &Distribution, imax: &MaximizerSet, alphabet: usize, pairs: usize) -> bool {
    let support: BTreeSet<usize> = d.support().into_iter().collect();
    let members: Vec<Vec<Rational>> = imax
        .distributions
        .iter()
        .filter(|m| m.support().iter().all(|s| support.contains(s)))
        .map(key)
        .collect();
    members.len() as u128 == codes::checked_pow(codes::factorial(alphabet), pairs - 1) && average(&members) == key(d)
}

/// Every choice of one maximizing margin per set, with its solved polytope.
fn margin_combinations(
    alphabet: usize,
    fam: &MarginFamily,
    space: &StateSpace,
) -> Result<Vec<(Vec<Code>, PolytopeReport)>> {
    let per_set = fam
        .sets()
        .iter()
        .map(|set| codes::enumerate_max_distance_codes(alphabet, set.len()).map(Iterator::collect::<Vec<Code>>))
        .collect::<Result<Vec<_>>>()?;
    per_set
        .into_iter()
        .multi_cartesian_product()
        .map(|choice| {
            let margins = choice
                .iter()
                .map(atlas::code_distribution)
                .collect::<Result<Vec<_>>>()?;
            let report = polytope::margin_specified_polytope(space, fam, &margins)?;
            Ok((choice, report))
        })
        .collect()
}

fn point_of(space: &StateSpace, report: &PolytopeReport) -> Result<Distribution> {
    polytope::vertex_distribution(space, &report.column_labels, &report.vertices[0])
}

fn margin_propagation(s: &Scenario, log: &mut Log) -> Result<()> {
    let (p, e) = (&s.parameters, &s.expected);
    let alphabet = uint_field(p, "alphabet")?;
    let fam = json::parse_family(get(p, "family")?).map_err(within("family"))?;
    let space = StateSpace::homogeneous(fam.n(), alphabet)?;
    log.eq(
        "covering is connected",
        family::is_connected_covering(&fam).is_connected(),
        bool_field(e, "connected")?,
    );

    for (k, case) in array_field(e, "cases")?.iter().enumerate() {
        let field = format!("cases[{k}]");
        let codes = codes_from(get(case, "margins")?, alphabet, &field)?;
        let margins = codes.iter().map(atlas::code_distribution).collect::<Result<Vec<_>>>()?;
        let report = polytope::margin_specified_polytope(&space, &fam, &margins)?;
        let labels: Vec<String> = codes.iter().map(|c| c.to_strings().join("+")).collect();
        let tag = format!("margins {}", labels.join(" / "));
        let solution = words_distribution(&space, &strings(get(case, "solution")?, &field)?, &field)?;
        let forced = report.is_point && point_of(&space, &report).map(|d| d == solution).unwrap_or(false);
        log.push(
            format!("{tag}: polytope is the single listed point"),
            forced,
            format!("dimension {}", report.affine_dimension),
        );
        log.push(
            format!("{tag}: the point is a multi-information maximizer"),
            atlas::is_i_maximizer(&solution)?,
            "",
        );
        if let Some(implied) = case.get("implied") {
            let set = one_based(get(implied, "set")?, &field)?;
            let sub = space.subspace(&set)?;
            let want = words_distribution(&sub, &strings(get(implied, "words")?, &field)?, &field)?;
            let got = dist::marginal(&solution, &set)?;
            log.push(
                format!(
                    "{tag}: implied margin on {:?}",
                    set.iter().map(|i| i + 1).collect::<Vec<_>>()
                ),
                got == want,
                json::distribution_summary(&got).to_string(),
            );
        }
    }

    let combos = margin_combinations(alphabet, &fam, &space)?;
    let imax = atlas::enumerate_i_maximizers(alphabet, fam.n())?;
    let mut points = BTreeSet::new();
    let mut all_points = true;
    for (_, report) in combos.iter().filter(|(_, r)| !r.is_empty) {
        all_points &= report.is_point;
        if report.is_point {
            points.insert(key(&point_of(&space, report)?));
        }
    }
    log.push(
        "every compatible margin choice gives a point polytope",
        all_points,
        format!("{} combinations", combos.len()),
    );
    log.push(
        "the points are exactly the multi-information maximizers",
        points == imax.weight_set(),
        format!("{} points", points.len()),
    );
    Ok(())
}

fn sfmi_polytopes(s: &Scenario, log: &mut Log) -> Result<()> {
    let (p, e) = (&s.parameters, &s.expected);
    let alphabet = uint_field(p, "alphabet")?;
    let pairs = uint_field(p, "pairs")?;
    let pairing = json::parse_pairing(get(p, "pairing")?).map_err(within("pairing"))?;
    let space = StateSpace::homogeneous(2 * pairs, alphabet)?;
    let atlas = atlas::build_sfmi_atlas(alphabet, pairs, &pairing)?;

    log.eq(
        "polytope count is N!^n",
        atlas.polytopes.len() as u128,
        atlas.expected_polytope_count(),
    );
    let violations = atlas.violations();
    log.push(
        "all structural checks hold",
        violations.is_empty(),
        violations.join("; "),
    );
    log.push("polytopes are pairwise disjoint", atlas.polytopes_disjoint, "");
    log.eq(
        "code vertices are exactly the multi-information maximizers",
        atlas.code_vertices_match_maximizers,
        Some(true),
    );
    let dimension = uint_field(e, "dimension")?;
    log.push(
        "every polytope has the listed dimension",
        atlas.polytopes.iter().all(|p| p.report.affine_dimension == dimension),
        format!("dimension {dimension}"),
    );

    let want: BTreeSet<BTreeSet<Vec<Rational>>> = array_field(e, "polytopes")?
        .iter()
        .map(|poly| word_set_keys(&space, &word_lists(poly, "polytopes")?, "polytopes"))
        .collect::<Result<_>>()?;
    let got: BTreeSet<BTreeSet<Vec<Rational>>> = atlas
        .polytopes
        .iter()
        .map(|p| p.vertex_distributions().iter().map(key).collect())
        .collect();
    log.push(
        "vertex sets match the listed segments",
        got == want,
        format!("{} polytopes", got.len()),
    );

    let centroids = word_set_keys(&space, &word_lists(get(e, "centroids")?, "centroids")?, "centroids")?;
    let got: BTreeSet<Vec<Rational>> = atlas.centroids().into_iter().map(key).collect();
    log.push(
        "centroids match the listed distributions",
        got == centroids,
        format!("{} centroids", got.len()),
    );
    log.push(
        "every centroid is a block MI maximizer",
        atlas.polytopes.iter().all(atlas::centroid_is_block_mi_maximizer),
        "",
    );

    let sequential = atlas::enumerate_sfmi_polytopes(alphabet, pairs, &pairing)?.collect::<Result<Vec<_>>>()?;
    log.push(
        "lazy enumeration matches the parallel build",
        sequential
            .iter()
            .map(|p| &p.support)
            .eq(atlas.polytopes.iter().map(|p| &p.support)),
        "",
    );

    if let Some(other) = e.get("shared_centroids_with") {
        let other_pairing = json::parse_pairing(get(other, "pairing")?).map_err(within("shared_centroids_with"))?;
        let other_atlas = atlas::build_sfmi_atlas(alphabet, pairs, &other_pairing)?;
        log.eq(
            "centroids shared with the other pairing",
            atlas::shared_centroids(&atlas, &other_atlas).len(),
            uint_field(other, "count")?,
        );
    }
    Ok(())
}

fn polytope_golden(s: &Scenario, log: &mut Log) -> Result<()> {
    let (p, e) = (&s.parameters, &s.expected);
    let alphabet = uint_field(p, "alphabet")?;
    let pairs = uint_field(p, "pairs")?;
    let pairing = json::parse_pairing(get(p, "pairing")?).map_err(within("pairing"))?;
    let space = StateSpace::homogeneous(2 * pairs, alphabet)?;

    if let Some(listed) = e.get("margin_codes") {
        let want: BTreeSet<Vec<String>> = word_lists(listed, "margin_codes")?
            .into_iter()
            .map(|mut w| {
                w.sort();
                w
            })
            .collect();
        let got: BTreeSet<Vec<String>> = codes::enumerate_max_distance_codes(alphabet, 2)?
            .map(|c| c.to_strings())
            .collect();
        log.push(
            "pair margin codes match the listed set",
            got == want,
            format!("{} codes", got.len()),
        );
    }

    for (k, case) in array_field(e, "cases")?.iter().enumerate() {
        let field = format!("cases[{k}]");
        let choice = codes_from(get(case, "margins")?, alphabet, &field)?;
        let poly = atlas::build_sfmi_polytope(alphabet, pairs, &choice, &pairing)?;
        let tag = choice.iter().map(|c| c.to_strings().join("+")).join(" / ");
        let matrix = &poly.system.matrix;

        if let Some(cols) = case.get("columns") {
            let got: Vec<String> = poly
                .report
                .column_labels
                .iter()
                .map(|&c| json::state_label(&space, c))
                .collect();
            log.eq(format!("{tag}: support columns"), got, strings(cols, &field)?);
        }
        if let Some(m) = case.get("matrix") {
            log.push(
                format!("{tag}: constraint matrix"),
                &integer_matrix(m, &field)? == matrix,
                format!("{}x{}", matrix.rows(), matrix.cols()),
            );
        }
        if let Some(rhs) = case.get("rhs") {
            log.eq(
                format!("{tag}: right-hand side"),
                poly.system.rhs.clone(),
                rationals(rhs, &field)?,
            );
        }
        let rk = polytope::rational_rank_and_kernel(matrix)?;
        if case.get("rank").is_some() {
            log.eq(format!("{tag}: rank"), rk.rank, uint_field(case, "rank")?);
        }
        if case.get("kernel_dimension").is_some() {
            log.eq(
                format!("{tag}: kernel dimension"),
                rk.kernel.len(),
                uint_field(case, "kernel_dimension")?,
            );
        }
        if let Some(rows) = case.get("kernel_rows") {
            let listed = integer_matrix(rows, &field)?;
            let in_kernel = (0..listed.rows()).all(|r| matrix.mul_vec(listed.row(r)).iter().all(Zero::is_zero));
            log.push(format!("{tag}: listed kernel rows lie in the kernel"), in_kernel, "");
            log.eq(
                format!("{tag}: listed kernel rows span the kernel"),
                polytope::rank(&listed),
                rk.kernel.len(),
            );
        }
        if let Some(x) = case.get("particular_solution") {
            log.push(
                format!("{tag}: particular solution satisfies the system"),
                poly.system.is_satisfied_by(&rationals(x, &field)?),
                "",
            );
        }
        if let Some(v) = case.get("vertices") {
            let want: BTreeSet<Vec<Rational>> = v
                .as_array()
                .ok_or_else(|| Error::parse(&field, "vertices must be an array"))?
                .iter()
                .map(|r| rationals(r, &field))
                .collect::<Result<_>>()?;
            let got: BTreeSet<Vec<Rational>> = poly.report.vertices.iter().cloned().collect();
            log.push(
                format!("{tag}: vertices match the listed rows"),
                got == want,
                format!("{} vertices", got.len()),
            );
        }
        if case.get("code_vertex_count").is_some() {
            log.eq(
                format!("{tag}: code vertices"),
                poly.code_vertices.len(),
                uint_field(case, "code_vertex_count")?,
            );
        }
        if case.get("simplex_count").is_some() {
            log.eq(
                format!("{tag}: simplices"),
                poly.simplices.len(),
                uint_field(case, "simplex_count")?,
            );
        }
        if let Some(listed) = case.get("simplices") {
            let want: BTreeSet<BTreeSet<Vec<Rational>>> = listed
                .as_array()
                .ok_or_else(|| Error::parse(&field, "simplices must be an array"))?
                .iter()
                .map(|simplex| word_set_keys(&space, &word_lists(simplex, &field)?, &field))
                .collect::<Result<_>>()?;
            let got: BTreeSet<BTreeSet<Vec<Rational>>> = poly
                .simplices
                .iter()
                .map(|simplex| simplex.iter().map(|&v| key(&poly.vertex_distribution(v))).collect())
                .collect();
            log.push(
                format!("{tag}: simplices match the listed groups"),
                got == want,
                format!("{} simplices", got.len()),
            );
        }
        if case.get("noncode_average_is_centroid").is_some() {
            let others: Vec<Vec<Rational>> = (0..poly.report.vertices.len())
                .filter(|v| !poly.code_vertices.contains(v))
                .map(|v| key(&poly.vertex_distribution(v)))
                .collect();
            let coincide = !others.is_empty() && average(&others) == key(&poly.centroid);
            log.eq(
                format!("{tag}: non-code vertices average to the centroid"),
                coincide,
                bool_field(case, "noncode_average_is_centroid")?,
            );
        }
        let violations = poly.structure_violations();
        log.push(
            format!("{tag}: structural checks"),
            violations.is_empty(),
            violations.join("; "),
        );
    }

    if let Some(a) = e.get("atlas") {
        let atlas = atlas::build_sfmi_atlas(alphabet, pairs, &pairing)?;
        log.eq(
            "atlas polytope count",
            atlas.polytopes.len(),
            uint_field(a, "polytopes")?,
        );
        let dimension = uint_field(a, "dimension")?;
        log.push(
            "atlas dimensions",
            atlas.polytopes.iter().all(|p| p.report.affine_dimension == dimension),
            format!("{dimension}"),
        );
        let vertices = uint_field(a, "vertices_per_polytope")?;
        log.push(
            "atlas vertex counts",
            atlas.polytopes.iter().all(|p| p.report.vertices.len() == vertices),
            format!("{vertices}"),
        );
        if a.get("code_vertices_total").is_some() {
            log.eq(
                "atlas code vertices",
                atlas.code_vertex_count(),
                uint_field(a, "code_vertices_total")?,
            );
        }
        let violations = atlas.violations();
        log.push("atlas structural checks", violations.is_empty(), violations.join("; "));
    }
    Ok(())
}

fn shapes(p: &Value) -> Result<Vec<(usize, usize)>> {
    serde_json::from_value(get(p, "shapes")?.clone()).map_err(|e| Error::parse("shapes", e.to_string()))
}

fn code_counts(s: &Scenario, log: &mut Log) -> Result<()> {
    let (p, e) = (&s.parameters, &s.expected);
    let counts: Vec<u128> =
        serde_json::from_value(get(e, "counts")?.clone()).map_err(|x| Error::parse("counts", x.to_string()))?;
    for ((alphabet, length), want) in shapes(p)?.into_iter().zip(counts) {
        let all: Vec<Code> = codes::enumerate_max_distance_codes(alphabet, length)?.collect();
        log.eq(format!("N={alphabet}, n={length}: code count"), all.len() as u128, want);
        log.eq(
            format!("N={alphabet}, n={length}: count is N!^(n-1)"),
            want,
            codes::checked_pow(codes::factorial(alphabet), length - 1),
        );
        let distinct: BTreeSet<&[Vec<usize>]> = all.iter().map(|c| c.words()).collect();
        log.push(
            format!("N={alphabet}, n={length}: codes are distinct with minimum distance n"),
            distinct.len() == all.len() && all.iter().all(|c| c.len() == alphabet && c.is_max_distance()),
            "",
        );
    }
    check_pairwise_distances(log)?;
    if let Some(listed) = e.get("listed") {
        for item in listed
            .as_array()
            .ok_or_else(|| Error::parse("listed", "expected an array"))?
        {
            let alphabet = uint_field(item, "alphabet")?;
            let length = uint_field(item, "length")?;
            let want: BTreeSet<Vec<String>> = word_lists(get(item, "codes")?, "codes")?
                .into_iter()
                .map(|mut w| {
                    w.sort();
                    w
                })
                .collect();
            let got: BTreeSet<Vec<String>> = codes::enumerate_max_distance_codes(alphabet, length)?
                .map(|c| c.to_strings())
                .collect();
            log.push(
                format!("N={alphabet}, n={length}: codes match the listed set"),
                got == want,
                "",
            );
        }
    }
    Ok(())
}

fn check_pairwise_distances(log: &mut Log) -> Result<()> {
    let mut ok = true;
    for code in codes::enumerate_max_distance_codes(3, 3)? {
        for (a, b) in code.words().iter().tuple_combinations() {
            ok &= codes::hamming_distance(a, b)? == 3;
        }
    }
    log.push(
        "N=3, n=3: every pair of words in every code differs in all positions",
        ok,
        "",
    );
    Ok(())
}

fn partition_is_valid(parts: &[Code], alphabet: usize, length: usize) -> bool {
    let mut seen = BTreeSet::new();
    let all_codes = parts.iter().all(|c| c.len() == alphabet && c.is_max_distance());
    let disjoint = parts.iter().flat_map(|c| c.words()).all(|w| seen.insert(w.clone()));
    all_codes
        && disjoint
        && parts.len() as u128 == pow(alphabet, length - 1)
        && seen.len() as u128 == pow(alphabet, length)
}

fn partition_counts(s: &Scenario, log: &mut Log) -> Result<()> {
    let (p, e) = (&s.parameters, &s.expected);
    let counts: Vec<u128> =
        serde_json::from_value(get(e, "counts")?.clone()).map_err(|x| Error::parse("counts", x.to_string()))?;
    for ((alphabet, length), want) in shapes(p)?.into_iter().zip(counts) {
        let tag = format!("N={alphabet}, n={length}");
        let cyclic = codes::partition_into_codes(alphabet, length)?;
        log.push(
            format!("{tag}: cyclic partition is a disjoint cover by N^(n-1) codes"),
            partition_is_valid(cyclic.parts(), alphabet, length),
            format!("{} parts", cyclic.len()),
        );
        let family: Vec<_> = codes::enumerate_all_partitions(alphabet, length)?.collect();
        log.eq(format!("{tag}: coset partition count"), family.len() as u128, want);
        log.eq(
            format!("{tag}: count is (N-1)!^(n-1)"),
            want,
            codes::checked_pow(codes::factorial(alphabet - 1), length - 1),
        );
        log.push(
            format!("{tag}: every coset partition is valid"),
            family.iter().all(|q| partition_is_valid(q.parts(), alphabet, length)),
            "",
        );
        let distinct: BTreeSet<_> = family.iter().map(|q| q.parts().to_vec()).collect();
        log.eq(
            format!("{tag}: coset partitions are distinct"),
            distinct.len(),
            family.len(),
        );
    }

    if let Some(listed) = e.get("listed") {
        for item in listed
            .as_array()
            .ok_or_else(|| Error::parse("listed", "expected an array"))?
        {
            let alphabet = uint_field(item, "alphabet")?;
            let length = uint_field(item, "length")?;
            let want: BTreeSet<Vec<String>> = word_lists(get(item, "parts")?, "parts")?.into_iter().collect();
            let got: BTreeSet<Vec<String>> = codes::partition_into_codes(alphabet, length)?
                .parts()
                .iter()
                .map(Code::to_strings)
                .collect();
            log.push(
                format!("N={alphabet}, n={length}: cyclic partition matches the listed parts"),
                got == want,
                "",
            );
        }
    }

    let max = uint_field(p, "bipartite_max")?;
    for size in 1..=max {
        let matchings = codes::bipartite_matchings_partition(size)?;
        let mut edges = BTreeSet::new();
        let perfect = matchings.iter().all(|m| {
            let left: BTreeSet<_> = m.iter().map(|e| e.0).collect();
            let right: BTreeSet<_> = m.iter().map(|e| e.1).collect();
            m.len() == size && left.len() == size && right.len() == size
        });
        let disjoint = matchings.iter().flatten().all(|&e| edges.insert(e));
        log.push(
            format!("K_{{{size},{size}}}: {size} perfect matchings cover all edges once"),
            matchings.len() == size && perfect && disjoint && edges.len() == size * size,
            format!("{} edges", edges.len()),
        );
    }

    if let Some(reported) = e.get("exhaustive_reported") {
        let shapes: Vec<(usize, usize)> =
            serde_json::from_value(reported.clone()).map_err(|x| Error::parse("exhaustive_reported", x.to_string()))?;
        for (alphabet, length) in shapes {
            let total = codes::count_partitions_exhaustive(alphabet, length, 1_000_000)?;
            let coset = codes::checked_pow(codes::factorial(alphabet - 1), length - 1);
            log.push(
                format!("N={alphabet}, n={length}: exhaustive exact covers include the coset family"),
                total >= coset,
                format!("{total} exact covers, {coset} coset partitions"),
            );
        }
    }
    Ok(())
}

fn covering_check(s: &Scenario, log: &mut Log) -> Result<()> {
    let (p, e) = (&s.parameters, &s.expected);
    let cfg = json::parse_config(get(p, "config")?)?;
    let expected = array_field(e, "cases")?;
    for (k, case) in array_field(p, "cases")?.iter().enumerate() {
        let field = format!("cases[{k}]");
        let want = expected
            .get(k)
            .ok_or_else(|| Error::parse(format!("expected.{field}"), "missing"))?;
        let alphabet = uint_field(case, "alphabet")?;
        let fam = json::parse_family(get(case, "family")?).map_err(within(&field))?;
        let n = fam.n();
        let space = StateSpace::homogeneous(n, alphabet)?;
        let tag = format!("N={alphabet}, family {}", json::family_json(&fam)["sets"]);
        let connected = bool_field(want, "connected")?;
        log.eq(
            format!("{tag}: connected covering"),
            family::is_connected_covering(&fam).is_connected(),
            connected,
        );

        let combos = margin_combinations(alphabet, &fam, &space)?;
        let compatible: Vec<&PolytopeReport> = combos.iter().map(|(_, r)| r).filter(|r| !r.is_empty).collect();
        log.eq(
            format!("{tag}: compatible margin choices"),
            compatible.len(),
            uint_field(want, "compatible_combinations")?,
        );
        if connected {
            let points = compatible
                .iter()
                .filter(|r| r.is_point)
                .map(|r| point_of(&space, r).map(|d| key(&d)))
                .collect::<Result<BTreeSet<_>>>()?;
            let imax = atlas::enumerate_i_maximizers(alphabet, n)?;
            log.push(
                format!("{tag}: every compatible choice pins one multi-information maximizer"),
                compatible.iter().all(|r| r.is_point) && points == imax.weight_set(),
                format!("{} distinct points", points.len()),
            );
        } else {
            let dim = compatible.iter().map(|r| r.affine_dimension).max().unwrap_or(0);
            log.eq(
                format!("{tag}: largest polytope dimension"),
                dim,
                uint_field(want, "max_dimension")?,
            );
        }

        let report = search::verify_theorem_fmi(alphabet, n, &fam, &cfg)?;
        let detail = if connected {
            format!(
                "{} of {} runs at the maximum matched a maximizer (worst TV {:.1e})",
                report.runs_matched, report.runs_at_max, report.worst_match_distance
            )
        } else {
            report
                .witness
                .as_ref()
                .map(|w| format!("witness I_lambda {:.12}, I {:.12}", w.i_lambda, w.multi_information))
                .unwrap_or_else(|| "no witness".into())
        };
        log.push(format!("{tag}: covering check"), report.passed, detail);
        if let Some(w) = &report.witness {
            if let Some(words) = want.get("witness") {
                let listed = words_distribution(&space, &strings(words, &field)?, &field)?;
                log.push(
                    format!("{tag}: witness is the listed distribution"),
                    w.distribution == listed,
                    json::distribution_summary(&w.distribution).to_string(),
                );
            }
            if let Some(v) = want.get("witness_i_lambda") {
                log.close(format!("{tag}: witness I_lambda"), w.i_lambda, number(v, &field)?, 1e-9);
            }
            if let Some(v) = want.get("witness_multi_information") {
                log.close(
                    format!("{tag}: witness multi-information"),
                    w.multi_information,
                    number(v, &field)?,
                    1e-9,
                );
            }
        }
    }
    Ok(())
}

fn parse_measure(v: &Value, n: usize, field: &str) -> Result<Measure> {
    let measure = match str_field(v, "name").map_err(within(field))? {
        "I" => Measure::MultiInformation,
        "MI" => Measure::BlockMutualInformation(json::parse_split(get(v, "split")?, n).map_err(within(field))?),
        "I_lambda" => Measure::ILambda(json::parse_family(get(v, "family")?).map_err(within(field))?),
        "FMI" => Measure::Fmi,
        "SFMI" => Measure::Sfmi(json::parse_pairing(get(v, "pairing")?).map_err(within(field))?),
        other => return Err(Error::parse(field, format!("unknown measure `{other}`"))),
    };
    Ok(measure)
}

fn measure_cases(s: &Scenario, log: &mut Log) -> Result<()> {
    let p = &s.parameters;
    let cfg: SearchConfig = json::parse_config(get(p, "config")?)?;
    for (k, case) in array_field(p, "cases")?.iter().enumerate() {
        let field = format!("cases[{k}]");
        let op = str_field(case, "op").map_err(within(&field))?;
        let label = format!("{op} #{k}");
        let tol = case.get("tol").and_then(Value::as_f64).unwrap_or(1e-12);
        let dist_at = |key: &str| distribution(get(case, key)?, &format!("{field}.{key}"));
        let expected = || number(get(case, "expected")?, &field);
        match op {
            "entropy" => log.close(label, dist::entropy(&dist_at("p")?), expected()?, tol),
            "kl_divergence" => log.close(
                label,
                dist::kl_divergence(&dist_at("p")?, &dist_at("q")?)?,
                expected()?,
                tol,
            ),
            "marginal" => {
                let got = dist::marginal(&dist_at("p")?, &one_based(get(case, "subset")?, &field)?)?;
                log.eq(label, got, dist_at("expected")?);
            }
            "product_of_marginals" => log.eq(label, dist::product_of_marginals(&dist_at("p")?), dist_at("expected")?),
            "multi_information" => log.close(label, dist::multi_information(&dist_at("p")?), expected()?, tol),
            "block_mutual_information" => {
                let p = dist_at("p")?;
                let split = json::parse_split(get(case, "split")?, p.space().n()).map_err(within(&field))?;
                log.close(label, dist::block_mutual_information(&p, &split)?, expected()?, tol);
            }
            "conditional_entropy" => {
                let target = one_based(get(case, "target")?, &field)?;
                let given = one_based(get(case, "given")?, &field)?;
                log.close(
                    label,
                    dist::conditional_entropy(&dist_at("p")?, &target, &given)?,
                    expected()?,
                    tol,
                );
            }
            "i_lambda" => {
                let fam = json::parse_family(get(case, "family")?).map_err(within(&field))?;
                log.close(label, family::i_lambda(&dist_at("p")?, &fam)?, expected()?, tol);
            }
            "fmi" => log.close(label, family::fmi(&dist_at("p")?)?, expected()?, tol),
            "sfmi" => {
                let pairing = json::parse_pairing(get(case, "pairing")?).map_err(within(&field))?;
                log.close(label, family::sfmi(&dist_at("p")?, &pairing)?, expected()?, tol);
            }
            "is_connected_covering" => {
                let fam = json::parse_family(get(case, "family")?).map_err(within(&field))?;
                log.eq(
                    label,
                    family::is_connected_covering(&fam).is_connected(),
                    bool_field(case, "expected")?,
                );
            }
            "margin_statistics_matrix" => {
                let fam = json::parse_family(get(case, "family")?).map_err(within(&field))?;
                let cards: Vec<usize> = serde_json::from_value(get(case, "cardinalities")?.clone())
                    .map_err(|x| Error::parse(&field, x.to_string()))?;
                let want: Vec<Vec<u8>> = serde_json::from_value(get(case, "expected")?.clone())
                    .map_err(|x| Error::parse(&field, x.to_string()))?;
                log.eq(
                    label,
                    family::margin_statistics_matrix(&fam, &StateSpace::new(cards)?)?.rows,
                    want,
                );
            }
            "marginal_polytope_dimension" => {
                let got = family::marginal_polytope_dimension(
                    uint_field(case, "n")?,
                    uint_field(case, "alphabet")?,
                    uint_field(case, "q")?,
                )?;
                log.eq(label, got, uint_field(case, "expected")? as u128);
            }
            "hamming_distance" => {
                let a = codes::word_from_str(str_field(case, "a")?, usize::MAX)?;
                let b = codes::word_from_str(str_field(case, "b")?, usize::MAX)?;
                log.eq(label, codes::hamming_distance(&a, &b)?, uint_field(case, "expected")?);
            }
            "rational_rank_and_kernel" => {
                let m = integer_matrix(get(case, "matrix")?, &field)?;
                let rk = polytope::rational_rank_and_kernel(&m)?;
                let kernel_ok = rk.kernel.iter().all(|v| m.mul_vec(v).iter().all(Zero::is_zero));
                log.eq(
                    label,
                    (rk.rank, rk.kernel.len(), kernel_ok),
                    (uint_field(case, "rank")?, uint_field(case, "kernel_dimension")?, true),
                );
            }
            "enumerate_vertices" => {
                let m = integer_matrix(get(case, "matrix")?, &field)?;
                let cols = (0..m.cols()).collect();
                let sys = ConstraintSystem::new(m, rationals(get(case, "rhs")?, &field)?, cols)?;
                let got: BTreeSet<Vec<Rational>> = polytope::enumerate_vertices(&sys)?.into_iter().collect();
                let want = array_field(case, "expected")?
                    .iter()
                    .map(|r| rationals(r, &field))
                    .collect::<Result<BTreeSet<_>>>()?;
                log.eq(label, got, want);
            }
            "margin_specified_polytope" => {
                let fam = json::parse_family(get(case, "family")?).map_err(within(&field))?;
                let alphabet = uint_field(case, "alphabet")?;
                let margins = codes_from(get(case, "margins")?, alphabet, &field)?
                    .iter()
                    .map(atlas::code_distribution)
                    .collect::<Result<Vec<_>>>()?;
                let space = StateSpace::homogeneous(fam.n(), alphabet)?;
                let report = polytope::margin_specified_polytope(&space, &fam, &margins)?;
                log.eq(
                    label,
                    (report.affine_dimension, report.vertices.len()),
                    (uint_field(case, "affine_dimension")?, uint_field(case, "vertex_count")?),
                );
            }
            "is_i_maximizer" => log.eq(
                label,
                atlas::is_i_maximizer(&dist_at("p")?)?,
                bool_field(case, "expected")?,
            ),
            "multi_information_gradient" => {
                let got = search::multi_information_gradient(&dist_at("p")?)?;
                let want = array_field(case, "expected")?
                    .iter()
                    .map(|x| number(x, &field))
                    .collect::<Result<Vec<_>>>()?;
                let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                log.push(
                    label,
                    got.len() == want.len() && err <= tol,
                    format!("max |diff| {err:.1e}"),
                );
            }
            "maximize_measure" => {
                let space = StateSpace::homogeneous(uint_field(case, "n")?, uint_field(case, "alphabet")?)?;
                let measure = parse_measure(get(case, "measure")?, space.n(), &field)?;
                let maximizers = match &measure {
                    Measure::MultiInformation | Measure::Fmi => Some(atlas::enumerate_i_maximizers(
                        space.homogeneous_cardinality().unwrap_or(0),
                        space.n(),
                    )?),
                    _ => None,
                };
                let result = search::maximize_measure(&measure, &space, &cfg, maximizers.as_ref())?;
                let want = expected()?;
                log.close(format!("{label} ({})", measure.name()), result.best_value, want, tol);
                log.push(
                    format!("{label} ({}): no iterate exceeds the maximum", measure.name()),
                    result.max_observed_value() <= want + 1e-9,
                    format!("max observed {:.12e}", result.max_observed_value()),
                );
                if let Some(tv) = case.get("match_tv").and_then(Value::as_f64) {
                    let got = result
                        .matched_maximizer
                        .as_ref()
                        .map_or(f64::INFINITY, |m| m.total_variation);
                    log.push(
                        format!("{label} ({}): best point near an exact maximizer", measure.name()),
                        got < tv,
                        format!("TV {got:.1e}"),
                    );
                }
            }
            other => return Err(Error::parse(field, format!("unknown op `{other}`"))),
        }
    }
    Ok(())
}
