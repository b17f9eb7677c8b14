//! Command-line front end. The binary only forwards `std::env::args` here so
//! that commands can be exercised in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::atlas;
use crate::codes;
use crate::dist::{self, BlockSplit, Distribution, StateSpace};
use crate::error::{Error, Result};
use crate::family::{self, MarginFamily, Pairing};
use crate::json::{self, float, Units};
use crate::ops;
use crate::polytope;
use crate::scenarios;
use crate::search::{self, Measure, SearchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

pub const THREADS_ENV: &str = "FACTORED_INFO_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "factored-info",
    version,
    about = "Information measures, their maximizers, and SFMI polytopes"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Logarithm base for information values.
    #[arg(long, value_enum, global = true, default_value_t = Base::E)]
    base: Base,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Base {
    E,
    #[value(name = "2")]
    Two,
}

impl From<Base> for Units {
    fn from(b: Base) -> Self {
        match b {
            Base::E => Units::Nats,
            Base::Two => Units::Bits,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum MeasureName {
    #[value(name = "I")]
    I,
    #[value(name = "MI")]
    Mi,
    #[value(name = "FMI")]
    Fmi,
    #[value(name = "SFMI")]
    Sfmi,
    #[value(name = "I_lambda")]
    ILambda,
}

#[derive(Args, Debug)]
struct MeasureInputs {
    /// Margin family JSON (`{"n", "sets"}`, 1-based), for I_lambda.
    #[arg(long)]
    family: Option<PathBuf>,
    /// Pairing JSON (`{"n", "match"}`, 1-based), for SFMI; identity if omitted.
    #[arg(long)]
    pairing: Option<PathBuf>,
    /// Block split JSON (`{"x", "y"}`, 1-based), for MI; halves if omitted.
    #[arg(long)]
    split: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a measure on a distribution file.
    Measure {
        distribution: PathBuf,
        #[arg(long, value_enum)]
        measure: MeasureName,
        #[command(flatten)]
        inputs: MeasureInputs,
    },
    /// Enumerate the SFMI polytopes for N-valued pairs.
    Atlas {
        #[arg(long = "N")]
        alphabet: usize,
        #[arg(long = "n")]
        pairs: usize,
        /// Pairing JSON; identity if omitted.
        #[arg(long)]
        pairing: Option<PathBuf>,
        /// JSON array of pair codes selecting a single polytope.
        #[arg(long)]
        margins: Option<PathBuf>,
        /// Write the full atlas here and print only the summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run built-in scenarios.
    Verify {
        #[arg(long, conflicts_with_all = ["all", "list"])]
        scenario: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        list: bool,
    },
    /// Numerically maximize a measure over distributions on [N]^n.
    Optimize {
        #[arg(long, value_enum)]
        measure: MeasureName,
        #[arg(long = "N")]
        alphabet: usize,
        #[arg(long = "n")]
        n: usize,
        /// Search configuration JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        inputs: MeasureInputs,
    },
    /// Maximum-distance codes and their partitions.
    Codes {
        #[arg(long = "N")]
        alphabet: usize,
        #[arg(long = "n")]
        length: usize,
        /// Also list the coset partitions.
        #[arg(long)]
        partitions: bool,
        /// Also list the perfect matchings of K_{N,N}.
        #[arg(long)]
        matchings: bool,
    },
    /// Solve a margin-specification problem exactly.
    Polytope {
        #[arg(long = "N")]
        alphabet: usize,
        /// Margin family JSON.
        #[arg(long)]
        family: PathBuf,
        /// JSON array, one entry per set: a distribution document or a code.
        #[arg(long)]
        margins: PathBuf,
    },
}

struct Output {
    format: Format,
    units: Units,
}

/// Parses arguments, runs the command, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let o = Output {
        format: cli.format,
        units: cli.base.into(),
    };
    match dispatch(cli.command, &o, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_cap_exceeded() {
        EXIT_CAP
    } else {
        EXIT_INPUT
    }
}

/// Sizes the global rayon pool from `FACTORED_INFO_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("{THREADS_ENV}: {e}")))
}

fn dispatch(command: Command, o: &Output, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Measure {
            distribution,
            measure,
            inputs,
        } => cmd_measure(&distribution, measure, &inputs, o, out),
        Command::Atlas {
            alphabet,
            pairs,
            pairing,
            margins,
            out: file,
        } => cmd_atlas(
            alphabet,
            pairs,
            pairing.as_deref(),
            margins.as_deref(),
            file.as_deref(),
            o,
            out,
        ),
        Command::Verify { scenario, all, list } => cmd_verify(scenario.as_deref(), all, list, o, out),
        Command::Optimize {
            measure,
            alphabet,
            n,
            config,
            inputs,
        } => cmd_optimize(measure, alphabet, n, config.as_deref(), &inputs, o, out),
        Command::Codes {
            alphabet,
            length,
            partitions,
            matchings,
        } => cmd_codes(alphabet, length, partitions, matchings, o, out),
        Command::Polytope {
            alphabet,
            family,
            margins,
        } => cmd_polytope(alphabet, &family, &margins, o, out),
    }
}

fn emit(o: &Output, out: &mut dyn Write, value: &Value, table: impl FnOnce() -> String) -> Result<()> {
    let text = match o.format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable"),
        Format::Table => table(),
    };
    writeln!(out, "{}", text.trim_end()).map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))
}

fn read(path: &Path) -> Result<Value> {
    json::read_file(path)
}

fn with_file(path: &Path) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse { field, message } => Error::Parse {
            field: format!("{}: {field}", path.display()),
            message,
        },
        other => other,
    }
}

fn load_pairing(path: Option<&Path>, pairs: usize) -> Result<Pairing> {
    match path {
        Some(p) => json::parse_pairing(&read(p)?).map_err(with_file(p)),
        None => Pairing::identity(pairs),
    }
}

fn build_measure(name: MeasureName, n: usize, inputs: &MeasureInputs) -> Result<Measure> {
    Ok(match name {
        MeasureName::I => Measure::MultiInformation,
        MeasureName::Fmi => Measure::Fmi,
        MeasureName::Mi => Measure::BlockMutualInformation(match &inputs.split {
            Some(p) => json::parse_split(&read(p)?, n).map_err(with_file(p))?,
            None => BlockSplit::halves(n)?,
        }),
        MeasureName::Sfmi => {
            if !n.is_multiple_of(2) {
                return Err(Error::InvalidArgument(format!(
                    "SFMI needs an even number of variables, got {n}"
                )));
            }
            Measure::Sfmi(load_pairing(inputs.pairing.as_deref(), n / 2)?)
        }
        MeasureName::ILambda => {
            let Some(p) = &inputs.family else {
                return Err(Error::parse("--family", "I_lambda needs a margin family file"));
            };
            Measure::ILambda(json::parse_family(&read(p)?).map_err(with_file(p))?)
        }
    })
}

fn one_based(set: &[usize]) -> Vec<usize> {
    set.iter().map(|i| i + 1).collect()
}

fn term_breakdown(p: &Distribution, sets: &[Vec<usize>], terms: &[f64], units: Units) -> Result<Vec<Value>> {
    sets.iter()
        .zip(terms)
        .map(|(set, &t)| {
            Ok(json!({
                "set": one_based(set),
                "marginal": json::distribution_summary(&dist::marginal(p, set)?),
                "value": float(units.convert(t)),
            }))
        })
        .collect()
}

fn cmd_measure(path: &Path, name: MeasureName, inputs: &MeasureInputs, o: &Output, out: &mut dyn Write) -> Result<i32> {
    let p = json::parse_distribution(&read(path)?).map_err(with_file(path))?;
    let n = p.space().n();
    let measure = build_measure(name, n, inputs)?;
    let u = o.units;
    let value = measure.evaluate(&p)?;
    let mut report = json!({
        "measure": measure.name(),
        "units": u.name(),
        "value": float(u.convert(value)),
        "entropy": float(u.convert(dist::entropy(&p))),
    });
    let singles: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let (label, breakdown) = match &measure {
        Measure::MultiInformation => {
            let h: Vec<f64> = singles
                .iter()
                .map(|s| dist::marginal(&p, s).map(|m| dist::entropy(&m)))
                .collect::<Result<_>>()?;
            ("marginal_entropies", term_breakdown(&p, &singles, &h, u)?)
        }
        Measure::BlockMutualInformation(split) => {
            let blocks = vec![split.x_block().to_vec(), split.y_block().to_vec()];
            let h: Vec<f64> = blocks
                .iter()
                .map(|s| dist::marginal(&p, s).map(|m| dist::entropy(&m)))
                .collect::<Result<_>>()?;
            ("block_entropies", term_breakdown(&p, &blocks, &h, u)?)
        }
        Measure::ILambda(fam) => (
            "terms",
            term_breakdown(&p, fam.sets(), &family::i_lambda_terms(&p, fam)?, u)?,
        ),
        Measure::Fmi => {
            let fam = MarginFamily::all_pairs(n)?;
            (
                "terms",
                term_breakdown(&p, fam.sets(), &family::i_lambda_terms(&p, &fam)?, u)?,
            )
        }
        Measure::Sfmi(pairing) => {
            let fam = MarginFamily::from_pairing(pairing);
            (
                "terms",
                term_breakdown(&p, fam.sets(), &family::sfmi_terms(&p, pairing)?, u)?,
            )
        }
    };
    report[label] = Value::Array(breakdown.clone());
    emit(o, out, &report, || {
        let mut s = format!(
            "{} = {} {}\nentropy = {}\n",
            measure.name(),
            fmt(u.convert(value)),
            u.name(),
            fmt(u.convert(dist::entropy(&p)))
        );
        s.push_str(&format!("{label}:\n"));
        for b in &breakdown {
            s.push_str(&format!(
                "  {:<12} {}  {}\n",
                b["set"].to_string(),
                b["value"],
                b["marginal"]
            ));
        }
        s
    })?;
    Ok(EXIT_OK)
}

fn fmt(x: f64) -> String {
    float(x).to_string()
}

fn cmd_atlas(
    alphabet: usize,
    pairs: usize,
    pairing: Option<&Path>,
    margins: Option<&Path>,
    file: Option<&Path>,
    o: &Output,
    out: &mut dyn Write,
) -> Result<i32> {
    let pairing = load_pairing(pairing, pairs)?;
    let u = o.units;
    if let Some(m) = margins {
        let choice = json_codes(&read(m)?, alphabet).map_err(with_file(m))?;
        let poly = atlas::build_sfmi_polytope(alphabet, pairs, &choice, &pairing)?;
        let v = json::sfmi_polytope_json(&poly, u);
        emit(o, out, &v, || polytope_table(&v))?;
        return Ok(if poly.structure_violations().is_empty() {
            EXIT_OK
        } else {
            EXIT_VERIFY_FAILED
        });
    }
    let atlas = atlas::build_sfmi_atlas(alphabet, pairs, &pairing)?;
    let v = json::atlas_json(&atlas, u);
    let shown = match file {
        Some(path) => {
            let text = serde_json::to_string_pretty(&v).expect("serializable");
            std::fs::write(path, text + "\n")
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            json!({"summary": v["summary"], "written": path.display().to_string()})
        }
        None => v.clone(),
    };
    emit(o, out, &shown, || {
        let mut s = summary_table(&v["summary"]);
        if file.is_none() {
            for (k, p) in v["polytopes"].as_array().into_iter().flatten().enumerate() {
                s.push_str(&format!("\npolytope {k}\n"));
                s.push_str(&polytope_table(p));
            }
        }
        s
    })?;
    Ok(if atlas.violations().is_empty() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn summary_table(summary: &Value) -> String {
    let mut s = String::from("summary\n");
    for (k, v) in summary.as_object().into_iter().flatten() {
        s.push_str(&format!("  {k:<36} {v}\n"));
    }
    s
}

fn polytope_table(p: &Value) -> String {
    let mut s = format!(
        "  margins   {}\n  support   {}\n  dimension {}  vertices {}  code vertices {:?}\n",
        p["margin_choice"],
        p["support"],
        p["affine_dimension"],
        p["vertex_count"],
        p["code_vertices"].to_string()
    );
    for (i, v) in p["vertices"].as_array().into_iter().flatten().enumerate() {
        let tag = if v["code_vertex"].as_bool() == Some(true) {
            "code"
        } else {
            "    "
        };
        s.push_str(&format!("    v{i:<3} {tag} {}\n", v["weights"]));
    }
    s.push_str(&format!(
        "  simplices {}\n  centroid  {}\n",
        p["simplices"], p["centroid"]
    ));
    s
}

fn json_codes(v: &Value, alphabet: usize) -> Result<Vec<codes::Code>> {
    v.as_array()
        .ok_or_else(|| Error::parse("margins", "expected an array of codes"))?
        .iter()
        .enumerate()
        .map(|(i, c)| json::parse_code(c, alphabet, &format!("margins[{i}]")))
        .collect()
}

fn cmd_verify(name: Option<&str>, all: bool, list: bool, o: &Output, out: &mut dyn Write) -> Result<i32> {
    if list {
        let reg = scenarios::registry();
        let v = json!(reg
            .iter()
            .map(|s| json!({"name": s.name, "kind": s.kind, "description": s.description}))
            .collect::<Vec<_>>());
        emit(o, out, &v, || {
            reg.iter()
                .map(|s| format!("{:<26} {}\n", s.name, s.description))
                .collect()
        })?;
        return Ok(EXIT_OK);
    }
    let selected = match (name, all) {
        (Some(n), _) => vec![scenarios::find(n)?],
        (None, true) => scenarios::registry(),
        (None, false) => {
            return Err(Error::InvalidArgument(
                "verify needs --scenario NAME, --all or --list".into(),
            ))
        }
    };
    let reports = selected.iter().map(scenarios::run).collect::<Result<Vec<_>>>()?;
    let missing: Vec<&str> = if all {
        ops::missing().iter().map(|op| op.name()).collect()
    } else {
        Vec::new()
    };
    let passed = reports.iter().all(|r| r.passed()) && missing.is_empty();
    let mut v = json!({
        "passed": passed,
        "scenarios": reports.iter().map(|r| json!({
            "name": r.name,
            "passed": r.passed(),
            "checks": r.checks.iter().map(|c| json!({"label": c.label, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    if all {
        v["op_coverage"] = json!({"total": ops::Op::ALL.len(), "missing": missing});
    }
    emit(o, out, &v, || {
        let mut s = String::new();
        for r in &reports {
            s.push_str(&format!(
                "{} {} ({} checks)\n",
                if r.passed() { "PASS" } else { "FAIL" },
                r.name,
                r.checks.len()
            ));
            for c in &r.checks {
                s.push_str(&format!("  [{}] {}", if c.passed { "ok" } else { "FAILED" }, c.label));
                if !c.detail.is_empty() {
                    s.push_str(&format!(": {}", c.detail));
                }
                s.push('\n');
            }
        }
        if all {
            s.push_str(&format!(
                "op coverage: {} of {} operations exercised",
                ops::Op::ALL.len() - missing.len(),
                ops::Op::ALL.len()
            ));
            if !missing.is_empty() {
                s.push_str(&format!(" (missing: {})", missing.join(", ")));
            }
            s.push('\n');
        }
        s
    })?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn exact_maximizers(measure: &Measure, space: &StateSpace) -> Result<Option<atlas::MaximizerSet>> {
    let alphabet = space.homogeneous_cardinality().unwrap_or(0);
    let attempt = match measure {
        Measure::MultiInformation | Measure::Fmi => atlas::enumerate_i_maximizers(alphabet, space.n()),
        Measure::ILambda(fam) if family::is_connected_covering(fam).is_connected() => {
            atlas::enumerate_i_maximizers(alphabet, space.n())
        }
        Measure::BlockMutualInformation(split) if split == &BlockSplit::halves(space.n())? => {
            atlas::enumerate_block_mi_maximizers(alphabet, space.n() / 2)
        }
        _ => return Ok(None),
    };
    match attempt {
        Ok(set) => Ok(Some(set)),
        Err(e) if e.is_cap_exceeded() => Ok(None),
        Err(e) => Err(e),
    }
}

fn cmd_optimize(
    name: MeasureName,
    alphabet: usize,
    n: usize,
    config: Option<&Path>,
    inputs: &MeasureInputs,
    o: &Output,
    out: &mut dyn Write,
) -> Result<i32> {
    let cfg = match config {
        Some(p) => json::parse_config(&read(p)?).map_err(with_file(p))?,
        None => SearchConfig::default(),
    };
    let space = StateSpace::homogeneous(n, alphabet)?;
    let measure = build_measure(name, n, inputs)?;
    let maximizers = exact_maximizers(&measure, &space)?;
    let result = search::maximize_measure(&measure, &space, &cfg, maximizers.as_ref())?;
    let u = o.units;
    let mut v = json::search_result_json(&result, u);
    v["known_maximum"] = measure
        .known_maximum(&space)
        .map_or(Value::Null, |m| float(u.convert(m)));
    v["config"] = serde_json::to_value(&cfg).expect("serializable");
    if let (Some(set), Some(m)) = (&maximizers, &result.matched_maximizer) {
        v["matched_maximizer"]["distribution"] = json::distribution_summary(&set.distributions[m.index]);
        v["matched_maximizer"]["kind"] = json!(set.kind.name());
    }
    emit(o, out, &v, || {
        let mut s = format!(
            "{} best value {} {} (restart {}), known maximum {}\n",
            result.measure,
            fmt(u.convert(result.best_value)),
            u.name(),
            result.best_restart,
            v["known_maximum"]
        );
        if let Some(m) = &result.matched_maximizer {
            s.push_str(&format!(
                "nearest exact maximizer: #{} at TV {}  {}\n",
                m.index,
                fmt(m.total_variation),
                v["matched_maximizer"]["distribution"]
            ));
        }
        s.push_str("restart  initial          final            iterations  termination\n");
        for r in &result.restarts {
            s.push_str(&format!(
                "{:<8} {:<16} {:<16} {:<11} {:?}\n",
                r.restart,
                fmt(u.convert(r.initial_value)),
                fmt(u.convert(r.final_value)),
                r.iterations,
                r.termination
            ));
        }
        s
    })?;
    Ok(EXIT_OK)
}

fn cmd_codes(
    alphabet: usize,
    length: usize,
    partitions: bool,
    matchings: bool,
    o: &Output,
    out: &mut dyn Write,
) -> Result<i32> {
    let all: Vec<codes::Code> = codes::enumerate_max_distance_codes(alphabet, length)?.collect();
    let cyclic = codes::partition_into_codes(alphabet, length)?;
    let mut v = json!({
        "alphabet": alphabet,
        "length": length,
        "code_count": all.len(),
        "codes": all.iter().map(json::code_json).collect::<Vec<_>>(),
        "cyclic_partition": json::partition_json(&cyclic),
    });
    if partitions {
        let family: Vec<_> = codes::enumerate_all_partitions(alphabet, length)?.collect();
        v["partition_count"] = json!(family.len());
        v["partitions"] = Value::Array(family.iter().map(json::partition_json).collect());
    }
    if matchings {
        v["matchings"] = json!(codes::bipartite_matchings_partition(alphabet)?);
    }
    emit(o, out, &v, || {
        let mut s = format!(
            "{} maximum-distance codes of {alphabet} words, length {length}\n",
            all.len()
        );
        for c in &all {
            s.push_str(&format!("  {}\n", c.to_strings().join(" ")));
        }
        s.push_str("cyclic partition\n");
        for c in cyclic.parts() {
            s.push_str(&format!("  {}\n", c.to_strings().join(" ")));
        }
        if let Some(ps) = v["partitions"].as_array() {
            s.push_str(&format!("{} coset partitions\n", ps.len()));
            for (i, part) in ps.iter().enumerate() {
                s.push_str(&format!("  #{i}: {part}\n"));
            }
        }
        if let Some(ms) = v["matchings"].as_array() {
            s.push_str(&format!(
                "{} perfect matchings of K_{{{alphabet},{alphabet}}}\n",
                ms.len()
            ));
            for m in ms {
                s.push_str(&format!("  {m}\n"));
            }
        }
        s
    })?;
    Ok(EXIT_OK)
}

fn cmd_polytope(
    alphabet: usize,
    family_path: &Path,
    margins_path: &Path,
    o: &Output,
    out: &mut dyn Write,
) -> Result<i32> {
    let fam = json::parse_family(&read(family_path)?).map_err(with_file(family_path))?;
    let space = StateSpace::homogeneous(fam.n(), alphabet)?;
    let raw = read(margins_path)?;
    let entries = raw
        .as_array()
        .ok_or_else(|| Error::parse(format!("{}: margins", margins_path.display()), "expected an array"))?;
    let margins = entries
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let field = format!("margins[{i}]");
            let d = if m.is_array() {
                atlas::code_distribution(&json::parse_code(m, alphabet, &field)?)
            } else {
                json::parse_distribution(m).map_err(|e| match e {
                    Error::Parse { field: inner, message } => Error::parse(format!("{field}.{inner}"), message),
                    other => other,
                })
            };
            d.map_err(with_file(margins_path))
        })
        .collect::<Result<Vec<_>>>()?;
    let report = polytope::margin_specified_polytope(&space, &fam, &margins)?;
    let mut v = json::polytope_report_json(&report, &space);
    v["family"] = json::family_json(&fam);
    v["vertex_distributions"] = Value::Array(
        report
            .vertices
            .iter()
            .map(|x| {
                polytope::vertex_distribution(&space, &report.column_labels, x).map(|d| json::distribution_summary(&d))
            })
            .collect::<Result<_>>()?,
    );
    emit(o, out, &v, || {
        let mut s = format!(
            "columns {}\nrank {}  affine dimension {}  kernel dimension {}\n",
            v["columns"], v["rank"], v["affine_dimension"], v["kernel_dimension"]
        );
        if report.is_empty {
            s.push_str("no distribution has these margins\n");
        }
        for (i, d) in v["vertex_distributions"].as_array().into_iter().flatten().enumerate() {
            s.push_str(&format!("  v{i:<3} {d}\n"));
        }
        s
    })?;
    Ok(EXIT_OK)
}
