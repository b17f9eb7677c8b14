//! Exponentiated-gradient ascent of the information measures over the
//! interior of the probability simplex, with random restarts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atlas::{self, total_variation, MaximizerSet};
use crate::dist::{entropy_of, marginalize_f64, BlockSplit, Distribution, Rational, StateSpace};
use crate::error::{Error, Result};
use crate::family::{self, Covering, MarginFamily, Pairing};
use crate::ops::{self, Op};
use crate::polytope;

/// Smallest probability an iterate may hold.
pub const PROBABILITY_FLOOR: f64 = 1e-300;
/// Step halvings tried before a restart is declared stalled.
pub const MAX_HALVINGS: u32 = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_size: f64,
    pub convergence_tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 50,
            max_iterations: 5000,
            step_size: 0.5,
            convergence_tol: 1e-9,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidArgument(
                "restarts and max_iterations must be positive".into(),
            ));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidArgument("step_size must be positive".into()));
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol.is_finite()) {
            return Err(Error::InvalidArgument("convergence_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Measure {
    MultiInformation,
    BlockMutualInformation(BlockSplit),
    ILambda(MarginFamily),
    Fmi,
    Sfmi(Pairing),
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::MultiInformation => "I",
            Measure::BlockMutualInformation(_) => "MI",
            Measure::ILambda(_) => "I_lambda",
            Measure::Fmi => "FMI",
            Measure::Sfmi(_) => "SFMI",
        }
    }

    /// Evaluates through the library measures (not the compiled objective).
    pub fn evaluate(&self, p: &Distribution) -> Result<f64> {
        match self {
            Measure::MultiInformation => Ok(crate::dist::multi_information(p)),
            Measure::BlockMutualInformation(split) => crate::dist::block_mutual_information(p, split),
            Measure::ILambda(fam) => family::i_lambda(p, fam),
            Measure::Fmi => family::fmi(p),
            Measure::Sfmi(pairing) => family::sfmi(p, pairing),
        }
    }

    /// Known maximum on a homogeneous space.
    pub fn known_maximum(&self, space: &StateSpace) -> Option<f64> {
        let log_n = (space.homogeneous_cardinality()? as f64).ln();
        let n = space.n() as f64;
        Some(match self {
            Measure::MultiInformation => (n - 1.0) * log_n,
            Measure::BlockMutualInformation(split) => split.x_block().len().min(split.y_block().len()) as f64 * log_n,
            Measure::ILambda(fam) => {
                fam.sets().iter().map(|s| s.len() as f64 - 1.0).sum::<f64>() / fam.len() as f64 * log_n
            }
            Measure::Fmi | Measure::Sfmi(_) => log_n,
        })
    }
}

/// One `Σ_g H(p_g) − H(p_U)` term of an objective.
#[derive(Clone, Debug)]
struct Term {
    weight: f64,
    union: Vec<usize>,
    union_size: usize,
    groups: Vec<(Vec<usize>, usize)>,
}

/// A measure compiled against one space: every term carries the joint-to-
/// margin index maps, so value and gradient are plain slice loops.
#[derive(Clone, Debug)]
pub struct Objective {
    space: StateSpace,
    terms: Vec<Term>,
}

impl Objective {
    pub fn new(measure: &Measure, space: &StateSpace) -> Result<Self> {
        let n = space.n();
        let all: Vec<usize> = (0..n).collect();
        let singletons = |set: &[usize]| -> Vec<Vec<usize>> { set.iter().map(|&i| vec![i]).collect() };
        let mut spec: Vec<(f64, Vec<usize>, Vec<Vec<usize>>)> = Vec::new();
        match measure {
            Measure::MultiInformation => spec.push((1.0, all.clone(), singletons(&all))),
            Measure::BlockMutualInformation(split) => {
                if split.n() != n {
                    return Err(Error::InvalidSplit(format!(
                        "split is for {} variables, space has {n}",
                        split.n()
                    )));
                }
                spec.push((
                    1.0,
                    all.clone(),
                    vec![split.x_block().to_vec(), split.y_block().to_vec()],
                ));
            }
            Measure::ILambda(fam) => {
                if fam.is_empty() {
                    return Err(Error::InvalidFamily("family is empty".into()));
                }
                if fam.n() != n {
                    return Err(Error::SpaceMismatch(format!(
                        "family over {} variables, space has {n}",
                        fam.n()
                    )));
                }
                let w = 1.0 / fam.len() as f64;
                spec.extend(
                    fam.sets()
                        .iter()
                        .filter(|s| s.len() > 1)
                        .map(|s| (w, s.clone(), singletons(s))),
                );
            }
            Measure::Fmi => {
                if n < 2 {
                    return Err(Error::InvalidArgument("FMI needs at least two variables".into()));
                }
                return Objective::new(&Measure::ILambda(MarginFamily::all_pairs(n)?), space);
            }
            Measure::Sfmi(pairing) => {
                if n != 2 * pairing.n() || space.homogeneous_cardinality().is_none() {
                    return Err(Error::InvalidPairing(format!(
                        "SFMI with {} pairs needs {} variables of one cardinality",
                        pairing.n(),
                        2 * pairing.n()
                    )));
                }
                return Objective::new(&Measure::ILambda(MarginFamily::from_pairing(pairing)), space);
            }
        }
        let terms = spec
            .into_iter()
            .map(|(weight, union, groups)| {
                Ok(Term {
                    weight,
                    union_size: space.subspace(&union)?.total(),
                    union: space.projection(&union)?,
                    groups: groups
                        .iter()
                        .map(|g| Ok((space.projection(g)?, space.subspace(g)?.total())))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Objective {
            space: space.clone(),
            terms,
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Value at a nonnegative vector (no renormalization).
    pub fn value(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let groups: f64 = t
                    .groups
                    .iter()
                    .map(|(proj, size)| entropy_of(&marginalize_f64(p, proj, *size)))
                    .sum();
                t.weight * (groups - entropy_of(&marginalize_f64(p, &t.union, t.union_size)))
            })
            .sum()
    }

    /// Gradient of [`Objective::value`] in the ambient coordinates; every
    /// entry of `p` must be positive.
    pub fn gradient(&self, p: &[f64]) -> Result<Vec<f64>> {
        if let Some(i) = p.iter().position(|&x| x.is_nan() || x <= 0.0) {
            return Err(Error::NotInterior(i));
        }
        let mut grad = vec![0.0; p.len()];
        for t in &self.terms {
            let pu = marginalize_f64(p, &t.union, t.union_size);
            let logs: Vec<Vec<f64>> = t
                .groups
                .iter()
                .map(|(proj, size)| marginalize_f64(p, proj, *size).iter().map(|v| v.ln()).collect())
                .collect();
            let constant = t.groups.len() as f64 - 1.0;
            for (x, g) in grad.iter_mut().enumerate() {
                let mut v = pu[t.union[x]].ln() - constant;
                for ((proj, _), lg) in t.groups.iter().zip(&logs) {
                    v -= lg[proj[x]];
                }
                *g += t.weight * v;
            }
        }
        Ok(grad)
    }
}

/// `log(p(x) / Π_i p_i(x_i)) − (n−1)` at an interior point.
pub fn multi_information_gradient(p: &Distribution) -> Result<Vec<f64>> {
    ops::record(Op::MultiInformationGradient);
    Objective::new(&Measure::MultiInformation, p.space())?.gradient(&p.probabilities())
}

pub fn measure_gradient(measure: &Measure, p: &Distribution) -> Result<Vec<f64>> {
    Objective::new(measure, p.space())?.gradient(&p.probabilities())
}

/// Norm of the gradient projected on the simplex tangent, in the metric of `p`.
fn tangent_norm(p: &[f64], grad: &[f64]) -> f64 {
    let mean: f64 = p.iter().zip(grad).map(|(a, g)| a * g).sum();
    p.iter()
        .zip(grad)
        .map(|(a, g)| a * (g - mean) * (g - mean))
        .sum::<f64>()
        .sqrt()
}

fn normalize_with_floor(p: &mut [f64]) {
    for _ in 0..2 {
        let total: f64 = p.iter().sum();
        for v in p.iter_mut() {
            *v = (*v / total).max(PROBABILITY_FLOOR);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    IterationCap,
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub initial_value: f64,
    pub final_value: f64,
    /// Largest value among all iterates, including rejected trial points.
    pub max_observed_value: f64,
    pub iterations: usize,
    pub halvings: u64,
    pub final_gradient_norm: f64,
    pub termination: Termination,
    /// Every accepted iterate was at least as good as its predecessor.
    pub monotone: bool,
    /// Largest deviation of an iterate's mass from 1.
    pub max_normalization_error: f64,
    #[serde(skip)]
    pub final_point: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximizerMatch {
    pub index: usize,
    pub total_variation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub measure: &'static str,
    pub best_value: f64,
    pub best_point: Distribution,
    pub best_restart: usize,
    pub restarts: Vec<RestartSummary>,
    pub matched_maximizer: Option<MaximizerMatch>,
}

impl SearchResult {
    pub fn per_restart_values(&self) -> Vec<f64> {
        self.restarts.iter().map(|r| r.final_value).collect()
    }

    pub fn max_observed_value(&self) -> f64 {
        self.restarts
            .iter()
            .map(|r| r.max_observed_value)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed ^ (restart as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Uniform draw from the simplex (symmetric Dirichlet with unit weights).
fn dirichlet_start(size: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p: Vec<f64> = (0..size).map(|_| Exp1.sample(rng)).collect();
    normalize_with_floor(&mut p);
    p
}

fn run_restart(objective: &Objective, cfg: &SearchConfig, restart: usize) -> RestartSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.seed, restart));
    let mut p = dirichlet_start(objective.space().total(), &mut rng);
    let mut value = objective.value(&p);
    let initial_value = value;
    let mut max_observed = value;
    let mut halvings = 0u64;
    let mut monotone = true;
    let mut max_norm_err = (p.iter().sum::<f64>() - 1.0).abs();
    let mut termination = Termination::IterationCap;
    let mut norm = f64::NAN;
    let mut iterations = 0;
    let mut trial = vec![0.0; p.len()];

    while iterations < cfg.max_iterations {
        let grad = objective.gradient(&p).expect("iterates stay above the floor");
        norm = tangent_norm(&p, &grad);
        if norm < cfg.convergence_tol {
            termination = Termination::Converged;
            break;
        }
        let top = grad.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut step = cfg.step_size;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            for ((t, a), g) in trial.iter_mut().zip(&p).zip(&grad) {
                *t = a * (step * (g - top)).exp();
            }
            normalize_with_floor(&mut trial);
            let v = objective.value(&trial);
            max_observed = max_observed.max(v);
            if v >= value {
                accepted = true;
                break;
            }
            step *= 0.5;
            halvings += 1;
        }
        iterations += 1;
        if !accepted {
            termination = Termination::Stalled;
            break;
        }
        let v = objective.value(&trial);
        monotone &= v >= value;
        value = v;
        std::mem::swap(&mut p, &mut trial);
        max_norm_err = max_norm_err.max((p.iter().sum::<f64>() - 1.0).abs());
    }

    RestartSummary {
        restart,
        initial_value,
        final_value: value,
        max_observed_value: max_observed,
        iterations,
        halvings,
        final_gradient_norm: norm,
        termination,
        monotone,
        max_normalization_error: max_norm_err,
        final_point: p,
    }
}

pub fn maximize_measure(
    measure: &Measure,
    space: &StateSpace,
    cfg: &SearchConfig,
    maximizers: Option<&MaximizerSet>,
) -> Result<SearchResult> {
    ops::record(Op::MaximizeMeasure);
    cfg.validate()?;
    let objective = Objective::new(measure, space)?;
    let restarts: Vec<RestartSummary> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(&objective, cfg, r))
        .collect();
    let best = restarts
        .iter()
        .max_by(|a, b| a.final_value.total_cmp(&b.final_value).then(b.restart.cmp(&a.restart)))
        .expect("at least one restart");
    let best_point = Distribution::from_float(space.clone(), best.final_point.clone())?;
    let matched_maximizer = maximizers
        .and_then(|set| set.nearest(&best_point))
        .map(|(index, tv)| MaximizerMatch {
            index,
            total_variation: tv,
        });
    Ok(SearchResult {
        measure: measure.name(),
        best_value: objective.value(&best.final_point),
        best_restart: best.restart,
        best_point,
        restarts,
        matched_maximizer,
    })
}

/// A point of maximal `I_Λ` whose multi-information is below the maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub distribution: Distribution,
    pub i_lambda: f64,
    pub multi_information: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringReport {
    pub alphabet: usize,
    pub n: usize,
    pub family: MarginFamily,
    pub covering: Covering,
    pub max_i_lambda: f64,
    pub max_multi_information: f64,
    pub maximizer_count: usize,
    /// Runs whose final value is within 1e-6 of the maximum.
    pub runs_at_max: usize,
    /// Of those, runs within TV 1e-3 of an enumerated maximizer.
    pub runs_matched: usize,
    pub worst_match_distance: f64,
    pub witness: Option<Witness>,
    pub passed: bool,
}

const AT_MAX_TOL: f64 = 1e-6;
const MATCH_TV: f64 = 1e-3;

/// Checks numerically (connected families) or exhibits an exact witness
/// (otherwise) that the `I_Λ` maximizers coincide with the `I` maximizers
/// exactly when `Λ` is a connected covering.
pub fn verify_theorem_fmi(alphabet: usize, n: usize, fam: &MarginFamily, cfg: &SearchConfig) -> Result<CoveringReport> {
    ops::record(Op::VerifyTheoremFmi);
    let space = StateSpace::homogeneous(n, alphabet)?;
    if space.total() > 64 {
        return Err(Error::CapExceeded {
            what: "covering check state count",
            cap: 64,
            required: space.total() as u128,
        });
    }
    let measure = Measure::ILambda(fam.clone());
    let max_i_lambda = measure.known_maximum(&space).expect("homogeneous");
    let max_i = Measure::MultiInformation.known_maximum(&space).expect("homogeneous");
    let maximizers = atlas::enumerate_i_maximizers(alphabet, n)?;
    let covering = family::is_connected_covering(fam);

    let mut report = CoveringReport {
        alphabet,
        n,
        family: fam.clone(),
        covering: covering.clone(),
        max_i_lambda,
        max_multi_information: max_i,
        maximizer_count: maximizers.len(),
        runs_at_max: 0,
        runs_matched: 0,
        worst_match_distance: 0.0,
        witness: None,
        passed: false,
    };

    if covering.is_connected() {
        let result = maximize_measure(&measure, &space, cfg, Some(&maximizers))?;
        let targets: Vec<Vec<f64>> = maximizers
            .distributions
            .iter()
            .map(Distribution::probabilities)
            .collect();
        for run in result
            .restarts
            .iter()
            .filter(|r| (r.final_value - max_i_lambda).abs() < AT_MAX_TOL)
        {
            report.runs_at_max += 1;
            let tv = targets
                .iter()
                .map(|t| total_variation(&run.final_point, t))
                .fold(f64::INFINITY, f64::min);
            report.worst_match_distance = report.worst_match_distance.max(tv);
            if tv < MATCH_TV {
                report.runs_matched += 1;
            }
        }
        report.passed = report.runs_at_max > 0 && report.runs_matched == report.runs_at_max;
    } else {
        report.witness = disconnected_witness(&space, fam, &maximizers, max_i)?;
        report.passed = report
            .witness
            .as_ref()
            .is_some_and(|w| (w.i_lambda - max_i_lambda).abs() < 1e-10 && w.multi_information < max_i - 1e-9);
    }
    Ok(report)
}

/// Fixes every margin to an exact maximizer and searches the resulting
/// polytope for a point with sub-maximal multi-information: first the
/// average of all vertices, then pairwise vertex midpoints.
fn disconnected_witness(
    space: &StateSpace,
    fam: &MarginFamily,
    maximizers: &MaximizerSet,
    max_i: f64,
) -> Result<Option<Witness>> {
    let alphabet = maximizers.alphabet;
    let margins: Vec<Distribution> = fam
        .sets()
        .iter()
        .map(|set| {
            if set.len() == 1 {
                Ok(Distribution::uniform(StateSpace::homogeneous(1, alphabet)?))
            } else {
                Ok(atlas::enumerate_i_maximizers(alphabet, set.len())?
                    .distributions
                    .swap_remove(0))
            }
        })
        .collect::<Result<_>>()?;
    let report = polytope::margin_specified_polytope(space, fam, &margins)?;
    let vertices = &report.vertices;
    if vertices.is_empty() {
        return Ok(None);
    }
    let average = |points: &[&Vec<Rational>]| -> Vec<Rational> {
        let count = Rational::from_integer(points.len().into());
        (0..points[0].len())
            .map(|c| points.iter().map(|p| &p[c]).sum::<Rational>() / &count)
            .collect()
    };
    let mut candidates = vec![average(&vertices.iter().collect::<Vec<_>>())];
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            candidates.push(average(&[a, b]));
        }
    }
    for c in candidates {
        let p = polytope::vertex_distribution(space, &report.column_labels, &c)?;
        let float = p.to_float();
        let multi_information = crate::dist::multi_information(&float);
        if multi_information < max_i - 1e-9 {
            return Ok(Some(Witness {
                i_lambda: family::i_lambda(&float, fam)?,
                multi_information,
                distribution: p,
            }));
        }
    }
    Ok(None)
}
