//! Exact maximizer sets of multi-information and block MI, and the atlas of
//! SFMI transportation polytopes.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::Zero;
use rayon::prelude::*;

use crate::codes::{self, checked_pow, factorial, permutations_lex, Code};
use crate::dist::{self, BlockSplit, Distribution, Rational, StateSpace};
use crate::error::{Error, Result};
use crate::family::{self, MarginFamily, Pairing};
use crate::ops::{self, Op};
use crate::polytope::{self, affine_span_dimension, ConstraintSystem, PolytopeReport};

/// Default cap on block-MI maximizers (`(N^n)!`).
pub const DEFAULT_BLOCK_CAP: u128 = 100_000;
/// Default cap on the number of SFMI polytopes (`N!^n`).
pub const DEFAULT_POLYTOPE_CAP: u128 = 10_000;
/// Default cap on the support size of one SFMI polytope (`N^n`).
pub const DEFAULT_SUPPORT_CAP: u128 = 64;

const VALUE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MaximizerKind {
    MultiInformation,
    BlockMi,
}

impl MaximizerKind {
    pub fn name(self) -> &'static str {
        match self {
            MaximizerKind::MultiInformation => "multi_information",
            MaximizerKind::BlockMi => "block_MI",
        }
    }
}

/// Exact maximizers of one measure on a homogeneous space.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximizerSet {
    pub kind: MaximizerKind,
    pub alphabet: usize,
    /// Variables for multi-information, pairs for block MI.
    pub n: usize,
    pub distributions: Vec<Distribution>,
}

impl MaximizerSet {
    pub fn len(&self) -> usize {
        self.distributions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distributions.is_empty()
    }

    pub fn space(&self) -> StateSpace {
        let vars = match self.kind {
            MaximizerKind::MultiInformation => self.n,
            MaximizerKind::BlockMi => 2 * self.n,
        };
        StateSpace::homogeneous(vars, self.alphabet).expect("validated on construction")
    }

    /// `(n−1) log N` or `n log N`.
    pub fn max_value(&self) -> f64 {
        let log_n = (self.alphabet as f64).ln();
        match self.kind {
            MaximizerKind::MultiInformation => (self.n as f64 - 1.0) * log_n,
            MaximizerKind::BlockMi => self.n as f64 * log_n,
        }
    }

    /// Exact membership.
    pub fn contains(&self, p: &Distribution) -> bool {
        self.distributions.iter().any(|q| q == p)
    }

    /// Member closest to `p` in total variation.
    pub fn nearest(&self, p: &Distribution) -> Option<(usize, f64)> {
        let probs = p.probabilities();
        self.distributions
            .iter()
            .enumerate()
            .map(|(i, q)| (i, total_variation(&probs, &q.probabilities())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn weight_set(&self) -> BTreeSet<Vec<Rational>> {
        self.distributions.iter().filter_map(exact_key).collect()
    }
}

fn exact_key(p: &Distribution) -> Option<Vec<Rational>> {
    p.exact_weights().map(<[Rational]>::to_vec)
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Uniform distribution on the words of `code`.
pub fn code_distribution(code: &Code) -> Result<Distribution> {
    let space = StateSpace::homogeneous(code.length(), code.alphabet())?;
    let states: Vec<usize> = code.words().iter().map(|w| space.encode(w)).collect::<Result<_>>()?;
    Distribution::uniform_on(space, &states)
}

pub fn enumerate_i_maximizers(alphabet: usize, n: usize) -> Result<MaximizerSet> {
    enumerate_i_maximizers_capped(alphabet, n, codes::DEFAULT_CODE_CAP)
}

/// Uniform distributions on the `N!^{n−1}` max-distance codes.
pub fn enumerate_i_maximizers_capped(alphabet: usize, n: usize, cap: u128) -> Result<MaximizerSet> {
    ops::record(Op::EnumerateIMaximizers);
    if n < 2 {
        return Err(Error::InvalidArgument("multi-information maximizers need n ≥ 2".into()));
    }
    let distributions = codes::enumerate_max_distance_codes_capped(alphabet, n, cap)?
        .map(|c| code_distribution(&c))
        .collect::<Result<_>>()?;
    Ok(MaximizerSet {
        kind: MaximizerKind::MultiInformation,
        alphabet,
        n,
        distributions,
    })
}

pub fn enumerate_block_mi_maximizers(alphabet: usize, pairs: usize) -> Result<MaximizerSet> {
    enumerate_block_mi_maximizers_capped(alphabet, pairs, DEFAULT_BLOCK_CAP)
}

/// Uniform distributions on `{(x, ρ(x))}` for every permutation `ρ` of the
/// `N^n` block states.
pub fn enumerate_block_mi_maximizers_capped(alphabet: usize, pairs: usize, cap: u128) -> Result<MaximizerSet> {
    ops::record(Op::EnumerateBlockMiMaximizers);
    if alphabet < 2 || pairs < 1 {
        return Err(Error::InvalidArgument(
            "block MI maximizers need N ≥ 2 and n ≥ 1".into(),
        ));
    }
    let block = checked_pow(alphabet as u128, pairs);
    let required = if block > 64 {
        u128::MAX
    } else {
        factorial(block as usize)
    };
    if required > cap {
        return Err(Error::CapExceeded {
            what: "block MI maximizer enumeration",
            cap,
            required,
        });
    }
    let block = block as usize;
    let space = StateSpace::homogeneous(2 * pairs, alphabet)?;
    let distributions = permutations_lex(block)
        .into_par_iter()
        .map(|rho| {
            let states: Vec<usize> = (0..block).map(|x| x * block + rho[x]).collect();
            Distribution::uniform_on(space.clone(), &states)
        })
        .collect::<Result<_>>()?;
    Ok(MaximizerSet {
        kind: MaximizerKind::BlockMi,
        alphabet,
        n: pairs,
        distributions,
    })
}

/// Exact test: uniform on `N` states that pairwise differ in every coordinate.
pub fn is_i_maximizer(p: &Distribution) -> Result<bool> {
    ops::record(Op::IsIMaximizer);
    let weights = p.exact_weights().ok_or(Error::ExactRequired("maximizer membership"))?;
    let space = p.space();
    let alphabet = space
        .homogeneous_cardinality()
        .ok_or_else(|| Error::InvalidSpace("maximizer membership needs a homogeneous space".into()))?;
    let support = p.support();
    if support.len() != alphabet {
        return Ok(false);
    }
    let mass = &weights[support[0]];
    if support.iter().any(|&s| &weights[s] != mass) {
        return Ok(false);
    }
    let states: Vec<Vec<usize>> = support.iter().map(|&s| space.decode(s)).collect();
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            if codes::hamming_distance(a, b)? != space.n() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One transportation polytope of SFMI maximizers: the distributions on
/// `2n` variables whose pair margins `(X_i, Y_π(i))` are the chosen codes.
#[derive(Clone, Debug)]
pub struct SfmiPolytope {
    pub alphabet: usize,
    pub n: usize,
    /// One length-2 code per pair.
    pub margin_choice: Vec<Code>,
    pub pairing: Pairing,
    /// Joint state indices on `2n` variables, increasing.
    pub support: Vec<usize>,
    pub system: ConstraintSystem,
    pub report: PolytopeReport,
    /// Indices into `report.vertices`.
    pub code_vertices: Vec<usize>,
    /// Each simplex as indices into `report.vertices`.
    pub simplices: Vec<Vec<usize>>,
    pub centroid: Distribution,
}

impl SfmiPolytope {
    pub fn space(&self) -> StateSpace {
        StateSpace::homogeneous(2 * self.n, self.alphabet).expect("validated on build")
    }

    pub fn vertex_distribution(&self, index: usize) -> Distribution {
        polytope::vertex_distribution(&self.space(), &self.report.column_labels, &self.report.vertices[index])
            .expect("vertices are distributions")
    }

    pub fn vertex_distributions(&self) -> Vec<Distribution> {
        (0..self.report.vertices.len())
            .map(|i| self.vertex_distribution(i))
            .collect()
    }

    pub fn expected_dimension(&self) -> usize {
        let (alphabet, n) = (self.alphabet, self.n);
        alphabet.pow(n as u32) - 1 - n * (alphabet - 1)
    }

    fn vertex_support(&self, index: usize) -> Vec<usize> {
        let v = &self.report.vertices[index];
        (0..v.len())
            .filter(|&c| !v[c].is_zero())
            .map(|c| self.report.column_labels[c])
            .collect()
    }

    /// Every structural property the construction should satisfy, as a list
    /// of human-readable failures (empty when all hold).
    pub fn structure_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let (alphabet, n) = (self.alphabet, self.n);
        let support_size = alphabet.pow(n as u32);
        if self.support.len() != support_size {
            out.push(format!(
                "support has {} states, expected {support_size}",
                self.support.len()
            ));
        }
        if self.report.affine_dimension != self.expected_dimension() {
            out.push(format!(
                "affine dimension {}, expected {}",
                self.report.affine_dimension,
                self.expected_dimension()
            ));
        }
        let expected_codes = checked_pow(factorial(alphabet), n - 1);
        if self.code_vertices.len() as u128 != expected_codes {
            out.push(format!(
                "{} code vertices, expected {expected_codes}",
                self.code_vertices.len()
            ));
        }
        let expected_simplices = checked_pow(factorial(alphabet - 1), n - 1);
        if self.simplices.len() as u128 != expected_simplices {
            out.push(format!(
                "{} simplices, expected {expected_simplices}",
                self.simplices.len()
            ));
        }
        let simplex_size = alphabet.pow(n as u32 - 1);
        let codes: HashSet<usize> = self.code_vertices.iter().copied().collect();
        for (k, simplex) in self.simplices.iter().enumerate() {
            if simplex.len() != simplex_size {
                out.push(format!(
                    "simplex {k} has {} vertices, expected {simplex_size}",
                    simplex.len()
                ));
                continue;
            }
            if simplex.iter().any(|v| !codes.contains(v)) {
                out.push(format!("simplex {k} contains a non-code vertex"));
            }
            let mut seen = HashSet::new();
            if !simplex
                .iter()
                .flat_map(|&v| self.vertex_support(v))
                .all(|s| seen.insert(s))
            {
                out.push(format!("simplex {k} has overlapping vertex supports"));
            }
            let points: Vec<Vec<Rational>> = simplex.iter().map(|&v| self.report.vertices[v].clone()).collect();
            if affine_span_dimension(&points) + 1 != simplex.len() {
                out.push(format!("simplex {k} is not affinely independent"));
            }
            let count = Rational::from_integer(simplex.len().into());
            let centroid: Vec<Rational> = (0..self.support.len())
                .map(|c| points.iter().map(|p| &p[c]).sum::<Rational>() / &count)
                .collect();
            let centroid = polytope::vertex_distribution(&self.space(), &self.report.column_labels, &centroid)
                .expect("average of vertices");
            if centroid != self.centroid {
                out.push(format!("simplex {k} centroid differs from the polytope centroid"));
            }
        }
        if self.centroid.support().len() != support_size {
            out.push("centroid support is not the full polytope support".into());
        }
        if self.report.affine_dimension > 0 && is_i_maximizer(&self.centroid).unwrap_or(true) {
            out.push("interior centroid is a multi-information maximizer".into());
        }
        let log_n = (alphabet as f64).ln();
        for v in self.vertex_distributions() {
            match family::sfmi(&v.to_float(), &self.pairing) {
                Ok(value) if (value - log_n).abs() <= VALUE_TOL => {}
                Ok(value) => out.push(format!("vertex has SFMI {value}, expected {log_n}")),
                Err(e) => out.push(format!("SFMI evaluation failed: {e}")),
            }
        }
        out
    }
}

fn check_sfmi_shape(alphabet: usize, n: usize, pairing: &Pairing, support_cap: u128) -> Result<()> {
    if alphabet < 2 || n < 1 {
        return Err(Error::InvalidArgument("SFMI polytopes need N ≥ 2 and n ≥ 1".into()));
    }
    if pairing.n() != n {
        return Err(Error::InvalidPairing(format!(
            "pairing has {} pairs, expected {n}",
            pairing.n()
        )));
    }
    let support = checked_pow(alphabet as u128, n);
    if support > support_cap {
        return Err(Error::CapExceeded {
            what: "SFMI polytope support size",
            cap: support_cap,
            required: support,
        });
    }
    Ok(())
}

pub fn build_sfmi_polytope(
    alphabet: usize,
    n: usize,
    margin_choice: &[Code],
    pairing: &Pairing,
) -> Result<SfmiPolytope> {
    ops::record(Op::BuildSfmiPolytope);
    check_sfmi_shape(alphabet, n, pairing, DEFAULT_SUPPORT_CAP)?;
    if margin_choice.len() != n {
        return Err(Error::LengthMismatch {
            left: margin_choice.len(),
            right: n,
        });
    }
    let mut sigmas = Vec::with_capacity(n);
    for code in margin_choice {
        if code.alphabet() != alphabet {
            return Err(Error::InvalidCode(format!(
                "margin code over alphabet {}, expected {alphabet}",
                code.alphabet()
            )));
        }
        sigmas.push(code.as_permutation()?);
    }

    let space = StateSpace::homogeneous(2 * n, alphabet)?;
    let fam = MarginFamily::from_pairing(pairing);
    let margins: Vec<Distribution> = margin_choice.iter().map(code_distribution).collect::<Result<_>>()?;
    let system = polytope::margin_specified_system(&space, &fam, &margins)?;
    let report = polytope::analyze(&system, polytope::DEFAULT_COLUMN_CAP)?;
    let support = system.column_labels.clone();

    let joint_of = |x: &[usize]| -> usize {
        let mut state = x.to_vec();
        state.resize(2 * n, 0);
        for i in 0..n {
            state[n + pairing.partner(i)] = sigmas[i][x[i]];
        }
        space.encode(&state).expect("symbols within alphabet")
    };

    let mut by_support: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut code_vertices = Vec::new();
    for (idx, v) in report.vertices.iter().enumerate() {
        let nonzero: Vec<usize> = (0..v.len()).filter(|&c| !v[c].is_zero()).map(|c| support[c]).collect();
        if nonzero.len() == alphabet {
            let p = polytope::vertex_distribution(&space, &support, v)?;
            if is_i_maximizer(&p)? {
                code_vertices.push(idx);
            }
        }
        by_support.insert(nonzero, idx);
    }

    let mut simplices = Vec::new();
    for partition in codes::enumerate_all_partitions(alphabet, n)? {
        let simplex: Vec<usize> = partition
            .parts()
            .iter()
            .filter_map(|part| {
                let mut states: Vec<usize> = part.words().iter().map(|w| joint_of(w)).collect();
                states.sort_unstable();
                by_support.get(&states).copied()
            })
            .collect();
        simplices.push(simplex);
    }

    let centroid = Distribution::uniform_on(space, &support)?;
    Ok(SfmiPolytope {
        alphabet,
        n,
        margin_choice: margin_choice.to_vec(),
        pairing: pairing.clone(),
        support,
        system,
        report,
        code_vertices,
        simplices,
        centroid,
    })
}

/// The length-2 code `{(k, σ(k))}`.
pub fn pair_code(sigma: &[usize]) -> Result<Code> {
    Code::from_permutations(sigma.len(), &[sigma])
}

/// Lazily builds all `N!^n` polytopes, one per margin-choice tuple, in
/// lexicographic order of the permutation tuple.
#[derive(Debug)]
pub struct SfmiPolytopes {
    alphabet: usize,
    n: usize,
    pairing: Pairing,
    codes: Vec<Code>,
    odometer: Vec<usize>,
    done: bool,
}

impl SfmiPolytopes {
    fn choice(&self, odometer: &[usize]) -> Vec<Code> {
        odometer.iter().map(|&i| self.codes[i].clone()).collect()
    }

    fn all_choices(&self) -> Vec<Vec<Code>> {
        let count = self.codes.len().pow(self.n as u32);
        let mut odometer = vec![0; self.n];
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(self.choice(&odometer));
            advance(&mut odometer, self.codes.len());
        }
        out
    }
}

fn advance(odometer: &mut [usize], radix: usize) -> bool {
    for slot in odometer.iter_mut().rev() {
        *slot += 1;
        if *slot < radix {
            return true;
        }
        *slot = 0;
    }
    false
}

impl Iterator for SfmiPolytopes {
    type Item = Result<SfmiPolytope>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let choice = self.choice(&self.odometer);
        self.done = !advance(&mut self.odometer, self.codes.len());
        Some(build_sfmi_polytope(self.alphabet, self.n, &choice, &self.pairing))
    }
}

pub fn enumerate_sfmi_polytopes(alphabet: usize, n: usize, pairing: &Pairing) -> Result<SfmiPolytopes> {
    enumerate_sfmi_polytopes_capped(alphabet, n, pairing, DEFAULT_POLYTOPE_CAP)
}

pub fn enumerate_sfmi_polytopes_capped(
    alphabet: usize,
    n: usize,
    pairing: &Pairing,
    cap: u128,
) -> Result<SfmiPolytopes> {
    ops::record(Op::EnumerateSfmiPolytopes);
    check_sfmi_shape(alphabet, n, pairing, DEFAULT_SUPPORT_CAP)?;
    let required = checked_pow(factorial(alphabet), n);
    if required > cap {
        return Err(Error::CapExceeded {
            what: "SFMI polytope enumeration",
            cap,
            required,
        });
    }
    let codes = permutations_lex(alphabet)
        .iter()
        .map(|s| pair_code(s))
        .collect::<Result<_>>()?;
    Ok(SfmiPolytopes {
        alphabet,
        n,
        pairing: pairing.clone(),
        codes,
        odometer: vec![0; n],
        done: false,
    })
}

/// All SFMI polytopes for one pairing, with the global checks.
#[derive(Clone, Debug)]
pub struct SfmiAtlas {
    pub alphabet: usize,
    pub n: usize,
    pub pairing: Pairing,
    pub polytopes: Vec<SfmiPolytope>,
    /// No distribution lies in two polytopes (exact pairwise test).
    pub polytopes_disjoint: bool,
    /// No joint state lies in two supports. Holds for binary alphabets only:
    /// for `N ≥ 3` two margin permutations can agree on a symbol.
    pub supports_disjoint: bool,
    /// Whether the code vertices of all polytopes are exactly the
    /// multi-information maximizers on `2n` variables; `None` if that set is
    /// over the enumeration cap.
    pub code_vertices_match_maximizers: Option<bool>,
}

impl SfmiAtlas {
    pub fn expected_polytope_count(&self) -> u128 {
        checked_pow(factorial(self.alphabet), self.n)
    }

    pub fn code_vertex_count(&self) -> usize {
        self.polytopes.iter().map(|p| p.code_vertices.len()).sum()
    }

    pub fn centroids(&self) -> Vec<&Distribution> {
        self.polytopes.iter().map(|p| &p.centroid).collect()
    }

    /// Global and per-polytope failures; empty when everything holds.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.polytopes.len() as u128 != self.expected_polytope_count() {
            out.push(format!(
                "{} polytopes, expected {}",
                self.polytopes.len(),
                self.expected_polytope_count()
            ));
        }
        if !self.polytopes_disjoint {
            out.push("two polytopes intersect".into());
        }
        if self.alphabet == 2 && !self.supports_disjoint {
            out.push("binary polytope supports overlap".into());
        }
        if self.code_vertices_match_maximizers == Some(false) {
            out.push("code vertices differ from the multi-information maximizers".into());
        }
        for (k, p) in self.polytopes.iter().enumerate() {
            out.extend(
                p.structure_violations()
                    .into_iter()
                    .map(|v| format!("polytope {k}: {v}")),
            );
        }
        out
    }
}

/// Builds every polytope in parallel and runs the cross-polytope checks.
pub fn build_sfmi_atlas(alphabet: usize, n: usize, pairing: &Pairing) -> Result<SfmiAtlas> {
    let iter = enumerate_sfmi_polytopes(alphabet, n, pairing)?;
    let polytopes: Vec<SfmiPolytope> = iter
        .all_choices()
        .par_iter()
        .map(|choice| build_sfmi_polytope(alphabet, n, choice, pairing))
        .collect::<Result<_>>()?;

    let mut seen = HashSet::new();
    let supports_disjoint = polytopes.iter().flat_map(|p| p.support.iter()).all(|&s| seen.insert(s));
    let pairs: Vec<(usize, usize)> = (0..polytopes.len())
        .flat_map(|a| (a + 1..polytopes.len()).map(move |b| (a, b)))
        .collect();
    let polytopes_disjoint = pairs
        .par_iter()
        .map(|&(a, b)| polytopes_intersect(&polytopes[a], &polytopes[b]).map(|hit| !hit))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|d| d);

    let code_vertices_match_maximizers = match enumerate_i_maximizers(alphabet, 2 * n) {
        Ok(maximizers) => {
            let found: BTreeSet<Vec<Rational>> = polytopes
                .iter()
                .flat_map(|p| p.code_vertices.iter().map(move |&v| p.vertex_distribution(v)))
                .filter_map(|d| exact_key(&d))
                .collect();
            Some(found == maximizers.weight_set())
        }
        Err(e) if e.is_cap_exceeded() => None,
        Err(e) => return Err(e),
    };

    Ok(SfmiAtlas {
        alphabet,
        n,
        pairing: pairing.clone(),
        polytopes,
        polytopes_disjoint,
        supports_disjoint,
        code_vertices_match_maximizers,
    })
}

/// Whether some distribution satisfies both polytopes' constraints: such a
/// point lives on the common support, so both systems are restricted there.
pub fn polytopes_intersect(a: &SfmiPolytope, b: &SfmiPolytope) -> Result<bool> {
    let in_b: HashSet<usize> = b.support.iter().copied().collect();
    let common: Vec<usize> = a.support.iter().copied().filter(|s| in_b.contains(s)).collect();
    if common.is_empty() {
        return Ok(false);
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for poly in [a, b] {
        let position: BTreeMap<usize, usize> = poly.support.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let cols: Vec<usize> = common.iter().map(|s| position[s]).collect();
        let restricted = poly.system.matrix.select_columns(&cols);
        rows.extend(restricted.to_rows());
        rhs.extend(poly.system.rhs.iter().cloned());
    }
    let system = ConstraintSystem::new(polytope::RationalMatrix::from_rows(rows)?, rhs, common)?;
    Ok(!polytope::enumerate_vertices(&system)?.is_empty())
}

/// Centroids shared by two atlases (e.g. two pairings of the same shape).
pub fn shared_centroids(a: &SfmiAtlas, b: &SfmiAtlas) -> Vec<Distribution> {
    let keys: BTreeSet<Vec<Rational>> = b.centroids().into_iter().filter_map(exact_key).collect();
    a.centroids()
        .into_iter()
        .filter(|c| exact_key(c).is_some_and(|k| keys.contains(&k)))
        .cloned()
        .collect()
}

/// Exact: the centroid is uniform on `N^n` states whose x-halves are all
/// distinct and whose y-halves are all distinct. Also requires the block MI
/// to equal `n log N` within 1e-10.
pub fn centroid_is_block_mi_maximizer(poly: &SfmiPolytope) -> bool {
    ops::record(Op::CentroidIsBlockMiMaximizer);
    let c = &poly.centroid;
    let Some(weights) = c.exact_weights() else {
        return false;
    };
    let n = poly.n;
    let block = poly.alphabet.pow(n as u32);
    let support = c.support();
    if support.len() != block || support.iter().any(|&s| weights[s] != weights[support[0]]) {
        return false;
    }
    let mut xs = HashSet::new();
    let mut ys = HashSet::new();
    for &s in &support {
        if !xs.insert(s / block) || !ys.insert(s % block) {
            return false;
        }
    }
    let split = BlockSplit::halves(2 * n).expect("2n ≥ 2");
    match dist::block_mutual_information(&c.to_float(), &split) {
        Ok(v) => (v - n as f64 * (poly.alphabet as f64).ln()).abs() <= VALUE_TOL,
        Err(_) => false,
    }
}
