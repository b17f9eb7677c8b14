//! Margin families, the factorized measures built on them, and the
//! connected-covering test.

use crate::dist::{self, Distribution, StateSpace};
use crate::error::{Error, Result};
use crate::ops::{self, Op};

/// A family of variable subsets, stored canonically: each set sorted, the
/// sets sorted lexicographically. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarginFamily {
    n: usize,
    sets: Vec<Vec<usize>>,
}

impl MarginFamily {
    pub fn new(n: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidFamily("ambient variable count is zero".into()));
        }
        let mut canonical = Vec::with_capacity(sets.len());
        for set in sets {
            let mut set = set;
            if set.is_empty() {
                return Err(Error::InvalidFamily("empty set in family".into()));
            }
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidFamily(format!("set {set:?} repeats an index")));
            }
            if let Some(&v) = set.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidFamily(format!(
                    "index {v} out of range for {n} variables"
                )));
            }
            canonical.push(set);
        }
        canonical.sort();
        if canonical.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidFamily("duplicate set in family".into()));
        }
        Ok(MarginFamily { n, sets: canonical })
    }

    /// All unordered pairs `{i, j}`.
    pub fn all_pairs(n: usize) -> Result<Self> {
        let mut sets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                sets.push(vec![i, j]);
            }
        }
        Self::new(n, sets)
    }

    /// The pairs `{X_i, Y_π(i)}` over `2n` variables ordered `(x_1..x_n, y_1..y_n)`.
    pub fn from_pairing(pairing: &Pairing) -> Self {
        let n = pairing.n();
        let sets = (0..n).map(|i| vec![i, n + pairing.partner(i)]).collect();
        Self::new(2 * n, sets).expect("pairing produces a valid family")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// A perfect matching `X_i ↔ Y_π(i)` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    matching: Vec<usize>,
}

impl Pairing {
    pub fn new(matching: Vec<usize>) -> Result<Self> {
        if matching.is_empty() {
            return Err(Error::InvalidPairing("no pairs".into()));
        }
        let mut seen = vec![false; matching.len()];
        for &m in &matching {
            if m >= matching.len() || std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidPairing(format!("{matching:?} is not a permutation")));
            }
        }
        Ok(Pairing { matching })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    pub fn n(&self) -> usize {
        self.matching.len()
    }

    pub fn partner(&self, i: usize) -> usize {
        self.matching[i]
    }

    pub fn matching(&self) -> &[usize] {
        &self.matching
    }
}

/// `(1/|Λ|) Σ_λ I(p_λ)`.
pub fn i_lambda(p: &Distribution, fam: &MarginFamily) -> Result<f64> {
    ops::record(Op::ILambda);
    Ok(i_lambda_terms(p, fam)?.iter().sum::<f64>() / fam.len() as f64)
}

/// The per-set multi-informations `I(p_λ)`, in family order.
pub fn i_lambda_terms(p: &Distribution, fam: &MarginFamily) -> Result<Vec<f64>> {
    if fam.is_empty() {
        return Err(Error::InvalidFamily("family is empty".into()));
    }
    if fam.n != p.space().n() {
        return Err(Error::SpaceMismatch(format!(
            "family over {} variables, distribution over {}",
            fam.n,
            p.space().n()
        )));
    }
    fam.sets
        .iter()
        .map(|set| {
            if set.len() == 1 {
                return Ok(0.0);
            }
            Ok(dist::multi_information(&dist::marginal(p, set)?))
        })
        .collect()
}

/// Average pairwise mutual information.
pub fn fmi(p: &Distribution) -> Result<f64> {
    ops::record(Op::Fmi);
    let n = p.space().n();
    if n < 2 {
        return Err(Error::InvalidArgument("FMI needs at least two variables".into()));
    }
    i_lambda(p, &MarginFamily::all_pairs(n)?)
}

/// `(1/n) Σ_i MI(X_i, Y_π(i))` over `(x_1..x_n, y_1..y_n)`.
pub fn sfmi(p: &Distribution, pairing: &Pairing) -> Result<f64> {
    ops::record(Op::Sfmi);
    let terms = sfmi_terms(p, pairing)?;
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

/// `MI(X_i, Y_π(i))` for each `i`.
pub fn sfmi_terms(p: &Distribution, pairing: &Pairing) -> Result<Vec<f64>> {
    let vars = p.space().n();
    if !vars.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "SFMI needs an even number of variables, got {vars}"
        )));
    }
    if p.space().homogeneous_cardinality().is_none() {
        return Err(Error::InvalidArgument(
            "SFMI needs all variables to share one cardinality".into(),
        ));
    }
    let n = vars / 2;
    if pairing.n() != n {
        return Err(Error::InvalidPairing(format!(
            "pairing has {} pairs, space has {n}",
            pairing.n()
        )));
    }
    (0..n)
        .map(|i| {
            Ok(dist::multi_information(&dist::marginal(
                p,
                &[i, n + pairing.partner(i)],
            )?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Covering {
    /// Set indices (into `MarginFamily::sets`) whose every element meets the
    /// union of its predecessors.
    Connected { order: Vec<usize> },
    /// A variable contained in no set.
    Uncovered { index: usize },
    /// Groups of set indices with no variable shared across groups.
    Disconnected { components: Vec<Vec<usize>> },
}

impl Covering {
    pub fn is_connected(&self) -> bool {
        matches!(self, Covering::Connected { .. })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn is_connected_covering(fam: &MarginFamily) -> Covering {
    ops::record(Op::IsConnectedCovering);
    let mut covered = vec![false; fam.n];
    for set in &fam.sets {
        for &v in set {
            covered[v] = true;
        }
    }
    if let Some(index) = covered.iter().position(|c| !c) {
        return Covering::Uncovered { index };
    }

    // Union sets through the first set seen containing each variable.
    let mut uf = UnionFind::new(fam.len());
    let mut owner: Vec<Option<usize>> = vec![None; fam.n];
    for (s, set) in fam.sets.iter().enumerate() {
        for &v in set {
            match owner[v] {
                Some(o) => uf.union(o, s),
                None => owner[v] = Some(s),
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; fam.len()];
    for s in 0..fam.len() {
        let r = uf.find(s);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(s);
    }
    if groups.len() > 1 {
        return Covering::Disconnected { components: groups };
    }

    // Greedy accretion gives a witness ordering.
    let mut in_union = vec![false; fam.n];
    let mut used = vec![false; fam.len()];
    let mut order = Vec::with_capacity(fam.len());
    while order.len() < fam.len() {
        let next = (0..fam.len())
            .find(|&s| !used[s] && (order.is_empty() || fam.sets[s].iter().any(|&v| in_union[v])))
            .expect("a connected family always has a next set");
        used[next] = true;
        for &v in &fam.sets[next] {
            in_union[v] = true;
        }
        order.push(next);
    }
    Covering::Connected { order }
}

/// Row label of a margin statistic: set index and the margin state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatisticLabel {
    pub set: usize,
    pub margin_state: Vec<usize>,
}

/// Sufficient-statistics matrix computing the Λ-margins: one column per joint
/// state, one 0/1 row per `(λ, x̃_λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatisticsMatrix {
    pub rows: Vec<Vec<u8>>,
    pub labels: Vec<StatisticLabel>,
}

impl StatisticsMatrix {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

pub fn margin_statistics_matrix(fam: &MarginFamily, space: &StateSpace) -> Result<StatisticsMatrix> {
    ops::record(Op::MarginStatisticsMatrix);
    if fam.n != space.n() {
        return Err(Error::SpaceMismatch(format!(
            "family over {} variables, space over {}",
            fam.n,
            space.n()
        )));
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (s, set) in fam.sets.iter().enumerate() {
        let sub = space.subspace(set)?;
        let projection = space.projection(set)?;
        for m in 0..sub.total() {
            rows.push(projection.iter().map(|&j| u8::from(j == m)).collect());
            labels.push(StatisticLabel {
                set: s,
                margin_state: sub.decode(m),
            });
        }
    }
    Ok(StatisticsMatrix { rows, labels })
}

/// `Σ_{i=1..q} C(n,i)(N−1)^i`.
pub fn marginal_polytope_dimension(n: usize, cardinality: usize, q: usize) -> Result<u128> {
    ops::record(Op::MarginalPolytopeDimension);
    if q == 0 || q > n {
        return Err(Error::InvalidArgument(format!("margin order {q} outside 1..={n}")));
    }
    if cardinality < 2 {
        return Err(Error::InvalidArgument("cardinality must be at least 2".into()));
    }
    let overflow = || Error::InvalidArgument("dimension overflows u128".into());
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    let mut power: u128 = 1;
    let base = (cardinality - 1) as u128;
    for i in 1..=q {
        binom = binom * (n - i + 1) as u128 / i as u128;
        power = power.checked_mul(base).ok_or_else(overflow)?;
        total = total
            .checked_add(binom.checked_mul(power).ok_or_else(overflow)?)
            .ok_or_else(overflow)?;
    }
    Ok(total)
}
