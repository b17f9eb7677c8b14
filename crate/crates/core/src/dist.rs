//! State spaces, joint distributions, and the base information measures.
//!
//! All measures are in nats. Joint states are encoded row-major, the first
//! variable being the most significant digit, so `δ_0101` over four binary
//! variables is index 5.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ops::{self, Op};

pub type Rational = BigRational;

/// Float weights must sum to one within this tolerance.
pub const FLOAT_NORMALIZATION_TOL: f64 = 1e-12;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSpace {
    cardinalities: Vec<usize>,
    total: usize,
}

impl StateSpace {
    pub fn new(cardinalities: Vec<usize>) -> Result<Self> {
        if cardinalities.is_empty() {
            return Err(Error::InvalidSpace("at least one variable is required".into()));
        }
        let mut total = 1usize;
        for (i, &c) in cardinalities.iter().enumerate() {
            if c == 0 {
                return Err(Error::InvalidSpace(format!("variable {} has no states", i + 1)));
            }
            total = total
                .checked_mul(c)
                .ok_or_else(|| Error::InvalidSpace("joint state count overflows".into()))?;
        }
        Ok(StateSpace { cardinalities, total })
    }

    pub fn homogeneous(n: usize, cardinality: usize) -> Result<Self> {
        Self::new(vec![cardinality; n])
    }

    pub fn n(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn cardinality(&self, var: usize) -> usize {
        self.cardinalities[var]
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// The common cardinality, if every variable has the same one.
    pub fn homogeneous_cardinality(&self) -> Option<usize> {
        let first = self.cardinalities[0];
        self.cardinalities.iter().all(|&c| c == first).then_some(first)
    }

    pub fn encode(&self, state: &[usize]) -> Result<usize> {
        if state.len() != self.n() {
            return Err(Error::LengthMismatch {
                left: state.len(),
                right: self.n(),
            });
        }
        let mut index = 0;
        for (i, (&s, &c)) in state.iter().zip(&self.cardinalities).enumerate() {
            if s >= c {
                return Err(Error::InvalidSpace(format!(
                    "value {s} of variable {} is outside 0..{c}",
                    i + 1
                )));
            }
            index = index * c + s;
        }
        Ok(index)
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut state = vec![0; self.n()];
        self.decode_into(index, &mut state);
        state
    }

    pub fn decode_into(&self, mut index: usize, state: &mut [usize]) {
        debug_assert!(index < self.total);
        for (slot, &c) in state.iter_mut().zip(&self.cardinalities).rev() {
            *slot = index % c;
            index /= c;
        }
    }

    pub fn states(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.total).map(|i| self.decode(i))
    }

    /// Checks `subset` names distinct variables of this space.
    pub fn check_subset(&self, subset: &[usize]) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        let mut seen = vec![false; self.n()];
        for &v in subset {
            if v >= self.n() {
                return Err(Error::InvalidSubset(format!(
                    "variable index {v} out of range for {} variables",
                    self.n()
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidSubset(format!("variable {v} repeated")));
            }
        }
        Ok(())
    }

    /// The space of the variables in `subset`, in the order given.
    pub fn subspace(&self, subset: &[usize]) -> Result<StateSpace> {
        self.check_subset(subset)?;
        StateSpace::new(subset.iter().map(|&v| self.cardinalities[v]).collect())
    }

    /// For every joint index, the index of its restriction to `subset` in
    /// `self.subspace(subset)`.
    pub fn projection(&self, subset: &[usize]) -> Result<Vec<usize>> {
        self.check_subset(subset)?;
        let mut state = vec![0; self.n()];
        Ok((0..self.total)
            .map(|i| {
                self.decode_into(i, &mut state);
                subset.iter().fold(0, |acc, &v| acc * self.cardinalities[v] + state[v])
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

impl Weights {
    pub fn len(&self) -> usize {
        match self {
            Weights::Exact(w) => w.len(),
            Weights::Float(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A probability vector over a [`StateSpace`].
///
/// Exact distributions carry arbitrary-precision rationals and compare
/// exactly; float distributions are used by the numeric search. Moving from
/// one to the other only happens through [`Distribution::to_float`].
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    space: StateSpace,
    weights: Weights,
}

impl Distribution {
    pub fn from_exact(space: StateSpace, weights: Vec<Rational>) -> Result<Self> {
        check_len(&space, weights.len())?;
        if let Some(i) = weights.iter().position(|w| w.is_negative()) {
            return Err(Error::InvalidDistribution(format!("weight of state {i} is negative")));
        }
        let sum: Rational = weights.iter().sum();
        if !sum.is_one() {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}, not 1")));
        }
        Ok(Distribution {
            space,
            weights: Weights::Exact(weights),
        })
    }

    pub fn from_float(space: StateSpace, weights: Vec<f64>) -> Result<Self> {
        check_len(&space, weights.len())?;
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weight of state {i} is negative or not finite"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > FLOAT_NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {sum}, not 1 within {FLOAT_NORMALIZATION_TOL:e}"
            )));
        }
        Ok(Distribution {
            space,
            weights: Weights::Float(weights),
        })
    }

    /// Exact uniform distribution on the given (distinct) joint indices.
    pub fn uniform_on(space: StateSpace, states: &[usize]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mass = Rational::new(BigInt::one(), BigInt::from(states.len()));
        let mut weights = vec![Rational::zero(); space.total()];
        for &s in states {
            if s >= space.total() {
                return Err(Error::InvalidDistribution(format!("state {s} out of range")));
            }
            if !weights[s].is_zero() {
                return Err(Error::InvalidDistribution(format!("state {s} repeated")));
            }
            weights[s] = mass.clone();
        }
        Self::from_exact(space, weights)
    }

    pub fn uniform(space: StateSpace) -> Self {
        let states: Vec<usize> = (0..space.total()).collect();
        Self::uniform_on(space, &states).expect("full support is valid")
    }

    pub fn point(space: StateSpace, state: usize) -> Result<Self> {
        Self::uniform_on(space, &[state])
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.weights, Weights::Exact(_))
    }

    pub fn exact_weights(&self) -> Option<&[Rational]> {
        match &self.weights {
            Weights::Exact(w) => Some(w),
            Weights::Float(_) => None,
        }
    }

    /// Weights as floats (exact weights are rounded to nearest).
    pub fn probabilities(&self) -> Vec<f64> {
        match &self.weights {
            Weights::Exact(w) => w.iter().map(rational_to_f64).collect(),
            Weights::Float(w) => w.clone(),
        }
    }

    /// Explicit conversion into float mode.
    pub fn to_float(&self) -> Distribution {
        Distribution {
            space: self.space.clone(),
            weights: Weights::Float(self.probabilities()),
        }
    }

    pub fn support(&self) -> Vec<usize> {
        match &self.weights {
            Weights::Exact(w) => (0..w.len()).filter(|&i| !w[i].is_zero()).collect(),
            Weights::Float(w) => (0..w.len()).filter(|&i| w[i] > 0.0).collect(),
        }
    }
}

fn check_len(space: &StateSpace, len: usize) -> Result<()> {
    if len != space.total() {
        return Err(Error::LengthMismatch {
            left: len,
            right: space.total(),
        });
    }
    Ok(())
}

/// A split of the variables into two disjoint blocks covering all of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSplit {
    n: usize,
    x_block: Vec<usize>,
    y_block: Vec<usize>,
}

impl BlockSplit {
    pub fn new(n: usize, x_block: Vec<usize>, y_block: Vec<usize>) -> Result<Self> {
        if x_block.is_empty() || y_block.is_empty() {
            return Err(Error::InvalidSplit("both blocks must be nonempty".into()));
        }
        let mut seen = vec![false; n];
        for &v in x_block.iter().chain(&y_block) {
            if v >= n {
                return Err(Error::InvalidSplit(format!("index {v} out of range")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidSplit(format!("index {v} appears twice")));
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidSplit(format!("index {v} is in neither block")));
        }
        Ok(BlockSplit { n, x_block, y_block })
    }

    /// X = first half of the variables, Y = second half.
    pub fn halves(n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidSplit(format!("cannot halve {n} variables")));
        }
        Self::new(n, (0..n / 2).collect(), (n / 2..n).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_block(&self) -> &[usize] {
        &self.x_block
    }

    pub fn y_block(&self) -> &[usize] {
        &self.y_block
    }
}

// Slice kernels shared with the numeric search.

pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

pub(crate) fn marginalize_f64(probs: &[f64], projection: &[usize], size: usize) -> Vec<f64> {
    let mut out = vec![0.0; size];
    for (p, &j) in probs.iter().zip(projection) {
        out[j] += p;
    }
    out
}

pub fn entropy(p: &Distribution) -> f64 {
    ops::record(Op::Entropy);
    match &p.weights {
        Weights::Float(w) => entropy_of(w),
        Weights::Exact(_) => entropy_of(&p.probabilities()),
    }
}

/// `D(p‖q)`; `f64::INFINITY` when `p` charges a state `q` does not.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    ops::record(Op::KlDivergence);
    if p.space != q.space {
        return Err(Error::SpaceMismatch(format!(
            "{:?} vs {:?}",
            p.space.cardinalities, q.space.cardinalities
        )));
    }
    let (pw, qw) = (p.probabilities(), q.probabilities());
    let mut total = 0.0;
    for (i, &pi) in pw.iter().enumerate() {
        if pi <= 0.0 {
            continue;
        }
        let q_zero = match &q.weights {
            Weights::Exact(qe) => qe[i].is_zero(),
            Weights::Float(qf) => qf[i] <= 0.0,
        };
        if q_zero {
            return Ok(f64::INFINITY);
        }
        total += pi * (pi / qw[i]).ln();
    }
    Ok(total.max(0.0))
}

/// Marginal onto `subset` (variables ordered as listed).
pub fn marginal(p: &Distribution, subset: &[usize]) -> Result<Distribution> {
    ops::record(Op::Marginal);
    let sub = p.space.subspace(subset)?;
    let projection = p.space.projection(subset)?;
    let weights = match &p.weights {
        Weights::Float(w) => Weights::Float(marginalize_f64(w, &projection, sub.total())),
        Weights::Exact(w) => {
            let mut out = vec![Rational::zero(); sub.total()];
            for (wi, &j) in w.iter().zip(&projection) {
                if !wi.is_zero() {
                    out[j] += wi;
                }
            }
            Weights::Exact(out)
        }
    };
    Ok(Distribution { space: sub, weights })
}

fn single_marginals(p: &Distribution) -> Vec<Distribution> {
    (0..p.space.n())
        .map(|i| marginal(p, &[i]).expect("single variable is a valid subset"))
        .collect()
}

/// `p(X_1)···p(X_n)`, in the same backing as `p`.
pub fn product_of_marginals(p: &Distribution) -> Distribution {
    ops::record(Op::ProductOfMarginals);
    let factors = single_marginals(p);
    let space = p.space.clone();
    let mut state = vec![0; space.n()];
    let weights = match &p.weights {
        Weights::Float(_) => {
            let fs: Vec<Vec<f64>> = factors.iter().map(|f| f.probabilities()).collect();
            Weights::Float(
                (0..space.total())
                    .map(|i| {
                        space.decode_into(i, &mut state);
                        state.iter().zip(&fs).map(|(&s, f)| f[s]).product()
                    })
                    .collect(),
            )
        }
        Weights::Exact(_) => {
            let fs: Vec<&[Rational]> = factors
                .iter()
                .map(|f| f.exact_weights().expect("exact marginal"))
                .collect();
            Weights::Exact(
                (0..space.total())
                    .map(|i| {
                        space.decode_into(i, &mut state);
                        state.iter().zip(&fs).fold(Rational::one(), |acc, (&s, f)| acc * &f[s])
                    })
                    .collect(),
            )
        }
    };
    Distribution { space, weights }
}

/// `Σ_i H(X_i) − H(X_1,…,X_n)`.
pub fn multi_information(p: &Distribution) -> f64 {
    ops::record(Op::MultiInformation);
    let value = multi_information_entropy_form(p);
    debug_assert!(
        {
            let kl = kl_divergence(p, &product_of_marginals(p)).unwrap_or(f64::NAN);
            (kl - value).abs() < 1e-10
        },
        "KL and entropy forms of the multi-information disagree"
    );
    value
}

pub(crate) fn multi_information_entropy_form(p: &Distribution) -> f64 {
    let probs = p.probabilities();
    let marginal_sum: f64 = (0..p.space.n())
        .map(|i| {
            let proj = p.space.projection(&[i]).expect("valid variable");
            entropy_of(&marginalize_f64(&probs, &proj, p.space.cardinality(i)))
        })
        .sum();
    (marginal_sum - entropy_of(&probs)).max(0.0)
}

/// `MI(X, Y)` with each block treated as one composite variable.
pub fn block_mutual_information(p: &Distribution, split: &BlockSplit) -> Result<f64> {
    ops::record(Op::BlockMutualInformation);
    if split.n != p.space.n() {
        return Err(Error::InvalidSplit(format!(
            "split is for {} variables, distribution has {}",
            split.n,
            p.space.n()
        )));
    }
    let probs = p.probabilities();
    let block_entropy = |block: &[usize]| -> Result<f64> {
        let size = p.space.subspace(block)?.total();
        let proj = p.space.projection(block)?;
        Ok(entropy_of(&marginalize_f64(&probs, &proj, size)))
    };
    let value = block_entropy(&split.x_block)? + block_entropy(&split.y_block)? - entropy_of(&probs);
    Ok(value.max(0.0))
}

/// `H(target | given) = H(target ∪ given) − H(given)`.
pub fn conditional_entropy(p: &Distribution, target: &[usize], given: &[usize]) -> Result<f64> {
    ops::record(Op::ConditionalEntropy);
    if let Some(v) = target.iter().find(|v| given.contains(v)) {
        return Err(Error::InvalidSubset(format!(
            "variable {v} is both target and condition"
        )));
    }
    let joint: Vec<usize> = target.iter().chain(given).copied().collect();
    let h_joint = entropy_of(&marginal(p, &joint)?.probabilities());
    let h_given = if given.is_empty() {
        0.0
    } else {
        entropy_of(&marginal(p, given)?.probabilities())
    };
    Ok((h_joint - h_given).max(0.0))
}
