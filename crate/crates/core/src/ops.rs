//! Process-wide record of which library operations have been invoked.
//!
//! `verify --all` uses this to show that the scenario registry touches every
//! public operation at least once. Recording is a single relaxed `fetch_or`.

use std::sync::atomic::{AtomicU64, Ordering};

macro_rules! ops {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        #[repr(u8)]
        pub enum Op {
            $($variant),*
        }

        impl Op {
            pub const ALL: &'static [Op] = &[$(Op::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Op::$variant => $name),*
                }
            }
        }
    };
}

ops! {
    Entropy => "entropy",
    KlDivergence => "kl_divergence",
    Marginal => "marginal",
    ProductOfMarginals => "product_of_marginals",
    MultiInformation => "multi_information",
    BlockMutualInformation => "block_mutual_information",
    ConditionalEntropy => "conditional_entropy",
    ILambda => "i_lambda",
    Fmi => "fmi",
    Sfmi => "sfmi",
    IsConnectedCovering => "is_connected_covering",
    MarginStatisticsMatrix => "margin_statistics_matrix",
    MarginalPolytopeDimension => "marginal_polytope_dimension",
    HammingDistance => "hamming_distance",
    EnumerateMaxDistanceCodes => "enumerate_max_distance_codes",
    PartitionIntoCodes => "partition_into_codes",
    EnumerateAllPartitions => "enumerate_all_partitions",
    BipartiteMatchingsPartition => "bipartite_matchings_partition",
    RationalRankAndKernel => "rational_rank_and_kernel",
    EnumerateVertices => "enumerate_vertices",
    MarginSpecifiedPolytope => "margin_specified_polytope",
    EnumerateIMaximizers => "enumerate_I_maximizers",
    EnumerateBlockMiMaximizers => "enumerate_blockMI_maximizers",
    IsIMaximizer => "is_I_maximizer",
    BuildSfmiPolytope => "build_sfmi_polytope",
    EnumerateSfmiPolytopes => "enumerate_sfmi_polytopes",
    CentroidIsBlockMiMaximizer => "centroid_is_blockMI_maximizer",
    MultiInformationGradient => "multi_information_gradient",
    MaximizeMeasure => "maximize_measure",
    VerifyTheoremFmi => "verify_theorem_fmi",
}

static CALLED: AtomicU64 = AtomicU64::new(0);

#[inline]
pub(crate) fn record(op: Op) {
    CALLED.fetch_or(1 << op as u8, Ordering::Relaxed);
}

/// Operations invoked since process start (or the last [`reset`]).
pub fn called() -> Vec<Op> {
    let bits = CALLED.load(Ordering::Relaxed);
    Op::ALL
        .iter()
        .copied()
        .filter(|op| bits & (1 << *op as u8) != 0)
        .collect()
}

/// Operations never invoked since process start (or the last [`reset`]).
pub fn missing() -> Vec<Op> {
    let bits = CALLED.load(Ordering::Relaxed);
    Op::ALL
        .iter()
        .copied()
        .filter(|op| bits & (1 << *op as u8) == 0)
        .collect()
}

pub fn reset() {
    CALLED.store(0, Ordering::Relaxed);
}
