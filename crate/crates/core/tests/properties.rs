use std::collections::BTreeSet;

use factored_info::atlas::{self, total_variation};
use factored_info::codes;
use factored_info::dist::{self, BlockSplit, Distribution, Rational, StateSpace};
use factored_info::family::{self, Covering, MarginFamily, Pairing};
use factored_info::polytope::{self, ConstraintSystem, RationalMatrix};
use factored_info::search::{self, Measure, Objective, SearchConfig};
use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

const SHAPES: &[&[usize]] = &[&[2, 2], &[2, 3], &[2, 2, 2], &[3, 2, 2], &[2, 2, 2, 2], &[3, 3]];

fn shape() -> impl Strategy<Value = Vec<usize>> {
    prop::sample::select(SHAPES).prop_map(|s| s.to_vec())
}

fn float_dist() -> impl Strategy<Value = Distribution> {
    shape().prop_flat_map(|cards| {
        let total: usize = cards.iter().product();
        prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.001f64..1.0], total).prop_map(move |w| {
            let s: f64 = w.iter().sum::<f64>().max(1e-9);
            let mut w: Vec<f64> = w.iter().map(|v| v / s).collect();
            if w.iter().all(|&v| v == 0.0) {
                w[0] = 1.0;
            }
            Distribution::from_float(StateSpace::new(cards.clone()).unwrap(), w).unwrap()
        })
    })
}

fn exact_dist() -> impl Strategy<Value = Distribution> {
    shape().prop_flat_map(|cards| {
        let total: usize = cards.iter().product();
        prop::collection::vec(0i64..6, total).prop_map(move |mut w| {
            if w.iter().all(|&v| v == 0) {
                w[0] = 1;
            }
            let s: i64 = w.iter().sum();
            let weights = w.iter().map(|&v| Rational::new(v.into(), s.into())).collect();
            Distribution::from_exact(StateSpace::new(cards.clone()).unwrap(), weights).unwrap()
        })
    })
}

/// A disjoint (target, given) pair of variable subsets.
fn split_vars(n: usize, mask: u32) -> (Vec<usize>, Vec<usize>) {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for i in 0..n {
        match (mask >> (2 * i)) & 3 {
            0 | 1 => a.push(i),
            2 => b.push(i),
            _ => {}
        }
    }
    (a, b)
}

fn marginal_entropy_sum(p: &Distribution) -> f64 {
    (0..p.space().n())
        .map(|i| dist::entropy(&dist::marginal(p, &[i]).unwrap()))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn multi_information_forms_agree(p in float_dist()) {
        let entropy_form = marginal_entropy_sum(&p) - dist::entropy(&p);
        let kl_form = dist::kl_divergence(&p, &dist::product_of_marginals(&p)).unwrap();
        prop_assert!((entropy_form - kl_form).abs() < 1e-10);
        prop_assert!((dist::multi_information(&p) - kl_form).abs() < 1e-10);
    }

    #[test]
    fn multi_information_bounds(p in float_dist()) {
        let mi = dist::multi_information(&p);
        prop_assert!(mi >= 0.0);
        let space = p.space();
        if let Some(card) = space.homogeneous_cardinality() {
            prop_assert!(mi <= (space.n() - 1) as f64 * (card as f64).ln() + 1e-10);
        }
    }

    #[test]
    fn product_of_marginals_has_zero_information(p in exact_dist()) {
        let q = dist::product_of_marginals(&p);
        prop_assert!(dist::multi_information(&q).abs() < 1e-12);
        prop_assert_eq!(dist::product_of_marginals(&q).clone(), q.clone());
        let independent = p == q;
        prop_assert_eq!(independent, dist::multi_information(&p) < 1e-12);
    }

    #[test]
    fn chain_rule(p in float_dist()) {
        let n = p.space().n();
        let sum: f64 = (0..n)
            .map(|i| dist::conditional_entropy(&p, &[i], &(0..i).collect::<Vec<_>>()).unwrap())
            .sum();
        prop_assert!((sum - dist::entropy(&p)).abs() < 1e-10);
    }

    #[test]
    fn conditional_entropy_identity(p in float_dist(), mask in any::<u32>()) {
        let (target, given) = split_vars(p.space().n(), mask);
        prop_assume!(!target.is_empty());
        let mut union: Vec<usize> = target.iter().chain(&given).copied().collect();
        union.sort();
        let h = |s: &[usize]| if s.is_empty() { 0.0 } else { dist::entropy(&dist::marginal(&p, s).unwrap()) };
        let ce = dist::conditional_entropy(&p, &target, &given).unwrap();
        prop_assert!((ce - (h(&union) - h(&given))).abs() < 1e-10);
    }

    #[test]
    fn marginalization_is_consistent(p in exact_dist(), mask in any::<u32>()) {
        let n = p.space().n();
        let outer: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        prop_assume!(!outer.is_empty());
        let inner: Vec<usize> = outer.iter().copied().filter(|i| mask & (1 << (i + 8)) != 0).collect();
        prop_assume!(!inner.is_empty());
        let pa = dist::marginal(&p, &outer).unwrap();
        let positions: Vec<usize> = inner.iter().map(|i| outer.iter().position(|o| o == i).unwrap()).collect();
        prop_assert_eq!(dist::marginal(&pa, &positions).unwrap(), dist::marginal(&p, &inner).unwrap());
    }

    #[test]
    fn block_information_is_bounded(p in float_dist(), cut in 1usize..4) {
        let n = p.space().n();
        prop_assume!(cut < n);
        let split = BlockSplit::new(n, (0..cut).collect(), (cut..n).collect()).unwrap();
        let mi = dist::block_mutual_information(&p, &split).unwrap();
        let size = |b: &[usize]| p.space().subspace(b).unwrap().total() as f64;
        prop_assert!(mi <= size(split.x_block()).min(size(split.y_block())).ln() + 1e-10);
    }

    #[test]
    fn family_measures_specialize(p in float_dist()) {
        let n = p.space().n();
        let pairs = MarginFamily::all_pairs(n).unwrap();
        prop_assert!((family::i_lambda(&p, &pairs).unwrap() - family::fmi(&p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sfmi_is_i_lambda_on_partner_sets(w in prop::collection::vec(0.01f64..1.0, 16), swap in any::<bool>()) {
        let s: f64 = w.iter().sum();
        let p = Distribution::from_float(StateSpace::homogeneous(4, 2).unwrap(), w.iter().map(|v| v / s).collect()).unwrap();
        let pairing = Pairing::new(if swap { vec![1, 0] } else { vec![0, 1] }).unwrap();
        let fam = MarginFamily::from_pairing(&pairing);
        prop_assert!((family::sfmi(&p, &pairing).unwrap() - family::i_lambda(&p, &fam).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn covering_certificate_replays(n in 2usize..6, raw in prop::collection::vec(prop::collection::vec(0usize..6, 1..4), 1..5)) {
        let sets: Vec<Vec<usize>> = raw.iter().map(|s| s.iter().map(|&i| i % n).unique().collect()).collect();
        let fam = MarginFamily::new(n, sets);
        prop_assume!(fam.is_ok());
        let fam = fam.unwrap();
        match family::is_connected_covering(&fam) {
            Covering::Connected { order } => {
                prop_assert_eq!(order.iter().copied().sorted().collect::<Vec<_>>(), (0..fam.len()).collect::<Vec<_>>());
                let mut seen: BTreeSet<usize> = fam.sets()[order[0]].iter().copied().collect();
                for &k in &order[1..] {
                    let set = &fam.sets()[k];
                    prop_assert!(set.iter().any(|i| seen.contains(i)));
                    seen.extend(set.iter().copied());
                }
                prop_assert_eq!(seen.len(), n);
            }
            Covering::Uncovered { index } => {
                prop_assert!(fam.sets().iter().all(|s| !s.contains(&index)));
            }
            Covering::Disconnected { components } => {
                prop_assert!(components.len() >= 2);
                let vars: Vec<BTreeSet<usize>> = components
                    .iter()
                    .map(|c| c.iter().flat_map(|&k| fam.sets()[k].iter().copied()).collect())
                    .collect();
                for (a, b) in vars.iter().tuple_combinations() {
                    prop_assert!(a.is_disjoint(b));
                }
            }
        }
    }
}

/// Solves a square system exactly; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                let pivot = a[col].clone();
                for (x, p) in a[r][col..].iter_mut().zip(&pivot[col..]) {
                    *x -= p * &f;
                }
                let v = &b[col] * &f;
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Every basic feasible solution, by trying every column subset and every
/// choice of independent rows.
fn brute_force_vertices(sys: &ConstraintSystem) -> BTreeSet<Vec<Rational>> {
    let m = &sys.matrix;
    let r = polytope::rank(m);
    let mut out = BTreeSet::new();
    for k in 1..=r {
        for cols in (0..m.cols()).combinations(k) {
            let sub = m.select_columns(&cols);
            if polytope::rank(&sub) != k {
                continue;
            }
            for rows in (0..m.rows()).combinations(k) {
                let a: Vec<Vec<Rational>> = rows.iter().map(|&i| sub.row(i).to_vec()).collect();
                let Some(x) = solve_square(a, rows.iter().map(|&i| sys.rhs[i].clone()).collect()) else {
                    continue;
                };
                let mut full = vec![Rational::zero(); m.cols()];
                for (&c, v) in cols.iter().zip(&x) {
                    full[c] = v.clone();
                }
                if full.iter().all(|v| !v.is_negative()) && sys.is_satisfied_by(&full) {
                    out.insert(full);
                }
                break;
            }
        }
    }
    out
}

fn margins_of(p: &Distribution, fam: &MarginFamily) -> Vec<Distribution> {
    fam.sets().iter().map(|s| dist::marginal(p, s).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn vertex_enumeration_is_complete(w in prop::collection::vec(0i64..4, 8), which in 0usize..3) {
        prop_assume!(w.iter().any(|&v| v > 0));
        let s: i64 = w.iter().sum();
        let space = StateSpace::homogeneous(3, 2).unwrap();
        let p = Distribution::from_exact(space.clone(), w.iter().map(|&v| Rational::new(v.into(), s.into())).collect()).unwrap();
        let fam = match which {
            0 => MarginFamily::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap(),
            1 => MarginFamily::all_pairs(3).unwrap(),
            _ => MarginFamily::new(3, vec![vec![0], vec![1, 2]]).unwrap(),
        };
        let sys = polytope::margin_specified_system(&space, &fam, &margins_of(&p, &fam)).unwrap();
        prop_assert!(sys.matrix.cols() <= 12);
        let found: BTreeSet<Vec<Rational>> = polytope::enumerate_vertices(&sys).unwrap().into_iter().collect();
        prop_assert_eq!(&found, &brute_force_vertices(&sys));
        for v in &found {
            prop_assert!(sys.is_satisfied_by(v) && polytope::is_basic(&sys, v));
        }
    }

    #[test]
    fn two_way_dimension_for_positive_margins(a in prop::collection::vec(1i64..5, 2..4), b in prop::collection::vec(1i64..5, 2..4)) {
        let (m1, m2) = (a.len(), b.len());
        let (sa, sb): (i64, i64) = (a.iter().sum(), b.iter().sum());
        let space = StateSpace::new(vec![m1, m2]).unwrap();
        let fam = MarginFamily::new(2, vec![vec![0], vec![1]]).unwrap();
        let margin = |w: &[i64], s: i64, k: usize| {
            Distribution::from_exact(StateSpace::new(vec![k]).unwrap(), w.iter().map(|&v| Rational::new(v.into(), s.into())).collect()).unwrap()
        };
        let report = polytope::margin_specified_polytope(&space, &fam, &[margin(&a, sa, m1), margin(&b, sb, m2)]).unwrap();
        prop_assert_eq!(report.affine_dimension, (m1 - 1) * (m2 - 1));
        prop_assert_eq!(report.vertex_span_dimension(), (m1 - 1) * (m2 - 1));
    }
}

#[test]
fn rank_of_identity_and_zero() {
    assert_eq!(polytope::rank(&RationalMatrix::identity(5)), 5);
    assert_eq!(polytope::rank(&RationalMatrix::zeros(3, 4)), 0);
    let one = Rational::one();
    let m = RationalMatrix::from_rows(vec![vec![one.clone(), one.clone()], vec![one.clone(), one]]).unwrap();
    assert_eq!(polytope::rank(&m), 1);
}

#[test]
fn marginals_of_maximizers_are_maximizers() {
    for (n_alpha, n) in [(2, 3), (2, 4), (3, 2)] {
        let set = atlas::enumerate_i_maximizers(n_alpha, n).unwrap();
        for size in 2..=n {
            let sub = atlas::enumerate_i_maximizers(n_alpha, size).unwrap();
            for lambda in (0..n).combinations(size) {
                for p in &set.distributions {
                    assert!(
                        sub.contains(&dist::marginal(p, &lambda).unwrap()),
                        "{n_alpha} {n} {lambda:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn code_counts_and_distances() {
    for (n_alpha, n) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2)] {
        let all: Vec<_> = codes::enumerate_max_distance_codes(n_alpha, n).unwrap().collect();
        assert_eq!(all.len() as u128, codes::factorial(n_alpha).pow(n as u32 - 1));
        assert!(all.iter().all(|c| c.len() == n_alpha && c.is_max_distance()));
        let distinct: BTreeSet<_> = all.iter().map(|c| c.words().to_vec()).collect();
        assert_eq!(distinct.len(), all.len());
    }
}

#[test]
fn coset_partitions_are_equal_or_disjoint() {
    for n in [2, 3] {
        let parts: Vec<_> = codes::enumerate_all_partitions(3, n).unwrap().collect();
        for (a, b) in parts.iter().tuple_combinations() {
            let ka: BTreeSet<_> = a.parts().iter().map(|c| c.words().to_vec()).collect();
            let kb: BTreeSet<_> = b.parts().iter().map(|c| c.words().to_vec()).collect();
            assert!(ka == kb || ka.is_disjoint(&kb));
        }
    }
}

fn quick_config(seed: u64) -> SearchConfig {
    SearchConfig {
        restarts: 8,
        seed,
        ..SearchConfig::default()
    }
}

#[test]
fn search_iterates_stay_normalized_and_ascend() {
    let cases = [
        (Measure::MultiInformation, StateSpace::homogeneous(3, 2).unwrap()),
        (Measure::Fmi, StateSpace::homogeneous(3, 2).unwrap()),
        (
            Measure::Sfmi(Pairing::identity(2).unwrap()),
            StateSpace::homogeneous(4, 2).unwrap(),
        ),
        (
            Measure::BlockMutualInformation(BlockSplit::halves(4).unwrap()),
            StateSpace::homogeneous(4, 2).unwrap(),
        ),
    ];
    for (measure, space) in &cases {
        let res = search::maximize_measure(measure, space, &quick_config(11), None).unwrap();
        for r in &res.restarts {
            assert!(r.monotone, "{} restart {} decreased", measure.name(), r.restart);
            assert!(r.max_normalization_error < 1e-12);
            assert!(r.final_point.iter().all(|&v| v > 0.0));
        }
        assert!((res.best_value - measure.evaluate(&res.best_point).unwrap()).abs() < 1e-12);
        let known = measure.known_maximum(space).unwrap();
        assert!(
            (res.best_value - known).abs() < 1e-5,
            "{} reached {}",
            measure.name(),
            res.best_value
        );
    }
}

#[test]
fn search_is_deterministic_per_seed() {
    let space = StateSpace::homogeneous(3, 2).unwrap();
    let a = search::maximize_measure(&Measure::Fmi, &space, &quick_config(5), None).unwrap();
    let b = search::maximize_measure(&Measure::Fmi, &space, &quick_config(5), None).unwrap();
    assert_eq!(a.per_restart_values(), b.per_restart_values());
    assert_eq!(a.best_point, b.best_point);
}

#[test]
fn two_pair_maximizer_is_near_a_maximizer() {
    let space = StateSpace::homogeneous(2, 2).unwrap();
    let set = atlas::enumerate_i_maximizers(2, 2).unwrap();
    let res = search::maximize_measure(&Measure::MultiInformation, &space, &quick_config(1), Some(&set)).unwrap();
    assert!((res.best_value - 2f64.ln()).abs() < 1e-6);
    assert!(res.matched_maximizer.unwrap().total_variation < 1e-4);
}

#[test]
fn sfmi_optimum_lies_near_a_polytope() {
    let pairing = Pairing::identity(2).unwrap();
    let atlas = atlas::build_sfmi_atlas(2, 2, &pairing).unwrap();
    let space = StateSpace::homogeneous(4, 2).unwrap();
    let res = search::maximize_measure(&Measure::Sfmi(pairing.clone()), &space, &quick_config(9), None).unwrap();
    assert!((res.best_value - 2f64.ln()).abs() < 1e-6);
    let fam = MarginFamily::from_pairing(&pairing);
    let best = margins_of(&res.best_point, &fam);
    let distance = atlas
        .polytopes
        .iter()
        .map(|poly| {
            let target = margins_of(&poly.centroid, &fam);
            best.iter()
                .zip(&target)
                .map(|(a, b)| total_variation(&a.probabilities(), &b.probabilities()))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    assert!(distance < 1e-4, "margin distance {distance}");
}

#[test]
fn gradients_match_finite_differences() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let cases = [
        (Measure::MultiInformation, StateSpace::new(vec![3, 2, 2]).unwrap()),
        (
            Measure::ILambda(MarginFamily::new(4, vec![vec![0, 1], vec![1, 2, 3]]).unwrap()),
            StateSpace::homogeneous(4, 2).unwrap(),
        ),
        (
            Measure::Sfmi(Pairing::new(vec![1, 0]).unwrap()),
            StateSpace::homogeneous(4, 3).unwrap(),
        ),
    ];
    let h = 1e-6;
    for (measure, space) in &cases {
        let obj = Objective::new(measure, space).unwrap();
        for _ in 0..100 {
            let raw: Vec<f64> = (0..space.total()).map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let g = obj.gradient(&p).unwrap();
            let (mut diff, mut norm) = (0.0, 0.0);
            for x in 0..p.len() {
                let (mut up, mut down) = (p.clone(), p.clone());
                up[x] += h;
                down[x] -= h;
                let fd = (obj.value(&up) - obj.value(&down)) / (2.0 * h);
                diff += (fd - g[x]).powi(2);
                norm += g[x].powi(2);
            }
            assert!((diff / norm).sqrt() < 1e-5, "{}", measure.name());
        }
    }
}
