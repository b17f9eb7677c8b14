//! N-ary codes of maximal minimum distance and partitions of the full string
//! set into such codes.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ops::{self, Op};

pub type Word = Vec<usize>;

/// Default cap on enumerated codes.
pub const DEFAULT_CODE_CAP: u128 = 100_000;
/// Default cap on enumerated partitions.
pub const DEFAULT_PARTITION_CAP: u128 = 10_000;

pub fn hamming_distance(a: &[usize], b: &[usize]) -> Result<usize> {
    ops::record(Op::HammingDistance);
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// A set of words of equal length over `{0..alphabet-1}`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code {
    alphabet: usize,
    length: usize,
    words: Vec<Word>,
    min_distance: Option<usize>,
}

impl Code {
    pub fn new(alphabet: usize, mut words: Vec<Word>) -> Result<Self> {
        let length = words
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidCode("a code needs at least one word".into()))?;
        for w in &words {
            if w.len() != length {
                return Err(Error::InvalidCode(format!(
                    "word {w:?} has length {}, expected {length}",
                    w.len()
                )));
            }
            if let Some(&s) = w.iter().find(|&&s| s >= alphabet) {
                return Err(Error::InvalidCode(format!(
                    "symbol {s} outside alphabet of size {alphabet}"
                )));
            }
        }
        words.sort();
        if words.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::InvalidCode("repeated word".into()));
        }
        let mut min_distance = None;
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                let d = hamming_distance(a, b)?;
                min_distance = Some(min_distance.map_or(d, |m: usize| m.min(d)));
            }
        }
        Ok(Code {
            alphabet,
            length,
            words,
            min_distance,
        })
    }

    /// Builds the code `{(k, f_2(k), …, f_n(k))}` from one permutation per
    /// coordinate after the first.
    pub fn from_permutations(alphabet: usize, perms: &[&[usize]]) -> Result<Self> {
        let words = (0..alphabet)
            .map(|k| std::iter::once(k).chain(perms.iter().map(|p| p[k])).collect())
            .collect();
        Self::new(alphabet, words)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Minimum pairwise distance; `None` for a single-word code.
    pub fn min_distance(&self) -> Option<usize> {
        self.min_distance
    }

    /// Cardinality `N` and every pair of words differing in every coordinate.
    pub fn is_max_distance(&self) -> bool {
        self.words.len() == self.alphabet && self.min_distance.map_or(self.length >= 1, |d| d == self.length)
    }

    /// For a length-2 max-distance code, the permutation `σ` with words `(k, σ(k))`.
    pub fn as_permutation(&self) -> Result<Vec<usize>> {
        if self.length != 2 || !self.is_max_distance() {
            return Err(Error::InvalidCode(
                "only length-2 codes of cardinality N and distance 2 map to permutations".into(),
            ));
        }
        Ok(self.words.iter().map(|w| w[1]).collect())
    }

    /// Words rendered as digit strings (`0-9` then `a-z`).
    pub fn to_strings(&self) -> Vec<String> {
        self.words.iter().map(|w| word_to_string(w)).collect()
    }
}

pub fn word_to_string(word: &[usize]) -> String {
    word.iter()
        .map(|&s| std::char::from_digit(s as u32, 36).unwrap_or('?'))
        .collect()
}

pub fn word_from_str(s: &str, alphabet: usize) -> Result<Word> {
    s.chars()
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as usize)
                .filter(|&d| d < alphabet)
                .ok_or_else(|| Error::InvalidCode(format!("symbol `{c}` not in alphabet of size {alphabet}")))
        })
        .collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations_lex(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

pub(crate) fn checked_pow(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

fn check_alphabet(alphabet: usize, length: usize) -> Result<()> {
    if alphabet < 2 {
        return Err(Error::InvalidArgument("alphabet size must be at least 2".into()));
    }
    if length < 1 {
        return Err(Error::InvalidArgument("code length must be at least 1".into()));
    }
    Ok(())
}

/// Iterator over every max-distance code, in lexicographic order of the
/// permutation tuple `(π_2, …, π_n)`.
#[derive(Debug)]
pub struct MaxDistanceCodes {
    alphabet: usize,
    perms: Vec<Vec<usize>>,
    odometer: Vec<usize>,
    done: bool,
}

impl Iterator for MaxDistanceCodes {
    type Item = Code;

    fn next(&mut self) -> Option<Code> {
        if self.done {
            return None;
        }
        let chosen: Vec<&[usize]> = self.odometer.iter().map(|&i| self.perms[i].as_slice()).collect();
        let code = Code::from_permutations(self.alphabet, &chosen).expect("permutations give a valid code");
        self.done = true;
        for slot in self.odometer.iter_mut().rev() {
            *slot += 1;
            if *slot < self.perms.len() {
                self.done = false;
                break;
            }
            *slot = 0;
        }
        Some(code)
    }
}

pub fn enumerate_max_distance_codes(alphabet: usize, length: usize) -> Result<MaxDistanceCodes> {
    enumerate_max_distance_codes_capped(alphabet, length, DEFAULT_CODE_CAP)
}

/// `N!^{n−1}` codes; errors if that exceeds `cap`.
pub fn enumerate_max_distance_codes_capped(alphabet: usize, length: usize, cap: u128) -> Result<MaxDistanceCodes> {
    ops::record(Op::EnumerateMaxDistanceCodes);
    check_alphabet(alphabet, length)?;
    let required = checked_pow(factorial(alphabet), length - 1);
    if required > cap {
        return Err(Error::CapExceeded {
            what: "max-distance code enumeration",
            cap,
            required,
        });
    }
    Ok(MaxDistanceCodes {
        alphabet,
        perms: permutations_lex(alphabet),
        odometer: vec![0; length - 1],
        done: false,
    })
}

/// A partition of all `N^n` strings into max-distance codes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodePartition {
    parts: Vec<Code>,
}

impl CodePartition {
    /// Validates the parts and sorts them by smallest word.
    pub fn new(mut parts: Vec<Code>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidCode("a partition needs at least one part".into()))?;
        let (alphabet, length) = (first.alphabet, first.length);
        let mut seen = BTreeSet::new();
        for part in &parts {
            if part.alphabet != alphabet || part.length != length {
                return Err(Error::InvalidCode("parts have different shapes".into()));
            }
            if !part.is_max_distance() {
                return Err(Error::InvalidCode(format!(
                    "part {:?} is not a max-distance code",
                    part.to_strings()
                )));
            }
            for w in &part.words {
                if !seen.insert(w.clone()) {
                    return Err(Error::InvalidCode(format!(
                        "word {} occurs in two parts",
                        word_to_string(w)
                    )));
                }
            }
        }
        let total = checked_pow(alphabet as u128, length);
        if seen.len() as u128 != total {
            return Err(Error::InvalidCode(format!(
                "parts cover {} of {total} strings",
                seen.len()
            )));
        }
        parts.sort_by(|a, b| a.words[0].cmp(&b.words[0]));
        Ok(CodePartition { parts })
    }

    pub fn parts(&self) -> &[Code] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// The circular-shift partition: codes `{(u, u+t_2, …, u+t_n) mod N}`.
pub fn partition_into_codes(alphabet: usize, length: usize) -> Result<CodePartition> {
    ops::record(Op::PartitionIntoCodes);
    check_alphabet(alphabet, length)?;
    let identity: Vec<usize> = (0..alphabet).collect();
    let maps = vec![identity; length - 1];
    shifted_partition(alphabet, length, &maps)
}

/// Parts `{(u, τ_2(u+t_2), …, τ_n(u+t_n))}` over all shift tuples `t`.
fn shifted_partition(alphabet: usize, length: usize, taus: &[Vec<usize>]) -> Result<CodePartition> {
    let count = checked_pow(alphabet as u128, length - 1) as usize;
    let mut parts = Vec::with_capacity(count);
    let mut shifts = vec![0usize; length - 1];
    for _ in 0..count {
        let words = (0..alphabet)
            .map(|u| {
                std::iter::once(u)
                    .chain(shifts.iter().zip(taus).map(|(&t, tau)| tau[(u + t) % alphabet]))
                    .collect()
            })
            .collect();
        parts.push(Code::new(alphabet, words)?);
        for s in shifts.iter_mut().rev() {
            *s += 1;
            if *s < alphabet {
                break;
            }
            *s = 0;
        }
    }
    CodePartition::new(parts)
}

/// Iterator over the partitions obtained from coset representatives of the
/// circular shifts: `τ_i` ranges over permutations with `τ_i(0) = 0`.
#[derive(Debug)]
pub struct CosetPartitions {
    alphabet: usize,
    length: usize,
    reps: Vec<Vec<usize>>,
    odometer: Vec<usize>,
    done: bool,
}

impl Iterator for CosetPartitions {
    type Item = CodePartition;

    fn next(&mut self) -> Option<CodePartition> {
        if self.done {
            return None;
        }
        let taus: Vec<Vec<usize>> = self.odometer.iter().map(|&i| self.reps[i].clone()).collect();
        let partition =
            shifted_partition(self.alphabet, self.length, &taus).expect("coset construction is a partition");
        self.done = true;
        for slot in self.odometer.iter_mut().rev() {
            *slot += 1;
            if *slot < self.reps.len() {
                self.done = false;
                break;
            }
            *slot = 0;
        }
        Some(partition)
    }
}

pub fn enumerate_all_partitions(alphabet: usize, length: usize) -> Result<CosetPartitions> {
    enumerate_all_partitions_capped(alphabet, length, DEFAULT_PARTITION_CAP)
}

/// `(N−1)!^{n−1}` partitions; errors if that exceeds `cap`.
pub fn enumerate_all_partitions_capped(alphabet: usize, length: usize, cap: u128) -> Result<CosetPartitions> {
    ops::record(Op::EnumerateAllPartitions);
    check_alphabet(alphabet, length)?;
    let required = checked_pow(factorial(alphabet - 1), length - 1);
    if required > cap {
        return Err(Error::CapExceeded {
            what: "partition enumeration",
            cap,
            required,
        });
    }
    let reps = permutations_lex(alphabet).into_iter().filter(|p| p[0] == 0).collect();
    Ok(CosetPartitions {
        alphabet,
        length,
        reps,
        odometer: vec![0; length - 1],
        done: false,
    })
}

/// `N` edge-disjoint perfect matchings `{(u, u+t mod N)}`, `t = 1..N`.
pub fn bipartite_matchings_partition(n: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    ops::record(Op::BipartiteMatchingsPartition);
    if n == 0 {
        return Err(Error::InvalidArgument("graph needs at least one node per side".into()));
    }
    Ok((1..=n).map(|t| (0..n).map(|u| (u, (u + t) % n)).collect()).collect())
}

/// Counts every partition of the string set into max-distance codes by
/// exact-cover search, including those outside the coset family.
pub fn count_partitions_exhaustive(alphabet: usize, length: usize, cap: u128) -> Result<u128> {
    let codes: Vec<Code> = enumerate_max_distance_codes_capped(alphabet, length, cap)?.collect();
    let total = checked_pow(alphabet as u128, length) as usize;
    let index = |w: &[usize]| w.iter().fold(0, |acc, &s| acc * alphabet + s);
    let masks: Vec<Vec<usize>> = codes
        .iter()
        .map(|c| c.words.iter().map(|w| index(w)).collect())
        .collect();
    let mut by_word: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (ci, m) in masks.iter().enumerate() {
        for &w in m {
            by_word[w].push(ci);
        }
    }

    fn search(covered: &mut Vec<bool>, masks: &[Vec<usize>], by_word: &[Vec<usize>], count: &mut u128) {
        let Some(first) = covered.iter().position(|c| !c) else {
            *count += 1;
            return;
        };
        for &ci in &by_word[first] {
            if masks[ci].iter().all(|&w| !covered[w]) {
                for &w in &masks[ci] {
                    covered[w] = true;
                }
                search(covered, masks, by_word, count);
                for &w in &masks[ci] {
                    covered[w] = false;
                }
            }
        }
    }

    let mut count = 0;
    search(&mut vec![false; total], &masks, &by_word, &mut count);
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(code: &Code) -> Vec<String> {
        code.to_strings()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&[0, 0, 0, 0], &[0, 0, 0, 0]).unwrap(), 0);
        assert_eq!(hamming_distance(&[0, 0, 0, 0], &[1, 1, 1, 1]).unwrap(), 4);
        assert_eq!(hamming_distance(&[0, 1, 0, 2], &[2, 1, 0, 2]).unwrap(), 1);
        assert!(hamming_distance(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn binary_pair_codes() {
        let codes: Vec<Vec<String>> = enumerate_max_distance_codes(2, 2)
            .unwrap()
            .map(|c| strings(&c))
            .collect();
        assert_eq!(codes, vec![vec!["00", "11"], vec!["01", "10"]]);
    }

    #[test]
    fn ternary_pair_codes_are_the_six_permutations() {
        let codes: Vec<Vec<usize>> = enumerate_max_distance_codes(3, 2)
            .unwrap()
            .map(|c| c.as_permutation().unwrap())
            .collect();
        assert_eq!(codes, permutations_lex(3));
    }

    #[test]
    fn code_validation() {
        assert!(Code::new(2, vec![vec![0, 0], vec![0, 0]]).is_err());
        assert!(Code::new(2, vec![vec![0, 2]]).is_err());
        assert!(Code::new(2, vec![vec![0], vec![0, 1]]).is_err());
        let c = Code::new(3, vec![vec![0, 1], vec![1, 1], vec![2, 0]]).unwrap();
        assert_eq!(c.min_distance(), Some(1));
        assert!(!c.is_max_distance());
        assert!(c.as_permutation().is_err());
    }

    #[test]
    fn circular_shift_partitions() {
        let p = partition_into_codes(2, 2).unwrap();
        let parts: Vec<Vec<String>> = p.parts().iter().map(strings).collect();
        assert_eq!(parts, vec![vec!["00", "11"], vec!["01", "10"]]);
        assert_eq!(partition_into_codes(3, 2).unwrap().len(), 3);
        let p = partition_into_codes(2, 3).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.parts().iter().all(|c| c.min_distance() == Some(3)));
    }

    #[test]
    fn partition_rejects_overlap_and_gaps() {
        let a = Code::new(2, vec![vec![0, 0], vec![1, 1]]).unwrap();
        let b = Code::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(CodePartition::new(vec![a.clone(), a.clone()]).is_err());
        assert!(CodePartition::new(vec![a.clone()]).is_err());
        assert!(CodePartition::new(vec![b, a]).is_ok());
    }

    #[test]
    fn partition_counts() {
        for n in 1..=4 {
            assert_eq!(enumerate_all_partitions(2, n).unwrap().count(), 1);
        }
        assert_eq!(enumerate_all_partitions(3, 2).unwrap().count(), 2);
        assert_eq!(enumerate_all_partitions(3, 3).unwrap().count(), 4);
        assert_eq!(enumerate_all_partitions(4, 2).unwrap().count(), 6);
    }

    #[test]
    fn caps_are_enforced() {
        let err = enumerate_max_distance_codes_capped(3, 3, 10).err().unwrap();
        assert_eq!(
            err,
            Error::CapExceeded {
                what: "max-distance code enumeration",
                cap: 10,
                required: 36
            }
        );
        assert!(enumerate_all_partitions_capped(5, 3, 100).is_err());
    }

    #[test]
    fn matchings() {
        assert_eq!(bipartite_matchings_partition(1).unwrap(), vec![vec![(0, 0)]]);
        assert_eq!(
            bipartite_matchings_partition(2).unwrap(),
            vec![vec![(0, 1), (1, 0)], vec![(0, 0), (1, 1)]]
        );
        assert!(bipartite_matchings_partition(0).is_err());
    }

    #[test]
    fn exhaustive_search_finds_more_than_the_coset_family() {
        assert_eq!(count_partitions_exhaustive(3, 2, 1000).unwrap(), 2);
        assert_eq!(count_partitions_exhaustive(2, 3, 1000).unwrap(), 1);
        // Partitions outside the constructed family exist from N=4 (n=2) and N=3 (n=3).
        assert_eq!(count_partitions_exhaustive(4, 2, 1000).unwrap(), 24);
        assert_eq!(count_partitions_exhaustive(3, 3, 1000).unwrap(), 40);
    }

    #[test]
    fn string_rendering() {
        assert_eq!(word_to_string(&[0, 1, 10, 35]), "01az");
        assert_eq!(word_from_str("0102", 3).unwrap(), vec![0, 1, 0, 2]);
        assert!(word_from_str("03", 3).is_err());
    }
}
