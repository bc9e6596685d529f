//! Permutations in one-line notation.
//!
//! A [`Permutation`] of `n` cards is the word `w(1) w(2) … w(n)`: position `i`
//! (counted from the top of the deck) holds the card labelled `w(i)`. A deck
//! that starts in order `1 … n` and is shuffled once ends up reading `w`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qsym::{DescentSet, Partition};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from a one-line word with labels `1..=n`.
    pub fn new(word: Vec<usize>) -> Result<Self> {
        let n = word.len();
        if n == 0 {
            return Err(Error::invalid("permutation must have at least one letter"));
        }
        let mut seen = vec![false; n];
        for &label in &word {
            if label == 0 || label > n {
                return Err(Error::invalid(format!("label {label} outside 1..={n}")));
            }
            if std::mem::replace(&mut seen[label - 1], true) {
                return Err(Error::invalid(format!("label {label} repeated")));
            }
        }
        Ok(Permutation { word })
    }

    pub(crate) fn from_word_unchecked(word: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(word.clone()).is_ok());
        Permutation { word }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            word: (1..=n).collect(),
        }
    }

    /// The word `n (n-1) … 1`.
    pub fn reversal(n: usize) -> Self {
        Permutation {
            word: (1..=n).rev().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    /// Label at 1-based position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.word[i - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (pos, &label) in self.word.iter().enumerate() {
            inv[label - 1] = pos + 1;
        }
        Permutation { word: inv }
    }

    /// Function composition `self ∘ other`, i.e. `i ↦ self(other(i))`.
    ///
    /// Shuffling with `self` and then with `other` leaves the deck reading
    /// `self.compose(other)`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::invalid(format!(
                "cannot compose permutations of sizes {} and {}",
                self.n(),
                other.n()
            )));
        }
        Ok(Permutation {
            word: other.word.iter().map(|&i| self.word[i - 1]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().enumerate().all(|(i, &l)| l == i + 1)
    }

    /// Positions `i` with `w(i) > w(i+1)`.
    pub fn descent_set(&self) -> DescentSet {
        let elems = self
            .word
            .windows(2)
            .enumerate()
            .filter(|(_, p)| p[0] > p[1])
            .map(|(i, _)| i + 1)
            .collect();
        DescentSet::from_sorted_unchecked(elems, self.n())
    }

    /// Descent set of the inverse: values `i` such that `i + 1` sits above `i`.
    pub fn ides(&self) -> DescentSet {
        let mut pos = vec![0; self.n() + 1];
        for (p, &label) in self.word.iter().enumerate() {
            pos[label] = p;
        }
        let elems = (1..self.n()).filter(|&i| pos[i] > pos[i + 1]).collect();
        DescentSet::from_sorted_unchecked(elems, self.n())
    }

    pub fn cycle_type(&self) -> CycleType {
        let n = self.n();
        let mut visited = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                i = self.word[i] - 1;
                len += 1;
            }
            lengths.push(len);
        }
        CycleType::from_lengths(lengths)
    }

    /// `+1` for even permutations, `-1` for odd ones.
    pub fn sign(&self) -> i8 {
        let ct = self.cycle_type();
        if (self.n() - ct.partition().len()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Position of this permutation in the lexicographic order used by
    /// [`enumerate_sn`] (0 for the identity).
    pub fn lex_rank(&self) -> usize {
        let n = self.n();
        let mut used = vec![false; n + 1];
        let mut rank = 0usize;
        for (i, &label) in self.word.iter().enumerate() {
            let smaller_unused = (1..label).filter(|&l| !used[l]).count();
            rank = rank * (n - i) + smaller_unused;
            used[label] = true;
        }
        rank
    }

    /// Inverse of [`Permutation::lex_rank`].
    pub fn from_lex_rank(n: usize, mut rank: usize) -> Self {
        let mut digits = vec![0; n];
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut pool: Vec<usize> = (1..=n).collect();
        let word = digits.into_iter().map(|d| pool.remove(d)).collect();
        Permutation { word }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for l in &self.word {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.word.iter().map(|l| l.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts `231` (single digits) or `2,3,1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let word: Option<Vec<usize>> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
        };
        let word = word.ok_or_else(|| Error::invalid(format!("cannot parse permutation `{s}`")))?;
        Permutation::new(word)
    }
}

/// Cycle type of a permutation: the partition of `n` formed by cycle lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleType {
    partition: Partition,
}

impl CycleType {
    fn from_lengths(mut lengths: Vec<usize>) -> Self {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        CycleType {
            partition: Partition::from_sorted_unchecked(lengths),
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Number of `i`-cycles.
    pub fn count(&self, i: usize) -> usize {
        self.partition.multiplicity(i)
    }
}

/// Chen–Fox–Lyndon factorization of a word into non-increasing Lyndon words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LyndonFactorization<T> {
    factors: Vec<Vec<T>>,
}

impl<T> LyndonFactorization<T> {
    pub fn factors(&self) -> &[Vec<T>] {
        &self.factors
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.factors.iter().map(Vec::len).collect()
    }
}

/// Duval's linear-time factorization.
pub fn lyndon_factorization<T: Ord + Clone>(word: &[T]) -> Result<LyndonFactorization<T>> {
    if word.is_empty() {
        return Err(Error::invalid("cannot factor the empty word"));
    }
    let n = word.len();
    let mut factors = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        let mut k = i;
        while j < n && word[k] <= word[j] {
            if word[k] < word[j] {
                k = i;
            } else {
                k += 1;
            }
            j += 1;
        }
        let period = j - k;
        while i <= k {
            factors.push(word[i..i + period].to_vec());
            i += period;
        }
    }
    Ok(LyndonFactorization { factors })
}

/// A word is Lyndon when it is strictly smaller than each of its proper
/// rotations.
pub fn is_lyndon<T: Ord>(word: &[T]) -> bool {
    let n = word.len();
    n > 0
        && (1..n).all(|r| {
            let rotated = word[r..].iter().chain(&word[..r]);
            word.iter().cmp(rotated) == std::cmp::Ordering::Less
        })
}

pub const DEFAULT_ENUM_CAP: usize = 10;

/// All permutations of `1..=n` in lexicographic order.
pub fn enumerate_sn(n: usize, cap: usize) -> Result<SymmetricGroupIter> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if n > cap {
        return Err(Error::Capacity {
            what: "permutation enumeration",
            requested: n as u128,
            cap: cap as u128,
            hint: "lower n or raise --enum-cap",
        });
    }
    Ok(SymmetricGroupIter {
        next: Some((1..=n).collect()),
    })
}

pub struct SymmetricGroupIter {
    next: Option<Vec<usize>>,
}

impl Iterator for SymmetricGroupIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { word: current })
    }
}

fn next_permutation(w: &mut [usize]) -> bool {
    let n = w.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, HashSet};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn descents() {
        assert_eq!(p("231").descent_set().elements(), &[2]);
        assert!(Permutation::identity(5).descent_set().is_empty());
        assert_eq!(Permutation::reversal(4).descent_set().elements(), &[1, 2, 3]);
    }

    #[test]
    fn inverse_descents() {
        assert_eq!(p("231").inverse(), p("312"));
        assert_eq!(p("231").ides().elements(), &[1]);
        assert!(Permutation::identity(4).ides().is_empty());
        assert_eq!(Permutation::reversal(5).ides().elements(), &[1, 2, 3, 4]);
    }

    #[test]
    fn cycle_types_and_signs() {
        assert_eq!(p("231").cycle_type().partition().parts(), &[3]);
        assert_eq!(p("231").cycle_type().count(3), 1);
        assert_eq!(
            Permutation::identity(4).cycle_type().partition().parts(),
            &[1, 1, 1, 1]
        );
        assert_eq!(p("2143").cycle_type().partition().parts(), &[2, 2]);
        assert_eq!(Permutation::identity(3).sign(), 1);
        assert_eq!(p("213").sign(), -1);
        assert_eq!(p("231").sign(), 1);
    }

    #[test]
    fn rejects_bad_words() {
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
        assert!("12a".parse::<Permutation>().is_err());
        assert_eq!(
            "10,9,8,7,6,5,4,3,2,1".parse::<Permutation>().unwrap(),
            Permutation::reversal(10)
        );
    }

    #[test]
    fn lyndon_examples() {
        let f = lyndon_factorization(&[2, 3, 6, 4, 1, 5]).unwrap();
        assert_eq!(f.factors(), &[vec![2, 3, 6, 4], vec![1, 5]]);
        let rev: Vec<usize> = (1..=6).rev().collect();
        assert_eq!(lyndon_factorization(&rev).unwrap().lengths(), vec![1; 6]);
        let id: Vec<usize> = (1..=7).collect();
        assert!(is_lyndon(&id));
        assert_eq!(
            lyndon_factorization(&id).unwrap().factors(),
            std::slice::from_ref(&id)
        );
        assert!(lyndon_factorization::<usize>(&[]).is_err());
        assert!(is_lyndon(&[1, 3, 2]));
        assert!(!is_lyndon(&[2, 1, 3]));
    }

    #[test]
    fn lyndon_factors_are_valid_for_all_small_words() {
        for n in 1..=7 {
            for w in enumerate_sn(n, 10).unwrap() {
                let f = lyndon_factorization(w.word()).unwrap();
                let concat: Vec<usize> = f.factors().concat();
                assert_eq!(concat, w.word());
                assert!(f.factors().iter().all(|l| is_lyndon(l)));
                assert!(f.factors().windows(2).all(|p| p[0] >= p[1]));
            }
        }
    }

    #[test]
    fn lyndon_shapes_match_cycle_types() {
        for n in 1..=7 {
            let mut by_lyndon: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut by_cycles: HashMap<Vec<usize>, usize> = HashMap::new();
            for w in enumerate_sn(n, 10).unwrap() {
                let mut l = lyndon_factorization(w.word()).unwrap().lengths();
                l.sort_unstable_by(|a, b| b.cmp(a));
                *by_lyndon.entry(l).or_default() += 1;
                *by_cycles
                    .entry(w.cycle_type().partition().parts().to_vec())
                    .or_default() += 1;
            }
            assert_eq!(by_lyndon, by_cycles, "n = {n}");
        }
    }

    #[test]
    fn enumeration() {
        assert_eq!(enumerate_sn(1, 10).unwrap().collect::<Vec<_>>(), vec![p("1")]);
        assert_eq!(enumerate_sn(3, 10).unwrap().count(), 6);
        let all: HashSet<_> = enumerate_sn(4, 10).unwrap().collect();
        assert_eq!(all.len(), 24);
        assert!(matches!(enumerate_sn(11, 10), Err(Error::Capacity { .. })));
        assert!(enumerate_sn(0, 10).is_err());
    }

    #[test]
    fn lex_rank_round_trip() {
        for (i, w) in enumerate_sn(5, 10).unwrap().enumerate() {
            assert_eq!(w.lex_rank(), i);
            assert_eq!(Permutation::from_lex_rank(5, i), w);
        }
    }

    #[test]
    fn sign_is_multiplicative() {
        for n in 1..=6 {
            let all: Vec<_> = enumerate_sn(n, 10).unwrap().collect();
            for a in &all {
                assert_eq!(a.compose(&a.inverse()).unwrap(), Permutation::identity(n));
                assert_eq!(a.inverse().inverse(), *a);
                for b in &all {
                    assert_eq!(a.compose(b).unwrap().sign(), a.sign() * b.sign());
                }
            }
        }
    }

    #[test]
    fn ides_is_descents_of_inverse() {
        for n in 1..=7 {
            for w in enumerate_sn(n, 10).unwrap() {
                assert_eq!(w.ides(), w.inverse().descent_set());
            }
        }
    }
}
