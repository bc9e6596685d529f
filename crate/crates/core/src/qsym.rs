//! Compositions, partitions, and evaluation of quasisymmetric and symmetric
//! functions at a finite list of variables.
//!
//! Evaluations are order-sensitive: a quasisymmetric function at `(x, y)` and
//! at `(y, x)` generally differ (e.g. `Q_{1}` of degree 3 gives `x y²` versus
//! `y x²`). Weight vectors are never sorted.

use std::fmt;
use std::ops::Deref;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A subset of `{1, …, n-1}`, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DescentSet {
    elements: Vec<usize>,
    n: usize,
}

impl DescentSet {
    pub fn new(mut elements: Vec<usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("ambient size n must be at least 1"));
        }
        elements.sort_unstable();
        elements.dedup();
        if let Some(&bad) = elements.iter().find(|&&e| e == 0 || e >= n) {
            return Err(Error::invalid(format!("subset element {bad} not in 1..{n}")));
        }
        Ok(DescentSet { elements, n })
    }

    pub(crate) fn from_sorted_unchecked(elements: Vec<usize>, n: usize) -> Self {
        DescentSet { elements, n }
    }

    pub fn empty(n: usize) -> Self {
        DescentSet {
            elements: Vec::new(),
            n,
        }
    }

    /// `{1, …, n-1}`.
    pub fn full(n: usize) -> Self {
        DescentSet {
            elements: (1..n).collect(),
            n,
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.elements.binary_search(&i).is_ok()
    }

    pub fn is_superset_of(&self, other: &DescentSet) -> bool {
        self.n == other.n && other.elements.iter().all(|&e| self.contains(e))
    }

    /// Bitmask with bit `i-1` set for each element `i`. Requires `n <= 64`.
    pub fn mask(&self) -> u64 {
        self.elements.iter().fold(0u64, |m, &e| m | (1 << (e - 1)))
    }

    pub fn from_mask(mask: u64, n: usize) -> Self {
        let elements = (1..n).filter(|&i| mask & (1 << (i - 1)) != 0).collect();
        DescentSet { elements, n }
    }

    pub fn to_composition(&self) -> Composition {
        let mut parts = Vec::with_capacity(self.elements.len() + 1);
        let mut prev = 0;
        for &d in &self.elements {
            parts.push(d - prev);
            prev = d;
        }
        parts.push(self.n - prev);
        Composition { parts }
    }

    /// All subsets of `{1, …, n-1}`.
    pub fn all(n: usize) -> impl Iterator<Item = DescentSet> {
        assert!((1..=63).contains(&n), "subset enumeration supports 1 <= n <= 63");
        (0..1u64 << (n - 1)).map(move |m| DescentSet::from_mask(m, n))
    }
}

impl fmt::Display for DescentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("composition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(Error::invalid("composition parts must be positive"));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Partial sums `{α1, α1+α2, …}` (all but the last).
    pub fn to_descent_set(&self) -> DescentSet {
        let mut acc = 0;
        let elements = self.parts[..self.parts.len() - 1]
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        DescentSet::from_sorted_unchecked(elements, self.total())
    }

    pub fn from_descent_set(d: &DescentSet) -> Self {
        d.to_composition()
    }

    /// True when consecutive blocks of `self` sum to the parts of `coarser`.
    pub fn refines(&self, coarser: &Composition) -> Result<bool> {
        if self.total() != coarser.total() {
            return Err(Error::invalid(format!(
                "compositions of different totals ({} vs {})",
                self.total(),
                coarser.total()
            )));
        }
        let mut it = self.parts.iter();
        for &target in &coarser.parts {
            let mut acc = 0;
            while acc < target {
                match it.next() {
                    Some(p) => acc += p,
                    None => return Ok(false),
                }
            }
            if acc != target {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every composition refining `self`, i.e. whose descent set contains
    /// `self`'s. There are `2^(n-1-|D|)` of them.
    pub fn refinements(&self) -> Vec<Composition> {
        let n = self.total();
        let base = self.to_descent_set();
        let free: Vec<usize> = (1..n).filter(|&i| !base.contains(i)).collect();
        (0..1u64 << free.len())
            .map(|m| {
                let mut elems = base.elements().to_vec();
                elems.extend(
                    free.iter()
                        .enumerate()
                        .filter(|(b, _)| m & (1 << b) != 0)
                        .map(|(_, &i)| i),
                );
                elems.sort_unstable();
                DescentSet::from_sorted_unchecked(elems, n).to_composition()
            })
            .collect()
    }
}

/// Integer partition with parts in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::invalid("partition parts must be positive"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub(crate) fn from_sorted_unchecked(parts: Vec<usize>) -> Self {
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of parts, ℓ(λ).
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts equal to `i`.
    pub fn multiplicity(&self, i: usize) -> usize {
        self.parts.iter().filter(|&&p| p == i).count()
    }

    /// `(part, multiplicity)` pairs, largest part first.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// `(-1)^(n - ℓ(λ))`.
    pub fn sign(&self) -> i8 {
        if (self.total() - self.len()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `z_λ = Π i^{n_i} n_i!`.
    pub fn z(&self) -> BigUint {
        z_of(self)
    }

    /// Number of permutations with this cycle type, `n!/z_λ`.
    pub fn class_size(&self) -> BigUint {
        crate::scalar::factorial(self.total() as u64) / self.z()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn z_of(lambda: &Partition) -> BigUint {
    let mut z = BigUint::one();
    for (part, mult) in lambda.multiplicities() {
        for m in 1..=mult {
            z *= part * m;
        }
    }
    z
}

/// All partitions of `n`, starting at `(n)` and ending at `(1,…,1)`.
/// `partitions_of(0)` yields the single empty partition.
pub fn partitions_of(n: usize) -> PartitionIter {
    PartitionIter {
        next: Some(if n == 0 { Vec::new() } else { vec![n] }),
    }
}

pub struct PartitionIter {
    next: Option<Vec<usize>>,
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let current = self.next.take()?;
        self.next = next_partition(&current);
        Some(Partition { parts: current })
    }
}

// Reverse-lexicographic successor.
fn next_partition(p: &[usize]) -> Option<Vec<usize>> {
    let mut parts = p.to_vec();
    let mut ones = 0;
    while parts.last() == Some(&1) {
        parts.pop();
        ones += 1;
    }
    let last = parts.pop()?;
    let k = last - 1;
    let mut rem = ones + 1;
    parts.push(k);
    while rem > k {
        parts.push(k);
        rem -= k;
    }
    if rem > 0 {
        parts.push(rem);
    }
    Some(parts)
}

/// Ordered list of real weights (variables).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<S> {
    weights: Vec<S>,
}

impl<S: Scalar> WeightVector<S> {
    /// Entries must lie in `[0, 1]`.
    pub fn new(weights: Vec<S>) -> Result<Self> {
        if weights.iter().any(|w| *w < S::zero() || *w > S::one()) {
            return Err(Error::invalid("weights must lie in [0, 1]"));
        }
        Ok(WeightVector { weights })
    }

    /// Additionally requires the entries to sum to one (exactly on the exact
    /// backend, within `1e-12` on floats).
    pub fn probability(weights: Vec<S>) -> Result<Self> {
        let v = Self::new(weights)?;
        if v.is_empty() {
            return Err(Error::invalid("probability vector must be non-empty"));
        }
        let total = S::sum_all(v.weights.iter().cloned());
        let ok = match S::BACKEND {
            crate::scalar::Backend::Exact => total == S::one(),
            crate::scalar::Backend::Float => (total.to_f64() - 1.0).abs() <= 1e-12,
        };
        if !ok {
            return Err(Error::invalid(format!(
                "weights sum to {} instead of 1",
                total.to_f64()
            )));
        }
        Ok(v)
    }

    pub fn into_inner(self) -> Vec<S> {
        self.weights
    }
}

impl<S> Deref for WeightVector<S> {
    type Target = [S];
    fn deref(&self) -> &[S] {
        &self.weights
    }
}

/// `M_α(x) = Σ_{i1<…<ia} x_{i1}^{α1} ⋯ x_{ia}^{αa}`.
pub fn eval_monomial<S: Scalar>(alpha: &Composition, x: &[S]) -> S {
    // acc[j] = sum over choices of the first j parts using the variables seen so far.
    let a = alpha.len();
    let mut acc = vec![S::zero(); a + 1];
    acc[0] = S::one();
    for xi in x {
        let pows: Vec<S> = alpha.parts().iter().map(|&p| xi.powu(p as u64)).collect();
        for j in (1..=a).rev() {
            let mut t = acc[j - 1].clone();
            t *= &pows[j - 1];
            acc[j] += &t;
        }
    }
    acc.swap_remove(a)
}

/// Gessel's fundamental quasisymmetric function `Q_D(x)`: the sum over weakly
/// increasing index sequences `i1 ≤ … ≤ in`, strictly increasing at each
/// position in `D`, of `x_{i1} ⋯ x_{in}`.
///
/// Runs in `O(n·m)` for `m` variables.
pub fn eval_fundamental<S: Scalar>(d: &DescentSet, x: &[S]) -> S {
    let m = x.len();
    if m == 0 {
        return S::zero();
    }
    // dp[v]: weight of all admissible prefixes whose last index is v.
    let mut dp: Vec<S> = x.to_vec();
    for j in 1..d.n() {
        let strict = d.contains(j);
        let mut prefix = S::zero();
        let mut next = Vec::with_capacity(m);
        for v in 0..m {
            if !strict {
                prefix += &dp[v];
            }
            let mut t = prefix.clone();
            t *= &x[v];
            next.push(t);
            if strict {
                prefix += &dp[v];
            }
        }
        dp = next;
    }
    S::sum_all(dp)
}

/// Elementary symmetric function `e_n(x)`.
pub fn eval_elementary<S: Scalar>(n: usize, x: &[S]) -> S {
    let mut e = vec![S::zero(); n + 1];
    e[0] = S::one();
    for xi in x {
        for j in (1..=n).rev() {
            let mut t = e[j - 1].clone();
            t *= xi;
            e[j] += &t;
        }
    }
    e.swap_remove(n)
}

/// Complete homogeneous symmetric function `h_n(x)`.
pub fn eval_complete<S: Scalar>(n: usize, x: &[S]) -> S {
    let mut h = vec![S::zero(); n + 1];
    h[0] = S::one();
    for xi in x {
        for j in 1..=n {
            let mut t = h[j - 1].clone();
            t *= xi;
            h[j] += &t;
        }
    }
    h.swap_remove(n)
}

/// Power sum `p_n(x) = Σ x_i^n`.
pub fn eval_power<S: Scalar>(n: usize, x: &[S]) -> S {
    S::sum_all(x.iter().map(|xi| xi.powu(n as u64)))
}

/// `p_λ(x) = Π p_{λ_i}(x)`.
pub fn eval_power_partition<S: Scalar>(lambda: &Partition, x: &[S]) -> S {
    let mut acc = S::one();
    for (part, mult) in lambda.multiplicities() {
        acc *= &eval_power(part, x).powu(mult as u64);
    }
    acc
}

/// `Σ_λ ε^? z_λ^{-1} p_λ(x)` over partitions of `n`: `e_n` when
/// `alternating`, `h_n` otherwise.
pub fn power_sum_expansion<S: Scalar>(n: usize, x: &[S], alternating: bool) -> S {
    let terms = partitions_of(n).map(|lambda| {
        let z = S::from_biguint(&lambda.z());
        let mut t = eval_power_partition(&lambda, x) / z;
        if alternating && lambda.sign() < 0 {
            t = -t;
        }
        t
    });
    S::sum_all(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::from_ratio(a, b)
    }

    fn comp(p: &[usize]) -> Composition {
        Composition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn subset_composition_bijection() {
        assert_eq!(comp(&[1, 2, 1]).to_descent_set().elements(), &[1, 3]);
        assert!(comp(&[5]).to_descent_set().is_empty());
        let d = DescentSet::new(vec![1], 4).unwrap();
        assert_eq!(d.to_composition(), comp(&[1, 3]));
        assert!(DescentSet::new(vec![4], 4).is_err());
        assert!(DescentSet::new(vec![0], 4).is_err());
        for n in 1..=8 {
            for d in DescentSet::all(n) {
                assert_eq!(d.to_composition().to_descent_set(), d);
            }
        }
    }

    #[test]
    fn refinement() {
        assert!(comp(&[1, 2, 1]).refines(&comp(&[1, 3])).unwrap());
        assert!(comp(&[1, 1, 2]).refines(&comp(&[1, 3])).unwrap());
        assert!(!comp(&[2, 1, 1]).refines(&comp(&[1, 3])).unwrap());
        assert!(comp(&[2, 2]).refines(&comp(&[2, 2])).unwrap());
        assert!(comp(&[1, 2]).refines(&comp(&[4])).is_err());
    }

    #[test]
    fn refinement_matches_subset_containment() {
        for n in 1..=6 {
            for a in DescentSet::all(n) {
                for b in DescentSet::all(n) {
                    let r = a.to_composition().refines(&b.to_composition()).unwrap();
                    assert_eq!(r, a.is_superset_of(&b));
                }
            }
        }
    }

    #[test]
    fn monomials() {
        let x = q(3, 7);
        assert_eq!(
            eval_monomial(&comp(&[2]), std::slice::from_ref(&x)),
            x.clone() * x.clone()
        );
        let (p, r) = (q(3, 10), q(7, 10));
        assert_eq!(eval_monomial(&comp(&[1, 1]), &[p.clone(), r.clone()]), p * r);
        assert_eq!(eval_monomial(&comp(&[1, 2, 1]), &[q(1, 2), q(1, 2)]), q(0, 1));
    }

    #[test]
    fn fundamental_examples() {
        let x = [q(1, 5), q(1, 3), q(7, 15)];
        for n in 1..=6 {
            assert_eq!(eval_fundamental(&DescentSet::empty(n), &x), eval_complete(n, &x));
            assert_eq!(eval_fundamental(&DescentSet::full(n), &x), eval_elementary(n, &x));
        }
        let (a, b) = (q(2, 7), q(3, 11));
        let d = DescentSet::new(vec![1], 3).unwrap();
        let expected = a.clone() * b.clone() * b.clone();
        assert_eq!(eval_fundamental(&d, &[a.clone(), b.clone()]), expected);
        // order matters
        assert_eq!(eval_fundamental(&d, &[b.clone(), a.clone()]), b * a.clone() * a);
    }

    #[test]
    fn symmetric_functions() {
        let x = [0.3, 0.7];
        assert!((eval_elementary(2, &x) - 0.21).abs() < 1e-15);
        assert_eq!(eval_elementary(3, &x), 0.0);
        assert!((eval_power(2, &x) - 0.58).abs() < 1e-15);
        assert_eq!(eval_elementary(0, &x), 1.0);
        assert_eq!(eval_complete(0, &x), 1.0);
    }

    #[test]
    fn partitions_and_z() {
        assert_eq!(partitions_of(4).count(), 5);
        assert_eq!(
            partitions_of(0).collect::<Vec<_>>(),
            vec![Partition::new(vec![]).unwrap()]
        );
        assert_eq!(partitions_of(1).count(), 1);
        let counts: Vec<usize> = (0..=10).map(|n| partitions_of(n).count()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        let ones = Partition::new(vec![1; 6]).unwrap();
        assert_eq!(z_of(&ones), BigUint::from(720u32));
        assert_eq!(z_of(&Partition::new(vec![2, 2, 1]).unwrap()), BigUint::from(8u32));
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 0..=20 {
            let total: BigUint = partitions_of(n).map(|l| l.class_size()).sum();
            assert_eq!(total, crate::scalar::factorial(n as u64), "n = {n}");
        }
    }

    #[test]
    fn power_sum_expansions_are_exact() {
        let x = [q(1, 6), q(1, 3), q(1, 2)];
        for n in 0..=8 {
            assert_eq!(power_sum_expansion(n, &x, true), eval_elementary(n, &x));
            assert_eq!(power_sum_expansion(n, &x, false), eval_complete(n, &x));
        }
    }

    #[test]
    fn weight_vectors() {
        assert!(WeightVector::probability(vec![q(1, 3), q(2, 3)]).is_ok());
        assert!(WeightVector::probability(vec![q(1, 3), q(1, 3)]).is_err());
        assert!(WeightVector::new(vec![1.5]).is_err());
        assert!(WeightVector::probability(vec![0.1, 0.2, 0.7]).is_ok());
    }
}
