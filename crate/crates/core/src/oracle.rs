//! Slow reference computations, independent of the quasisymmetric route.
//!
//! These follow the shuffle and birthday mechanisms literally (every cut,
//! every drop sequence, every set of colliding pairs) and exist to check the
//! fast code paths. They are exponential in `n`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::perm::{enumerate_sn, Permutation};
use crate::qsym::Partition;
use crate::scalar::Scalar;
use crate::shuffle::{BiasVector, Provenance, ShuffleLaw};

/// Law of one θ-shuffle by exhaustive enumeration: every packet-size vector
/// with its multinomial probability, then every sequence of bottom drops,
/// each drop from packet `i` having probability `(size of i)/(cards left)`.
pub fn brute_force_law<S: Scalar>(n: usize, theta: &BiasVector<S>) -> Result<ShuffleLaw<S>> {
    let size: usize = (1..=n).product();
    let mut probs = vec![S::zero(); size];
    let a = theta.len();
    let mut sizes = vec![0usize; a];
    cut_sizes(n, 0, &mut sizes, &mut |sizes| {
        let cut_prob = multinomial_prob(sizes, theta.weights());
        if cut_prob.is_zero() {
            return;
        }
        let mut start = vec![0usize; a];
        for i in 1..a {
            start[i] = start[i - 1] + sizes[i - 1];
        }
        let mut word = vec![0usize; n];
        let mut remaining = sizes.to_vec();
        drops(n, &mut remaining, &start, &mut word, cut_prob, &mut |word, p| {
            let w = Permutation::from_word_unchecked(word.to_vec());
            probs[w.lex_rank()] += &p;
        });
    });
    ShuffleLaw::from_dense(n, probs, Provenance::Enumerated)
}

fn cut_sizes<F: FnMut(&[usize])>(left: usize, idx: usize, sizes: &mut [usize], f: &mut F) {
    if idx + 1 == sizes.len() {
        sizes[idx] = left;
        f(sizes);
        return;
    }
    for s in 0..=left {
        sizes[idx] = s;
        cut_sizes(left - s, idx + 1, sizes, f);
    }
}

fn multinomial_prob<S: Scalar>(sizes: &[usize], w: &[S]) -> S {
    let n: usize = sizes.iter().sum();
    let mut coef = BigInt::one();
    let mut used = 0;
    for &s in sizes {
        for i in 1..=s {
            coef = coef * BigInt::from(used + i) / BigInt::from(i);
        }
        used += s;
    }
    debug_assert!(used == n);
    let mut p = S::from_biguint(&coef.to_biguint().expect("positive"));
    for (s, wi) in sizes.iter().zip(w) {
        p *= &wi.powu(*s as u64);
    }
    p
}

fn drops<S: Scalar, F: FnMut(&[usize], S)>(
    left: usize,
    remaining: &mut [usize],
    start: &[usize],
    word: &mut [usize],
    prob: S,
    f: &mut F,
) {
    if left == 0 {
        f(word, prob);
        return;
    }
    for i in 0..remaining.len() {
        if remaining[i] == 0 {
            continue;
        }
        let step = S::from_ratio(remaining[i] as i64, left as i64);
        word[left - 1] = start[i] + remaining[i];
        remaining[i] -= 1;
        drops(left - 1, remaining, start, word, prob.clone() * step, f);
        remaining[i] += 1;
    }
}

/// `P_θ^{*k}` by repeated measure convolution of the one-shuffle law.
pub fn convolved_law<S: Scalar>(one: &ShuffleLaw<S>, k: u32) -> Result<ShuffleLaw<S>> {
    let mut acc = ShuffleLaw::from_dense(
        one.n(),
        {
            let mut delta = vec![S::zero(); one.dense().len()];
            delta[0] = S::one();
            delta
        },
        Provenance::Enumerated,
    )?;
    for _ in 0..k {
        acc = acc.convolve(one)?;
    }
    Ok(acc)
}

/// Dense transition matrix `K[x][y] = P(x⁻¹ y)` of the random walk driven by
/// `law`, rows and columns in lexicographic order.
pub fn transition_matrix<S: Scalar>(law: &ShuffleLaw<S>) -> Result<Vec<Vec<S>>> {
    let perms: Vec<Permutation> = enumerate_sn(law.n(), usize::MAX)?.collect();
    perms
        .iter()
        .map(|x| {
            let xi = x.inverse();
            perms
                .iter()
                .map(|y| Ok(law.prob(&xi.compose(y)?).clone()))
                .collect()
        })
        .collect()
}

pub fn trace<S: Scalar>(m: &[Vec<S>]) -> S {
    S::sum_all(m.iter().enumerate().map(|(i, row)| row[i].clone()))
}

/// Inclusion–exclusion for `P(∪_{i<j} B_ij)`, "some two of `n` balls share a
/// box", written in the power-sum basis: each set `E` of colliding pairs
/// contributes `(-1)^{|E|+1} p_λ`, `λ` the component sizes of the graph `E`.
/// Returns the coefficient of each `p_λ` (with `p_1` kept as a variable, so
/// the result is homogeneous of degree `n`). Exponential in `n(n-1)/2`.
pub fn inclusion_exclusion_power_sums(n: usize) -> BTreeMap<Partition, BigInt> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out: BTreeMap<Partition, BigInt> = BTreeMap::new();
    for mask in 1u64..(1u64 << pairs.len()) {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << b) != 0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
        let mut sizes = vec![0usize; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            sizes[r] += 1;
        }
        let lambda = Partition::new(sizes.into_iter().filter(|&s| s > 0).collect()).expect("positive");
        let sign = if mask.count_ones() % 2 == 1 { 1 } else { -1 };
        *out.entry(lambda).or_insert_with(BigInt::zero) += sign;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `P(some two of n balls share a box)` by inclusion–exclusion over sets of
/// pairs, evaluated at `eta`.
pub fn birthday_inclusion_exclusion<S: Scalar>(n: usize, eta: &[S]) -> S {
    let terms = inclusion_exclusion_power_sums(n)
        .into_iter()
        .map(|(lambda, coef)| {
            let c: i64 = coef.try_into().expect("small coefficient");
            S::from_i64(c) * crate::qsym::eval_power_partition(&lambda, eta)
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

    #[test]
    fn brute_force_three_cards() {
        let law = brute_force_law(3, &BiasVector::two_pile(q(1, 2)).unwrap()).unwrap();
        assert_eq!(
            law.dense(),
            &[q(1, 2), q(1, 8), q(1, 8), q(1, 8), q(1, 8), q(0, 1)]
        );
        let two = brute_force_law(2, &BiasVector::two_pile(q(3, 10)).unwrap()).unwrap();
        assert_eq!(two.dense(), &[q(79, 100), q(21, 100)]);
    }

    #[test]
    fn brute_force_is_normalized_for_three_packets() {
        let th = BiasVector::new(vec![q(1, 5), q(3, 10), q(1, 2)]).unwrap();
        for n in 1..=5 {
            assert_eq!(brute_force_law(n, &th).unwrap().total(), q(1, 1));
        }
    }

    #[test]
    fn three_ball_inclusion_exclusion() {
        let coeffs = inclusion_exclusion_power_sums(3);
        let mut want = BTreeMap::new();
        want.insert(Partition::new(vec![2, 1]).unwrap(), BigInt::from(3));
        want.insert(Partition::new(vec![3]).unwrap(), BigInt::from(-2));
        assert_eq!(coeffs, want);
    }

    #[test]
    fn transition_trace() {
        let th = BiasVector::two_pile(q(1, 2)).unwrap();
        let law = brute_force_law(3, &th).unwrap();
        let k = transition_matrix(&law).unwrap();
        assert_eq!(trace(&k), q(3, 1));
        for row in &k {
            assert_eq!(BigRational::sum_all(row.iter().cloned()), q(1, 1));
        }
    }
}
