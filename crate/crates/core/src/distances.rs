//! Distances from uniform after `k` θ-shuffles.
//!
//! Three independent routes are provided:
//! - enumeration over `S_n` of the exact law (`*_enum`),
//! - cycle-type sums over partitions of `n` (`*_partition`), which rest on
//!   separation being attained at the reversal and ℓ∞ at the identity,
//! - Monte Carlo of the strong stationary time ([`sst_tail_mc`]).

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{enumerate_sn, lyndon_factorization};
use crate::qsym::{eval_elementary, eval_fundamental, partitions_of, Partition};
use crate::report::{DistanceReport, DistanceRow, Method};
use crate::scalar::{factorial, ln_factorial, NeumaierSum, Scalar};
pub use crate::shuffle::MC_CHUNK;
use crate::shuffle::{convolve_power, sst_sample, stream_rng, BiasVector, DigitSampler};
use crate::Caps;

/// Separation, ℓ∞ and total variation of `P_θ^{*k}`, all from one pass over
/// `S_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedDistances<S> {
    pub sep: S,
    pub linf: S,
    pub tv: S,
}

/// Enumerates `S_n`, groups permutations by inverse descent set and evaluates
/// the exact law once per group.
pub fn enum_distances<S: Scalar>(
    n: usize,
    theta: &BiasVector<S>,
    k: u32,
    caps: &Caps,
) -> Result<EnumeratedDistances<S>> {
    let tk = convolve_power(theta, k, caps)?;
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for w in enumerate_sn(n, caps.enumeration)? {
        *counts.entry(w.ides().mask()).or_default() += 1;
    }
    let nf = S::from_biguint(&factorial(n as u64));
    let mut classes: Vec<(u64, u64)> = counts.into_iter().collect();
    classes.sort_unstable();
    let mut sep: Option<S> = None;
    let mut linf = S::zero();
    let mut tv_terms = Vec::with_capacity(classes.len());
    for (mask, count) in classes {
        let d = crate::qsym::DescentSet::from_mask(mask, n);
        let p = eval_fundamental(&d, tk.weights());
        let ratio_gap = S::one() - nf.clone() * p.clone();
        if sep.as_ref().is_none_or(|s| ratio_gap > *s) {
            sep = Some(ratio_gap.clone());
        }
        let a = ratio_gap.abs();
        if a > linf {
            linf = a;
        }
        let dev = (p - S::one() / nf.clone()).abs();
        tv_terms.push(dev * S::from_i64(count as i64));
    }
    let tv = S::from_ratio(1, 2) * S::sum_all(tv_terms);
    Ok(EnumeratedDistances {
        sep: sep.expect("S_n is non-empty"),
        linf,
        tv,
    })
}

pub fn sep_enum<S: Scalar>(n: usize, theta: &BiasVector<S>, k: u32, caps: &Caps) -> Result<S> {
    Ok(enum_distances(n, theta, k, caps)?.sep)
}

pub fn linf_enum<S: Scalar>(n: usize, theta: &BiasVector<S>, k: u32, caps: &Caps) -> Result<S> {
    Ok(enum_distances(n, theta, k, caps)?.linf)
}

pub fn tv_enum<S: Scalar>(n: usize, theta: &BiasVector<S>, k: u32, caps: &Caps) -> Result<S> {
    Ok(enum_distances(n, theta, k, caps)?.tv)
}

/// Backends able to evaluate the cycle-type sum
/// `Σ_{λ ⊢ n} ε (n!/z_λ) Π_i p_i(θ)^{k·n_i(λ)}` with `ε = (-1)^{n-ℓ(λ)}` when
/// alternating and `ε = 1` otherwise.
///
/// Alternating, this is `n!·P^{*k}(rev)`; otherwise `n!·P^{*k}(id)`.
pub trait ClosedForm: Scalar {
    fn cycle_index_sum(n: usize, theta: &BiasVector<Self>, k: u32, alternating: bool) -> Self;

    /// `SEP(k) = 1 - n!·P^{*k}(rev)`.
    fn separation(n: usize, theta: &BiasVector<Self>, k: u32) -> Self {
        Self::one() - Self::cycle_index_sum(n, theta, k, true)
    }

    /// `ℓ∞(k) = n!·P^{*k}(id) - 1`.
    fn linf(n: usize, theta: &BiasVector<Self>, k: u32) -> Self {
        Self::cycle_index_sum(n, theta, k, false) - Self::one()
    }
}

// Depth-first walk over partitions of `n` (parts non-increasing). The visitor
// receives each new part together with its multiplicity so far; state is
// threaded through by value so each branch owns its running product.
fn walk_partitions<T: Clone, F, L>(
    remaining: usize,
    max_part: usize,
    last: (usize, usize),
    len: usize,
    state: T,
    step: &F,
    leaf: &mut L,
) where
    F: Fn(&T, usize, usize) -> T,
    L: FnMut(T, usize),
{
    if remaining == 0 {
        leaf(state, len);
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        let mult = if part == last.0 { last.1 + 1 } else { 1 };
        let next = step(&state, part, mult);
        walk_partitions(remaining - part, part, (part, mult), len + 1, next, step, leaf);
    }
}

fn negate_if(alternating: bool, n: usize, len: usize) -> bool {
    alternating && (n - len) % 2 == 1
}

impl ClosedForm for BigRational {
    /// Works over a common denominator `q`: with `θ_j = a_j/q`, each term is an
    /// integer over `q^{kn}`.
    fn cycle_index_sum(n: usize, theta: &BiasVector<Self>, k: u32, alternating: bool) -> Self {
        if n == 0 {
            return BigRational::one();
        }
        let q = theta
            .weights()
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let numerators: Vec<BigInt> = theta
            .weights()
            .iter()
            .map(|w| w.numer() * (&q / w.denom()))
            .collect();
        // powk[i] = (Σ_j a_j^i)^k
        let powk: Vec<BigInt> = (0..=n)
            .map(|i| {
                let p: BigInt = numerators.iter().map(|a| num_traits::pow(a.clone(), i)).sum();
                num_traits::pow(p, k as usize)
            })
            .collect();
        let nf = BigInt::from(factorial(n as u64));
        let step = |s: &(BigInt, BigInt), part: usize, mult: usize| {
            (&s.0 * &powk[part], &s.1 * BigInt::from(part * mult))
        };
        // One independent subtree per largest part, summed in a fixed order.
        let partials: Vec<BigInt> = (1..=n)
            .into_par_iter()
            .map(|first| {
                let mut acc = BigInt::zero();
                let init = (powk[first].clone(), BigInt::from(first));
                let mut leaf = |(w, z): (BigInt, BigInt), len: usize| {
                    let term = (&nf / z) * w;
                    if negate_if(alternating, n, len) {
                        acc -= term;
                    } else {
                        acc += term;
                    }
                };
                walk_partitions(n - first, first, (first, 1), 1, init, &step, &mut leaf);
                acc
            })
            .collect();
        let total: BigInt = partials.into_iter().sum();
        BigRational::new(total, num_traits::pow(q, k as usize * n))
    }
}

// Log-space cycle-type sum for floats. Terms are rescaled by the largest one
// and accumulated with compensated summation. With `skip_identity` the
// partition `1^n` (whose term is exactly 1) is left out. Returns the signed sum
// and the sum of absolute values.
fn float_cycle_sum(
    n: usize,
    theta: &BiasVector<f64>,
    k: u32,
    alternating: bool,
    skip_identity: bool,
) -> (f64, f64) {
    if n == 0 {
        return if skip_identity { (0.0, 0.0) } else { (1.0, 1.0) };
    }
    let log_pk: Vec<f64> = (0..=n)
        .map(|i| {
            if k == 0 {
                0.0
            } else {
                k as f64 * theta.power_sum(i).ln()
            }
        })
        .collect();
    let log_nf = ln_factorial(n as u64);
    let step =
        |s: &(f64, f64), part: usize, mult: usize| (s.0 + log_pk[part], s.1 + ((part * mult) as f64).ln());
    let roots: Vec<usize> = (1..=n).collect();
    let skip = |len: usize| skip_identity && len == n;
    let max_log = roots
        .par_iter()
        .map(|&first| {
            let mut best = f64::NEG_INFINITY;
            let init = (log_pk[first], (first as f64).ln());
            let mut leaf = |(lw, lz): (f64, f64), len: usize| {
                if !skip(len) {
                    best = best.max(log_nf - lz + lw);
                }
            };
            walk_partitions(n - first, first, (first, 1), 1, init, &step, &mut leaf);
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    if max_log == f64::NEG_INFINITY {
        return (0.0, 0.0);
    }
    let partials: Vec<(NeumaierSum, NeumaierSum)> = roots
        .par_iter()
        .map(|&first| {
            let mut acc = NeumaierSum::default();
            let mut abs = NeumaierSum::default();
            let init = (log_pk[first], (first as f64).ln());
            let mut leaf = |(lw, lz): (f64, f64), len: usize| {
                if skip(len) {
                    return;
                }
                let t = (log_nf - lz + lw - max_log).exp();
                abs.add(t);
                acc.add(if negate_if(alternating, n, len) { -t } else { t });
            };
            walk_partitions(n - first, first, (first, 1), 1, init, &step, &mut leaf);
            (acc, abs)
        })
        .collect();
    let mut total = NeumaierSum::default();
    let mut abs = NeumaierSum::default();
    for (p, a) in &partials {
        total.merge(p);
        abs.merge(a);
    }
    let scale = max_log.exp();
    (total.value() * scale, abs.value() * scale)
}

/// Largest number of distinct entries of `θ^{*k}` for which
/// [`elementary_of_power`] is attempted.
const MAX_DISTINCT_WEIGHTS: u128 = 1 << 18;

/// `e_n(θ^{*k})` without forming `θ^{*k}`: its entries are `Π θ_i^{c_i}` over
/// compositions `c` of `k`, each repeated `k!/Π c_i!` times, so
/// `Σ e_j t^j = Π_c (1 + θ^c t)^{mult(c)}`. Every term is non-negative.
/// `None` when there are too many compositions or `n!` overflows.
fn elementary_of_power(n: usize, theta: &BiasVector<f64>, k: u32) -> Option<f64> {
    let w: Vec<f64> = theta.weights().iter().copied().filter(|&x| x > 0.0).collect();
    let a = w.len();
    let count = (1..a as u128).try_fold(1u128, |acc, i| acc.checked_mul(k as u128 + i)?.checked_div(i))?;
    if count > MAX_DISTINCT_WEIGHTS || n > 170 {
        return None;
    }
    let ln_w: Vec<f64> = w.iter().map(|x| x.ln()).collect();
    let mut poly = vec![0.0; n + 1];
    poly[0] = 1.0;
    let mut comp = vec![0u32; a];
    let mut factor = vec![0.0; n + 1];
    let mut visit = |c: &[u32]| {
        let log_v: f64 = c.iter().zip(&ln_w).map(|(&ci, lw)| ci as f64 * lw).sum();
        let v = log_v.exp();
        let log_mult = ln_factorial(k as u64) - c.iter().map(|&ci| ln_factorial(ci as u64)).sum::<f64>();
        let m = log_mult.exp().round();
        factor[0] = 1.0;
        for i in 1..=n {
            let rem = m - (i - 1) as f64;
            factor[i] = if rem > 0.0 {
                factor[i - 1] * rem * v / i as f64
            } else {
                0.0
            };
        }
        for deg in (1..=n).rev() {
            let mut acc = poly[deg];
            for i in 1..=deg {
                acc += factor[i] * poly[deg - i];
            }
            poly[deg] = acc;
        }
    };
    fn compositions<F: FnMut(&[u32])>(idx: usize, left: u32, c: &mut [u32], f: &mut F) {
        if idx + 1 == c.len() {
            c[idx] = left;
            f(c);
            return;
        }
        for x in 0..=left {
            c[idx] = x;
            compositions(idx + 1, left - x, c, f);
        }
    }
    compositions(0, k, &mut comp, &mut visit);
    Some(poly[n])
}

impl ClosedForm for f64 {
    /// Log-space sum with the sign tracked separately. The alternating sum
    /// cancels badly when `k` is small; [`ClosedForm::separation`] avoids it.
    fn cycle_index_sum(n: usize, theta: &BiasVector<Self>, k: u32, alternating: bool) -> Self {
        float_cycle_sum(n, theta, k, alternating, false).0
    }

    /// The excess over the identity term is `-SEP`. Its rounding error is
    /// about `ε·Σ|terms|`, and `Σ|terms|` is exactly `ℓ∞`, so that route is
    /// used while `ℓ∞ < 1`. Otherwise `1 - n!·e_n(θ^{*k})`, whose summands
    /// are all non-negative.
    fn separation(n: usize, theta: &BiasVector<Self>, k: u32) -> Self {
        let (excess, linf) = float_cycle_sum(n, theta, k, true, true);
        if linf < 1.0 {
            return -excess;
        }
        match elementary_of_power(n, theta, k) {
            Some(e) => (1.0 - (ln_factorial(n as u64)).exp() * e).clamp(0.0, 1.0),
            None => -excess,
        }
    }

    fn linf(n: usize, theta: &BiasVector<Self>, k: u32) -> Self {
        float_cycle_sum(n, theta, k, false, true).0
    }
}

fn check_partition_cap(n: usize, caps: &Caps) -> Result<()> {
    if n > caps.partitions {
        return Err(Error::Capacity {
            what: "partition sum size n",
            requested: n as u128,
            cap: caps.partitions as u128,
            hint: "lower n or raise --partition-cap",
        });
    }
    Ok(())
}

/// `SEP(k) = 1 - Σ_λ ε_λ (n!/z_λ) Π_i p_i(θ)^{k n_i(λ)}`.
pub fn sep_partition<S: ClosedForm>(n: usize, theta: &BiasVector<S>, k: u32, caps: &Caps) -> Result<S> {
    check_partition_cap(n, caps)?;
    Ok(S::separation(n, theta, k))
}

/// `ℓ∞(k) = Σ_λ (n!/z_λ) Π_i p_i(θ)^{k n_i(λ)} - 1`.
pub fn linf_partition<S: ClosedForm>(n: usize, theta: &BiasVector<S>, k: u32, caps: &Caps) -> Result<S> {
    check_partition_cap(n, caps)?;
    Ok(S::linf(n, theta, k))
}

/// `C(n,2)·(Σ_j θ_j²)^k`, an upper bound on separation.
pub fn birthday_bound<S: Scalar>(n: usize, theta: &BiasVector<S>, k: u32) -> S {
    let pairs = S::from_i64((n * n.saturating_sub(1) / 2) as i64);
    pairs * theta.power_sum(2).powu(k as u64)
}

/// Chance that `n` balls dropped independently into boxes with probabilities
/// `η` produce at least one shared box: `1 - n!·e_n(η)`.
pub fn birthday_exact<S: Scalar>(n: usize, eta: &[S]) -> S {
    S::one() - S::from_biguint(&factorial(n as u64)) * eval_elementary(n, eta)
}

/// Same probability through the power-sum expansion
/// `1 - n! Σ_λ ε_λ z_λ⁻¹ p_λ(η)`.
pub fn birthday_partition<S: Scalar>(n: usize, eta: &[S]) -> S {
    let nf = S::from_biguint(&factorial(n as u64));
    S::one() - nf * crate::qsym::power_sum_expansion(n, eta, true)
}

/// One eigenvalue class of the θ-shuffle transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry<S> {
    /// `(a_1, …, a_n)` encoded as the partition with `a_i` parts equal to `i`.
    pub shape: Partition,
    /// `Π_i p_i(θ)^{a_i}`.
    pub eigenvalue: S,
    /// `n! / Π_i i^{a_i} a_i!`.
    pub multiplicity: BigUint,
}

pub fn spectrum<S: Scalar>(n: usize, theta: &BiasVector<S>, caps: &Caps) -> Result<Vec<SpectrumEntry<S>>> {
    check_partition_cap(n, caps)?;
    let power_sums: Vec<S> = (0..=n).map(|i| theta.power_sum(i)).collect();
    Ok(partitions_of(n)
        .map(|shape| {
            let mut eigenvalue = S::one();
            for (part, mult) in shape.multiplicities() {
                eigenvalue *= &power_sums[part].powu(mult as u64);
            }
            let multiplicity = shape.class_size();
            SpectrumEntry {
                shape,
                eigenvalue,
                multiplicity,
            }
        })
        .collect())
}

/// Eigenvalue indexed by a word: product over its Lyndon factors `ℓ` of
/// `p_{|ℓ|}(θ)`.
pub fn beta_of_word<S: Scalar, T: Ord + Clone>(word: &[T], theta: &BiasVector<S>) -> Result<S> {
    let f = lyndon_factorization(word)?;
    let mut beta = S::one();
    for len in f.lengths() {
        beta *= &theta.power_sum(len);
    }
    Ok(beta)
}

/// Empirical tail of the strong stationary time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SstTail {
    pub trials: u64,
    pub k_max: u32,
    /// Runs that had not separated all cards by `k_max`.
    pub censored: u64,
    /// `tail[k] = P̂{T > k}` for `k = 0..=k_max`.
    pub tail: Vec<f64>,
    /// Binomial standard error of each tail estimate.
    pub stderr: Vec<f64>,
}

impl SstTail {
    /// Normal-approximation confidence half-width at `z` standard errors.
    pub fn half_width(&self, k: usize, z: f64) -> f64 {
        z * self.stderr[k]
    }
}

/// Monte Carlo estimate of `P{T > k}`, `k ≤ k_max`. Trials are split into
/// fixed chunks, chunk `i` drawing from RNG stream `i` of `seed`, so results do
/// not depend on the number of threads.
pub fn sst_tail_mc(n: usize, theta: &BiasVector<f64>, k_max: u32, trials: u64, seed: u64) -> Result<SstTail> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let sampler = DigitSampler::new(theta);
    let chunks = trials.div_ceil(MC_CHUNK);
    let hist = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let count = MC_CHUNK.min(trials - c * MC_CHUNK);
            // index k_max+1 collects censored runs
            let mut h = vec![0u64; k_max as usize + 2];
            for _ in 0..count {
                match sst_sample(n, &sampler, &mut rng, k_max).time {
                    Some(t) => h[t as usize] += 1,
                    None => h[k_max as usize + 1] += 1,
                }
            }
            h
        })
        .reduce(
            || vec![0u64; k_max as usize + 2],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let censored = hist[k_max as usize + 1];
    let mut above = trials;
    let mut tail = Vec::with_capacity(k_max as usize + 1);
    let mut stderr = Vec::with_capacity(k_max as usize + 1);
    for count in hist.iter().take(k_max as usize + 1) {
        above -= count;
        let p = above as f64 / trials as f64;
        tail.push(p);
        stderr.push((p * (1.0 - p) / trials as f64).sqrt());
    }
    Ok(SstTail {
        trials,
        k_max,
        censored,
        tail,
        stderr,
    })
}

/// Builds per-`k` rows with the partition closed forms and the birthday bound,
/// adding the enumerated metrics when `n` is within the enumeration cap and
/// `a^k` within the weight cap.
pub fn distance_report<S: ClosedForm>(
    n: usize,
    theta: &BiasVector<S>,
    ks: &[u32],
    caps: &Caps,
) -> Result<DistanceReport> {
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let mut row = DistanceRow::new(k);
        row.push(
            Method::SepPartition,
            sep_partition(n, theta, k, caps)?.to_f64(),
            None,
        );
        row.push(
            Method::LinfPartition,
            linf_partition(n, theta, k, caps)?.to_f64(),
            None,
        );
        row.push(Method::BirthdayBound, birthday_bound(n, theta, k).to_f64(), None);
        if n <= caps.enumeration {
            match enum_distances(n, theta, k, caps) {
                Ok(d) => {
                    row.push(Method::SepEnum, d.sep.to_f64(), None);
                    row.push(Method::LinfEnum, d.linf.to_f64(), None);
                    row.push(Method::TvEnum, d.tv.to_f64(), None);
                }
                Err(Error::Capacity { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        rows.push(row);
    }
    Ok(DistanceReport {
        n,
        theta: theta.weights().iter().map(Scalar::to_f64).collect(),
        backend: S::BACKEND,
        rows,
    })
}

/// Exact cycle-type sum through Newton's identities instead of partitions:
/// `L_m = Σ_{i=1}^m ε^{i-1} (m-1)!/(m-i)! · p_i^k · L_{m-i}` gives
/// `L_n = Σ_λ ε (n!/z_λ) Π p_i^{k n_i}`. Quadratic in `n`; used to cross-check
/// the partition walk.
pub fn cycle_index_recurrence<S: Scalar>(n: usize, theta: &BiasVector<S>, k: u32, alternating: bool) -> S {
    let pk: Vec<S> = (0..=n).map(|i| theta.power_sum(i).powu(k as u64)).collect();
    let mut l = vec![S::one()];
    for m in 1..=n {
        let mut acc = S::zero();
        let mut falling = S::one(); // (m-1)!/(m-i)!
        for i in 1..=m {
            if i > 1 {
                falling *= &S::from_i64((m - i + 1) as i64);
            }
            let mut t = falling.clone() * pk[i].clone() * l[m - i].clone();
            if alternating && i % 2 == 0 {
                t = -t;
            }
            acc += &t;
        }
        l.push(acc);
    }
    l.swap_remove(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::from_ratio(a, b)
    }

    fn two(t: BigRational) -> BiasVector<BigRational> {
        BiasVector::two_pile(t).unwrap()
    }

    #[test]
    fn gsr_three_cards_one_shuffle() {
        let caps = Caps::default();
        let d = enum_distances(3, &two(q(1, 2)), 1, &caps).unwrap();
        assert_eq!(d.sep, q(1, 1));
        assert_eq!(d.linf, q(2, 1));
        assert_eq!(d.tv, q(1, 3));
        assert_eq!(sep_partition(3, &two(q(1, 2)), 1, &caps).unwrap(), q(1, 1));
        assert_eq!(linf_partition(3, &two(q(1, 2)), 1, &caps).unwrap(), q(2, 1));
    }

    #[test]
    fn two_cards_closed_forms() {
        let caps = Caps::default();
        for t in [q(3, 10), q(1, 2), q(9, 10)] {
            let theta2 = t.clone() * t.clone() + (q(1, 1) - t.clone()) * (q(1, 1) - t.clone());
            let th = two(t.clone());
            assert_eq!(sep_partition(2, &th, 1, &caps).unwrap(), theta2);
            assert_eq!(linf_partition(2, &th, 1, &caps).unwrap(), theta2);
            assert_eq!(birthday_bound(2, &th, 1), theta2);
            for k in 1..=4 {
                assert_eq!(
                    birthday_bound(2, &th, k),
                    sep_partition(2, &th, k, &caps).unwrap()
                );
            }
        }
        let f = BiasVector::two_pile(0.3).unwrap();
        assert!((sep_partition(2, &f, 1, &caps).unwrap() - 0.58).abs() < 1e-12);
    }

    #[test]
    fn sep_decays_to_zero() {
        let caps = Caps::default();
        let th = BiasVector::two_pile(0.3).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=60 {
            let s = sep_partition(6, &th, k, &caps).unwrap();
            assert!(s <= prev + 1e-12);
            prev = s;
        }
        assert!(prev < 1e-6);
        assert!(linf_partition(6, &th, 60, &caps).unwrap() < 1e-6);
    }

    #[test]
    fn partition_walk_matches_recurrence() {
        for n in [1, 2, 5, 9, 13] {
            for t in [q(1, 2), q(3, 10), q(7, 20)] {
                for k in [1, 3, 7] {
                    for alt in [true, false] {
                        let th = two(t.clone());
                        assert_eq!(
                            BigRational::cycle_index_sum(n, &th, k, alt),
                            cycle_index_recurrence(n, &th, k, alt),
                            "n={n} k={k} alt={alt}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn float_walk_matches_exact_away_from_cancellation() {
        let caps = Caps::default();
        let exact = linf_partition(30, &two(q(7, 20)), 12, &caps).unwrap().to_f64();
        let float = linf_partition(30, &BiasVector::two_pile(0.35).unwrap(), 12, &caps).unwrap();
        assert!(((exact - float) / exact).abs() < 1e-12, "{exact} {float}");
        let exact = sep_partition(30, &two(q(1, 2)), 14, &caps).unwrap().to_f64();
        let float = sep_partition(30, &BiasVector::two_pile(0.5).unwrap(), 14, &caps).unwrap();
        assert!((exact - float).abs() < 1e-10, "{exact} {float}");
    }

    #[test]
    fn partition_cap_is_enforced() {
        let caps = Caps {
            partitions: 10,
            ..Caps::default()
        };
        let th = BiasVector::two_pile(0.5).unwrap();
        assert!(matches!(
            sep_partition(11, &th, 3, &caps),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn birthday_values() {
        let th = BiasVector::two_pile(0.5).unwrap();
        assert!((birthday_bound(52, &th, 15) - 1326.0 / 32768.0).abs() < 1e-15);
        assert_eq!(birthday_bound(52, &th, 0), 1326.0);
        let half = [q(1, 2), q(1, 2)];
        assert_eq!(birthday_exact(2, &half), q(1, 2));
        assert_eq!(birthday_exact(3, &half), q(1, 1));
        let eta = [q(1, 6), q(1, 3), q(1, 2)];
        let p2: BigRational = eta.iter().map(|p| p * p).sum();
        let p3: BigRational = eta.iter().map(|p| p * p * p).sum();
        let want = q(3, 1) * p2 - q(2, 1) * p3;
        assert_eq!(birthday_exact(3, &eta), want);
        assert_eq!(birthday_partition(3, &eta), want);
    }

    #[test]
    fn spectrum_gsr_three_cards() {
        let s = spectrum(3, &two(q(1, 2)), &Caps::default()).unwrap();
        let mut got: Vec<(BigRational, BigUint)> =
            s.into_iter().map(|e| (e.eigenvalue, e.multiplicity)).collect();
        got.sort();
        assert_eq!(
            got,
            vec![
                (q(1, 4), BigUint::from(2u32)),
                (q(1, 2), BigUint::from(3u32)),
                (q(1, 1), BigUint::from(1u32)),
            ]
        );
    }

    #[test]
    fn beta_values() {
        let th = two(q(3, 10));
        let rev: Vec<usize> = (1..=6).rev().collect();
        assert_eq!(beta_of_word(&rev, &th).unwrap(), q(1, 1));
        let w = [2, 3, 6, 4, 1, 5];
        let want = th.power_sum(4) * th.power_sum(2);
        assert_eq!(beta_of_word(&w, &th).unwrap(), want);
    }

    #[test]
    fn sst_tail_two_cards() {
        let th = BiasVector::two_pile(0.5).unwrap();
        let tail = sst_tail_mc(2, &th, 10, 200_000, 42).unwrap();
        assert_eq!(tail.tail[0], 1.0);
        for k in 1..=10 {
            let exact = 0.5f64.powi(k as i32);
            assert!(
                (tail.tail[k] - exact).abs() <= 5.0 * tail.stderr[k].max(1e-4),
                "k={k}"
            );
        }
        assert!(sst_tail_mc(2, &th, 10, 0, 42).is_err());
    }

    #[test]
    fn sst_tail_general_theta_two_cards() {
        let th = BiasVector::two_pile(0.3).unwrap();
        let tail = sst_tail_mc(2, &th, 8, 200_000, 5).unwrap();
        for k in 1..=8u32 {
            let exact = sep_partition(2, &th, k, &Caps::default()).unwrap();
            assert!((tail.tail[k as usize] - exact).abs() <= 5.0 * tail.stderr[k as usize].max(1e-4));
        }
    }

    #[test]
    fn sst_tail_is_thread_independent() {
        let th = BiasVector::two_pile(0.4).unwrap();
        let a = sst_tail_mc(5, &th, 20, 150_000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| sst_tail_mc(5, &th, 20, 150_000, 9).unwrap());
        assert_eq!(a, b);
    }
}
