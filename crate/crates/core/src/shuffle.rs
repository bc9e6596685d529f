//! The θ-shuffle measure on permutations.
//!
//! Orientation: for a bias vector `θ = (θ_1, …, θ_a)` the forward shuffle cuts
//! the top `N_1` cards (labels `1..=N_1`) into packet 1, the next `N_2` into
//! packet 2 and so on, with `(N_1, …, N_a)` multinomial. In the inverse shuffle
//! the cards labelled with digit 1 (probability `θ_1`) move to the top. With
//! this convention `P_θ(w) = Q_{iDes(w)}(θ)`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{enumerate_sn, Permutation};
use crate::qsym::{eval_fundamental, WeightVector};
use crate::scalar::Scalar;
use crate::Caps;

/// Probability vector driving a multi-packet riffle shuffle.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasVector<S> {
    weights: WeightVector<S>,
}

impl<S: Scalar> BiasVector<S> {
    pub fn new(weights: Vec<S>) -> Result<Self> {
        Ok(BiasVector {
            weights: WeightVector::probability(weights)?,
        })
    }

    /// `(θ, 1-θ)`.
    pub fn two_pile(theta: S) -> Result<Self> {
        let rest = S::one() - theta.clone();
        Self::new(vec![theta, rest])
    }

    /// The single-packet vector `(1)`, identity for [`convolve`].
    pub fn unit() -> Self {
        BiasVector {
            weights: WeightVector::new(vec![S::one()]).expect("1 is a valid weight"),
        }
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn to_f64(&self) -> BiasVector<f64> {
        BiasVector {
            weights: WeightVector::new(self.weights.iter().map(Scalar::to_f64).collect())
                .expect("converted weights stay in [0,1]"),
        }
    }

    /// `p_i(θ) = Σ_j θ_j^i`.
    pub fn power_sum(&self, i: usize) -> S {
        crate::qsym::eval_power(i, &self.weights)
    }
}

/// `θ * η = (θ_1η_1, …, θ_1η_b, θ_2η_1, …, θ_aη_b)`.
pub fn convolve<S: Scalar>(theta: &BiasVector<S>, eta: &BiasVector<S>) -> BiasVector<S> {
    let mut out = Vec::with_capacity(theta.len() * eta.len());
    for t in theta.weights() {
        for e in eta.weights() {
            let mut w = t.clone();
            w *= e;
            out.push(w);
        }
    }
    BiasVector {
        weights: WeightVector::new(out).expect("products of probabilities are in [0,1]"),
    }
}

/// `θ^{*k}`, of length `a^k`. `k = 0` gives `(1)`.
pub fn convolve_power<S: Scalar>(theta: &BiasVector<S>, k: u32, caps: &Caps) -> Result<BiasVector<S>> {
    let len = (theta.len() as u128).checked_pow(k).unwrap_or(u128::MAX);
    if len > caps.weights as u128 {
        return Err(Error::Capacity {
            what: "convolution power length a^k",
            requested: len,
            cap: caps.weights as u128,
            hint: "lower k or raise the weight cap",
        });
    }
    let mut acc = BiasVector::unit();
    for _ in 0..k {
        acc = convolve(&acc, theta);
    }
    Ok(acc)
}

/// `P_θ(w) = Q_{iDes(w)}(θ)`. Pass `convolve_power(θ, k)` for `P_θ^{*k}`.
pub fn exact_prob<S: Scalar>(w: &Permutation, theta: &BiasVector<S>) -> S {
    eval_fundamental(&w.ides(), theta.weights())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Enumerated,
    Empirical,
}

/// A probability measure on `S_n`, stored densely in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuffleLaw<S> {
    n: usize,
    probs: Vec<S>,
    provenance: Provenance,
}

impl<S: Scalar> ShuffleLaw<S> {
    /// `probs[r]` is the mass of the permutation with lexicographic rank `r`.
    pub fn from_dense(n: usize, probs: Vec<S>, provenance: Provenance) -> Result<Self> {
        let expected: usize = (1..=n).product();
        if probs.len() != expected {
            return Err(Error::invalid(format!(
                "law on S_{n} needs {expected} entries, got {}",
                probs.len()
            )));
        }
        Ok(ShuffleLaw { n, probs, provenance })
    }

    pub fn uniform(n: usize) -> Self {
        let size: usize = (1..=n).product();
        let u = S::one() / S::from_i64(size as i64);
        ShuffleLaw {
            n,
            probs: vec![u; size],
            provenance: Provenance::ClosedForm,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn prob(&self, w: &Permutation) -> &S {
        &self.probs[w.lex_rank()]
    }

    pub fn dense(&self) -> &[S] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (Permutation, &S)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(r, p)| (Permutation::from_lex_rank(self.n, r), p))
    }

    pub fn total(&self) -> S {
        S::sum_all(self.probs.iter().cloned())
    }

    /// Measure convolution: `(self * then)(w) = Σ_v self(v) then(v⁻¹w)`,
    /// i.e. the law after a `self` shuffle followed by a `then` shuffle.
    pub fn convolve(&self, then: &ShuffleLaw<S>) -> Result<ShuffleLaw<S>> {
        if self.n != then.n {
            return Err(Error::invalid("cannot convolve laws on different S_n"));
        }
        let perms: Vec<Permutation> = enumerate_sn(self.n, usize::MAX)?.collect();
        let mut out = vec![S::zero(); perms.len()];
        for (v, pv) in perms.iter().zip(&self.probs) {
            if pv.is_zero() {
                continue;
            }
            for (u, pu) in perms.iter().zip(&then.probs) {
                if pu.is_zero() {
                    continue;
                }
                let w = v.compose(u)?;
                let mut t = pv.clone();
                t *= pu;
                out[w.lex_rank()] += &t;
            }
        }
        Ok(ShuffleLaw {
            n: self.n,
            probs: out,
            provenance: self.provenance,
        })
    }

    /// `max_w (1 - n! P(w))`.
    pub fn separation(&self) -> S {
        let nf = self.n_factorial();
        self.probs
            .iter()
            .map(|p| S::one() - nf.clone() * p.clone())
            .fold(None, |best: Option<S>, v| match best {
                Some(b) if b >= v => Some(b),
                _ => Some(v),
            })
            .expect("S_n is non-empty")
    }

    /// `max_w |1 - n! P(w)|`.
    pub fn linf(&self) -> S {
        let nf = self.n_factorial();
        self.probs
            .iter()
            .map(|p| (S::one() - nf.clone() * p.clone()).abs())
            .fold(S::zero(), |b, v| if v > b { v } else { b })
    }

    /// `½ Σ_w |P(w) - 1/n!|`.
    pub fn total_variation(&self) -> S {
        let u = S::one() / self.n_factorial();
        let half = S::from_ratio(1, 2);
        half * S::sum_all(self.probs.iter().map(|p| (p.clone() - u.clone()).abs()))
    }

    /// Total variation distance to another law on the same `S_n`.
    pub fn tv_to(&self, other: &ShuffleLaw<S>) -> S {
        let half = S::from_ratio(1, 2);
        half * S::sum_all(
            self.probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (a.clone() - b.clone()).abs()),
        )
    }

    fn n_factorial(&self) -> S {
        S::from_i64(self.probs.len() as i64)
    }
}

/// Full law `P_θ` on `S_n` via `Q_{iDes(w)}(θ)`, one fundamental evaluation
/// per distinct inverse descent set.
pub fn exact_law<S: Scalar>(n: usize, theta: &BiasVector<S>, caps: &Caps) -> Result<ShuffleLaw<S>> {
    let perms = enumerate_sn(n, caps.enumeration)?;
    let mut cache: HashMap<u64, S> = HashMap::new();
    let probs = perms
        .map(|w| {
            let d = w.ides();
            cache
                .entry(d.mask())
                .or_insert_with(|| eval_fundamental(&d, theta.weights()))
                .clone()
        })
        .collect();
    Ok(ShuffleLaw {
        n,
        probs,
        provenance: Provenance::ClosedForm,
    })
}

/// Deterministic random stream `stream` derived from a master seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_digit<R: Rng + ?Sized>(cumulative: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(cumulative.len() - 1)
}

/// Cumulative sums of the weights, last entry forced to 1.
#[derive(Debug, Clone)]
pub struct DigitSampler {
    cumulative: Vec<f64>,
}

impl DigitSampler {
    pub fn new(theta: &BiasVector<f64>) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = theta
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        if let Some(last) = cumulative.last_mut() {
            *last = f64::INFINITY;
        }
        DigitSampler { cumulative }
    }

    pub fn arity(&self) -> usize {
        self.cumulative.len()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        draw_digit(&self.cumulative, rng)
    }
}

/// One forward θ-shuffle of the ordered deck: multinomial cut, then cards
/// dropped one at a time from the bottom of a packet chosen with probability
/// proportional to its current size.
pub fn forward_sample<R: Rng + ?Sized>(n: usize, sampler: &DigitSampler, rng: &mut R) -> Permutation {
    let a = sampler.arity();
    let mut sizes = vec![0usize; a];
    for _ in 0..n {
        sizes[sampler.draw(rng)] += 1;
    }
    // packet i holds labels start[i]+1 ..= start[i]+sizes[i]
    let mut start = vec![0usize; a];
    for i in 1..a {
        start[i] = start[i - 1] + sizes[i - 1];
    }
    let mut remaining = sizes;
    let mut word = vec![0usize; n];
    for slot in (0..n).rev() {
        let left = slot + 1;
        let mut pick = rng.random_range(0..left);
        let mut packet = 0;
        while pick >= remaining[packet] {
            pick -= remaining[packet];
            packet += 1;
        }
        word[slot] = start[packet] + remaining[packet];
        remaining[packet] -= 1;
    }
    Permutation::from_word_unchecked(word)
}

/// One inverse θ-shuffle: each card gets an independent digit; cards are
/// regrouped by digit (digit 1 on top), keeping relative order within a digit.
///
/// The returned arrangement is the inverse of a `P_θ` draw.
pub fn inverse_sample<R: Rng + ?Sized>(n: usize, sampler: &DigitSampler, rng: &mut R) -> Permutation {
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); sampler.arity()];
    for card in 1..=n {
        buckets[sampler.draw(rng)].push(card);
    }
    Permutation::from_word_unchecked(buckets.concat())
}

/// `k` forward shuffles in succession.
pub fn forward_sample_k<R: Rng + ?Sized>(
    n: usize,
    sampler: &DigitSampler,
    k: u32,
    rng: &mut R,
) -> Permutation {
    let mut deck = Permutation::identity(n);
    for _ in 0..k {
        let s = forward_sample(n, sampler, rng);
        deck = deck.compose(&s).expect("same size");
    }
    deck
}

/// `k` inverse shuffles, inverted: a draw from `P_θ^{*k}`.
pub fn inverse_sample_k<R: Rng + ?Sized>(
    n: usize,
    sampler: &DigitSampler,
    k: u32,
    rng: &mut R,
) -> Permutation {
    let mut deck = Permutation::identity(n);
    for _ in 0..k {
        let s = inverse_sample(n, sampler, rng);
        deck = deck.compose(&s).expect("same size");
    }
    deck.inverse()
}

/// Trials per RNG stream in every Monte Carlo routine.
pub const MC_CHUNK: u64 = 1 << 16;

/// Which construction a simulation draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Inverse,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "inverse" => Ok(Direction::Inverse),
            _ => Err(Error::invalid(format!("unknown sampler `{s}` (forward|inverse)"))),
        }
    }
}

/// Histogram of `trials` draws from `P_θ^{*k}`, indexed by lexicographic rank.
/// Chunk `i` of [`MC_CHUNK`] trials uses stream `i` of `seed`.
pub fn sample_counts(
    n: usize,
    theta: &BiasVector<f64>,
    k: u32,
    trials: u64,
    seed: u64,
    direction: Direction,
    caps: &Caps,
) -> Result<Vec<u64>> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if n == 0 || n > caps.enumeration {
        return Err(Error::Capacity {
            what: "permutation histogram size n",
            requested: n as u128,
            cap: caps.enumeration as u128,
            hint: "lower n or raise --enum-cap",
        });
    }
    let size: usize = (1..=n).product();
    let sampler = DigitSampler::new(theta);
    let chunks = trials.div_ceil(MC_CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let mut h = vec![0u64; size];
            for _ in 0..MC_CHUNK.min(trials - c * MC_CHUNK) {
                let w = match direction {
                    Direction::Forward => forward_sample_k(n, &sampler, k, &mut rng),
                    Direction::Inverse => inverse_sample_k(n, &sampler, k, &mut rng),
                };
                h[w.lex_rank()] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        ))
}

/// Empirical law from a histogram.
pub fn empirical_law(n: usize, counts: &[u64]) -> Result<ShuffleLaw<f64>> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::invalid("empty histogram"));
    }
    let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
    ShuffleLaw::from_dense(n, probs, Provenance::Empirical)
}

pub const DEFAULT_SST_KMAX: u32 = 64;

/// Outcome of the strong-stationary-time construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SstSample {
    /// First `T` at which all digit prefixes differ; `None` if that did not
    /// happen within `k_max` steps.
    pub time: Option<u32>,
    /// Deck after `min(T, k_max)` inverse shuffles (top to bottom).
    pub deck: Permutation,
}

impl SstSample {
    pub fn censored(&self) -> bool {
        self.time.is_none()
    }
}

/// Runs repeated inverse shuffles, each card drawing one fresh digit per step,
/// and stops at the first time every card's digit vector is distinct.
///
/// After `t` steps the deck is sorted by the digit vectors read most recent
/// digit first, so cards with equal vectors sit next to each other; that is
/// what makes the adjacency check below sufficient. For `n = 1` the time is 1.
pub fn sst_sample<R: Rng + ?Sized>(n: usize, sampler: &DigitSampler, rng: &mut R, k_max: u32) -> SstSample {
    let a = sampler.arity();
    let mut deck: Vec<usize> = (1..=n).collect();
    // class[i]: equivalence class of the card at deck position i
    let mut class: Vec<u32> = vec![0; n];
    let mut digit_of = vec![0usize; n + 1];
    let mut buckets: Vec<Vec<(usize, u32)>> = vec![Vec::new(); a];
    for t in 1..=k_max.max(1) {
        for &card in &deck {
            digit_of[card] = sampler.draw(rng);
        }
        for b in buckets.iter_mut() {
            b.clear();
        }
        for (pos, &card) in deck.iter().enumerate() {
            buckets[digit_of[card]].push((card, class[pos]));
        }
        let mut next_class = 0u32;
        let mut distinct = true;
        let mut pos = 0;
        for b in &buckets {
            let mut prev: Option<u32> = None;
            for &(card, c) in b {
                if prev == Some(c) {
                    distinct = false;
                } else {
                    next_class += 1;
                }
                prev = Some(c);
                deck[pos] = card;
                class[pos] = next_class;
                pos += 1;
            }
        }
        if distinct {
            return SstSample {
                time: Some(t),
                deck: Permutation::from_word_unchecked(deck),
            };
        }
    }
    SstSample {
        time: None,
        deck: Permutation::from_word_unchecked(deck),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::from_ratio(a, b)
    }

    #[test]
    fn convolution_examples() {
        let t = BiasVector::two_pile(0.3).unwrap();
        let h = BiasVector::two_pile(0.5).unwrap();
        let c = convolve(&t, &h);
        let want = [0.15, 0.15, 0.35, 0.35];
        for (a, b) in c.weights().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(convolve(&BiasVector::unit(), &t), t);
        let half = BiasVector::two_pile(q(1, 2)).unwrap();
        assert_eq!(
            convolve(&half, &half).weights(),
            &[q(1, 4), q(1, 4), q(1, 4), q(1, 4)]
        );
    }

    #[test]
    fn convolution_powers() {
        let caps = Caps::default();
        let half = BiasVector::two_pile(q(1, 2)).unwrap();
        assert_eq!(
            convolve_power(&half, 3, &caps).unwrap().weights(),
            vec![q(1, 8); 8].as_slice()
        );
        assert_eq!(convolve_power(&half, 0, &caps).unwrap(), BiasVector::unit());
        let t = BiasVector::two_pile(q(3, 10)).unwrap();
        for n in 1..=5 {
            for k in 0..=4 {
                let tk = convolve_power(&t, k, &caps).unwrap();
                assert_eq!(tk.power_sum(n), t.power_sum(n).powu(k as u64));
            }
        }
        let small = Caps {
            weights: 1 << 10,
            ..Caps::default()
        };
        assert!(matches!(
            convolve_power(&half, 11, &small),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn two_card_law() {
        let t = BiasVector::two_pile(0.3).unwrap();
        assert!((exact_prob(&"21".parse().unwrap(), &t) - 0.21).abs() < 1e-15);
        assert!((exact_prob(&"12".parse().unwrap(), &t) - 0.79).abs() < 1e-15);
    }

    #[test]
    fn three_card_gsr_law() {
        let half = BiasVector::two_pile(q(1, 2)).unwrap();
        let law = exact_law(3, &half, &Caps::default()).unwrap();
        let want = [q(1, 2), q(1, 8), q(1, 8), q(1, 8), q(1, 8), q(0, 1)];
        assert_eq!(law.dense(), &want);
        assert_eq!(exact_prob(&Permutation::reversal(5), &half), q(0, 1));
        let one = exact_law(1, &half, &Caps::default()).unwrap();
        assert_eq!(one.dense(), &[q(1, 1)]);
    }

    #[test]
    fn law_metrics_gsr_three_cards() {
        let half = BiasVector::two_pile(q(1, 2)).unwrap();
        let law = exact_law(3, &half, &Caps::default()).unwrap();
        assert_eq!(law.separation(), q(1, 1));
        assert_eq!(law.linf(), q(2, 1));
        assert_eq!(law.total_variation(), q(1, 3));
        assert_eq!(law.total(), q(1, 1));
    }

    #[test]
    fn degenerate_samplers() {
        let mut rng = stream_rng(7, 0);
        let one = DigitSampler::new(&BiasVector::new(vec![1.0]).unwrap());
        for _ in 0..100 {
            assert!(forward_sample(6, &one, &mut rng).is_identity());
            assert!(inverse_sample(6, &one, &mut rng).is_identity());
        }
        let heads = DigitSampler::new(&BiasVector::two_pile(1.0).unwrap());
        let tails = DigitSampler::new(&BiasVector::two_pile(0.0).unwrap());
        assert!(inverse_sample(5, &heads, &mut rng).is_identity());
        assert!(inverse_sample(5, &tails, &mut rng).is_identity());
        let s = sst_sample(1, &one, &mut rng, 64);
        assert_eq!(s.time, Some(1));
        // a single digit value never separates two cards
        let s = sst_sample(2, &one, &mut rng, 5);
        assert!(s.censored());
    }

    #[test]
    fn sst_deck_is_sorted_by_digits() {
        let mut rng = stream_rng(11, 3);
        let s = DigitSampler::new(&BiasVector::two_pile(0.4).unwrap());
        for _ in 0..1000 {
            let out = sst_sample(5, &s, &mut rng, 64);
            assert!(out.time.unwrap() >= 1);
            assert_eq!(out.deck.n(), 5);
        }
    }

    #[test]
    fn forward_two_cards_gsr_swap_rate() {
        let mut rng = stream_rng(1, 0);
        let s = DigitSampler::new(&BiasVector::two_pile(0.5).unwrap());
        let trials = 1_000_000;
        let swaps = (0..trials)
            .filter(|_| !forward_sample(2, &s, &mut rng).is_identity())
            .count();
        let p = swaps as f64 / trials as f64;
        let sd = (0.25f64 * 0.75 / trials as f64).sqrt();
        assert!((p - 0.25).abs() < 4.0 * sd, "p = {p}");
    }

    #[test]
    fn inverse_two_cards_matches_exact() {
        let mut rng = stream_rng(2, 0);
        let theta = BiasVector::two_pile(0.3).unwrap();
        let s = DigitSampler::new(&theta);
        let trials = 1_000_000;
        let swaps = (0..trials)
            .filter(|_| !inverse_sample(2, &s, &mut rng).inverse().is_identity())
            .count();
        let p = swaps as f64 / trials as f64;
        let exact = exact_prob(&"21".parse().unwrap(), &theta);
        let sd = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((p - exact).abs() < 4.0 * sd, "p = {p}");
    }
}
