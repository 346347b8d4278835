//! Exact laws: distributions with rational probabilities, set partitions,
//! Stirling numbers and the block laws of the discrete D- and T-partitions.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub const MAX_EXACT_N: usize = 8;

/// Finite distribution with exact rational probabilities. Outcomes are
/// kept sorted and zero-probability outcomes are dropped, so equality of
/// two values is equality of laws.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDist<K> {
    pub support: Vec<K>,
    pub probabilities: Vec<BigRational>,
}

impl<K: Ord + Clone> ExactDist<K> {
    pub fn from_counts(counts: &BTreeMap<K, u64>) -> Self {
        let total: u64 = counts.values().sum();
        let weights = counts
            .iter()
            .map(|(k, &c)| (k.clone(), BigRational::new(BigInt::from(c), BigInt::from(total))))
            .collect();
        Self::from_weights(weights)
    }

    pub fn from_weights(weights: BTreeMap<K, BigRational>) -> Self {
        let (support, probabilities) = weights.into_iter().filter(|(_, p)| !p.is_zero()).unzip();
        ExactDist { support, probabilities }
    }

    pub fn prob(&self, k: &K) -> BigRational {
        match self.support.binary_search(k) {
            Ok(i) => self.probabilities[i].clone(),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn total(&self) -> BigRational {
        self.probabilities.iter().fold(BigRational::zero(), |a, p| a + p)
    }

    pub fn is_normalized(&self) -> bool {
        self.total().is_one()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigRational)> {
        self.support.iter().zip(&self.probabilities)
    }
}

impl ExactDist<usize> {
    pub fn mean(&self) -> BigRational {
        self.iter().fold(BigRational::zero(), |a, (k, p)| a + p * BigInt::from(*k))
    }
}

impl<K: Serialize> ExactDist<K> {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .support
            .iter()
            .zip(&self.probabilities)
            .map(|(k, p)| {
                json!({
                    "outcome": k,
                    "numerator": p.numer().to_string(),
                    "denominator": p.denom().to_string(),
                    "probability": ratio_to_f64(p),
                })
            })
            .collect();
        Value::Array(rows)
    }
}

pub fn ratio_to_f64(p: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    p.to_f64().unwrap_or(f64::NAN)
}

/// Partition of `{0, …, n-1}` in canonical form: blocks sorted, ordered by
/// least element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SetPartition {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks;
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::Structural("empty block".into()));
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x >= n || seen[x] {
                    return Err(Error::Structural(format!("element {x} repeated or outside [0,{n})")));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Structural("blocks do not cover the ground set".into()));
        }
        blocks.sort();
        Ok(SetPartition { n, blocks })
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// All set partitions of `{0, …, n-1}` via restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<SetPartition> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut a = vec![0usize; n];
    loop {
        let k = a.iter().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in a.iter().enumerate() {
            blocks[b].push(i);
        }
        out.push(SetPartition { n, blocks });
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let prefix_max = a[..i].iter().max().copied().unwrap_or(0);
            if a[i] <= prefix_max {
                a[i] += 1;
                for x in a.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |a, k| a * BigUint::from(k))
}

fn big(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `(1/n!) ∏ (|A_j| - 1)!`, the law of the T-partition blocks.
pub fn pt_form_probability(p: &SetPartition) -> BigRational {
    let num = p.blocks.iter().fold(BigUint::one(), |a, b| a * factorial(b.len() - 1));
    big(num) / big(factorial(p.n))
}

fn check_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<()> {
    SetPartition::new(n, blocks.to_vec()).map(|_| ())
}

fn factorial_t<T: Num + Clone + FromPrimitive>(n: usize) -> T {
    (1..=n).fold(T::one(), |a, k| a * T::from_usize(k).expect("small integer"))
}

/// Probability that the D-partition produces the ordered blocks
/// `(A_1, …, A_k)` of ranked-interval indices, by summing over the
/// interval `a_j ∈ A_j` that carries each cut point:
/// `Σ_a (1/n!) ∏ (|A_j| - 1)! λ(a_j) / Σ_{i≥j} λ(A_i)`.
pub fn exact_d_block_probability<T>(lengths: &[T], ordered_blocks: &[Vec<usize>]) -> Result<T>
where
    T: Num + Clone + FromPrimitive,
{
    let n = lengths.len();
    check_blocks(n, ordered_blocks)?;
    let k = ordered_blocks.len();
    let block_len: Vec<T> = ordered_blocks
        .iter()
        .map(|b| b.iter().fold(T::zero(), |a, &i| a + lengths[i].clone()))
        .collect();
    let mut tail = vec![T::zero(); k + 1];
    for j in (0..k).rev() {
        tail[j] = tail[j + 1].clone() + block_len[j].clone();
    }
    let prefactor = ordered_blocks
        .iter()
        .fold(T::one(), |a, b| a * factorial_t::<T>(b.len() - 1))
        / factorial_t::<T>(n);

    let mut pick = vec![0usize; k];
    let mut total = T::zero();
    loop {
        let mut term = prefactor.clone();
        for j in 0..k {
            term = term * lengths[ordered_blocks[j][pick[j]]].clone() / tail[j].clone();
        }
        total = total + term;
        let mut j = 0;
        loop {
            if j == k {
                return Ok(total);
            }
            pick[j] += 1;
            if pick[j] < ordered_blocks[j].len() {
                break;
            }
            pick[j] = 0;
            j += 1;
        }
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    heap_permute(k, &mut p, &mut out);
    out
}

fn heap_permute(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, p, out);
        if k.is_multiple_of(2) {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, p, out);
}

/// Probability of the unordered block structure: the ordered probability
/// summed over all orderings of the blocks.
pub fn symmetrized_d_block_probability<T>(lengths: &[T], p: &SetPartition) -> Result<T>
where
    T: Num + Clone + FromPrimitive,
{
    let mut total = T::zero();
    for sigma in permutations(p.blocks.len()) {
        let ordered: Vec<Vec<usize>> = sigma.iter().map(|&i| p.blocks[i].clone()).collect();
        total = total + exact_d_block_probability(lengths, &ordered)?;
    }
    Ok(total)
}

/// `Σ_σ ∏_j w_{σ(j)} / Σ_{i≥j} w_{σ(i)}`: the total probability of all
/// orders in weight-biased sampling without replacement.
pub fn stick_identity_sum<T>(weights: &[T]) -> T
where
    T: Num + Clone,
{
    let mut total = T::zero();
    for sigma in permutations(weights.len()) {
        let mut rest = weights.iter().fold(T::zero(), |a, w| a + w.clone());
        let mut term = T::one();
        for &i in &sigma {
            term = term * weights[i].clone() / rest.clone();
            rest = rest - weights[i].clone();
        }
        total = total + term;
    }
    total
}

/// Signless Stirling numbers of the first kind `c(n, k)`, `k = 0..=n`.
pub fn unsigned_stirling_first(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for m in 0..n {
        let mut next = vec![BigUint::zero(); m + 2];
        for (k, c) in row.iter().enumerate() {
            next[k] += c * BigUint::from(m);
            next[k + 1] += c;
        }
        row = next;
    }
    row
}

/// Law of the number of cycles of a uniform permutation of `[n]`.
pub fn stirling_cycle_dist(n: usize) -> Result<ExactDist<usize>> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let nf = big(factorial(n));
    let weights = unsigned_stirling_first(n)
        .into_iter()
        .enumerate()
        .map(|(k, c)| (k, big(c) / nf.clone()))
        .collect();
    Ok(ExactDist::from_weights(weights))
}

/// Law of `Σ_{i ≤ n} 1_{C_i}` with independent `P(C_i) = 1/i`.
pub fn bernoulli_sum_dist(n: usize) -> ExactDist<usize> {
    let mut probs = vec![BigRational::one()];
    for i in 1..=n {
        let p = BigRational::new(BigInt::one(), BigInt::from(i));
        let q = BigRational::one() - p.clone();
        let mut next = vec![BigRational::zero(); probs.len() + 1];
        for (k, pk) in probs.iter().enumerate() {
            next[k] += pk * q.clone();
            next[k + 1] += pk * p.clone();
        }
        probs = next;
    }
    ExactDist::from_weights(probs.into_iter().enumerate().collect())
}

pub fn harmonic(n: usize) -> BigRational {
    (1..=n).fold(BigRational::zero(), |a, i| a + BigRational::new(BigInt::one(), BigInt::from(i)))
}

/// Law of `Π_n^T` read off the product formula.
pub fn t_block_law(n: usize) -> Result<BTreeMap<SetPartition, BigRational>> {
    guard(n)?;
    Ok(set_partitions(n).into_iter().map(|p| {
        let q = pt_form_probability(&p);
        (p, q)
    }).collect())
}

/// Law of `J^T_n` by direct recursion over uniform endpoint picks.
pub fn exact_t_count_dist(n: usize) -> Result<ExactDist<usize>> {
    guard(n)?;
    // g[p][j]: probability of j further cuts from endpoint index p
    let mut g: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n + 1]; n + 1];
    g[n][0] = BigRational::one();
    for p in (0..n).rev() {
        let w = BigRational::new(BigInt::one(), BigInt::from(n - p));
        for q in p + 1..=n {
            for j in 0..n {
                if !g[q][j].is_zero() {
                    let add = g[q][j].clone() * w.clone();
                    g[p][j + 1] += add;
                }
            }
        }
    }
    Ok(ExactDist::from_weights(g[0].clone().into_iter().enumerate().collect()))
}

/// Law of `J^D_n` for fixed ranked lengths, averaging over all `n!`
/// placements. For each placement the cut after position `q` occurs with
/// probability `λ_q / (remaining length)`.
pub fn exact_d_count_dist(lengths: &[BigRational]) -> Result<ExactDist<usize>> {
    let n = lengths.len();
    guard(n)?;
    if lengths.iter().any(|l| l <= &BigRational::zero()) {
        return Err(Error::Parameter("lengths must be positive".into()));
    }
    let mut acc = vec![BigRational::zero(); n + 1];
    for order in permutations(n) {
        let placed: Vec<&BigRational> = order.iter().map(|&i| &lengths[i]).collect();
        let mut suffix = vec![BigRational::zero(); n + 1];
        for p in (0..n).rev() {
            suffix[p] = suffix[p + 1].clone() + placed[p];
        }
        let mut g: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n + 1]; n + 1];
        g[n][0] = BigRational::one();
        for p in (0..n).rev() {
            for q in p..n {
                let w = placed[q] / &suffix[p];
                for j in 0..n {
                    if !g[q + 1][j].is_zero() {
                        let add = g[q + 1][j].clone() * w.clone();
                        g[p][j + 1] += add;
                    }
                }
            }
        }
        for j in 0..=n {
            acc[j] += g[0][j].clone();
        }
    }
    let nf = big(factorial(n));
    Ok(ExactDist::from_weights(acc.into_iter().map(|p| p / nf.clone()).enumerate().collect()))
}

/// Law of `Π_n^D` assembled from symmetrized block probabilities.
pub fn d_block_law(lengths: &[BigRational]) -> Result<BTreeMap<SetPartition, BigRational>> {
    guard(lengths.len())?;
    set_partitions(lengths.len())
        .into_iter()
        .map(|p| symmetrized_d_block_probability(lengths, &p).map(|q| (p, q)))
        .collect()
}

fn guard(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if n > MAX_EXACT_N {
        return Err(Error::Refused(format!("exact partition laws are limited to n ≤ {MAX_EXACT_N}, got {n}")));
    }
    Ok(())
}

/// Counts law of a block-partition law.
pub fn block_count_dist(law: &BTreeMap<SetPartition, BigRational>) -> ExactDist<usize> {
    let mut w: BTreeMap<usize, BigRational> = BTreeMap::new();
    for (p, q) in law {
        *w.entry(p.len()).or_insert_with(BigRational::zero) += q;
    }
    ExactDist::from_weights(w)
}
