//! Exchangeable interval partitions, the discrete D- and T-partitions,
//! exact block laws and length intensities.

mod exact;

pub use exact::*;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Intervals tiling `[0,1]`, stored in left-to-right order. Each interval
/// also has a rank: rank 0 is the longest, ties broken by position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalPartition {
    lengths: Vec<f64>,
    rank: Vec<usize>,
    marks: Option<Vec<f64>>,
}

impl IntervalPartition {
    /// Builds a partition from lengths listed left to right.
    pub fn from_positions(lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return param("empty length list");
        }
        if let Some(l) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return param(format!("lengths must be positive, got {l}"));
        }
        let total: f64 = lengths.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return param(format!("lengths must sum to 1, got {total}"));
        }
        let mut by_size: Vec<usize> = (0..lengths.len()).collect();
        by_size.sort_by(|&a, &b| lengths[b].total_cmp(&lengths[a]));
        let mut rank = vec![0; lengths.len()];
        for (r, &p) in by_size.iter().enumerate() {
            rank[p] = r;
        }
        Ok(IntervalPartition { lengths, rank, marks: None })
    }

    pub fn with_marks(mut self, marks: Vec<f64>) -> Result<Self> {
        if marks.len() != self.lengths.len() {
            return param("one mark per interval required");
        }
        self.marks = Some(marks);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// Lengths in left-to-right order.
    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Rank of the interval at each position.
    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    pub fn marks(&self) -> Option<&[f64]> {
        self.marks.as_deref()
    }

    pub fn ranked_lengths(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        for (p, &r) in self.rank.iter().enumerate() {
            v[r] = self.lengths[p];
        }
        v
    }

    /// `n + 1` cumulative endpoints; the last is exactly 1.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut e = Vec::with_capacity(self.len() + 1);
        let mut s = 0.0;
        e.push(0.0);
        for l in &self.lengths {
            s += l;
            e.push(s);
        }
        *e.last_mut().unwrap() = 1.0;
        e
    }
}

/// Places the given lengths in uniformly random order.
pub fn make_exchangeable<R: Rng + ?Sized>(lengths: &[f64], rng: &mut R) -> Result<IntervalPartition> {
    let mut v = lengths.to_vec();
    v.shuffle(rng);
    IntervalPartition::from_positions(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscretePartition {
    /// Merged intervals in the order they were cut.
    pub intervals: Vec<(f64, f64)>,
    /// Ranks of the original intervals inside each merged interval.
    pub ordered_blocks: Vec<Vec<usize>>,
    pub blocks: SetPartition,
    pub count: usize,
}

impl DiscretePartition {
    /// Number of original intervals inside each merged interval.
    pub fn sub_counts(&self) -> Vec<usize> {
        self.ordered_blocks.iter().map(Vec::len).collect()
    }
}

fn assemble(ip: &IntervalPartition, ends: &[f64], cuts: &[usize]) -> DiscretePartition {
    let mut intervals = Vec::with_capacity(cuts.len());
    let mut ordered_blocks = Vec::with_capacity(cuts.len());
    let mut start = 0;
    for &c in cuts {
        intervals.push((ends[start], ends[c]));
        ordered_blocks.push(ip.rank[start..c].to_vec());
        start = c;
    }
    let blocks = SetPartition::new(ip.len(), ordered_blocks.clone()).expect("cuts tile the partition");
    DiscretePartition { intervals, count: cuts.len(), ordered_blocks, blocks }
}

/// D-partition: `V_j` uniform on `[D_{j-1}, 1]`, cut at the right end of
/// the interval containing it. A point exactly on an endpoint belongs to
/// the interval on its right.
pub fn discrete_d_partition<R: Rng + ?Sized>(ip: &IntervalPartition, rng: &mut R) -> DiscretePartition {
    let ends = ip.endpoints();
    let n = ip.len();
    let mut cuts = Vec::new();
    let mut p = 0;
    while p < n {
        let v = ends[p] + rng.random::<f64>() * (1.0 - ends[p]);
        let q = (ends.partition_point(|&e| e <= v) - 1).clamp(p, n - 1);
        p = q + 1;
        cuts.push(p);
    }
    assemble(ip, &ends, &cuts)
}

/// T-partition: each cut is a uniform pick among the endpoints to the
/// right of the previous cut, until 1 is picked.
pub fn discrete_t_partition<R: Rng + ?Sized>(ip: &IntervalPartition, rng: &mut R) -> DiscretePartition {
    let ends = ip.endpoints();
    let n = ip.len();
    let mut cuts = Vec::new();
    let mut p = 0;
    while p < n {
        p = rng.random_range(p + 1..=n);
        cuts.push(p);
    }
    assemble(ip, &ends, &cuts)
}

/// Fraction of the `top_n` longest intervals whose right endpoint is at
/// most `u`.
pub fn kallenberg_local_time(ip: &IntervalPartition, top_n: usize, u: f64) -> Result<f64> {
    if top_n == 0 || top_n > ip.len() {
        return Err(Error::Parameter(format!("top_n must lie in [1, {}], got {top_n}", ip.len())));
    }
    let ends = ip.endpoints();
    let hits = ip.rank.iter().enumerate().filter(|(p, &r)| r < top_n && ends[p + 1] <= u).count();
    Ok(hits as f64 / top_n as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<f64>,
    pub replicates: usize,
}

impl Histogram {
    /// Mean number of lengths per replicate falling in each bin.
    pub fn intensity(&self) -> Vec<f64> {
        self.counts.iter().map(|c| c / self.replicates as f64).collect()
    }
}

/// Pooled histogram of all interval lengths over replicates. Lengths
/// outside `[edges[0], edges[last])` are ignored.
pub fn empirical_intensity(replicates: &[Vec<f64>], edges: &[f64]) -> Result<Histogram> {
    if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) {
        return param("bin edges must be strictly increasing with at least two entries");
    }
    let mut counts = vec![0.0; edges.len() - 1];
    for rep in replicates {
        for &x in rep {
            if x >= edges[0] && x < edges[edges.len() - 1] {
                counts[edges.partition_point(|&e| e <= x) - 1] += 1.0;
            }
        }
    }
    Ok(Histogram { edges: edges.to_vec(), counts, replicates: replicates.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use std::collections::BTreeMap;

    #[test]
    fn construction_checks() {
        assert!(IntervalPartition::from_positions(vec![]).is_err());
        assert!(IntervalPartition::from_positions(vec![0.5, 0.6]).is_err());
        assert!(IntervalPartition::from_positions(vec![1.0, 0.0]).is_err());
        let ip = IntervalPartition::from_positions(vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(ip.ranks(), &[2, 0, 1]);
        assert_eq!(ip.ranked_lengths(), vec![0.5, 0.3, 0.2]);
        assert_eq!(*ip.endpoints().last().unwrap(), 1.0);
    }

    #[test]
    fn single_interval() {
        let mut r = RngStream::new(1, 0).rng();
        let ip = make_exchangeable(&[1.0], &mut r).unwrap();
        let d = discrete_d_partition(&ip, &mut r);
        assert_eq!(d.count, 1);
        assert_eq!(discrete_t_partition(&ip, &mut r).blocks.blocks, vec![vec![0]]);
    }

    #[test]
    fn shuffle_is_uniform_and_keeps_multiset() {
        let mut r = RngStream::new(2, 0).rng();
        let n = 40_000;
        let first_small = (0..n)
            .filter(|_| {
                let ip = make_exchangeable(&[0.3, 0.7], &mut r).unwrap();
                assert_eq!(ip.ranked_lengths(), vec![0.7, 0.3]);
                ip.lengths()[0] == 0.3
            })
            .count();
        assert!((first_small as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn two_intervals_one_block_half() {
        let mut r = RngStream::new(3, 0).rng();
        let n = 100_000;
        let (mut d1, mut t1) = (0, 0);
        for _ in 0..n {
            let ip = make_exchangeable(&[0.15, 0.85], &mut r).unwrap();
            d1 += (discrete_d_partition(&ip, &mut r).count == 1) as usize;
            t1 += (discrete_t_partition(&ip, &mut r).count == 1) as usize;
        }
        assert!((d1 as f64 / n as f64 - 0.5).abs() < 0.006);
        assert!((t1 as f64 / n as f64 - 0.5).abs() < 0.006);
    }

    #[test]
    fn block_law_matches_product_formula() {
        let mut r = RngStream::new(4, 0).rng();
        let reps = 300_000;
        let law = t_block_law(3).unwrap();
        for which in ["d", "t"] {
            let mut counts: BTreeMap<SetPartition, f64> = BTreeMap::new();
            for _ in 0..reps {
                let ip = make_exchangeable(&[0.2, 0.3, 0.5], &mut r).unwrap();
                let p = if which == "d" { discrete_d_partition(&ip, &mut r) } else { discrete_t_partition(&ip, &mut r) };
                *counts.entry(p.blocks).or_insert(0.0) += 1.0;
            }
            let obs: Vec<f64> = law.keys().map(|k| counts.get(k).copied().unwrap_or(0.0)).collect();
            let exp: Vec<f64> = law.values().map(|q| ratio_to_f64(q) * reps as f64).collect();
            let rep = crate::statlab::chi_square_counts(&obs, &exp, 0.001).unwrap();
            assert!(rep.passed(), "{which}: {rep:?}");
        }
    }

    #[test]
    fn t_block_law_free_of_lengths() {
        let mut r = RngStream::new(5, 0).rng();
        let reps = 200_000;
        let mut tallies = Vec::new();
        for lens in [[0.1, 0.2, 0.7], [0.3, 0.3, 0.4]] {
            let mut single = 0;
            for _ in 0..reps {
                let ip = make_exchangeable(&lens, &mut r).unwrap();
                single += (discrete_t_partition(&ip, &mut r).count == 1) as usize;
            }
            tallies.push(single as f64 / reps as f64);
        }
        for t in tallies {
            assert!((t - 1.0 / 3.0).abs() < 0.005);
        }
    }

    #[test]
    fn d_partition_is_length_biased() {
        // the merged interval containing the longest original appears first
        // with probability equal to its length share, for two intervals
        let mut r = RngStream::new(6, 0).rng();
        for long in [0.6, 0.8] {
            let reps = 100_000;
            let mut hits = 0;
            for _ in 0..reps {
                let ip = make_exchangeable(&[long, 1.0 - long], &mut r).unwrap();
                let d = discrete_d_partition(&ip, &mut r);
                if d.count == 2 && d.ordered_blocks[0] == vec![0] {
                    hits += 1;
                }
            }
            // first block is {longest} alone: the long interval is placed first and V_1 falls in it
            assert!((hits as f64 / reps as f64 - 0.5 * long).abs() < 0.006);
        }
    }

    #[test]
    fn kallenberg_endpoints() {
        let ip = IntervalPartition::from_positions(vec![0.1, 0.4, 0.2, 0.3]).unwrap();
        assert_eq!(kallenberg_local_time(&ip, 4, 1.0).unwrap(), 1.0);
        assert_eq!(kallenberg_local_time(&ip, 4, 0.0).unwrap(), 0.0);
        assert_eq!(kallenberg_local_time(&ip, 2, 0.5).unwrap(), 0.5);
        assert!(kallenberg_local_time(&ip, 5, 0.5).is_err());
    }

    #[test]
    fn intensity_histogram() {
        let h = empirical_intensity(&[vec![0.1, 0.6, 0.3], vec![0.95, 0.05]], &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(h.counts, vec![3.0, 2.0]);
        assert_eq!(h.intensity(), vec![1.5, 1.0]);
        assert!(empirical_intensity(&[], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn d_count_law_independent_of_lengths() {
        let a: Vec<BigRational> = [1, 2, 3, 4].iter().map(|&i| BigRational::new(BigInt::from(i), BigInt::from(10))).collect();
        let b: Vec<BigRational> = [1, 1, 1, 97].iter().map(|&i| BigRational::new(BigInt::from(i), BigInt::from(100))).collect();
        assert_eq!(exact_d_count_dist(&a).unwrap(), exact_d_count_dist(&b).unwrap());
    }
}
