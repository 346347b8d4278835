use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;

use super::{analyze_digraph, order_components, Mapping, OrderingMode};
use crate::error::{Error, Result};
use crate::partitions::ExactDist;

pub const MAX_ENUMERATION_N: usize = 7;

const MODES: [OrderingMode; 2] = [OrderingMode::CyclesFirst, OrderingMode::BasinsFirst];

fn mode_index(mode: OrderingMode) -> usize {
    match mode {
        OrderingMode::CyclesFirst => 0,
        OrderingMode::BasinsFirst => 1,
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    total: u64,
    cycles: BTreeMap<usize, u64>,
    cyclic: BTreeMap<usize, u64>,
    first_basin: [BTreeMap<usize, u64>; 2],
    cycle_seq: [BTreeMap<Vec<usize>, u64>; 2],
    tree_seq_cf: BTreeMap<Vec<usize>, u64>,
    cycles_given_cyclic: BTreeMap<(usize, usize), u64>,
}

fn bump<K: Ord>(map: &mut BTreeMap<K, u64>, k: K) {
    *map.entry(k).or_insert(0) += 1;
}

fn merge<K: Ord + Clone>(into: &mut BTreeMap<K, u64>, from: &BTreeMap<K, u64>) {
    for (k, v) in from {
        *into.entry(k.clone()).or_insert(0) += v;
    }
}

impl Tally {
    fn record(&mut self, m: &Mapping) {
        let d = analyze_digraph(m);
        self.total += 1;
        let k = d.cycle_count();
        let c = d.cyclic_count();
        bump(&mut self.cycles, k);
        bump(&mut self.cyclic, c);
        bump(&mut self.cycles_given_cyclic, (c, k));
        for mode in MODES {
            let comps = order_components(&d, mode);
            let i = mode_index(mode);
            bump(&mut self.first_basin[i], comps[0].basin.len());
            bump(&mut self.cycle_seq[i], comps.iter().map(|c| c.cycle.len()).collect());
            if mode == OrderingMode::CyclesFirst {
                let trees = comps.iter().flat_map(|c| c.roots.iter().map(|&r| d.tree_size(r))).collect();
                bump(&mut self.tree_seq_cf, trees);
            }
        }
    }

    fn absorb(&mut self, o: &Tally) {
        self.total += o.total;
        merge(&mut self.cycles, &o.cycles);
        merge(&mut self.cyclic, &o.cyclic);
        merge(&mut self.cycles_given_cyclic, &o.cycles_given_cyclic);
        for i in 0..2 {
            merge(&mut self.first_basin[i], &o.first_basin[i]);
            merge(&mut self.cycle_seq[i], &o.cycle_seq[i]);
        }
        merge(&mut self.tree_seq_cf, &o.tree_seq_cf);
    }
}

/// Exact laws of mapping statistics over all `n^n` mappings of `[n]`.
#[derive(Clone, Debug)]
pub struct EnumerationTables {
    pub n: usize,
    tally: Tally,
}

/// Enumerates every mapping of `[n]`. Work is split over the image of the
/// first point and merged in that order, so results do not depend on
/// scheduling.
pub fn enumerate_exact(n: usize) -> Result<EnumerationTables> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::Refused(format!(
            "exhaustive enumeration is limited to n ≤ {MAX_ENUMERATION_N} ({n}^{n} mappings requested)"
        )));
    }
    let rest = (n as u64).pow(n as u32 - 1);
    let parts: Vec<Tally> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut t = Tally::default();
            let mut img = vec![0u32; n];
            img[0] = first as u32;
            for code in 0..rest {
                let mut x = code;
                for slot in img.iter_mut().skip(1) {
                    *slot = (x % n as u64) as u32;
                    x /= n as u64;
                }
                t.record(&Mapping { image: img.clone() });
            }
            t
        })
        .collect();
    let mut tally = Tally::default();
    for p in &parts {
        tally.absorb(p);
    }
    Ok(EnumerationTables { n, tally })
}

impl EnumerationTables {
    pub fn total(&self) -> u64 {
        self.tally.total
    }

    /// Law of the number of cycles (equivalently basins).
    pub fn cycles_dist(&self) -> ExactDist<usize> {
        ExactDist::from_counts(&self.tally.cycles)
    }

    pub fn cyclic_points_dist(&self) -> ExactDist<usize> {
        ExactDist::from_counts(&self.tally.cyclic)
    }

    pub fn first_basin_dist(&self, mode: OrderingMode) -> ExactDist<usize> {
        ExactDist::from_counts(&self.tally.first_basin[mode_index(mode)])
    }

    pub fn mean_first_basin(&self, mode: OrderingMode) -> BigRational {
        self.first_basin_dist(mode).mean()
    }

    /// Law of the sequence of cycle sizes listed in component order.
    pub fn cycle_sequence_dist(&self, mode: OrderingMode) -> ExactDist<Vec<usize>> {
        ExactDist::from_counts(&self.tally.cycle_seq[mode_index(mode)])
    }

    /// Law of the cycles-first sequence of tree sizes, one entry per root.
    pub fn tree_sequence_dist(&self) -> ExactDist<Vec<usize>> {
        ExactDist::from_counts(&self.tally.tree_seq_cf)
    }

    /// Law of the cycle count given `m` cyclic points.
    pub fn cycles_given_cyclic(&self, m: usize) -> Option<ExactDist<usize>> {
        let sub: BTreeMap<usize, u64> = self
            .tally
            .cycles_given_cyclic
            .iter()
            .filter(|((c, _), _)| *c == m)
            .map(|((_, k), v)| (*k, *v))
            .collect();
        if sub.is_empty() {
            None
        } else {
            Some(ExactDist::from_counts(&sub))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn two_points() {
        let t = enumerate_exact(2).unwrap();
        assert_eq!(t.total(), 4);
        let k = t.cycles_dist();
        assert_eq!(k.prob(&1), r(3, 4));
        assert_eq!(k.prob(&2), r(1, 4));
    }

    #[test]
    fn refuses_large_n() {
        assert!(matches!(enumerate_exact(8), Err(Error::Refused(_))));
        assert!(enumerate_exact(0).is_err());
    }

    #[test]
    fn first_basin_means_differ_at_three() {
        let t = enumerate_exact(3).unwrap();
        assert_ne!(t.mean_first_basin(OrderingMode::CyclesFirst), t.mean_first_basin(OrderingMode::BasinsFirst));
    }

    #[test]
    fn cycle_sequences_agree() {
        for n in [3, 4] {
            let t = enumerate_exact(n).unwrap();
            assert_eq!(
                t.cycle_sequence_dist(OrderingMode::CyclesFirst),
                t.cycle_sequence_dist(OrderingMode::BasinsFirst)
            );
        }
    }
}
