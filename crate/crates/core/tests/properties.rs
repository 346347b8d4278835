use bridgecut::bridge::{occupation_histogram, path_swap, sample_local_time, simulate_bridge};
use bridgecut::io::Table;
use bridgecut::mappings::{analyze_digraph, build_mapping_walk, count_cycles, Mapping, OrderingMode};
use bridgecut::partitions::{discrete_d_partition, discrete_t_partition, make_exchangeable};
use bridgecut::randkit::{gem_lengths, size_biased_order};
use bridgecut::statlab::ks_two_sample_statistic;
use bridgecut::RngStream;
use proptest::prelude::*;
use rand::Rng;

fn mapping() -> impl Strategy<Value = Vec<usize>> {
    (1usize..40).prop_flat_map(|n| prop::collection::vec(1..=n, n))
}

fn lengths() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..10.0, 1..9).prop_map(|v| {
        let t: f64 = v.iter().sum();
        v.iter().map(|x| x / t).collect()
    })
}

proptest! {
    #[test]
    fn digraph_basins_tile_the_points(image in mapping()) {
        let m = Mapping::new(&image).unwrap();
        let d = analyze_digraph(&m);
        let mut seen: Vec<usize> = d.basins().concat();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..image.len()).collect::<Vec<_>>());
        prop_assert_eq!(d.cycle_count(), count_cycles(&m));
        prop_assert_eq!(d.cycles().iter().map(Vec::len).sum::<usize>(), d.cyclic_count());
        for v in 0..image.len() {
            prop_assert!(d.is_cyclic(d.root_of(v)));
        }
    }

    #[test]
    fn walk_is_an_excursion_chain(image in mapping(), basins_first in any::<bool>()) {
        let mode = if basins_first { OrderingMode::BasinsFirst } else { OrderingMode::CyclesFirst };
        let d = analyze_digraph(&Mapping::new(&image).unwrap());
        let w = build_mapping_walk(&d, mode);
        let levels = w.levels();
        prop_assert_eq!(w.steps.len(), 2 * image.len());
        prop_assert!(levels.iter().all(|&l| l >= 0));
        prop_assert_eq!(*levels.last().unwrap(), 0);
        prop_assert_eq!(w.zero_return_indices.len(), d.cyclic_count());
        for &k in &w.zero_return_indices {
            prop_assert_eq!(levels[k], 0);
        }
    }

    #[test]
    fn discrete_partitions_tile_the_intervals(l in lengths(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0).rng();
        let ip = make_exchangeable(&l, &mut rng).unwrap();
        for p in [discrete_d_partition(&ip, &mut rng), discrete_t_partition(&ip, &mut rng)] {
            prop_assert_eq!(p.count, p.intervals.len());
            prop_assert_eq!(p.sub_counts().iter().sum::<usize>(), l.len());
            prop_assert_eq!(p.intervals[0].0, 0.0);
            prop_assert!((p.intervals.last().unwrap().1 - 1.0).abs() < 1e-12);
            for w in p.intervals.windows(2) {
                prop_assert_eq!(w[0].1, w[1].0);
            }
            let mut ranks = p.ordered_blocks.concat();
            ranks.sort_unstable();
            prop_assert_eq!(ranks, (0..l.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn gem_mass_is_conserved(theta in 0.05f64..5.0, seed in any::<u64>()) {
        let s = gem_lengths(theta, 1e-8, &mut RngStream::new(seed, 0).rng()).unwrap();
        prop_assert!(s.residual_mass < 1e-8);
        prop_assert!((s.values.iter().sum::<f64>() + s.residual_mass - 1.0).abs() < 1e-12);
        prop_assert!(s.values.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn size_biased_order_is_a_permutation(w in prop::collection::vec(0.001f64..1.0, 1..30), seed in any::<u64>()) {
        let mut o = size_biased_order(&w, &mut RngStream::new(seed, 0).rng()).unwrap();
        o.sort_unstable();
        prop_assert_eq!(o, (0..w.len()).collect::<Vec<_>>());
    }

    #[test]
    fn two_sample_ks_is_symmetric(a in prop::collection::vec(-5.0f64..5.0, 1..50), b in prop::collection::vec(-5.0f64..5.0, 1..50)) {
        let d = ks_two_sample_statistic(&a, &b);
        prop_assert_eq!(d, ks_two_sample_statistic(&b, &a));
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(ks_two_sample_statistic(&a, &a), 0.0);
    }

    #[test]
    fn streams_replay(seed in any::<u64>(), stream in any::<u64>()) {
        let x: u64 = RngStream::new(seed, stream).rng().random();
        let y: u64 = RngStream::new(seed, stream).rng().random();
        prop_assert_eq!(x, y);
        let z: u64 = RngStream::new(seed, stream.wrapping_add(1)).rng().random();
        prop_assert_ne!(x, z);
    }

    #[test]
    fn csv_cells_round_trip(cells in prop::collection::vec("[ -~]{0,12}", 1..6)) {
        let header: Vec<String> = (0..cells.len()).map(|i| format!("c{i}")).collect();
        let mut t = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
        t.push(cells.iter().map(|c| serde_json::Value::String(c.clone())).collect());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::None).from_reader(&buf[..]);
        let row = r.records().next().unwrap().unwrap();
        prop_assert_eq!(row.iter().collect::<Vec<_>>(), cells.iter().map(String::as_str).collect::<Vec<_>>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn path_swap_keeps_occupation(seed in any::<u64>(), u in 0.0f64..1.0) {
        let mut rng = RngStream::new(seed, 0).rng();
        let path = simulate_bridge(256, &mut rng).unwrap();
        let lt = sample_local_time(&path, &mut rng);
        let (swapped, lt2) = path_swap(&path, &lt, u).unwrap();
        let edges: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect();
        prop_assert_eq!(occupation_histogram(&path, &edges).unwrap(), occupation_histogram(&swapped, &edges).unwrap());
        prop_assert!((lt.total() - lt2.total()).abs() < 1e-12);
        prop_assert_eq!(swapped.values[0], 0.0);
        prop_assert_eq!(*swapped.values.last().unwrap(), 0.0);
    }
}
