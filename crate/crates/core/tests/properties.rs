use photon_link::link::SymbolPacking;
use photon_link::*;
use proptest::prelude::*;

fn joint_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        prop::collection::vec(
            prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], c),
            r,
        )
        .prop_filter("some mass", |t| t.iter().flatten().any(|&v| v > 0.0))
        .prop_map(|t| {
            let total: f64 = t.iter().flatten().sum();
            t.iter()
                .map(|row| row.iter().map(|v| v / total).collect())
                .collect()
        })
    })
}

fn transpose(t: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..t[0].len())
        .map(|j| t.iter().map(|row| row[j]).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mi_is_bounded(t in joint_strategy()) {
        let j = JointDistribution::from_dense(&t).unwrap();
        let mi = mutual_information(&j);
        prop_assert!(mi >= -1e-12);
        let cap = (t.len().min(t[0].len()) as f64).log2();
        prop_assert!(mi <= cap + 1e-9);
    }

    #[test]
    fn mi_is_symmetric(t in joint_strategy()) {
        let a = mutual_information(&JointDistribution::from_dense(&t).unwrap());
        let b = mutual_information(&JointDistribution::from_dense(&transpose(&t)).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn independent_inputs_carry_nothing(
        px in prop::collection::vec(0.01f64..1.0, 1..6),
        py in prop::collection::vec(0.01f64..1.0, 1..6),
    ) {
        let (sx, sy): (f64, f64) = (px.iter().sum(), py.iter().sum());
        let t: Vec<Vec<f64>> = px.iter().map(|a| py.iter().map(|b| a * b / (sx * sy)).collect()).collect();
        prop_assert!(mutual_information(&JointDistribution::from_dense(&t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn merging_outputs_never_adds_information(t in joint_strategy(), a in 0usize..6, b in 0usize..6) {
        let cols = t[0].len();
        prop_assume!(cols >= 2);
        let (a, b) = (a % cols, b % cols);
        prop_assume!(a != b);
        let merged: Vec<Vec<f64>> = t
            .iter()
            .map(|row| {
                let mut out: Vec<f64> = row.iter().enumerate().filter(|&(y, _)| y != b).map(|(_, &v)| v).collect();
                let target = if a > b { a - 1 } else { a };
                out[target] += row[b];
                out
            })
            .collect();
        let before = mutual_information(&JointDistribution::from_dense(&t).unwrap());
        let after = mutual_information(&JointDistribution::from_dense(&merged).unwrap());
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn counts_and_probabilities_agree(counts in prop::collection::vec(prop::collection::vec(0u64..20, 3), 3)) {
        prop_assume!(counts.iter().flatten().any(|&c| c > 0));
        let table = CountTable::from_dense(&counts);
        let total = table.total() as f64;
        let probs: Vec<Vec<f64>> = counts.iter().map(|r| r.iter().map(|&c| c as f64 / total).collect()).collect();
        let a = mutual_information(&joint_from_counts(&table).unwrap());
        let b = mutual_information(&JointDistribution::from_dense(&probs).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn gray_roundtrip(value in 0u64..(1 << 20), extra in 0u32..4) {
        let width = 64 - value.leading_zeros() + extra;
        let width = width.max(1);
        prop_assert_eq!(gray_decode(&gray_encode(value, width).unwrap()), value);
    }

    #[test]
    fn symbol_bits_roundtrip(cols in 1usize..40, rows in 1usize..40, pick in any::<prop::sample::Index>()) {
        let grid = GridSpec::with_cells(cols, rows, 8).unwrap();
        let map = GrayMap::for_grid(&grid);
        let s = pick.index(grid.n_symbols());
        let bits = symbol_to_bits(s, &grid, &map).unwrap();
        prop_assert_eq!(bits.len(), map.width());
        let back = bits_to_symbol(&bits, &grid, &map).unwrap();
        prop_assert_eq!(back.symbol, s);
        prop_assert!(!back.clamped);
    }

    #[test]
    fn packed_chunks_land_on_grid(cols in 2usize..130, rows in 2usize..90, v in any::<u32>()) {
        let grid = GridSpec::with_cells(cols, rows, 8).unwrap();
        let map = GrayMap::for_grid(&grid);
        let p = SymbolPacking::for_grid(&grid, &map).unwrap();
        let w = p.width();
        let chunk: Vec<u8> = (0..w).map(|i| ((v >> (i % 32)) & 1) as u8).collect();
        let s = p.chunk_to_symbol(&chunk, &grid);
        prop_assert!(s < grid.n_symbols());
        prop_assert_eq!(p.symbol_to_chunk(s, &grid, &map).unwrap(), chunk);
    }

    #[test]
    fn channel_rows_are_stochastic(
        cols in 1usize..8,
        rows in 1usize..8,
        fwhm_x in 0.5f64..30.0,
        fwhm_y in 0.5f64..30.0,
        ratio in 0.1f64..1000.0,
        pick in any::<prop::sample::Index>(),
    ) {
        let grid = GridSpec::with_cells(cols, rows, 8).unwrap();
        let ch = build_channel_matrix(&grid, &PointSpread::new(fwhm_x, fwhm_y).unwrap(), &NoiseModel::new(ratio).unwrap()).unwrap();
        let row = ch.row(pick.index(grid.n_symbols()));
        prop_assert!(row.iter().all(|&p| p >= 0.0));
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn ldpc_corrects_sparse_errors(seed in any::<u64>(), flips in prop::collection::btree_set(0usize..64800, 1..40)) {
        let code = LdpcCode::dvb_s2_rate_half();
        let mut rng = photon_link::rng::stream_rng(seed, 0);
        let info: Vec<u8> = (0..code.k()).map(|_| rand::Rng::random_range(&mut rng, 0..2u8)).collect();
        let mut word = ldpc_encode(&info, &code).unwrap();
        prop_assert!(code.is_codeword(&word));
        for &i in &flips {
            word[i] ^= 1;
        }
        let out = ldpc_decode(&llr_from_hard_bits(&word, 0.01).unwrap(), &code).unwrap();
        prop_assert!(out.converged);
        prop_assert_eq!(out.info, info);
    }
}
