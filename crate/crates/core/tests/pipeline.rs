use photon_link::link::{estimate_payload_ber, SymbolPacking};
use photon_link::rng::stream_rng;
use photon_link::*;
use rand::Rng;

fn setup(ratio: f64) -> (GridSpec, ChannelMatrix, GrayMap, LdpcCode) {
    let grid = GridSpec::reference();
    let channel = build_channel_matrix(
        &grid,
        &PointSpread::default(),
        &NoiseModel::new(ratio).unwrap(),
    )
    .unwrap();
    let map = GrayMap::for_grid(&grid);
    (grid, channel, map, LdpcCode::dvb_s2_rate_half())
}

fn message(seed: u64, len: usize) -> Vec<u8> {
    let mut rng = stream_rng(seed, u64::MAX);
    (0..len).map(|_| rng.random_range(0..2u8)).collect()
}

#[test]
fn high_ratio_channel_decodes_every_run() {
    let (grid, channel, map, code) = setup(100.0);
    let packing = SymbolPacking::for_grid(&grid, &map).unwrap();
    let model = estimate_payload_ber(&channel, &map, &packing).unwrap();
    let runs = 10u64;
    let mut raw_sum = 0.0;
    for seed in 0..runs {
        let msg = message(seed, code.k());
        let r = run_full_pipeline(&msg, &channel, &map, &code, seed).unwrap();
        assert_eq!(r.decoded, msg, "seed {seed}: {:?}", r.diagnostics.post_ber);
        assert_eq!(r.diagnostics.post_ber, 0.0);
        assert!(r.diagnostics.converged, "seed {seed}");
        assert!(r.diagnostics.symbol_errors > 0);
        raw_sum += r.diagnostics.raw_ber;
    }
    // The empirical raw BER of the uncoded stage agrees with the model
    // within 3 binomial standard deviations over all bits sent.
    let bits = (runs as usize * code.n()) as f64;
    let mean = raw_sum / runs as f64;
    let sigma = (model * (1.0 - model) / bits).sqrt();
    assert!(
        (mean - model).abs() <= 3.0 * sigma,
        "raw {mean} vs model {model} (sigma {sigma})"
    );
}

#[test]
fn reference_ratio_raw_ber_matches_model() {
    let (grid, channel, map, code) = setup(NoiseModel::REFERENCE_RATIO);
    let packing = SymbolPacking::for_grid(&grid, &map).unwrap();
    let model = estimate_payload_ber(&channel, &map, &packing).unwrap();
    let runs = 4u64;
    let mut raw_sum = 0.0;
    for seed in 0..runs {
        let r = run_full_pipeline(&message(seed, code.k()), &channel, &map, &code, seed).unwrap();
        raw_sum += r.diagnostics.raw_ber;
        assert!(r.diagnostics.post_ber < r.diagnostics.raw_ber);
    }
    let mean = raw_sum / runs as f64;
    let sigma = (model * (1.0 - model) / (runs as usize * code.n()) as f64).sqrt();
    assert!(
        (mean - model).abs() <= 3.0 * sigma,
        "raw {mean} vs model {model}"
    );
}

#[test]
fn same_seed_same_diagnostics() {
    let (_, channel, map, code) = setup(30.0);
    let msg = message(3, 20000);
    let a = run_full_pipeline(&msg, &channel, &map, &code, 7).unwrap();
    let b = run_full_pipeline(&msg, &channel, &map, &code, 7).unwrap();
    assert_eq!(a, b);
    let c = run_full_pipeline(&msg, &channel, &map, &code, 8).unwrap();
    assert_ne!(a.diagnostics.raw_ber, c.diagnostics.raw_ber);
}

#[test]
fn short_messages_are_padded_and_stripped() {
    let (grid, _, map, code) = setup(100.0);
    let msg = message(1, 17);
    let r = run_full_pipeline(&msg, &ChannelMatrix::identity(&grid), &map, &code, 1).unwrap();
    assert_eq!(r.decoded, msg);
    let empty = run_full_pipeline(&[], &ChannelMatrix::identity(&grid), &map, &code, 1).unwrap();
    assert!(empty.decoded.is_empty());
}
