use proptest::prelude::*;
use rcnn_cli::pgm::{encode_pgm, load_image, parse_pgm, save_image};
use rcnn_cli::pulses::{load_pulses, parse_pulse_rows, save_pulses};
use rcnn_cli::CliError;
use rcnn_core::psd::{synth_pulse_dataset, PulseLabel};
use rcnn_core::{Grid, StimulusField};

#[test]
fn two_by_two_gray_levels_map_to_stimuli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.pgm");
    std::fs::write(
        &path,
        encode_pgm(&Grid::from_vec(2, 2, vec![0, 128, 255, 64]).unwrap()),
    )
    .unwrap();
    let s = load_image(&path).unwrap();
    let expect = [0.001, 128.0 / 255.0, 1.0, 64.0 / 255.0];
    for (v, e) in s.values().as_slice().iter().zip(expect) {
        assert!((v - e).abs() < 1e-15, "{v} vs {e}");
    }
    assert!((s.values().as_slice()[1] - 0.50196).abs() < 1e-5);
    assert!((s.values().as_slice()[3] - 0.25098).abs() < 1e-5);
}

#[test]
fn ascii_pgm_is_a_parse_error_with_offset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ascii.pgm");
    std::fs::write(&path, "P2\n1 1\n255\n7\n").unwrap();
    match load_image(&path).unwrap_err() {
        CliError::Pgm { source, .. } => assert_eq!(source.offset, 0),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_file_is_an_input_error() {
    let e = load_image(std::path::Path::new("/nonexistent/x.pgm")).unwrap_err();
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn generator_round_trip_is_exact() {
    let pulses = synth_pulse_dataset(20, 0.01, 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pulses.csv");
    save_pulses(&pulses, &path).unwrap();
    let back = load_pulses(&path).unwrap();
    assert_eq!(back.len(), pulses.len());
    for (a, b) in pulses.iter().zip(&back) {
        assert_eq!(a.label(), b.label());
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x - y).abs() <= 1e-9);
        }
    }
}

#[test]
fn labels_are_optional_per_file() {
    let rows = parse_pulse_rows("n,0,2,1\ng,0,4,1\n").unwrap();
    assert_eq!(rows[0].label, Some(PulseLabel::Neutron));
    assert_eq!(rows[1].samples, vec![0.0, 1.0, 0.25]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stimulus_round_trips_within_one_level(
        w in 1usize..12,
        h in 1usize..12,
        seed in any::<u64>(),
    ) {
        let values = Grid::from_fn(w, h, |r, c| {
            let x = seed.wrapping_mul(6364136223846793005).wrapping_add((r * 31 + c) as u64);
            0.001 + 0.999 * ((x >> 11) as f64 / (1u64 << 53) as f64)
        });
        let field = StimulusField::new(values).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        save_image(&field, &path).unwrap();
        let back = load_image(&path).unwrap();
        for (a, b) in field.values().as_slice().iter().zip(back.values().as_slice()) {
            prop_assert!((a - b).abs() <= 1.0 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn pgm_bytes_round_trip(w in 1usize..20, h in 1usize..20, fill in any::<u8>()) {
        let g = Grid::from_fn(w, h, |r, c| fill.wrapping_add((r * 7 + c * 13) as u8));
        prop_assert_eq!(parse_pgm(&encode_pgm(&g)).unwrap(), g);
    }

    #[test]
    fn truncation_anywhere_is_reported(w in 1usize..8, h in 1usize..8, cut in 0usize..1000) {
        let bytes = encode_pgm(&Grid::filled(w, h, 9u8));
        let cut = cut % bytes.len();
        let e = parse_pgm(&bytes[..cut]).unwrap_err();
        prop_assert!(e.offset <= cut);
    }
}
