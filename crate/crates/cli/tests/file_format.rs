use std::path::Path;

use bloch_cli::file::{parse_potential, read_potential, render_potential, write_potential};
use bloch_cli::PotentialFile;
use bloch_core::{Complex64, LatticeConfig, Potential};
use proptest::prelude::*;

#[test]
fn bare_numbers_and_pairs_mix() {
    let v = parse_potential(
        r#"{"periods":[3],"values":[1.5,[0,-2],-3]}"#,
        Path::new("m"),
    )
    .unwrap();
    assert_eq!(
        v.values(),
        &[
            Complex64::new(1.5, 0.0),
            Complex64::new(0.0, -2.0),
            Complex64::new(-3.0, 0.0)
        ]
    );
}

#[test]
fn values_follow_canonical_order() {
    let v = parse_potential(
        r#"{"periods":[2,3],"values":[0,1,2,3,4,5]}"#,
        Path::new("m"),
    )
    .unwrap();
    let cfg = v.cfg();
    assert_eq!(
        v.at(&cfg.cell(vec![1, 0]).unwrap()),
        Complex64::new(3.0, 0.0)
    );
    assert_eq!(
        v.at(&cfg.cell(vec![0, 2]).unwrap()),
        Complex64::new(2.0, 0.0)
    );
}

#[test]
fn written_files_use_pairs() {
    let cfg = LatticeConfig::new([2]).unwrap();
    let v = Potential::from_real(cfg, &[1.0, -0.25]).unwrap();
    assert_eq!(
        render_potential(&v),
        "{\"periods\":[2],\"values\":[[1.0,0.0],[-0.25,0.0]]}\n"
    );
    let file = PotentialFile::from_potential(&v);
    assert_eq!(file.to_potential().unwrap(), v);
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE / 3.0),
        Just(f64::MAX),
    ]
}

proptest! {
    #[test]
    fn written_files_reread_bit_identically(
        periods in prop::collection::vec(1usize..4, 1..3),
        seed in prop::collection::vec((finite(), finite()), 27),
    ) {
        let cfg = LatticeConfig::new(periods).unwrap();
        let values: Vec<Complex64> = seed.iter().take(cfg.cell_size()).map(|&(a, b)| Complex64::new(a, b)).collect();
        let v = Potential::new(cfg, values).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.json");
        write_potential(&path, &v).unwrap();
        let (back, _) = read_potential(&path).unwrap();
        for (x, y) in v.values().iter().zip(back.values()) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}
