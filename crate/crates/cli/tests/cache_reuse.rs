//! Kept in its own binary: the eigendecomposition counter is process-wide.

use ethspec::linalg::eigh_call_count;
use ethspec_cli::config::ExperimentConfig;
use ethspec_cli::run::{run, Command};

#[test]
fn eth_after_spectrum_reuses_cached_eigenbasis() {
    let tmp = tempfile::tempdir().unwrap();
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/ci.toml");
    let mut cfg = ExperimentConfig::load(&path).unwrap();
    cfg.output.dir = tmp.path().to_path_buf();
    cfg.output.cache = true;
    cfg.sweep.field = vec![0.2, 0.7];

    let first = run(Command::Spectrum, &cfg).unwrap();
    assert_eq!(first.diagonalizations, 2);
    let before = eigh_call_count();
    let second = run(Command::Eth, &cfg).unwrap();
    assert_eq!(second.diagonalizations, 0);
    assert_eq!(eigh_call_count(), before);
    assert_eq!(second.files.len(), 2 * 4);

    // a different field is a different cache entry
    cfg.sweep.field = vec![0.3];
    assert_eq!(run(Command::Spectrum, &cfg).unwrap().diagonalizations, 1);
}
