//! Generate toy jets, write them as JSONL, and build scaled train/val/test
//! splits of three-node graphs.

use qjet::data::{build_dataset, read_jsonl, synth_jets, write_jsonl, DatasetConfig, FEATURE_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("qjet-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("jets.jsonl");
    write_jsonl(&path, &synth_jets(1500, 42))?;
    let jets = read_jsonl(&path)?;

    let cfg = DatasetConfig { n_train: 1000, n_val: 200, n_test: 200, ..DatasetConfig::default() };
    let (split, stats) = build_dataset(&jets, &cfg)?;
    println!(
        "{} jets read, {} excluded, {} used ({} quark)",
        stats.input_jets, stats.excluded, stats.selected, stats.quarks_selected
    );
    println!("splits: {} / {} / {}", split.train.len(), split.val.len(), split.test.len());
    println!("feature divisors:");
    for (name, s) in FEATURE_NAMES.iter().zip(split.scale) {
        println!("  {name:>3}  {s:.4}");
    }

    let jet = &split.train[0];
    println!("first training jet (label {}):", jet.label);
    for (i, row) in jet.h.iter().enumerate() {
        println!("  node {i}: h = {:.3?}  (φ, y) = {:.3?}", row, jet.x[i]);
    }
    println!("  ΔR: {:.4?}", jet.a);
    Ok(())
}
