//! Train one model on toy jets and print its history.
//!
//! cargo run --release --example train -- eqgnn

use qjet::data::{build_dataset, synth_jets, DatasetConfig};
use qjet::model::{Model, ModelKind, ModelSpec};
use qjet::train::{train_model_with, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kind: ModelKind = std::env::args().nth(1).as_deref().unwrap_or("egnn").parse()?;
    let cfg = DatasetConfig { n_train: 800, n_val: 100, n_test: 100, ..DatasetConfig::default() };
    let (data, _) = build_dataset(&synth_jets(1000, 7), &cfg)?;

    let mut model = Model::new(ModelSpec::default_for(kind), 0)?;
    let train = TrainConfig { epochs: 10, checkpoint_start: 5, ..TrainConfig::default_for(kind) };
    println!("{kind}: |Θ| = {}, batch {}, lr {}", model.param_count(), train.batch_size, train.lr);
    let report = train_model_with(&mut model, &data, &train, None, &mut |e| {
        println!(
            "epoch {:>2}  loss {:.4}/{:.4}  acc {:.3}/{:.3}  val AUC {:.4}",
            e.epoch,
            e.train_loss,
            e.val_loss,
            e.train_acc,
            e.val_acc,
            e.val_auc.unwrap_or(f64::NAN)
        )
    })?;
    println!("kept epoch {}; test AUC {:.4}, accuracy {:.3}", report.best_epoch, report.test.auc.unwrap_or(f64::NAN), report.test.accuracy);
    Ok(())
}
