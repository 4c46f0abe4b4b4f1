//! ROC curve and AUC for a handful of scores, with ties.

use qjet::metrics::{accuracy, roc_auc};

fn main() -> Result<(), qjet::metrics::MetricsError> {
    let scores = [0.9, 0.8, 0.8, 0.6, 0.55, 0.4, 0.4, 0.2];
    let labels = [1, 1, 0, 1, 0, 1, 0, 0];
    let (roc, auc) = roc_auc(&scores, &labels)?;
    println!("threshold    fpr    tpr");
    for ((t, f), p) in roc.thresholds.iter().zip(&roc.fpr).zip(&roc.tpr) {
        println!("{t:>9.2}  {f:.3}  {p:.3}");
    }
    println!("AUC {auc:.4}, accuracy at 0.5 {:.3}", accuracy(&scores, &labels)?);
    Ok(())
}
