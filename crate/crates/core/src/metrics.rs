//! Accuracy, ROC curve and AUC.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("no samples")]
    Empty,
    #[error("{scores} scores but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("label {0} is not 0 or 1")]
    BadLabel(u8),
    #[error("AUC is undefined: only class {0} present")]
    SingleClass(u8),
    #[error("score {0} is not finite")]
    NonFinite(f64),
}

fn check(scores: &[f64], labels: &[u8]) -> Result<(), MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch { scores: scores.len(), labels: labels.len() });
    }
    if scores.is_empty() {
        return Err(MetricsError::Empty);
    }
    if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
        return Err(MetricsError::BadLabel(bad));
    }
    if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(MetricsError::NonFinite(bad));
    }
    Ok(())
}

/// Fraction of samples whose predicted class matches the label, predicting
/// class 1 when the score is at least 0.5.
pub fn accuracy(scores: &[f64], labels: &[u8]) -> Result<f64, MetricsError> {
    check(scores, labels)?;
    let correct = scores.iter().zip(labels).filter(|(&s, &l)| u8::from(s >= 0.5) == l).count();
    Ok(correct as f64 / scores.len() as f64)
}

/// ROC points from the strictest threshold to the loosest. The first point
/// is `(0, 0)` at threshold `+∞`, the last is `(1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    #[serde(with = "nonfinite::vec")]
    pub thresholds: Vec<f64>,
    pub fpr: Vec<f64>,
    pub tpr: Vec<f64>,
}

/// ROC curve and trapezoidal AUC. Tied scores move the curve diagonally,
/// which is the same as giving tied positive/negative pairs half credit.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<(RocCurve, f64), MetricsError> {
    check(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 {
        return Err(MetricsError::SingleClass(0));
    }
    if neg == 0 {
        return Err(MetricsError::SingleClass(1));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut roc = RocCurve { thresholds: vec![f64::INFINITY], fpr: vec![0.0], tpr: vec![0.0] };
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut area2 = 0usize; // twice the area in units of 1/(pos·neg)
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        let (tp0, fp0) = (tp, fp);
        while k < order.len() && scores[order[k]] == s {
            if labels[order[k]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        area2 += (fp - fp0) * (tp + tp0);
        roc.thresholds.push(s);
        roc.fpr.push(fp as f64 / neg as f64);
        roc.tpr.push(tp as f64 / pos as f64);
    }
    let auc = area2 as f64 / (2.0 * pos as f64 * neg as f64);
    Ok((roc, auc))
}

/// JSON has no infinities or NaN; these write them as the strings `"inf"`,
/// `"-inf"` and `"nan"` so they survive a round trip.
pub(crate) mod nonfinite {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(v: f64) -> Repr {
        match v {
            v if v.is_finite() => Repr::Num(v),
            v if v.is_nan() => Repr::Text("nan".into()),
            v if v > 0.0 => Repr::Text("inf".into()),
            _ => Repr::Text("-inf".into()),
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("expected a number, got '{other}'"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|&x| to_repr(x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Pairwise statistic: P(score⁺ > score⁻) + ½ P(score⁺ = score⁻).
    fn mann_whitney(scores: &[f64], labels: &[u8]) -> f64 {
        let (mut wins, mut pairs) = (0.0, 0.0);
        for (i, &si) in scores.iter().enumerate() {
            for (j, &sj) in scores.iter().enumerate() {
                if labels[i] == 1 && labels[j] == 0 {
                    pairs += 1.0;
                    wins += if si > sj {
                        1.0
                    } else if si == sj {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&[0.9, 0.1], &[1, 0]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1.0, 0.0, 1.0], &[1, 0, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0.9, 0.2, 0.6, 0.4], &[1, 0, 0, 0]).unwrap(), 0.75);
        assert_eq!(accuracy(&[0.5], &[1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[], &[]), Err(MetricsError::Empty));
    }

    #[test]
    fn auc_cases() {
        assert_eq!(roc_auc(&[0.9, 0.8, 0.1], &[1, 1, 0]).unwrap().1, 1.0);
        assert_eq!(roc_auc(&[0.3; 6], &[1, 0, 1, 0, 0, 1]).unwrap().1, 0.5);
        assert_eq!(roc_auc(&[0.8, 0.4, 0.6, 0.2], &[1, 1, 0, 0]).unwrap().1, 0.75);
        assert_eq!(roc_auc(&[0.1, 0.2], &[1, 1]), Err(MetricsError::SingleClass(1)));
    }

    #[test]
    fn curve_survives_json() {
        let (roc, _) = roc_auc(&[0.8, 0.4, 0.6, 0.2], &[1, 1, 0, 0]).unwrap();
        let text = serde_json::to_string(&roc).unwrap();
        assert!(text.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<RocCurve>(&text).unwrap(), roc);
    }

    #[test]
    fn curve_endpoints() {
        let (roc, _) = roc_auc(&[0.8, 0.4, 0.6, 0.2, 0.4], &[1, 1, 0, 0, 0]).unwrap();
        assert_eq!((roc.fpr[0], roc.tpr[0]), (0.0, 0.0));
        assert_eq!((*roc.fpr.last().unwrap(), *roc.tpr.last().unwrap()), (1.0, 1.0));
        assert_eq!(roc.thresholds.len(), 5);
    }

    fn scored() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
        (2usize..200).prop_flat_map(|n| {
            (prop::collection::vec(0u8..12, n).prop_map(|v| v.into_iter().map(|k| k as f64 / 11.0).collect()), prop::collection::vec(0u8..=1, n))
        })
    }

    proptest! {
        #[test]
        fn trapezoid_equals_pairwise((scores, labels) in scored()) {
            prop_assume!(labels.contains(&0) && labels.contains(&1));
            let (roc, auc) = roc_auc(&scores, &labels).unwrap();
            prop_assert!((auc - mann_whitney(&scores, &labels)).abs() <= 1e-12);
            prop_assert!(roc.fpr.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(roc.tpr.windows(2).all(|w| w[0] <= w[1]));
            let flipped: Vec<u8> = labels.iter().map(|l| 1 - l).collect();
            prop_assert!((roc_auc(&scores, &flipped).unwrap().1 - (1.0 - auc)).abs() <= 1e-12);
            let warped: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
            prop_assert_eq!(roc_auc(&warped, &labels).unwrap().1, auc);
        }
    }
}
