use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cnn::cnn_forward;
use super::data::Sample;
use super::ModelKind;
use crate::error::{Error, Result};
use crate::snn::{simulate, spike_counter_classify, Frames, Network};

/// Accuracy and confusion counts, rows indexed by true class and columns
/// by prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    pub confusion: Vec<Vec<u64>>,
}

impl Evaluation {
    pub fn from_predictions(
        labels: &[usize],
        predictions: &[usize],
        classes: usize,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput);
        }
        if labels.len() != predictions.len() {
            return Err(Error::Shape("one prediction per label".into()));
        }
        let mut confusion = vec![vec![0u64; classes]; classes];
        for (&y, &p) in labels.iter().zip(predictions) {
            if y >= classes || p >= classes {
                return Err(Error::Shape(format!(
                    "class index out of range for {classes} classes"
                )));
            }
            confusion[y][p] += 1;
        }
        Ok(Self {
            accuracy: confusion_accuracy(&confusion),
            confusion,
        })
    }

    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }
}

/// `trace / sum` of a confusion matrix.
pub fn confusion_accuracy(confusion: &[Vec<u64>]) -> f64 {
    let total: u64 = confusion.iter().flatten().sum();
    let hits: u64 = confusion.iter().enumerate().map(|(i, row)| row[i]).sum();
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

pub fn predict(kind: ModelKind, net: &Network, input: &[f32]) -> Result<usize> {
    match kind {
        ModelKind::Scnn => Ok(spike_counter_classify(&simulate(
            net,
            Frames::Static(input),
            None,
            None,
        )?)),
        ModelKind::Cnn => Ok(spike_counter_classify(&cnn_forward(net, input, None)?)),
    }
}

pub fn evaluate(kind: ModelKind, net: &Network, samples: &[Sample]) -> Result<Evaluation> {
    let predictions = samples
        .par_iter()
        .map(|s| predict(kind, net, &s.input))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<usize> = samples.iter().map(|s| s.label).collect();
    Evaluation::from_predictions(&labels, &predictions, net.spec.num_classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictor_is_diagonal() {
        let labels: Vec<usize> = (0..40).map(|i| i % 4).collect();
        let e = Evaluation::from_predictions(&labels, &labels, 4).unwrap();
        assert_eq!(e.accuracy, 1.0);
        for (i, row) in e.confusion.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                assert_eq!(c, if i == j { 10 } else { 0 });
            }
        }
    }

    #[test]
    fn constant_predictor_on_balanced_set() {
        let labels: Vec<usize> = (0..640).map(|i| i % 4).collect();
        let e = Evaluation::from_predictions(&labels, &vec![2; 640], 4).unwrap();
        assert_eq!(e.accuracy, 0.25);
        assert_eq!(e.total(), 640);
        assert_eq!(confusion_accuracy(&e.confusion), e.accuracy);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(Evaluation::from_predictions(&[], &[], 4).is_err());
    }
}
