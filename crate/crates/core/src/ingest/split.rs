use serde::{Deserialize, Serialize};

use super::{BeatClass, BeatWindow};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRatio {
    pub train: usize,
    pub test: usize,
}

impl Default for SplitRatio {
    fn default() -> Self {
        Self { train: 4, test: 1 }
    }
}

impl SplitRatio {
    /// Test share of `n` items, rounded down.
    pub fn test_count(&self, n: usize) -> usize {
        n * self.test / (self.train + self.test)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<BeatWindow>,
    pub test: Vec<BeatWindow>,
    pub seed: u64,
    pub per_class: usize,
}

/// Draw `per_class` windows of each class without replacement and split
/// each class's draw train/test by `ratio`.
///
/// Classes are visited in N, SVEB, VEB, F order. For each class the
/// candidate list (input order) is shuffled in full by one shared
/// [`SeededRng`] stream; the first `per_class` are kept, the first
/// `per_class - test_count` of those go to train.
pub fn balance_and_split(
    windows: &[BeatWindow],
    per_class: usize,
    ratio: SplitRatio,
    seed: u64,
) -> Result<DatasetSplit> {
    if ratio.train + ratio.test == 0 {
        return Err(Error::InvalidConfig("split ratio 0:0".into()));
    }
    let mut by_class: [Vec<&BeatWindow>; BeatClass::COUNT] = Default::default();
    for w in windows {
        by_class[w.label.index()].push(w);
    }
    for class in BeatClass::ALL {
        let available = by_class[class.index()].len();
        if available < per_class {
            return Err(Error::InsufficientData {
                class: class.aami(),
                available,
                requested: per_class,
            });
        }
    }

    let mut rng = SeededRng::new(seed);
    let n_test = ratio.test_count(per_class);
    let mut train = Vec::with_capacity(BeatClass::COUNT * (per_class - n_test));
    let mut test = Vec::with_capacity(BeatClass::COUNT * n_test);
    for pool in &mut by_class {
        rng.shuffle(pool);
        let (tr, te) = pool[..per_class].split_at(per_class - n_test);
        train.extend(tr.iter().map(|&w| w.clone()));
        test.extend(te.iter().map(|&w| w.clone()));
    }
    Ok(DatasetSplit {
        train,
        test,
        seed,
        per_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::AamiClass;

    fn pool(counts: [usize; 4]) -> Vec<BeatWindow> {
        let mut out = Vec::new();
        for (class, &n) in BeatClass::ALL.iter().zip(&counts) {
            for i in 0..n {
                out.push(BeatWindow {
                    record_id: format!("{class}"),
                    center_index: i,
                    samples_mv: vec![i as f64],
                    label: *class,
                });
            }
        }
        out
    }

    #[test]
    fn full_sized_split() {
        let all = pool([900, 850, 1000, 802]);
        let split = balance_and_split(&all, 800, SplitRatio::default(), 1).unwrap();
        assert_eq!(split.train.len(), 2560);
        assert_eq!(split.test.len(), 640);
        for class in BeatClass::ALL {
            assert_eq!(split.train.iter().filter(|w| w.label == class).count(), 640);
            assert_eq!(split.test.iter().filter(|w| w.label == class).count(), 160);
        }
    }

    #[test]
    fn disjoint() {
        let all = pool([30, 30, 30, 30]);
        let split = balance_and_split(&all, 25, SplitRatio::default(), 9).unwrap();
        for t in &split.test {
            assert!(!split
                .train
                .iter()
                .any(|w| w.label == t.label && w.center_index == t.center_index));
        }
    }

    #[test]
    fn deterministic() {
        let all = pool([10, 10, 10, 10]);
        let a = balance_and_split(&all, 1, SplitRatio::default(), 42).unwrap();
        let b = balance_and_split(&all, 1, SplitRatio::default(), 42).unwrap();
        assert_eq!(a, b);
        let c = balance_and_split(&all, 5, SplitRatio::default(), 43).unwrap();
        let d = balance_and_split(&all, 5, SplitRatio::default(), 44).unwrap();
        assert_ne!(c, d);
    }

    #[test]
    fn insufficient_class() {
        let all = pool([1000, 1000, 1000, 802]);
        match balance_and_split(&all, 900, SplitRatio::default(), 0) {
            Err(Error::InsufficientData {
                class,
                available,
                requested,
            }) => {
                assert_eq!(class, AamiClass::F);
                assert_eq!(available, 802);
                assert_eq!(requested, 900);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
