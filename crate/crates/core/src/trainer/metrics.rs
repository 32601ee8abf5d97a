use serde::Serialize;

use crate::kernels::DenseMatrix;

/// Pooled confusion counts over every (node, class) pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl Confusion {
    /// `2 TP / (2 TP + FP + FN)`, or 0 when all three counts are zero.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * self.tp as f64 / denom as f64
        }
    }

    pub fn add(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => {}
        }
    }
}

/// Binary predictions: threshold 0.5 when multilabel, row argmax otherwise.
pub fn predict(prob: &DenseMatrix, multilabel: bool) -> Vec<Vec<bool>> {
    let (n, c) = prob.shape();
    (0..n)
        .map(|i| {
            if multilabel {
                (0..c).map(|j| prob[(i, j)] > 0.5).collect()
            } else {
                let best = (0..c).fold(0, |b, j| if prob[(i, j)] > prob[(i, b)] { j } else { b });
                (0..c).map(|j| j == best).collect()
            }
        })
        .collect()
}

/// Micro-averaged F1 of `predicted` rows against the 0/1 `truth` rows.
pub fn f1_micro<'a>(predicted: &[Vec<bool>], truth: impl IntoIterator<Item = &'a [u8]>) -> f64 {
    let mut c = Confusion::default();
    for (p, t) in predicted.iter().zip(truth) {
        for (&pj, &tj) in p.iter().zip(t) {
            c.add(pj, tj != 0);
        }
    }
    c.f1()
}
