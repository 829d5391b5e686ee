use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Column, Matrix, MethodError};

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train_features: Matrix,
    pub train_labels: Column,
    pub test_features: Matrix,
    pub test_labels: Column,
    /// Source row indices, in output order.
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

/// Number of training rows: `floor(ratio * n)` clamped to `[1, n - 1]`.
pub fn train_size(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64).floor() as usize).clamp(1, n - 1)
}

/// Seeded shuffle followed by a cut at [`train_size`].
pub fn train_test_split(features: &Matrix, labels: &Column, ratio: f64, seed: u64) -> Result<Split, MethodError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(MethodError::BadRatio(ratio));
    }
    let n = features.rows();
    if n != labels.len() {
        return Err(MethodError::LengthMismatch {
            left: n,
            right: labels.len(),
        });
    }
    if n < 2 {
        return Err(MethodError::TooFewRows(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = train_size(n, ratio);
    let (train, test) = order.split_at(cut);
    Ok(Split {
        train_features: features.select_rows(train),
        train_labels: labels.select(train),
        test_features: features.select_rows(test),
        test_labels: labels.select(test),
        train_rows: train.to_vec(),
        test_rows: test.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(n: usize) -> (Matrix, Column) {
        let m = Matrix::new(n, 1, (0..n).map(|i| i as f64).collect()).unwrap();
        let l = Column::Numeric((0..n).map(|i| i as f64 * 10.0).collect());
        (m, l)
    }

    #[test]
    fn four_rows_three_one() {
        let (m, l) = data(4);
        let s = train_test_split(&m, &l, 0.75, 1).unwrap();
        assert_eq!(s.train_features.rows(), 3);
        assert_eq!(s.test_features.rows(), 1);
    }

    #[test]
    fn bad_ratio_and_rows() {
        let (m, l) = data(4);
        assert_eq!(train_test_split(&m, &l, 1.0, 1), Err(MethodError::BadRatio(1.0)));
        assert_eq!(train_test_split(&m, &l, 0.0, 1), Err(MethodError::BadRatio(0.0)));
        let (m1, l1) = data(1);
        assert_eq!(train_test_split(&m1, &l1, 0.5, 1), Err(MethodError::TooFewRows(1)));
    }

    #[test]
    fn clamped_sizes() {
        assert_eq!(train_size(10, 0.01), 1);
        assert_eq!(train_size(10, 0.99), 9);
    }

    #[test]
    fn rows_stay_paired_and_seeded() {
        let (m, l) = data(20);
        let a = train_test_split(&m, &l, 0.5, 42).unwrap();
        let b = train_test_split(&m, &l, 0.5, 42).unwrap();
        assert_eq!(a, b);
        for (i, &row) in a.test_rows.iter().enumerate() {
            assert_eq!(a.test_features.get(i, 0), row as f64);
            assert_eq!(a.test_labels.as_numeric().unwrap()[i], row as f64 * 10.0);
        }
    }
}
