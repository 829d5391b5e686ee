use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Column, Matrix, MethodError};

pub const KMEANS_MAX_ITER: usize = 100;

/// How k-NN combines neighbour labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KnnMode {
    /// Majority label; ties go to the label seen first among the neighbours
    /// ordered by (distance, training row).
    Vote,
    /// Mean of numeric neighbour labels.
    Mean,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    LinearRegression {
        coefficients: Vec<f64>,
        intercept: f64,
    },
    Knn {
        points: Matrix,
        labels: Column,
        k: usize,
        mode: KnnMode,
    },
    KMeans {
        centroids: Matrix,
        /// Objective after each assignment step.
        history: Vec<f64>,
        iterations: usize,
    },
}

impl Model {
    pub fn algorithm(&self) -> &'static str {
        match self {
            Model::LinearRegression { .. } => "linear_regression",
            Model::Knn { .. } => "knn",
            Model::KMeans { .. } => "kmeans",
        }
    }

    fn width(&self) -> usize {
        match self {
            Model::LinearRegression { coefficients, .. } => coefficients.len(),
            Model::Knn { points, .. } => points.cols(),
            Model::KMeans { centroids, .. } => centroids.cols(),
        }
    }

    pub fn predict(&self, features: &Matrix) -> Result<Column, MethodError> {
        if features.cols() != self.width() {
            return Err(MethodError::DimensionMismatch {
                expected: self.width(),
                got: features.cols(),
            });
        }
        Ok(match self {
            Model::LinearRegression {
                coefficients,
                intercept,
            } => Column::Numeric(
                (0..features.rows())
                    .map(|i| intercept + dot(coefficients, features.row(i)))
                    .collect(),
            ),
            Model::Knn {
                points,
                labels,
                k,
                mode,
            } => knn_predict(points, labels, *k, *mode, features)?,
            Model::KMeans { centroids, .. } => Column::Numeric(
                (0..features.rows())
                    .map(|i| nearest(centroids, features.row(i)) as f64)
                    .collect(),
            ),
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, MethodError> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot][col].abs() <= 1e-12 * scale {
            return Err(MethodError::SingularSystem);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            let (upper, lower) = a.split_at_mut(row);
            for (dst, src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - tail) / a[i][i];
    }
    Ok(x)
}

/// Least squares with intercept via the normal equations.
pub fn fit_linear_regression(features: &Matrix, labels: &[f64]) -> Result<Model, MethodError> {
    let n = features.rows();
    if n == 0 {
        return Err(MethodError::EmptyTrainingSet);
    }
    if labels.len() != n {
        return Err(MethodError::LengthMismatch {
            left: n,
            right: labels.len(),
        });
    }
    let d = features.cols() + 1;
    let mut xtx = vec![vec![0.0; d]; d];
    let mut xty = vec![0.0; d];
    for (i, &y) in labels.iter().enumerate() {
        let row: Vec<f64> = std::iter::once(1.0).chain(features.row(i).iter().copied()).collect();
        for a in 0..d {
            xty[a] += row[a] * y;
            for b in 0..d {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    let beta = solve(xtx, xty)?;
    Ok(Model::LinearRegression {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
    })
}

pub fn fit_knn(features: &Matrix, labels: &Column, k: i64, mode: KnnMode) -> Result<Model, MethodError> {
    let rows = features.rows();
    if rows == 0 {
        return Err(MethodError::EmptyTrainingSet);
    }
    if labels.len() != rows {
        return Err(MethodError::LengthMismatch {
            left: rows,
            right: labels.len(),
        });
    }
    if k < 1 || k as usize > rows {
        return Err(MethodError::BadK { k, rows });
    }
    if mode == KnnMode::Mean {
        labels.numeric("k-NN regression labels")?;
    }
    Ok(Model::Knn {
        points: features.clone(),
        labels: labels.clone(),
        k: k as usize,
        mode,
    })
}

/// Indices of the `k` nearest training rows, by (distance, row index).
pub fn neighbours(points: &Matrix, query: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<(f64, usize)> = (0..points.rows()).map(|i| (sq_dist(points.row(i), query), i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    order.into_iter().take(k).map(|(_, i)| i).collect()
}

fn knn_predict(points: &Matrix, labels: &Column, k: usize, mode: KnnMode, features: &Matrix) -> Result<Column, MethodError> {
    let rows = 0..features.rows();
    match mode {
        KnnMode::Mean => {
            let y = labels.numeric("k-NN regression labels")?;
            Ok(Column::Numeric(
                rows.map(|i| {
                    let nn = neighbours(points, features.row(i), k);
                    nn.iter().map(|&j| y[j]).sum::<f64>() / nn.len() as f64
                })
                .collect(),
            ))
        }
        KnnMode::Vote => {
            let winners: Vec<usize> = rows.map(|i| vote(labels, &neighbours(points, features.row(i), k))).collect();
            Ok(labels.select(&winners))
        }
    }
}

/// Training row whose label wins the vote among `nn`.
fn vote(labels: &Column, nn: &[usize]) -> usize {
    // (representative row, count) in first-seen order
    let mut tally: Vec<(usize, usize)> = Vec::new();
    for &j in nn {
        match tally.iter_mut().find(|(rep, _)| labels.same(*rep, labels, j)) {
            Some(entry) => entry.1 += 1,
            None => tally.push((j, 1)),
        }
    }
    let best = tally.iter().map(|t| t.1).max().unwrap_or(0);
    tally.iter().find(|t| t.1 == best).map(|t| t.0).expect("k >= 1")
}

fn nearest(centroids: &Matrix, x: &[f64]) -> usize {
    (0..centroids.rows())
        .map(|c| (sq_dist(centroids.row(c), x), c))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, c)| c)
        .expect("at least one centroid")
}

/// Lloyd's algorithm from `k` distinct seeded-random training rows.
pub fn fit_kmeans(features: &Matrix, k: i64, seed: u64) -> Result<Model, MethodError> {
    let rows = features.rows();
    if rows == 0 {
        return Err(MethodError::EmptyTrainingSet);
    }
    if k < 1 || k as usize > rows {
        return Err(MethodError::BadK { k, rows });
    }
    let k = k as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut init = rand::seq::index::sample(&mut rng, rows, k).into_vec();
    init.sort_unstable();
    let mut centroids = features.select_rows(&init);
    let mut assignment: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut iterations = 0;
    while iterations < KMEANS_MAX_ITER {
        iterations += 1;
        let next: Vec<usize> = (0..rows).map(|i| nearest(&centroids, features.row(i))).collect();
        let objective: f64 = (0..rows).map(|i| sq_dist(centroids.row(next[i]), features.row(i))).sum();
        history.push(objective);
        if next == assignment {
            break;
        }
        assignment = next;
        let cols = features.cols();
        let mut sums = vec![0.0; k * cols];
        let mut counts = vec![0usize; k];
        for (i, &c) in assignment.iter().enumerate() {
            counts[c] += 1;
            for (j, x) in features.row(i).iter().enumerate() {
                sums[c * cols + j] += x;
            }
        }
        let data = (0..k)
            .flat_map(|c| {
                let (sums, centroids, counts) = (&sums, &centroids, &counts);
                (0..cols).map(move |j| match counts[c] {
                    0 => centroids.get(c, j),
                    n => sums[c * cols + j] / n as f64,
                })
            })
            .collect();
        centroids = Matrix::new(k, cols, data)?;
    }
    Ok(Model::KMeans {
        centroids,
        history,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linreg_affine() {
        let x = Matrix::new(4, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let m = fit_linear_regression(&x, &[1.0, 3.0, 5.0, 7.0]).unwrap();
        let Model::LinearRegression {
            coefficients,
            intercept,
        } = &m
        else {
            panic!()
        };
        assert!((coefficients[0] - 2.0).abs() < 1e-9);
        assert!((intercept - 1.0).abs() < 1e-9);
        let p = m.predict(&Matrix::new(1, 1, vec![5.0]).unwrap()).unwrap();
        assert!((p.as_numeric().unwrap()[0] - 11.0).abs() < 1e-9);
    }

    #[test]
    fn linreg_singular() {
        let x = Matrix::new(3, 2, vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0]).unwrap();
        assert_eq!(fit_linear_regression(&x, &[1.0, 2.0, 3.0]), Err(MethodError::SingularSystem));
    }

    #[test]
    fn knn_bad_k_and_self_prediction() {
        let x = Matrix::new(3, 1, vec![0.0, 1.0, 5.0]).unwrap();
        let y = Column::Categorical(vec!["a".into(), "b".into(), "c".into()]);
        assert!(matches!(fit_knn(&x, &y, 4, KnnMode::Vote), Err(MethodError::BadK { .. })));
        let m = fit_knn(&x, &y, 1, KnnMode::Vote).unwrap();
        assert_eq!(m.predict(&x).unwrap(), y);
    }

    #[test]
    fn knn_tie_prefers_nearer() {
        let x = Matrix::new(2, 1, vec![0.0, 10.0]).unwrap();
        let y = Column::Categorical(vec!["near".into(), "far".into()]);
        let m = fit_knn(&x, &y, 2, KnnMode::Vote).unwrap();
        let q = Matrix::new(2, 1, vec![9.0, 5.0]).unwrap();
        // 9 is nearer to row 1; 5 is equidistant, so the lower row wins.
        assert_eq!(m.predict(&q).unwrap(), Column::Categorical(vec!["far".into(), "near".into()]));
    }

    #[test]
    fn knn_dimension_mismatch() {
        let x = Matrix::new(2, 1, vec![0.0, 10.0]).unwrap();
        let m = fit_knn(&x, &Column::Numeric(vec![1.0, 2.0]), 1, KnnMode::Mean).unwrap();
        assert!(matches!(
            m.predict(&Matrix::new(1, 2, vec![0.0, 0.0]).unwrap()),
            Err(MethodError::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn kmeans_two_clusters() {
        let x = Matrix::new(4, 1, vec![0.0, 1.0, 10.0, 11.0]).unwrap();
        for seed in 0..10 {
            let Model::KMeans { centroids, history, .. } = fit_kmeans(&x, 2, seed).unwrap() else { panic!() };
            let mut c = centroids.column(0);
            c.sort_by(f64::total_cmp);
            assert_eq!(c, vec![0.5, 10.5], "seed {seed}");
            assert!(history.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn solve_small_system() {
        let x = solve(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
    }
}
