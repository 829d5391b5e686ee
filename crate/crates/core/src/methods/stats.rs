use super::{Matrix, MethodError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    MinMax,
    ZScore,
}

pub fn mean(v: &[f64]) -> Result<f64, MethodError> {
    if v.is_empty() {
        return Err(MethodError::EmptyVector);
    }
    Ok(v.iter().sum::<f64>() / v.len() as f64)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Linear interpolation between order statistics at rank `p/100 * (n-1)`.
pub fn percentile(v: &[f64], p: f64) -> Result<f64, MethodError> {
    if v.is_empty() {
        return Err(MethodError::EmptyVector);
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(MethodError::BadPercentile(p));
    }
    let s = sorted(v);
    let pos = p / 100.0 * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(s[lo] + (s[hi] - s[lo]) * frac)
}

pub fn median(v: &[f64]) -> Result<f64, MethodError> {
    percentile(v, 50.0)
}

/// Equal-width bins over `[min, max]`; returns a `bins x 2` matrix of
/// (lower edge, count). The maximum falls into the last bin.
pub fn grouped_frequency(v: &[f64], bins: i64) -> Result<Matrix, MethodError> {
    if v.is_empty() {
        return Err(MethodError::EmptyVector);
    }
    if bins < 1 {
        return Err(MethodError::BadBins(bins));
    }
    let n = bins as usize;
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / n as f64;
    let mut counts = vec![0usize; n];
    for &x in v {
        let idx = if width > 0.0 {
            (((x - min) / width).floor() as usize).min(n - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    let data = counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| [min + width * i as f64, c as f64])
        .collect();
    Matrix::new(n, 2, data)
}

/// Min-max scaling to [0, 1] or z-scores with population standard
/// deviation.
pub fn normalize(v: &[f64], mode: NormMode) -> Result<Vec<f64>, MethodError> {
    if v.is_empty() {
        return Err(MethodError::EmptyVector);
    }
    match mode {
        NormMode::MinMax => {
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max <= min {
                return Err(MethodError::ConstantColumn);
            }
            Ok(v.iter().map(|x| (x - min) / (max - min)).collect())
        }
        NormMode::ZScore => {
            let mu = mean(v)?;
            let var = v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / v.len() as f64;
            let sd = var.sqrt();
            if sd == 0.0 {
                return Err(MethodError::ConstantColumn);
            }
            Ok(v.iter().map(|x| (x - mu) / sd).collect())
        }
    }
}

/// Column-wise [`normalize`].
pub fn normalize_matrix(m: &Matrix, mode: NormMode) -> Result<Matrix, MethodError> {
    let cols = (0..m.cols())
        .map(|j| normalize(&m.column(j), mode))
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_length() {
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
    }

    #[test]
    fn percentile_edges() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(percentile(&v, 100.0).unwrap(), 4.0);
        assert_eq!(percentile(&v, 25.0).unwrap(), 1.75);
        assert_eq!(percentile(&v, 101.0), Err(MethodError::BadPercentile(101.0)));
        assert_eq!(percentile(&[], 5.0), Err(MethodError::EmptyVector));
    }

    #[test]
    fn grouped_frequency_counts() {
        let m = grouped_frequency(&[1.0, 2.0, 2.0, 9.0], 2).unwrap();
        assert_eq!(m.column(1), vec![3.0, 1.0]);
        assert_eq!(m.column(0), vec![1.0, 5.0]);
        assert!(grouped_frequency(&[1.0], 0).is_err());
        let flat = grouped_frequency(&[2.0, 2.0], 3).unwrap();
        assert_eq!(flat.column(1), vec![2.0, 0.0, 0.0]);
    }

    #[test]
    fn minmax_by_hand() {
        assert_eq!(normalize(&[0.0, 5.0, 10.0], NormMode::MinMax).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(normalize(&[3.0, 3.0, 3.0], NormMode::MinMax), Err(MethodError::ConstantColumn));
        assert_eq!(normalize(&[3.0, 3.0], NormMode::ZScore), Err(MethodError::ConstantColumn));
    }

    #[test]
    fn zscore_population() {
        let z = normalize(&[1.0, 3.0], NormMode::ZScore).unwrap();
        assert_eq!(z, vec![-1.0, 1.0]);
    }

    #[test]
    fn matrix_columnwise() {
        let m = Matrix::from_rows(&[vec![0.0, 10.0], vec![5.0, 20.0], vec![10.0, 30.0]]).unwrap();
        let n = normalize_matrix(&m, NormMode::MinMax).unwrap();
        assert_eq!(n.column(0), vec![0.0, 0.5, 1.0]);
        assert_eq!(n.column(1), vec![0.0, 0.5, 1.0]);
    }
}
