use super::{Column, MethodError};

fn check_lengths(left: usize, right: usize) -> Result<(), MethodError> {
    if left != right {
        return Err(MethodError::LengthMismatch { left, right });
    }
    if left == 0 {
        return Err(MethodError::EmptyVector);
    }
    Ok(())
}

pub fn mae(predicted: &[f64], actual: &[f64]) -> Result<f64, MethodError> {
    check_lengths(predicted.len(), actual.len())?;
    let total: f64 = predicted.iter().zip(actual).map(|(p, a)| (p - a).abs()).sum();
    Ok(total / actual.len() as f64)
}

/// Mean absolute percentage error as a fraction (0.05 is 5%).
pub fn mape(predicted: &[f64], actual: &[f64]) -> Result<f64, MethodError> {
    check_lengths(predicted.len(), actual.len())?;
    if let Some(i) = actual.iter().position(|&a| a == 0.0) {
        return Err(MethodError::ZeroActual(i));
    }
    let total: f64 = predicted.iter().zip(actual).map(|(p, a)| ((p - a) / a).abs()).sum();
    Ok(total / actual.len() as f64)
}

/// Fraction of positions whose labels match exactly.
pub fn accuracy(predicted: &Column, actual: &Column) -> Result<f64, MethodError> {
    check_lengths(predicted.len(), actual.len())?;
    let hits = (0..actual.len()).filter(|&i| predicted.same(i, actual, i)).count();
    Ok(hits as f64 / actual.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mape_fraction() {
        assert_eq!(mape(&[1.0, 5.0], &[2.0, 4.0]).unwrap(), 0.375);
        assert_eq!(mape(&[1.0], &[0.0]), Err(MethodError::ZeroActual(0)));
    }

    #[test]
    fn mae_identity() {
        assert_eq!(mae(&[1.5, -2.0], &[1.5, -2.0]).unwrap(), 0.0);
        assert!(matches!(mae(&[1.0], &[1.0, 2.0]), Err(MethodError::LengthMismatch { .. })));
    }

    #[test]
    fn accuracy_two_thirds() {
        let cats = |v: &[&str]| Column::Categorical(v.iter().map(|s| s.to_string()).collect());
        let acc = accuracy(&cats(&["a", "b", "b"]), &cats(&["a", "b", "c"])).unwrap();
        assert_eq!(acc, 2.0 / 3.0);
    }
}
