//! Error metrics over `(truth, predicted)` pairs.

use crate::error::{Error, Result};

fn non_empty(pairs: &[(f64, f64)]) -> Result<usize> {
    if pairs.is_empty() {
        return Err(Error::DegenerateInput("error metric over no pairs".into()));
    }
    Ok(pairs.len())
}

/// Mean absolute error.
pub fn mae(pairs: &[(f64, f64)]) -> Result<f64> {
    let n = non_empty(pairs)?;
    Ok(pairs.iter().map(|(t, p)| (t - p).abs()).sum::<f64>() / n as f64)
}

/// Root mean squared error.
pub fn rmse(pairs: &[(f64, f64)]) -> Result<f64> {
    let n = non_empty(pairs)?;
    Ok((pairs.iter().map(|(t, p)| (t - p) * (t - p)).sum::<f64>() / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures() {
        assert_eq!(mae(&[(0.5, 0.5), (0.2, 0.2)]).unwrap(), 0.0);
        assert_eq!(mae(&[(1.0, 0.0), (0.0, 1.0)]).unwrap(), 1.0);
        assert!((mae(&[(0.3, 0.0), (0.0, 0.4)]).unwrap() - 0.35).abs() < 1e-12);

        assert_eq!(rmse(&[(0.5, 0.5), (0.2, 0.2)]).unwrap(), 0.0);
        assert!((rmse(&[(0.3, 0.0), (0.0, 0.4)]).unwrap() - 0.125f64.sqrt()).abs() < 1e-12);
        assert_eq!(rmse(&[(1.0, 0.0)]).unwrap(), 1.0);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(mae(&[]), Err(Error::DegenerateInput(_))));
        assert!(matches!(rmse(&[]), Err(Error::DegenerateInput(_))));
    }
}
