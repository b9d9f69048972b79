use crate::error::{Error, Result};

/// Below this spread a sequence is treated as constant.
pub const DEGENERATE_SIGMA: f64 = 1e-12;

/// Mean and population standard deviation (divisor `N`).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Shift and scale to zero mean and unit population standard deviation.
pub fn standardize(values: &[f64]) -> Result<Vec<f64>> {
    let mut out = values.to_vec();
    standardize_in_place(&mut out)?;
    Ok(out)
}

pub fn standardize_in_place(values: &mut [f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::Precondition(format!("standardize needs at least 2 values, got {}", values.len())));
    }
    let (mean, sigma) = mean_std(values);
    if !(sigma >= DEGENERATE_SIGMA) {
        return Err(Error::DegenerateConstant { sigma });
    }
    for v in values.iter_mut() {
        *v = (*v - mean) / sigma;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_degenerate() {
        assert!(matches!(standardize(&[1.0, 1.0, 1.0]), Err(Error::DegenerateConstant { .. })));
    }

    #[test]
    fn two_points() {
        assert_eq!(standardize(&[0.0, 2.0]).unwrap(), vec![-1.0, 1.0]);
    }

    #[test]
    fn too_short() {
        assert!(matches!(standardize(&[1.0]), Err(Error::Precondition(_))));
    }

    #[test]
    fn idempotent() {
        let once = standardize(&[0.3, -1.2, 5.0, 2.2, 0.0, 0.01]).unwrap();
        let twice = standardize(&once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            assert!((a - b).abs() < 1e-12);
        }
        let (m, s) = mean_std(&once);
        assert!(m.abs() < 1e-12 && (s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nan_is_degenerate() {
        assert!(standardize(&[f64::NAN, 1.0]).is_err());
    }
}
