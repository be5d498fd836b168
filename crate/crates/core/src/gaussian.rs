//! Closed forms for equicorrelated Gaussian relay inputs.
//!
//! The covariance has `P` on the diagonal and `rho * P` elsewhere. Its
//! eigenvalues are `P (1 - rho)` with multiplicity `M - 1` and
//! `P (1 + (M - 1) rho)` once, which gives every determinant below.

use crate::error::{domain, Result};

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return domain(format!("correlation {rho} outside [0, 1]"));
    }
    Ok(())
}

fn check_relays(relays: usize) -> Result<()> {
    if relays == 0 {
        return domain("relay count must be at least 1");
    }
    Ok(())
}

/// Equicorrelated covariance of `M` relay inputs with power `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCov {
    relays: usize,
    power: f64,
    rho: f64,
}

impl GaussianCov {
    pub fn new(relays: usize, power: f64, rho: f64) -> Result<Self> {
        check_relays(relays)?;
        check_rho(rho)?;
        if !(power > 0.0 && power.is_finite()) {
            return domain(format!("power {power} must be positive and finite"));
        }
        Ok(Self { relays, power, rho })
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Dense row-major matrix.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.relays)
            .map(|i| {
                (0..self.relays)
                    .map(|j| {
                        if i == j {
                            self.power
                        } else {
                            self.rho * self.power
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        (
            self.power * (1.0 - self.rho),
            self.power * (1.0 + (self.relays as f64 - 1.0) * self.rho),
        )
    }

    pub fn det(&self) -> f64 {
        gaussian_det(self.relays, self.power, self.rho).expect("validated on construction")
    }
}

/// `det K_M(rho) = P^M (1 - rho)^(M-1) (1 + (M - 1) rho)`.
pub fn gaussian_det(relays: usize, power: f64, rho: f64) -> Result<f64> {
    check_relays(relays)?;
    check_rho(rho)?;
    let m = relays as f64;
    Ok(power.powi(relays as i32) * (1.0 - rho).powi(relays as i32 - 1) * (1.0 + (m - 1.0) * rho))
}

/// `I(X_1; ...; X_M)` in bits for equicorrelated Gaussian inputs.
///
/// Independent of `P`. Returns `+inf` at `rho = 1`, where the inputs are
/// identical copies and the multi-information diverges.
pub fn gaussian_multi_information(relays: usize, rho: f64) -> Result<f64> {
    check_relays(relays)?;
    check_rho(rho)?;
    if rho == 1.0 {
        return Ok(f64::INFINITY);
    }
    let m = relays as f64;
    // -1/2 log2((1 - rho)^(M-1) (1 + (M-1) rho)), summed in log form
    let log_det = (m - 1.0) * (-rho).ln_1p() + ((m - 1.0) * rho).ln_1p();
    Ok((-0.5 * log_det / std::f64::consts::LN_2).max(0.0))
}

/// `I(X_1; ...; X_M | U)` in bits for `U = X_1 + ... + X_M + Z + Z_N`, with
/// unit-variance `Z` and `Z_N ~ N(0, N)` independent of the inputs.
///
/// Conditioning on `U` subtracts `a^2 / (M a + 1 + N)` from every entry of the
/// covariance, where `a = P (1 + (M - 1) rho)`; the result is again
/// equicorrelated, so the determinant closed form applies.
pub fn gaussian_conditional_multi_information(
    relays: usize,
    power: f64,
    rho: f64,
    noise: f64,
) -> Result<f64> {
    let cov = GaussianCov::new(relays, power, rho)?;
    if !(noise >= 0.0) {
        return domain(format!("auxiliary noise variance {noise} must be non-negative"));
    }
    let m = relays as f64;
    let a = cov.eigenvalues().1;
    let shrink = a * a / (m * a + 1.0 + noise);
    let diag = power - shrink;
    let off = rho * power - shrink;
    let small = diag - off; // = P (1 - rho), unaffected by the rank-one update
    let large = diag + (m - 1.0) * off;
    if small <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let log_ratio = m * diag.ln() - (m - 1.0) * small.ln() - large.ln();
    Ok((0.5 * log_ratio / std::f64::consts::LN_2).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Gaussian elimination with partial pivoting.
    fn lu_det(mut a: Vec<Vec<f64>>) -> f64 {
        let n = a.len();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            if a[pivot][col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
        det
    }

    #[test]
    fn det_matches_hand_value() {
        // 3x3 with unit diagonal and 0.5 off-diagonal
        let direct = lu_det(vec![
            vec![1.0, 0.5, 0.5],
            vec![0.5, 1.0, 0.5],
            vec![0.5, 0.5, 1.0],
        ]);
        assert!((direct - 0.5).abs() < 1e-15);
        assert!((gaussian_det(3, 1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn det_edge_correlations() {
        for m in 1..=6 {
            let p: f64 = 1.7;
            assert!((gaussian_det(m, p, 0.0).unwrap() - p.powi(m as i32)).abs() < 1e-12);
            if m > 1 {
                assert_eq!(gaussian_det(m, p, 1.0).unwrap(), 0.0);
            }
        }
        assert!(gaussian_det(3, 1.0, 1.1).is_err());
        assert!(gaussian_det(3, 1.0, -0.1).is_err());
    }

    #[test]
    fn det_matches_elimination() {
        for m in 1..=8 {
            for &(p, rho) in &[(0.3, 0.1), (2.0, 0.75), (9.0, 0.99)] {
                let cov = GaussianCov::new(m, p, rho).unwrap();
                let direct = lu_det(cov.matrix());
                let closed = cov.det();
                assert!(((closed - direct) / direct).abs() < 1e-10, "M={m}");
            }
        }
    }

    #[test]
    fn multi_information_values() {
        assert_eq!(gaussian_multi_information(4, 0.0).unwrap(), 0.0);
        let two = gaussian_multi_information(2, 0.5).unwrap();
        assert!((two - 0.5 * (4.0f64 / 3.0).log2()).abs() < 1e-14);
        assert!((two - 0.2075).abs() < 1e-4);
        let three = gaussian_multi_information(3, 0.5).unwrap();
        assert!((three - 0.5).abs() < 1e-14);
        assert_eq!(gaussian_multi_information(3, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn conditional_vanishes_at_decorrelating_noise() {
        // N = P (1 - rho)(1 + (M - 1) rho) / rho - 1 decorrelates given U
        let (m, p, rho) = (3usize, 4.0, 0.4);
        let n = p * (1.0 - rho) * (1.0 + 2.0 * rho) / rho - 1.0;
        let v = gaussian_conditional_multi_information(m, p, rho, n).unwrap();
        assert!(v.abs() < 1e-12);
        // more noise leaves some dependence
        let w = gaussian_conditional_multi_information(m, p, rho, n + 5.0).unwrap();
        assert!(w > 1e-3);
    }

    #[test]
    fn conditional_approaches_unconditional_for_huge_noise() {
        let v = gaussian_conditional_multi_information(4, 1.0, 0.3, 1e12).unwrap();
        let u = gaussian_multi_information(4, 0.3).unwrap();
        assert!((v - u).abs() < 1e-9);
    }
}
