use crate::geometry::Point2;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `σ² exp(−‖x − y‖₁ / d)`
    ExponentialL1,
}

/// Stationary covariance function of the reluctivity field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceKernel {
    pub kind: KernelKind,
    /// Standard deviation of the field (H⁻¹m).
    pub sigma: f64,
    /// Correlation length (m).
    pub d: f64,
}

impl CovarianceKernel {
    pub fn exponential(sigma: f64, d: f64) -> Self {
        CovarianceKernel {
            kind: KernelKind::ExponentialL1,
            sigma,
            d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::Config(format!("correlation length must be > 0, got {}", self.d)));
        }
        Ok(())
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn eval(&self, x: Point2, y: Point2) -> f64 {
        match self.kind {
            KernelKind::ExponentialL1 => self.variance() * (-x.l1_dist(&y) / self.d).exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_variance() {
        let k = CovarianceKernel::exponential(1.0, 0.3);
        let p = Point2::new(0.2, -0.7);
        assert_eq!(k.eval(p, p), 1.0);
    }

    #[test]
    fn one_correlation_length_apart() {
        let k = CovarianceKernel::exponential(2.0, 0.5);
        let v = k.eval(Point2::new(0.0, 0.0), Point2::new(0.2, 0.3));
        assert!((v - 4.0 * (-1.0f64).exp()).abs() < 1e-14);
        assert!((v - 1.471_517_764_685_769).abs() < 1e-12);
    }

    #[test]
    fn large_correlation_length_tends_to_variance() {
        let (x, y) = (Point2::new(0.0, 0.0), Point2::new(0.03, 0.05));
        let mut last = 0.0;
        for d in [0.01, 0.1, 1.0, 10.0, 100.0, 1e4] {
            let v = CovarianceKernel::exponential(3.0, d).eval(x, y);
            assert!(v > last && v <= 9.0);
            last = v;
        }
        assert!((last - 9.0).abs() < 1e-4);
    }

    #[test]
    fn invalid_parameters() {
        assert!(CovarianceKernel::exponential(-1.0, 1.0).validate().is_err());
        assert!(CovarianceKernel::exponential(1.0, 0.0).validate().is_err());
        assert!(CovarianceKernel::exponential(0.0, 1.0).validate().is_ok());
    }
}
