//! Loss functions `V(y, z)` and their derivatives in the prediction `z`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    LeastSquares,
    ExponentialLeastSquares,
    Sigmoid,
    Hinge,
    LeakyHockeyStick,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            LossKind::LeastSquares => "least-squares",
            LossKind::ExponentialLeastSquares => "exponential-least-squares",
            LossKind::Sigmoid => "sigmoid",
            LossKind::Hinge => "hinge",
            LossKind::LeakyHockeyStick => "leaky-hockey-stick",
        };
        f.write_str(name)
    }
}

impl LossKind {
    pub fn scalar_only(self) -> bool {
        matches!(
            self,
            LossKind::Sigmoid | LossKind::Hinge | LossKind::LeakyHockeyStick
        )
    }

    /// Whether a gradient exists everywhere the loss is used by the solvers.
    pub fn is_smooth(self) -> bool {
        matches!(
            self,
            LossKind::LeastSquares | LossKind::ExponentialLeastSquares | LossKind::Sigmoid
        )
    }

    fn check_args(self, y: &DVector<f64>, z: &DVector<f64>) -> Result<()> {
        if y.len() != z.len() {
            return Err(Error::Dimension(format!(
                "label has length {}, prediction has length {}",
                y.len(),
                z.len()
            )));
        }
        if self.scalar_only() && y.len() != 1 {
            return Err(Error::Dimension(format!(
                "{self} loss takes scalar labels, got length {}",
                y.len()
            )));
        }
        Ok(())
    }
}

fn dist_sq(y: &DVector<f64>, z: &DVector<f64>) -> f64 {
    (z - y).norm_squared()
}

pub fn loss_value(kind: LossKind, y: &DVector<f64>, z: &DVector<f64>) -> Result<f64> {
    kind.check_args(y, z)?;
    Ok(match kind {
        LossKind::LeastSquares => dist_sq(y, z),
        LossKind::ExponentialLeastSquares => 1.0 - (-dist_sq(y, z)).exp(),
        LossKind::Sigmoid => 1.0 / (1.0 + (z[0] - y[0]).exp()),
        LossKind::Hinge => (1.0 - y[0] * z[0]).max(0.0),
        LossKind::LeakyHockeyStick => {
            let yz = y[0] * z[0];
            if yz > 1.0 {
                -yz.ln()
            } else {
                1.0 - yz
            }
        }
    })
}

fn not_differentiable(kind: LossKind, y: &DVector<f64>, z: &DVector<f64>) -> Error {
    Error::NotDifferentiable {
        kind,
        y: y.iter().copied().collect(),
        z: z.iter().copied().collect(),
    }
}

/// `∂V/∂z`.
pub fn loss_gradient(kind: LossKind, y: &DVector<f64>, z: &DVector<f64>) -> Result<DVector<f64>> {
    kind.check_args(y, z)?;
    match kind {
        LossKind::LeastSquares => Ok((z - y) * 2.0),
        LossKind::ExponentialLeastSquares => {
            let r = z - y;
            let w = (-r.norm_squared()).exp();
            Ok(r * (2.0 * w))
        }
        LossKind::Sigmoid => {
            let e = (z[0] - y[0]).exp();
            Ok(DVector::from_element(1, -e / ((1.0 + e) * (1.0 + e))))
        }
        LossKind::Hinge => Err(not_differentiable(kind, y, z)),
        LossKind::LeakyHockeyStick => {
            let yz = y[0] * z[0];
            if yz == 1.0 {
                Err(not_differentiable(kind, y, z))
            } else if yz > 1.0 {
                Ok(DVector::from_element(1, -1.0 / z[0]))
            } else {
                Ok(DVector::from_element(1, -y[0]))
            }
        }
    }
}

/// `∂²V/∂z²` for the smooth losses.
pub fn loss_hessian(kind: LossKind, y: &DVector<f64>, z: &DVector<f64>) -> Result<DMatrix<f64>> {
    kind.check_args(y, z)?;
    let n = y.len();
    match kind {
        LossKind::LeastSquares => Ok(DMatrix::identity(n, n) * 2.0),
        LossKind::ExponentialLeastSquares => {
            let r = z - y;
            let w = (-r.norm_squared()).exp();
            Ok((DMatrix::identity(n, n) - &r * r.transpose() * 2.0) * (2.0 * w))
        }
        LossKind::Sigmoid => {
            let e = (z[0] - y[0]).exp();
            let h = e * (e - 1.0) / (1.0 + e).powi(3);
            Ok(DMatrix::from_element(1, 1, h))
        }
        LossKind::Hinge | LossKind::LeakyHockeyStick => Err(Error::UnsupportedLoss {
            kind,
            what: "second derivative".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> DVector<f64> {
        DVector::from_element(1, x)
    }

    #[test]
    fn values() {
        let y = DVector::from_vec(vec![1.0, -2.0]);
        assert_eq!(loss_value(LossKind::LeastSquares, &y, &y).unwrap(), 0.0);
        let v = loss_value(LossKind::ExponentialLeastSquares, &s(1.0), &s(0.0)).unwrap();
        assert!((v - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert_eq!(loss_value(LossKind::Hinge, &s(1.0), &s(2.0)).unwrap(), 0.0);
        assert_eq!(
            loss_value(LossKind::LeakyHockeyStick, &s(2.0), &s(0.5)).unwrap(),
            0.0
        );
        let just_above = loss_value(LossKind::LeakyHockeyStick, &s(1.0), &s(1.0 + 1e-9)).unwrap();
        assert!(just_above.abs() < 1e-8);
        assert!((loss_value(LossKind::Sigmoid, &s(0.3), &s(0.3)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn argument_checks() {
        let y = DVector::from_vec(vec![1.0, 2.0]);
        assert!(loss_value(LossKind::LeastSquares, &y, &s(1.0)).is_err());
        assert!(loss_value(LossKind::Hinge, &y, &y).is_err());
        assert!(loss_gradient(LossKind::Sigmoid, &y, &y).is_err());
    }

    #[test]
    fn zero_gradient_at_the_label() {
        let y = DVector::from_vec(vec![0.4, -1.1, 3.0]);
        assert_eq!(
            loss_gradient(LossKind::LeastSquares, &y, &y).unwrap(),
            DVector::zeros(3)
        );
        assert_eq!(
            loss_gradient(LossKind::ExponentialLeastSquares, &y, &y).unwrap(),
            DVector::zeros(3)
        );
    }

    #[test]
    fn nondifferentiable_requests() {
        assert!(matches!(
            loss_gradient(LossKind::Hinge, &s(1.0), &s(0.2)),
            Err(Error::NotDifferentiable { .. })
        ));
        assert!(matches!(
            loss_gradient(LossKind::LeakyHockeyStick, &s(2.0), &s(0.5)),
            Err(Error::NotDifferentiable { .. })
        ));
        assert!(loss_hessian(LossKind::Hinge, &s(1.0), &s(0.2)).is_err());
    }

    #[test]
    fn display_names_match_config_names() {
        for kind in [
            LossKind::LeastSquares,
            LossKind::ExponentialLeastSquares,
            LossKind::Sigmoid,
            LossKind::Hinge,
            LossKind::LeakyHockeyStick,
        ] {
            let parsed: LossKind = serde_plain(&kind.to_string());
            assert_eq!(parsed, kind);
        }
    }

    fn serde_plain(name: &str) -> LossKind {
        #[derive(Deserialize)]
        struct W {
            k: LossKind,
        }
        toml::from_str::<W>(&format!("k = \"{name}\"")).unwrap().k
    }
}
