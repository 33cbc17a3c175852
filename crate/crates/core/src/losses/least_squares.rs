use nalgebra::{DMatrix, DVector, DVectorView};

use super::DataFit;
use crate::error::{Error, Result};
use crate::point::{ParameterPoint, Shape};

/// Linear measurements `x = A theta (+ noise)` with loss `1/2 ||x - A theta||^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquaresDatum {
    a: DMatrix<f64>,
    x: DVector<f64>,
    shape: Shape,
}

impl LeastSquaresDatum {
    pub fn new(a: DMatrix<f64>, x: DVector<f64>) -> Result<Self> {
        let shape = Shape::Vector(a.ncols());
        Self::with_shape(a, x, shape)
    }

    /// As [`new`](Self::new) with the parameter viewed as `shape`
    /// (e.g. an image).
    pub fn with_shape(a: DMatrix<f64>, x: DVector<f64>, shape: Shape) -> Result<Self> {
        if x.len() != a.nrows() {
            return Err(Error::dimension(
                format!("{} observations", a.nrows()),
                x.len(),
            ));
        }
        if shape.len() != a.ncols() {
            return Err(Error::dimension(format!("{} columns", shape.len()), a.ncols()));
        }
        if a.iter().chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("sensing matrix or observation not finite".into()));
        }
        Ok(Self { a, x, shape })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn observation(&self) -> &DVector<f64> {
        &self.x
    }

    fn residual(&self, theta: &ParameterPoint) -> Result<DVector<f64>> {
        if theta.len() != self.a.ncols() {
            return Err(Error::dimension(self.a.ncols(), theta.len()));
        }
        let th = DVectorView::from_slice(theta.as_slice(), theta.len());
        Ok(&self.a * th - &self.x)
    }
}

impl DataFit for LeastSquaresDatum {
    fn shape(&self) -> Shape {
        self.shape
    }

    fn value(&self, theta: &ParameterPoint) -> Result<f64> {
        let r = self.residual(theta)?;
        Ok(0.5 * r.norm_squared())
    }

    fn gradient(&self, theta: &ParameterPoint) -> Result<ParameterPoint> {
        Ok(self.value_and_gradient(theta)?.1)
    }

    fn value_and_gradient(&self, theta: &ParameterPoint) -> Result<(f64, ParameterPoint)> {
        let r = self.residual(theta)?;
        let g = self.a.tr_mul(&r);
        Ok((
            0.5 * r.norm_squared(),
            ParameterPoint::from_parts(g.data.into(), theta.shape()),
        ))
    }
}

/// `1/2 ||x - A theta||^2`.
pub fn ls_value(datum: &LeastSquaresDatum, theta: &ParameterPoint) -> Result<f64> {
    datum.value(theta)
}

/// `A^T (A theta - x)`.
pub fn ls_gradient(datum: &LeastSquaresDatum, theta: &ParameterPoint) -> Result<ParameterPoint> {
    datum.gradient(theta)
}
