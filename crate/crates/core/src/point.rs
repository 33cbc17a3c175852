//! Points of the parameter space.
//!
//! Every iterate, prediction and comparator is a flat real vector. Images and
//! `p x p` influence matrices keep their shape as metadata and are stored in
//! row-major order.

use std::fmt;

use crate::error::{Error, Result};

/// Dimension descriptor of a [`ParameterPoint`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Vector(usize),
    Matrix { rows: usize, cols: usize },
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Vector(n) => n,
            Shape::Matrix { rows, cols } => rows * cols,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Vector(n) => write!(f, "[{n}]"),
            Shape::Matrix { rows, cols } => write!(f, "[{rows}x{cols}]"),
        }
    }
}

/// An element of the feasible set: finite values plus a shape.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPoint {
    values: Vec<f64>,
    shape: Shape,
}

impl ParameterPoint {
    /// Builds a point, checking the length against the shape and finiteness.
    pub fn new(values: Vec<f64>, shape: Shape) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::dimension(shape, values.len()));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "entry {j} is not finite ({})",
                values[j]
            )));
        }
        Ok(Self { values, shape })
    }

    pub fn vector(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, Shape::Vector(n))
    }

    pub fn matrix(values: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        Self::new(values, Shape::Matrix { rows, cols })
    }

    pub fn zeros(shape: Shape) -> Self {
        Self {
            values: vec![0.0; shape.len()],
            shape,
        }
    }

    /// Wraps values produced by internal arithmetic. Finiteness is the
    /// caller's responsibility.
    pub(crate) fn from_parts(values: Vec<f64>, shape: Shape) -> Self {
        debug_assert_eq!(values.len(), shape.len());
        Self { values, shape }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Errors unless `other` has the same shape.
    pub fn check_same_shape(&self, other: &ParameterPoint) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::dimension(self.shape, other.shape));
        }
        Ok(())
    }

    pub fn check_shape(&self, shape: Shape) -> Result<()> {
        if self.shape != shape {
            return Err(Error::dimension(shape, self.shape));
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        norm(&self.values)
    }

    pub fn dot(&self, other: &ParameterPoint) -> f64 {
        dot(&self.values, &other.values)
    }

    /// Euclidean distance.
    pub fn distance(&self, other: &ParameterPoint) -> f64 {
        distance(&self.values, &other.values)
    }

    /// `self - other`.
    pub fn sub(&self, other: &ParameterPoint) -> ParameterPoint {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        ParameterPoint::from_parts(values, self.shape)
    }

    /// Entry `(row, col)` of a matrix-shaped point.
    pub fn at(&self, row: usize, col: usize) -> f64 {
        match self.shape {
            Shape::Matrix { cols, .. } => self.values[row * cols + col],
            Shape::Vector(_) => panic!("at() on a vector-shaped point"),
        }
    }
}

impl AsRef<[f64]> for ParameterPoint {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
