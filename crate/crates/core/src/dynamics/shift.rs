use std::f64::consts::TAU;

use super::DynamicalModel;
use crate::error::{Error, Result};
use crate::point::{ParameterPoint, Shape};

/// What happens to pixels pushed off the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Boundary {
    /// Off-grid pixels are dropped and vacated pixels set to zero.
    #[default]
    ZeroFill,
    /// Periodic (toroidal) grid.
    Wrap,
}

impl std::str::FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" | "zero-fill" | "zerofill" => Ok(Boundary::ZeroFill),
            "wrap" => Ok(Boundary::Wrap),
            other => Err(format!("unknown boundary rule `{other}` (zero|wrap)")),
        }
    }
}

/// One-pixel motion in image coordinates (row index grows downward).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Motion {
    pub drow: isize,
    pub dcol: isize,
}

const COMPASS: [(&str, isize, isize); 9] = [
    ("E", 0, 1),
    ("NE", -1, 1),
    ("N", -1, 0),
    ("NW", -1, -1),
    ("W", 0, -1),
    ("SW", 1, -1),
    ("S", 1, 0),
    ("SE", 1, 1),
    ("static", 0, 0),
];

impl Motion {
    pub const STATIC: Motion = Motion { drow: 0, dcol: 0 };

    /// Motion toward angle `2 pi i / (n - 1)`, rounded to the nearest
    /// one-pixel step. East is angle 0; angles grow counter-clockwise.
    pub fn from_angle_index(i: usize, n: usize) -> Self {
        let angle = TAU * i as f64 / (n - 1) as f64;
        Motion {
            drow: -(angle.sin().round() as isize),
            dcol: angle.cos().round() as isize,
        }
    }

    pub fn is_static(&self) -> bool {
        *self == Motion::STATIC
    }

    pub fn label(&self) -> &'static str {
        COMPASS
            .iter()
            .find(|(_, r, c)| *r == self.drow && *c == self.dcol)
            .map(|(l, _, _)| *l)
            .unwrap_or("?")
    }

    pub fn parse(label: &str) -> Option<Self> {
        COMPASS
            .iter()
            .find(|(l, _, _)| l.eq_ignore_ascii_case(label))
            .map(|&(_, drow, dcol)| Motion { drow, dcol })
    }
}

/// Translates a `rows x cols` image by one pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct PixelShift {
    pub motion: Motion,
    pub rows: usize,
    pub cols: usize,
    pub boundary: Boundary,
}

impl PixelShift {
    pub fn new(motion: Motion, rows: usize, cols: usize, boundary: Boundary) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Argument("image must be non-empty".into()));
        }
        Ok(Self {
            motion,
            rows,
            cols,
            boundary,
        })
    }

    pub fn apply(&self, theta: &ParameterPoint) -> Result<ParameterPoint> {
        let (rows, cols) = (self.rows, self.cols);
        if theta.len() != rows * cols {
            return Err(Error::dimension(
                Shape::Matrix { rows, cols },
                theta.shape(),
            ));
        }
        let src = theta.as_slice();
        let mut out = vec![0.0; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                let (nr, nc) = (r as isize + self.motion.drow, c as isize + self.motion.dcol);
                let (nr, nc) = match self.boundary {
                    Boundary::ZeroFill => {
                        if nr < 0 || nc < 0 || nr >= rows as isize || nc >= cols as isize {
                            continue;
                        }
                        (nr as usize, nc as usize)
                    }
                    Boundary::Wrap => (
                        nr.rem_euclid(rows as isize) as usize,
                        nc.rem_euclid(cols as isize) as usize,
                    ),
                };
                out[nr * cols + nc] = src[r * cols + c];
            }
        }
        Ok(ParameterPoint::from_parts(out, theta.shape()))
    }
}

/// The eight one-pixel compass shifts (angles `2 pi i / 8`, `i = 0..7`)
/// with zero-fill boundaries, followed by the identity ("no motion").
pub fn shift_family(rows: usize, cols: usize) -> Result<Vec<DynamicalModel>> {
    shift_family_with(rows, cols, Boundary::ZeroFill)
}

pub fn shift_family_with(rows: usize, cols: usize, boundary: Boundary) -> Result<Vec<DynamicalModel>> {
    if rows < 2 || cols < 2 {
        return Err(Error::Argument(format!(
            "shift family needs at least a 2x2 grid, got {rows}x{cols}"
        )));
    }
    const N: usize = 9;
    let mut family = (0..N - 1)
        .map(|i| {
            PixelShift::new(Motion::from_angle_index(i, N), rows, cols, boundary)
                .map(DynamicalModel::PixelShift)
        })
        .collect::<Result<Vec<_>>>()?;
    family.push(DynamicalModel::Identity);
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn image(rows: usize, cols: usize, ones: &[(usize, usize)]) -> ParameterPoint {
        let mut v = vec![0.0; rows * cols];
        for &(r, c) in ones {
            v[r * cols + c] = 1.0;
        }
        ParameterPoint::matrix(v, rows, cols).unwrap()
    }

    #[test]
    fn compass_angles() {
        let labels: Vec<&str> = (0..8).map(|i| Motion::from_angle_index(i, 9).label()).collect();
        assert_eq!(labels, ["E", "NE", "N", "NW", "W", "SW", "S", "SE"]);
    }

    #[test]
    fn east_shift_moves_one_column() {
        let s = PixelShift::new(Motion::parse("E").unwrap(), 3, 3, Boundary::ZeroFill).unwrap();
        let out = s.apply(&image(3, 3, &[(1, 0)])).unwrap();
        assert_eq!(out, image(3, 3, &[(1, 1)]));
    }

    #[test]
    fn diagonal_moves_both_axes_and_drops_off_grid() {
        let s = PixelShift::new(Motion::parse("NE").unwrap(), 3, 3, Boundary::ZeroFill).unwrap();
        assert_eq!(s.apply(&image(3, 3, &[(2, 0)])).unwrap(), image(3, 3, &[(1, 1)]));
        assert_eq!(s.apply(&image(3, 3, &[(0, 1)])).unwrap(), image(3, 3, &[]));
    }

    #[test]
    fn wrap_reenters_on_the_far_side() {
        let s = PixelShift::new(Motion::parse("SE").unwrap(), 3, 4, Boundary::Wrap).unwrap();
        assert_eq!(s.apply(&image(3, 4, &[(2, 3)])).unwrap(), image(3, 4, &[(0, 0)]));
    }

    #[test]
    fn family_has_nine_members_ending_with_identity() {
        let fam = shift_family(5, 5).unwrap();
        assert_eq!(fam.len(), 9);
        assert_eq!(fam[8], DynamicalModel::Identity);
        let th = image(5, 5, &[(0, 0), (3, 4)]);
        assert_eq!(fam[8].apply(&th, 1).unwrap(), th);
        assert!(shift_family(1, 5).is_err());
    }

    #[test]
    fn opposite_shifts_cancel_on_interior() {
        let fam = shift_family(6, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let mut v = vec![0.0; 42];
            for r in 1..5 {
                for c in 1..6 {
                    v[r * 7 + c] = rng.random_range(0.0..1.0);
                }
            }
            let th = ParameterPoint::matrix(v, 6, 7).unwrap();
            let there = fam[0].apply(&th, 1).unwrap();
            let back = fam[4].apply(&there, 2).unwrap();
            assert_eq!(back, th);
        }
    }

    #[test]
    fn shape_mismatch() {
        let s = PixelShift::new(Motion::parse("N").unwrap(), 3, 3, Boundary::ZeroFill).unwrap();
        assert!(s.apply(&ParameterPoint::zeros(Shape::Vector(8))).is_err());
    }

    #[test]
    fn zero_fill_is_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for model in shift_family(4, 5).unwrap() {
            for _ in 0..50 {
                let a = ParameterPoint::matrix((0..20).map(|_| rng.random_range(-1.0..1.0)).collect(), 4, 5).unwrap();
                let b = ParameterPoint::matrix((0..20).map(|_| rng.random_range(-1.0..1.0)).collect(), 4, 5).unwrap();
                let d_after = model.apply(&a, 1).unwrap().distance(&model.apply(&b, 1).unwrap());
                assert!(d_after <= a.distance(&b) + 1e-12);
            }
        }
    }
}
