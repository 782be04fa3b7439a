use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform evaluation grid on [0, 1] or [0, 1]², endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    points: usize,
    dims: u8,
}

impl GridSpec {
    pub fn line(points: usize) -> Result<Self> {
        Self::new(points, 1)
    }

    pub fn square(points: usize) -> Result<Self> {
        Self::new(points, 2)
    }

    pub fn new(points: usize, dims: u8) -> Result<Self> {
        if points < 2 {
            return Err(Error::precondition(format!("grid needs at least 2 points per axis, got {points}")));
        }
        if !(1..=2).contains(&dims) {
            return Err(Error::precondition(format!("grid dimension must be 1 or 2, got {dims}")));
        }
        Ok(Self { points, dims })
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dims(&self) -> u8 {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> f64 {
        i as f64 / (self.points - 1) as f64
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    /// Grid containing every point of `self` plus all midpoints.
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * (self.points - 1) + 1,
            dims: self.dims,
        }
    }

    pub fn with_dims(&self, dims: u8) -> Result<Self> {
        Self::new(self.points, dims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_spacing() {
        let g = GridSpec::line(5).unwrap();
        assert_eq!(g.coords(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.len(), 5);
        assert_eq!(GridSpec::square(5).unwrap().len(), 25);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(GridSpec::line(1).is_err());
        assert!(GridSpec::new(3, 3).is_err());
    }

    #[test]
    fn refinement_is_nested() {
        let g = GridSpec::line(11).unwrap();
        let r = g.refined();
        assert_eq!(r.points(), 21);
        for i in 0..11 {
            assert_eq!(g.coord(i), r.coord(2 * i));
        }
    }
}
