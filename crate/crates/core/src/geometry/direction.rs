use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// A point of the unit sphere. The constructor normalizes and rejects the
/// zero vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction {
    coords: Vec<f64>,
}

impl Direction {
    pub fn new(v: &[f64]) -> Result<Self> {
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("direction must be a finite nonempty vector".into()));
        }
        let n = linalg::norm(v);
        if n < 1e-300 {
            return Err(Error::InvalidInput("zero direction".into()));
        }
        Ok(Direction { coords: linalg::scale(v, 1.0 / n) })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn neg(&self) -> Direction {
        Direction { coords: linalg::neg(&self.coords) }
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(&v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.coords
    }
}

impl AsRef<[f64]> for Direction {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes() {
        let d = Direction::new(&[3.0, 4.0]).unwrap();
        assert!((linalg::norm(d.coords()) - 1.0).abs() < 1e-12);
        assert!(linalg::dist(d.coords(), &[0.6, 0.8]) < 1e-15);
    }

    #[test]
    fn rejects_zero() {
        assert!(Direction::new(&[0.0, 0.0]).is_err());
        assert!(serde_json::from_str::<Direction>("[0.0]").is_err());
    }
}
