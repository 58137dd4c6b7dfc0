use rand::Rng;
use serde::{Deserialize, Serialize};

use super::HpoError;
use crate::num::Scalar;

/// One search dimension. Open dimensions exclude their bounds, both when
/// sampled and when gridded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Dim<T> {
    pub name: String,
    pub low: T,
    pub high: T,
    pub open: bool,
}

impl<T: Scalar> Dim<T> {
    pub fn closed(name: impl Into<String>, low: T, high: T) -> Self {
        Dim { name: name.into(), low, high, open: false }
    }

    pub fn open(name: impl Into<String>, low: T, high: T) -> Self {
        Dim { name: name.into(), low, high, open: true }
    }

    pub fn range(&self) -> T {
        self.high - self.low
    }

    pub fn contains(&self, x: T) -> bool {
        if self.open {
            x > self.low && x < self.high
        } else {
            x >= self.low && x <= self.high
        }
    }

    /// `resolution` evenly spaced values: endpoints included for closed
    /// dimensions, interior points `low + i * range / (n + 1)` for open ones.
    pub fn grid(&self, resolution: usize) -> Vec<T> {
        if self.open {
            let step = self.range() / T::of_usize(resolution + 1);
            (1..=resolution).map(|i| self.low + step * T::of_usize(i)).collect()
        } else {
            let step = self.range() / T::of_usize(resolution - 1);
            (0..resolution)
                .map(|i| if i + 1 == resolution { self.high } else { self.low + step * T::of_usize(i) })
                .collect()
        }
    }

    /// Uniform draw, redrawn while it lands on an excluded bound.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        loop {
            let u: f64 = rng.random();
            let x = self.low + self.range() * T::of(u);
            let x = x.min(self.high);
            if self.contains(x) {
                return x;
            }
        }
    }
}

/// Box-shaped search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct SearchSpace<T> {
    pub dims: Vec<Dim<T>>,
}

impl<T: Scalar> SearchSpace<T> {
    pub fn new(dims: Vec<Dim<T>>) -> Result<Self, HpoError> {
        let space = SearchSpace { dims };
        space.validate()?;
        Ok(space)
    }

    /// `k` model weights on `[0, 1]` followed by a threshold on `(0, 1)`.
    pub fn ensemble(k: usize) -> Result<Self, HpoError> {
        let mut dims: Vec<Dim<T>> = (1..=k).map(|i| Dim::closed(format!("w{i}"), T::zero(), T::one())).collect();
        if k == 0 {
            return Err(HpoError::InvalidSpace("ensemble space needs at least one model".into()));
        }
        dims.push(Dim::open("threshold", T::zero(), T::one()));
        SearchSpace::new(dims)
    }

    pub fn validate(&self) -> Result<(), HpoError> {
        if self.dims.is_empty() {
            return Err(HpoError::InvalidSpace("no dimensions".into()));
        }
        for d in &self.dims {
            if !(d.low.is_finite() && d.high.is_finite() && d.low < d.high) {
                return Err(HpoError::InvalidSpace(format!(
                    "dimension {:?} has bounds [{}, {}]",
                    d.name, d.low, d.high
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn contains(&self, point: &[T]) -> bool {
        point.len() == self.dims.len() && self.dims.iter().zip(point).all(|(d, &x)| d.contains(x))
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        self.dims.iter().map(|d| d.sample_uniform(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::indexed_stream;

    #[test]
    fn grids() {
        let open = Dim::open("t", 0.0, 1.0);
        let g = open.grid(9);
        assert_eq!(g.len(), 9);
        for (i, v) in g.iter().enumerate() {
            assert!((v - (i + 1) as f64 / 10.0).abs() < 1e-12);
        }
        let closed = Dim::closed("w", 0.0f64, 1.0);
        let g = closed.grid(11);
        assert_eq!(g.first(), Some(&0.0));
        assert_eq!(g.last(), Some(&1.0));
        assert!((g[5] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_samples_stay_inside() {
        let space = SearchSpace::<f64>::ensemble(3).unwrap();
        let mut rng = indexed_stream(1, 0);
        for _ in 0..1000 {
            assert!(space.contains(&space.sample_uniform(&mut rng)));
        }
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(SearchSpace::new(vec![Dim::closed("x", 1.0, 1.0)]).is_err());
        assert!(SearchSpace::new(vec![Dim::closed("x", 0.0, f64::INFINITY)]).is_err());
        assert!(SearchSpace::<f64>::new(vec![]).is_err());
        assert!(SearchSpace::<f64>::ensemble(0).is_err());
    }
}
