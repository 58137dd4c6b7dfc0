//! One-dimensional Parzen estimator: truncated Gaussian kernels on a bounded
//! interval mixed with a uniform prior.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::space::Dim;
use crate::num::Scalar;

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + statrs::function::erf::erf(z / std::f64::consts::SQRT_2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kernel<T> {
    pub mu: T,
    pub sigma: T,
    pub weight: T,
    /// Probability mass of the untruncated Gaussian inside the bounds.
    mass: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParzenEstimator<T> {
    low: T,
    high: T,
    kernels: Vec<Kernel<T>>,
    prior_weight: T,
}

impl<T: Scalar> ParzenEstimator<T> {
    /// Explicit mixture of kernels `(mu, sigma, weight)` and a uniform prior.
    /// Weights are used as given.
    pub fn from_components(low: T, high: T, components: &[(T, T, T)], prior_weight: T) -> Self {
        let kernels = components
            .iter()
            .map(|&(mu, sigma, weight)| {
                let upper = std_normal_cdf(((high - mu) / sigma).as_f64());
                let lower = std_normal_cdf(((low - mu) / sigma).as_f64());
                Kernel {
                    mu,
                    sigma,
                    weight,
                    mass: T::of((upper - lower).max(f64::MIN_POSITIVE)),
                }
            })
            .collect();
        ParzenEstimator {
            low,
            high,
            kernels,
            prior_weight,
        }
    }

    /// One kernel per observation plus the uniform prior, all with weight
    /// `1 / (n + 1)`. Each bandwidth is the larger gap to the sorted
    /// neighbours (bounds stand in at the ends), clipped to
    /// `[0.01 * range, range]`.
    pub fn fit(dim: &Dim<T>, observations: &[T]) -> Self {
        let mut sorted = observations.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("observations are finite"));
        let range = dim.range();
        let min_bw = range * T::of(0.01);
        let weight = T::one() / T::of_usize(sorted.len() + 1);
        let components: Vec<(T, T, T)> = sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let left = if i == 0 { dim.low } else { sorted[i - 1] };
                let right = if i + 1 == sorted.len() { dim.high } else { sorted[i + 1] };
                let bw = (x - left).max(right - x).max(min_bw).min(range);
                (x, bw, weight)
            })
            .collect();
        Self::from_components(dim.low, dim.high, &components, weight)
    }

    pub fn kernels(&self) -> &[Kernel<T>] {
        &self.kernels
    }

    pub fn pdf(&self, x: T) -> T {
        if x < self.low || x > self.high {
            return T::zero();
        }
        let inv_sqrt_2pi = T::of(1.0 / (2.0 * std::f64::consts::PI).sqrt());
        let kernels: T = self
            .kernels
            .iter()
            .map(|k| {
                let z = (x - k.mu) / k.sigma;
                k.weight * inv_sqrt_2pi * (-(z * z) / T::of(2.0)).exp() / (k.sigma * k.mass)
            })
            .sum();
        kernels + self.prior_weight / (self.high - self.low)
    }

    pub fn ln_pdf(&self, x: T) -> T {
        self.pdf(x).max(T::min_positive_value()).ln()
    }

    /// Draws from the mixture: a component is chosen by weight, kernels are
    /// sampled by rejection inside the bounds.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let total: T = self.prior_weight + self.kernels.iter().map(|k| k.weight).sum::<T>();
        let mut pick = T::of(rng.random::<f64>()) * total;
        for k in &self.kernels {
            if pick < k.weight {
                for _ in 0..64 {
                    let z: f64 = StandardNormal.sample(rng);
                    let x = k.mu + k.sigma * T::of(z);
                    if x >= self.low && x <= self.high {
                        return x;
                    }
                }
                return k.mu.max(self.low).min(self.high);
            }
            pick = pick - k.weight;
        }
        self.low + (self.high - self.low) * T::of(rng.random::<f64>())
    }
}
