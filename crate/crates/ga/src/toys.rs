//! Toy problems for checking the engine against known optima.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::constraints::ConstraintSet;
use crate::space::{GaRng, SearchSpace};

/// Fixed-length bit strings.
#[derive(Debug, Clone)]
pub struct BitSpace {
    pub len: usize,
}

/// Number of set bits, `‖x‖₁`.
pub fn l1_norm(bits: &[bool]) -> f64 {
    bits.iter().filter(|b| **b).count() as f64
}

impl SearchSpace for BitSpace {
    type Genome = Vec<bool>;

    fn sample(&self, rng: &mut GaRng) -> Vec<bool> {
        (0..self.len).map(|_| rng.random()).collect()
    }

    fn crossover(&self, a: &Vec<bool>, b: &Vec<bool>, rng: &mut GaRng) -> (Vec<bool>, Vec<bool>) {
        let cut = rng.random_range(0..=self.len);
        let x = a[..cut].iter().chain(&b[cut..]).copied().collect();
        let y = b[..cut].iter().chain(&a[cut..]).copied().collect();
        (x, y)
    }

    fn mutate(&self, g: &mut Vec<bool>, rate: f64, rng: &mut GaRng) {
        for bit in g.iter_mut() {
            if rng.random::<f64>() < rate {
                *bit = !*bit;
            }
        }
    }

    fn repair(&self, _g: &mut Vec<bool>, _rng: &mut GaRng) {}

    fn key(&self, g: &Vec<bool>) -> Vec<u8> {
        g.iter().map(|b| *b as u8).collect()
    }

    fn decision_vector(&self, g: &Vec<bool>) -> Vec<f64> {
        g.iter().map(|b| *b as u8 as f64).collect()
    }

    fn project(&self, g: &mut Vec<bool>, constraints: &ConstraintSet, tol: f64) -> bool {
        constraints.is_feasible(&self.decision_vector(g), tol)
    }
}

/// Real vectors in a box.
#[derive(Debug, Clone)]
pub struct BoxSpace {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        assert!(lower.iter().zip(&upper).all(|(l, u)| l < u));
        Self { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }
}

impl SearchSpace for BoxSpace {
    type Genome = Vec<f64>;

    fn sample(&self, rng: &mut GaRng) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(&l, &u)| rng.random_range(l..u)).collect()
    }

    fn crossover(&self, a: &Vec<f64>, b: &Vec<f64>, rng: &mut GaRng) -> (Vec<f64>, Vec<f64>) {
        let cut = rng.random_range(0..=self.dim());
        let x = a[..cut].iter().chain(&b[cut..]).copied().collect();
        let y = b[..cut].iter().chain(&a[cut..]).copied().collect();
        (x, y)
    }

    /// Gaussian steps of 5% of each side length.
    fn mutate(&self, g: &mut Vec<f64>, rate: f64, rng: &mut GaRng) {
        for i in 0..self.dim() {
            if rng.random::<f64>() < rate {
                let step = Normal::new(0.0, 0.05 * (self.upper[i] - self.lower[i])).expect("positive width");
                g[i] += step.sample(rng);
            }
        }
    }

    fn repair(&self, g: &mut Vec<f64>, _rng: &mut GaRng) {
        for i in 0..self.dim() {
            g[i] = g[i].clamp(self.lower[i], self.upper[i]);
        }
    }

    /// Bit patterns; the box genome is not quantized.
    fn key(&self, g: &Vec<f64>) -> Vec<u8> {
        g.iter().flat_map(|v| v.to_bits().to_le_bytes()).collect()
    }

    fn decision_vector(&self, g: &Vec<f64>) -> Vec<f64> {
        g.clone()
    }

    fn project(&self, g: &mut Vec<f64>, constraints: &ConstraintSet, tol: f64) -> bool {
        let free = vec![true; self.dim()];
        constraints.project(g, &free, &self.lower, &self.upper, tol)
    }
}

/// Unnormalized `sin(x)/x`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `sinc(x − 10)·sinc(y − 10)·(1 − z³)` on `[0, 20]² × [−1, 1]`; maximum 2 at `(10, 10, −1)`.
pub fn sinc3(p: &[f64]) -> f64 {
    sinc(p[0] - 10.0) * sinc(p[1] - 10.0) * (1.0 - p[2].powi(3))
}

pub fn sinc3_space() -> BoxSpace {
    BoxSpace::new(vec![0.0, 0.0, -1.0], vec![20.0, 20.0, 1.0])
}
