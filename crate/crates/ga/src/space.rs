use std::fmt::Debug;

use rand_chacha::ChaCha8Rng;

use crate::constraints::ConstraintSet;

/// The single random stream of a run. Owned by the sequential phase.
pub type GaRng = ChaCha8Rng;

/// Genome representation plus the operators the engine needs.
pub trait SearchSpace: Sync {
    type Genome: Clone + Debug + Send + Sync;

    fn sample(&self, rng: &mut GaRng) -> Self::Genome;

    /// Children before repair.
    fn crossover(&self, a: &Self::Genome, b: &Self::Genome, rng: &mut GaRng) -> (Self::Genome, Self::Genome);

    fn mutate(&self, g: &mut Self::Genome, rate: f64, rng: &mut GaRng);

    /// Restore structural validity (distinct indices, bounds, caps).
    fn repair(&self, g: &mut Self::Genome, rng: &mut GaRng);

    /// Memoization key; equal keys must mean equal scores up to quantization.
    fn key(&self, g: &Self::Genome) -> Vec<u8>;

    /// Point in the space the linear constraints are written over.
    fn decision_vector(&self, g: &Self::Genome) -> Vec<f64>;

    /// Move `g` onto the feasible set; `false` if that fails.
    fn project(&self, g: &mut Self::Genome, constraints: &ConstraintSet, tol: f64) -> bool;
}
