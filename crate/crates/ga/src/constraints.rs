//! Linear constraints in canonical form `g(x) = a·x − b ≤ 0`.
//!
//! An equality `a·x = b` is stored as the pair `a·x − b − ε ≤ 0` and
//! `−a·x + b − ε ≤ 0`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub label: String,
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl LinearConstraint {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub inequalities: Vec<LinearConstraint>,
    /// Labels of equalities; each owns two consecutive entries of `inequalities`.
    pub equalities: Vec<(String, usize)>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_inequality(&mut self, label: impl Into<String>, coeffs: Vec<f64>, bound: f64) {
        self.inequalities.push(LinearConstraint {
            label: label.into(),
            coeffs,
            bound,
        });
    }

    pub fn add_equality(&mut self, label: impl Into<String>, coeffs: Vec<f64>, bound: f64, band: f64) {
        let label = label.into();
        let at = self.inequalities.len();
        let neg: Vec<f64> = coeffs.iter().map(|a| -a).collect();
        self.add_inequality(format!("{label} (upper)"), coeffs, bound + band);
        self.add_inequality(format!("{label} (lower)"), neg, -bound + band);
        self.equalities.push((label, at));
    }

    /// Residual `a·x − b` of the i-th equality.
    pub fn equality_residual(&self, i: usize, x: &[f64]) -> f64 {
        let at = self.equalities[i].1;
        let (up, lo) = (&self.inequalities[at], &self.inequalities[at + 1]);
        0.5 * (up.value(x) - lo.value(x))
    }

    /// Sum of positive constraint values.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.inequalities.iter().map(|c| c.value(x).max(0.0)).sum()
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.inequalities.iter().all(|c| c.value(x) <= tol)
    }

    /// Alternating projections onto violated half-spaces, moving only the
    /// coordinates flagged in `free` and clamping to `[lower, upper]`.
    /// Returns whether the result is feasible within `tol`.
    pub fn project(&self, x: &mut [f64], free: &[bool], lower: &[f64], upper: &[f64], tol: f64) -> bool {
        for _ in 0..500 {
            let mut moved = false;
            for c in &self.inequalities {
                let g = c.value(x);
                if g <= tol * 0.5 {
                    continue;
                }
                let norm2: f64 = c
                    .coeffs
                    .iter()
                    .zip(free)
                    .filter(|(_, f)| **f)
                    .map(|(a, _)| a * a)
                    .sum();
                if norm2 == 0.0 {
                    continue;
                }
                for (i, a) in c.coeffs.iter().enumerate() {
                    if free[i] {
                        x[i] -= g * a / norm2;
                    }
                }
                moved = true;
            }
            for i in 0..x.len() {
                if free[i] {
                    x[i] = x[i].clamp(lower[i], upper[i]);
                }
            }
            if !moved || self.is_feasible(x, tol) {
                break;
            }
        }
        self.is_feasible(x, tol)
    }

    /// Constraints of the iDSD problem over `x = [Ē, δ₁, …, δ_N]`:
    /// `Ē = Ē_const` (two inequalities), `Σδ ≤ cap`, `δᵢ ≥ 0`.
    pub fn idsd(n_sections: usize, delta_cap: f64, e_bar_const: f64, band: f64) -> Self {
        let dim = n_sections + 1;
        let mut set = Self::new();
        let mut e = vec![0.0; dim];
        e[0] = 1.0;
        set.add_equality("e_bar = e_bar_const", e, e_bar_const, band);
        let mut cap = vec![1.0; dim];
        cap[0] = 0.0;
        set.add_inequality("sum(delta) <= cap", cap, delta_cap);
        for i in 1..dim {
            let mut a = vec![0.0; dim];
            a[i] = -1.0;
            set.add_inequality(format!("delta_{i} >= 0"), a, 0.0);
        }
        set
    }
}
