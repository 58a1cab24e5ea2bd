//! Separable cost functions over node-layer states.
//!
//! The distributed optimization flow minimizes a global cost that is a sum
//! of per-node terms, f̃(Y) = Σ f_{ih̃}(y_{ih̃}), subject to consensus. Each
//! term sees only its own scalar state, so the global gradient is assembled
//! componentwise.
//!
//! ```
//! use multilap::cost::QuadraticCost;
//! use ndarray::array;
//!
//! let cost = QuadraticCost::new(array![1.0, 2.0, 3.0]);
//! // Σ ½y² + γᵢy is minimized over the consensus line at −mean(γ).
//! assert_eq!(cost.analytic_optimum(), -2.0);
//! ```

use ndarray::Array1;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A scalar cost term f(y) attached to one node-layer pair.
pub trait ScalarCost: Send + Sync {
    fn value(&self, y: f64) -> f64;
    fn gradient(&self, y: f64) -> f64;
}

/// Strongly convex term ½y² + γy; the workhorse for consensus experiments
/// because the constrained optimum has the closed form −mean(γ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub gamma: f64,
}

impl ScalarCost for Quadratic {
    fn value(&self, y: f64) -> f64 {
        0.5 * y * y + self.gamma * y
    }

    fn gradient(&self, y: f64) -> f64 {
        y + self.gamma
    }
}

/// The trivial term f(y) = 0; with it the saddle-point flow reduces to pure
/// consensus seeking.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl ScalarCost for Zero {
    fn value(&self, _y: f64) -> f64 {
        0.0
    }

    fn gradient(&self, _y: f64) -> f64 {
        0.0
    }
}

/// One cost term per node-layer pair, in flat supra order.
pub struct CostModel {
    terms: Vec<Box<dyn ScalarCost>>,
}

impl CostModel {
    pub fn new(terms: Vec<Box<dyn ScalarCost>>) -> Self {
        Self { terms }
    }

    /// Quadratic terms ½y² + γᵢy from a vector of linear coefficients.
    pub fn quadratic(gammas: &Array1<f64>) -> Self {
        Self::new(
            gammas
                .iter()
                .map(|&gamma| Box::new(Quadratic { gamma }) as Box<dyn ScalarCost>)
                .collect(),
        )
    }

    /// All-zero cost over `n` node-layer pairs.
    pub fn zero(n: usize) -> Self {
        Self::new(
            (0..n)
                .map(|_| Box::new(Zero) as Box<dyn ScalarCost>)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_len(&self, got: usize, context: &str) -> Result<()> {
        if got != self.terms.len() {
            return Err(Error::DimensionMismatch {
                expected: self.terms.len(),
                got,
                context: context.to_string(),
            });
        }
        Ok(())
    }

    /// Global cost f̃(Y) = Σ f_{ih̃}(y_{ih̃}).
    pub fn value(&self, y: &Array1<f64>) -> Result<f64> {
        self.check_len(y.len(), "cost value")?;
        Ok(self
            .terms
            .iter()
            .zip(y.iter())
            .map(|(term, &yi)| term.value(yi))
            .sum())
    }

    /// Global gradient ∇f̃(Y), assembled componentwise.
    pub fn global_gradient(&self, y: &Array1<f64>) -> Result<Array1<f64>> {
        self.check_len(y.len(), "cost gradient")?;
        Ok(Array1::from_iter(
            self.terms
                .iter()
                .zip(y.iter())
                .map(|(term, &yi)| term.gradient(yi)),
        ))
    }

    /// Write the gradient into a slice without allocating; used by the flow
    /// right-hand sides on the integrator's hot path.
    pub(crate) fn gradient_into(&self, y: &[f64], out: &mut [f64]) {
        for ((term, &yi), o) in self.terms.iter().zip(y).zip(out) {
            *o = term.gradient(yi);
        }
    }
}

impl std::fmt::Debug for CostModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CostModel")
            .field("terms", &self.terms.len())
            .finish()
    }
}

/// Draw linear coefficients γ ~ U(−2, 2), one per node-layer pair, from a
/// dedicated stream of the seeded generator so other seeded draws (such as
/// initial conditions) never shift them.
pub fn seeded_gammas(n: usize, seed: u64) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    Array1::from_iter((0..n).map(|_| rng.random_range(-2.0..2.0)))
}

/// Quadratic cost over the whole supra state, with the closed-form optimum
/// the consensus experiments verify against.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCost {
    gammas: Array1<f64>,
}

impl QuadraticCost {
    pub fn new(gammas: Array1<f64>) -> Self {
        Self { gammas }
    }

    /// Coefficients drawn via [`seeded_gammas`].
    pub fn seeded(n: usize, seed: u64) -> Self {
        Self::new(seeded_gammas(n, seed))
    }

    pub fn gammas(&self) -> &Array1<f64> {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// The constrained minimizer of Σ ½y² + γᵢy over the consensus line
    /// y_i = x for all i: differentiating Σ(½x² + γᵢx) gives
    /// x* = −(Σγᵢ)/N.
    pub fn analytic_optimum(&self) -> f64 {
        -self.gammas.sum() / self.gammas.len() as f64
    }

    /// Per-term view for the generic flow machinery.
    pub fn model(&self) -> CostModel {
        CostModel::quadratic(&self.gammas)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn quadratic_hand_values() {
        let q = Quadratic { gamma: 1.0 };
        assert_eq!(q.value(2.0), 4.0); // ½·4 + 1·2
        assert_eq!(q.gradient(2.0), 3.0);

        let q = Quadratic { gamma: 0.5 };
        assert_eq!(q.value(1.0), 1.0); // ½ + ½
        assert_eq!(q.gradient(-0.5), 0.0); // minimum at y = −γ
    }

    #[test]
    fn zero_cost_is_inert() {
        let model = CostModel::zero(4);
        let y = array![1.0, -2.0, 3.0, 0.0];
        assert_eq!(model.value(&y).unwrap(), 0.0);
        assert_eq!(model.global_gradient(&y).unwrap(), Array1::<f64>::zeros(4));
    }

    #[test]
    fn global_value_and_gradient() {
        let cost = QuadraticCost::new(array![1.0, -1.0]);
        let model = cost.model();
        let y = array![2.0, 3.0];
        // (2 + 2) + (4.5 − 3) = 5.5
        assert_eq!(model.value(&y).unwrap(), 5.5);
        assert_eq!(model.global_gradient(&y).unwrap(), array![3.0, 2.0]);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let model = CostModel::zero(3);
        assert!(model.value(&array![1.0]).is_err());
        assert!(model.global_gradient(&array![1.0, 2.0]).is_err());
    }

    #[test]
    fn analytic_optimum_is_negative_mean() {
        let cost = QuadraticCost::new(array![1.0, 2.0, 3.0]);
        assert_eq!(cost.analytic_optimum(), -2.0);

        let cost = QuadraticCost::new(array![0.0, 0.0]);
        assert_eq!(cost.analytic_optimum(), 0.0);
    }

    #[test]
    fn seeded_gammas_deterministic_and_in_range() {
        let a = seeded_gammas(16, 7);
        let b = seeded_gammas(16, 7);
        assert_eq!(a, b);
        let c = seeded_gammas(16, 8);
        assert_ne!(a, c);
        for &g in a.iter() {
            assert!((-2.0..2.0).contains(&g));
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let cost = QuadraticCost::seeded(10, 42);
        let model = cost.model();
        let y = Array1::from_iter((0..10).map(|i| (i as f64) * 0.37 - 1.5));
        let grad = model.global_gradient(&y).unwrap();
        let h = 1e-6;
        for i in 0..10 {
            let mut plus = y.clone();
            let mut minus = y.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (model.value(&plus).unwrap() - model.value(&minus).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(grad[i], fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn gradient_into_matches_allocating_path() {
        let cost = QuadraticCost::seeded(6, 3);
        let model = cost.model();
        let y = Array1::from_iter((0..6).map(|i| i as f64 - 2.5));
        let expected = model.global_gradient(&y).unwrap();
        let mut out = vec![0.0; 6];
        model.gradient_into(y.as_slice().unwrap(), &mut out);
        assert_eq!(out, expected.to_vec());
    }
}
