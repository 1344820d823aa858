//! Default probabilities and thresholds as functions of the color-degree
//! parameter `d` and the slack `epsilon`. All logarithms are natural.
//!
//! These are generic over the float type so the same formulas can be
//! evaluated in `f32`, `f64` or any other [`Float`].

use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("q(d) needs ln ln d > 0, i.e. d > e (got d = {0})")]
    DomainError(f64),
    #[error("d must be a finite number greater than 1 (got {0})")]
    InvalidD(f64),
    #[error("epsilon must lie in (0, 1) (got {0})")]
    InvalidEpsilon(f64),
}

fn as_f64<F: Float>(x: F) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn lit<F: Float>(x: f64) -> F {
    F::from(x).unwrap()
}

/// Girth threshold `ln d / (6 ln ln d)`.
pub fn q_of_d<F: Float>(d: F) -> Result<F, ParamError> {
    let loglog = d.ln().ln();
    if !(loglog > F::zero()) {
        return Err(ParamError::DomainError(as_f64(d)));
    }
    Ok(d.ln() / (lit::<F>(6.0) * loglog))
}

/// The asymptotic parameter schedule for a given `d` and `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule<F> {
    d: F,
    epsilon: F,
}

impl<F: Float> Schedule<F> {
    pub fn new(d: F, epsilon: F) -> Result<Self, ParamError> {
        if !(d.is_finite() && d > F::one()) {
            return Err(ParamError::InvalidD(as_f64(d)));
        }
        if !(epsilon > F::zero() && epsilon < F::one()) {
            return Err(ParamError::InvalidEpsilon(as_f64(epsilon)));
        }
        Ok(Self { d, epsilon })
    }

    pub fn d(&self) -> F {
        self.d
    }

    pub fn epsilon(&self) -> F {
        self.epsilon
    }

    fn log_d(&self) -> F {
        self.d.ln()
    }

    pub fn q(&self) -> Result<F, ParamError> {
        q_of_d(self.d)
    }

    /// `max(3, ceil(q(d)))`; 3 where `q(d)` is undefined.
    pub fn q_eff(&self) -> usize {
        let q = self.q().map(|q| as_f64(q.ceil())).unwrap_or(0.0);
        (q as usize).max(3)
    }

    /// List size `ceil(d/2 * (1 + epsilon))` the lemmas reduce to.
    pub fn list_target(&self) -> usize {
        as_f64((self.d / lit(2.0) * (F::one() + self.epsilon)).ceil()) as usize
    }

    /// Reserve probability `2 / ln^{1/4} d`, clamped to 1.
    pub fn p_reserve(&self) -> F {
        (lit::<F>(2.0) / self.log_d().powf(lit(0.25))).min(F::one())
    }

    /// Whether `2 / ln^{1/4} d` had to be clamped.
    pub fn p_reserve_clamped(&self) -> bool {
        lit::<F>(2.0) / self.log_d().powf(lit(0.25)) > F::one()
    }

    /// Sparsification probability `ln^3 d / d`, clamped to 1.
    pub fn p_sparsify(&self) -> F {
        (self.log_d().powi(3) / self.d).min(F::one())
    }

    /// Minimum reserve list size `d / ln^{1/2} d * (1 + epsilon)`.
    pub fn theta_reserve(&self) -> F {
        self.d / self.log_d().sqrt() * (F::one() + self.epsilon)
    }

    /// Minimum residual list size `d/2 * (1 + epsilon/2)`.
    pub fn theta_residual(&self) -> F {
        self.d / lit(2.0) * (F::one() + self.epsilon / lit(2.0))
    }

    /// Minimum sparsified list size `(1 + epsilon/2) ln^3 d / 2`.
    pub fn theta_sparse_list(&self) -> F {
        (F::one() + self.epsilon / lit(2.0)) * self.log_d().powi(3) / lit(2.0)
    }

    /// Maximum sparsified color degree `ln^3 d + ln^{5/2} d`.
    pub fn theta_color_degree(&self) -> F {
        self.log_d().powi(3) + self.log_d().powf(lit(2.5))
    }

    /// Maximum color degree of the hitting subgraph, `d / ln^{1/2} d`.
    pub fn theta_hitting(&self) -> F {
        self.d / self.log_d().sqrt()
    }
}

/// Both sides of the weighted Local Lemma inequality for a short-cycle event
/// `D(C, c)` with `|C| = cycle_len` under girth target `q`:
/// the probability bound `(ln^3 d / d)^{|C|}` and the right-hand side
/// `d^{-(|C|-1)} (1 - d^{-q})^{2|C|} prod_{r=3}^{q} (1 - d^{-(r-1)})^{|C| d^{r-2}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleEventCondition<F> {
    pub probability_bound: F,
    pub lll_bound: F,
}

impl<F: Float> CycleEventCondition<F> {
    pub fn new(d: F, cycle_len: usize, q: usize) -> Self {
        let k = F::from(cycle_len).unwrap();
        let qf = F::from(q).unwrap();
        let log_d = d.ln();
        let log_p = lit::<F>(3.0) * log_d.ln() - log_d;
        let probability_bound = (k * log_p).exp();
        // Work in logs: the factors are all within a hair of 1.
        let mut log_rhs = -(k - F::one()) * log_d;
        log_rhs = log_rhs + lit::<F>(2.0) * k * (-(-qf * log_d).exp()).ln_1p();
        for r in 3..=q {
            let r = F::from(r).unwrap();
            let exponent = k * ((r - lit(2.0)) * log_d).exp();
            log_rhs = log_rhs + exponent * (-(-(r - F::one()) * log_d).exp()).ln_1p();
        }
        Self { probability_bound, lll_bound: log_rhs.exp() }
    }

    pub fn holds(&self) -> bool {
        self.probability_bound < self.lll_bound
    }
}
