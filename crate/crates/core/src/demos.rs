//! Closed-form one-dimensional examples used as analytic cross-checks.
//!
//! Two toys, both stated as maximization problems and negated internally to
//! match the minimization pipeline:
//!
//! - Two competing lines over an interval: the optimum jumps between the
//!   endpoints when the weighted slope changes sign, so the switch
//!   probability has a normal-CDF closed form.
//! - Two competing concave parabolas over the real line: the optimum moves
//!   continuously, with closed form `x*(beta) = -beta'b / (2 (b1 + b2))`.

use crate::dist::PreferenceDistribution;
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::stats::normal_cdf;

/// The two-line toy: objectives `a_i + b_i x` maximized over `x_range` under
/// normal preference weights.
#[derive(Debug, Clone)]
pub struct DiscreteToySpec {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub x_range: (f64, f64),
    pub theta: [f64; 2],
    pub sigma: [[f64; 2]; 2],
}

impl DiscreteToySpec {
    /// The worked instance: lines -15 + x and -55 + 2x over [0, 15].
    pub fn worked_instance(theta: [f64; 2], sigma: [[f64; 2]; 2]) -> Self {
        Self {
            a: [-15.0, -55.0],
            b: [1.0, 2.0],
            x_range: (0.0, 15.0),
            theta,
            sigma,
        }
    }
}

/// Default preference trio: two concentrations of the same mean direction
/// and one opposite, the qualitative pattern of the worked example.
pub fn default_discrete_scenarios() -> Vec<(String, [f64; 2], [[f64; 2]; 2])> {
    let iso = |s: f64| [[s, 0.0], [0.0, s]];
    vec![
        ("wide_positive".into(), [1.0, 1.0], iso(4.0)),
        ("tight_positive".into(), [1.0, 1.0], iso(0.05)),
        ("tight_negative".into(), [-1.0, -1.0], iso(0.05)),
    ]
}

/// Probability that the optimizer sits at the upper endpoint:
/// `Phi(b'theta / sqrt(b' Sigma b))`.
pub fn switch_probability(spec: &DiscreteToySpec) -> Result<f64> {
    let b = spec.b;
    let slope_mean = b[0] * spec.theta[0] + b[1] * spec.theta[1];
    let s = &spec.sigma;
    let slope_var = b[0] * b[0] * s[0][0]
        + b[0] * b[1] * (s[0][1] + s[1][0])
        + b[1] * b[1] * s[1][1];
    if slope_var < 0.0 {
        return Err(Error::InvalidDistribution(
            "sigma is not positive semidefinite".into(),
        ));
    }
    if slope_var == 0.0 {
        return if slope_mean > 0.0 {
            Ok(1.0)
        } else if slope_mean < 0.0 {
            Ok(0.0)
        } else {
            Err(Error::DegenerateInput(
                "degenerate preference with zero mean slope: switch probability undefined".into(),
            ))
        };
    }
    Ok(normal_cdf(slope_mean / slope_var.sqrt()))
}

/// The two-parabola toy under Dirichlet preference weights.
#[derive(Debug, Clone)]
pub struct ContinuousToySpec {
    pub b: [f64; 2],
    pub alpha: [f64; 2],
}

impl ContinuousToySpec {
    /// The worked instance: slopes (1, 3).
    pub fn worked_instance(alpha: [f64; 2]) -> Self {
        Self {
            b: [1.0, 3.0],
            alpha,
        }
    }
}

/// Unique maximizer of the weighted concave toy utility.
pub fn toy_xstar(beta: [f64; 2], b: [f64; 2]) -> Result<f64> {
    let total = beta[0] + beta[1];
    if !(total > 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "toy optimum requires beta1 + beta2 > 0, got {total}"
        )));
    }
    Ok(-(beta[0] * b[0] + beta[1] * b[1]) / (2.0 * total))
}

/// Intercepts of the worked parabola pair (only the trade-off curve needs
/// them; the optimizer does not).
const TOY_INTERCEPTS: [f64; 2] = [1.0, 2.0];

/// Objective pair of the worked instance at `x`, in maximization orientation.
pub fn toy_front_point(x: f64, b: [f64; 2]) -> (f64, f64) {
    (
        TOY_INTERCEPTS[0] - b[0] * x - x * x,
        TOY_INTERCEPTS[1] - b[1] * x - x * x,
    )
}

#[derive(Debug, Clone)]
pub struct ToyDistribution {
    /// Optimizer draws.
    pub x_star: Vec<f64>,
    /// `(f1, f2)` at each draw: where the mass sits along the trade-off curve.
    pub curve: Vec<(f64, f64)>,
    /// Dense trade-off curve over the attainable optimizer range, for
    /// plotting the front underneath the density.
    pub front_grid: Vec<(f64, f64, f64)>,
}

/// Sample the continuous toy's decision distribution and its curve-aligned
/// image.
pub fn toy_distribution(
    spec: &ContinuousToySpec,
    n: usize,
    stream: Stream,
) -> Result<ToyDistribution> {
    let dist = PreferenceDistribution::Dirichlet {
        alpha: spec.alpha.to_vec(),
    };
    let draws = dist.sample(n, stream)?;
    let mut x_star = Vec::with_capacity(n);
    let mut curve = Vec::with_capacity(n);
    for row in draws {
        let x = toy_xstar([row[0], row[1]], spec.b)?;
        x_star.push(x);
        curve.push(toy_front_point(x, spec.b));
    }
    // The optimizer range over the weight simplex is [-b2/2, -b1/2].
    let (lo, hi) = (-spec.b[1] / 2.0, -spec.b[0] / 2.0);
    let grid_n = 200;
    let front_grid = (0..=grid_n)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / grid_n as f64;
            let (f1, f2) = toy_front_point(x, spec.b);
            (x, f1, f2)
        })
        .collect();
    Ok(ToyDistribution {
        x_star,
        curve,
        front_grid,
    })
}
