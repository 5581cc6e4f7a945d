//! Deterministic limit of the dynamics: as the population and the minimum
//! degree grow, the occupancy fractions `y = (y_0, ..., y_K)` follow
//!
//! ```text
//! y0' = -y0 lam (mu/K) sum_j p_j - y0 lam sum_j (1 - mu) p_j y_j
//! yk' =  y0 lam (mu/K) p_k + yk lam ((1 - mu) p_k y0 + sum_j (p_k - p_j) y_j)
//! ```
//!
//! on the probability simplex. This module integrates the system with a
//! fixed-step classical Runge-Kutta scheme (the drift is a smooth low-degree
//! polynomial on a compact set, so adaptive control buys nothing), provides
//! dense output through cubic Hermite interpolation, and evaluates the
//! closed-form exponential-convergence envelopes: the share of the best arm
//! satisfies a logistic lower bound with rate
//! `R = lam * min((1 - mu + mu/K) p_1, p_1 - p_2)`, started either at `t = 0`
//! (when `y_1(0) > 0`) or after the delay `t_c = ln(1/c) / (lam (mu/K) sum p)`
//! (when `y_1(0) = 0` but undecided mass is present), and the undecided share
//! obeys `y_0(t) <= y_0(0) exp(-lam (mu/K) sum_j p_j t)`.

use crate::dynamics::ModelParams;
use crate::error::{Error, Result};

/// Largest admissible integrator step.
pub const MAX_STEP: f64 = 0.01;

/// Point on the probability simplex over `{0, ..., K}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeState {
    y: Vec<f64>,
}

impl OdeState {
    /// Validates the simplex constraints: entries in `[0, 1]` and total mass
    /// 1 within `1e-9`.
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::LengthMismatch {
                expected: 2,
                got: y.len(),
            });
        }
        let sum: f64 = y.iter().sum();
        if y.iter().any(|&x| !(-1e-9..=1.0 + 1e-9).contains(&x)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotASimplex { sum });
        }
        Ok(OdeState { y })
    }

    /// The all-undecided corner `(1, 0, ..., 0)` for `K` arms.
    pub fn all_undecided(num_arms: usize) -> Self {
        let mut y = vec![0.0; num_arms + 1];
        y[0] = 1.0;
        OdeState { y }
    }

    pub fn components(&self) -> &[f64] {
        &self.y
    }
}

/// Right-hand side of the limit system at `y`. Errors when `y` is not a
/// simplex point (beyond `1e-9`) or has the wrong dimension.
pub fn drift(y: &OdeState, params: &ModelParams) -> Result<Vec<f64>> {
    if y.y.len() != params.num_arms() + 1 {
        return Err(Error::LengthMismatch {
            expected: params.num_arms() + 1,
            got: y.y.len(),
        });
    }
    let mut out = vec![0.0; y.y.len()];
    drift_raw(&y.y, params, &mut out);
    Ok(out)
}

fn drift_raw(y: &[f64], params: &ModelParams, out: &mut [f64]) {
    let k = params.num_arms();
    let lam = params.clock_rate();
    let mu = params.exploration();
    let p = params.rewards();
    let y0 = y[0];

    let mut uniform_outflow = 0.0; // (mu/K) sum_j p_j
    let mut peer_outflow = 0.0; // sum_j (1 - mu) p_j y_j
    for j in 1..=k {
        uniform_outflow += mu / k as f64 * p[j - 1];
        peer_outflow += (1.0 - mu) * p[j - 1] * y[j];
    }
    out[0] = -y0 * lam * uniform_outflow - y0 * lam * peer_outflow;

    for arm in 1..=k {
        let pk = p[arm - 1];
        let mut exchange = 0.0; // sum_j (p_k - p_j) y_j
        for j in 1..=k {
            exchange += (pk - p[j - 1]) * y[j];
        }
        out[arm] =
            y0 * lam * (mu / k as f64) * pk + y[arm] * lam * ((1.0 - mu) * pk * y0 + exchange);
    }
}

/// Dense solution of the limit system on a uniform grid of step `h`, with
/// values and drifts stored at every node; queries interpolate with a cubic
/// Hermite polynomial, so the result is continuous and fourth-order accurate
/// between nodes.
#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    h: f64,
    values: Vec<Vec<f64>>,
    derivs: Vec<Vec<f64>>,
}

impl OdeTrajectory {
    pub fn step(&self) -> f64 {
        self.h
    }

    /// Last grid time (the smallest multiple of `h` at or beyond the
    /// requested horizon).
    pub fn t_end(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.h
    }

    /// Grid nodes as `(t, y)` pairs.
    pub fn grid(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, y)| (i as f64 * self.h, y.as_slice()))
    }

    /// Interpolated state at `t`, clamped to the covered interval.
    pub fn eta_at(&self, t: f64) -> Vec<f64> {
        (0..self.values[0].len())
            .map(|k| self.eta_component_at(k, t))
            .collect()
    }

    /// Interpolated component `k` at `t`, clamped to the covered interval.
    pub fn eta_component_at(&self, k: usize, t: f64) -> f64 {
        let n = self.values.len() - 1;
        let s = (t / self.h).clamp(0.0, n as f64);
        let mut cell = s.floor() as usize;
        if cell >= n {
            cell = n - 1;
        }
        let theta = s - cell as f64;
        let (y0, y1) = (self.values[cell][k], self.values[cell + 1][k]);
        let (f0, f1) = (self.derivs[cell][k], self.derivs[cell + 1][k]);
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + theta;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y0 + h10 * self.h * f0 + h01 * y1 + h11 * self.h * f1
    }

    /// Final grid state.
    pub fn terminal(&self) -> &[f64] {
        self.values.last().unwrap()
    }
}

/// Integrates the limit system from `y0` to (at least) `t_end` with fixed
/// step `h <= 0.01` classical RK4. After each step the state is renormalized
/// by its mass only if the mass drifted beyond `1e-12`; that happening more
/// than once per 10^6 steps is logged as a warning, since it signals a bug
/// rather than normal roundoff.
pub fn integrate(
    y0: &OdeState,
    params: &ModelParams,
    t_end: f64,
    h: f64,
) -> Result<OdeTrajectory> {
    if t_end <= 0.0 || !t_end.is_finite() {
        return Err(Error::NonPositiveHorizon(t_end));
    }
    if h.is_nan() || h <= 0.0 || h > MAX_STEP {
        return Err(Error::StepTooLarge { h, max: MAX_STEP });
    }
    if y0.y.len() != params.num_arms() + 1 {
        return Err(Error::LengthMismatch {
            expected: params.num_arms() + 1,
            got: y0.y.len(),
        });
    }
    let steps = (t_end / h - 1e-9).ceil().max(1.0) as usize;
    let dim = y0.y.len();
    let mut values = Vec::with_capacity(steps + 1);
    let mut derivs = Vec::with_capacity(steps + 1);

    let mut y = y0.y.clone();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];
    let mut renormalizations = 0u64;

    drift_raw(&y, params, &mut k1);
    values.push(y.clone());
    derivs.push(k1.clone());

    for step in 0..steps {
        // k1 already holds the drift at the current node.
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * k1[i];
        }
        drift_raw(&stage, params, &mut k2);
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * k2[i];
        }
        drift_raw(&stage, params, &mut k3);
        for i in 0..dim {
            stage[i] = y[i] + h * k3[i];
        }
        drift_raw(&stage, params, &mut k4);
        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let mass: f64 = y.iter().sum();
        if !mass.is_finite() {
            return Err(Error::NonFiniteState {
                t: (step + 1) as f64 * h,
            });
        }
        if (mass - 1.0).abs() > 1e-12 {
            renormalizations += 1;
            for v in y.iter_mut() {
                *v /= mass;
            }
        }

        drift_raw(&y, params, &mut k1);
        values.push(y.clone());
        derivs.push(k1.clone());
    }

    if renormalizations > 1 + steps as u64 / 1_000_000 {
        log::warn!(
            "simplex renormalization fired {renormalizations} times over {steps} steps; \
             the drift should conserve mass to roundoff"
        );
    }
    Ok(OdeTrajectory { h, values, derivs })
}

/// Which hypothesis of the exponential-convergence envelope applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundBranch {
    /// `y_1(0) > 0`: the logistic envelope starts immediately.
    PositiveStart,
    /// `y_1(0) = 0`, `y_0(0) > 0`, `mu > 0`: the envelope starts after the
    /// seeding delay `t_c`.
    ZeroStart,
}

/// Closed-form convergence envelope: a logistic lower bound for the share of
/// the best arm and an exponential upper bound for the undecided share.
#[derive(Debug, Clone)]
pub struct ConvergenceBound {
    rate: f64,
    delay: f64,
    c: f64,
    branch: BoundBranch,
    logistic_coeff: f64,
    y0_init: f64,
    y0_decay: f64,
}

impl ConvergenceBound {
    /// Exponential rate `R`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Seeding delay `t_c` (zero for the immediate branch).
    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn branch(&self) -> BoundBranch {
        self.branch
    }

    /// Logistic lower bound for `y_1(t)`, valid for `t >= delay()`; returns
    /// NaN before the delay.
    pub fn lower_bound_y1(&self, t: f64) -> f64 {
        if t < self.delay {
            return f64::NAN;
        }
        1.0 - 1.0 / (self.logistic_coeff * (self.rate * (t - self.delay)).exp() + 1.0)
    }

    /// Exponential upper bound for the undecided share `y_0(t)`.
    pub fn y0_upper_bound(&self, t: f64) -> f64 {
        self.y0_init * (-self.y0_decay * t).exp()
    }
}

/// Builds the convergence envelope for the given parameters and initial
/// state. `c` tunes the delayed branch (how much undecided mass must have
/// drained before the logistic takes over) and must lie in `(0, 1)`.
pub fn convergence_bound(
    params: &ModelParams,
    y0: &OdeState,
    c: f64,
) -> Result<ConvergenceBound> {
    if !c.is_finite() || c <= 0.0 || c >= 1.0 {
        return Err(Error::COutOfRange(c));
    }
    if y0.y.len() != params.num_arms() + 1 {
        return Err(Error::LengthMismatch {
            expected: params.num_arms() + 1,
            got: y0.y.len(),
        });
    }
    let k = params.num_arms() as f64;
    let mu = params.exploration();
    let lam = params.clock_rate();
    let p1 = params.reward(1);
    let p2 = params.second_reward();
    let rate = lam * ((1.0 - mu + mu / k) * p1).min(p1 - p2);
    let y0_decay = lam * (mu / k) * params.reward_sum();
    let undecided = y0.y[0];
    let share1 = y0.y[1];

    if share1 > 0.0 {
        let logistic_coeff = if share1 >= 1.0 {
            f64::INFINITY
        } else {
            share1 / (1.0 - share1)
        };
        Ok(ConvergenceBound {
            rate,
            delay: 0.0,
            c,
            branch: BoundBranch::PositiveStart,
            logistic_coeff,
            y0_init: undecided,
            y0_decay,
        })
    } else {
        if undecided <= 0.0 {
            return Err(Error::NoBoundBranch);
        }
        if mu == 0.0 {
            return Err(Error::DelayedBoundNeedsExploration);
        }
        let delay = (1.0 / c).ln() / y0_decay;
        let seeded = (1.0 - c) * undecided;
        Ok(ConvergenceBound {
            rate,
            delay,
            c,
            branch: BoundBranch::ZeroStart,
            logistic_coeff: seeded / (k - seeded),
            y0_init: undecided,
            y0_decay,
        })
    }
}
