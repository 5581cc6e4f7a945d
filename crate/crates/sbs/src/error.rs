use thiserror::Error;

/// Errors surfaced by graph construction, model validation, simulation and
/// the analysis layer.
#[derive(Debug, Error)]
pub enum Error {
    // Graph construction.
    #[error("need at least {min} agents, got {n}")]
    TooFewAgents { n: usize, min: usize },
    #[error("agent index {index} out of range for {n} agents")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("self-loop at agent {0}")]
    SelfLoop(usize),
    #[error("agent {0} is isolated; the dynamics divide by the degree")]
    IsolatedAgent(usize),
    #[error("no simple {d}-regular graph on {n} vertices exists")]
    InfeasibleDegree { n: usize, d: usize },
    #[error("random regular generation gave up after {attempts} restarts")]
    RetryBudgetExhausted { attempts: u32 },
    #[error("component size must be at least 2, got {0}")]
    ComponentTooSmall(usize),
    #[error("edge list line {line}: {msg}")]
    EdgeListParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),

    // Model parameters.
    #[error("need at least one arm")]
    NoArms,
    #[error("at most {max} arms supported, got {k}")]
    TooManyArms { k: usize, max: usize },
    #[error("reward probability {value} of arm {arm} is outside [0, 1]")]
    RewardOutOfRange { arm: usize, value: f64 },
    #[error("rewards must be non-increasing; arm {arm} breaks the order")]
    RewardsNotSorted { arm: usize },
    #[error("the best arm must be unique: p1 = p2 = {0}")]
    BestArmNotUnique(f64),
    #[error("exploration rate {0} is outside [0, 1]")]
    ExplorationOutOfRange(f64),
    #[error("clock rate must be positive and finite, got {0}")]
    NonPositiveClockRate(f64),

    // Initial conditions and states.
    #[error("initial counts sum to {got}, expected {expected}")]
    CountMismatch { expected: u64, got: u64 },
    #[error("memory value {value} at agent {agent} exceeds the number of arms {k}")]
    MemoryOutOfRange { agent: usize, value: u8, k: usize },
    #[error("probability vector sums to {sum}, not 1 (entries must be nonnegative)")]
    NotASimplex { sum: f64 },
    #[error("vector length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    // Run configuration.
    #[error("t_max must be positive, got {0}")]
    NonPositiveTMax(f64),
    #[error("record grid step must be positive, got {0}")]
    NonPositiveGrid(f64),

    // ODE integration.
    #[error("step size {h} too large; the integrator requires 0 < h <= {max}")]
    StepTooLarge { h: f64, max: f64 },
    #[error("state became non-finite at t = {t}; check the parameters")]
    NonFiniteState { t: f64 },
    #[error("horizon must be positive, got {0}")]
    NonPositiveHorizon(f64),

    // Convergence bounds.
    #[error("c must lie strictly inside (0, 1), got {0}")]
    COutOfRange(f64),
    #[error("c0 must lie in (0, 1], got {0}")]
    C0OutOfRange(f64),
    #[error("the delayed bound needs exploration: mu = 0 makes the delay infinite")]
    DelayedBoundNeedsExploration,
    #[error("no bound branch applies: y1(0) = 0 and y0(0) = 0")]
    NoBoundBranch,

    // Analysis.
    #[error("gambler's ruin needs 0 < p < 1, got {0}")]
    RuinProbabilityOutOfRange(f64),
    #[error("gambler's ruin needs 0 <= z0 <= n and n >= 1, got z0 = {z0}, n = {n}")]
    RuinDomain { z0: u64, n: u64 },
    #[error("no jumps recorded; enable jump logging on the runs")]
    NoJumps,
    #[error("the early-wealth check needs mu > 0")]
    WealthNeedsExploration,
    #[error("scenario needs an even agent count >= 4, got {0}")]
    OddScenarioSize(usize),
    #[error("log log {n} rounds below 2; pick n >= 1619")]
    ScenarioTooSmall { n: usize },
    #[error("replication count must be positive")]
    NoReplications,
}

pub type Result<T> = std::result::Result<T, Error>;
