//! Metropolis-Hastings over the product of two simplices.
//!
//! The proposal multiplies every spacing by an independent U(1/r, r) draw
//! and renormalizes. Its transition density has the closed form
//!
//! ```text
//! g(s*|s) = (r/(r^2-1))^d (prod_j s_j)^-1 [ (min_j r s_j/s*_j)^d
//!           - (max_j s_j/(r s*_j))^d ] / d
//! ```
//!
//! which is zero when the bracket is empty. The flat Dirichlet prior
//! cancels in the acceptance ratio, so the chain targets the likelihood
//! restricted to the product of simplices.

use crate::model::{Dataset, LikelihoodEvaluator, ModelError, SimplexVector};
use crate::splines::{SplineBasis, SplineError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Name of the generator backing every chain, recorded in run manifests.
pub const RNG_IDENTITY: &str = "chacha8";

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("proposal half-width r must exceed 1, got {0}")]
    InvalidHalfWidth(f64),
    #[error("burn-in {burn_in} must be smaller than iteration count {iterations}")]
    BurnInTooLarge { burn_in: usize, iterations: usize },
    #[error("thinning factor must be at least 1")]
    ZeroThin,
    #[error("initial state has non-finite log-likelihood")]
    DegenerateStart,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spline(#[from] SplineError),
}

/// Multiplicative proposal configuration. The paper leaves `r` free; by
/// default it is tuned during burn-in toward a 25% acceptance rate and
/// frozen afterwards so the post-burn-in kernel is a fixed MH kernel.
#[derive(Debug, Clone, Copy)]
pub struct ProposalConfig {
    pub initial_r: f64,
    pub adapt: bool,
    pub target_acceptance: f64,
}

impl Default for ProposalConfig {
    fn default() -> Self {
        Self {
            initial_r: 1.1,
            adapt: true,
            target_acceptance: 0.25,
        }
    }
}

impl ProposalConfig {
    /// Fixed-r mode for reproducibility studies.
    pub fn fixed(r: f64) -> Self {
        Self {
            initial_r: r,
            adapt: false,
            target_acceptance: 0.25,
        }
    }

    fn validate(&self) -> Result<(), SamplerError> {
        if !(self.initial_r > 1.0) || !self.initial_r.is_finite() {
            return Err(SamplerError::InvalidHalfWidth(self.initial_r));
        }
        Ok(())
    }
}

/// Chain dimensions and schedule.
#[derive(Debug, Clone, Copy)]
pub struct ChainConfig {
    pub degree: usize,
    pub intervals: usize,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub inversion_tol: f64,
}

impl ChainConfig {
    pub fn new(degree: usize, intervals: usize, seed: u64) -> Self {
        Self {
            degree,
            intervals,
            iterations: 20_000,
            burn_in: 5_000,
            thin: 1,
            seed,
            inversion_tol: crate::model::DEFAULT_INVERSION_TOL,
        }
    }
}

/// Post-burn-in output of one chain.
#[derive(Debug, Clone)]
pub struct ChainResult {
    pub degree: usize,
    pub intervals: usize,
    pub seed: u64,
    /// Stored (gamma, delta) states after burn-in, thinned.
    pub states: Vec<(SimplexVector, SimplexVector)>,
    /// Log-likelihood of each stored state.
    pub log_likelihoods: Vec<f64>,
    /// Acceptance rate over post-burn-in iterations.
    pub acceptance_rate: f64,
    /// Proposal half-width in force after burn-in.
    pub r: f64,
    pub posterior_mean_theta: Vec<f64>,
    pub posterior_mean_phi: Vec<f64>,
}

impl ChainResult {
    pub fn basis(&self) -> SplineBasis {
        SplineBasis::new(self.degree, self.intervals).expect("validated at construction")
    }

    pub fn stored_len(&self) -> usize {
        self.states.len()
    }
}

/// Multiplies each spacing by an independent U(1/r, r) draw and
/// renormalizes onto the simplex.
pub fn propose(spacings: &SimplexVector, r: f64, rng: &mut impl Rng) -> SimplexVector {
    let scaled: Vec<f64> = spacings
        .as_slice()
        .iter()
        .map(|&g| g * rng.gen_range(1.0 / r..r))
        .collect();
    SimplexVector::from_unnormalized(scaled).expect("positive scaling preserves the simplex")
}

/// Log transition density `log g(to|from)`; negative infinity marks an
/// unreachable transition (empty integration bracket).
pub fn proposal_log_density(to: &SimplexVector, from: &SimplexVector, r: f64) -> f64 {
    let d = from.dim();
    debug_assert_eq!(d, to.dim());
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut log_prod_from = 0.0;
    for (&f, &t) in from.as_slice().iter().zip(to.as_slice()) {
        if !(f > 0.0) || !(t > 0.0) {
            return f64::NEG_INFINITY;
        }
        let ratio = f / t;
        lo = lo.max(ratio / r);
        hi = hi.min(ratio * r);
        log_prod_from += f.ln();
    }
    if hi <= lo {
        return f64::NEG_INFINITY;
    }
    let d_f = d as f64;
    // log(hi^d - lo^d) = d log hi + log(1 - (lo/hi)^d)
    let log_diff = d_f * hi.ln() + (-((d_f * (lo.ln() - hi.ln())).exp())).ln_1p();
    d_f * (r.ln() - (r * r - 1.0).ln()) - log_prod_from - d_f.ln() + log_diff
}

/// Current point of the chain with its cached log-likelihood.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub gamma: SimplexVector,
    pub delta: SimplexVector,
    pub log_likelihood: f64,
}

/// Log acceptance probability for the move `current -> candidate` under the
/// flat Dirichlet prior (Metropolis-Hastings with the asymmetric proposal).
pub fn log_acceptance(
    current: &ChainState,
    candidate: &ChainState,
    r: f64,
) -> f64 {
    if !candidate.log_likelihood.is_finite() {
        return f64::NEG_INFINITY;
    }
    let forward = proposal_log_density(&candidate.gamma, &current.gamma, r)
        + proposal_log_density(&candidate.delta, &current.delta, r);
    if !forward.is_finite() {
        return f64::NEG_INFINITY;
    }
    let reverse = proposal_log_density(&current.gamma, &candidate.gamma, r)
        + proposal_log_density(&current.delta, &candidate.delta, r);
    ((candidate.log_likelihood + reverse) - (current.log_likelihood + forward)).min(0.0)
}

/// One MH step: proposes both simplices jointly, accepts or rejects.
pub fn mh_step(
    evaluator: &mut LikelihoodEvaluator,
    data: &Dataset,
    state: &ChainState,
    r: f64,
    rng: &mut impl Rng,
) -> (ChainState, bool) {
    let gamma = propose(&state.gamma, r, rng);
    let delta = propose(&state.delta, r, rng);
    let log_likelihood = evaluator.log_likelihood(data, &gamma, &delta);
    let candidate = ChainState {
        gamma,
        delta,
        log_likelihood,
    };
    let log_alpha = log_acceptance(state, &candidate, r);
    if (rng.gen::<f64>()).ln() < log_alpha {
        (candidate, true)
    } else {
        (state.clone(), false)
    }
}

/// Runs one chain from the uniform-spacing point. Deterministic given the
/// seed. With adaptation enabled, `log(r - 1)` follows a Robbins-Monro
/// recursion toward the target acceptance during burn-in only.
pub fn run_chain(
    config: &ChainConfig,
    proposal: &ProposalConfig,
    data: &Dataset,
) -> Result<ChainResult, SamplerError> {
    proposal.validate()?;
    if config.burn_in >= config.iterations {
        return Err(SamplerError::BurnInTooLarge {
            burn_in: config.burn_in,
            iterations: config.iterations,
        });
    }
    if config.thin == 0 {
        return Err(SamplerError::ZeroThin);
    }
    let basis = SplineBasis::new(config.degree, config.intervals)?;
    let dim = basis.spacing_dim();
    let mut evaluator = LikelihoodEvaluator::new(basis.clone(), config.inversion_tol);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut state = ChainState {
        gamma: SimplexVector::uniform(dim),
        delta: SimplexVector::uniform(dim),
        log_likelihood: 0.0,
    };
    state.log_likelihood = evaluator.log_likelihood(data, &state.gamma, &state.delta);
    if !state.log_likelihood.is_finite() {
        return Err(SamplerError::DegenerateStart);
    }

    let mut log_r_minus_1 = (proposal.initial_r - 1.0).ln();
    let mut r = proposal.initial_r;
    let stored_cap = (config.iterations - config.burn_in).div_ceil(config.thin);
    let mut states = Vec::with_capacity(stored_cap);
    let mut log_likelihoods = Vec::with_capacity(stored_cap);
    let mut accepted_post = 0usize;
    let mut post_iterations = 0usize;
    let mut sum_theta = vec![0.0; basis.basis_count()];
    let mut sum_phi = vec![0.0; basis.basis_count()];

    for t in 0..config.iterations {
        let (next, accepted) = mh_step(&mut evaluator, data, &state, r, &mut rng);
        state = next;
        if t < config.burn_in {
            if proposal.adapt {
                let step = ((t + 1) as f64).powf(-0.7);
                let indicator = if accepted { 1.0 } else { 0.0 };
                log_r_minus_1 += step * (indicator - proposal.target_acceptance);
                log_r_minus_1 = log_r_minus_1.clamp((1e-6f64).ln(), (1e3f64).ln());
                r = 1.0 + log_r_minus_1.exp();
            }
            continue;
        }
        post_iterations += 1;
        if accepted {
            accepted_post += 1;
        }
        if (t - config.burn_in) % config.thin == 0 {
            for (acc, theta) in sum_theta.iter_mut().zip(state.gamma.cumulate()) {
                *acc += theta;
            }
            for (acc, phi) in sum_phi.iter_mut().zip(state.delta.cumulate()) {
                *acc += phi;
            }
            states.push((state.gamma.clone(), state.delta.clone()));
            log_likelihoods.push(state.log_likelihood);
        }
    }

    let stored = states.len() as f64;
    for acc in sum_theta.iter_mut().chain(sum_phi.iter_mut()) {
        *acc /= stored;
    }
    // posterior means of monotone coefficients keep the exact endpoints
    sum_theta[0] = 0.0;
    sum_phi[0] = 0.0;
    *sum_theta.last_mut().expect("nonempty") = 1.0;
    *sum_phi.last_mut().expect("nonempty") = 1.0;

    Ok(ChainResult {
        degree: config.degree,
        intervals: config.intervals,
        seed: config.seed,
        states,
        log_likelihoods,
        acceptance_rate: accepted_post as f64 / post_iterations as f64,
        r,
        posterior_mean_theta: sum_theta,
        posterior_mean_phi: sum_phi,
    })
}

/// Derives the RNG stream for the chain at resolution `k` from a base seed
/// (splitmix64 finalizer, so neighboring k values decorrelate).
pub fn derive_chain_seed(base: u64, k: usize) -> u64 {
    let mut z = base ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
