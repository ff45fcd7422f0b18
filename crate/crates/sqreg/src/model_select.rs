//! Chib-style marginal-likelihood estimation per resolution, empirical-Bayes
//! selection, and hierarchical-Bayes model averaging.
//!
//! For each k the marginal likelihood is estimated from the chain output via
//! the posterior-ordinate identity
//! `log m = log L(w*) + log prior(w*) - log posterior(w*)`,
//! with the posterior ordinate estimated from the stored samples and fresh
//! proposal draws. All sums run in log space.

use crate::model::{Dataset, LikelihoodEvaluator, SimplexVector};
use crate::sampler::{
    self, derive_chain_seed, propose, proposal_log_density, ChainConfig, ChainResult, ChainState,
    ProposalConfig, SamplerError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SelectError {
    #[error("chain holds no stored samples")]
    EmptyChain,
    #[error("ordinate point is unreachable from every stored sample")]
    UnreachableOrdinate,
    #[error("denominator draw count must be at least 1")]
    NoDenominatorDraws,
    #[error("domain of k values is empty")]
    EmptyDomain,
    #[error("weights and curves have mismatched lengths ({weights} vs {curves})")]
    MismatchedDomains { weights: usize, curves: usize },
    #[error("curves must share a common grid length")]
    RaggedCurves,
    #[error("chain for k = {intervals} failed: {source}")]
    ChainFailed {
        intervals: usize,
        source: SamplerError,
    },
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// How to pick the ordinate point `w*` from the stored samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrdinatePoint {
    /// Stored sample with the highest unnormalized log posterior.
    #[default]
    HighestPosterior,
    /// Last stored sample.
    Last,
}

/// Chib estimator settings.
#[derive(Debug, Clone, Copy)]
pub struct ChibConfig {
    pub ordinate: OrdinatePoint,
    /// Use only the last `m` stored samples in the numerator (all if None).
    pub numerator_samples: Option<usize>,
    /// Fresh proposal draws for the denominator.
    pub denominator_draws: usize,
    pub seed: u64,
}

impl ChibConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            ordinate: OrdinatePoint::HighestPosterior,
            numerator_samples: None,
            denominator_draws: 5_000,
            seed,
        }
    }
}

/// Marginal-likelihood estimate for one resolution.
#[derive(Debug, Clone)]
pub struct MarginalEstimate {
    pub intervals: usize,
    pub log_marginal: f64,
    /// Ordinate state the estimate was anchored at.
    pub ordinate: (SimplexVector, SimplexVector),
    pub ordinate_log_likelihood: f64,
    /// Numerator sample count M.
    pub numerator_samples: usize,
    /// Denominator draw count L.
    pub denominator_draws: usize,
}

/// Normalized model weights over a domain of k values.
#[derive(Debug, Clone)]
pub struct ModelWeights {
    pub domain: Vec<usize>,
    pub weights: Vec<f64>,
}

/// Log of the Dirichlet(1,...,1) density over one simplex of dimension
/// `dim`, i.e. `ln((dim-1)!)`; constant in the state.
pub fn log_uniform_dirichlet(dim: usize) -> f64 {
    (1..dim).map(|i| (i as f64).ln()).sum()
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Simulation-consistent estimate of the log posterior ordinate at `star`:
/// the log of `[M^-1 sum_g alpha(w_g, w*) q(w_g, w*)] /
/// [L^-1 sum_j alpha(w*, w~_j)]` with `w~_j` fresh draws from the proposal
/// at `w*`.
pub fn chib_log_ordinate(
    chain: &ChainResult,
    star: &ChainState,
    data: &Dataset,
    r: f64,
    config: &ChibConfig,
) -> Result<f64, SelectError> {
    if chain.states.is_empty() {
        return Err(SelectError::EmptyChain);
    }
    if config.denominator_draws == 0 {
        return Err(SelectError::NoDenominatorDraws);
    }
    let total = chain.states.len();
    let take = config.numerator_samples.unwrap_or(total).min(total).max(1);
    let skip = total - take;

    let mut numerator_terms = Vec::with_capacity(take);
    for ((gamma, delta), &ll) in chain.states[skip..]
        .iter()
        .zip(&chain.log_likelihoods[skip..])
    {
        let forward = proposal_log_density(&star.gamma, gamma, r)
            + proposal_log_density(&star.delta, delta, r);
        if !forward.is_finite() {
            numerator_terms.push(f64::NEG_INFINITY);
            continue;
        }
        let reverse = proposal_log_density(gamma, &star.gamma, r)
            + proposal_log_density(delta, &star.delta, r);
        let log_alpha = ((star.log_likelihood + reverse) - (ll + forward)).min(0.0);
        numerator_terms.push(log_alpha + forward);
    }
    let log_numerator = log_sum_exp(&numerator_terms) - (take as f64).ln();
    if !log_numerator.is_finite() {
        return Err(SelectError::UnreachableOrdinate);
    }

    let basis = chain.basis();
    let mut evaluator = LikelihoodEvaluator::new(basis, crate::model::DEFAULT_INVERSION_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut denominator_terms = Vec::with_capacity(config.denominator_draws);
    for _ in 0..config.denominator_draws {
        let gamma = propose(&star.gamma, r, &mut rng);
        let delta = propose(&star.delta, r, &mut rng);
        let ll = evaluator.log_likelihood(data, &gamma, &delta);
        if !ll.is_finite() {
            denominator_terms.push(f64::NEG_INFINITY);
            continue;
        }
        let candidate = ChainState {
            gamma,
            delta,
            log_likelihood: ll,
        };
        denominator_terms.push(sampler::log_acceptance(star, &candidate, r));
    }
    let log_denominator =
        log_sum_exp(&denominator_terms) - (config.denominator_draws as f64).ln();

    Ok(log_numerator - log_denominator)
}

/// Picks the ordinate state per the configured rule.
pub fn ordinate_state(chain: &ChainResult, rule: OrdinatePoint) -> Result<ChainState, SelectError> {
    if chain.states.is_empty() {
        return Err(SelectError::EmptyChain);
    }
    let index = match rule {
        OrdinatePoint::HighestPosterior => chain
            .log_likelihoods
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("stored log-likelihoods are finite"))
            .map(|(i, _)| i)
            .expect("nonempty"),
        OrdinatePoint::Last => chain.states.len() - 1,
    };
    let (gamma, delta) = chain.states[index].clone();
    Ok(ChainState {
        gamma,
        delta,
        log_likelihood: chain.log_likelihoods[index],
    })
}

/// Full marginal-likelihood estimate for one chain:
/// `log f(z|w*) + log prior(w*) - log posterior-ordinate(w*)`.
pub fn log_marginal(
    chain: &ChainResult,
    data: &Dataset,
    config: &ChibConfig,
) -> Result<MarginalEstimate, SelectError> {
    let star = ordinate_state(chain, config.ordinate)?;
    let log_ordinate = chib_log_ordinate(chain, &star, data, chain.r, config)?;
    let dim = star.gamma.dim();
    let log_prior = 2.0 * log_uniform_dirichlet(dim);
    let total = chain.states.len();
    let take = config.numerator_samples.unwrap_or(total).min(total).max(1);
    Ok(MarginalEstimate {
        intervals: chain.intervals,
        log_marginal: star.log_likelihood + log_prior - log_ordinate,
        ordinate: (star.gamma, star.delta),
        ordinate_log_likelihood: star.log_likelihood,
        numerator_samples: take,
        denominator_draws: config.denominator_draws,
    })
}

/// Empirical-Bayes selection: the k with the largest log marginal, ties
/// broken toward the smaller (smoother) k.
pub fn select_eb(estimates: &[MarginalEstimate]) -> Result<usize, SelectError> {
    estimates
        .iter()
        .fold(None::<&MarginalEstimate>, |best, e| match best {
            None => Some(e),
            Some(b)
                if e.log_marginal > b.log_marginal
                    || (e.log_marginal == b.log_marginal && e.intervals < b.intervals) =>
            {
                Some(e)
            }
            Some(b) => Some(b),
        })
        .map(|e| e.intervals)
        .ok_or(SelectError::EmptyDomain)
}

/// Hierarchical-Bayes weights: softmax of the log marginals.
pub fn hb_weights(estimates: &[MarginalEstimate]) -> Result<ModelWeights, SelectError> {
    if estimates.is_empty() {
        return Err(SelectError::EmptyDomain);
    }
    let logs: Vec<f64> = estimates.iter().map(|e| e.log_marginal).collect();
    let norm = log_sum_exp(&logs);
    Ok(ModelWeights {
        domain: estimates.iter().map(|e| e.intervals).collect(),
        weights: logs.iter().map(|l| (l - norm).exp()).collect(),
    })
}

/// Pointwise weighted average of per-k curves sampled on a common grid.
pub fn averaged_curve(weights: &ModelWeights, curves: &[Vec<f64>]) -> Result<Vec<f64>, SelectError> {
    if weights.weights.len() != curves.len() {
        return Err(SelectError::MismatchedDomains {
            weights: weights.weights.len(),
            curves: curves.len(),
        });
    }
    let len = curves.first().ok_or(SelectError::EmptyDomain)?.len();
    if curves.iter().any(|c| c.len() != len) {
        return Err(SelectError::RaggedCurves);
    }
    let mut out = vec![0.0; len];
    for (w, curve) in weights.weights.iter().zip(curves) {
        for (acc, v) in out.iter_mut().zip(curve) {
            *acc += w * v;
        }
    }
    Ok(out)
}

/// One fitted resolution: its chain and marginal estimate.
#[derive(Debug, Clone)]
pub struct ResolutionFit {
    pub intervals: usize,
    pub chain: ChainResult,
    pub marginal: MarginalEstimate,
    pub chib_seed: u64,
}

/// Joint fit over a domain of k values.
#[derive(Debug, Clone)]
pub struct DomainFit {
    pub fits: Vec<ResolutionFit>,
    pub weights: ModelWeights,
    pub eb_intervals: usize,
}

impl DomainFit {
    pub fn fit_for(&self, intervals: usize) -> Option<&ResolutionFit> {
        self.fits.iter().find(|f| f.intervals == intervals)
    }

    pub fn eb_fit(&self) -> &ResolutionFit {
        self.fit_for(self.eb_intervals).expect("eb k is in the domain")
    }

    /// Chains paired with their HB weights, in domain order.
    pub fn weighted_chains(&self) -> Vec<(&ChainResult, f64)> {
        self.fits
            .iter()
            .zip(&self.weights.weights)
            .map(|(f, &w)| (&f.chain, w))
            .collect()
    }
}

/// Fit settings for a whole domain.
#[derive(Debug, Clone)]
pub struct FitConfig {
    pub degree: usize,
    pub domain: Vec<usize>,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub proposal: ProposalConfig,
    pub inversion_tol: f64,
    pub ordinate: OrdinatePoint,
    pub chib_numerator_samples: Option<usize>,
    pub chib_denominator_draws: usize,
}

impl FitConfig {
    /// Reference defaults: 20000 iterations, 5000 burn-in, domain
    /// {3..10} for quadratic splines and {5..12} for cubic.
    pub fn new(degree: usize, seed: u64) -> Self {
        let domain = Self::default_domain(degree);
        Self {
            degree,
            domain,
            iterations: 20_000,
            burn_in: 5_000,
            thin: 1,
            seed,
            proposal: ProposalConfig::default(),
            inversion_tol: crate::model::DEFAULT_INVERSION_TOL,
            ordinate: OrdinatePoint::HighestPosterior,
            chib_numerator_samples: None,
            chib_denominator_draws: 5_000,
        }
    }

    pub fn default_domain(degree: usize) -> Vec<usize> {
        if degree == 3 {
            (5..=12).collect()
        } else {
            (3..=10).collect()
        }
    }

    pub fn chain_config(&self, intervals: usize) -> ChainConfig {
        ChainConfig {
            degree: self.degree,
            intervals,
            iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            seed: derive_chain_seed(self.seed, intervals),
            inversion_tol: self.inversion_tol,
        }
    }

    pub fn chib_config(&self, intervals: usize) -> ChibConfig {
        ChibConfig {
            ordinate: self.ordinate,
            numerator_samples: self.chib_numerator_samples,
            denominator_draws: self.chib_denominator_draws,
            seed: derive_chain_seed(self.seed ^ 0x5eed_c41b_0000_0000, intervals),
        }
    }
}

/// Runs one chain per k in the domain (in parallel, with independent RNG
/// streams), estimates each marginal likelihood, and aggregates EB choice
/// plus HB weights.
pub fn fit_domain(data: &Dataset, config: &FitConfig) -> Result<DomainFit, SelectError> {
    if config.domain.is_empty() {
        return Err(SelectError::EmptyDomain);
    }
    let fits: Vec<ResolutionFit> = config
        .domain
        .par_iter()
        .map(|&k| -> Result<ResolutionFit, SelectError> {
            let chain = sampler::run_chain(&config.chain_config(k), &config.proposal, data)
                .map_err(|source| SelectError::ChainFailed {
                    intervals: k,
                    source,
                })?;
            let chib = config.chib_config(k);
            let marginal = log_marginal(&chain, data, &chib)?;
            Ok(ResolutionFit {
                intervals: k,
                chain,
                marginal,
                chib_seed: chib.seed,
            })
        })
        .collect::<Result<_, _>>()?;
    let estimates: Vec<MarginalEstimate> = fits.iter().map(|f| f.marginal.clone()).collect();
    let weights = hb_weights(&estimates)?;
    let eb_intervals = select_eb(&estimates)?;
    Ok(DomainFit {
        fits,
        weights,
        eb_intervals,
    })
}
