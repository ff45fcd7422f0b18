//! End-to-end pipeline checks that cut across modules: model selection on
//! simulated data, Chib-estimator stability, posterior preservation of the
//! MH kernel, and band sizes against the reference protocol.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqreg::bands::{self, TauGrid};
use sqreg::model::{LikelihoodEvaluator, SimplexVector};
use sqreg::model_select::{self, ChibConfig, FitConfig, OrdinatePoint};
use sqreg::sampler::{self, ChainConfig, ChainState, ProposalConfig};
use sqreg::simgen::TruthSpec;
use sqreg::splines::SplineBasis;

fn quick_fit_config(seed: u64) -> FitConfig {
    let mut config = FitConfig::new(2, seed);
    config.domain = (3..=6).collect();
    config.iterations = 6_000;
    config.burn_in = 2_000;
    config.chib_denominator_draws = 1_000;
    config
}

#[test]
fn hb_weights_sum_to_one_and_curves_monotone() {
    let data = TruthSpec::study1_default().generate(100, 21).unwrap();
    let fit = model_select::fit_domain(&data, &quick_fit_config(21)).unwrap();
    let total: f64 = fit.weights.weights.iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    let grid = TauGrid::standard();
    for which in [1, 2] {
        let curve = bands::mean_xi_curve(&fit.weighted_chains(), which, &grid);
        assert!(curve.windows(2).all(|w| w[1] >= w[0]));
        assert!(curve[0].abs() < 1e-10 && (curve[100] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn singleton_domain_makes_eb_equal_hb() {
    let data = TruthSpec::study1_default().generate(60, 22).unwrap();
    let mut config = quick_fit_config(22);
    config.domain = vec![4];
    let fit = model_select::fit_domain(&data, &config).unwrap();
    assert_eq!(fit.eb_intervals, 4);
    assert_eq!(fit.weights.weights, vec![1.0]);
    let grid = TauGrid::standard();
    let eb = bands::mean_quantile_curve(&[(&fit.eb_fit().chain, 1.0)], 0.4, &grid);
    let hb = bands::mean_quantile_curve(&fit.weighted_chains(), 0.4, &grid);
    assert_eq!(eb, hb);
}

#[test]
fn chib_estimate_stable_across_ordinate_points_and_seeds() {
    // toy model: invariance of the marginal-likelihood estimate to the
    // anchor chosen among high-posterior stored samples, and to the
    // denominator seed
    let data = TruthSpec::study1_default().generate(20, 404).unwrap();
    let mut config = ChainConfig::new(2, 1, 23);
    config.iterations = 20_000;
    config.burn_in = 5_000;
    let chain = sampler::run_chain(&config, &ProposalConfig::default(), &data).unwrap();

    let chib = ChibConfig {
        ordinate: OrdinatePoint::HighestPosterior,
        numerator_samples: Some(5_000),
        denominator_draws: 5_000,
        seed: 1,
    };
    let reference = model_select::log_marginal(&chain, &data, &chib).unwrap();

    // anchors drawn from the top decile of stored log-posterior values
    let mut ranked: Vec<usize> = (0..chain.stored_len()).collect();
    ranked.sort_by(|&a, &b| {
        chain.log_likelihoods[b]
            .partial_cmp(&chain.log_likelihoods[a])
            .unwrap()
    });
    let top = &ranked[..chain.stored_len() / 10];
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let dim = SplineBasis::new(2, 1).unwrap().spacing_dim();
    let log_prior = 2.0 * model_select::log_uniform_dirichlet(dim);
    for _ in 0..3 {
        let index = top[rng.gen_range(0..top.len())];
        let (gamma, delta) = chain.states[index].clone();
        let star = ChainState {
            gamma,
            delta,
            log_likelihood: chain.log_likelihoods[index],
        };
        let ordinate =
            model_select::chib_log_ordinate(&chain, &star, &data, chain.r, &chib).unwrap();
        let log_marginal = star.log_likelihood + log_prior - ordinate;
        assert!(
            (log_marginal - reference.log_marginal).abs() <= 0.2,
            "anchor at index {index}: {log_marginal} vs {}",
            reference.log_marginal
        );
    }

    // repeated-run stability on a study-scale chain (k = 6, n = 100)
    let data = TruthSpec::study1_default().generate(100, 25).unwrap();
    let mut config = ChainConfig::new(2, 6, 25);
    config.iterations = 20_000;
    config.burn_in = 5_000;
    let chain = sampler::run_chain(&config, &ProposalConfig::default(), &data).unwrap();
    let estimates: Vec<f64> = [11u64, 12, 13]
        .iter()
        .map(|&seed| {
            let chib = ChibConfig {
                ordinate: OrdinatePoint::HighestPosterior,
                numerator_samples: Some(5_000),
                denominator_draws: 5_000,
                seed,
            };
            model_select::log_marginal(&chain, &data, &chib)
                .unwrap()
                .log_marginal
        })
        .collect();
    for pair in estimates.windows(2) {
        assert!(
            (pair[1] - pair[0]).abs() <= 0.3,
            "chib seed instability: {estimates:?}"
        );
    }
    assert!(estimates.iter().all(|e| e.is_finite()));
}

#[test]
fn mh_kernel_preserves_toy_posterior_in_total_variation() {
    // chain histogram of gamma_1 vs the grid posterior, TV < 0.05
    let data = TruthSpec::study1_default().generate(20, 404).unwrap();
    let basis = SplineBasis::new(2, 1).unwrap();
    let mut evaluator = LikelihoodEvaluator::new(basis, 1e-10);

    let bins = 50usize;
    // grid posterior marginal of gamma_1, midpoint rule
    let n = 500usize;
    let h = 1.0 / n as f64;
    let mut joint = vec![vec![0.0f64; n]; n];
    let mut max_ll = f64::NEG_INFINITY;
    for i in 0..n {
        let g1 = (i as f64 + 0.5) * h;
        let gamma = SimplexVector::new(vec![g1, 1.0 - g1]).unwrap();
        for j in 0..n {
            let d1 = (j as f64 + 0.5) * h;
            let delta = SimplexVector::new(vec![d1, 1.0 - d1]).unwrap();
            let ll = evaluator.log_likelihood(&data, &gamma, &delta);
            joint[i][j] = ll;
            max_ll = max_ll.max(ll);
        }
    }
    let mut marginal = vec![0.0f64; bins];
    let mut total = 0.0;
    for (i, row) in joint.iter().enumerate() {
        let mass: f64 = row.iter().map(|&ll| (ll - max_ll).exp()).sum();
        let bin = (i * bins) / n;
        marginal[bin] += mass;
        total += mass;
    }
    for m in &mut marginal {
        *m /= total;
    }

    let mut config = ChainConfig::new(2, 1, 26);
    config.iterations = 1_000_000;
    config.burn_in = 100_000;
    let chain = sampler::run_chain(&config, &ProposalConfig::default(), &data).unwrap();
    let mut empirical = vec![0.0f64; bins];
    for (gamma, _) in &chain.states {
        let bin = ((gamma.as_slice()[0] * bins as f64) as usize).min(bins - 1);
        empirical[bin] += 1.0;
    }
    for e in &mut empirical {
        *e /= chain.stored_len() as f64;
    }
    let tv: f64 = marginal
        .iter()
        .zip(&empirical)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.05, "total variation distance {tv:.4}");
}

#[test]
fn study1_band_size_close_to_reference() {
    // HB inflated radius at x = 0.5 for n = 100 lands near 0.17
    let data = TruthSpec::study1_default().generate(100, 27).unwrap();
    let fit = model_select::fit_domain(&data, &quick_fit_config(27)).unwrap();
    let grid = TauGrid::standard();
    let band = bands::band(&fit.weighted_chains(), 0.5, &grid, 0.95, data.len()).unwrap();
    assert!(
        (0.12..=0.23).contains(&band.inflated_radius),
        "inflated radius {}",
        band.inflated_radius
    );
    assert!(band.inflated_radius > band.radius);
}

#[test]
fn coverage_experiment_counts_replications() {
    let mut fit = quick_fit_config(28);
    fit.domain = vec![3, 4];
    fit.iterations = 800;
    fit.burn_in = 400;
    fit.chib_denominator_draws = 200;
    let report = bands::coverage_experiment(
        &TruthSpec::study1_default(),
        30,
        2,
        bands::Method::Eb,
        &[0.3, 0.7],
        &fit,
        0.95,
        29,
    )
    .unwrap();
    assert_eq!(report.replications, 2);
    assert_eq!(report.per_x.len(), 2);
    for at_x in &report.per_x {
        assert!((0.0..=1.0).contains(&at_x.raw_coverage));
        assert!(at_x.inflated_coverage >= at_x.raw_coverage);
    }
}

#[test]
fn density_normalization_via_solved_taus() {
    // f(y|x) integrates to 1 when evaluated through the full solve path
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let basis = SplineBasis::new(2, 5).unwrap();
    let dim = basis.spacing_dim();
    let raw: Vec<f64> = (0..dim).map(|_| -rng.gen::<f64>().ln()).collect();
    let gamma = SimplexVector::from_unnormalized(raw).unwrap();
    let raw: Vec<f64> = (0..dim).map(|_| -rng.gen::<f64>().ln()).collect();
    let delta = SimplexVector::from_unnormalized(raw).unwrap();
    let model = sqreg::QuantileModel::new(basis, gamma, delta)
        .unwrap()
        .with_inversion_tol(1e-10);
    let x = 0.37;
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=1000 {
        let tau = i as f64 / 1000.0;
        let y = model.quantile(tau, x).unwrap();
        let solved = model.solve_tau(x, y).unwrap();
        let f = 1.0 / model.quantile_density(solved, x);
        if let Some((y0, f0)) = prev {
            integral += 0.5 * (y - y0) * (f + f0);
        }
        prev = Some((y, f));
    }
    assert!((integral - 1.0).abs() < 1e-3, "integral {integral}");
}
