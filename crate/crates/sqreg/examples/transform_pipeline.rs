//! Full real-data-style pipeline on a synthetic hurricane-like table:
//! map years and wind speeds onto the unit square, fit, then report wind
//! speeds back on the raw scale at chosen quantiles.
//!
//! ```bash
//! cargo run --release --example transform_pipeline
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqreg::bands::TauGrid;
use sqreg::model::Dataset;
use sqreg::model_select::{fit_domain, FitConfig};
use sqreg::transforms::{pareto_quantile, Direction, UnitTransform};

fn main() {
    // synthetic raw table: speeds drift upward at high quantiles over time
    let (a, sigma, k) = (0.45, 52.0, 4.9);
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    let mut years = Vec::new();
    let mut speeds = Vec::new();
    for _ in 0..250 {
        let year = 1981.0 + 25.0 * rng.gen::<f64>();
        let u: f64 = rng.gen();
        // lift the upper quantiles for late years
        let x = (year - 1981.0) / 25.0;
        let q = ((1.0 - x) * u + x * u.powf(0.7)).clamp(1e-9, 1.0 - 1e-9);
        years.push(year);
        speeds.push(pareto_quantile(q, a, sigma, k).unwrap());
    }

    let year_map = UnitTransform::Linear {
        lo: 1981.0,
        hi: 2006.0,
    };
    let speed_map = UnitTransform::PowerPareto { a, sigma, k };
    let xs = year_map.apply(&years, Direction::Forward).unwrap();
    let ys = speed_map.apply(&speeds, Direction::Forward).unwrap();
    let data = Dataset::new(xs, ys).unwrap();

    let mut config = FitConfig::new(2, 314);
    config.domain = (3..=6).collect();
    config.iterations = 6_000;
    config.burn_in = 2_000;
    config.chib_denominator_draws = 1_000;
    let fit = fit_domain(&data, &config).unwrap();
    let chains = fit.weighted_chains();
    let grid = TauGrid::standard();

    println!("estimated wind speed by year and quantile:");
    println!("  year   tau=0.50  tau=0.90  tau=0.95");
    for year in [1981.0, 1991.0, 2001.0, 2006.0] {
        let x = year_map.forward(year).unwrap();
        let curve = sqreg::bands::mean_quantile_curve(&chains, x, &grid);
        let mut row = format!("  {year:.0}  ");
        for grid_index in [50usize, 90, 95] {
            let unit = curve[grid_index].clamp(1e-12, 1.0 - 1e-12);
            let speed = speed_map.inverse(unit).unwrap();
            row.push_str(&format!("  {speed:8.2}"));
        }
        println!("{row}");
    }
}
