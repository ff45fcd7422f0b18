//! Draw synthetic datasets from the two simulation-study truths and write
//! them as CSV.
//!
//! ```bash
//! cargo run --example simulate_data
//! ```

use sqreg::simgen::{Curve, TruthSpec};

fn main() {
    for (name, truth) in [
        ("study1", TruthSpec::study1_default()),
        ("study2", TruthSpec::Study2),
    ] {
        let data = truth.generate(200, 42).unwrap();
        let path = std::env::temp_dir().join(format!("sqreg_{name}.csv"));
        sqreg::io::write_dataset(&path, &data).unwrap();

        let mean_y: f64 = data.ys().iter().sum::<f64>() / data.len() as f64;
        println!(
            "{name}: wrote {} rows to {} (mean y = {mean_y:.3})",
            data.len(),
            path.display()
        );
        for tau in [0.25, 0.5, 0.75] {
            println!(
                "  true xi1({tau}) = {:.4}, xi2({tau}) = {:.4}, Q({tau}|0.5) = {:.4}",
                truth.xi(Curve::Xi1, tau),
                truth.xi(Curve::Xi2, tau),
                truth.qrf(tau, 0.5)
            );
        }
    }
}
