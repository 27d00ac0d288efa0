//! Exploratory: a family whose fibers split into two clusters, compared with
//! the unit segment as eps shrinks.

use k3c_core::collapse::type2_limit_probe;
use k3c_core::metric::GhOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = GhOptions {
        iterations: 20,
        seed: 0,
    };
    for s in type2_limit_probe(&[0.6, 0.4, 0.2], 50, 1e-3, 33, &opts)? {
        println!(
            "eps = {}: raw diameter {:.4}, GH to segment in [{:.4}, {:.4}]",
            s.eps, s.raw_diameter, s.gh_lower, s.gh_upper
        );
    }
    Ok(())
}
