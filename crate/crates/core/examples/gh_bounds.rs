//! Gromov-Hausdorff bounds between small metric spaces.

use k3c_core::metric::{gh_lower, gh_upper, segment_space, FlatTorus, GhOptions, TorusGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = GhOptions::default();
    let s2 = segment_space(2)?;
    let s3 = segment_space(3)?;
    println!(
        "seg2 vs seg3: [{}, {}]",
        gh_lower(&s2, &s3),
        gh_upper(&s2, &s3, &opts)
    );

    let circle = TorusGrid::new(&FlatTorus::identity(1)?, 16)?.space()?;
    let folded = TorusGrid::new(&FlatTorus::identity(1)?, 16)?.quotient_space()?;
    let s9 = segment_space(9)?.scaled(0.5);
    println!(
        "circle vs segment: [{:.4}, {:.4}]",
        gh_lower(&circle, &s9),
        gh_upper(&circle, &s9, &opts)
    );
    println!(
        "folded circle vs segment: [{:.4}, {:.4}]",
        gh_lower(&folded, &s9),
        gh_upper(&folded, &s9, &opts)
    );
    Ok(())
}
