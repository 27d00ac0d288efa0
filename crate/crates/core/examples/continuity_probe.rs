//! Same-carrier distances along a path of families, with a refinement check.

use k3c_core::collapse::{interpolation_probe, CollapseInput};
use k3c_core::weierstrass::WeierstrassFamily;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = WeierstrassFamily::from_real(
        &[0.3, -0.7, 0.1, 0.9, -0.2, 0.4, 0.6, -0.5, 0.8],
        &[
            -0.4, 0.2, 0.7, -0.9, 0.1, 0.5, -0.3, 0.6, 0.2, -0.8, 0.4, 0.1, 0.9,
        ],
    )?;
    let b = WeierstrassFamily::from_real(
        &[-0.5, 0.2, 0.8, -0.1, 0.6, -0.9, 0.3, 0.4, -0.7],
        &[
            0.6, -0.3, 0.1, 0.5, -0.8, 0.2, 0.9, -0.4, 0.7, 0.3, -0.6, 0.5, -0.2,
        ],
    )?;
    let from = CollapseInput::BoundaryLine {
        family: a,
        boundary: None,
    };
    let to = CollapseInput::BoundaryLine {
        family: b,
        boundary: None,
    };
    let report = interpolation_probe(&from, &to, 5, 60, 1e-3)?;
    for (t, d) in report.steps.iter().zip(&report.distances) {
        println!("t = {t:.2}: step distance {d:.5}");
    }
    if let Some(r) = report.refinement {
        println!("refined steps {:?}, monotone {}", r.fine, r.monotone);
    }
    Ok(())
}
