//! Limit metric spaces for each kind of collapse input.

use k3c_core::collapse::{phi, CollapseInput};
use k3c_core::metric::FlatTorus;
use k3c_core::weierstrass::WeierstrassFamily;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = WeierstrassFamily::from_real(
        &[0.3, -0.7, 0.1, 0.9, -0.2, 0.4, 0.6, -0.5, 0.8],
        &[
            -0.4, 0.2, 0.7, -0.9, 0.1, 0.5, -0.3, 0.6, 0.2, -0.8, 0.4, 0.1, 0.9,
        ],
    )?;
    let inputs = [
        CollapseInput::BoundaryPoint,
        CollapseInput::BoundaryLine {
            family,
            boundary: None,
        },
        CollapseInput::DeepStratumTorus {
            torus: FlatTorus::new(vec![vec![1.0, 0.2], vec![0.2, 1.5]])?,
            samples: Some(12),
        },
        CollapseInput::KummerInterior {
            torus: FlatTorus::identity(4)?,
            samples: Some(6),
        },
    ];
    for input in &inputs {
        let m = phi(input, 60, 1e-3)?;
        println!(
            "{}: {} points, diameter {}",
            input.variant(),
            m.n(),
            m.diameter()
        );
    }
    Ok(())
}
