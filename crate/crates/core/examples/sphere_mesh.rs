//! Landmark distances on the tropical K3 sphere of a generic family at
//! increasing grid resolutions.

use k3c_core::weierstrass::{mesh_metric, WeierstrassFamily};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = WeierstrassFamily::from_real(
        &[0.3, -0.7, 0.1, 0.9, -0.2, 0.4, 0.6, -0.5, 0.8],
        &[
            -0.4, 0.2, 0.7, -0.9, 0.1, 0.5, -0.3, 0.6, 0.2, -0.8, 0.4, 0.1, 0.9,
        ],
    )?;
    for res in [25, 50, 100] {
        let mesh = mesh_metric(&f, res, 1e-3)?;
        println!(
            "N = {res}: {} nodes, {} edges, raw diameter {:.5}",
            mesh.nodes, mesh.edges, mesh.raw_diameter
        );
    }
    Ok(())
}
