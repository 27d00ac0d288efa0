//! Singular fibers of a few Weierstrass families.

use k3c_core::weierstrass::{euler_sum, singular_fibers, WeierstrassFamily};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut b_cusp = vec![0.0; 13];
    b_cusp[1] = -1.0;
    b_cusp[12] = 1.0;
    let mut a_tacnode = vec![0.0; 9];
    a_tacnode[1] = -1.0;
    a_tacnode[8] = 1.0;
    let generic = WeierstrassFamily::from_real(
        &[0.3, -0.7, 0.1, 0.9, -0.2, 0.4, 0.6, -0.5, 0.8],
        &[
            -0.4, 0.2, 0.7, -0.9, 0.1, 0.5, -0.3, 0.6, 0.2, -0.8, 0.4, 0.1, 0.9,
        ],
    )?;
    let families = [
        ("generic", generic),
        (
            "A = 0, B = z(z^11 - 1)",
            WeierstrassFamily::from_real(&[], &b_cusp)?,
        ),
        (
            "A = z(z^7 - 1), B = 0",
            WeierstrassFamily::from_real(&a_tacnode, &[])?,
        ),
    ];
    for (name, f) in families {
        let fibers = singular_fibers(&f)?;
        let mut counts = std::collections::BTreeMap::new();
        for s in &fibers {
            *counts.entry(s.kodaira_type.to_string()).or_insert(0) += 1;
        }
        println!("{name}: {counts:?}, euler sum {}", euler_sum(&fibers));
    }
    Ok(())
}
