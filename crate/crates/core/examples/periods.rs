//! Periods of single fibers, and the monodromy of the period lattice around
//! an I1 fiber.

use k3c_core::weierstrass::periods::fiber_periods;
use k3c_core::weierstrass::{loop_monodromy, Chart, DensityField, WeierstrassFamily};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (a, b) in [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.3)] {
        let p = fiber_periods(Complex64::new(a, 0.0), Complex64::new(b, 0.0))?;
        println!(
            "a = {a}, b = {b}: tau = {:.6}, rho = {:.6}, j mismatch {:.1e}",
            p.tau,
            p.density(),
            p.j_mismatch
        );
    }

    let mut b = vec![0.0; 13];
    b[0] = -1.0;
    b[12] = 1.0;
    let f = WeierstrassFamily::from_real(&[0.5], &b)?;
    let field = DensityField::new(&f)?;
    let zs = field.punctures(Chart::Z);
    let gap = zs[1..]
        .iter()
        .map(|z| (z - zs[0]).norm())
        .fold(f64::INFINITY, f64::min);
    let lm = loop_monodromy(&field, Chart::Z, zs[0], 0.4 * gap)?;
    println!(
        "loop around {:.4}: T = {:?}, trace {}, deviation {:.1e}",
        zs[0],
        lm.matrix,
        lm.trace(),
        lm.deviation
    );
    Ok(())
}
