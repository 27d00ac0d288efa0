//! Flat tori and their quotients by the involution x -> -x.

use k3c_core::metric::{FlatTorus, TorusGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circle = TorusGrid::new(&FlatTorus::identity(1)?, 16)?;
    println!(
        "circle: diameter {}, mod -1 {}",
        circle.diameter(),
        circle.quotient_diameter()
    );

    let square = TorusGrid::new(&FlatTorus::identity(2)?, 16)?;
    println!(
        "square torus: diameter {:.6}, mod -1 {:.6}",
        square.diameter(),
        square.quotient_diameter()
    );

    let hex = FlatTorus::new(vec![vec![1.0, 0.5], vec![0.5, 1.0]])?;
    let grid = TorusGrid::new(&hex, 12)?;
    let q = grid.quotient_space()?;
    println!(
        "hexagonal torus: {} points, quotient has {} points, diameter {:.6}",
        grid.n(),
        q.n(),
        q.diameter()
    );

    let kummer = TorusGrid::new(&FlatTorus::identity(4)?, 16)?;
    println!(
        "4-torus with 16 samples per axis: {} points, {} orbits, d(0, p) = {:.6}",
        kummer.n(),
        kummer.quotient_representatives().len(),
        kummer.quotient_distance(0, kummer.n() - 1)
    );
    Ok(())
}
