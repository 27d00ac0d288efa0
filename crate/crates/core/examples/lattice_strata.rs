//! Signatures of the K3 and polarized lattices, and the boundary components
//! attached to an isotropic line and an isotropic plane.

use k3c_core::lattice::{
    build_k3_lattice, build_polarized_lattice, LatticeVector, RationalSubspace, K3_FIRST_U,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k3 = build_k3_lattice();
    let s = k3.signature()?;
    println!(
        "K3: rank {}, signature ({}, {}), det {}",
        k3.rank(),
        s.positive,
        s.negative,
        k3.determinant()
    );

    let pol = build_polarized_lattice(1)?;
    let s = pol.lattice.signature()?;
    println!(
        "degree 2: rank {}, signature ({}, {})",
        pol.lattice.rank(),
        s.positive,
        s.negative
    );

    // e from the second U block, f from the third
    let ambient = |i: usize| {
        let mut v = vec![0i64; 22];
        v[K3_FIRST_U + i] = 1;
        LatticeVector(v)
    };
    let e = pol.from_ambient(&ambient(2))?;
    let q = pol.lattice.quotient_by_isotropic(&e)?;
    let s = q.lattice.signature()?;
    println!(
        "e^perp/e: rank {}, signature ({}, {})",
        q.lattice.rank(),
        s.positive,
        s.negative
    );

    let f = pol.from_ambient(&ambient(4))?;
    for rows in [vec![e.0.clone()], vec![e.0.clone(), f.0.clone()]] {
        let d = pol
            .lattice
            .classify_boundary(&RationalSubspace::from_integer_rows(&rows)?)?;
        println!(
            "{:?} stratum, divisibility {}",
            d.kind, d.invariants.divisibility
        );
    }
    Ok(())
}
