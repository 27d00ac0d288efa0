//! Classifies three monodromy operators on the K3 lattice by the nilpotent
//! order of their logarithm.

use k3c_core::lattice::{build_k3_lattice, eichler_transvection, LatticeVector, K3_FIRST_U};
use k3c_core::period_domain::{
    classify_degeneration, limit_boundary_stratum, monodromy_log, DEFAULT_M_MAX,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k3 = build_k3_lattice();
    let unit = |i: usize| {
        let mut v = vec![0i64; 22];
        v[i] = 1;
        v
    };
    let u = K3_FIRST_U;
    let e = LatticeVector(unit(u));
    let mut x = unit(u + 2);
    x[u + 3] = 1;
    let operators = [
        ("identity", (0..22).map(unit).collect::<Vec<_>>()),
        (
            "transvection by an isotropic vector",
            eichler_transvection(&k3, &e, &LatticeVector(unit(u + 2)))?,
        ),
        (
            "transvection by a vector of norm 2",
            eichler_transvection(&k3, &e, &LatticeVector(x))?,
        ),
    ];
    for (name, t) in operators {
        let md = monodromy_log(&t, &k3, DEFAULT_M_MAX)?;
        let kind = classify_degeneration(&md)?;
        print!("{name}: {kind:?}");
        match limit_boundary_stratum(&md, &k3) {
            Ok(s) => println!(", stratum {:?} spanned by {:?}", s.kind, s.generators),
            Err(_) => println!(", interior limit"),
        }
    }
    Ok(())
}
