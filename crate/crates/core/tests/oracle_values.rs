//! Values computed independently (symbolic differentiation, 50-digit
//! arithmetic, float brute force over root arrangements) and frozen here.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use a12::family::{validate_generating, GeneratingFamily};
use a12::homogeneous::{build_cartan_datum, phi_coefficient};
use a12::lie::CompactLieAlgebra;
use a12::norm::{cartan_tensor, eval_norm, fundamental_tensor, DatumDecomposition};
use a12::roots::{minimizing_line_pairs, RootSystem};
use approx::assert_relative_eq;
use nalgebra::DVector;

#[test]
fn mroot2_tensor_entries() {
    let fam = GeneratingFamily::mroot(2).unwrap();
    let d = DatumDecomposition::new(4, 2).unwrap();
    let y = DVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let g = fundamental_tensor(&fam, &d, &y).unwrap().g;
    assert_relative_eq!(g[(0, 0)], 1.0 + SQRT_2, max_relative = 1e-13);
    assert_relative_eq!(g[(0, 5)], -FRAC_1_SQRT_2, max_relative = 1e-13);
    let c = cartan_tensor(&fam, &d, &y).unwrap().c;
    assert_relative_eq!(
        c.get(1, 1, 0),
        0.353_553_390_593_273_8,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        eval_norm(&fam, &d, &y).unwrap(),
        1.847_759_065_022_573_5,
        max_relative = 1e-14
    );
}

#[test]
fn phi_on_the_su3_cartan_datum() {
    let g = CompactLieAlgebra::su(3).unwrap();
    let d = build_cartan_datum(&g, &GeneratingFamily::mroot(2).unwrap(), &[]).unwrap();
    let mut y = DVector::zeros(8);
    y[0] = FRAC_1_SQRT_2;
    y[6] = FRAC_1_SQRT_2;
    assert_relative_eq!(
        phi_coefficient(&d, &y).unwrap(),
        2.123_273_572_878_914,
        max_relative = 1e-10
    );
}

#[test]
fn validity_margins() {
    let r = validate_generating(&GeneratingFamily::parse("phi:1-0.9*s^2").unwrap(), 201).unwrap();
    assert!(!r.valid);
    assert_relative_eq!(r.min_margin, -0.8, max_relative = 1e-12);
    assert_eq!(r.argmin, (0.0, 1.0));
    let p = GeneratingFamily::parse("phi:sqrt(1+s^2)").unwrap().phi(1.0);
    assert_relative_eq!(p.margin(1.0, 1.0), FRAC_1_SQRT_2, max_relative = 1e-13);
}

#[test]
fn brute_force_minimum_counts() {
    for (t, expected) in [
        ("A2", 2),
        ("A3", 2),
        ("B2", 4),
        ("B3", 4),
        ("C3", 4),
        ("D4", 4),
        ("G2", 8),
        ("F4", 16),
    ] {
        let (min, _) = minimizing_line_pairs(&RootSystem::parse(t).unwrap()).unwrap();
        assert_eq!(min, expected, "{t}");
    }
}
