use a12::family::GeneratingFamily;
use a12::homogeneous::{
    build_cartan_datum, build_root_space_datum, phi_coefficient, s_curvature_closed,
    s_curvature_oracle, vanishing_criterion, HomogeneousDatum, SubspaceDatum, ORACLE_STEP,
};
use a12::lie::CompactLieAlgebra;
use a12::norm::{random_interior_direction, relative_deviation, DEVIATION_FLOOR};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FAMILIES: [&str; 3] = ["mroot:2", "mroot:3", "phi:1+0.3*s^2"];

fn cartan(n: usize, family: &str, scalars: &[f64]) -> HomogeneousDatum {
    let g = CompactLieAlgebra::su(n).unwrap();
    let fam = GeneratingFamily::parse(family).unwrap();
    build_cartan_datum(&g, &fam, &scalars[..g.real_root_spaces().unwrap().len()]).unwrap()
}

fn direction(d: &HomogeneousDatum, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_interior_direction(&d.decomposition, &mut rng, 0.1)
}

fn max_abs_s(d: &HomogeneousDatum, samples: u64, seed: u64) -> f64 {
    (0..samples)
        .map(|i| {
            s_curvature_closed(d, &direction(d, seed.wrapping_add(i)))
                .unwrap()
                .abs()
        })
        .fold(0.0, f64::max)
}

fn scalars() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.5f64..3.0, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn homogeneity(n in 3usize..5, f in 0..3usize, cs in scalars(), seed in any::<u64>(), lambda in 0.1f64..10.0) {
        let d = cartan(n, FAMILIES[f], &cs);
        let y = direction(&d, seed);
        let ly = &y * lambda;
        let (s, sl) = (s_curvature_closed(&d, &y).unwrap(), s_curvature_closed(&d, &ly).unwrap());
        prop_assert!((sl - lambda * s).abs() <= 1e-7 * (lambda * s).abs().max(1.0));
        let (p, pl) = (phi_coefficient(&d, &y).unwrap(), phi_coefficient(&d, &ly).unwrap());
        prop_assert!((pl * lambda * lambda - p).abs() <= 1e-7 * p.abs().max(1.0));
    }

    #[test]
    fn closed_form_matches_oracle(n in 3usize..5, f in 0..3usize, cs in scalars(), seed in any::<u64>()) {
        let d = cartan(n, FAMILIES[f], &cs);
        let y = direction(&d, seed);
        let c = s_curvature_closed(&d, &y).unwrap();
        let o = s_curvature_oracle(&d, &y, ORACLE_STEP).unwrap();
        prop_assert!(relative_deviation(&[c], &[o], DEVIATION_FLOOR) < 1e-5, "closed {c} oracle {o}");
    }

    #[test]
    fn linear_families_have_zero_s(cs in scalars(), c1 in 0.2f64..5.0, c2 in 0.2f64..5.0, seed in any::<u64>()) {
        let d = cartan(3, &format!("riemannian:{c1:?},{c2:?}"), &cs);
        prop_assert!(max_abs_s(&d, 8, seed) < 1e-10);
    }

    /// Ad-invariance of the bi-invariant form kills both pairings.
    #[test]
    fn bi_invariant_data_satisfy_the_criterion(
        f in 0..3usize,
        raw in prop::collection::vec(-1.0f64..1.0, 24),
        k in 2usize..4,
        seed in any::<u64>(),
    ) {
        let g = CompactLieAlgebra::su(3).unwrap();
        let v2: Vec<DVector<f64>> = raw.chunks(8).take(k).map(DVector::from_column_slice).collect();
        let split = SubspaceDatum::bi_invariant(&g, v2);
        prop_assume!(split.is_ok());
        let fam = GeneratingFamily::parse(FAMILIES[f]).unwrap();
        let d = HomogeneousDatum::new(g, split.unwrap(), &fam, None, "explicit").unwrap();
        prop_assert!(vanishing_criterion(&d).holds);
        prop_assert!(max_abs_s(&d, 8, seed) < 1e-9);
    }

    /// The criterion and sampled S agree on root-space data with mixed
    /// scalars, where it sometimes holds and sometimes fails.
    #[test]
    fn criterion_agrees_with_sampling(
        root in 0usize..3,
        cartan_scale in prop::sample::select(vec![1.0, 2.0]),
        others in prop::collection::vec(prop::sample::select(vec![1.0, 2.0]), 2),
        seed in any::<u64>(),
    ) {
        let g = CompactLieAlgebra::su(3).unwrap();
        let fam = GeneratingFamily::mroot(2).unwrap();
        let d = build_root_space_datum(&g, &fam, root, cartan_scale, &others).unwrap();
        let crit = vanishing_criterion(&d);
        let s = max_abs_s(&d, 64, seed);
        if crit.holds {
            prop_assert!(s < 1e-9, "criterion holds but max |S| = {s}");
        } else {
            prop_assert!(crit.witness.is_some());
            prop_assert!(s > 1e-6, "criterion fails but max |S| = {s}");
        }
    }
}
