//! Acceptance criteria 1–8 at their pinned tolerances. Prints one line per
//! criterion and exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use a12::family::{validate_generating, GeneratingFamily, IDENTITY_TOL};
use a12::homogeneous::{
    build_cartan_datum, build_perturbed_datum, phi_coefficient, s_curvature_closed,
    s_curvature_sweep, vanishing_criterion, HomogeneousDatum,
};
use a12::kvfcl::{classify_candidate, length_deviation, CandidateClass, KillingCandidate};
use a12::lie::CompactLieAlgebra;
use a12::norm::{
    cartan_tensor, fundamental_tensor, hessian_fd_oracle, is_riemannian, mean_torsion_fd,
    random_interior_direction, relative_deviation, DatumDecomposition, DEVIATION_FLOOR,
};
use a12::roots::{
    assertion_scan, bracket_dim_crosscheck, minimizing_line_pairs, singleton_pattern, RootSystem,
    Strategy,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fam(spec: &str) -> GeneratingFamily {
    GeneratingFamily::parse(spec).unwrap()
}

fn su3() -> CompactLieAlgebra {
    CompactLieAlgebra::su(3).unwrap()
}

fn norm_validity() -> Check {
    let start = Instant::now();
    for spec in ["phi:1", "phi:sqrt(1+s^2)", "mroot:2", "mroot:3"] {
        let r = validate_generating(&fam(spec), 201).map_err(|e| e.to_string())?;
        ensure(r.valid, format!("{spec} rejected, margin {}", r.min_margin))?;
        ensure(
            r.identity_residual < IDENTITY_TOL,
            format!("{spec} identity residual {:e}", r.identity_residual),
        )?;
    }
    let r = validate_generating(&fam("phi:1-0.9*s^2"), 201).map_err(|e| e.to_string())?;
    ensure(!r.valid, "1-0.9s^2 accepted")?;
    ensure(
        (r.min_margin + 0.8).abs() < 1e-12,
        format!("margin {}", r.min_margin),
    )?;
    ensure(r.argmin.0 == 0.0, format!("argmin {:?}", r.argmin))?;
    ensure(
        r.identity_residual < IDENTITY_TOL,
        format!("identity residual {:e}", r.identity_residual),
    )?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, format!("took {secs:.2}s"))?;
    Ok(format!(
        "margin {} at (s,b)={:?}, {secs:.2}s",
        r.min_margin, r.argmin
    ))
}

const TENSOR_FAMILIES: [&str; 3] = ["mroot:2", "mroot:3", "phi:1+0.3*s^2"];
const SPLITS: [(usize, usize); 3] = [(2, 2), (4, 2), (5, 3)];

fn tensor_oracles() -> Check {
    let start = Instant::now();
    let (mut dg, mut di) = (0.0f64, 0.0f64);
    for spec in TENSOR_FAMILIES {
        let f = fam(spec);
        for (n1, n2) in SPLITS {
            let d = DatumDecomposition::new(n1, n2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..100 {
                let y = random_interior_direction(&d, &mut rng, 0.1);
                let g = fundamental_tensor(&f, &d, &y).map_err(|e| e.to_string())?;
                let fd = hessian_fd_oracle(&f, &d, &y, 1e-5).map_err(|e| e.to_string())?;
                dg = dg.max(relative_deviation(g.g.iter(), fd.g.iter(), DEVIATION_FLOOR));
                let i = cartan_tensor(&f, &d, &y)
                    .map_err(|e| e.to_string())?
                    .mean_torsion
                    .unwrap();
                let ifd = mean_torsion_fd(&f, &d, &y, 1e-5).map_err(|e| e.to_string())?;
                di = di.max(relative_deviation(i.iter(), ifd.iter(), DEVIATION_FLOOR));
            }
        }
    }
    ensure(dg < 1e-6 && di < 1e-6, format!("g {dg:e}, I {di:e}"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, format!("took {secs:.1}s"))?;
    Ok(format!(
        "max rel deviation g {dg:.1e}, I {di:.1e}, {secs:.2}s"
    ))
}

fn cartan_structure() -> Check {
    let (mut sym, mut contr) = (0.0f64, 0.0f64);
    for spec in TENSOR_FAMILIES {
        let f = fam(spec);
        for (n1, n2) in SPLITS {
            let d = DatumDecomposition::new(n1, n2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for _ in 0..100 {
                let y = random_interior_direction(&d, &mut rng, 0.1);
                let c = cartan_tensor(&f, &d, &y).map_err(|e| e.to_string())?.c;
                sym = sym.max(c.symmetry_residual());
                contr = contr.max(c.contract_last(&y).amax());
            }
        }
    }
    ensure(
        sym < 1e-10 && contr < 1e-10,
        format!("symmetry {sym:e}, contraction {contr:e}"),
    )?;
    // F² = u + 2v for φ = √(1+s²), so that profile is linear in (u, v).
    let shipped = [
        ("phi:1", true),
        ("riemannian:1,3", true),
        ("phi:sqrt(1+s^2)", true),
        ("mroot:2", false),
        ("mroot:3", false),
        ("phi:1+0.3*s^2", false),
    ];
    let d = DatumDecomposition::new(4, 2).unwrap();
    for (spec, linear) in shipped {
        let r = is_riemannian(&fam(spec), &d, 20, 0).map_err(|e| e.to_string())?;
        ensure(r == linear, format!("is_riemannian({spec}) = {r}"))?;
    }
    Ok(format!(
        "symmetry {sym:.1e}, contraction {contr:.1e}, is_riemannian matches on 6 families"
    ))
}

fn data() -> (HomogeneousDatum, HomogeneousDatum) {
    let f = GeneratingFamily::mroot(2).unwrap();
    (
        build_cartan_datum(&su3(), &f, &[]).unwrap(),
        build_perturbed_datum(&su3(), &f).unwrap(),
    )
}

fn s_curvature_formula() -> Check {
    let start = Instant::now();
    let (cartan, perturbed) = data();
    let mut dev = 0.0f64;
    let mut hom = 0.0f64;
    for d in [&cartan, &perturbed] {
        let sweep = s_curvature_sweep(d, 100, 0).map_err(|e| e.to_string())?;
        dev = dev.max(sweep.max_rel_deviation);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 0..100 {
            let y = random_interior_direction(&d.decomposition, &mut rng, 0.1);
            let lambda = [0.25, 3.0, 17.0][k % 3];
            let ly = &y * lambda;
            let (s, sl) = (
                s_curvature_closed(d, &y).unwrap(),
                s_curvature_closed(d, &ly).unwrap(),
            );
            let (p, pl) = (
                phi_coefficient(d, &y).unwrap(),
                phi_coefficient(d, &ly).unwrap(),
            );
            hom = hom.max((sl - lambda * s).abs() / (lambda * s).abs().max(1.0));
            hom = hom.max((pl * lambda * lambda - p).abs() / p.abs().max(1.0));
        }
    }
    ensure(dev < 1e-5, format!("closed vs oracle {dev:e}"))?;
    ensure(hom < 1e-7, format!("homogeneity {hom:e}"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, format!("took {secs:.1}s"))?;
    Ok(format!(
        "closed vs oracle {dev:.1e}, homogeneity {hom:.1e}, {secs:.2}s"
    ))
}

fn vanishing() -> Check {
    let (cartan, perturbed) = data();
    let c = vanishing_criterion(&cartan);
    ensure(c.holds, "criterion fails on the Cartan datum")?;
    let s = s_curvature_sweep(&cartan, 200, 0).map_err(|e| e.to_string())?;
    ensure(
        s.max_abs_s_oracle < 1e-8,
        format!("Cartan max |S_oracle| {:e}", s.max_abs_s_oracle),
    )?;
    let p = vanishing_criterion(&perturbed);
    ensure(
        !p.holds && p.witness.is_some(),
        "perturbed datum has no witness",
    )?;
    let sp = s_curvature_sweep(&perturbed, 200, 0).map_err(|e| e.to_string())?;
    ensure(
        sp.max_abs_s_closed > 1e-3,
        format!("perturbed max |S_closed| {:e}", sp.max_abs_s_closed),
    )?;
    let w = p.witness.unwrap();
    Ok(format!(
        "Cartan max |S_oracle| {:.1e}; perturbed witness {:?}={:.3}, max |S_closed| {:.3}",
        s.max_abs_s_oracle, w.pairing, w.value, sp.max_abs_s_closed
    ))
}

fn key_lemma() -> Check {
    let start = Instant::now();
    let mut mins = Vec::new();
    for t in ["B2", "B3", "B4", "C3", "D4", "G2", "F4"] {
        let r = assertion_scan(
            &RootSystem::parse(t).unwrap(),
            Strategy::ExhaustiveDirections,
        )
        .map_err(|e| e.to_string())?;
        ensure(
            r.min_count >= 4 && r.pass,
            format!("{t}: min {}", r.min_count),
        )?;
        mins.push(format!("{t}={}", r.min_count));
    }
    for t in ["E6", "E7", "E8"] {
        let r = assertion_scan(
            &RootSystem::parse(t).unwrap(),
            Strategy::Random {
                samples: 100_000,
                seed: 0,
            },
        )
        .map_err(|e| e.to_string())?;
        ensure(
            r.min_count >= 4 && r.pass,
            format!("{t}: min {}", r.min_count),
        )?;
        mins.push(format!("{t}={}", r.min_count));
    }
    for n in 2..=4 {
        let rs = RootSystem::parse(&format!("A{n}")).unwrap();
        let r = assertion_scan(&rs, Strategy::ExhaustiveDirections).map_err(|e| e.to_string())?;
        ensure(r.min_count == 2, format!("A{n}: min {}", r.min_count))?;
        let (_, pairs) = minimizing_line_pairs(&rs).map_err(|e| e.to_string())?;
        ensure(
            pairs.iter().all(|(u, x)| {
                let (pu, px) = (singleton_pattern(u), singleton_pattern(x));
                pu.is_some() && px.is_some() && pu != px
            }),
            format!("A{n}: minimizer outside the diag(-n,1,...,1) family"),
        )?;
        mins.push(format!("A{n}=2"));
    }
    let g = su3();
    let pair = |a: [f64; 3], b: [f64; 3]| {
        bracket_dim_crosscheck(2, &g.diagonal(&a).unwrap(), &g.diagonal(&b).unwrap())
            .map_err(|e| e.to_string())
    };
    let extremal = pair([-2.0, 1.0, 1.0], [1.0, 1.0, -2.0])?;
    ensure(
        extremal.equal && extremal.root_count == 2,
        format!("A2 pair {extremal:?}"),
    )?;
    let generic = pair([0.9, -0.2, -0.7], [-0.4, 1.1, -0.7])?;
    ensure(
        generic.equal && generic.root_count == 6,
        format!("generic pair {generic:?}"),
    )?;
    let (f4, e6) = (
        RootSystem::parse("F4").unwrap().len(),
        RootSystem::parse("E6").unwrap().len(),
    );
    ensure(f4 == 48 && e6 == 72, format!("|F4|={f4}, |E6|={e6}"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 120.0, format!("took {secs:.1}s"))?;
    Ok(format!(
        "{}; crosscheck 2=2, 6=6; {secs:.1}s",
        mins.join(" ")
    ))
}

fn kvfcl() -> Check {
    let f2 = GeneratingFamily::mroot(2).unwrap();
    let baseline = build_cartan_datum(&su3(), &fam("riemannian:1,1"), &[]).unwrap();
    let cartan = build_cartan_datum(&su3(), &f2, &[]).unwrap();
    let scaled = build_cartan_datum(&su3(), &f2, &[0.8, 1.2, 1.7]).unwrap();
    let zero = DVector::zeros(8);
    let regular = |d: &HomogeneousDatum| d.algebra.diagonal(&[0.9, -0.2, -0.7]).unwrap();
    let generic = DVector::from_fn(8, |i, _| 0.3 + 0.1 * i as f64);
    let torus = cartan.algebra.cartan_basis();

    let cases = [
        (
            "baseline",
            &baseline,
            generic.clone(),
            zero.clone(),
            vec![],
            CandidateClass::Class1,
        ),
        (
            "regular",
            &cartan,
            regular(&cartan),
            zero.clone(),
            torus.clone(),
            CandidateClass::Rejected,
        ),
        (
            "class2",
            &cartan,
            zero.clone(),
            regular(&cartan),
            torus.clone(),
            CandidateClass::Class2,
        ),
        (
            "class2-scaled",
            &scaled,
            zero.clone(),
            regular(&scaled),
            torus.clone(),
            CandidateClass::Class2,
        ),
        (
            "regular-scaled",
            &scaled,
            regular(&scaled),
            zero.clone(),
            vec![],
            CandidateClass::Rejected,
        ),
    ];
    let mut spreads = Vec::new();
    for (name, d, x, xp, gp, expected) in cases {
        let c = KillingCandidate::new(d, x, xp, gp).map_err(|e| e.to_string())?;
        let r = length_deviation(d, &c, 200, 0).map_err(|e| e.to_string())?;
        let class = classify_candidate(d, &c, &r);
        ensure(
            class != CandidateClass::Inconsistent,
            format!("{name}: inconsistent"),
        )?;
        ensure(
            class == expected,
            format!("{name}: {class:?}, spread {:e}", r.spread),
        )?;
        match expected {
            CandidateClass::Rejected => {
                ensure(r.spread > 1e-3, format!("{name}: spread {:e}", r.spread))?
            }
            _ => ensure(r.spread < 1e-10, format!("{name}: spread {:e}", r.spread))?,
        }
        spreads.push(format!("{name} {:.1e}", r.spread));
    }
    Ok(spreads.join(", "))
}

fn run_cli(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_a12"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code(), out.stdout)
}

fn cli_examples() -> Check {
    let examples: [(&[&str], i32, &str, Value); 3] = [
        (
            &["keylemma", "type=B2", "strategy=exhaustive-directions"],
            0,
            "/min_count",
            Value::from(4),
        ),
        (
            &["vanishing", "algebra=su3", "datum=cartan", "family=mroot:2"],
            0,
            "/criterion/holds",
            Value::from(true),
        ),
        (
            &["validate-norm", "family=phi:1-0.9*s^2"],
            1,
            "/min_margin",
            Value::from(-0.8),
        ),
    ];
    for (args, code, pointer, expected) in examples {
        let (c1, o1) = run_cli(args);
        let (c2, o2) = run_cli(args);
        ensure(
            c1 == Some(code) && c2 == Some(code),
            format!("{}: exit {c1:?}/{c2:?}", args[0]),
        )?;
        ensure(
            o1 == o2,
            format!("{}: reports differ between runs", args[0]),
        )?;
        let report: Value = serde_json::from_slice(&o1).map_err(|e| e.to_string())?;
        ensure(
            report.pointer(pointer) == Some(&expected),
            format!("{}: {pointer} = {:?}", args[0], report.pointer(pointer)),
        )?;
    }
    Ok("keylemma 0, vanishing 0, validate-norm 1; reruns byte-identical".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("norm validity", norm_validity),
        ("tensor oracle equivalence", tensor_oracles),
        ("Cartan tensor structure", cartan_structure),
        ("S-curvature formula", s_curvature_formula),
        ("vanishing criterion", vanishing),
        ("key lemma assertion", key_lemma),
        ("KVFCL dichotomy", kvfcl),
        ("CLI determinism", cli_examples),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} ({name}): PASS  {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL  {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/8 passed in {:.1}s",
        8 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
