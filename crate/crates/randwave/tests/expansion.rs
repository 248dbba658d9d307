mod common;

use common::*;
use randwave::evolution::{duhamel_trilinear, free_evolution, Quadrature};
use randwave::expansion::*;
use randwave::randomization::{wiener_randomize, EnsembleSpec, RandomLaw, WindowSpec};
use randwave::spectral::{pointwise_cubic, FieldTrajectory, GridSpec, TimeGrid};

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

#[test]
fn alpha_recursion_matches_closed_form() {
    for k in 1..=64 {
        assert_eq!(alpha(k), alpha_closed_form(k), "k = {k}");
    }
    assert_eq!(alpha(1), r(1, 1));
    assert_eq!(alpha(2), r(2, 1));
    assert_eq!(alpha(3), r(5, 2));
    assert_eq!(alpha(4), r(11, 4));
    assert_eq!(r(3, 1) - alpha(30), r(1, 1 << 28));
    let seq = AlphaSequence::up_to(40);
    assert!(seq.values().windows(2).all(|w| w[0] < w[1]));
    assert!(seq.values().iter().all(|a| *a < r(3, 1)));
    assert_eq!(seq.get(4), Some(r(11, 4)));
}

#[test]
fn thresholds_and_predictions() {
    assert_eq!(regularity_threshold(1), r(1, 4));
    assert_eq!(regularity_threshold(2), r(1, 5));
    assert_eq!(regularity_threshold(3), r(2, 11));
    for (k, want) in [(2, 0.4), (3, 0.5), (4, 0.55)] {
        let p = predicted_sigma(k, 0.2);
        assert!((p.value - want).abs() < 1e-15);
        assert!(p.in_hypothesis);
    }
    assert!(!predicted_sigma(3, 0.6).in_hypothesis);
}

#[test]
fn triples_match_direct_enumeration() {
    for order in [3usize, 5, 7, 9] {
        let mut direct = Vec::new();
        for a in 1..order {
            for b in 1..order {
                for c in 1..order {
                    if a % 2 == 1 && b % 2 == 1 && c % 2 == 1 && a + b + c == order {
                        direct.push([a, b, c]);
                    }
                }
            }
        }
        assert_eq!(ordered_triples(order), direct);
    }
    assert_eq!(ordered_triples(5).len(), 3);
    assert_eq!(ordered_triples(7).len(), 6);
}

fn z1() -> FieldTrajectory {
    let g = GridSpec::new(16, 2).unwrap();
    let phi = random_field(g, 5, 42).scaled(c(0.5, 0.0));
    let e = EnsembleSpec::new(RandomLaw::ComplexGaussian, 3, 1);
    let data = wiener_randomize(&phi, WindowSpec::SharpCube, e.law, e.member(0));
    free_evolution(&data, TimeGrid::new(0.4, 9).unwrap())
}

fn rel(a: &FieldTrajectory, b: &FieldTrajectory) -> f64 {
    a.sup_distance(b, 0.0).unwrap() / b.sup_norm(0.0)
}

#[test]
fn towers_coincide_at_low_order() {
    let z1 = z1();
    for quad in [Quadrature::Trapezoid, Quadrature::GaussLegendre2] {
        let z = build_z_terms(&z1, 4, quad).unwrap();
        let zeta = build_zeta_terms(&z1, 4, quad).unwrap();
        assert_eq!(z.terms()[0], z1);
        assert_eq!(zeta.terms()[0], z1);
        let direct = duhamel_trilinear(&z1, &z1, &z1, quad).unwrap();
        assert!(rel(&z.terms()[1], &direct) <= 1e-12);
        assert!(rel(&zeta.terms()[1], &z.terms()[1]) <= 1e-10);
        assert!(rel(&zeta.terms()[2], &z.terms()[2]) <= 1e-10);

        // order 7: z₇ − ζ₇ is the (1,3,3) part
        let z3 = &z.terms()[1];
        let mut rest = duhamel_trilinear(&z1, z3, z3, quad).unwrap();
        rest.add(&duhamel_trilinear(z3, &z1, z3, quad).unwrap()).unwrap();
        rest.add(&duhamel_trilinear(z3, z3, &z1, quad).unwrap()).unwrap();
        let mut diff = z.terms()[3].clone();
        diff.axpy(c(-1.0, 0.0), &zeta.terms()[3]).unwrap();
        assert!(diff.sup_distance(&rest, 0.0).unwrap() <= 1e-10 * z.terms()[3].sup_norm(0.0));
    }
}

#[test]
fn zero_data_gives_zero_towers() {
    let g = GridSpec::new(8, 1).unwrap();
    let z1 = FieldTrajectory::zeros(g, TimeGrid::new(0.3, 5).unwrap());
    let zeta = build_zeta_terms(&z1, 4, Quadrature::Trapezoid).unwrap();
    assert!(zeta.terms().iter().all(|t| t.sup_norm(0.0) == 0.0));
}

#[test]
fn depth_limits() {
    let z1 = z1();
    assert!(matches!(build_z_terms(&z1, 5, Quadrature::Trapezoid), Err(ExpansionError::DepthCap(5))));
    assert!(build_zeta_terms(&z1, 0, Quadrature::Trapezoid).is_err());
    let z = build_z_terms(&z1, 3, Quadrature::Trapezoid).unwrap();
    assert!(matches!(forcing_sum(&z, 3), Err(ExpansionError::FullForcing(3))));
    assert!(forcing_sum(&z, 2).is_ok());
}

#[test]
fn forcing_sums() {
    let z1 = z1();
    let zeta = build_zeta_terms(&z1, 3, Quadrature::Trapezoid).unwrap();
    assert_eq!(forcing_sum(&zeta, 1).unwrap().sup_norm(0.0), 0.0);
    let f2 = forcing_sum(&zeta, 2).unwrap();
    let f3 = forcing_sum(&zeta, 3).unwrap();
    for m in 0..z1.len() {
        let a = z1.snapshot(m);
        let b = zeta.terms()[1].snapshot(m);
        let cubic = pointwise_cubic(a);
        assert!(max_diff(f2.snapshot(m), &cubic) <= 1e-14 * max_abs(&cubic).max(1e-300));
        // 2|a|²b + a²b̄ from the three trilinear placements
        let mut want = cubic.clone();
        want += &randwave::spectral::trilinear_product(b, a, a);
        want += &randwave::spectral::trilinear_product(a, b, a);
        want += &randwave::spectral::trilinear_product(a, a, b);
        assert!(max_diff(f3.snapshot(m), &want) <= 1e-12 * max_abs(&want).max(1e-300));
    }
}

#[test]
fn expansion_persists_one_directory_per_order() {
    let z1 = z1();
    let set = build_zeta_terms(&z1, 3, Quadrature::Trapezoid).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = set.save(dir.path()).unwrap();
    let mut orders: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().unwrap().is_dir())
        .map(|e| e.file_name().into_string().unwrap())
        .collect();
    orders.sort();
    assert_eq!(orders, ["order_1", "order_3", "order_5"]);
    assert_eq!(files.len(), 3 * z1.len() + 1);
    let back = randwave::spectral::load_snapshot(dir.path().join("order_3/node_0004.rwv")).unwrap();
    assert_eq!(&back, set.terms()[1].snapshot(4));
}
