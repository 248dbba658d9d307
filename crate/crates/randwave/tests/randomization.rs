mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use randwave::randomization::*;
use randwave::spectral::{sobolev_norm, GridSpec, SpectralField};

fn smooth() -> WindowSpec {
    WindowSpec::smooth_bump(0.25).unwrap()
}

/// Sum of `ψ(ξ − n)` over every cube within two of `ξ`, a superset of the window support.
fn window_sum(xi: [f64; 3], spec: WindowSpec) -> f64 {
    let c = xi.map(|x| x.round() as i64);
    let mut s = 0.0;
    for nx in c[0] - 2..=c[0] + 2 {
        for ny in c[1] - 2..=c[1] + 2 {
            for nz in c[2] - 2..=c[2] + 2 {
                s += window_weight(xi, [nx, ny, nz], spec);
            }
        }
    }
    s
}

#[test]
fn window_values() {
    assert_eq!(window_weight([2.0, -1.0, 0.0], [2, -1, 0], WindowSpec::SharpCube), 1.0);
    assert!((window_sum([0.3, -0.7, 0.5], smooth()) - 1.0).abs() <= 1e-12);
    let mid = window_weight([0.5, 0.0, 0.0], [0, 0, 0], smooth());
    assert!((mid - 0.5).abs() < 1e-15);
    assert_eq!(window_weight([1.2, 0.0, 0.0], [0, 0, 0], smooth()), 0.0);
    assert!(WindowSpec::smooth_bump(0.5).is_err());
}

proptest! {
    #[test]
    fn windows_partition_unity(m in proptest::array::uniform3(-40i64..40), r in 1i64..5, w in 0.01f64..0.49) {
        let xi = [m[0] as f64 / r as f64, m[1] as f64 / r as f64, m[2] as f64 / r as f64];
        prop_assert_eq!(window_sum(xi, WindowSpec::SharpCube), 1.0);
        let smooth_sum = window_sum(xi, WindowSpec::SmoothBump { width: w });
        prop_assert!((smooth_sum - 1.0).abs() <= 1e-12);
    }
}

fn data(grid: GridSpec) -> SpectralField {
    random_field(grid, 5, 99)
}

#[test]
fn unit_coefficients_reproduce_data() {
    let g = GridSpec::new(16, 2).unwrap();
    let phi = data(g);
    for spec in [WindowSpec::SharpCube, smooth()] {
        let out = wiener_randomize_with(&phi, spec, |_| c(1.0, 0.0));
        assert!(max_diff(&out, &phi) < 1e-14);
    }
}

#[test]
fn single_cube_data_is_multiplied() {
    let g = GridSpec::new(16, 4).unwrap();
    // modes 3..=6 over 4 lie in (1/2, 3/2]: the cube n = (1, 0, 0) in x
    let phi = SpectralField::from_fn(g, |m, _| {
        if (3..=6).contains(&m[0]) && (-1..=2).contains(&m[1]) && (-1..=2).contains(&m[2]) {
            c(1.0 + m[0] as f64, -(m[1] as f64))
        } else {
            c(0.0, 0.0)
        }
    });
    let seed = MemberSeed { master: 5, member: 2 };
    let out = wiener_randomize(&phi, WindowSpec::SharpCube, RandomLaw::ComplexGaussian, seed);
    let g0 = sample_unit(RandomLaw::ComplexGaussian, &mut seed.cube_stream([1, 0, 0]));
    assert!(max_diff(&out, &phi.scaled(g0)) < 1e-14);
}

#[test]
fn randomization_is_reproducible() {
    let g = GridSpec::new(16, 2).unwrap();
    let phi = data(g);
    let e = EnsembleSpec::new(RandomLaw::ComplexGaussian, 17, 4);
    let a = wiener_randomize(&phi, smooth(), e.law, e.member(1));
    let b = wiener_randomize(&phi, smooth(), e.law, e.member(1));
    assert_eq!(a, b);
    let other = wiener_randomize(&phi, smooth(), e.law, e.member(2));
    assert_ne!(a, other);
}

#[test]
fn mean_square_norm_is_preserved() {
    let g = GridSpec::new(8, 2).unwrap();
    let phi = random_field(g, 3, 4);
    let target = sobolev_norm(&phi, 0.0).powi(2);
    let e = EnsembleSpec::new(RandomLaw::ComplexGaussian, 2024, 1000);
    let vals: Vec<f64> = (0..e.count)
        .map(|i| sobolev_norm(&wiener_randomize(&phi, WindowSpec::SharpCube, e.law, e.member(i)), 0.0).powi(2))
        .collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!((mean - target).abs() <= 3.0 * se, "mean {mean}, target {target}, se {se}");
}

#[test]
fn circle_law_with_sharp_cubes_keeps_every_norm() {
    let g = GridSpec::new(16, 2).unwrap();
    let phi = data(g);
    let e = EnsembleSpec::new(RandomLaw::UniformCircle, 8, 10);
    for i in 0..e.count {
        let out = wiener_randomize(&phi, WindowSpec::SharpCube, e.law, e.member(i));
        for s in [0.0, 0.3, 1.0] {
            let (a, b) = (sobolev_norm(&out, s), sobolev_norm(&phi, s));
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }
}

fn draws(law: RandomLaw, n: usize) -> Vec<Complex64> {
    let mut r = MemberSeed { master: 1, member: 0 }.stream(b"test");
    (0..n).map(|_| sample_unit(law, &mut r)).collect()
}

#[test]
fn unit_laws() {
    for g in draws(RandomLaw::UniformCircle, 1000) {
        assert!((g.norm() - 1.0).abs() <= 1e-15);
    }
    let n = 100_000;
    let s = draws(RandomLaw::ComplexGaussian, n);
    let mean = s.iter().sum::<Complex64>() / n as f64;
    assert!(mean.norm() <= 4.0 / (n as f64).sqrt());
    let m2 = s.iter().map(|g| g.norm_sqr()).sum::<f64>() / n as f64;
    assert!((m2 - 1.0).abs() < 0.05);
}

#[test]
fn exponential_moments_are_sub_gaussian() {
    let kappas: Vec<Complex64> = (1..=8)
        .flat_map(|i| {
            let r = 0.25 * i as f64;
            (0..4).map(move |j| Complex64::from_polar(r, j as f64 * 0.7))
        })
        .collect();
    for law in [RandomLaw::ComplexGaussian, RandomLaw::UniformCircle] {
        let cst = empirical_moment_constant(&draws(law, 50_000), &kappas);
        assert!(cst <= 0.3, "{law:?}: {cst}");
    }
}
