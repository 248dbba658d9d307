mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use randwave::evolution::*;
use randwave::spectral::*;

#[test]
fn linear_flow_basics() {
    let g = GridSpec::new(16, 1).unwrap();
    let f = random_field(g, 7, 3);
    assert_eq!(evolve_linear(&f, 0.0), f);
    let n0 = sobolev_norm(&f, 0.0);
    assert!((sobolev_norm(&evolve_linear(&f, 1.7), 0.0) - n0).abs() <= 1e-12 * n0);

    let a = c(0.4, 0.3);
    let w = SpectralField::plane_wave(g, a, [1, 2, 0]).unwrap();
    let out = evolve_linear(&w, 0.37);
    let want = a * Complex64::from_polar(1.0, -0.37 * 5.0);
    assert!((out.coefficient([1, 2, 0]).unwrap() - want).norm() < 1e-15);
}

#[test]
fn phase_cases() {
    let xi = [1.0, -2.0, 0.5];
    let xi2 = [0.3, 0.2, 0.1];
    assert_eq!(phase_function(xi, xi, xi2, xi2).unwrap(), 0.0);
    assert_eq!(phase_function([1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0; 3]).unwrap(), -2.0);
}

proptest! {
    #[test]
    fn phase_forms_agree(v in proptest::array::uniform9(-10.0f64..10.0)) {
        let xi1 = [v[0], v[1], v[2]];
        let xi2 = [v[3], v[4], v[5]];
        let xi3 = [v[6], v[7], v[8]];
        let xi = [xi1[0] - xi2[0] + xi3[0], xi1[1] - xi2[1] + xi3[1], xi1[2] - xi2[2] + xi3[2]];
        let a = phase_function(xi, xi1, xi2, xi3).unwrap();
        let b = phase_function_factored(xi, xi1, xi2, xi3).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()).max(100.0));
    }
}

fn waves(g: GridSpec, tg: TimeGrid, modes: [[i64; 3]; 3], amps: [Complex64; 3]) -> Vec<FieldTrajectory> {
    (0..3).map(|j| free_evolution(&SpectralField::plane_wave(g, amps[j], modes[j]).unwrap(), tg)).collect()
}

/// Closed form of the Duhamel integral of three plane waves at time `t`.
fn closed_form(amps: [Complex64; 3], xi2: f64, phi: f64, t: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let prod = amps[0] * amps[1].conj() * amps[2];
    let integral = if phi == 0.0 { Complex64::new(t, 0.0) } else { ((i * t * phi).exp() - 1.0) / (i * phi) };
    -i * prod * (-i * t * xi2).exp() * integral
}

fn plane_wave_error(modes: [[i64; 3]; 3], nodes: usize, quad: Quadrature) -> f64 {
    let g = GridSpec::new(16, 1).unwrap();
    let tg = TimeGrid::new(1.0, nodes).unwrap();
    let amps = [c(0.8, 0.1), c(-0.3, 0.9), c(0.5, -0.5)];
    let u = waves(g, tg, modes, amps);
    let out = duhamel_trilinear(&u[0], &u[1], &u[2], quad).unwrap();
    let f = |m: [i64; 3]| [m[0] as f64, m[1] as f64, m[2] as f64];
    let xi = [0, 1, 2].map(|d| modes[0][d] - modes[1][d] + modes[2][d]);
    let phi = phase_function(f(xi), f(modes[0]), f(modes[1]), f(modes[2])).unwrap();
    let xi2 = f(xi).iter().map(|v| v * v).sum::<f64>();
    let mut worst: f64 = 0.0;
    for (m, t) in tg.times().into_iter().enumerate().skip(1) {
        let want = closed_form(amps, xi2, phi, t);
        let got = out.snapshot(m).coefficient(xi).unwrap();
        worst = worst.max((got - want).norm() / want.norm());
        // nothing leaks into other modes
        let mut rest = out.snapshot(m).clone();
        rest.coefficients_mut()[g.flat_index(xi).unwrap()] = c(0.0, 0.0);
        assert!(max_abs(&rest) < 1e-14);
    }
    worst
}

const NONRESONANT: [[i64; 3]; 3] = [[2, 0, 0], [1, 0, 0], [0, 0, 0]];
const LARGE_PHASE: [[i64; 3]; 3] = [[3, 1, 0], [0, -1, 1], [1, 0, 2]];
const RESONANT: [[i64; 3]; 3] = [[1, 0, 0], [0, 2, 0], [0, 2, 0]];

#[test]
fn plane_wave_oracle_gauss() {
    for modes in [NONRESONANT, LARGE_PHASE, RESONANT] {
        let err = plane_wave_error(modes, 129, Quadrature::GaussLegendre2);
        assert!(err <= 1e-8, "{modes:?}: {err:e}");
    }
}

#[test]
fn resonant_interaction_grows_linearly() {
    let g = GridSpec::new(16, 1).unwrap();
    let tg = TimeGrid::new(2.0, 129).unwrap();
    let amps = [c(0.8, 0.1), c(-0.3, 0.9), c(0.5, -0.5)];
    let u = waves(g, tg, RESONANT, amps);
    let prod = amps.iter().map(|a| a.norm()).product::<f64>();
    for quad in [Quadrature::Trapezoid, Quadrature::GaussLegendre2] {
        let out = duhamel_trilinear(&u[0], &u[1], &u[2], quad).unwrap();
        for (m, t) in tg.times().into_iter().enumerate() {
            let got = out.snapshot(m).coefficient([1, 0, 0]).unwrap().norm();
            assert!((got - prod * t).abs() <= 1e-8 * prod * t.max(1e-300) + 1e-300);
        }
    }
}

#[test]
fn quadrature_orders() {
    let order = |quad, modes| {
        let e1 = plane_wave_error(modes, 17, quad);
        let e2 = plane_wave_error(modes, 33, quad);
        (e1 / e2).log2()
    };
    let p_trap = order(Quadrature::Trapezoid, LARGE_PHASE);
    let p_gauss = order(Quadrature::GaussLegendre2, LARGE_PHASE);
    assert!(p_trap >= 1.9, "trapezoid order {p_trap}");
    assert!(p_gauss >= 3.5, "gauss order {p_gauss}");
}

fn random_traj(g: GridSpec, tg: TimeGrid, seed: u64) -> FieldTrajectory {
    let snaps = (0..tg.nodes()).map(|m| random_field(g, 3, seed * 1000 + m as u64)).collect();
    FieldTrajectory::new(tg, snaps).unwrap()
}

#[test]
fn duhamel_is_linear_in_each_slot_and_vanishes_at_zero() {
    let g = GridSpec::new(8, 1).unwrap();
    let tg = TimeGrid::new(0.5, 6).unwrap();
    let (a, b, cc, d) = (random_traj(g, tg, 1), random_traj(g, tg, 2), random_traj(g, tg, 3), random_traj(g, tg, 4));
    let zero = FieldTrajectory::zeros(g, tg);
    for quad in [Quadrature::Trapezoid, Quadrature::GaussLegendre2] {
        let base = duhamel_trilinear(&a, &b, &cc, quad).unwrap();
        assert!(base.snapshot(0).is_zero());
        assert!(duhamel_trilinear(&a, &zero, &cc, quad).unwrap().sup_norm(0.0) == 0.0);
        for slot in 0..3 {
            let mut args = [a.clone(), b.clone(), cc.clone()];
            let mut alt = args.clone();
            alt[slot] = d.clone();
            args[slot].add(&d).unwrap();
            let sum = duhamel_trilinear(&args[0], &args[1], &args[2], quad).unwrap();
            let mut parts = base.clone();
            parts.add(&duhamel_trilinear(&alt[0], &alt[1], &alt[2], quad).unwrap()).unwrap();
            let scale = sum.sup_norm(0.0);
            assert!(sum.sup_distance(&parts, 0.0).unwrap() <= 1e-12 * scale);
        }
    }
}

#[test]
fn mismatched_grids_are_rejected() {
    let tg = TimeGrid::new(0.5, 4).unwrap();
    let a = FieldTrajectory::zeros(GridSpec::new(8, 1).unwrap(), tg);
    let b = FieldTrajectory::zeros(GridSpec::new(8, 2).unwrap(), tg);
    assert!(duhamel_trilinear(&a, &b, &a, Quadrature::Trapezoid).is_err());
}

fn small_data(seed: u64) -> SpectralField {
    let g = GridSpec::new(16, 1).unwrap();
    random_field(g, 2, seed).scaled(c(0.05, 0.0))
}

#[test]
fn split_step_basics() {
    let g = GridSpec::new(16, 1).unwrap();
    let tg = TimeGrid::new(0.5, 11).unwrap();
    let zero = split_step_reference(&SpectralField::zeros(g), tg, SplitStepOptions::default()).unwrap();
    assert_eq!(zero.sup_norm(0.0), 0.0);

    let phi = small_data(1);
    let lin = split_step_reference(&phi, tg, SplitStepOptions { nonlinear: false, substeps: 3 }).unwrap();
    let exact = free_evolution(&phi, tg);
    assert!(lin.sup_distance(&exact, 0.0).unwrap() <= 1e-13 * sobolev_norm(&phi, 0.0));
}

#[test]
fn split_step_conserves_mass_and_converges_at_second_order() {
    let phi = small_data(2).scaled(c(4.0, 0.0));
    let mass = sobolev_norm(&phi, 0.0);
    let tg = TimeGrid::new(0.4, 101).unwrap();
    let traj = split_step_reference(&phi, tg, SplitStepOptions::default()).unwrap();
    assert!((sobolev_norm(traj.last(), 0.0) - mass).abs() <= 1e-10 * mass);

    let run = |n| {
        let tg = TimeGrid::new(0.4, 2).unwrap();
        split_step_reference(&phi, tg, SplitStepOptions { nonlinear: true, substeps: n }).unwrap().last().clone()
    };
    let (a, b, cc) = (run(64), run(128), run(256));
    let diff = |x: &SpectralField, y: &SpectralField| {
        let mut d = x.clone();
        d -= y;
        sobolev_norm(&d, 0.0)
    };
    let order = (diff(&a, &b) / diff(&b, &cc)).log2();
    assert!((order - 2.0).abs() < 0.3, "order {order}");
}

#[test]
fn split_step_detects_blow_up() {
    let g = GridSpec::new(8, 1).unwrap();
    let mut phi = SpectralField::zeros(g);
    phi.coefficients_mut()[0] = c(1e200, 0.0);
    let tg = TimeGrid::new(1.0, 3).unwrap();
    let r = split_step_reference(&phi, tg, SplitStepOptions::default());
    assert!(matches!(r, Err(EvolutionError::BlowUp { .. })));
}
