use std::f64::consts::PI;

use micropolar::diagnostics::epsilon_field;
use micropolar::dynamics::{
    coupled_momentum_rhs, nonlinear_rhs, simulate, step, synchronized_momentum_rhs, FluidParams,
    MicropolarState, SimConfig, StepFlags, Stepper,
};
use micropolar::initdata::{linear_oracle_evolve, random_solenoidal, taylor_green, SpectrumEnvelope};
use micropolar::{Grid, SpectralField};

fn env(seed: u64, kc: f64) -> SpectrumEnvelope {
    SpectrumEnvelope {
        exponent_r: 0.0,
        cutoff_kc: kc,
        amplitude: 1.0,
        seed,
    }
}

fn params() -> FluidParams {
    FluidParams::new(0.05, 0.08, 0.3, 0.02).unwrap()
}

fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.add_scaled(b, -1.0).unwrap().l2_norm() / b.l2_norm().max(1e-300)
}

#[test]
fn zero_state_stays_zero() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let z = MicropolarState::zero(g);
    let next = step(&z, &params(), 0.1, StepFlags::default()).unwrap();
    assert_eq!(next.u.max_abs(), 0.0);
    assert_eq!(next.w.max_abs(), 0.0);
    assert!((next.time - 0.1).abs() < 1e-15);
    let (du, dw) = nonlinear_rhs(&z, &params()).unwrap();
    assert_eq!(du.max_abs() + dw.max_abs(), 0.0);
}

#[test]
fn taylor_green_advection_is_a_gradient() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let z = taylor_green(&g, 1.0).unwrap();
    let (du, dw) = nonlinear_rhs(&z, &params()).unwrap();
    assert!(du.max_abs() < 1e-15, "{}", du.max_abs());
    assert!(dw.max_abs() < 1e-15);
}

#[test]
fn advection_is_energy_neutral() {
    for dim in [2, 3] {
        let n = if dim == 2 { 32 } else { 16 };
        let g = Grid::new(dim, n, 2.0 * PI).unwrap();
        let z = random_solenoidal(&g, &env(7, 5.0), true).unwrap();
        let (du, dw) = nonlinear_rhs(&z, &params()).unwrap();
        let s = du.inner(&z.u).unwrap() + dw.inner(&z.w).unwrap();
        let scale = du.l2_norm() * z.u.l2_norm() + dw.l2_norm() * z.w.l2_norm();
        assert!(s.abs() <= 1e-12 * scale, "dim {dim}: {s} vs {scale}");
        assert!(du.divergence().unwrap().l2_norm() <= 1e-12 * du.sobolev_seminorm(1).unwrap().value);
    }
}

#[test]
fn linear_step_matches_oracle() {
    for dim in [2, 3] {
        let n = if dim == 2 { 16 } else { 8 };
        let g = Grid::new(dim, n, 2.0 * PI).unwrap();
        let z = random_solenoidal(&g, &env(3, 3.0), true).unwrap();
        let p = params();
        let flags = StepFlags {
            nonlinear: false,
            dealias: false,
        };
        let next = step(&z, &p, 0.37, flags).unwrap();
        let exact = linear_oracle_evolve(&z, &p, 0.37).unwrap();
        assert!(rel_diff(&next.u, &exact.u) < 1e-12);
        assert!(rel_diff(&next.w, &exact.w) < 1e-12);
    }
}

#[test]
fn rewritten_momentum_terms_agree() {
    let g = Grid::new(3, 16, 2.0 * PI).unwrap();
    let z = random_solenoidal(&g, &env(11, 6.0), true).unwrap();
    let a = coupled_momentum_rhs(&z, &params()).unwrap();
    let b = synchronized_momentum_rhs(&z, &params()).unwrap();
    assert!(rel_diff(&a, &b) < 1e-12);
}

#[test]
fn stokes_decay_of_taylor_green() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let p = FluidParams::new(0.1, 0.1, 1e-300, 0.0).unwrap();
    let z0 = taylor_green(&g, 1.0).unwrap();
    let mut cfg = SimConfig::new(g, p, 0.05, 2.0);
    cfg.record_stride = 10;
    let out = simulate(&cfg, &z0).unwrap();
    let u = out.series.get("u:m=0").unwrap();
    for (t, v) in out.series.times().iter().zip(u) {
        let expected = z0.u.l2_norm() * (-2.0 * p.mu * t).exp();
        assert!((v - expected).abs() < 1e-10 * expected, "t={t}: {v} vs {expected}");
    }
}

#[test]
fn nonlinear_self_convergence_is_fourth_order() {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let p = FluidParams::new(0.02, 0.03, 0.5, 0.0).unwrap();
    let mut z0 = random_solenoidal(&g, &env(5, 4.0), true).unwrap();
    z0.u = z0.u.scaled(3.0);
    let t_end = 1.0;
    let run = |dt: f64| {
        let mut s = Stepper::new(g, p, dt, StepFlags::default()).unwrap();
        let mut z = z0.clone();
        for _ in 0..(t_end / dt).round() as usize {
            s.step(&mut z).unwrap();
        }
        z
    };
    let reference = run(0.1 / 16.0);
    let err = |z: &MicropolarState| {
        (z.u.add_scaled(&reference.u, -1.0).unwrap().energy()
            + z.w.add_scaled(&reference.w, -1.0).unwrap().energy())
        .sqrt()
    };
    let e1 = err(&run(0.1));
    let e2 = err(&run(0.05));
    let order = (e1 / e2).log2();
    println!("errors {e1:e} {e2:e} order {order}");
    assert!(order >= 3.5, "order {order}");
}

#[test]
fn epsilon_of_taylor_green() {
    let g = Grid::new(2, 16, 2.0 * PI).unwrap();
    let z = taylor_green(&g, 1.0).unwrap();
    let eps = epsilon_field(&z).unwrap();
    let expected = SpectralField::from_fn(g, 1, |x| [-x[0].sin() * x[1].sin(), 0.0, 0.0]);
    assert!(eps.add_scaled(&expected, -1.0).unwrap().max_abs() < 1e-15);
}
