//! Acceptance criteria. Each test prints one `criterion N ... PASS|FAIL` line to
//! stderr, even under output capture, and then asserts the same verdict.

#[path = "invariants.rs"]
mod invariants;

use std::f64::consts::PI;
use std::io::Write;
use std::os::fd::AsFd;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use micropolar::diagnostics::{
    band_ratio, energy_check_all_pairs, epsilon_residual, fit_decay_exponent, ratio_trend,
    t_doublestar_bound_3d, validity_window, BoundConstants, ValidityWindow,
};
use micropolar::dynamics::{
    coupled_momentum_rhs, label, simulate, synchronized_momentum_rhs, FluidParams, SimConfig, SimOutput,
};
use micropolar::harness::{
    initial_state, load_config, oracle_deviation, series_check, CheckName, ExperimentSpec, RunContext,
};
use micropolar::initdata::{default_cutoff, linear_oracle_evolve, random_solenoidal, taylor_green, SpectrumEnvelope};
use micropolar::Grid;

fn report(n: u32, name: &str, pass: bool, details: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    // a duplicate of fd 2 is not subject to libtest output capture
    let Ok(fd) = std::io::stderr().as_fd().try_clone_to_owned() else { return };
    let _ = writeln!(std::fs::File::from(fd), "criterion {n:>2} {name:<28} {verdict}  {details}");
}

fn verdict(n: u32, name: &str, checks: &[(bool, String)], started: Instant) {
    let pass = checks.iter().all(|(p, _)| *p);
    let mut details: Vec<String> = checks.iter().map(|(_, d)| d.clone()).collect();
    details.push(format!("({:.1} s)", started.elapsed().as_secs_f64()));
    report(n, name, pass, &details.join("; "));
    assert!(pass, "criterion {n} {name}: {}", details.join("; "));
}

fn config(name: &str) -> ExperimentSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    load_config(&path).unwrap()
}

struct Decay {
    spec: ExperimentSpec,
    out: SimOutput,
    window: ValidityWindow,
    seconds: f64,
}

impl Decay {
    fn run(name: &str) -> Decay {
        let started = Instant::now();
        let spec = config(name);
        let (z0, _) = initial_state(&spec).unwrap();
        let out = simulate(&spec.sim, &z0).unwrap();
        let window = validity_window(&out.series, &spec.sim.grid, &spec.sim.params).unwrap();
        Decay {
            spec,
            out,
            window,
            seconds: started.elapsed().as_secs_f64(),
        }
    }

    fn slope(&self, quantity: &str, m: u32) -> f64 {
        fit_decay_exponent(&self.out.series, &label(quantity, m), self.window.as_array())
            .unwrap()
            .slope
    }

    fn eps_over_w_trend(&self) -> bool {
        let s = &self.out.series;
        let (e, w) = (s.get(&label("eps", 0)).unwrap(), s.get(&label("w", 0)).unwrap());
        let ratio: Vec<(f64, f64)> = s
            .times()
            .iter()
            .zip(e.iter().zip(w))
            .filter(|(t, _)| **t >= self.window.t_min && **t <= self.window.t_max)
            .map(|(&t, (&e, &w))| (t, e / w))
            .collect();
        ratio_trend(&ratio, self.window.last_decade()).unwrap().pass
    }
}

fn decay_2d() -> &'static Decay {
    static RUN: OnceLock<Decay> = OnceLock::new();
    RUN.get_or_init(|| Decay::run("decay_2d_alpha_quarter.cfg"))
}

fn decay_3d() -> &'static Decay {
    static RUN: OnceLock<Decay> = OnceLock::new();
    RUN.get_or_init(|| Decay::run("decay_3d_small.cfg"))
}

fn within(measured: f64, target: f64, tol: f64, what: &str) -> (bool, String) {
    ((measured - target).abs() <= tol, format!("{what} {measured:.4e} (want {target} ± {tol})"))
}

fn at_most(measured: f64, bound: f64, what: &str) -> (bool, String) {
    (measured <= bound, format!("{what} {measured:.4e} (want <= {bound:e})"))
}

/// Least-squares slope of `log y` against `log x`.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_01_linear_runs_match_the_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0001);
    let p = FluidParams::new(
        rng.random_range(0.05..1.0),
        rng.random_range(0.05..1.0),
        rng.random_range(0.05..1.0),
        0.0,
    )
    .unwrap();
    let grid = Grid::new(2, 64, 2.0 * PI).unwrap();
    let env = SpectrumEnvelope {
        exponent_r: 0.0,
        cutoff_kc: 20.0,
        amplitude: 1.0,
        seed: 101,
    };
    let z0 = random_solenoidal(&grid, &env, true).unwrap();
    let mut cfg = SimConfig::new(grid, p, 0.01, 1.0);
    cfg.nonlinear = false;
    cfg.dealias = false;
    let run = simulate(&cfg, &z0).unwrap().final_state;
    let exact = linear_oracle_evolve(&z0, &p, 1.0).unwrap();
    let dev = oracle_deviation(&run, &exact, &z0);
    let secs = started.elapsed().as_secs_f64();
    verdict(
        1,
        "oracle equivalence",
        &[at_most(dev, 1e-10, "max mode deviation"), at_most(secs, 5.0, "seconds")],
        started,
    );
}

#[test]
fn criterion_02_momentum_assemblies_agree() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0002);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let grid = if i % 2 == 0 {
            Grid::new(2, 16, rng.random_range(1.0..20.0)).unwrap()
        } else {
            Grid::new(3, 8, rng.random_range(1.0..20.0)).unwrap()
        };
        let p = FluidParams::new(
            rng.random_range(0.01..1.0),
            rng.random_range(0.01..1.0),
            rng.random_range(0.01..1.0),
            rng.random_range(0.0..1.0),
        )
        .unwrap();
        let env = SpectrumEnvelope {
            exponent_r: rng.random_range(-1.0..1.0),
            cutoff_kc: default_cutoff(&grid),
            amplitude: rng.random_range(0.1..10.0),
            seed: rng.random(),
        };
        let z = random_solenoidal(&grid, &env, true).unwrap();
        let a = coupled_momentum_rhs(&z, &p).unwrap();
        let b = synchronized_momentum_rhs(&z, &p).unwrap();
        worst = worst.max(a.add_scaled(&b, -1.0).unwrap().l2_norm() / a.l2_norm());
    }
    let secs = started.elapsed().as_secs_f64();
    verdict(
        2,
        "momentum identity",
        &[at_most(worst, 1e-12, "max relative difference"), at_most(secs, 10.0, "seconds")],
        started,
    );
}

#[test]
fn criterion_03_energy_inequality() {
    let started = Instant::now();
    let spec = config("energy_tg_256.cfg");
    let (z0, _) = initial_state(&spec).unwrap();
    let out = simulate(&spec.sim, &z0).unwrap();
    let (worst, pair) = energy_check_all_pairs(&out.series, &spec.sim.params).unwrap();
    let secs = started.elapsed().as_secs_f64();
    verdict(
        3,
        "energy inequality",
        &[
            (worst >= -1e-6, format!("worst slack/‖z(s)‖² {worst:.3e} at s={:.2}, t={:.2} (want >= -1e-6)", pair.s, pair.t)),
            at_most(secs, 120.0, "seconds"),
        ],
        started,
    );
}

#[test]
fn criterion_04_decay_rate_gaps() {
    let started = Instant::now();
    let run = decay_2d();
    let (su, sw, sdu) = (run.slope("u", 0), run.slope("w", 0), run.slope("u", 1));
    verdict(
        4,
        "decay rate gaps",
        &[
            within(su, -0.25, 0.1, "slope u"),
            within(sw - su, -0.5, 0.2, "gap w-u"),
            within(sdu - su, -0.5, 0.2, "gap Du-u"),
            at_most(run.seconds, 900.0, "run seconds"),
        ],
        started,
    );
}

#[test]
fn criterion_05_synchronization() {
    let started = Instant::now();
    let two = decay_2d();
    let gap_2d = two.slope("eps", 0) - two.slope("w", 0);
    let three = decay_3d();
    let gap_3d = three.slope("eps", 0) - three.slope("w", 0);
    let div_curl = three.slope("divw", 0) - three.slope("curlw", 0);
    verdict(
        5,
        "synchronization",
        &[
            at_most(gap_2d, -0.8, "2D gap eps-w"),
            (two.eps_over_w_trend(), "2D eps/w falls over the last decade".into()),
            at_most(gap_3d, -0.8, "3D gap eps-w"),
            (three.eps_over_w_trend(), "3D eps/w falls over the last decade".into()),
            at_most(div_curl, -0.8, "3D gap divw-curlw"),
            at_most(two.seconds + three.seconds, 1800.0, "run seconds"),
        ],
        started,
    );
}

#[test]
fn criterion_06_sandwich_band() {
    let started = Instant::now();
    let run = decay_2d();
    let alpha = run.spec.hypothesis.expect("hypothesis configured").alpha;
    let s = &run.out.series;
    let du = s.get(&label("u", 1)).unwrap();
    let scaled: Vec<f64> = s
        .times()
        .iter()
        .zip(du)
        .filter(|(t, _)| **t >= run.window.t_min && **t <= run.window.t_max)
        .map(|(t, v)| v * t.powf(alpha + 0.5))
        .collect();
    let band = band_ratio(&scaled).unwrap();
    verdict(6, "sandwich band", &[at_most(band, 5.0, "max/min of ‖Du‖ t^(α+1/2)")], started);
}

#[test]
fn criterion_07_monotonicity_thresholds() {
    let started = Instant::now();
    let three = decay_3d();
    let ctx3 = RunContext::from_spec(&three.spec);
    let bound = t_doublestar_bound_3d(&three.spec.sim.params, three.out.series.get(&label("z", 0)).unwrap()[0]);
    let rec3 = series_check(CheckName::Monotonicity, &three.out.series, &ctx3).unwrap().remove(0);

    let spec2 = config("monotone_2d.cfg");
    let (z0, _) = initial_state(&spec2).unwrap();
    let out2 = simulate(&spec2.sim, &z0).unwrap();
    let rec2 = series_check(CheckName::Monotonicity, &out2.series, &RunContext::from_spec(&spec2))
        .unwrap()
        .remove(0);
    verdict(
        7,
        "monotonicity thresholds",
        &[
            (bound <= three.spec.sim.t_end, format!("3D bound {bound:.3} inside horizon {}", three.spec.sim.t_end)),
            (
                rec3.required && rec3.pass,
                format!("3D onset {:.3} (want <= {:.3})", rec3.measured, rec3.predicted),
            ),
            (
                rec2.required && rec2.pass,
                format!("2D onset {:.3} (want <= entry time {:.3})", rec2.measured, rec2.predicted),
            ),
        ],
        started,
    );
}

#[test]
fn criterion_08_epsilon_residual_refinement() {
    let started = Instant::now();
    let grid = Grid::new(2, 32, 2.0 * PI).unwrap();
    let p = FluidParams::new(0.05, 0.05, 0.02, 0.0).unwrap();
    let mut z0 = taylor_green(&grid, 1.0).unwrap();
    let env = SpectrumEnvelope {
        exponent_r: 0.0,
        cutoff_kc: 3.0,
        amplitude: 0.5,
        seed: 8,
    };
    z0.w = random_solenoidal(&grid, &env, true).unwrap().w;
    let mut cfg = SimConfig::new(grid, p, 0.0025, 0.8);
    cfg.snapshot_stride = Some(1);
    cfg.record_stride = 16;
    let snaps = simulate(&cfg, &z0).unwrap().snapshots;
    let strides = [32usize, 16, 8, 4];
    let worst: Vec<f64> = strides
        .iter()
        .map(|&s| {
            let sub: Vec<_> = snaps.iter().step_by(s).cloned().collect();
            epsilon_residual(&sub, &p)
                .unwrap()
                .iter()
                .map(|r| r.residual / r.eps_h1)
                .fold(0.0, f64::max)
        })
        .collect();
    let dts: Vec<f64> = strides.iter().map(|&s| s as f64 * cfg.dt).collect();
    let order = log_slope(&dts, &worst);
    let min_pair = worst.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    let finest = *worst.last().unwrap();
    verdict(
        8,
        "epsilon residual",
        &[
            (order >= 1.8, format!("fitted order {order:.3} (want >= 1.8)")),
            (min_pair >= 1.8, format!("smallest halving order {min_pair:.3} (want >= 1.8)")),
            at_most(finest, 1e-4, "finest residual/‖ε‖_H1"),
        ],
        started,
    );
}

#[test]
fn criterion_09_constants() {
    let started = Instant::now();
    let p = FluidParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
    let k = BoundConstants::k_smallness();
    let t = t_doublestar_bound_3d(&p, 1.0);
    let pn = BoundConstants::p_n(3);
    verdict(
        9,
        "constant spot checks",
        &[
            (((k - 0.3141) as f64).abs() <= 0.0001, format!("K {k:.7} (want 0.3141 ± 0.0001)")),
            (t == 0.005, format!("t** {t} (want 0.005)")),
            (pn == 0.25, format!("p_3 {pn} (want 0.25)")),
        ],
        started,
    );
}

#[test]
fn criterion_10_invariant_suite() {
    let started = Instant::now();
    let suite = invariants::suite();
    let failed: Vec<&str> = suite
        .iter()
        .filter(|(_, f)| catch_unwind(AssertUnwindSafe(f)).is_err())
        .map(|(name, _)| *name)
        .collect();
    let secs = started.elapsed().as_secs_f64();
    verdict(
        10,
        "invariant suite",
        &[
            (failed.is_empty(), format!("{} of {} pass {failed:?}", suite.len() - failed.len(), suite.len())),
            at_most(secs, 300.0, "seconds"),
        ],
        started,
    );
}
