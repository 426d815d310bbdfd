mod common;

use num_complex::Complex64;

use sparse_spectral::eval::{dense_advance, error_metrics, low_frequency_advance, mode_count_cutoff};
use sparse_spectral::solver::{
    advance, initial_condition, step_once, Equation, EquationParams, InitialSpec, Operators,
    SolverState, StepOptions,
};
use sparse_spectral::{CoefficientSpec, GridSpec, LambdaSchedule, SparseSpectrum};

use common::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One TVD-RK2 Burgers step written out on dense arrays with the double-loop
/// convolution, for constant viscosity `nu`.
fn burgers_step_by_hand(grid: &GridSpec, u: &[Complex64], nu: f64, dt: f64) -> Vec<Complex64> {
    let k: Vec<f64> = (0..grid.total())
        .map(|i| if grid.is_nyquist(i) { 0.0 } else { grid.wavevector(i)[0] as f64 })
        .collect();
    let rhs = |u: &[Complex64]| -> Vec<Complex64> {
        let flux = dense_truncated_convolution(grid, u, u);
        (0..u.len())
            .map(|i| -nu * k[i] * k[i] * u[i] - c(0.0, k[i]) * 0.5 * flux[i])
            .collect()
    };
    let l0 = rhs(u);
    let u1: Vec<Complex64> = (0..u.len()).map(|i| u[i] + dt * l0[i]).collect();
    let l1 = rhs(&u1);
    (0..u.len()).map(|i| 0.5 * (u[i] + u1[i]) + 0.5 * dt * l1[i]).collect()
}

#[test]
fn burgers_step_matches_a_hand_written_dense_step() {
    let grid = GridSpec::periodic(1, 32).unwrap();
    let (eps, nu, dt) = (0.1, 0.2, 1e-3);
    let u0 = SparseSpectrum::from_wavevectors(grid, vec![([1, 0], c(0.0, -eps / 2.0)), ([-1, 0], c(0.0, eps / 2.0))])
        .unwrap();
    let ops = Operators::assemble(&EquationParams::new(Equation::Burgers, CoefficientSpec::Constant(nu)), &grid)
        .unwrap();
    let mut s = SolverState::new(u0.clone(), dt).unwrap();
    step_once(&mut s, &ops, 0.0, false).unwrap();
    let want = burgers_step_by_hand(&grid, u0.to_dense().coeffs(), nu, dt);
    assert!(max_diff(s.current.to_dense().coeffs(), &want) < 1e-15);
    // the second harmonic is born at O(ε² dt)
    let h = s.current.at([2, 0]).norm();
    assert!(h > 0.1 * eps * eps * dt && h < eps * eps * dt, "{h}");
}

#[test]
fn huge_lambda_empties_the_state_in_one_step() {
    let grid = GridSpec::periodic(1, 64).unwrap();
    let u0 = initial_condition(&InitialSpec::GaussBump { width: 0.5 }, &grid, 0).unwrap();
    for (eq, coeff, dt) in [
        (Equation::Convection, CoefficientSpec::OscillatoryConvection { freq: 8 }, 0.01),
        (Equation::Parabolic, CoefficientSpec::OscillatoryDiffusion { freq: 8 }, 5e-4),
        (Equation::Burgers, CoefficientSpec::OscillatoryBurgers { freq: 8 }, 5e-4),
    ] {
        let ops = Operators::assemble(&EquationParams::new(eq, coeff), &grid).unwrap();
        let state = SolverState::new(u0.clone(), dt).unwrap();
        let (end, trace) =
            advance(state, &ops, &LambdaSchedule::Fixed(10.0), 1, &StepOptions::default()).unwrap();
        assert!(end.current.is_empty(), "{eq}");
        assert_eq!(trace[0].n_s, 0);
    }
}

#[test]
fn state_bookkeeping() {
    let grid = GridSpec::periodic(1, 64).unwrap();
    let u0 = initial_condition(&InitialSpec::SineLow, &grid, 3).unwrap();
    let dt = 0.01;
    let conv = Operators::assemble(&EquationParams::new(Equation::Convection, CoefficientSpec::Constant(1.0)), &grid)
        .unwrap();
    let mut s = SolverState::new(u0.clone(), dt).unwrap();
    assert!(s.previous.is_none());
    for n in 1..=37 {
        step_once(&mut s, &conv, 1e-6, false).unwrap();
        assert!(s.previous.is_some());
        assert_eq!(s.time(), n as f64 * dt);
    }
    let heat = Operators::assemble(&EquationParams::new(Equation::Parabolic, CoefficientSpec::Constant(1.0)), &grid)
        .unwrap();
    let mut s = SolverState::new(u0, 1e-4).unwrap();
    step_once(&mut s, &heat, 0.0, false).unwrap();
    assert!(s.previous.is_none());
}

#[test]
fn shrinkage_error_shrinks_with_dt() {
    // fixed grid, λ = c dt²: error against a fine-dt dense run is
    // nonincreasing over three halvings of dt
    let grid = GridSpec::periodic(1, 64).unwrap();
    let ops = Operators::assemble(
        &EquationParams::new(Equation::Convection, CoefficientSpec::OscillatoryConvection { freq: 4 }),
        &grid,
    )
    .unwrap();
    let u0 = initial_condition(&InitialSpec::GaussBump { width: 1.0 }, &grid, 0).unwrap();
    let t_end = 0.5;
    let fine_dt = 0.02 / 64.0;
    let reference = dense_advance(&u0.to_dense(), &ops, fine_dt, (t_end / fine_dt) as usize).unwrap();
    let reference = reference.last().unwrap();
    let schedule = LambdaSchedule::power_law(1.0, 2.0).unwrap();
    let mut errors = Vec::new();
    for halvings in 0..4 {
        let dt = 0.02 / f64::from(1 << halvings);
        let n = (t_end / dt).round() as usize;
        let (end, _) = advance(SolverState::new(u0.clone(), dt).unwrap(), &ops, &schedule, n, &StepOptions::default())
            .unwrap();
        errors.push(error_metrics(&end.current.to_dense(), reference).unwrap().l2);
    }
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");
}

#[test]
fn dense_heat_decay_matches_analytic() {
    let grid = GridSpec::periodic(1, 32).unwrap();
    let nu = 0.3;
    let ops = Operators::assemble(&EquationParams::new(Equation::Parabolic, CoefficientSpec::Constant(nu)), &grid)
        .unwrap();
    let k = 3;
    let u0 = SparseSpectrum::from_wavevectors(grid, vec![([k, 0], c(0.5, 0.0)), ([-k, 0], c(0.5, 0.0))]).unwrap();
    let dt = 1e-4;
    let n = 1000;
    let traj = dense_advance(&u0.to_dense(), &ops, dt, n).unwrap();
    let decay = nu * (k * k) as f64;
    let got = traj[n].at([k, 0]).re;
    let exact = 0.5 * (-decay * n as f64 * dt).exp();
    let euler = 0.5 * (1.0 - decay * dt).powi(n as i32);
    assert!((got - euler).abs() < 1e-14);
    // forward Euler truncation: n (decay dt)² / 2 relative
    assert!(((got - exact) / exact).abs() < n as f64 * (decay * dt).powi(2));
}

#[test]
fn low_frequency_limits() {
    let grid = GridSpec::periodic(1, 64).unwrap();
    let ops = Operators::assemble(
        &EquationParams::new(Equation::Parabolic, CoefficientSpec::OscillatoryDiffusion { freq: 8 }),
        &grid,
    )
    .unwrap();
    let u0 = initial_condition(&InitialSpec::GaussBump { width: 0.5 }, &grid, 0).unwrap().to_dense();
    let dense = dense_advance(&u0, &ops, 5e-4, 20).unwrap();
    let full = low_frequency_advance(&u0, &ops, 5e-4, 20, grid.max_resolved()).unwrap();
    assert_eq!(dense, full);
    let mean_only = low_frequency_advance(&u0, &ops, 5e-4, 20, 0).unwrap();
    for s in &mean_only {
        assert_eq!(s, &mean_only[0]);
        assert_eq!(s.coeffs().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }
    assert_eq!(mode_count_cutoff(27, 1), 13);
}

#[test]
fn gauss_bump_spectrum_decays() {
    // beyond k ≈ 16 the coefficients sit at roundoff level
    let grid = GridSpec::periodic(1, 256).unwrap();
    let s = initial_condition(&InitialSpec::GaussBump { width: 0.5 }, &grid, 0).unwrap();
    let mags: Vec<f64> = (2..16).map(|k| s.at([k, 0]).norm()).collect();
    assert!(mags.windows(2).all(|w| w[1] < w[0]));
}
