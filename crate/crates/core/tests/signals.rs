use filtres_core::signals::{
    generate_sprott, integrate_lorenz, sprott_system, uniform_noise, LorenzParams, SPROTT_CATALOG, SPROTT_DT,
};

#[test]
fn lorenz_stays_on_attractor() {
    // Bounds from a 10^6-step brute-force run: max|x| = 19.3, max z = 47.1.
    let s = integrate_lorenz(&LorenzParams::default(), 100_000, 1000).unwrap();
    let max_x = s.column(0).iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let max_z = s.column(2).iter().fold(f64::MIN, |a, &v| a.max(v));
    assert!(max_x < 25.0, "max |x| = {max_x}");
    assert!(max_z < 55.0, "max z = {max_z}");
    assert!(max_x > 15.0, "trajectory collapsed: {max_x}");
}

#[test]
fn lorenz_is_deterministic() {
    let p = LorenzParams::default();
    assert_eq!(integrate_lorenz(&p, 5000, 100).unwrap(), integrate_lorenz(&p, 5000, 100).unwrap());
}

/// Benettin's method with two trajectories, each advanced through the public
/// integrator one sample at a time and renormalized to the reference
/// separation after every sample.
#[test]
fn largest_lyapunov_exponent() {
    let base = LorenzParams::default();
    let d0 = 1e-8;
    let mut a = integrate_lorenz(&base, 1, 2000).unwrap();
    let mut pa = [a.column(0)[0], a.column(1)[0], a.column(2)[0]];
    let mut pb = [pa[0] + d0, pa[1], pa[2]];
    let steps = 150_000;
    let mut sum = 0.0;
    for _ in 0..steps {
        a = integrate_lorenz(&LorenzParams { x0: pa, ..base }, 1, 1).unwrap();
        let b = integrate_lorenz(&LorenzParams { x0: pb, ..base }, 1, 1).unwrap();
        let na = [a.column(0)[0], a.column(1)[0], a.column(2)[0]];
        let nb = [b.column(0)[0], b.column(1)[0], b.column(2)[0]];
        let d = ((nb[0] - na[0]).powi(2) + (nb[1] - na[1]).powi(2) + (nb[2] - na[2]).powi(2)).sqrt();
        sum += (d / d0).ln();
        pa = na;
        pb = [na[0] + (nb[0] - na[0]) * d0 / d, na[1] + (nb[1] - na[1]) * d0 / d, na[2] + (nb[2] - na[2]) * d0 / d];
    }
    let lambda = sum / (steps as f64 * base.dt);
    assert!((lambda - 0.9).abs() < 0.05, "lyapunov exponent {lambda}");
}

fn rk4_error_ratio(h: f64) -> f64 {
    let at_t1 = |dt: f64| {
        let n = (1.0 / dt).round() as usize;
        let s = integrate_lorenz(&LorenzParams { dt, ..Default::default() }, n + 1, 0).unwrap();
        [s.column(0)[n], s.column(1)[n], s.column(2)[n]]
    };
    let reference = at_t1(h / 64.0);
    let err = |v: [f64; 3]| v.iter().zip(&reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    err(at_t1(h)) / err(at_t1(h / 2.0))
}

/// Error at t = 1 for step h against an h/64 reference shrinks 16x when h is
/// halved. The fifth-order term still dominates at the default 0.02 (ratio
/// near 30), so the order is measured where the error is asymptotic.
#[test]
fn rk4_fourth_order() {
    let ratio = rk4_error_ratio(0.00125);
    assert!((ratio - 16.0).abs() < 4.0, "convergence ratio {ratio}");
    let coarse = rk4_error_ratio(0.02);
    assert!(coarse > 16.0 && coarse < 64.0, "coarse ratio {coarse}");
}

#[test]
fn every_sprott_system_bounded() {
    for id in 1..=19 {
        let sys = sprott_system(id).unwrap();
        let s = generate_sprott(id, SPROTT_DT, 100_000, 100, sys.initial_condition).unwrap();
        let x = s.column(0);
        let max = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
        assert!(max < 100.0, "system {} escaped: {max}", sys.label);
        assert!(var > 1e-3, "system {} settled to a point", sys.label);
    }
}

#[test]
fn sprott_is_deterministic() {
    let ic = sprott_system(1).unwrap().initial_condition;
    let a = generate_sprott(1, SPROTT_DT, 2000, 0, ic).unwrap();
    let b = generate_sprott(1, SPROTT_DT, 2000, 0, ic).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.names(), ["x"]);
}

/// Right-hand sides evaluated at (1, 2, 3) against values worked out by hand
/// from the documented equations.
#[test]
fn sprott_coefficients() {
    let expected: [[f64; 3]; 19] = [
        [2.0, 5.0, -3.0],   // A
        [6.0, -1.0, -1.0],  // B
        [6.0, -1.0, 0.0],   // C
        [-2.0, 4.0, 15.0],  // D
        [6.0, -1.0, -3.0],  // E
        [5.0, 0.0, -2.0],   // F
        [3.4, 1.0, 1.0],    // G
        [7.0, 2.0, -2.0],   // H
        [-0.4, 4.0, 2.0],   // I
        [6.0, -1.0, 5.0],   // J
        [-1.0, -1.0, 1.9],  // K
        [13.7, -1.1, 0.0],  // L
        [-3.0, -3.0, 5.4],  // M
        [-4.0, 10.0, -3.0], // N
        [2.0, -2.0, 9.4],   // O
        [8.4, 3.0, 3.0],    // P
        [-3.0, -1.0, 8.6],  // Q
        [-1.1, 3.4, -1.0],  // R
        [-9.0, 10.0, 2.0],  // S
    ];
    for (sys, want) in SPROTT_CATALOG.iter().zip(expected) {
        let got = (sys.rhs)(&[1.0, 2.0, 3.0]);
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "system {}: {got:?} vs {want:?}", sys.label);
        }
    }
}

#[test]
fn uniform_noise_moments() {
    let s = uniform_noise(42, 100_000).unwrap();
    let x = s.column(0);
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / x.len() as f64;
    assert!(mean.abs() < 0.02, "mean {mean}");
    assert!((var - 1.0 / 3.0).abs() < 0.02, "variance {var}");
    assert!(x.iter().all(|v| (-1.0..=1.0).contains(v)));
    assert_eq!(s, uniform_noise(42, 100_000).unwrap());
    assert_ne!(s, uniform_noise(43, 100_000).unwrap());
}
