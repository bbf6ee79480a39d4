use nlsx_core::evolution::{is_radially_symmetric, ScatteringReport};
use nlsx_core::ground_state::{solve_ground_state, ShootingConfig};
use nlsx_core::virial::make_virial_weight;
use nlsx_core::*;
use num_complex::Complex64;

fn gaussian(g: &Grid2D, a: f64, w: f64) -> Field {
    Field::from_radial(g, |r| a * (-(r / w).powi(2)).exp()).unwrap()
}

fn s_threshold(mu: Mu) -> f64 {
    solve_ground_state(mu, &ShootingConfig::default()).unwrap().certificate.s_threshold
}

#[test]
fn small_gaussian_conserves_mass_and_energy() {
    let g = make_grid(128, 16.0).unwrap();
    let f = gaussian(&g, 0.1, 1.0);
    let rec = evolve(&f, &EvolveConfig::new(2e-3, 0.5, Mu::One).fixed_step()).unwrap();
    assert_eq!(rec.verdict, RunVerdict::ReachedTEnd);
    assert!(rec.drift_mass < 1e-12, "{:e}", rec.drift_mass);
    assert!(rec.drift_energy < 1e-7, "{:e}", rec.drift_energy);
    assert_eq!(rec.times.len(), 26);
    assert!((rec.final_field.time() - 0.5).abs() < 1e-12);
}

#[test]
fn energy_drift_is_second_order_in_dt() {
    let g = make_grid(128, 16.0).unwrap();
    let f = gaussian(&g, 0.3, 1.0);
    let drift = |dt: f64| {
        evolve(&f, &EvolveConfig::new(dt, 0.4, Mu::One).fixed_step().with_stride(25))
            .unwrap()
            .drift_energy
    };
    let (a, b) = (drift(8e-3), drift(4e-3));
    let ratio = a / b;
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}

#[test]
fn adaptive_step_halves_on_energy_jumps() {
    let g = make_grid(128, 16.0).unwrap();
    let f = gaussian(&g, 0.3, 1.0);
    let mut cfg = EvolveConfig::new(8e-3, 0.4, Mu::One);
    cfg.energy_drift_limit = 1e-9;
    let rec = evolve(&f, &cfg).unwrap();
    assert!(rec.halvings > 0);
    assert_eq!(rec.dt_final, 8e-3 / 2f64.powi(rec.halvings as i32));
    // Monitor times are unchanged by halving.
    assert_eq!(rec.times.len(), 6);
}

#[test]
fn negative_energy_bump_trips_detector() {
    let g = make_grid(128, 40.0).unwrap();
    let c = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let f = Field::from_radial(&g, |r| c * (-0.16 * r).exp()).unwrap();
    assert!(functionals(&f, Mu::One).unwrap().energy < 0.0);
    let rec = evolve(&f, &EvolveConfig::new(1e-3, 2.0, Mu::One)).unwrap();
    assert_eq!(rec.verdict, RunVerdict::BlowupDetected);
    let trip = rec.trip_time.unwrap();
    assert!(trip > 0.1 && trip < 0.5, "trip {trip}");
    assert!(rec.to_csv().contains("# trip_time="));
}

#[test]
fn initial_gradient_above_one_is_rejected() {
    let g = make_grid(64, 8.0).unwrap();
    let f = gaussian(&g, 0.7, 1.0);
    assert!(matches!(
        evolve(&f, &EvolveConfig::new(1e-3, 0.01, Mu::One)),
        Err(NlsError::Precondition(_))
    ));
}

#[test]
fn trajectory_csv_layout() {
    let g = make_grid(64, 8.0).unwrap();
    let rec = evolve(&gaussian(&g, 0.2, 1.0), &EvolveConfig::new(1e-3, 0.02, Mu::Zero).with_weight_radius(3.0)).unwrap();
    let csv = rec.to_csv();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "t,mass,grad_sq,energy,action,P,I,L4,L6,L8,virial,tail_fraction");
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + rec.times.len());
    assert!(csv.starts_with("# mu=0\n# verdict=reached_t_end\n"));
}

#[test]
fn virial_monitor_preconditions() {
    let g = make_grid(64, 8.0).unwrap();
    let f = gaussian(&g, 0.2, 1.0);
    let no_weight = evolve(&f, &EvolveConfig::new(1e-3, 0.05, Mu::One)).unwrap();
    assert!(virial_monitor(&no_weight, 1).is_err());
    let rec = evolve(&f, &EvolveConfig::new(1e-3, 0.05, Mu::One).with_weight_radius(3.5)).unwrap();
    assert_eq!(virial_monitor(&rec, 1).unwrap().len(), 4);
    assert!(virial_monitor(&rec, 2).is_err());
    assert!(virial_monitor(&rec, 0).is_err());
}

#[test]
fn virial_residual_shrinks_with_monitor_spacing() {
    let g = make_grid(128, 16.0).unwrap();
    let f = gaussian(&g, 0.3, 1.0);
    let cfg = EvolveConfig::new(2e-3, 0.4, Mu::One).fixed_step().with_stride(5).with_weight_radius(7.0);
    let rec = evolve(&f, &cfg).unwrap();
    let worst = |k| virial_monitor(&rec, k).unwrap().iter().map(|x| x.1).fold(0.0, f64::max);
    let (r1, r2) = (worst(1), worst(2));
    let order = (r2 / r1).log2();
    assert!((order - 2.0).abs() < 0.3, "order {order}");
}

#[test]
fn scattering_preconditions() {
    let g = make_grid(64, 16.0).unwrap();
    let f = gaussian(&g, 0.1, 2.0);
    let s1 = s_threshold(Mu::One);
    let cfg0 = EvolveConfig::new(0.05, 1.0, Mu::Zero);
    assert!(scattering_diagnostic(&f, &cfg0, &[0.5, 1.0], s1).is_err());
    let cfg = EvolveConfig::new(0.05, 1.0, Mu::One).with_stride(2);
    let off = Field::from_fn(&g, |x, y| Complex64::new(0.1 * (-((x - 1.0).powi(2) + y * y) / 4.0).exp(), 0.0)).unwrap();
    assert!(!is_radially_symmetric(&off, 1e-12));
    assert!(scattering_diagnostic(&off, &cfg, &[0.5, 1.0], s1).is_err());
    assert!(scattering_diagnostic(&f, &cfg, &[0.55, 1.0], s1).is_err());
    let rep: ScatteringReport = scattering_diagnostic(&f, &cfg, &[0.5, 1.0], s1).unwrap();
    assert_eq!(rep.increments.len(), 1);
    assert_eq!(rep.l6_ratios.len(), 2);
    assert!(rep.l6_integrals[1] > rep.l6_integrals[0]);
}

#[test]
fn chi_probe_keeps_small_data_inside() {
    let g = make_grid(64, 16.0).unwrap();
    let f = gaussian(&g, 0.2, 1.5);
    let w = make_virial_weight(&g, 6.0).unwrap();
    let probe = chi_invariant_probe(&f, &EvolveConfig::new(0.02, 1.0, Mu::One), &w, s_threshold(Mu::One)).unwrap();
    assert!(probe.all_inside());
    assert_eq!(probe.times.len(), probe.record.times.len());
}

#[test]
fn forward_then_backward_steps_reproduce_the_datum() {
    let g = make_grid(128, 8.0).unwrap();
    let f = Field::from_fn(&g, |x, y| Complex64::from_polar(0.3 * (-(x * x + y * y)).exp(), 0.4 * x)).unwrap();
    let mut u = f.clone();
    for _ in 0..100 {
        u = strang_step(&u, 1e-3, Mu::One).unwrap();
    }
    assert!(f.sup_distance(&u).unwrap() > 1e-3);
    for _ in 0..100 {
        u = strang_step(&u, -1e-3, Mu::One).unwrap();
    }
    let err = f.sup_distance(&u).unwrap();
    assert!(err < 1e-10, "{err:e}");
    assert!(u.time().abs() < 1e-12);
}
