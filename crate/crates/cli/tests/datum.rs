use nlsx_cli::datum::{build, exp_bump_bound, BumpScale, Datum};
use nlsx_core::ground_state::{solve_ground_state, ShootingConfig};
use nlsx_core::{classify, functionals, make_grid, Mu, SetA, SetK};

#[test]
fn unit_scaled_ground_state_matches_certificate() {
    for (mu, n) in [(Mu::Zero, 512), (Mu::One, 512)] {
        let sol = solve_ground_state(mu, &ShootingConfig::default()).unwrap();
        let g = make_grid(n, 10.0).unwrap();
        let q = build(&Datum::ScaledGroundState { lambda: 1.0 }, &g, mu, Some(&sol.profile)).unwrap();
        let r = functionals(&q, mu).unwrap();
        let c = &sol.certificate;
        for (name, got, want) in [
            ("action", r.action, c.s_threshold),
            ("grad_sq", r.grad_sq, c.grad_q_sq),
            ("mass", r.mass, c.mass_q),
            ("energy", r.energy, c.energy),
        ] {
            assert!(((got - want) / want).abs() < 1e-5, "mu = {mu} {name}: {got} vs {want}");
        }
    }
}

#[test]
fn half_bound_exp_bump_has_negative_energy_for_both_mu() {
    let g = make_grid(256, 40.0).unwrap();
    for mu in [Mu::Zero, Mu::One] {
        let f = build(&Datum::ExpBump { scale: BumpScale::FractionOfBound(0.5) }, &g, mu, None).unwrap();
        assert!(functionals(&f, mu).unwrap().energy < 0.0);
        assert!(exp_bump_bound(mu).unwrap() > 0.3);
    }
}

#[test]
fn tiny_gaussian_is_a_plus() {
    let g = make_grid(128, 8.0).unwrap();
    let f = build(&Datum::Gaussian { amplitude: 0.01, width: 1.0, center: (0.0, 0.0) }, &g, Mu::One, None).unwrap();
    let s = solve_ground_state(Mu::One, &ShootingConfig::default()).unwrap().certificate.s_threshold;
    let v = classify(&f, Mu::One, s).unwrap();
    assert_eq!((v.set_a, v.set_k), (SetA::APlus, SetK::KPlus));
}

#[test]
fn scaled_ground_state_rejects_reach_beyond_profile() {
    let sol = solve_ground_state(Mu::One, &ShootingConfig::default()).unwrap();
    let g = make_grid(64, 24.0).unwrap();
    let err = build(&Datum::ScaledGroundState { lambda: 1.0 }, &g, Mu::One, Some(&sol.profile)).unwrap_err();
    assert!(err.to_string().contains("r_max"));
}
