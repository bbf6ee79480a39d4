use nlsx_core::ground_state::{solve_ground_state, GroundStateSolution, ShootingConfig};
use nlsx_core::variational::{INEQUALITY_SLACK, SUPPORT_TOLERANCE};
use nlsx_core::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian(g: &Grid2D, a: f64, w: f64, c: (f64, f64)) -> Field {
    Field::from_fn(g, |x, y| {
        let r2 = (x - c.0).powi(2) + (y - c.1).powi(2);
        Complex64::new(a * (-r2 / (w * w)).exp(), 0.0)
    })
    .unwrap()
}

fn ground(mu: Mu) -> GroundStateSolution {
    solve_ground_state(mu, &ShootingConfig::default()).unwrap()
}

#[test]
fn scaling_law_on_five_fields() {
    let g = make_grid(256, 8.0).unwrap();
    let chirped = Field::from_fn(&g, |x, y| {
        Complex64::from_polar(0.35 * (-(x * x + y * y) / 0.81).exp(), 0.5 * x + 0.3 * y)
    })
    .unwrap();
    let cases = [
        (gaussian(&g, 0.3, 0.8, (0.0, 0.0)), Mu::One, (0.8, 1.3)),
        (gaussian(&g, 0.3, 1.0, (0.0, 0.0)), Mu::Zero, (0.8, 1.3)),
        (gaussian(&g, 0.2, 1.0, (0.3, -0.2)), Mu::One, (0.9, 1.6)),
        (gaussian(&g, 0.4, 0.7, (0.0, 0.0)), Mu::One, (0.7, 1.2)),
        (chirped, Mu::Zero, (0.8, 1.3)),
    ];
    for (k, (field, mu, range)) in cases.iter().enumerate() {
        let curve = scaling_curve(field, *mu, *range, 24).unwrap_or_else(|e| panic!("field {k}: {e}"));
        let res = curve.derivative_residuals();
        assert_eq!(res.len(), 20);
        let worst = res.iter().map(|r| r.1).fold(0.0, f64::max);
        assert!(worst < 1e-4, "field {k}: derivative residual {worst:e}");
        assert!(curve.is_phi_decreasing(0.0), "field {k}: I/λ² not decreasing");
        assert!(curve.to_csv().lines().nth(1) == Some("lambda,S,P,I"));
    }
}

#[test]
fn i_root_of_ground_states_is_one() {
    for (mu, n) in [(Mu::Zero, 256), (Mu::One, 512)] {
        let g = make_grid(n, 8.0).unwrap();
        let q = embed(&ground(mu).profile, &g).unwrap();
        let root = find_i_root(&q, mu).unwrap().unwrap();
        assert!((root - 1.0).abs() < 1e-4, "mu = {mu}: root {root}");
    }
}

#[test]
fn rescale_respects_support_tolerance() {
    let g = make_grid(64, 4.0).unwrap();
    let f = gaussian(&g, 0.3, 0.8, (0.0, 0.0));
    match rescale(&f, 0.2) {
        Err(NlsError::SupportViolation { outside, .. }) => assert!(outside >= SUPPORT_TOLERANCE),
        other => panic!("expected a support violation, got {other:?}"),
    }
}

fn random_field(g: &Grid2D, rng: &mut ChaCha8Rng, q: &Field) -> Field {
    match rng.gen_range(0..4) {
        0 => {
            let a = 10f64.powf(rng.gen_range(-2.0..0.0));
            let w = rng.gen_range(0.4..1.8);
            let c = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            gaussian(g, a, w, c)
        }
        1 => {
            let a = rng.gen_range(0.05..0.9);
            let w = rng.gen_range(0.5..1.5);
            let k = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            Field::from_fn(g, |x, y| {
                Complex64::from_polar(a * (-(x * x + y * y) / (w * w)).exp(), k.0 * x + k.1 * y)
            })
            .unwrap()
        }
        2 => q.scaled(rng.gen_range(0.5..1.5)),
        _ => {
            let a1 = rng.gen_range(0.0..0.6);
            let a2 = rng.gen_range(0.0..0.6);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            Field::from_fn(g, |x, y| {
                let b1 = a1 * (-((x - 1.5).powi(2) + y * y)).exp();
                let b2 = a2 * (-((x + 1.5).powi(2) + y * y)).exp();
                Complex64::new(b1, 0.0) + Complex64::from_polar(b2, phase)
            })
            .unwrap()
        }
    }
}

#[test]
fn invariant_set_bank_has_no_disagreements() {
    let g = make_grid(128, 8.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    for mu in [Mu::Zero, Mu::One] {
        let sol = ground(mu);
        let s_q = sol.certificate.s_threshold;
        let q = embed(&sol.profile, &g).unwrap();
        let mut counts = std::collections::HashMap::new();
        for i in 0..200 {
            let f = random_field(&g, &mut rng, &q);
            let v = match classify(&f, mu, s_q) {
                Ok(v) => v,
                Err(NlsError::Overflow { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!(!v.is_disagreement(), "mu = {mu}, field {i}: {v}");
            if v.set_a == SetA::APlus {
                assert!(v.e_value >= -1e-9, "A_plus member with negative energy: {v}");
            }
            *counts.entry(v.set_a.to_string()).or_insert(0) += 1;
        }
        assert!(counts.get("A_plus").copied().unwrap_or(0) > 20, "{counts:?}");
        assert!(counts.get("A_minus").copied().unwrap_or(0) > 5, "{counts:?}");
    }
}

#[test]
fn scaled_ground_state_escapes_above_threshold() {
    let sol = ground(Mu::One);
    let g = make_grid(512, 8.0).unwrap();
    let lambda = 1.05;
    let psi = Field::from_radial(&g, |r| lambda * sol.profile.value_at(lambda * r)).unwrap();
    let v = classify(&psi, Mu::One, sol.certificate.s_threshold).unwrap();
    assert_eq!((v.set_a, v.set_k), (SetA::AMinus, SetK::KMinus), "{v}");
    assert!(v.e_value > 0.0);
    let gap = blowup_gap(&psi, Mu::One, sol.certificate.s_threshold).unwrap();
    assert!(v.i_value <= gap + INEQUALITY_SLACK);
}

#[test]
fn coercivity_bound_holds_in_a_plus() {
    let sol = ground(Mu::One);
    let g = make_grid(128, 8.0).unwrap();
    for a in [0.05, 0.15, 0.25, 0.3] {
        let f = gaussian(&g, a, 1.0, (0.0, 0.0));
        let bound = coercivity_bound(&f, sol.certificate.s_threshold).unwrap();
        let v = classify(&f, Mu::One, sol.certificate.s_threshold).unwrap();
        assert!(v.i_value >= bound - INEQUALITY_SLACK);
        assert!(bound > 0.0);
    }
    assert_eq!(coercivity_bound(&Field::zeros(&g), sol.certificate.s_threshold).unwrap(), 0.0);
}

#[test]
fn small_gaussian_is_a_plus() {
    let g = make_grid(128, 8.0).unwrap();
    for mu in [Mu::Zero, Mu::One] {
        let s_q = ground(mu).certificate.s_threshold;
        let v = classify(&gaussian(&g, 0.01, 1.0, (0.0, 0.0)), mu, s_q).unwrap();
        assert_eq!((v.set_a, v.set_k), (SetA::APlus, SetK::KPlus));
    }
}

#[test]
fn moser_probe_is_nested_and_refined_inequality_holds() {
    let g = make_grid(256, 8.0).unwrap();
    let mut prev = 0.0;
    for size in [4, 8, 12, 16] {
        let k = kappa_probe(size, &g).unwrap();
        assert!(k.kappa >= prev);
        assert!(k.refined_violations().is_empty());
        assert_eq!(k.members.len(), size);
        prev = k.kappa;
    }
    assert!(matches!(kappa_probe(20, &g), Err(NlsError::Resolution(_))));
    let tiny = gaussian(&g, 0.01, 1.0, (0.0, 0.0));
    assert!(small_data_check(&tiny, prev).unwrap());
}
