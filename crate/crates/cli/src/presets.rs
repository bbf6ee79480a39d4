//! Built-in experiment specs, one per scenario.

pub const PRESETS: &[(&str, &str)] = &[
    ("negative-energy-blowup", NEGATIVE_ENERGY_BLOWUP),
    ("small-data-global", SMALL_DATA_GLOBAL),
    ("global-a-plus", GLOBAL_A_PLUS),
    ("above-threshold-escape", ABOVE_THRESHOLD_ESCAPE),
    ("a-minus-blowup", A_MINUS_BLOWUP),
    ("scattering-trend", SCATTERING_TREND),
    ("chi-probe", CHI_PROBE),
    ("virial-spreading", VIRIAL_SPREADING),
    ("standing-wave", STANDING_WAVE),
    ("conservation", CONSERVATION),
    ("scaling-curve", SCALING_CURVE),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub const NEGATIVE_ENERGY_BLOWUP: &str = "\
name = negative-energy-blowup
mu = 1

[grid]
n = 256
L = 40

[datum]
kind = exp_bump
bound_fraction = 0.5

[evolve]
dt = 1e-3
t_end = 2
stride = 10
adaptive = true
expect = blowup_detected
refinements = 512:1e-3, 512:5e-4
trip_stability = 0.1

[analyses]
run = classify

[classify]
energy = negative
";

pub const SMALL_DATA_GLOBAL: &str = "\
name = small-data-global
mu = 1

[grid]
n = 256
L = 32

[datum]
kind = gaussian
amplitude = 0.01
width = 1
center = 0, 0

[evolve]
dt = 1e-2
t_end = 20
stride = 50
adaptive = true
expect = reached_t_end
grad_bound = true
persistence = true
mass_drift = 1e-12

[analyses]
run = classify, mt_probe

[classify]
expect_a = A_plus
expect_k = K_plus

[mt_probe]
family_size = 8
n = 256
L = 8
expect_small_data = true
";

pub const GLOBAL_A_PLUS: &str = "\
name = global-a-plus
mu = 1

[grid]
n = 256
L = 32

[datum]
kind = gaussian
amplitude = 0.3
width = 1
center = 0, 0

[evolve]
dt = 1e-2
t_end = 20
stride = 50
adaptive = true
expect = reached_t_end
grad_bound = true
persistence = true

[analyses]
run = classify

[classify]
expect_a = A_plus
expect_k = K_plus
";

pub const ABOVE_THRESHOLD_ESCAPE: &str = "\
name = above-threshold-escape
mu = 1

[grid]
n = 512
L = 8

[datum]
kind = scaled_ground_state
lambda = 1.05

[analyses]
run = classify

[classify]
expect_a = A_minus
expect_k = K_minus
energy = nonnegative
";

pub const A_MINUS_BLOWUP: &str = "\
name = a-minus-blowup
mu = 1

[grid]
n = 512
L = 8

[datum]
kind = scaled_ground_state
lambda = 1.05

[evolve]
dt = 1e-4
t_end = 1
stride = 5
adaptive = true
expect = blowup_detected
refinements = 512:5e-5
trip_stability = 0.1

[analyses]
run = classify

[classify]
expect_a = A_minus
expect_k = K_minus
energy = nonnegative
";

pub const SCATTERING_TREND: &str = "\
name = scattering-trend
mu = 1

[grid]
n = 256
L = 64

[datum]
kind = gaussian
amplitude = 0.1
width = 3
center = 0, 0

[evolve]
dt = 0.02
t_end = 40
stride = 25
adaptive = false
expect = reached_t_end
grad_bound = true

[analyses]
run = classify, scattering

[classify]
expect_a = A_plus

[scattering]
checkpoints = 2.5, 5, 10, 20, 40
";

pub const CHI_PROBE: &str = "\
name = chi-probe
mu = 1

[grid]
n = 128
L = 16

[datum]
kind = gaussian
amplitude = 0.2
width = 1.5
center = 0, 0

[evolve]
dt = 0.01
t_end = 2
stride = 5
adaptive = false
expect = reached_t_end

[analyses]
run = classify, chi_probe

[classify]
expect_a = A_plus

[chi_probe]
radius = 6
";

pub const VIRIAL_SPREADING: &str = "\
name = virial-spreading
mu = 1

[grid]
n = 256
L = 16

[datum]
kind = gaussian
amplitude = 0.3
width = 1
center = 0, 0

[evolve]
dt = 1e-3
t_end = 0.5
stride = 5
adaptive = false
weight_radius = 7
expect = reached_t_end

[analyses]
run = virial

[virial]
every = 1, 2, 4
order = 2
order_tolerance = 0.3
";

pub const STANDING_WAVE: &str = "\
name = standing-wave
mu = 0

[grid]
n = 512
L = 10

[datum]
kind = scaled_ground_state
lambda = 1

[evolve]
dt = 5e-5
t_end = 0.05
stride = 10
adaptive = false
weight_radius = 4.9
expect = reached_t_end

[analyses]
run = virial

[virial]
every = 1
tolerance = 1e-5
";

pub const CONSERVATION: &str = "\
name = conservation
mu = 1

[grid]
n = 256
L = 16

[datum]
kind = gaussian
amplitude = 0.1
width = 1
center = 0, 0

[evolve]
dt = 1e-3
t_end = 1
stride = 50
adaptive = false
expect = reached_t_end
mass_drift = 1e-12
energy_drift = 1e-8
";

pub const SCALING_CURVE: &str = "\
name = scaling-curve
mu = 1

[grid]
n = 256
L = 8

[datum]
kind = gaussian
amplitude = 0.3
width = 0.8
center = 0, 0

[analyses]
run = classify, curve

[curve]
lambda_min = 0.8
lambda_max = 1.3
count = 24
tolerance = 1e-4
";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::ExperimentSpec;

    #[test]
    fn every_preset_parses() {
        for (name, text) in PRESETS {
            let spec = ExperimentSpec::parse(text, None).unwrap_or_else(|e| panic!("{name}: {e:#}"));
            assert_eq!(spec.name, *name);
        }
    }
}
