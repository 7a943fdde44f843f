use proptest::prelude::*;

use sastirap::cli_io::{emit_config, parse_config_str};
use sastirap::experiments::ScenarioKind;

fn family() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("gaussian"), Just("exponential"), Just("trigonometric")]
}

fn protocol() -> impl Strategy<Value = &'static str> {
    prop_oneof![
        Just("stirap"),
        Just("sa"),
        Just("exact-cd"),
        Just("sa_stirap")
    ]
}

fn initial_state() -> impl Strategy<Value = Option<&'static str>> {
    prop_oneof![
        Just(None),
        Just(Some("default")),
        Just(Some("m1")),
        Just(Some("p1")),
        Just(Some("dark"))
    ]
}

/// Valid trace configurations in the TOML surface syntax.
fn trace_config() -> impl Strategy<Value = String> {
    (
        family(),
        protocol(),
        0.1f64..10.0,
        0.2f64..20.0,
        (0.02f64..0.3, any::<bool>()),
        (0.0f64..0.3, any::<bool>()),
        prop_oneof![(-30.0f64..-0.5), (0.5f64..30.0)],
        proptest::option::of(-3.2f64..3.2),
        initial_state(),
        proptest::option::of(1000usize..50_000),
        proptest::option::of(prop_oneof![Just("magnus4"), Just("midpoint"), Just("rk4")]),
    )
        .prop_map(
            |(family, protocol, omega0, t, (sigma, sigma_abs), (dt, dt_abs), delta, phase, init, steps, method)| {
                let mut s = format!(
                    "family = \"{family}\"\nprotocol = \"{protocol}\"\nomega0_mhz = {omega0:?}\nT_us = {t:?}\ndelta_mhz = {delta:?}\n"
                );
                if family != "trigonometric" {
                    if sigma_abs {
                        s += &format!("sigma_us = {:?}\n", sigma * t);
                    } else {
                        s += &format!("sigma_over_T = {sigma:?}\n");
                    }
                }
                if family == "gaussian" {
                    if dt_abs {
                        s += &format!("delta_t_us = {:?}\n", dt * t);
                    } else {
                        s += &format!("dt_over_T = {dt:?}\n");
                    }
                }
                if let Some(p) = phase {
                    s += &format!("phase_a_rad = {p:?}\n");
                }
                if let Some(i) = init {
                    s += &format!("initial_state = \"{i}\"\n");
                }
                if let Some(n) = steps {
                    s += &format!("steps = {n}\n");
                }
                if let Some(m) = method {
                    s += &format!("method = \"{m}\"\n");
                }
                s
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_emit_parse_is_identity(text in trace_config()) {
        let first = parse_config_str(ScenarioKind::PopulationTrace, &text).unwrap();
        let emitted = emit_config(&first);
        let second = parse_config_str(ScenarioKind::PopulationTrace, &emitted).unwrap();
        prop_assert_eq!(&first, &second);
        // the echo is a fixed point
        prop_assert_eq!(emit_config(&second), emitted);
    }

    #[test]
    fn frequencies_convert_to_angular_units(omega0 in 0.01f64..50.0) {
        let text = format!("family = \"trigonometric\"\nprotocol = \"stirap\"\nomega0_mhz = {omega0:?}\nT_us = 1\n");
        let cfg = parse_config_str(ScenarioKind::PopulationTrace, &text).unwrap();
        prop_assert_eq!(cfg.scenario.pulse.omega0, 2.0 * std::f64::consts::PI * omega0);
    }
}
