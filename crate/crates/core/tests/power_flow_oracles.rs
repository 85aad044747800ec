mod common;

use common::oracles::{newton_three_bus, two_bus_voltage, Cx, OracleReport};
use mesbench::scenario::ElectricalConfig;
use mesbench::sim::{solve_radial_power_flow, Feeder, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn feeder() -> Feeder {
    Feeder::from_config(&ElectricalConfig::default())
}

/// Line impedances in per-unit computed by hand from the default cable data.
fn hand_impedances() -> (Cx, Cx) {
    let z_base = 400.0_f64 * 400.0 / 100e3;
    let z = Cx::new(0.208 * 0.3 / z_base, 0.080 * 0.3 / z_base);
    (z, z)
}

#[test]
fn feeder_impedance_matches_hand_arithmetic() {
    let f = feeder();
    let (z0, z1) = hand_impedances();
    OracleReport::new(
        "per-unit impedances",
        vec![z0.re, z0.im, z1.re, z1.im],
        vec![f.line_impedance_pu[0].re, f.line_impedance_pu[0].im, f.line_impedance_pu[1].re, f.line_impedance_pu[1].im],
        1e-15,
    )
    .assert();
    // 0.0624 Ω / 1.6 Ω
    assert!((z0.re - 0.039).abs() < 1e-15);
}

#[test]
fn no_load_flat_profile() {
    let s = solve_radial_power_flow(&feeder(), [C64::new(0.0, 0.0); 2]).unwrap();
    for v in s.voltage_magnitudes() {
        assert_eq!(v, 1.0);
    }
    assert_eq!(s.line_flows_kva, [0.0, 0.0]);
    assert_eq!(s.losses_kw, 0.0);
}

#[test]
fn two_bus_closed_form_100kw() {
    // R = 0.0624 Ω, X = 0.024 Ω on the 0.3 km line, 100 kW load, 400 V
    let (z, _) = hand_impedances();
    let v_ref = two_bus_voltage(1.0, 0.0, z.re, z.im, 1.0).unwrap();
    let s = solve_radial_power_flow(&feeder(), [C64::new(-100.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
    let v = s.voltage_magnitudes();
    OracleReport::new("two-bus |V1|", vec![v_ref], vec![v[1]], 1e-6).assert();
    // bus 2 carries no current, so it sits at bus 1's voltage
    assert!((v[2] - v[1]).abs() < 1e-12);
    assert!(v_ref < 1.0 && v_ref > 0.95, "{v_ref}");
}

#[test]
fn two_bus_oracle_edge_cases() {
    assert_eq!(two_bus_voltage(0.0, 0.0, 0.04, 0.015, 1.0).unwrap(), 1.0);
    assert!(two_bus_voltage(20.0, 5.0, 0.04, 0.015, 1.0).is_err());
}

#[test]
fn two_bus_with_reactive_load() {
    let (z, _) = hand_impedances();
    for (p, q) in [(50.0, 16.4), (80.0, -10.0), (-120.0, 0.0), (30.0, 30.0)] {
        let v_ref = two_bus_voltage(p / 100.0, q / 100.0, z.re, z.im, 1.0).unwrap();
        let s = solve_radial_power_flow(&feeder(), [C64::new(-p, -q), C64::new(0.0, 0.0)]).unwrap();
        OracleReport::new(format!("two-bus P={p} Q={q}"), vec![v_ref], vec![s.voltage_magnitudes()[1]], 1e-6).assert();
    }
}

#[test]
fn pv_surplus_raises_voltage() {
    let (z, _) = hand_impedances();
    // 150 kW PV against a 30 kW load at bus 1
    let s = solve_radial_power_flow(&feeder(), [C64::new(120.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
    let v = s.voltage_magnitudes();
    assert!(v[1] > v[0], "{v:?}");
    let v_ref = two_bus_voltage(-1.2, 0.0, z.re, z.im, 1.0).unwrap();
    OracleReport::new("overvoltage", vec![v_ref], vec![v[1]], 1e-6).assert();
    assert!(s.slack_import_kw < 0.0);
}

#[test]
fn sweep_matches_newton_on_random_injections() {
    let f = feeder();
    let (z0, z1) = hand_impedances();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let p = [rng.gen_range(-200.0..200.0), rng.gen_range(-200.0..200.0)];
        let q = [rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0)];
        let sweep = solve_radial_power_flow(&f, [C64::new(p[0], q[0]), C64::new(p[1], q[1])]).unwrap();
        let nr = newton_three_bus(z0, z1, 1.0, [Cx::new(p[0] / 100.0, q[0] / 100.0), Cx::new(p[1] / 100.0, q[1] / 100.0)])
            .unwrap();
        let reference: Vec<f64> = nr.iter().flat_map(|v| [v.re, v.im]).collect();
        let candidate: Vec<f64> = sweep.voltages_pu.iter().flat_map(|v| [v.re, v.im]).collect();
        let rep = OracleReport::new(format!("case {case}: P={p:?} Q={q:?}"), reference, candidate, 1e-6);
        worst = worst.max(rep.max_error());
        rep.assert();
    }
    assert!(worst < 1e-8, "worst deviation {worst:e}");
}

#[test]
fn losses_and_import_balance() {
    let f = feeder();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let p = [rng.gen_range(-200.0..200.0), rng.gen_range(-200.0..200.0)];
        let s = solve_radial_power_flow(&f, [C64::new(p[0], 0.0), C64::new(p[1], 0.0)]).unwrap();
        // import + generation = load + losses
        let residual = s.slack_import_kw + p[0] + p[1] - s.losses_kw;
        assert!(residual.abs() < 1e-6 * p[0].abs().max(p[1].abs()).max(1.0), "{residual}");
        assert!(s.losses_kw >= 0.0);
    }
}

#[test]
fn collapse_reported_not_hidden() {
    let err = solve_radial_power_flow(&feeder(), [C64::new(-5000.0, 0.0), C64::new(-5000.0, 0.0)]);
    assert!(err.is_err(), "{err:?}");
}
