use nalgebra::Complex;

use super::heat_pump::heat_pump_step;
use super::power_flow::{solve_radial_power_flow, Feeder};
use super::tank::{TankParams, TankState};
use super::thermal::{solve_thermal_network, TankInjection};
use super::trajectory::{StepRecord, Trajectory};
use super::{SimError, SimErrorKind};
use crate::control::{
    flex_heat_step, voltage_power_limit, FlexHeatInput, FlexHeatState, FlexHeatThresholds, Mode,
    VoltageControllerConfig,
};
use crate::scenario::{load_profiles, BenchmarkConfig, Profiles};
use crate::WATER_CP;

/// Minimum temperature lift across the charge loop before the heat pump is
/// held off, K.
const MIN_CHARGE_LIFT_K: f64 = 1.0;

/// Runs the benchmark over the configured horizon.
pub fn simulate(config: &BenchmarkConfig) -> Result<Trajectory, SimError> {
    config.validate().map_err(|e| SimError::setup(e.into()))?;
    let profiles = load_profiles(config).map_err(|e| SimError::setup(e.into()))?;
    simulate_with_profiles(config, &profiles)
}

/// Runs the benchmark on explicit (unscaled) profiles.
///
/// Each step, in order: read profiles; controllers act on the previous
/// step's bus-1 voltage and PV surplus and on the current tank
/// temperatures; heat pump and tank advance; the heating network is solved
/// with the tank's discharge; the feeder is solved with PV at buses 1–2 and
/// loads plus heat pump at their buses.
pub fn simulate_with_profiles(config: &BenchmarkConfig, profiles: &Profiles) -> Result<Trajectory, SimError> {
    config.validate().map_err(|e| SimError::setup(e.into()))?;
    let steps = config.steps();
    if profiles.len() < steps {
        return Err(SimError::setup(SimErrorKind::Profiles(format!(
            "{} profile rows for {steps} steps",
            profiles.len()
        ))));
    }
    let dt = config.step_s as f64;
    let feeder = Feeder::from_config(&config.electrical);
    let vc = VoltageControllerConfig::from_config(config);
    let hp = &config.heat_pump;
    let th = &config.thermal;
    let tank_params = TankParams {
        loss_coefficient_w_per_m2_k: config.tank.loss_coefficient_w_per_m2_k,
        conductivity_w_per_m_k: config.tank.conductivity_w_per_m_k,
        return_temperature_c: th.return_temperature_c,
    };
    let tan_phi = config.electrical.load_power_factor.acos().tan();
    let pv_peak = config.pv_peaks_kw();
    let (ls, hs) = (config.profiles.load_scaling, config.profiles.heat_scaling);

    let mut tank = TankState::from_config(&config.tank);
    let mut flex = FlexHeatState::new(FlexHeatThresholds::from_config(config));
    let mut prev_v1 = config.electrical.slack_voltage_pu;
    let mut prev_surplus = 0.0;
    let mut records = Vec::with_capacity(steps);

    for k in 0..steps {
        let at = |kind: SimErrorKind| SimError { step: Some(k), kind };

        // (1) profiles
        let pv = [pv_peak[0] * profiles.pv_normalized[k], pv_peak[1] * profiles.pv_normalized[k]];
        let load = [profiles.electrical_load[0][k] * ls, profiles.electrical_load[1][k] * ls];
        let heat = [profiles.heat_load[0][k] * hs, profiles.heat_load[1][k] * hs];

        // (2) controllers on delayed measurements
        let p_limit = if config.control.voltage_control_enabled {
            voltage_power_limit(prev_v1, &vc)
        } else {
            hp.rated_power_kw
        };
        let (hp_setpoint, discharge_enable) = if config.control.flex_heat_enabled {
            let (next, out) = flex_heat_step(
                &flex,
                &FlexHeatInput {
                    t_top_c: tank.top_c(),
                    t_bottom_c: tank.bottom_c(),
                    pv_surplus_kw: prev_surplus,
                    p_limit_kw: p_limit,
                    hp_min_op_kw: hp.min_operating_kw,
                },
            );
            flex = next;
            (out.hp_setpoint_kw, out.discharge_enable)
        } else {
            (0.0, false)
        };

        // (3) heat pump and tank
        let delivery_c = config.tank.charge_setpoint_c;
        let lift = delivery_c - tank.bottom_c();
        let p_el = if lift >= MIN_CHARGE_LIFT_K { hp_setpoint } else { 0.0 };
        let sink_c = 0.5 * (tank.bottom_c() + delivery_c);
        let hp_out = heat_pump_step(p_el, hp.source_temperature_c, sink_c, hp).map_err(|e| at(e.into()))?;
        let charge_mdot = if p_el > 0.0 { hp_out.q_th_kw * 1e3 / (WATER_CP * lift) } else { 0.0 };

        let demand_total = heat[0] + heat[1];
        let top_lift = tank.top_c() - th.return_temperature_c;
        let discharge_mdot = if discharge_enable && demand_total > 0.0 && top_lift > MIN_CHARGE_LIFT_K {
            config.tank.discharge_share * demand_total * 1e3 / (WATER_CP * top_lift)
        } else {
            0.0
        };
        let (next_tank, tank_energy) = tank
            .step(&tank_params, (charge_mdot, delivery_c), discharge_mdot, th.ground_temperature_c, dt)
            .map_err(|e| at(e.into()))?;

        // (4) heating network
        let injection = (discharge_mdot > 0.0).then_some(TankInjection {
            mdot_kg_s: discharge_mdot,
            temperature_c: tank_energy.discharge_outlet_c,
        });
        let thermal = solve_thermal_network(th, heat, injection).map_err(|e| at(e.into()))?;

        // (5) feeder
        let injections = [
            Complex::new(pv[0] - load[0], -load[0] * tan_phi),
            Complex::new(pv[1] - load[1] - p_el, -load[1] * tan_phi),
        ];
        let el = solve_radial_power_flow(&feeder, injections).map_err(|e| at(e.into()))?;
        let v = el.voltage_magnitudes();
        let loading = el.line_loading_pct(&feeder);

        let mode = if config.control.flex_heat_enabled { flex.mode } else { Mode::GridOnly };
        records.push(StepRecord {
            step: k,
            v1_pu: v[1],
            v2_pu: v[2],
            line0_loading_pct: loading[0],
            hp_p_el_kw: p_el,
            hp_q_th_kw: hp_out.q_th_kw,
            cop: hp_out.cop,
            tank_top_c: next_tank.top_c(),
            tank_bottom_c: next_tank.bottom_c(),
            t_critical_c: thermal.critical_temperature_c(),
            heat_ext_kw: thermal.external_heat_kw,
            pv_kw: pv[0] + pv[1],
            export_kw: (-el.slack_import_kw).max(0.0),
            mode,
            line1_loading_pct: loading[1],
            slack_import_kw: el.slack_import_kw,
            consumer_load_kw: load[0] + load[1],
            losses_kw: el.losses_kw,
            p_limit_kw: p_limit,
            heat_demand_kw: demand_total,
            tank_heat_kw: thermal.tank_heat_kw,
            pipe_losses_kw: thermal.pipe_loss_total_kw(),
            tank_stored_change_j: tank_energy.stored_after_j - tank_energy.stored_before_j,
            tank_in_j: tank_energy.enthalpy_in_j,
            tank_out_j: tank_energy.enthalpy_out_j,
            tank_loss_j: tank_energy.ambient_loss_j,
            tank_charge_j: tank_energy.charge_heat_j,
            tank_discharge_j: tank_energy.discharge_heat_j,
        });

        tank = next_tank;
        prev_v1 = v[1];
        prev_surplus = (pv[0] + pv[1] - load[0] - load[1]).max(0.0);
    }

    Ok(Trajectory { step_s: config.step_s, records })
}
