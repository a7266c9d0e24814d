//! Charge and energy accounting for one analogue output transition.
//!
//! A solved gate is reduced to a two-resistor divider driving the output
//! capacitance: `r1` from the supply, `r2` to ground, `c_out` at their
//! junction. Settling from `v_out_1` towards the equilibrium
//! `v_out_2 = vdd·r2/(r1+r2)` is a single-pole exponential with time
//! constant `r_parallel·c_out`, and the supply charge over `l` time
//! constants splits into a leakage term and a charging term:
//!
//! q_tot = t_set·vdd/(r1+r2) + c_out·Δv_out·q_div·(1−e^(−l))
//!
//! The module provides the closed forms, an equivalent form expressed
//! through `q_div` alone, an upper energy bound, a trapezoidal transient
//! integrator used as an independent check, and the bridge that extracts
//! effective divider resistances from a solved gate.

use crate::error::{Error, Result};
use crate::netlist::GateCircuit;
use crate::solver::{solve_dc, supply_current, OperatingPoint};

/// Default output capacitance when a gate does not specify one.
pub const DEFAULT_C_OUT: f64 = 10e-15;

/// Supply branch currents below this magnitude are treated as cut off when
/// extracting effective divider resistances.
pub const CUTOFF_CURRENT: f64 = 1e-15;

fn require(ok: bool, name: &'static str, value: f64, constraint: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            constraint,
        })
    }
}

/// Divider fraction r2/(r1+r2).
pub fn q_div(r1: f64, r2: f64) -> Result<f64> {
    require(r1 > 0.0 && r1.is_finite(), "r1", r1, "> 0")?;
    require(r2 > 0.0 && r2.is_finite(), "r2", r2, "> 0")?;
    Ok(r2 / (r1 + r2))
}

/// Energy of charging an output capacitance across the full supply,
/// c_out·vdd²/2.
pub fn e_flip(c_out: f64, vdd: f64) -> Result<f64> {
    require(c_out >= 0.0 && c_out.is_finite(), "c_out", c_out, ">= 0")?;
    require(vdd >= 0.0 && vdd.is_finite(), "vdd", vdd, ">= 0")?;
    Ok(0.5 * c_out * vdd * vdd)
}

/// Charge expressed in units of one full output toggle, q/(c_out·vdd).
pub fn toggle_equivalents(q: f64, c_out: f64, vdd: f64) -> Result<f64> {
    require(c_out > 0.0 && c_out.is_finite(), "c_out", c_out, "> 0")?;
    require(vdd > 0.0 && vdd.is_finite(), "vdd", vdd, "> 0")?;
    Ok(q / (c_out * vdd))
}

/// Two effective resistances and the output capacitance they drive, plus the
/// transition endpoints of one settling event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DividerModel {
    r1: f64,
    r2: f64,
    c_out: f64,
    vdd: f64,
    v_out_1: f64,
    v_out_2: f64,
}

impl DividerModel {
    /// Build a model; the equilibrium output `v_out_2` is derived from the
    /// divider so it always satisfies v_out_2 = vdd·r2/(r1+r2).
    pub fn new(r1: f64, r2: f64, c_out: f64, vdd: f64, v_out_1: f64) -> Result<Self> {
        require(r1 > 0.0 && r1.is_finite(), "r1", r1, "> 0")?;
        require(r2 > 0.0 && r2.is_finite(), "r2", r2, "> 0")?;
        require(c_out > 0.0 && c_out.is_finite(), "c_out", c_out, "> 0")?;
        require(vdd > 0.0 && vdd.is_finite(), "vdd", vdd, "> 0")?;
        require(
            (0.0..=vdd).contains(&v_out_1),
            "v_out_1",
            v_out_1,
            "within [0, vdd]",
        )?;
        let v_out_2 = vdd * r2 / (r1 + r2);
        Ok(Self {
            r1,
            r2,
            c_out,
            vdd,
            v_out_1,
            v_out_2,
        })
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn c_out(&self) -> f64 {
        self.c_out
    }

    pub fn vdd(&self) -> f64 {
        self.vdd
    }

    pub fn v_out_1(&self) -> f64 {
        self.v_out_1
    }

    pub fn v_out_2(&self) -> f64 {
        self.v_out_2
    }

    pub fn q_div(&self) -> f64 {
        self.r2 / (self.r1 + self.r2)
    }

    pub fn r_parallel(&self) -> f64 {
        self.r1 * self.r2 / (self.r1 + self.r2)
    }

    /// Settling time constant r_parallel·c_out.
    pub fn tau(&self) -> f64 {
        self.r_parallel() * self.c_out
    }

    /// Output swing v_out_2 − v_out_1 of the transition.
    pub fn delta_v(&self) -> f64 {
        self.v_out_2 - self.v_out_1
    }

    /// Output voltage at time `t` after the input step.
    pub fn output_at(&self, t: f64) -> f64 {
        self.v_out_2 - self.delta_v() * (-t / self.tau()).exp()
    }

    /// Same model with the transition started from a different voltage.
    pub fn with_initial(&self, v_out_1: f64) -> Result<Self> {
        Self::new(self.r1, self.r2, self.c_out, self.vdd, v_out_1)
    }

    /// Reflection that swaps the rails: r1↔r2 and voltages mapped through
    /// v → vdd − v, which flips the sign of the output swing.
    pub fn mirrored(&self) -> Self {
        Self {
            r1: self.r2,
            r2: self.r1,
            c_out: self.c_out,
            vdd: self.vdd,
            v_out_1: self.vdd - self.v_out_1,
            v_out_2: self.vdd - self.v_out_2,
        }
    }
}

/// Charge and energy bookkeeping of one settling event over `l` time
/// constants.
#[derive(Debug, Clone, Copy)]
pub struct EnergyReport {
    /// Divider fraction r2/(r1+r2).
    pub q_div: f64,
    /// r1·r2/(r1+r2).
    pub r_parallel: f64,
    /// Settling window l·r_parallel·c_out, seconds.
    pub t_set: f64,
    /// Supply charge spent holding the divider: t_set·vdd/(r1+r2).
    pub q_leak: f64,
    /// Supply charge routed into the output capacitance (signed).
    pub q_charge: f64,
    /// q_leak + q_charge.
    pub q_tot: f64,
    /// The same total computed through the q_div-only form
    /// l·c_out·vdd·q_div·(1−q_div) + q_charge.
    pub q_tot_alt: f64,
    /// Capacitor charge of an ideal lossless transition, c_out·Δv_out.
    pub q_ideal: f64,
    /// Upper energy bound t_set·vdd²/(r1+r2) + vdd·c_out·Δv_out·(1−e^(−l)),
    /// evaluated on the rail-mirrored model when the swing is negative.
    pub e_upper: f64,
    /// Reference full-swing charging energy c_out·vdd²/2.
    pub e_flip_ref: f64,
    /// Settling window in time constants.
    pub l: f64,
    /// Whether e_upper was evaluated on the mirrored model.
    pub mirrored: bool,
}

/// Supply charge of one settling event, in both closed forms.
pub fn q_tot(model: &DividerModel, l: f64) -> Result<EnergyReport> {
    require(l >= 0.0 && l.is_finite(), "l", l, ">= 0")?;
    let q_div = model.q_div();
    let r_parallel = model.r_parallel();
    let t_set = l * r_parallel * model.c_out;
    let settle = 1.0 - (-l).exp();
    let delta_v = model.delta_v();

    let q_leak = t_set * model.vdd / (model.r1 + model.r2);
    let q_charge = model.c_out * delta_v * q_div * settle;
    let q_leak_alt = l * model.c_out * model.vdd * q_div * (1.0 - q_div);

    let mirrored = delta_v < 0.0;
    let upper_model = if mirrored { model.mirrored() } else { model.clone() };
    let e_upper = e_upper_value(&upper_model, l);

    Ok(EnergyReport {
        q_div,
        r_parallel,
        t_set,
        q_leak,
        q_charge,
        q_tot: q_leak + q_charge,
        q_tot_alt: q_leak_alt + q_charge,
        q_ideal: model.c_out * delta_v,
        e_upper,
        e_flip_ref: 0.5 * model.c_out * model.vdd * model.vdd,
        l,
        mirrored,
    })
}

fn e_upper_value(model: &DividerModel, l: f64) -> f64 {
    let t_set = l * model.tau();
    let settle = 1.0 - (-l).exp();
    t_set * model.vdd * model.vdd / (model.r1 + model.r2)
        + model.vdd * model.c_out * model.delta_v() * settle
}

/// Upper bound on the supply energy of one settling event. Models with a
/// negative output swing are mirrored through the rails first, which leaves
/// the bound applicable to the physically identical transition.
pub fn e_upper(model: &DividerModel, l: f64) -> Result<f64> {
    require(l >= 0.0 && l.is_finite(), "l", l, ">= 0")?;
    if model.delta_v() < 0.0 {
        Ok(e_upper_value(&model.mirrored(), l))
    } else {
        Ok(e_upper_value(model, l))
    }
}

/// Trapezoidal integration of the supply current and the instantaneous
/// resistor dissipation over the settling window; returns
/// (supply charge, dissipated energy).
pub fn transient_oracle(model: &DividerModel, l: f64, dt_fraction: f64) -> Result<(f64, f64)> {
    require(l >= 0.0 && l.is_finite(), "l", l, ">= 0")?;
    require(
        dt_fraction > 0.0 && dt_fraction <= 1e-3,
        "dt_fraction",
        dt_fraction,
        "within (0, 1e-3]",
    )?;
    if l == 0.0 {
        return Ok((0.0, 0.0));
    }
    let tau = model.tau();
    let t_set = l * tau;
    let steps = (l / dt_fraction).ceil() as usize;
    let dt = t_set / steps as f64;

    let supply_current_at = |t: f64| (model.vdd - model.output_at(t)) / model.r1;
    let dissipation_at = |t: f64| {
        let v = model.output_at(t);
        let i1 = (model.vdd - v) / model.r1;
        let i2 = v / model.r2;
        i1 * i1 * model.r1 + i2 * i2 * model.r2
    };

    let mut q = 0.5 * (supply_current_at(0.0) + supply_current_at(t_set));
    let mut e = 0.5 * (dissipation_at(0.0) + dissipation_at(t_set));
    for k in 1..steps {
        let t = k as f64 * dt;
        q += supply_current_at(t);
        e += dissipation_at(t);
    }
    Ok((q * dt, e * dt))
}

/// Reduce a solved inverter-family gate to its effective divider at one
/// input voltage: both resistances are taken from the supply branch current
/// and the solved output level, so the model's equilibrium equals the solved
/// output exactly.
pub fn effective_divider(circuit: &GateCircuit, v_in: f64, c_out: f64) -> Result<DividerModel> {
    let op = solve_inverter(circuit, v_in)?;
    divider_from_op(circuit, &op, c_out, None)
}

/// Effective divider of a full input transition: resistances from the
/// operating point at `v_in_2`, initial output voltage from `v_in_1`.
pub fn effective_divider_transition(
    circuit: &GateCircuit,
    v_in_1: f64,
    v_in_2: f64,
    c_out: f64,
) -> Result<DividerModel> {
    let before = solve_inverter(circuit, v_in_1)?;
    let after = solve_inverter(circuit, v_in_2)?;
    let v_out_1 = before.output_voltage(circuit);
    divider_from_op(circuit, &after, c_out, Some(v_out_1))
}

fn solve_inverter(circuit: &GateCircuit, v_in: f64) -> Result<OperatingPoint> {
    if !circuit.kind().is_inverter_family() {
        return Err(Error::CircuitShape(
            "effective divider extraction requires an inverter-family circuit".into(),
        ));
    }
    solve_dc(circuit, &[("in", v_in)], None)
}

fn divider_from_op(
    circuit: &GateCircuit,
    op: &OperatingPoint,
    c_out: f64,
    v_out_1: Option<f64>,
) -> Result<DividerModel> {
    let vdd = circuit.vdd();
    let v_out = op
        .output_voltage(circuit)
        .clamp(1e-12 * vdd, (1.0 - 1e-12) * vdd);
    let i = supply_current(circuit, op);
    let (r1, r2) = if i.abs() < CUTOFF_CURRENT {
        // One branch is fully cut off; give the large-drop side the device
        // conductance floor and scale the other to preserve the divider.
        let r_floor = 1.0 / circuit.g_min_floor();
        if v_out >= vdd / 2.0 {
            (r_floor * (vdd - v_out) / v_out, r_floor)
        } else {
            (r_floor, r_floor * v_out / (vdd - v_out))
        }
    } else {
        ((vdd - v_out) / i, v_out / i)
    };
    DividerModel::new(r1, r2, c_out, vdd, v_out_1.unwrap_or(v_out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devices::{MemristorState, MosfetParams};
    use crate::solver::{linear_grid, plateau_metrics, sweep_1d};
    use proptest::prelude::*;

    const IDENTITY_RTOL: f64 = 1e-9;
    const ORACLE_RTOL: f64 = 1e-3;

    fn model(r1: f64, r2: f64, c: f64, vdd: f64, v1: f64) -> DividerModel {
        DividerModel::new(r1, r2, c, vdd, v1).unwrap()
    }

    #[test]
    fn divider_fraction_examples() {
        assert!((q_div(1e6, 1e6).unwrap() - 0.5).abs() < 1e-15);
        assert!((q_div(1.0, 1e9).unwrap() - 1.0).abs() < 1e-6);
        assert!((q_div(4e6, 6e6).unwrap() - 0.6).abs() < 1e-15);
        assert!(matches!(q_div(0.0, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(q_div(1.0, -2.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn flip_energy_examples() {
        assert_eq!(e_flip(0.0, 1.2).unwrap(), 0.0);
        assert!((e_flip(1e-15, 1.65).unwrap() - 1.36125e-15).abs() < 1e-21);
        let single = e_flip(2e-15, 0.9).unwrap();
        let doubled = e_flip(2e-15, 1.8).unwrap();
        assert!((doubled - 4.0 * single).abs() < 1e-21);
    }

    #[test]
    fn equilibrium_is_the_divider_voltage() {
        let m = model(4e6, 6e6, 1e-14, 1.65, 0.0);
        assert!((m.v_out_2() - 1.65 * 0.6).abs() < 1e-15);
        assert!((m.output_at(0.0) - m.v_out_1()).abs() < 1e-15);
        let far = m.output_at(100.0 * m.tau());
        assert!((far - m.v_out_2()).abs() < 1e-12);
    }

    #[test]
    fn mirroring_swaps_rails_consistently() {
        let m = model(4e6, 6e6, 1e-14, 1.65, 0.2);
        let w = m.mirrored();
        assert!((w.v_out_2() - (1.65 - m.v_out_2())).abs() < 1e-15);
        assert!((w.delta_v() + m.delta_v()).abs() < 1e-15);
        let back = w.mirrored();
        assert!((back.v_out_1() - m.v_out_1()).abs() < 1e-15);
        assert!((back.r1() - m.r1()).abs() < 1e-15);
    }

    #[test]
    fn hand_computed_charge_split() {
        // r1 = r2 = 1 MΩ, c = 1 pF, vdd = 1 V, swing 0 → 0.5 V over l = 4.
        let m = model(1e6, 1e6, 1e-12, 1.0, 0.0);
        let report = q_tot(&m, 4.0).unwrap();
        assert!((report.q_leak - 1.0e-12).abs() < 1e-18);
        let expected_charge = 1e-12 * 0.5 * 0.5 * (1.0 - (-4.0_f64).exp());
        assert!((report.q_charge - expected_charge).abs() < 1e-18);
        assert!((report.q_tot - (report.q_leak + report.q_charge)).abs() < 1e-24);
        assert!((report.q_ideal - 0.5e-12).abs() < 1e-18);
        assert!(!report.mirrored);
    }

    #[test]
    fn zero_window_spends_nothing() {
        let m = model(2e6, 3e6, 1e-13, 1.65, m_div_voltage(2e6, 3e6, 1.65));
        let report = q_tot(&m, 0.0).unwrap();
        assert_eq!(report.q_tot, 0.0);
        assert_eq!(report.t_set, 0.0);
    }

    fn m_div_voltage(r1: f64, r2: f64, vdd: f64) -> f64 {
        vdd * r2 / (r1 + r2)
    }

    proptest! {
        #[test]
        fn both_total_charge_forms_agree(
            r1 in 1e3_f64..1e9,
            r2 in 1e3_f64..1e9,
            c in 1e-16_f64..1e-11,
            vdd in 0.5_f64..3.3,
            v1_frac in 0.0_f64..1.0,
            l in 0.0_f64..20.0,
        ) {
            let m = model(r1, r2, c, vdd, v1_frac * vdd);
            let report = q_tot(&m, l).unwrap();
            let scale = report.q_tot.abs().max(report.q_leak.abs());
            prop_assert!((report.q_tot - report.q_tot_alt).abs() <= IDENTITY_RTOL * scale.max(1e-30));
        }

        #[test]
        fn supply_energy_stays_under_the_bound(
            r1 in 1e3_f64..1e9,
            r2 in 1e3_f64..1e9,
            c in 1e-16_f64..1e-11,
            vdd in 0.5_f64..3.3,
            l in 0.0_f64..20.0,
        ) {
            // Positive swing by construction: start from ground.
            let m = model(r1, r2, c, vdd, 0.0);
            let report = q_tot(&m, l).unwrap();
            prop_assert!(vdd * report.q_tot <= report.e_upper * (1.0 + 1e-12) + 1e-30);
        }
    }

    #[test]
    fn leak_grows_and_charge_saturates_with_window_length() {
        let m = model(1e6, 2e6, 1e-13, 1.65, 0.1);
        let mut previous_leak = -1.0;
        for k in 0..60 {
            let l = 0.5 * k as f64;
            let report = q_tot(&m, l).unwrap();
            assert!(report.q_leak > previous_leak);
            previous_leak = report.q_leak;
        }
        let saturated = q_tot(&m, 60.0).unwrap().q_charge;
        let limit = m.c_out() * m.delta_v() * m.q_div();
        assert!((saturated - limit).abs() <= 1e-12 * limit.abs());
    }

    #[test]
    fn full_swing_lossless_limit_is_twice_the_flip_energy() {
        let m = model(1.0, 1e15, 1e-14, 1.65, 0.0);
        let bound = e_upper(&m, 60.0).unwrap();
        let reference = 2.0 * e_flip(1e-14, 1.65).unwrap();
        assert!((bound - reference).abs() <= 1e-6 * reference);
    }

    #[test]
    fn negative_swing_mirrors_the_bound() {
        let falling = model(6e6, 4e6, 1e-14, 1.65, 1.5);
        assert!(falling.delta_v() < 0.0);
        let report = q_tot(&falling, 4.0).unwrap();
        assert!(report.mirrored);
        let mirrored_report = q_tot(&falling.mirrored(), 4.0).unwrap();
        assert!((report.e_upper - mirrored_report.e_upper).abs() <= 1e-24);
        assert!(report.e_upper > 0.0);
    }

    #[test]
    fn settling_error_is_the_exponential_tail() {
        let m = model(3e6, 5e6, 2e-14, 1.65, 0.3);
        for l in [1.0_f64, 4.0, 8.0] {
            let residue = (m.output_at(l * m.tau()) - m.v_out_2()).abs();
            let expected = m.delta_v().abs() * (-l).exp();
            assert!((residue - expected).abs() <= 1e-12 * expected.max(1e-12));
        }
        let at_four = (m.output_at(4.0 * m.tau()) - m.v_out_2()).abs();
        assert!(at_four <= 0.02 * m.delta_v().abs());
    }

    #[test]
    fn oracle_matches_closed_form() {
        for (r1, r2) in [(1e6, 1e6), (4e6, 6e6), (1e5, 1e6)] {
            let m = model(r1, r2, 1e-13, 1.65, 0.0);
            let report = q_tot(&m, 8.0).unwrap();
            let (q_numeric, e_numeric) = transient_oracle(&m, 8.0, 1e-3).unwrap();
            assert!(
                (q_numeric - report.q_tot).abs() <= ORACLE_RTOL * report.q_tot.abs(),
                "charge mismatch for r1={r1}, r2={r2}"
            );
            assert!(e_numeric <= report.e_upper * (1.0 + 1e-9));
            assert!(e_numeric <= 1.65 * report.q_tot * (1.0 + 1e-9));
        }
    }

    #[test]
    fn oracle_with_no_swing_reports_pure_leakage() {
        let equilibrium = m_div_voltage(2e6, 2e6, 1.0);
        let m = model(2e6, 2e6, 1e-13, 1.0, equilibrium);
        let report = q_tot(&m, 6.0).unwrap();
        assert_eq!(report.q_charge, 0.0);
        let (q_numeric, _) = transient_oracle(&m, 6.0, 1e-3).unwrap();
        assert!((q_numeric - report.q_leak).abs() <= ORACLE_RTOL * report.q_leak);
    }

    #[test]
    fn oracle_rejects_coarse_steps() {
        let m = model(1e6, 1e6, 1e-13, 1.0, 0.0);
        assert!(matches!(
            transient_oracle(&m, 4.0, 1e-2),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn toggle_units() {
        assert!((toggle_equivalents(1.25e-15, 1e-15, 1.25).unwrap() - 1.0).abs() < 1e-12);
        let texel_cost = toggle_equivalents(46e-15, 1e-15, 1.25).unwrap();
        assert!((texel_cost - 36.8).abs() < 0.05);
        let doubled = toggle_equivalents(92e-15, 1e-15, 1.25).unwrap();
        assert!((doubled - 2.0 * texel_cost).abs() < 1e-9);
    }

    fn baseline_inverter() -> GateCircuit {
        GateCircuit::inverter_2t2r(
            MosfetParams::default_pmos(),
            MosfetParams::default_nmos(),
            MemristorState::new(4e6, 1.0, 1e12).unwrap(),
            MemristorState::new(6e6, 1.0, 1e12).unwrap(),
            1.65,
        )
        .unwrap()
    }

    #[test]
    fn cutoff_input_gives_floor_resistance_on_the_ground_side() {
        let inv = baseline_inverter();
        let m = effective_divider(&inv, 0.0, DEFAULT_C_OUT).unwrap();
        assert!(
            m.r2() >= 0.5e12,
            "expected near-floor pull-down, got {}",
            m.r2()
        );
        assert!(m.v_out_2() > 1.6);
    }

    #[test]
    fn symmetric_gate_splits_evenly_at_mid_supply() {
        let nmos = MosfetParams::default_nmos();
        let pmos = nmos.mirrored();
        let inv = GateCircuit::inverter_2t2r(
            pmos,
            nmos,
            MemristorState::new(1e6, 1.0, 1e12).unwrap(),
            MemristorState::new(1e6, 1.0, 1e12).unwrap(),
            1.65,
        )
        .unwrap();
        let m = effective_divider(&inv, 1.65 / 2.0, DEFAULT_C_OUT).unwrap();
        let imbalance = (m.r1() - m.r2()).abs() / m.r1();
        assert!(imbalance < 0.1, "imbalance {imbalance}");
    }

    #[test]
    fn plateau_divider_recovers_the_memristor_ratio() {
        let inv = baseline_inverter();
        let grid = linear_grid(0.0, 1.65, 166);
        let trace = sweep_1d(&inv, "in", &grid, &[], "baseline").unwrap();
        let metrics = plateau_metrics(&trace).unwrap();
        let m = effective_divider(&inv, metrics.altitude_input, DEFAULT_C_OUT).unwrap();
        assert!((m.q_div() - 0.6).abs() < 0.06, "q_div {}", m.q_div());
    }

    #[test]
    fn transition_model_tracks_both_endpoints() {
        let inv = baseline_inverter();
        let m = effective_divider_transition(&inv, 0.2, 0.9, DEFAULT_C_OUT).unwrap();
        let at_start = effective_divider(&inv, 0.2, DEFAULT_C_OUT).unwrap();
        assert!((m.v_out_1() - at_start.v_out_2()).abs() < 1e-9);
        assert!(m.delta_v() < 0.0);
    }

    #[test]
    fn divider_extraction_rejects_nand_gates() {
        let nand = GateCircuit::nand_4t3r(
            MosfetParams::default_pmos(),
            MosfetParams::default_pmos(),
            MosfetParams::default_nmos(),
            MosfetParams::default_nmos(),
            MemristorState::new(3.5e3, 1.0, 1e12).unwrap(),
            MemristorState::new(0.5e3, 1.0, 1e12).unwrap(),
            MemristorState::new(4.0e3, 1.0, 1e12).unwrap(),
            1.65,
        )
        .unwrap();
        assert!(matches!(
            effective_divider(&nand, 0.5, DEFAULT_C_OUT),
            Err(Error::CircuitShape(_))
        ));
    }
}
