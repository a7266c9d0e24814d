//! Cross-topology checks: the fully degenerated general forms against the
//! canonical gates, logic-level restoration under chaining, and the effect of
//! programmed-state magnitude on the transfer plateau.

use memgate_core::devices::{MemristorState, MosfetParams};
use memgate_core::netlist::GateCircuit;
use memgate_core::solver;

/// Wire stand-ins are 1 ohm fixed elements; at the micro-amp currents of the
/// high-resistance inverter they cost only micro-volts.
const INVERTER_WIRE_TOL: f64 = 1e-4;

/// The NAND's kilo-ohm loads carry up to ~0.5 mA, so three wire stand-ins in
/// the conducting path can move the output by a couple of millivolts.
const NAND_WIRE_TOL: f64 = 3e-3;

/// Slack below the supply rail still counted as a restored logic high.
const CHAIN_HIGH_MARGIN: f64 = 0.05;

fn state(ohms: f64) -> MemristorState {
    MemristorState::new(ohms, 1e2, 1e9).unwrap()
}

#[test]
fn four_resistor_inverter_with_wire_slots_matches_the_two_memristor_form() {
    let vdd = 1.65;
    let canonical = GateCircuit::inverter_2t2r(
        MosfetParams::default_pmos(),
        MosfetParams::default_nmos(),
        state(106e3),
        state(110e3),
        vdd,
    )
    .unwrap();
    let degenerate = GateCircuit::general_inverter_4r(
        MosfetParams::default_pmos(),
        MosfetParams::default_nmos(),
        MemristorState::wire(),
        state(106e3),
        state(110e3),
        MemristorState::wire(),
        vdd,
    )
    .unwrap();
    let grid = solver::linear_grid(0.0, vdd, 56);
    let reference = solver::sweep_1d(&canonical, "in", &grid, &[], "canonical").unwrap();
    let collapsed = solver::sweep_1d(&degenerate, "in", &grid, &[], "degenerate").unwrap();
    for (k, (a, b)) in reference.outputs.iter().zip(&collapsed.outputs).enumerate() {
        assert!(
            (a - b).abs() <= INVERTER_WIRE_TOL,
            "outputs diverge at v_in {}: {a} vs {b}",
            grid[k]
        );
    }
}

#[test]
fn seven_resistor_nand_with_wire_slots_matches_the_three_memristor_form() {
    let vdd = 1.65;
    let canonical = GateCircuit::nand_4t3r(
        MosfetParams::default_pmos(),
        MosfetParams::default_pmos(),
        MosfetParams::default_nmos(),
        MosfetParams::default_nmos(),
        state(3.5e3),
        state(0.5e3),
        state(4.0e3),
        vdd,
    )
    .unwrap();
    let degenerate = GateCircuit::general_nand_7r(
        MosfetParams::default_pmos(),
        MosfetParams::default_pmos(),
        MosfetParams::default_nmos(),
        MosfetParams::default_nmos(),
        [
            MemristorState::wire(),
            state(3.5e3),
            MemristorState::wire(),
            state(0.5e3),
            state(4.0e3),
            MemristorState::wire(),
            MemristorState::wire(),
        ],
        vdd,
    )
    .unwrap();
    let grid = solver::linear_grid(0.0, vdd, 11);
    let reference = solver::surface_2d(&canonical, "a", &grid, "b", &grid).unwrap();
    let collapsed = solver::surface_2d(&degenerate, "a", &grid, "b", &grid).unwrap();
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let a = reference.outputs[i][j];
            let b = collapsed.outputs[i][j];
            assert!(
                (a - b).abs() <= NAND_WIRE_TOL,
                "outputs diverge at ({}, {}): {a} vs {b}",
                grid[i],
                grid[j]
            );
        }
    }
}

#[test]
fn nand_restores_a_high_output_for_any_low_first_input() {
    let vdd = 1.65;
    let nand = GateCircuit::nand_4t3r(
        MosfetParams::default_pmos(),
        MosfetParams::default_pmos(),
        MosfetParams::default_nmos(),
        MosfetParams::default_nmos(),
        state(3.5e3),
        state(0.5e3),
        state(4.0e3),
        vdd,
    )
    .unwrap();
    // Gate inputs draw no DC current, so a cascade passes voltages through
    // unchanged: any upstream stage whose output stays at or below 0.7 V
    // drives this gate back to a solid high, whatever the second input does.
    for &v_b in &[0.0, 0.4, 0.8, 1.2, vdd] {
        for k in 0..=14 {
            let v_a = 0.7 * k as f64 / 14.0;
            let op = solver::solve_dc(&nand, &[("a", v_a), ("b", v_b)], None).unwrap();
            let out = op.output_voltage(&nand);
            assert!(
                out >= vdd - CHAIN_HIGH_MARGIN,
                "output {out} sagged below the restored-high band at a = {v_a}, b = {v_b}"
            );
        }
    }
}

#[test]
fn higher_resistance_states_widen_the_transfer_plateau() {
    // The flat divider-dominated region needs the programmed states to dwarf
    // the transistor channel resistance, so it lives at mega-ohm states;
    // scaling the pair up at a fixed ratio widens it further.
    let vdd = 1.65;
    let grid = solver::linear_grid(0.0, vdd, 166);
    let mut widths = Vec::new();
    for (r_up, r_dn) in [(1e6, 1.5e6), (4e6, 6e6)] {
        let circuit = GateCircuit::inverter_2t2r(
            MosfetParams::default_pmos(),
            MosfetParams::default_nmos(),
            state(r_up),
            state(r_dn),
            vdd,
        )
        .unwrap();
        let trace = solver::sweep_1d(&circuit, "in", &grid, &[], "state-pair").unwrap();
        widths.push(solver::plateau_metrics(&trace).unwrap().width);
    }
    assert!(
        widths[1] > widths[0],
        "plateau did not widen with the resistance scale: {widths:?}"
    );
}
