//! Nodal DC solver: damped Newton iteration on Kirchhoff current residuals,
//! with a monotone bisection fallback on the output node.
//!
//! The solver also provides the measurement layer used throughout the crate:
//! one-dimensional sweeps with warm-start continuation, two-dimensional
//! surfaces swept strip by strip, plateau metrics of inverter transfer
//! curves, and programmed resistance families that isolate the two analogue
//! control knobs (ratio-fixed and sum-fixed pairs).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::netlist::{ChainTarget, CircuitKind, GateChain, GateCircuit, NodeId, NodeKind};

/// Slope magnitude below which a transfer-curve point counts as plateau.
pub const PLATEAU_SLOPE_THRESHOLD: f64 = 0.25;

/// Fraction of the output span next to either rail that is excluded when
/// locating the plateau, so the flat rail segments of a digital-like trace
/// are not mistaken for an analogue plateau.
pub const RAIL_EXCLUSION_FRACTION: f64 = 0.02;

/// Iteration controls for the Newton solver.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Maximum damped-Newton iterations before the fallback engages.
    pub max_iterations: usize,
    /// Largest voltage change applied to any node per iteration, in volts.
    pub step_clamp: f64,
    /// Convergence threshold on the residual infinity norm, in amperes.
    pub residual_tol: f64,
    /// Convergence threshold on the step infinity norm, in volts; demanding
    /// a tiny final step makes solved voltages reproducible to well below
    /// 1e-9 V regardless of the starting guess.
    pub step_tol: f64,
    /// Tiny conductance from every unknown node to ground. It keeps the
    /// Jacobian non-singular when a branch is fully cut off and perturbs the
    /// true nodal currents by less than `node_gmin * vdd`.
    pub node_gmin: f64,
    /// Allowed excursion outside the rails during iteration, in volts.
    pub voltage_margin: f64,
    /// Whether to fall back to output-node bisection when Newton stalls.
    pub bisection_fallback: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            step_clamp: 0.1,
            residual_tol: 1e-13,
            step_tol: 1e-12,
            node_gmin: 1e-15,
            voltage_margin: 0.5,
            bisection_fallback: true,
        }
    }
}

/// A solved DC operating point.
#[derive(Debug, Clone)]
pub struct OperatingPoint {
    /// Voltage of every circuit node, indexed by [`NodeId`].
    pub voltages: Vec<f64>,
    /// Drain current of every transistor, in circuit order.
    pub transistor_currents: Vec<f64>,
    /// Branch current (terminal `a` to `b`) of every memristor, in order.
    pub memristor_currents: Vec<f64>,
    /// Largest device-only Kirchhoff residual over the unknown nodes, A.
    pub residual_norm: f64,
    /// Newton iterations spent.
    pub iterations: usize,
}

impl OperatingPoint {
    pub fn voltage(&self, node: NodeId) -> f64 {
        self.voltages[node.0]
    }

    pub fn output_voltage(&self, circuit: &GateCircuit) -> f64 {
        self.voltages[circuit.output().0]
    }
}

/// One solved transfer curve.
#[derive(Debug, Clone)]
pub struct SweepTrace {
    pub label: String,
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
}

/// Output voltages over a two-input grid; `outputs[i][j]` corresponds to
/// `a_values[i]`, `b_values[j]`.
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub outputs: Vec<Vec<f64>>,
}

/// Plateau geometry of a transfer curve.
#[derive(Debug, Clone, Copy)]
pub struct PlateauMetrics {
    /// Output voltage at the flattest interior point.
    pub altitude: f64,
    /// Input voltage at that point.
    pub altitude_input: f64,
    /// Input extent of the contiguous region with slope magnitude below
    /// [`PLATEAU_SLOPE_THRESHOLD`]; zero when no such region exists.
    pub width: f64,
    /// Input at the left edge of that region.
    pub left_input: f64,
    /// Input at the right edge of that region.
    pub right_input: f64,
    /// Slope magnitude at the flattest point.
    pub min_abs_slope: f64,
}

/// Which constraint a programmed resistance family holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModalityMode {
    /// `r_up / r_dn` constant: sweeps plateau width at fixed altitude.
    RatioFixed,
    /// `r_up + r_dn` constant: sweeps plateau altitude at fixed width.
    SumFixed,
}

/// A family of (r_up, r_dn) programming points sharing one fixed constraint.
#[derive(Debug, Clone)]
pub struct ModalitySpec {
    pub mode: ModalityMode,
    pub constant: f64,
    pub points: Vec<(f64, f64)>,
}

const FAMILY_REL_TOL: f64 = 1e-9;

impl ModalitySpec {
    pub fn ratio_fixed(constant: f64, points: Vec<(f64, f64)>) -> Result<Self> {
        for &(r_up, r_dn) in &points {
            if !(r_dn > 0.0) || (r_up / r_dn - constant).abs() > FAMILY_REL_TOL * constant.abs() {
                return Err(Error::FamilyConstraint {
                    mode: "ratio",
                    expected: constant,
                    r_up,
                    r_dn,
                });
            }
        }
        Ok(Self {
            mode: ModalityMode::RatioFixed,
            constant,
            points,
        })
    }

    pub fn sum_fixed(constant: f64, points: Vec<(f64, f64)>) -> Result<Self> {
        for &(r_up, r_dn) in &points {
            if (r_up + r_dn - constant).abs() > FAMILY_REL_TOL * constant.abs() {
                return Err(Error::FamilyConstraint {
                    mode: "sum",
                    expected: constant,
                    r_up,
                    r_dn,
                });
            }
        }
        Ok(Self {
            mode: ModalityMode::SumFixed,
            constant,
            points,
        })
    }

    /// Ratio-fixed family built by scaling a base pair.
    pub fn scaled_ratio_family(base_up: f64, base_dn: f64, scales: &[f64]) -> Result<Self> {
        let points = scales.iter().map(|&k| (k * base_up, k * base_dn)).collect();
        Self::ratio_fixed(base_up / base_dn, points)
    }

    /// Sum-fixed family built from pull-up values against a fixed total.
    pub fn sum_family(constant: f64, up_values: &[f64]) -> Result<Self> {
        let points = up_values.iter().map(|&u| (u, constant - u)).collect();
        Self::sum_fixed(constant, points)
    }
}

/// Plateau metrics of one programmed family member.
#[derive(Debug, Clone, Copy)]
pub struct FamilyPoint {
    pub r_up: f64,
    pub r_dn: f64,
    pub metrics: PlateauMetrics,
}

// ---------------------------------------------------------------------------
// System assembly
// ---------------------------------------------------------------------------

struct System<'a> {
    circuit: &'a GateCircuit,
    /// Fixed voltage per node; `None` marks an unknown.
    fixed: Vec<Option<f64>>,
    /// Node index of each unknown slot.
    slots: Vec<usize>,
    /// Unknown slot of each node, if any.
    slot_of: Vec<Option<usize>>,
}

impl<'a> System<'a> {
    fn build(
        circuit: &'a GateCircuit,
        inputs: &[(&str, f64)],
        pinned: Option<(NodeId, f64)>,
    ) -> Result<Self> {
        let vdd = circuit.vdd();
        let mut fixed: Vec<Option<f64>> = circuit
            .nodes()
            .iter()
            .map(|n| match n.kind {
                NodeKind::RailVdd => Some(vdd),
                NodeKind::RailGnd => Some(0.0),
                _ => None,
            })
            .collect();

        for (port, value) in inputs {
            let node = circuit.input_node(port)?;
            if !(0.0..=vdd).contains(value) {
                return Err(Error::InputOutOfRange {
                    port: port.to_string(),
                    value: *value,
                    vdd,
                });
            }
            if fixed[node.0].is_some() {
                return Err(Error::BadDrive {
                    port: port.to_string(),
                    problem: "is driven more than once",
                });
            }
            fixed[node.0] = Some(*value);
        }
        for (name, id) in circuit.inputs() {
            if fixed[id.0].is_none() {
                return Err(Error::BadDrive {
                    port: name.clone(),
                    problem: "is not driven",
                });
            }
        }
        if let Some((node, value)) = pinned {
            fixed[node.0] = Some(value);
        }

        let mut slots = Vec::new();
        let mut slot_of = vec![None; circuit.nodes().len()];
        for (idx, f) in fixed.iter().enumerate() {
            if f.is_none() {
                slot_of[idx] = Some(slots.len());
                slots.push(idx);
            }
        }
        Ok(Self {
            circuit,
            fixed,
            slots,
            slot_of,
        })
    }

    fn full_voltages(&self, v: &DVector<f64>) -> Vec<f64> {
        self.fixed
            .iter()
            .enumerate()
            .map(|(idx, f)| match f {
                Some(value) => *value,
                None => v[self.slot_of[idx].expect("unknown node has a slot")],
            })
            .collect()
    }

    /// Residual (sum of currents leaving each unknown node) and Jacobian,
    /// including the `node_gmin` regularisation.
    fn assemble(&self, full: &[f64], node_gmin: f64) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.slots.len();
        let mut f = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, n);

        let add = |node: usize, amount: f64, f: &mut DVector<f64>| {
            if let Some(slot) = self.slot_of[node] {
                f[slot] += amount;
            }
        };

        for t in self.circuit.transistors() {
            let (i, partials) = t
                .params
                .evaluate(full[t.gate.0], full[t.source.0], full[t.drain.0]);
            add(t.drain.0, i, &mut f);
            add(t.source.0, -i, &mut f);
            let terminals = [t.gate.0, t.source.0, t.drain.0];
            for (term, d) in terminals.iter().zip(partials) {
                if let Some(col) = self.slot_of[*term] {
                    if let Some(row) = self.slot_of[t.drain.0] {
                        j[(row, col)] += d;
                    }
                    if let Some(row) = self.slot_of[t.source.0] {
                        j[(row, col)] -= d;
                    }
                }
            }
        }

        for m in self.circuit.memristors() {
            let g = m.state.conductance();
            let i = (full[m.a.0] - full[m.b.0]) * g;
            add(m.a.0, i, &mut f);
            add(m.b.0, -i, &mut f);
            let pairs = [(m.a.0, g), (m.b.0, -g)];
            for (term, sign_g) in pairs {
                if let Some(col) = self.slot_of[term] {
                    if let Some(row) = self.slot_of[m.a.0] {
                        j[(row, col)] += sign_g;
                    }
                    if let Some(row) = self.slot_of[m.b.0] {
                        j[(row, col)] -= sign_g;
                    }
                }
            }
        }

        for (slot, &node) in self.slots.iter().enumerate() {
            f[slot] += node_gmin * full[node];
            j[(slot, slot)] += node_gmin;
        }

        (f, j)
    }

    /// Sum of device currents leaving one node (no regularisation).
    fn node_device_current(&self, full: &[f64], node: usize) -> f64 {
        let mut total = 0.0;
        for t in self.circuit.transistors() {
            let i = t
                .params
                .current(full[t.gate.0], full[t.source.0], full[t.drain.0]);
            if t.drain.0 == node {
                total += i;
            }
            if t.source.0 == node {
                total -= i;
            }
        }
        for m in self.circuit.memristors() {
            let i = m.state.current(full[m.a.0], full[m.b.0]);
            if m.a.0 == node {
                total += i;
            }
            if m.b.0 == node {
                total -= i;
            }
        }
        total
    }

    fn finish(&self, full: Vec<f64>, iterations: usize) -> OperatingPoint {
        let transistor_currents = self
            .circuit
            .transistors()
            .iter()
            .map(|t| {
                t.params
                    .current(full[t.gate.0], full[t.source.0], full[t.drain.0])
            })
            .collect();
        let memristor_currents = self
            .circuit
            .memristors()
            .iter()
            .map(|m| m.state.current(full[m.a.0], full[m.b.0]))
            .collect();
        let residual_norm = self
            .circuit
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.kind, NodeKind::Output | NodeKind::Internal))
            .map(|(idx, _)| self.node_device_current(&full, idx).abs())
            .fold(0.0, f64::max);
        OperatingPoint {
            voltages: full,
            transistor_currents,
            memristor_currents,
            residual_norm,
            iterations,
        }
    }
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn newton(
    system: &System<'_>,
    mut v: DVector<f64>,
    options: &SolverOptions,
) -> Result<(DVector<f64>, usize)> {
    let vdd = system.circuit.vdd();
    let lo = -options.voltage_margin;
    let hi = vdd + options.voltage_margin;
    if v.is_empty() {
        return Ok((v, 0));
    }

    let mut last_step = f64::INFINITY;
    let mut best_residual = f64::INFINITY;
    for iteration in 0..options.max_iterations {
        let full = system.full_voltages(&v);
        let (f, j) = system.assemble(&full, options.node_gmin);
        let residual = inf_norm(&f);
        best_residual = best_residual.min(residual);
        if residual <= options.residual_tol && last_step <= options.step_tol {
            return Ok((v, iteration));
        }
        let step = match j.lu().solve(&(-&f)) {
            Some(step) => step,
            None => return Err(Error::NonConvergence { best_residual }),
        };
        let mut applied = 0.0_f64;
        for k in 0..v.len() {
            let dv = step[k].clamp(-options.step_clamp, options.step_clamp);
            let target = (v[k] + dv).clamp(lo, hi);
            applied = applied.max((target - v[k]).abs());
            v[k] = target;
        }
        last_step = applied;
    }
    Err(Error::NonConvergence { best_residual })
}

fn initial_guess(system: &System<'_>, guess: Option<&OperatingPoint>) -> DVector<f64> {
    let mid = system.circuit.vdd() / 2.0;
    DVector::from_iterator(
        system.slots.len(),
        system.slots.iter().map(|&node| match guess {
            Some(op) if op.voltages.len() == system.circuit.nodes().len() => op.voltages[node],
            _ => mid,
        }),
    )
}

/// Solve the DC operating point with default options.
pub fn solve_dc(
    circuit: &GateCircuit,
    inputs: &[(&str, f64)],
    guess: Option<&OperatingPoint>,
) -> Result<OperatingPoint> {
    solve_dc_with(circuit, inputs, guess, &SolverOptions::default())
}

/// Solve the DC operating point with explicit options.
pub fn solve_dc_with(
    circuit: &GateCircuit,
    inputs: &[(&str, f64)],
    guess: Option<&OperatingPoint>,
    options: &SolverOptions,
) -> Result<OperatingPoint> {
    let system = System::build(circuit, inputs, None)?;
    let v0 = initial_guess(&system, guess);
    match newton(&system, v0, options) {
        Ok((v, iterations)) => {
            let full = system.full_voltages(&v);
            Ok(system.finish(full, iterations))
        }
        Err(primary) => {
            if options.bisection_fallback {
                bisect_output(circuit, inputs, options).map_err(|_| primary)
            } else {
                Err(primary)
            }
        }
    }
}

/// Fallback: pin the output node, solve the remaining unknowns, and bisect
/// the pinned voltage on the (monotone) net current into the output node.
fn bisect_output(
    circuit: &GateCircuit,
    inputs: &[(&str, f64)],
    options: &SolverOptions,
) -> Result<OperatingPoint> {
    let output = circuit.output();
    let vdd = circuit.vdd();
    // The pinned sub-problems still need a real Newton budget even when the
    // caller restricted the primary attempt.
    let inner = SolverOptions {
        max_iterations: options.max_iterations.max(SolverOptions::default().max_iterations),
        ..options.clone()
    };

    let evaluate = |x: f64| -> Result<(Vec<f64>, f64)> {
        let system = System::build(circuit, inputs, Some((output, x)))?;
        let v0 = initial_guess(&system, None);
        let (v, _) = newton(&system, v0, &inner)?;
        let full = system.full_voltages(&v);
        let leaving = system.node_device_current(&full, output.0) + options.node_gmin * x;
        Ok((full, leaving))
    };

    let (mut lo, mut hi) = (0.0_f64, vdd);
    let (full_lo, f_lo) = evaluate(lo)?;
    let (full_hi, f_hi) = evaluate(hi)?;
    let build = |full: Vec<f64>| -> OperatingPoint {
        // Residual bookkeeping reuses the unpinned system so the output node
        // counts as unknown.
        let system = System::build(circuit, inputs, None).expect("inputs already validated");
        system.finish(full, 0)
    };
    if f_lo.abs() <= options.residual_tol {
        return Ok(build(full_lo));
    }
    if f_hi.abs() <= options.residual_tol {
        return Ok(build(full_hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NonConvergence {
            best_residual: f_lo.abs().min(f_hi.abs()),
        });
    }
    let rising = f_hi > 0.0;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (full, f_mid) = evaluate(mid)?;
        let better = match &best {
            Some((_, prev)) => f_mid.abs() < prev.abs(),
            None => true,
        };
        if better {
            best = Some((full, f_mid));
        }
        if f_mid.abs() <= options.residual_tol && (hi - lo) <= options.step_tol {
            break;
        }
        if (f_mid > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    match best {
        Some((full, f_mid)) if f_mid.abs() <= 1e-12 => Ok(build(full)),
        Some((_, f_mid)) => Err(Error::NonConvergence {
            best_residual: f_mid.abs(),
        }),
        None => Err(Error::NonConvergence {
            best_residual: f64::INFINITY,
        }),
    }
}

/// Current leaving the supply rail through its attached devices.
pub fn supply_current(circuit: &GateCircuit, op: &OperatingPoint) -> f64 {
    let rail = circuit
        .nodes()
        .iter()
        .position(|n| n.kind == NodeKind::RailVdd)
        .expect("validated circuit has a supply rail");
    let mut total = 0.0;
    for (t, &i) in circuit.transistors().iter().zip(&op.transistor_currents) {
        if t.drain.0 == rail {
            total += i;
        }
        if t.source.0 == rail {
            total -= i;
        }
    }
    for (m, &i) in circuit.memristors().iter().zip(&op.memristor_currents) {
        if m.a.0 == rail {
            total += i;
        }
        if m.b.0 == rail {
            total -= i;
        }
    }
    total
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::GridNotMonotone);
    }
    if grid.len() >= 2 {
        let increasing = grid[1] > grid[0];
        for pair in grid.windows(2) {
            let ok = if increasing {
                pair[1] > pair[0]
            } else {
                pair[1] < pair[0]
            };
            if !ok {
                return Err(Error::GridNotMonotone);
            }
        }
    }
    Ok(())
}

/// Sweep one input port over a strictly monotone grid, warm-starting each
/// point from the previous solution. Other ports are held at `fixed`.
pub fn sweep_1d(
    circuit: &GateCircuit,
    port: &str,
    grid: &[f64],
    fixed: &[(&str, f64)],
    label: &str,
) -> Result<SweepTrace> {
    check_grid(grid)?;
    let mut outputs = Vec::with_capacity(grid.len());
    let mut previous: Option<OperatingPoint> = None;
    for (index, &value) in grid.iter().enumerate() {
        let mut inputs: Vec<(&str, f64)> = fixed.to_vec();
        inputs.push((port, value));
        let op = solve_dc(circuit, &inputs, previous.as_ref()).map_err(|e| Error::SweepPoint {
            index,
            source: Box::new(e),
        })?;
        outputs.push(op.output_voltage(circuit));
        previous = Some(op);
    }
    Ok(SweepTrace {
        label: label.to_string(),
        inputs: grid.to_vec(),
        outputs,
    })
}

/// Solve the output surface over two input grids, row-major in `a` with
/// warm-start continuation along `b` within each row.
pub fn surface_2d(
    circuit: &GateCircuit,
    port_a: &str,
    grid_a: &[f64],
    port_b: &str,
    grid_b: &[f64],
) -> Result<SurfaceGrid> {
    check_grid(grid_a)?;
    check_grid(grid_b)?;
    let mut outputs = Vec::with_capacity(grid_a.len());
    let mut row_anchor: Option<OperatingPoint> = None;
    for (row, &a) in grid_a.iter().enumerate() {
        let mut row_outputs = Vec::with_capacity(grid_b.len());
        let mut previous = row_anchor.clone();
        for (col, &b) in grid_b.iter().enumerate() {
            let op = solve_dc(circuit, &[(port_a, a), (port_b, b)], previous.as_ref()).map_err(
                |e| Error::SurfacePoint {
                    row,
                    col,
                    source: Box::new(e),
                },
            )?;
            row_outputs.push(op.output_voltage(circuit));
            if col == 0 {
                row_anchor = Some(op.clone());
            }
            previous = Some(op);
        }
        outputs.push(row_outputs);
    }
    Ok(SurfaceGrid {
        a_values: grid_a.to_vec(),
        b_values: grid_b.to_vec(),
        outputs,
    })
}

/// Plateau altitude and width of a transfer curve via central differences.
///
/// Points whose output sits within [`RAIL_EXCLUSION_FRACTION`] of the trace's
/// own output span from either extreme are not plateau candidates; an ideal
/// step-like trace therefore reports a width below one grid cell instead of
/// claiming its rail segments as plateau.
pub fn plateau_metrics(trace: &SweepTrace) -> Result<PlateauMetrics> {
    let n = trace.inputs.len();
    if n < 5 {
        return Err(Error::TraceTooShort { len: n });
    }
    let outputs = &trace.outputs;
    let inputs = &trace.inputs;

    let slopes: Vec<f64> = (1..n - 1)
        .map(|i| (outputs[i + 1] - outputs[i - 1]) / (inputs[i + 1] - inputs[i - 1]))
        .collect();

    let out_min = outputs.iter().cloned().fold(f64::INFINITY, f64::min);
    let out_max = outputs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let margin = RAIL_EXCLUSION_FRACTION * (out_max - out_min);
    let candidate = |i: usize| outputs[i] >= out_min + margin && outputs[i] <= out_max - margin;

    let mut flattest: Option<usize> = None;
    for i in 1..n - 1 {
        if candidate(i) {
            let better = match flattest {
                Some(best) => slopes[i - 1].abs() < slopes[best - 1].abs(),
                None => true,
            };
            if better {
                flattest = Some(i);
            }
        }
    }
    // A fully flat trace has no off-rail interior points; fall back to the
    // flattest interior point regardless of level.
    let flattest = flattest.unwrap_or_else(|| {
        (1..n - 1)
            .min_by(|&a, &b| {
                slopes[a - 1]
                    .abs()
                    .partial_cmp(&slopes[b - 1].abs())
                    .expect("slopes are finite")
            })
            .expect("trace has interior points")
    });

    let min_abs_slope = slopes[flattest - 1].abs();
    let (mut left, mut right) = (flattest, flattest);
    if min_abs_slope <= PLATEAU_SLOPE_THRESHOLD {
        while left > 1 && slopes[left - 2].abs() <= PLATEAU_SLOPE_THRESHOLD && candidate(left - 1) {
            left -= 1;
        }
        while right < n - 2
            && slopes[right].abs() <= PLATEAU_SLOPE_THRESHOLD
            && candidate(right + 1)
        {
            right += 1;
        }
    }
    let width = if min_abs_slope <= PLATEAU_SLOPE_THRESHOLD {
        (inputs[right] - inputs[left]).abs()
    } else {
        0.0
    };
    Ok(PlateauMetrics {
        altitude: outputs[flattest],
        altitude_input: inputs[flattest],
        width,
        left_input: inputs[left.min(right)],
        right_input: inputs[left.max(right)],
        min_abs_slope,
    })
}

/// Sweep a programmed (r_up, r_dn) family on a two-memristor inverter and
/// report plateau metrics per point. Memristor 0 is the pull-up, memristor 1
/// the pull-down.
pub fn modality_family(
    circuit: &GateCircuit,
    spec: &ModalitySpec,
    grid: &[f64],
) -> Result<Vec<FamilyPoint>> {
    if circuit.kind() != CircuitKind::Inverter2T2R {
        return Err(Error::CircuitShape(
            "programmed families require the two-memristor inverter topology".into(),
        ));
    }
    let mut family = Vec::with_capacity(spec.points.len());
    for &(r_up, r_dn) in &spec.points {
        let programmed = circuit
            .with_memristor_resistance(0, r_up)?
            .with_memristor_resistance(1, r_dn)?;
        let trace = sweep_1d(&programmed, "in", grid, &[], "family")?;
        family.push(FamilyPoint {
            r_up,
            r_dn,
            metrics: plateau_metrics(&trace)?,
        });
    }
    Ok(family)
}

/// Evaluation result of a two-gate cascade.
#[derive(Debug, Clone, Copy)]
pub struct ChainResult {
    pub first_output: f64,
    pub final_output: f64,
}

impl GateChain {
    /// Solve the first gate, feed its output into the chained port of the
    /// second gate (ideal coupling, no loading), and solve the second gate.
    /// `second_inputs` drives the second gate's remaining ports.
    pub fn evaluate(
        &self,
        first_inputs: &[(&str, f64)],
        second_inputs: &[(&str, f64)],
    ) -> Result<ChainResult> {
        let first_op = solve_dc(&self.first, first_inputs, None)?;
        let first_output = first_op.output_voltage(&self.first);
        match &self.second {
            ChainTarget::Identity => Ok(ChainResult {
                first_output,
                final_output: first_output,
            }),
            ChainTarget::Gate(gate) => {
                let coupled = first_output.clamp(0.0, gate.vdd());
                let mut inputs: Vec<(&str, f64)> = second_inputs.to_vec();
                inputs.push((self.port.as_str(), coupled));
                let op = solve_dc(gate, &inputs, None)?;
                Ok(ChainResult {
                    first_output,
                    final_output: op.output_voltage(gate),
                })
            }
        }
    }
}

/// Uniform grid of `points` values from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let mut grid: Vec<f64> = (0..points)
        .map(|k| start + (stop - start) * (k as f64) / ((points - 1) as f64))
        .collect();
    grid[points - 1] = stop;
    grid
}

/// Measurement grid for surface strips: 100 mV steps over the full supply
/// range, refined to 50 mV between 0.5 V and 0.8 V, always ending at `vdd`.
pub fn strip_sweep_grid(vdd: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let v = k as f64 * 0.1;
        if v >= vdd {
            break;
        }
        grid.push(v);
        if (0.5..0.8).contains(&v) && v + 0.05 < vdd {
            grid.push(v + 0.05);
        }
        k += 1;
    }
    grid.push(vdd);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devices::{MemristorState, MosfetParams};

    fn m(r: f64) -> MemristorState {
        MemristorState::new(r, 1.0, 1e12).unwrap()
    }

    fn hh_inverter() -> GateCircuit {
        GateCircuit::inverter_2t2r(
            MosfetParams::default_pmos(),
            MosfetParams::default_nmos(),
            m(106e3),
            m(110e3),
            1.65,
        )
        .unwrap()
    }

    #[test]
    fn plain_inverter_hits_the_rails() {
        let inv = GateCircuit::plain_inverter(
            MosfetParams::default_pmos(),
            MosfetParams::default_nmos(),
            1.65,
        )
        .unwrap();
        let low_in = solve_dc(&inv, &[("in", 0.0)], None).unwrap();
        assert!((low_in.output_voltage(&inv) - 1.65).abs() < 1e-6);
        let high_in = solve_dc(&inv, &[("in", 1.65)], None).unwrap();
        assert!(high_in.output_voltage(&inv).abs() < 1e-6);
    }

    #[test]
    fn memristor_inverter_endpoints_are_rail_accurate() {
        let inv = hh_inverter();
        let op0 = solve_dc(&inv, &[("in", 0.0)], None).unwrap();
        assert!((op0.output_voltage(&inv) - 1.65).abs() < 1e-6);
        assert!(op0.residual_norm <= 1e-12);
        let op1 = solve_dc(&inv, &[("in", 1.65)], None).unwrap();
        assert!(op1.output_voltage(&inv) < 1e-6);
        assert!(op1.residual_norm <= 1e-12);
    }

    #[test]
    fn input_validation_is_strict() {
        let inv = hh_inverter();
        assert!(matches!(
            solve_dc(&inv, &[("in", -0.1)], None),
            Err(Error::InputOutOfRange { .. })
        ));
        assert!(matches!(
            solve_dc(&inv, &[("wrong", 0.0)], None),
            Err(Error::UnknownPort(_))
        ));
        assert!(matches!(
            solve_dc(&inv, &[], None),
            Err(Error::BadDrive { .. })
        ));
        assert!(matches!(
            solve_dc(&inv, &[("in", 0.1), ("in", 0.2)], None),
            Err(Error::BadDrive { .. })
        ));
    }

    #[test]
    fn warm_and_cold_starts_agree() {
        let inv = hh_inverter();
        let grid = linear_grid(0.0, 1.65, 34);
        let trace = sweep_1d(&inv, "in", &grid, &[], "hh").unwrap();
        for (k, &v) in grid.iter().enumerate() {
            let cold = solve_dc(&inv, &[("in", v)], None).unwrap();
            assert!(
                (cold.output_voltage(&inv) - trace.outputs[k]).abs() <= 1e-9,
                "cold/warm disagreement at grid point {k}"
            );
        }
    }

    #[test]
    fn bisection_fallback_matches_newton() {
        let inv = hh_inverter();
        let newton_op = solve_dc(&inv, &[("in", 0.8)], None).unwrap();
        let crippled = SolverOptions {
            max_iterations: 0,
            ..SolverOptions::default()
        };
        let bisected = solve_dc_with(&inv, &[("in", 0.8)], None, &crippled).unwrap();
        assert!(
            (bisected.output_voltage(&inv) - newton_op.output_voltage(&inv)).abs() <= 1e-6
        );
        assert!(bisected.residual_norm <= 1e-12);
    }

    #[test]
    fn disabled_fallback_reports_nonconvergence() {
        let inv = hh_inverter();
        let crippled = SolverOptions {
            max_iterations: 0,
            bisection_fallback: false,
            ..SolverOptions::default()
        };
        let err = solve_dc_with(&inv, &[("in", 0.8)], None, &crippled).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn reversed_grid_gives_reversed_trace() {
        let inv = hh_inverter();
        let grid = linear_grid(0.0, 1.65, 23);
        let forward = sweep_1d(&inv, "in", &grid, &[], "f").unwrap();
        let mut reversed_grid = grid.clone();
        reversed_grid.reverse();
        let backward = sweep_1d(&inv, "in", &reversed_grid, &[], "b").unwrap();
        for (k, out) in forward.outputs.iter().enumerate() {
            let mirrored = backward.outputs[grid.len() - 1 - k];
            assert!((out - mirrored).abs() <= 1e-9);
        }
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let inv = hh_inverter();
        assert!(matches!(
            sweep_1d(&inv, "in", &[], &[], "x"),
            Err(Error::GridNotMonotone)
        ));
        assert!(matches!(
            sweep_1d(&inv, "in", &[0.0, 0.0, 0.1], &[], "x"),
            Err(Error::GridNotMonotone)
        ));
    }

    #[test]
    fn sweep_failures_carry_the_grid_index() {
        let inv = hh_inverter();
        let err = sweep_1d(&inv, "in", &[0.0, 0.5, 2.0], &[], "x").unwrap_err();
        match err {
            Error::SweepPoint { index, .. } => assert_eq!(index, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn plateau_metrics_on_synthetic_step() {
        // Digital-like step: flat rails, one steep cell. Width must collapse.
        let inputs = linear_grid(0.0, 1.0, 21);
        let outputs: Vec<f64> = inputs
            .iter()
            .map(|&v| if v < 0.5 { 1.0 } else { 0.0 })
            .collect();
        let trace = SweepTrace {
            label: "step".into(),
            inputs,
            outputs,
        };
        let metrics = plateau_metrics(&trace).unwrap();
        assert!(metrics.width <= 0.1, "width {} too wide", metrics.width);
    }

    #[test]
    fn plateau_metrics_on_synthetic_plateau() {
        // Rail, ramp, mid plateau at 0.6, ramp, rail.
        let inputs = linear_grid(0.0, 1.0, 41);
        let outputs: Vec<f64> = inputs
            .iter()
            .map(|&v| {
                if v < 0.2 {
                    1.0
                } else if v < 0.3 {
                    1.0 - 4.0 * (v - 0.2)
                } else if v < 0.7 {
                    0.6
                } else if v < 0.8 {
                    0.6 - 6.0 * (v - 0.7)
                } else {
                    0.0
                }
            })
            .collect();
        let trace = SweepTrace {
            label: "plateau".into(),
            inputs,
            outputs,
        };
        let metrics = plateau_metrics(&trace).unwrap();
        assert!((metrics.altitude - 0.6).abs() <= 1e-9);
        // The flat region spans 0.3..0.7; central differences blur each kink
        // by one grid step (0.025), so the detected plateau is inset by one
        // point per side.
        assert!((metrics.width - 0.35).abs() <= 1e-9, "width {}", metrics.width);
    }

    #[test]
    fn plateau_needs_five_points() {
        let trace = SweepTrace {
            label: "short".into(),
            inputs: vec![0.0, 0.5, 1.0],
            outputs: vec![1.0, 0.5, 0.0],
        };
        assert!(matches!(
            plateau_metrics(&trace),
            Err(Error::TraceTooShort { len: 3 })
        ));
    }

    #[test]
    fn family_specs_validate_their_constraint() {
        assert!(ModalitySpec::ratio_fixed(2.0, vec![(2e6, 1e6), (4e6, 2e6)]).is_ok());
        assert!(ModalitySpec::ratio_fixed(2.0, vec![(2e6, 1.5e6)]).is_err());
        assert!(ModalitySpec::sum_fixed(10e6, vec![(4e6, 6e6)]).is_ok());
        assert!(ModalitySpec::sum_fixed(10e6, vec![(4e6, 5e6)]).is_err());
    }

    #[test]
    fn strip_grid_matches_measurement_protocol() {
        let grid = strip_sweep_grid(1.65);
        let expected = [
            0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.9, 1.0, 1.1, 1.2,
            1.3, 1.4, 1.5, 1.6, 1.65,
        ];
        assert_eq!(grid.len(), expected.len());
        for (g, e) in grid.iter().zip(expected) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_chain_passes_the_first_output_through() {
        let inv = hh_inverter();
        let chain = GateChain::new(inv.clone(), ChainTarget::Identity, "in").unwrap();
        let result = chain.evaluate(&[("in", 0.2)], &[]).unwrap();
        assert_eq!(result.first_output, result.final_output);
        let direct = solve_dc(&inv, &[("in", 0.2)], None).unwrap();
        assert!((result.first_output - direct.output_voltage(&inv)).abs() <= 1e-12);
    }

    #[test]
    fn double_inversion_restores_the_rail() {
        let inv = hh_inverter();
        let chain =
            GateChain::new(inv.clone(), ChainTarget::Gate(inv.clone()), "in").unwrap();
        let result = chain.evaluate(&[("in", 0.0)], &[]).unwrap();
        assert!((result.first_output - 1.65).abs() < 1e-6);
        assert!(result.final_output < 1e-3);
    }
}
