//! The five experiment drivers. Every command reads its section of the run
//! configuration, writes CSV files (and optional SVG plots) into the output
//! directory, and prints a short deterministic summary.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use memgate_core::devices::MemristorState;
use memgate_core::energy::{self, DividerModel};
use memgate_core::netlist::GateCircuit;
use memgate_core::readout::{self, Bit};
use memgate_core::solver::{self, OperatingPoint};
use memgate_core::spikesort;

use crate::config::RunConfig;
use crate::{svg, CliError};

/// Serialized writes into the output directory.
pub struct Emitter {
    dir: PathBuf,
}

impl Emitter {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir }
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.dir).map_err(|source| CliError::Io {
            path: self.dir.clone(),
            source,
        })?;
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

fn volts(v: f64) -> String {
    format!("{v:.6}")
}

fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

fn fixed_state(ohms: f64) -> Result<MemristorState, CliError> {
    MemristorState::fixed(ohms).map_err(CliError::from)
}

fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    section
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("configuration has no `{name}` section")))
}

/// Transfer sweeps of the two-memristor inverter, one CSV per programmed
/// state pair, plus an overlay plot.
pub fn cmd_sweep(config: &RunConfig, out: &Emitter, emit_svg: bool) -> Result<(), CliError> {
    let section = require(&config.sweep, "sweep")?;
    let (pmos, nmos) = config.device_pair()?;
    let grid = section.grid.build("sweep.grid")?;
    if section.configs.is_empty() {
        return Err(CliError::Config("sweep: no configurations listed".into()));
    }
    let mut seen = BTreeSet::new();
    let mut series = Vec::new();
    for entry in &section.configs {
        let valid_label = !entry.label.is_empty()
            && entry
                .label
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if !valid_label {
            return Err(CliError::Config(format!(
                "sweep: label {:?} must be non-empty and use only letters, digits, `_`, `-`",
                entry.label
            )));
        }
        if !seen.insert(&entry.label) {
            return Err(CliError::Config(format!(
                "sweep: duplicate label {:?}",
                entry.label
            )));
        }
        let circuit = GateCircuit::inverter_2t2r(
            pmos.clone(),
            nmos.clone(),
            fixed_state(entry.r_up)?,
            fixed_state(entry.r_dn)?,
            section.vdd,
        )?;
        let trace = solver::sweep_1d(&circuit, "in", &grid, &[], &entry.label)?;
        let mut csv = String::from("v_in,v_out\n");
        for (v_in, v_out) in trace.inputs.iter().zip(&trace.outputs) {
            csv.push_str(&format!("{},{}\n", volts(*v_in), volts(*v_out)));
        }
        out.write(&format!("sweep_{}.csv", entry.label), &csv)?;
        series.push((
            entry.label.clone(),
            trace.inputs.iter().copied().zip(trace.outputs).collect(),
        ));
    }
    if emit_svg {
        let chart = svg::polyline_chart("inverter transfer sweeps", "v_in (V)", "v_out (V)", &series);
        out.write("sweep.svg", &chart)?;
    }
    Ok(())
}

/// Full fuzzy-NAND surface plus its two single-input reductions; optionally
/// the rail-exchanged NOR surface.
pub fn cmd_surface(config: &RunConfig, out: &Emitter, emit_svg: bool) -> Result<(), CliError> {
    let section = require(&config.surface, "surface")?;
    let (pmos, nmos) = config.device_pair()?;
    let grid = section.grid.build("surface.grid")?;
    let nand = GateCircuit::nand_4t3r(
        pmos.clone(),
        pmos,
        nmos.clone(),
        nmos,
        fixed_state(section.m_a)?,
        fixed_state(section.m_b)?,
        fixed_state(section.m_c)?,
        section.vdd,
    )?;

    let surface = solver::surface_2d(&nand, "a", &grid, "b", &grid)?;
    let mut csv = String::from("v_a,v_b,v_out\n");
    for (i, row) in surface.outputs.iter().enumerate() {
        for (j, v_out) in row.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{}\n",
                volts(surface.a_values[i]),
                volts(surface.b_values[j]),
                volts(*v_out)
            ));
        }
    }
    out.write("surface.csv", &csv)?;

    for (port, fixed_port, name) in [("a", "b", "surface_reduction_a.csv"), ("b", "a", "surface_reduction_b.csv")] {
        let trace = solver::sweep_1d(&nand, port, &grid, &[(fixed_port, section.vdd)], port)?;
        let mut csv = String::from("v_in,v_out\n");
        for (v_in, v_out) in trace.inputs.iter().zip(&trace.outputs) {
            csv.push_str(&format!("{},{}\n", volts(*v_in), volts(*v_out)));
        }
        out.write(name, &csv)?;
    }

    if emit_svg {
        let chart = svg::heatmap_chart(
            "fuzzy NAND surface",
            "v_a (V)",
            "v_b (V)",
            &surface.a_values,
            &surface.b_values,
            &surface.outputs,
            section.vdd,
        );
        out.write("surface.svg", &chart)?;
    }

    if section.emit_nor_dual {
        let nor = nand.nor_dual()?;
        let dual = solver::surface_2d(&nor, "a", &grid, "b", &grid)?;
        let mut csv = String::from("v_a,v_b,v_out\n");
        for (i, row) in dual.outputs.iter().enumerate() {
            for (j, v_out) in row.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    volts(dual.a_values[i]),
                    volts(dual.b_values[j]),
                    volts(*v_out)
                ));
            }
        }
        out.write("surface_nor.csv", &csv)?;
        if emit_svg {
            let chart = svg::heatmap_chart(
                "fuzzy NOR surface (rail-exchanged dual)",
                "v_a (V)",
                "v_b (V)",
                &dual.a_values,
                &dual.b_values,
                &dual.outputs,
                section.vdd,
            );
            out.write("surface_nor.svg", &chart)?;
        }
    }
    Ok(())
}

/// Charge/energy report of one divider model across a settling-window grid,
/// with the trapezoidal transient integration alongside the closed forms.
pub fn cmd_energy(config: &RunConfig, out: &Emitter, emit_svg: bool) -> Result<(), CliError> {
    let section = require(&config.energy, "energy")?;
    let model = DividerModel::new(
        section.r1,
        section.r2,
        section.c_out,
        section.vdd,
        section.v_out_1,
    )?;
    let l_grid = section.l_grid.build("energy.l_grid")?;
    if l_grid[0] < 0.0 {
        return Err(CliError::Config(
            "energy.l_grid: settling windows must be non-negative".into(),
        ));
    }

    let mut csv =
        String::from("l,q_leak,q_charge,q_tot,q_tot_alt,e_upper,toggle_equivalents,q_oracle,e_oracle\n");
    let mut supply_energy = Vec::new();
    let mut upper_bound = Vec::new();
    for &l in &l_grid {
        let report = energy::q_tot(&model, l)?;
        let (q_oracle, e_oracle) = energy::transient_oracle(&model, l, section.oracle_dt_fraction)?;
        let toggles = energy::toggle_equivalents(report.q_tot, model.c_out(), model.vdd())?;
        csv.push_str(&format!(
            "{:.6},{},{},{},{},{},{:.6},{},{}\n",
            l,
            sci(report.q_leak),
            sci(report.q_charge),
            sci(report.q_tot),
            sci(report.q_tot_alt),
            sci(report.e_upper),
            toggles,
            sci(q_oracle),
            sci(e_oracle),
        ));
        supply_energy.push((l, model.vdd() * report.q_tot * 1e15));
        upper_bound.push((l, report.e_upper * 1e15));
    }
    out.write("energy.csv", &csv)?;

    if emit_svg {
        let chart = svg::polyline_chart(
            "settling charge cost",
            "settling window l (time constants)",
            "energy (fJ)",
            &[
                ("vdd*q_tot".to_string(), supply_energy),
                ("e_upper".to_string(), upper_bound),
            ],
        );
        out.write("energy.svg", &chart)?;
    }
    Ok(())
}

fn bit_name(bit: Bit) -> &'static str {
    match bit {
        Bit::Zero => "zero",
        Bit::One => "one",
        Bit::Ambiguous => "ambiguous",
    }
}

/// Digitization trace through the current read-out, input either driven
/// directly or produced by an analogue inverter stage, plus the reported
/// on-target window.
pub fn cmd_digitize(config: &RunConfig, out: &Emitter, emit_svg: bool) -> Result<(), CliError> {
    let section = require(&config.digitize, "digitize")?;
    let params = config.readout_params(section.vdd)?;
    let circuit = match (section.r_up, section.r_dn) {
        (Some(r_up), Some(r_dn)) => {
            let (pmos, nmos) = config.device_pair()?;
            Some(GateCircuit::inverter_2t2r(
                pmos,
                nmos,
                fixed_state(r_up)?,
                fixed_state(r_dn)?,
                section.vdd,
            )?)
        }
        (None, None) => None,
        _ => {
            return Err(CliError::Config(
                "digitize: r_up and r_dn must be given together".into(),
            ))
        }
    };
    let grid = section.grid.build("digitize.grid")?;

    let mut csv = String::from("v_in,v_mid,v_out1,bit,i_out,on_target\n");
    let mut mid_series = Vec::new();
    let mut stage_series = Vec::new();
    let mut warm: Option<OperatingPoint> = None;
    for &v_in in &grid {
        let v_mid = match &circuit {
            Some(circuit) => {
                let op = solver::solve_dc(circuit, &[("in", v_in)], warm.as_ref())?;
                let v_mid = op.output_voltage(circuit).clamp(0.0, section.vdd);
                warm = Some(op);
                v_mid
            }
            None => v_in.clamp(0.0, section.vdd),
        };
        let result = readout::on_target(&params, v_mid)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            volts(v_in),
            volts(v_mid),
            volts(result.v_out1),
            bit_name(result.bit),
            sci(result.i_out),
            result.on_target,
        ));
        mid_series.push((v_in, v_mid));
        stage_series.push((v_in, result.v_out1));
    }
    out.write("digitize.csv", &csv)?;

    match readout::on_target_window(&params)? {
        Some((lo, hi)) => println!(
            "on-target window: [{}, {}] V, width {} V",
            volts(lo),
            volts(hi),
            volts(hi - lo)
        ),
        None => println!(
            "no input drives the shoot-through current above i_ref = {} A",
            sci(params.i_ref)
        ),
    }

    if emit_svg {
        let chart = svg::polyline_chart(
            "digitization through the current read-out",
            "v_in (V)",
            "volts",
            &[
                ("v_mid".to_string(), mid_series),
                ("v_out1".to_string(), stage_series),
            ],
        );
        out.write("digitize.svg", &chart)?;
    }
    Ok(())
}

/// The template-matching experiment: spike dataset in, per-instance matching
/// degrees out, with a ranking summary and bar chart.
pub fn cmd_texel(
    config: &RunConfig,
    config_path: &Path,
    out: &Emitter,
    emit_svg: bool,
) -> Result<(), CliError> {
    let section = require(&config.texel, "texel")?;
    let dataset = spikesort::load_dataset(&section.dataset_path(config_path))?;
    let array = section.build_array()?;
    let rows = spikesort::run_experiment(
        &dataset,
        &array,
        section.v_trig,
        section.gain,
        section.offset,
    )?;

    let mut csv = String::from("class,tag,txl1,txl2,txl3,txl4,v_out\n");
    for row in &rows {
        let r = &row.vector.rounded;
        csv.push_str(&format!(
            "{},{},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            row.vector.class_label, row.vector.tag, r[0], r[1], r[2], r[3], row.v_out
        ));
    }
    out.write("texel_report.csv", &csv)?;

    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        rows[b]
            .v_out
            .partial_cmp(&rows[a].v_out)
            .unwrap()
            .then(a.cmp(&b))
    });
    println!("ranking (best match first):");
    for (rank, &k) in order.iter().enumerate() {
        println!(
            "  {}. class {} {}  v_out {:.4}",
            rank + 1,
            rows[k].vector.class_label,
            rows[k].vector.tag,
            rows[k].v_out
        );
    }
    let shared: Vec<&spikesort::ExperimentRow> = rows.iter().filter(|r| r.shared).collect();
    if shared.is_empty() {
        println!("no rows share a rounded input vector");
    } else {
        let names: Vec<String> = shared
            .iter()
            .map(|r| format!("class {} {}", r.vector.class_label, r.vector.tag))
            .collect();
        println!(
            "shared rounded inputs evaluated once: {}",
            names.join(" = ")
        );
    }

    if emit_svg {
        let labels: Vec<String> = rows
            .iter()
            .map(|r| format!("{}{}", r.vector.class_label, r.vector.tag))
            .collect();
        let values: Vec<f64> = rows.iter().map(|r| r.v_out).collect();
        let chart = svg::bar_chart(
            "texel array matching degree",
            "v_out (V)",
            &labels,
            &values,
            array.vdd,
        );
        out.write("texel.svg", &chart)?;
    }
    Ok(())
}
