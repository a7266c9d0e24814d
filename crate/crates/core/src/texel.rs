//! Template pixels: an analogue inverter whose mid node feeds a
//! current-output read-out stage, so the cell sources maximal current when
//! its input voltage matches a stored value.
//!
//! The stored value is held as the resistance of the inverter's pull-down
//! memristor: the input at which the mid node crosses the read-out switch
//! point (the peak input) shifts monotonically with that resistance.
//! Several texels share a common load resistor; the load voltage rises with
//! the summed currents and acts as a degree-of-match readout.

use crate::devices::{MemristorState, MosfetParams, Polarity};
use crate::error::{Error, Result};
use crate::netlist::GateCircuit;
use crate::readout::{self, ReadoutParams};
use crate::solver::solve_dc;

/// Bisection resolution of the peak input, volts.
pub const PEAK_RESOLUTION: f64 = 1e-4;

/// Programming tolerance on the achieved peak input, volts.
pub const PROGRAM_TOLERANCE: f64 = 1e-3;

/// Which memristor holds the template value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgramSide {
    PullDown,
    PullUp,
}

/// One template pixel: inverter devices, its two memristors, and the
/// current-output read-out fed by the inverter's output node.
#[derive(Debug, Clone)]
pub struct TexelConfig {
    pub pmos: MosfetParams,
    pub nmos: MosfetParams,
    /// Pull-up memristor, held fixed by default.
    pub r0: MemristorState,
    /// Pull-down memristor, the stored template value by default.
    pub r1: MemristorState,
    pub readout: ReadoutParams,
    pub vdd: f64,
    /// Which memristor template programming adjusts.
    pub programs: ProgramSide,
    /// Optional series resistance on the mirrored output; caps the sourced
    /// current at vdd divided by this resistance.
    pub series_limit: Option<f64>,
}

impl TexelConfig {
    /// Validate devices and confirm the peak input exists for the stored
    /// state.
    pub fn new(
        pmos: MosfetParams,
        nmos: MosfetParams,
        r0: MemristorState,
        r1: MemristorState,
        readout: ReadoutParams,
        vdd: f64,
        programs: ProgramSide,
        series_limit: Option<f64>,
    ) -> Result<Self> {
        if !(vdd > 0.0 && vdd.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "vdd",
                value: vdd,
                constraint: "must be positive",
            });
        }
        if (readout.vdd - vdd).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "readout.vdd",
                value: readout.vdd,
                constraint: "must equal the texel supply",
            });
        }
        if let Some(r) = series_limit {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "series_limit",
                    value: r,
                    constraint: "must be positive when present",
                });
            }
        }
        let config = Self {
            pmos,
            nmos,
            r0,
            r1,
            readout,
            vdd,
            programs,
            series_limit,
        };
        peak_input(&config)?;
        Ok(config)
    }

    /// Devices and sizing used throughout the matching experiment: a 1.25 V
    /// supply and low-threshold strong inverter devices so the memristor
    /// divider dominates the transfer curve. The read-out conduction band is
    /// placed low (0.275 V to 0.475 V), which pushes the peak input into the
    /// upper half of the input range: stored resistances near 10 kΩ to 20 kΩ
    /// map onto peak inputs near 0.7 V, and the cell current falls off within
    /// tens of millivolts of the peak. The read-out pair is deliberately
    /// unbalanced (strong n-channel device) so the band extends further above
    /// the switch point than below; the cell then tolerates inputs below its
    /// stored value better than inputs above it.
    pub fn paper_experiment() -> Self {
        let nmos = MosfetParams::new(Polarity::N, 0.25, 170e-6, 10.0, 3.5, 0.05, 1e-12)
            .expect("reference texel nmos");
        let pmos = MosfetParams::new(
            Polarity::P,
            0.25,
            58e-6,
            10.0 * 170.0 / 58.0,
            3.5,
            0.05,
            1e-12,
        )
        .expect("reference texel pmos");
        let readout_nmos = MosfetParams::new(Polarity::N, 0.275, 170e-6, 2.0, 3.5, 0.05, 1e-12)
            .expect("reference readout nmos");
        let readout_pmos = MosfetParams::new(
            Polarity::P,
            0.775,
            58e-6,
            1.0 * 170.0 / 58.0,
            3.5,
            0.05,
            1e-12,
        )
        .expect("reference readout pmos");
        let readout = ReadoutParams::new(readout_pmos, readout_nmos, 1.25, 1e-7, 2.4, 0.125)
            .expect("reference readout");
        Self::new(
            pmos,
            nmos,
            MemristorState::new(20e3, 1e3, 1e6).expect("pull-up state"),
            MemristorState::new(15e3, 5e3, 120e3).expect("pull-down state"),
            readout,
            1.25,
            ProgramSide::PullDown,
            None,
        )
        .expect("reference texel is self-consistent")
    }

    /// The inverter stage driving the mid node.
    pub fn inverter(&self) -> Result<GateCircuit> {
        GateCircuit::inverter_2t2r(
            self.pmos.clone(),
            self.nmos.clone(),
            self.r0.clone(),
            self.r1.clone(),
            self.vdd,
        )
    }

    /// Resistance of the memristor selected by `programs`.
    pub fn stored_resistance(&self) -> f64 {
        match self.programs {
            ProgramSide::PullDown => self.r1.resistance(),
            ProgramSide::PullUp => self.r0.resistance(),
        }
    }

    fn with_stored_resistance(&self, ohms: f64) -> Result<Self> {
        let mut copy = self.clone();
        match self.programs {
            ProgramSide::PullDown => copy.r1 = self.r1.program(ohms)?,
            ProgramSide::PullUp => copy.r0 = self.r0.program(ohms)?,
        }
        Ok(copy)
    }
}

/// Mid-node voltage of the texel inverter at one input.
pub fn mid_voltage(config: &TexelConfig, v_in: f64) -> Result<f64> {
    let inverter = config.inverter()?;
    let op = solve_dc(&inverter, &[("in", v_in)], None)?;
    Ok(op.output_voltage(&inverter))
}

/// Current sourced by the texel at one input voltage.
pub fn texel_current(config: &TexelConfig, v_in: f64) -> Result<f64> {
    let v_mid = mid_voltage(config, v_in)?.clamp(0.0, config.vdd);
    let current = readout::mirrored_current(&config.readout, v_mid)?;
    Ok(match config.series_limit {
        Some(r) => current.min(config.vdd / r),
        None => current,
    })
}

/// Input voltage at which the mid node equals the read-out switch point,
/// located by bisection to 0.1 mV. The texel current peaks here.
pub fn peak_input(config: &TexelConfig) -> Result<f64> {
    let v_opt = readout::switch_point(&config.readout)?;
    peak_input_for(config, v_opt)
}

fn peak_input_for(config: &TexelConfig, v_opt: f64) -> Result<f64> {
    let mid_hi = mid_voltage(config, 0.0)?;
    let mid_lo = mid_voltage(config, config.vdd)?;
    if v_opt > mid_hi || v_opt < mid_lo {
        return Err(Error::PeakUnreachable {
            v_opt,
            mid_lo,
            mid_hi,
        });
    }
    let mut lo = 0.0_f64;
    let mut hi = config.vdd;
    while hi - lo > PEAK_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if mid_voltage(config, mid)? > v_opt {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A row of texels summing their currents into one load resistor.
#[derive(Debug, Clone)]
pub struct TexelArrayConfig {
    pub texels: Vec<TexelConfig>,
    pub r_load: f64,
    pub vdd: f64,
}

impl TexelArrayConfig {
    pub fn new(texels: Vec<TexelConfig>, r_load: f64) -> Result<Self> {
        if texels.is_empty() {
            return Err(Error::CircuitShape("texel array needs at least one texel".into()));
        }
        if !(r_load > 0.0 && r_load.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r_load",
                value: r_load,
                constraint: "must be positive",
            });
        }
        let vdd = texels[0].vdd;
        if texels.iter().any(|t| (t.vdd - vdd).abs() > 1e-12) {
            return Err(Error::CircuitShape(
                "all texels in an array share one supply voltage".into(),
            ));
        }
        Ok(Self {
            texels,
            r_load,
            vdd,
        })
    }

    /// Four identical reference texels on the measured 300 kΩ common load.
    pub fn paper_experiment() -> Self {
        let texel = TexelConfig::paper_experiment();
        Self::new(vec![texel.clone(), texel.clone(), texel.clone(), texel], 300e3)
            .expect("reference array is valid")
    }
}

/// Degree-of-match output of one array evaluation.
#[derive(Debug, Clone)]
pub struct MatchResult {
    /// Load voltage, clipped at the supply.
    pub v_out: f64,
    pub per_texel_current: Vec<f64>,
    /// Whether the supply clip was engaged.
    pub clipped: bool,
}

/// Program the stored memristor of every texel so its peak input meets the
/// corresponding target within 1 mV, by bisection over the memristor's
/// programmable range.
pub fn program_template(array: &TexelArrayConfig, targets: &[f64]) -> Result<TexelArrayConfig> {
    if targets.len() != array.texels.len() {
        return Err(Error::ArityMismatch {
            expected: array.texels.len(),
            got: targets.len(),
        });
    }
    let mut programmed = Vec::with_capacity(array.texels.len());
    for (index, (texel, &target)) in array.texels.iter().zip(targets).enumerate() {
        programmed.push(program_one(texel, target, index)?);
    }
    TexelArrayConfig::new(programmed, array.r_load)
}

fn program_one(texel: &TexelConfig, target: f64, index: usize) -> Result<TexelConfig> {
    let v_opt = readout::switch_point(&texel.readout)?;
    let (r_min, r_max) = match texel.programs {
        ProgramSide::PullDown => texel.r1.bounds(),
        ProgramSide::PullUp => texel.r0.bounds(),
    };
    let peak_at = |r: f64| -> Result<f64> {
        peak_input_for(&texel.with_stored_resistance(r)?, v_opt)
    };
    let at_min = peak_at(r_min)?;
    let at_max = peak_at(r_max)?;
    let (lo_v, hi_v) = if at_min <= at_max {
        (at_min, at_max)
    } else {
        (at_max, at_min)
    };
    if target < lo_v - PROGRAM_TOLERANCE || target > hi_v + PROGRAM_TOLERANCE {
        return Err(Error::TargetUnreachable {
            texel: index,
            target,
            lo: lo_v,
            hi: hi_v,
        });
    }
    let increasing = at_max >= at_min;
    let mut r_lo = r_min;
    let mut r_hi = r_max;
    let mut best = (r_min, (at_min - target).abs());
    if (at_max - target).abs() < best.1 {
        best = (r_max, (at_max - target).abs());
    }
    for _ in 0..80 {
        if best.1 <= PROGRAM_TOLERANCE {
            break;
        }
        let r_mid = 0.5 * (r_lo + r_hi);
        let v_mid = peak_at(r_mid)?;
        if (v_mid - target).abs() < best.1 {
            best = (r_mid, (v_mid - target).abs());
        }
        if (v_mid < target) == increasing {
            r_lo = r_mid;
        } else {
            r_hi = r_mid;
        }
    }
    if best.1 > PROGRAM_TOLERANCE {
        return Err(Error::TargetUnreachable {
            texel: index,
            target,
            lo: lo_v,
            hi: hi_v,
        });
    }
    texel.with_stored_resistance(best.0)
}

/// Evaluate the array on one input vector: per-texel currents summed into
/// the common load, with the load voltage clipped at the supply.
pub fn array_match(array: &TexelArrayConfig, inputs: &[f64]) -> Result<MatchResult> {
    if inputs.len() != array.texels.len() {
        return Err(Error::ArityMismatch {
            expected: array.texels.len(),
            got: inputs.len(),
        });
    }
    let mut per_texel_current = Vec::with_capacity(inputs.len());
    for (texel, &v_in) in array.texels.iter().zip(inputs) {
        per_texel_current.push(texel_current(texel, v_in)?);
    }
    let raw = array.r_load * per_texel_current.iter().sum::<f64>();
    let clipped = raw > array.vdd;
    Ok(MatchResult {
        v_out: raw.min(array.vdd),
        per_texel_current,
        clipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> TexelConfig {
        TexelConfig::paper_experiment()
    }

    #[test]
    fn rail_inputs_source_negligible_current() {
        let t = reference();
        assert!(texel_current(&t, 0.0).unwrap() < 1e-10);
        assert!(texel_current(&t, t.vdd).unwrap() < 1e-10);
    }

    #[test]
    fn peak_input_maximises_the_current() {
        let t = reference();
        let v_pk = peak_input(&t).unwrap();
        assert!(v_pk > 0.0 && v_pk < t.vdd);
        let i_pk = texel_current(&t, v_pk).unwrap();
        let mut best_grid = 0.0_f64;
        for k in 0..=1250 {
            let v = (k as f64 * 1e-3).min(t.vdd);
            best_grid = best_grid.max(texel_current(&t, v).unwrap());
        }
        assert!(
            i_pk >= best_grid * (1.0 - 1e-4),
            "bisected peak {i_pk} below grid max {best_grid}"
        );
    }

    #[test]
    fn fully_symmetric_texel_peaks_at_mid_supply() {
        let t = reference();
        let symmetric = TexelConfig::new(
            t.nmos.mirrored(),
            t.nmos.clone(),
            MemristorState::new(20e3, 1e3, 1e6).unwrap(),
            MemristorState::new(20e3, 5e3, 120e3).unwrap(),
            crate::readout::ReadoutParams::symmetric_default(1.25).unwrap(),
            1.25,
            ProgramSide::PullDown,
            None,
        )
        .unwrap();
        let v_pk = peak_input(&symmetric).unwrap();
        assert!(
            (v_pk - 0.625).abs() <= 5e-3,
            "symmetric texel peaked at {v_pk}, expected mid-supply"
        );
    }

    #[test]
    fn mid_node_is_monotone_in_the_input() {
        let t = reference();
        let mut previous = f64::INFINITY;
        for k in 0..=125 {
            let v = k as f64 * 0.01;
            let mid = mid_voltage(&t, v).unwrap();
            assert!(mid <= previous + 1e-9);
            previous = mid;
        }
    }

    #[test]
    fn stored_resistance_shifts_the_peak_monotonically() {
        let t = reference();
        let mut peaks = Vec::new();
        for r in [10e3, 20e3, 40e3, 60e3, 80e3, 100e3] {
            let programmed = t.with_stored_resistance(r).unwrap();
            peaks.push(peak_input(&programmed).unwrap());
        }
        for pair in peaks.windows(2) {
            assert!(
                pair[1] >= pair[0] - 2.0 * PEAK_RESOLUTION,
                "peak went backwards: {pair:?}"
            );
        }
        assert!(
            peaks.last().unwrap() - peaks.first().unwrap() > 0.05,
            "peak span too small: {peaks:?}"
        );
    }

    #[test]
    fn programming_is_a_fixed_point_at_the_current_peak() {
        let array = TexelArrayConfig::paper_experiment();
        let current_peaks: Vec<f64> = array
            .texels
            .iter()
            .map(|t| peak_input(t).unwrap())
            .collect();
        let programmed = program_template(&array, &current_peaks).unwrap();
        for (before, after) in array.texels.iter().zip(&programmed.texels) {
            let drift = (after.stored_resistance() - before.stored_resistance()).abs()
                / before.stored_resistance();
            assert!(drift < 0.05, "resistance drifted by {drift}");
        }
    }

    #[test]
    fn template_targets_map_to_ordered_resistances() {
        let array = TexelArrayConfig::paper_experiment();
        let targets = [0.73, 0.72, 0.71, 0.71];
        let programmed = program_template(&array, &targets).unwrap();
        let r: Vec<f64> = programmed
            .texels
            .iter()
            .map(|t| t.stored_resistance())
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2], "not descending: {r:?}");
        assert_eq!(r[2], r[3], "equal targets must program equal resistances");
        for (texel, &target) in programmed.texels.iter().zip(&targets) {
            let achieved = peak_input(texel).unwrap();
            assert!(
                (achieved - target).abs() <= PROGRAM_TOLERANCE + PEAK_RESOLUTION,
                "texel peaked at {achieved}, wanted {target}"
            );
        }
    }

    #[test]
    fn distinct_ideal_targets_give_distinct_resistances() {
        let array = TexelArrayConfig::paper_experiment();
        let targets = [0.7347, 0.7231, 0.7149, 0.7094];
        let programmed = program_template(&array, &targets).unwrap();
        let r: Vec<f64> = programmed
            .texels
            .iter()
            .map(|t| t.stored_resistance())
            .collect();
        for pair in r.windows(2) {
            assert!(pair[0] > pair[1], "not strictly descending: {r:?}");
        }
    }

    #[test]
    fn unreachable_target_reports_the_achievable_range() {
        let array = TexelArrayConfig::paper_experiment();
        let err = program_template(&array, &[0.73, 0.72, 0.71, 1.2]).unwrap_err();
        match err {
            Error::TargetUnreachable { texel, lo, hi, .. } => {
                assert_eq!(texel, 3);
                assert!(lo < hi);
                assert!(hi < 1.2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn array_checks_input_arity() {
        let array = TexelArrayConfig::paper_experiment();
        assert!(matches!(
            array_match(&array, &[0.7, 0.7]),
            Err(Error::ArityMismatch {
                expected: 4,
                got: 2
            })
        ));
    }

    #[test]
    fn zero_inputs_give_near_zero_output() {
        let array = TexelArrayConfig::paper_experiment();
        let result = array_match(&array, &[0.0; 4]).unwrap();
        assert!(result.v_out < 1e-3);
        assert!(!result.clipped);
    }

    #[test]
    fn matched_inputs_dominate_every_grid_combination_for_two_texels() {
        let base = reference();
        let t1 = base.with_stored_resistance(18e3).unwrap();
        let t2 = base.with_stored_resistance(30e3).unwrap();
        let array = TexelArrayConfig::new(vec![t1, t2], 300e3).unwrap();
        let peaks: Vec<f64> = array
            .texels
            .iter()
            .map(|t| peak_input(t).unwrap())
            .collect();
        let best = array_match(&array, &peaks).unwrap();

        let grid: Vec<f64> = (0..=125).map(|k| (k as f64 * 0.01).min(1.25)).collect();
        let mut currents = vec![Vec::with_capacity(grid.len()); 2];
        for (idx, texel) in array.texels.iter().enumerate() {
            for &v in &grid {
                currents[idx].push(texel_current(texel, v).unwrap());
            }
        }
        let mut best_sum = 0.0_f64;
        for &i1 in &currents[0] {
            for &i2 in &currents[1] {
                best_sum = best_sum.max(i1 + i2);
            }
        }
        let grid_v_out = (array.r_load * best_sum).min(array.vdd);
        assert!(
            best.v_out >= grid_v_out - 1e-4,
            "peak vector {} below grid best {grid_v_out}",
            best.v_out
        );
    }

    #[test]
    fn evaluation_never_mutates_programmed_states() {
        let array = program_template(
            &TexelArrayConfig::paper_experiment(),
            &[0.73, 0.72, 0.71, 0.71],
        )
        .unwrap();
        let before: Vec<u64> = array
            .texels
            .iter()
            .map(|t| t.stored_resistance().to_bits())
            .collect();
        for inputs in [[0.73, 0.72, 0.71, 0.71], [0.7, 0.7, 0.7, 0.7]] {
            array_match(&array, &inputs).unwrap();
        }
        let after: Vec<u64> = array
            .texels
            .iter()
            .map(|t| t.stored_resistance().to_bits())
            .collect();
        assert_eq!(before, after);
    }

    #[test]
    fn series_limiter_caps_the_output() {
        let mut limited = reference();
        let v_pk = peak_input(&limited).unwrap();
        let free_current = texel_current(&limited, v_pk).unwrap();
        limited.series_limit = Some(2.0 * limited.vdd / free_current);
        let capped = texel_current(&limited, v_pk).unwrap();
        assert!((capped - free_current / 2.0).abs() <= 1e-12 * free_current);
    }

    #[test]
    fn construction_rejects_mismatched_supplies() {
        let t = reference();
        let result = TexelConfig::new(
            t.pmos.clone(),
            t.nmos.clone(),
            t.r0.clone(),
            t.r1.clone(),
            ReadoutParams::symmetric_default(1.65).unwrap(),
            1.25,
            ProgramSide::PullDown,
            None,
        );
        assert!(matches!(result, Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn pull_up_side_can_hold_the_template_instead() {
        let mut t = reference();
        t.programs = ProgramSide::PullUp;
        t.r0 = MemristorState::new(20e3, 5e3, 120e3).unwrap();
        let array = TexelArrayConfig::new(vec![t], 300e3).unwrap();
        let peak_now = peak_input(&array.texels[0]).unwrap();
        let programmed = program_template(&array, &[peak_now - 0.02]).unwrap();
        let achieved = peak_input(&programmed.texels[0]).unwrap();
        assert!((achieved - (peak_now - 0.02)).abs() <= PROGRAM_TOLERANCE + PEAK_RESOLUTION);
    }
}
