//! Read-out stage: a plain inverter that digitises an analogue voltage, a
//! comparator on its shoot-through current that flags when the input sits
//! near the switch point, and a mirrored current output for summation.
//!
//! The inverter's output crosses mid-supply at the switch point, where both
//! transistors conduct simultaneously and the supply-to-ground shoot-through
//! current peaks. Comparing that current against a reference turns the stage
//! into an on-target detector whose acceptance window narrows as the
//! reference current rises.

use std::fmt;

use crate::devices::MosfetParams;
use crate::error::{Error, Result};
use crate::netlist::GateCircuit;
use crate::solver::{solve_dc, supply_current};

/// Grid step used when scanning for the shoot-through peak, volts.
const PEAK_SCAN_STEP: f64 = 1e-3;

/// Bisection resolution for switch point and window edges, volts.
const EDGE_RESOLUTION: f64 = 1e-9;

/// Digitised logic level, with an explicit band where the inverter output
/// sits too far from both rails to be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bit {
    Zero,
    One,
    Ambiguous,
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bit::Zero => write!(f, "0"),
            Bit::One => write!(f, "1"),
            Bit::Ambiguous => write!(f, "ambiguous"),
        }
    }
}

/// Read-out inverter devices and detector settings.
#[derive(Debug, Clone)]
pub struct ReadoutParams {
    pub pmos: MosfetParams,
    pub nmos: MosfetParams,
    pub vdd: f64,
    /// Reference current the shoot-through must reach to count as on-target.
    pub i_ref: f64,
    /// Scale factor from shoot-through current to the mirrored output.
    pub mirror_gain: f64,
    /// Distance from a rail within which the inverter output digitises
    /// cleanly; anything in between is ambiguous.
    pub ambiguity_margin: f64,
}

impl ReadoutParams {
    pub fn new(
        pmos: MosfetParams,
        nmos: MosfetParams,
        vdd: f64,
        i_ref: f64,
        mirror_gain: f64,
        ambiguity_margin: f64,
    ) -> Result<Self> {
        if !(vdd > 0.0 && vdd.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "vdd",
                value: vdd,
                constraint: "must be positive",
            });
        }
        if !(i_ref > 0.0 && i_ref.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "i_ref",
                value: i_ref,
                constraint: "must be positive",
            });
        }
        if !(mirror_gain > 0.0 && mirror_gain.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mirror_gain",
                value: mirror_gain,
                constraint: "must be positive",
            });
        }
        if !(ambiguity_margin > 0.0 && ambiguity_margin < vdd / 2.0) {
            return Err(Error::InvalidParameter {
                name: "ambiguity_margin",
                value: ambiguity_margin,
                constraint: "must lie in (0, vdd/2)",
            });
        }
        Ok(Self {
            pmos,
            nmos,
            vdd,
            i_ref,
            mirror_gain,
            ambiguity_margin,
        })
    }

    /// Beta-matched complementary pair with equal thresholds, so the switch
    /// point sits at mid-supply and the shoot-through peak coincides with it.
    pub fn symmetric_default(vdd: f64) -> Result<Self> {
        let nmos = MosfetParams::new(
            crate::devices::Polarity::N,
            0.5,
            170e-6,
            2.0,
            3.5,
            0.05,
            1e-12,
        )?;
        let pmos = MosfetParams::new(
            crate::devices::Polarity::P,
            0.5,
            58e-6,
            2.0 * 170.0 / 58.0,
            3.5,
            0.05,
            1e-12,
        )?;
        Self::new(pmos, nmos, vdd, 4e-6, 1.0, 0.1 * vdd)
    }

    /// The plain inverter this stage is built around.
    pub fn inverter(&self) -> Result<GateCircuit> {
        GateCircuit::plain_inverter(self.pmos.clone(), self.nmos.clone(), self.vdd)
    }
}

/// Outcome of pushing one analogue voltage through the read-out stage.
#[derive(Debug, Clone, Copy)]
pub struct DigitizationResult {
    pub bit: Bit,
    /// Inverter output voltage.
    pub v_out1: f64,
    /// Two-level detector output: 0 when on-target, vdd otherwise.
    pub v_out2: f64,
    /// Supply-to-ground current through the inverter.
    pub i_shoot: f64,
    pub on_target: bool,
    /// mirror_gain · i_shoot.
    pub i_out: f64,
}

fn solve_stage(params: &ReadoutParams, v_mid: f64) -> Result<(f64, f64)> {
    let inverter = params.inverter()?;
    let op = solve_dc(&inverter, &[("in", v_mid)], None)?;
    let v_out1 = op.output_voltage(&inverter);
    let i_shoot = supply_current(&inverter, &op);
    Ok((v_out1, i_shoot))
}

/// Digitise `v_mid`: solve the read-out inverter and classify its output by
/// rail distance. The on-target flag is left unset; see [`on_target`].
pub fn digitize(params: &ReadoutParams, v_mid: f64) -> Result<DigitizationResult> {
    let (v_out1, i_shoot) = solve_stage(params, v_mid)?;
    let bit = if v_out1 >= params.vdd - params.ambiguity_margin {
        Bit::One
    } else if v_out1 <= params.ambiguity_margin {
        Bit::Zero
    } else {
        Bit::Ambiguous
    };
    Ok(DigitizationResult {
        bit,
        v_out1,
        v_out2: params.vdd,
        i_shoot,
        on_target: false,
        i_out: params.mirror_gain * i_shoot,
    })
}

/// Digitise and additionally compare the shoot-through current against the
/// reference: on-target means the inverter is near its maximally conducting
/// state.
pub fn on_target(params: &ReadoutParams, v_mid: f64) -> Result<DigitizationResult> {
    let mut result = digitize(params, v_mid)?;
    result.on_target = result.i_shoot >= params.i_ref;
    result.v_out2 = if result.on_target { 0.0 } else { params.vdd };
    Ok(result)
}

/// Current sourced by the mirrored output stage, mirror_gain · i_shoot.
pub fn mirrored_current(params: &ReadoutParams, v_mid: f64) -> Result<f64> {
    Ok(digitize(params, v_mid)?.i_out)
}

/// Input voltage at which the inverter output crosses mid-supply, located by
/// bisection to 1e-9 V.
pub fn switch_point(params: &ReadoutParams) -> Result<f64> {
    let target = params.vdd / 2.0;
    let residual = |v: f64| -> Result<f64> { Ok(solve_stage(params, v)?.0 - target) };
    let mut lo = 0.0_f64;
    let mut hi = params.vdd;
    let f_lo = residual(lo)?;
    let f_hi = residual(hi)?;
    if f_lo <= 0.0 || f_hi >= 0.0 {
        return Err(Error::NoSwitchPoint { vdd: params.vdd });
    }
    while hi - lo > EDGE_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if residual(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The contiguous input interval where the on-target detector fires, or
/// `None` when the reference current exceeds the shoot-through peak. Edges
/// are refined by bisection to 1e-9 V.
pub fn on_target_window(params: &ReadoutParams) -> Result<Option<(f64, f64)>> {
    let shoot = |v: f64| -> Result<f64> { Ok(solve_stage(params, v)?.1) };

    let steps = (params.vdd / PEAK_SCAN_STEP).ceil() as usize;
    let mut best_v = 0.0;
    let mut best_i = f64::NEG_INFINITY;
    for k in 0..=steps {
        let v = (k as f64 * PEAK_SCAN_STEP).min(params.vdd);
        let i = shoot(v)?;
        if i > best_i {
            best_i = i;
            best_v = v;
        }
    }
    if best_i < params.i_ref {
        return Ok(None);
    }

    let refine = |mut inside: f64, mut outside: f64| -> Result<f64> {
        while (inside - outside).abs() > EDGE_RESOLUTION {
            let mid = 0.5 * (inside + outside);
            if shoot(mid)? >= params.i_ref {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(0.5 * (inside + outside))
    };

    let left = if shoot(0.0)? >= params.i_ref {
        0.0
    } else {
        refine(best_v, 0.0)?
    };
    let right = if shoot(params.vdd)? >= params.i_ref {
        params.vdd
    } else {
        refine(best_v, params.vdd)?
    };
    Ok(Some((left, right)))
}
