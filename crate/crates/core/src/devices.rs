//! Compact device models: square-law MOSFETs and ohmic programmable memristors.
//!
//! MOSFET currents come with exact analytic partial derivatives so the nodal
//! solver can assemble Jacobians without finite differencing. The square law
//! applies the channel-length-modulation factor `(1 + lambda*v_ds)` in both
//! triode and saturation, which keeps current and all partials continuous at
//! the region boundary `v_ds = v_gs - v_th`. A drain-source conductance
//! `g_min` is always present so no branch is ever perfectly open.

use crate::error::{Error, Result};

/// Channel polarity of a MOSFET.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    N,
    P,
}

/// Square-law MOSFET parameter set.
///
/// `v_th` is a magnitude and applies to both polarities; a p-channel device
/// is evaluated by sign reflection of an n-channel device with the same
/// magnitudes, so `current(vg, vs, vd)` for a pMOS equals
/// `-n_current(-vg, -vs, -vd)`.
#[derive(Debug, Clone, Copy)]
pub struct MosfetParams {
    pub polarity: Polarity,
    /// Threshold voltage magnitude in volts.
    pub v_th: f64,
    /// Process transconductance k' in A/V^2.
    pub k_prime: f64,
    /// Channel width in micrometres.
    pub w: f64,
    /// Channel length in micrometres.
    pub l: f64,
    /// Channel-length modulation in 1/V.
    pub lambda: f64,
    /// Minimum drain-source conductance in siemens.
    pub g_min: f64,
}

/// Partial derivatives of the drain current with respect to the three
/// terminal voltages. `d_vg + d_vs + d_vd = 0` because the current depends
/// only on voltage differences.
#[derive(Debug, Clone, Copy)]
pub struct MosfetConductances {
    pub d_vg: f64,
    pub d_vs: f64,
    pub d_vd: f64,
}

impl MosfetParams {
    pub fn new(
        polarity: Polarity,
        v_th: f64,
        k_prime: f64,
        w: f64,
        l: f64,
        lambda: f64,
        g_min: f64,
    ) -> Result<Self> {
        if !(v_th > 0.0) {
            return Err(Error::InvalidParameter {
                name: "v_th",
                value: v_th,
                constraint: "must be positive",
            });
        }
        if !(k_prime > 0.0) {
            return Err(Error::InvalidParameter {
                name: "k_prime",
                value: k_prime,
                constraint: "must be positive",
            });
        }
        if !(w > 0.0) {
            return Err(Error::InvalidParameter {
                name: "w",
                value: w,
                constraint: "must be positive",
            });
        }
        if !(l > 0.0) {
            return Err(Error::InvalidParameter {
                name: "l",
                value: l,
                constraint: "must be positive",
            });
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                constraint: "must be non-negative",
            });
        }
        if !(g_min >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "g_min",
                value: g_min,
                constraint: "must be non-negative",
            });
        }
        Ok(Self {
            polarity,
            v_th,
            k_prime,
            w,
            l,
            lambda,
            g_min,
        })
    }

    /// Reference n-channel device: v_th 0.5 V, k' 170 uA/V^2, W/L 1/3.5 um.
    pub fn default_nmos() -> Self {
        Self {
            polarity: Polarity::N,
            v_th: 0.5,
            k_prime: 170e-6,
            w: 1.0,
            l: 3.5,
            lambda: 0.05,
            g_min: 1e-12,
        }
    }

    /// Reference p-channel device: v_th 0.65 V, k' 58 uA/V^2, W/L 12/3.5 um.
    pub fn default_pmos() -> Self {
        Self {
            polarity: Polarity::P,
            v_th: 0.65,
            k_prime: 58e-6,
            w: 12.0,
            l: 3.5,
            lambda: 0.05,
            g_min: 1e-12,
        }
    }

    /// Wide n-channel variant (W 10 um) for low-resistance gate configs.
    pub fn wide_nmos() -> Self {
        Self {
            w: 10.0,
            ..Self::default_nmos()
        }
    }

    /// Wide p-channel variant (W 120 um) for low-resistance gate configs.
    pub fn wide_pmos() -> Self {
        Self {
            w: 120.0,
            ..Self::default_pmos()
        }
    }

    /// Same magnitudes with the opposite channel polarity.
    pub fn mirrored(&self) -> Self {
        Self {
            polarity: match self.polarity {
                Polarity::N => Polarity::P,
                Polarity::P => Polarity::N,
            },
            ..*self
        }
    }

    /// Gain factor beta = k' * W / L in A/V^2.
    pub fn beta(&self) -> f64 {
        self.k_prime * self.w / self.l
    }

    /// Small-signal channel resistance at `v_ds = 0` for the given gate
    /// drive, including `g_min`. This is the scale against which memristor
    /// values are judged "dominant".
    pub fn linear_on_resistance(&self, v_gs_magnitude: f64) -> f64 {
        let overdrive = v_gs_magnitude - self.v_th;
        let g = if overdrive > 0.0 {
            self.beta() * overdrive + self.g_min
        } else {
            self.g_min
        };
        1.0 / g
    }

    /// Drain current in amperes for terminal voltages `v_g`, `v_s`, `v_d`.
    ///
    /// Positive current flows into the drain terminal and out of the source
    /// terminal. An n-channel device with `v_d < v_s` conducts symmetrically
    /// with the terminal roles exchanged.
    pub fn current(&self, v_g: f64, v_s: f64, v_d: f64) -> f64 {
        self.evaluate(v_g, v_s, v_d).0
    }

    /// Analytic partial derivatives of [`Self::current`] with respect to the
    /// terminal voltages.
    pub fn conductances(&self, v_g: f64, v_s: f64, v_d: f64) -> MosfetConductances {
        let (_, [d_vg, d_vs, d_vd]) = self.evaluate(v_g, v_s, v_d);
        MosfetConductances { d_vg, d_vs, d_vd }
    }

    /// Current and partials in one pass; partials are ordered (vg, vs, vd).
    pub fn evaluate(&self, v_g: f64, v_s: f64, v_d: f64) -> (f64, [f64; 3]) {
        match self.polarity {
            Polarity::N => self.n_channel(v_g, v_s, v_d),
            Polarity::P => {
                let (i, partials) = self.n_channel(-v_g, -v_s, -v_d);
                (-i, partials)
            }
        }
    }

    fn n_channel(&self, v_g: f64, v_s: f64, v_d: f64) -> (f64, [f64; 3]) {
        if v_d >= v_s {
            self.n_forward(v_g, v_s, v_d)
        } else {
            let (i, [d_g, d_s, d_d]) = self.n_forward(v_g, v_d, v_s);
            (-i, [-d_g, -d_d, -d_s])
        }
    }

    /// n-channel square law for `v_d >= v_s`.
    fn n_forward(&self, v_g: f64, v_s: f64, v_d: f64) -> (f64, [f64; 3]) {
        let beta = self.beta();
        let v_gs = v_g - v_s;
        let v_ds = v_d - v_s;
        let overdrive = v_gs - self.v_th;
        let clm = 1.0 + self.lambda * v_ds;

        let (i_ch, di_dvgs, di_dvds) = if overdrive <= 0.0 {
            (0.0, 0.0, 0.0)
        } else if v_ds < overdrive {
            let shape = overdrive * v_ds - 0.5 * v_ds * v_ds;
            (
                beta * shape * clm,
                beta * v_ds * clm,
                beta * ((overdrive - v_ds) * clm + shape * self.lambda),
            )
        } else {
            let half_sq = 0.5 * overdrive * overdrive;
            (
                beta * half_sq * clm,
                beta * overdrive * clm,
                beta * half_sq * self.lambda,
            )
        };

        let i = i_ch + self.g_min * v_ds;
        let d_vg = di_dvgs;
        let d_vd = di_dvds + self.g_min;
        let d_vs = -(d_vg + d_vd);
        (i, [d_vg, d_vs, d_vd])
    }
}

/// Programmable two-terminal resistor with a hard resistance window.
///
/// The stored resistance only changes through [`MemristorState::program`],
/// which enforces `r_min <= r <= r_max`; DC solves treat the device as a
/// plain ohmic conductance.
#[derive(Debug, Clone, Copy)]
pub struct MemristorState {
    resistance: f64,
    r_min: f64,
    r_max: f64,
    /// Non-perturbing read voltage associated with the stored value (metadata
    /// only; DC solves do not consult it).
    pub read_voltage_ref: f64,
}

/// Default non-perturbing read level in volts.
pub const DEFAULT_READ_VOLTAGE: f64 = 0.2;

impl MemristorState {
    pub fn new(resistance: f64, r_min: f64, r_max: f64) -> Result<Self> {
        if !(r_min > 0.0) {
            return Err(Error::InvalidParameter {
                name: "r_min",
                value: r_min,
                constraint: "must be positive",
            });
        }
        if !(r_max >= r_min) {
            return Err(Error::InvalidParameter {
                name: "r_max",
                value: r_max,
                constraint: "must be >= r_min",
            });
        }
        if resistance < r_min || resistance > r_max {
            return Err(Error::InvalidParameter {
                name: "resistance",
                value: resistance,
                constraint: "must lie within [r_min, r_max]",
            });
        }
        Ok(Self {
            resistance,
            r_min,
            r_max,
            read_voltage_ref: DEFAULT_READ_VOLTAGE,
        })
    }

    /// Fixed resistor: the window collapses to the given value. A 1 ohm
    /// fixed element stands in for "wire" where a topology slot is unused.
    pub fn fixed(resistance: f64) -> Result<Self> {
        Self::new(resistance, resistance, resistance)
    }

    /// Fixed 1 ohm stand-in for an absent memristor.
    pub fn wire() -> Self {
        Self::fixed(1.0).expect("1 ohm is a valid fixed resistance")
    }

    pub fn resistance(&self) -> f64 {
        self.resistance
    }

    pub fn conductance(&self) -> f64 {
        1.0 / self.resistance
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }

    /// New state with the target resistance; the original is unchanged.
    pub fn program(&self, target: f64) -> Result<Self> {
        if target < self.r_min {
            return Err(Error::ProgramOutOfRange {
                target,
                bound: self.r_min,
                bound_name: "r_min",
                which: "below",
            });
        }
        if target > self.r_max {
            return Err(Error::ProgramOutOfRange {
                target,
                bound: self.r_max,
                bound_name: "r_max",
                which: "above",
            });
        }
        Ok(Self {
            resistance: target,
            ..*self
        })
    }

    /// Ohmic branch current from terminal `a` to terminal `b`.
    pub fn current(&self, v_a: f64, v_b: f64) -> f64 {
        (v_a - v_b) / self.resistance
    }
}
