//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]; variants carry enough context
//! (grid indices, violated bounds, achievable ranges) for callers to report
//! failures without re-deriving them.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A constructor argument violated a documented constraint.
    #[error("invalid parameter `{name}` = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// A memristor programming target fell outside the device window.
    #[error("program target {target:.6e} ohm is {which} the {bound_name} bound {bound:.6e} ohm")]
    ProgramOutOfRange {
        target: f64,
        bound: f64,
        bound_name: &'static str,
        which: &'static str,
    },

    /// A circuit failed structural validation or had the wrong shape for an
    /// operation (e.g. asking for the NOR dual of an inverter).
    #[error("circuit shape error: {0}")]
    CircuitShape(String),

    /// An input port name was not found on the circuit.
    #[error("unknown input port `{0}`")]
    UnknownPort(String),

    /// A driven input voltage fell outside the supply range.
    #[error("input `{port}` = {value} V outside [0, {vdd}] V")]
    InputOutOfRange { port: String, value: f64, vdd: f64 },

    /// A circuit input port was left undriven (or driven twice).
    #[error("input port `{port}` {problem}")]
    BadDrive {
        port: String,
        problem: &'static str,
    },

    /// The nodal solver failed to reach the residual tolerance.
    #[error("operating point did not converge; best residual {best_residual:.3e} A")]
    NonConvergence { best_residual: f64 },

    /// A sweep failed at one grid point.
    #[error("sweep failed at grid index {index}: {source}")]
    SweepPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// A surface evaluation failed at one grid cell.
    #[error("surface failed at cell ({row}, {col}): {source}")]
    SurfacePoint {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },

    /// Sweep grids must be strictly monotone.
    #[error("sweep grid must be strictly monotone")]
    GridNotMonotone,

    /// Plateau metrics need at least five points.
    #[error("trace has {len} points; plateau metrics need at least 5")]
    TraceTooShort { len: usize },

    /// A family point broke the declared ratio/sum constraint.
    #[error("family point ({r_up:.6e}, {r_dn:.6e}) violates fixed {mode} = {expected:.6e}")]
    FamilyConstraint {
        mode: &'static str,
        expected: f64,
        r_up: f64,
        r_dn: f64,
    },

    /// An energy-model argument left the physical domain.
    #[error("domain error: `{name}` = {value} must be {constraint}")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// The read-out transfer curve never crossed half supply.
    #[error("read-out inverter has no switch point in [0, {vdd}] V")]
    NoSwitchPoint { vdd: f64 },

    /// The texel mid node cannot reach the read-out optimum for any input.
    #[error(
        "read-out optimum {v_opt:.6} V outside reachable mid range [{mid_lo:.6}, {mid_hi:.6}] V"
    )]
    PeakUnreachable { v_opt: f64, mid_lo: f64, mid_hi: f64 },

    /// A programming target cannot be met within the stored-resistance bounds.
    #[error(
        "texel {texel}: target {target:.6} V outside achievable peak range [{lo:.6}, {hi:.6}] V"
    )]
    TargetUnreachable {
        texel: usize,
        target: f64,
        lo: f64,
        hi: f64,
    },

    /// A vector argument had the wrong length for the array.
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// A dataset row could not be parsed.
    #[error("dataset parse error at line {line}: {message}")]
    DatasetParse { line: usize, message: String },

    /// A dataset row had a different sample count than the first row.
    #[error("dataset shape error at line {line}: expected {expected} samples, got {got}")]
    DatasetShape {
        line: usize,
        expected: usize,
        got: usize,
    },

    /// The dataset contained no waveforms.
    #[error("dataset is empty")]
    EmptyDataset,

    /// The waveform never rose above the trigger level.
    #[error("waveform never exceeds trigger level {v_trig} V")]
    NoTrigger { v_trig: f64 },

    /// The waveform ended before the sampling window.
    #[error("waveform too short: sampling needs index {needed}, length is {len}")]
    TruncatedWaveform { needed: usize, len: usize },

    /// A class had too few usable instances for L/M/H selection.
    #[error("class {class} has {count} usable instances; selection needs at least 3")]
    ClassTooSmall { class: i64, count: usize },

    /// Reading a file failed.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
