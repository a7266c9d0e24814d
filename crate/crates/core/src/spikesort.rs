//! Spike-waveform ingestion and the template-matching experiment driver.
//!
//! Waveforms are labelled voltage traces. Each is reduced to a four-sample
//! texel input vector by a trigger-and-sample protocol: find the first
//! sample strictly above the trigger level, skip six samples, take the next
//! four. Instances whose sampling window contains a second rising crossing
//! are treated as corrupted and dropped. Per class, the lowest-, median- and
//! highest-amplitude instances (L, M, H) are selected, scaled into the texel
//! input range, rounded to 10 mV, and pushed through a programmed texel
//! array.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::texel::{array_match, TexelArrayConfig};

/// Default sample position of the first retained sample relative to the
/// trigger index: skip six samples after the crossing, keep the next four.
pub const DEFAULT_SAMPLE_OFFSET: usize = 7;

/// Default scale factor from raw waveform volts to texel input volts.
pub const DEFAULT_GAIN: f64 = 0.1;

/// Default offset added after scaling, volts.
pub const DEFAULT_OFFSET: f64 = 0.66;

/// A set of labelled spike waveforms of uniform length.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeDataset {
    waveforms: Vec<(i64, Vec<f64>)>,
    source: String,
}

impl SpikeDataset {
    /// Build a dataset from (class, samples) rows, enforcing uniform length.
    pub fn new(waveforms: Vec<(i64, Vec<f64>)>, source: &str) -> Result<Self> {
        if waveforms.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let expected = waveforms[0].1.len();
        for (row, (_, samples)) in waveforms.iter().enumerate() {
            if samples.is_empty() {
                return Err(Error::DatasetParse {
                    line: row + 1,
                    message: "waveform row has no samples".into(),
                });
            }
            if samples.len() != expected {
                return Err(Error::DatasetShape {
                    line: row + 1,
                    expected,
                    got: samples.len(),
                });
            }
        }
        Ok(Self {
            waveforms,
            source: source.to_string(),
        })
    }

    pub fn waveforms(&self) -> &[(i64, Vec<f64>)] {
        &self.waveforms
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Sorted unique class labels.
    pub fn classes(&self) -> Vec<i64> {
        let mut labels: Vec<i64> = self.waveforms.iter().map(|(c, _)| *c).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// Serialise to the on-disk CSV format (class, then samples, 6 decimal
    /// places).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (class, samples) in &self.waveforms {
            out.push_str(&class.to_string());
            for s in samples {
                out.push_str(&format!(",{s:.6}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Parse a dataset file: one waveform per line, integer class first, then
/// the voltage samples, comma-separated.
pub fn load_dataset(path: &Path) -> Result<SpikeDataset> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&text, &path.display().to_string())
}

/// Parse dataset text; `source` is recorded for reporting.
pub fn parse_dataset(text: &str, source: &str) -> Result<SpikeDataset> {
    let mut waveforms = Vec::new();
    let mut expected: Option<usize> = None;
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let class_field = fields.next().expect("split yields at least one field");
        let class: i64 = class_field.trim().parse().map_err(|_| Error::DatasetParse {
            line: line_no,
            message: format!("class label `{}` is not an integer", class_field.trim()),
        })?;
        let mut samples = Vec::new();
        for field in fields {
            let value: f64 = field.trim().parse().map_err(|_| Error::DatasetParse {
                line: line_no,
                message: format!("sample `{}` is not a number", field.trim()),
            })?;
            samples.push(value);
        }
        if samples.is_empty() {
            return Err(Error::DatasetParse {
                line: line_no,
                message: "waveform row has no samples".into(),
            });
        }
        match expected {
            None => expected = Some(samples.len()),
            Some(width) if width != samples.len() => {
                return Err(Error::DatasetShape {
                    line: line_no,
                    expected: width,
                    got: samples.len(),
                });
            }
            Some(_) => {}
        }
        waveforms.push((class, samples));
    }
    if waveforms.is_empty() {
        return Err(Error::EmptyDataset);
    }
    SpikeDataset::new(waveforms, source)
}

fn trigger_index(samples: &[f64], v_trig: f64) -> Option<usize> {
    samples.iter().position(|&s| s > v_trig)
}

/// First trigger crossing and the four retained samples, with the default
/// skip-six-take-four offset.
pub fn trigger_and_sample(samples: &[f64], v_trig: f64) -> Result<[f64; 4]> {
    trigger_and_sample_with(samples, v_trig, DEFAULT_SAMPLE_OFFSET)
}

/// Trigger-and-sample with an explicit offset: the retained samples sit at
/// indices k+offset .. k+offset+3 where k is the first index strictly above
/// `v_trig`.
pub fn trigger_and_sample_with(samples: &[f64], v_trig: f64, offset: usize) -> Result<[f64; 4]> {
    let k = trigger_index(samples, v_trig).ok_or(Error::NoTrigger { v_trig })?;
    let needed = k + offset + 4;
    if samples.len() < needed {
        return Err(Error::TruncatedWaveform {
            needed,
            len: samples.len(),
        });
    }
    let window = &samples[k + offset..k + offset + 4];
    Ok([window[0], window[1], window[2], window[3]])
}

fn has_second_crossing(samples: &[f64], v_trig: f64, offset: usize) -> bool {
    let Some(k) = trigger_index(samples, v_trig) else {
        return false;
    };
    let end = (k + offset + 3).min(samples.len() - 1);
    for j in (k + 1)..=end {
        if samples[j] > v_trig && samples[j - 1] <= v_trig {
            return true;
        }
    }
    false
}

/// Drop every waveform whose sampling window contains a second rising
/// crossing of the trigger level.
pub fn exclude_corrupted(dataset: &SpikeDataset, v_trig: f64) -> SpikeDataset {
    exclude_corrupted_with(dataset, v_trig, DEFAULT_SAMPLE_OFFSET)
}

/// Corruption filter with an explicit sampling offset.
pub fn exclude_corrupted_with(dataset: &SpikeDataset, v_trig: f64, offset: usize) -> SpikeDataset {
    let kept: Vec<(i64, Vec<f64>)> = dataset
        .waveforms
        .iter()
        .filter(|(_, samples)| !has_second_crossing(samples, v_trig, offset))
        .cloned()
        .collect();
    SpikeDataset {
        waveforms: kept,
        source: dataset.source.clone(),
    }
}

/// Amplitude category of a selected instance within its class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tag {
    L,
    M,
    H,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::L => write!(f, "L"),
            Tag::M => write!(f, "M"),
            Tag::H => write!(f, "H"),
        }
    }
}

/// One four-sample texel input vector in raw, scaled, and rounded form.
#[derive(Debug, Clone, PartialEq)]
pub struct TexelInputVector {
    pub class_label: i64,
    pub tag: Tag,
    pub raw: [f64; 4],
    pub adjusted: [f64; 4],
    pub rounded: [f64; 4],
}

impl TexelInputVector {
    pub fn new(class_label: i64, tag: Tag, raw: [f64; 4], gain: f64, offset: f64) -> Self {
        let (adjusted, rounded) = adjust_and_round(&raw, gain, offset);
        Self {
            class_label,
            tag,
            raw,
            adjusted,
            rounded,
        }
    }
}

fn round_to_centivolt(x: f64) -> f64 {
    // Half-away-from-zero; the 1e-9 nudge keeps values that are exact ties
    // in decimal (but stored a hair low in binary) on the away side.
    x.signum() * ((x.abs() * 100.0 + 0.5 + 1e-9).floor()) / 100.0
}

/// Scale raw samples by `gain`, add `offset`, and round to 10 mV
/// (half-away-from-zero). Returns (adjusted, rounded).
pub fn adjust_and_round(raw: &[f64; 4], gain: f64, offset: f64) -> ([f64; 4], [f64; 4]) {
    let adjusted = raw.map(|r| gain * r + offset);
    let rounded = adjusted.map(round_to_centivolt);
    (adjusted, rounded)
}

/// Select the lowest-, median- and highest-amplitude valid instances of one
/// class, ranked by the mean of their four raw samples, using the default
/// gain and offset.
pub fn select_lmh(dataset: &SpikeDataset, class: i64, v_trig: f64) -> Result<[TexelInputVector; 3]> {
    select_lmh_with(
        dataset,
        class,
        v_trig,
        DEFAULT_SAMPLE_OFFSET,
        DEFAULT_GAIN,
        DEFAULT_OFFSET,
    )
}

/// L/M/H selection with explicit protocol parameters. Instances that fail to
/// trigger or are too short do not count as valid; ties in mean amplitude
/// keep dataset order.
pub fn select_lmh_with(
    dataset: &SpikeDataset,
    class: i64,
    v_trig: f64,
    offset: usize,
    gain: f64,
    v_offset: f64,
) -> Result<[TexelInputVector; 3]> {
    let mut ranked: Vec<([f64; 4], f64)> = Vec::new();
    for (label, samples) in &dataset.waveforms {
        if *label != class {
            continue;
        }
        if let Ok(raw) = trigger_and_sample_with(samples, v_trig, offset) {
            let mean = raw.iter().sum::<f64>() / 4.0;
            ranked.push((raw, mean));
        }
    }
    if ranked.len() < 3 {
        return Err(Error::ClassTooSmall {
            class,
            count: ranked.len(),
        });
    }
    ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite sample means"));
    let low = ranked[0].0;
    let median = ranked[(ranked.len() - 1) / 2].0;
    let high = ranked[ranked.len() - 1].0;
    Ok([
        TexelInputVector::new(class, Tag::L, low, gain, v_offset),
        TexelInputVector::new(class, Tag::M, median, gain, v_offset),
        TexelInputVector::new(class, Tag::H, high, gain, v_offset),
    ])
}

/// One report row of the matching experiment.
#[derive(Debug, Clone)]
pub struct ExperimentRow {
    pub vector: TexelInputVector,
    pub v_out: f64,
    /// True when another row shares the same rounded input vector; such
    /// vectors are evaluated once and reported on every owning row.
    pub shared: bool,
}

fn centivolt_key(rounded: &[f64; 4]) -> [i64; 4] {
    rounded.map(|v| (v * 100.0).round() as i64)
}

/// Full matching experiment: filter corrupted instances, select L/M/H per
/// class, scale and round, and evaluate each distinct rounded vector on the
/// array. Rows are ordered by class, then L, M, H.
pub fn run_experiment(
    dataset: &SpikeDataset,
    array: &TexelArrayConfig,
    v_trig: f64,
    gain: f64,
    offset: f64,
) -> Result<Vec<ExperimentRow>> {
    if array.texels.len() != 4 {
        return Err(Error::ArityMismatch {
            expected: 4,
            got: array.texels.len(),
        });
    }
    let filtered = exclude_corrupted(dataset, v_trig);
    let mut vectors = Vec::new();
    for class in filtered.classes() {
        let [l, m, h] = select_lmh_with(
            &filtered,
            class,
            v_trig,
            DEFAULT_SAMPLE_OFFSET,
            gain,
            offset,
        )?;
        vectors.extend([l, m, h]);
    }

    let mut outputs: BTreeMap<[i64; 4], f64> = BTreeMap::new();
    let mut counts: BTreeMap<[i64; 4], usize> = BTreeMap::new();
    for vector in &vectors {
        let key = centivolt_key(&vector.rounded);
        *counts.entry(key).or_insert(0) += 1;
        if !outputs.contains_key(&key) {
            let result = array_match(array, &vector.rounded)?;
            outputs.insert(key, result.v_out);
        }
    }

    Ok(vectors
        .into_iter()
        .map(|vector| {
            let key = centivolt_key(&vector.rounded);
            ExperimentRow {
                v_out: outputs[&key],
                shared: counts[&key] > 1,
                vector,
            }
        })
        .collect())
}

/// Bundled synthetic dataset: three amplitude families (classes 1–3), nine
/// clean instances each plus one corrupted double-spike instance, 64 samples
/// per waveform. Designed for a 0.3 V trigger level.
pub fn synthetic_dataset() -> SpikeDataset {
    const LEN: usize = 64;
    const CLASS_AMPLITUDE: [f64; 3] = [0.5, 0.8, 1.2];
    let mut waveforms = Vec::new();
    for (class_index, base) in CLASS_AMPLITUDE.iter().enumerate() {
        let class = class_index as i64 + 1;
        for j in 0..9 {
            let amplitude = base * (0.88 + 0.03 * j as f64);
            let onset = 5 + (j % 5);
            waveforms.push((class, spike_waveform(LEN, onset, amplitude, 10.0, None)));
        }
        let amplitude = base * 0.97;
        waveforms.push((
            class,
            spike_waveform(LEN, 6, amplitude, 2.0, Some(5)),
        ));
    }
    SpikeDataset::new(waveforms, "synthetic").expect("generator emits uniform rows")
}

fn spike_waveform(
    len: usize,
    onset: usize,
    amplitude: f64,
    decay: f64,
    second_peak_after: Option<usize>,
) -> Vec<f64> {
    let mut samples = vec![0.0; len];
    samples[onset] = 0.2 * amplitude;
    for m in 0..(len - onset - 1) {
        samples[onset + 1 + m] = amplitude * (-(m as f64) / decay).exp();
    }
    if let Some(gap) = second_peak_after {
        let peak = onset + 1 + gap;
        for m in 0..(len - peak) {
            samples[peak + m] = amplitude * (-(m as f64) / decay).exp();
        }
    }
    samples
}
