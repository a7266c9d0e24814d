//! Minimal deterministic SVG emission: poly-line overlays, heat maps and bar
//! charts built as plain strings with fixed-point coordinates, so repeated
//! runs produce byte-identical documents.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 48.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn px(v: f64) -> String {
    format!("{v:.2}")
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(f64::MIN_POSITIVE);
        MARGIN_LEFT + (v - self.x_min) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(f64::MIN_POSITIVE);
        HEIGHT - MARGIN_BOTTOM - (v - self.y_min) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn document(title: &str, body: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\" ",
            "text-anchor=\"middle\">{title}</text>\n",
            "{body}",
            "</svg>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        tx = WIDTH / 2.0,
        title = title,
        body = body,
    )
}

fn axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let x0 = px(MARGIN_LEFT);
    let x1 = px(WIDTH - MARGIN_RIGHT);
    let y0 = px(HEIGHT - MARGIN_BOTTOM);
    let y1 = px(MARGIN_TOP);
    let mut s = String::new();
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n"
    ));
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    s.push_str(&format!(
        "<text x=\"{x0}\" y=\"{ly}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
        frame.x_min,
        ly = px(HEIGHT - MARGIN_BOTTOM + 16.0),
    ));
    s.push_str(&format!(
        "<text x=\"{x1}\" y=\"{ly}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
        frame.x_max,
        ly = px(HEIGHT - MARGIN_BOTTOM + 16.0),
    ));
    s.push_str(&format!(
        "<text x=\"{lx}\" y=\"{y0}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{v:.3}</text>\n",
        v = frame.y_min,
        lx = px(MARGIN_LEFT - 6.0),
    ));
    s.push_str(&format!(
        "<text x=\"{lx}\" y=\"{y1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{v:.3}</text>\n",
        v = frame.y_max,
        lx = px(MARGIN_LEFT - 6.0),
    ));
    s.push_str(&format!(
        "<text x=\"{cx}\" y=\"{cy}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{x_label}</text>\n",
        cx = px((MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0),
        cy = px(HEIGHT - 10.0),
    ));
    s.push_str(&format!(
        "<text x=\"14\" y=\"{cy}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {cy})\">{y_label}</text>\n",
        cy = px((MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0),
    ));
    s
}

/// Overlay of labelled traces sharing one axis pair.
pub fn polyline_chart(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let mut x_min = f64::MAX;
    let mut x_max = f64::MIN;
    let mut y_min = f64::MAX;
    let mut y_max = f64::MIN;
    for (_, points) in series {
        for &(x, y) in points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if y_min == y_max {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let frame = Frame { x_min, x_max, y_min, y_max };
    let mut body = axes(&frame, x_label, y_label);
    for (k, (label, points)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", px(frame.x(x)), px(frame.y(y))))
            .collect();
        body.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        body.push_str(&format!(
            "<text x=\"{lx}\" y=\"{ly}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\" text-anchor=\"end\">{label}</text>\n",
            lx = px(WIDTH - MARGIN_RIGHT - 6.0),
            ly = px(MARGIN_TOP + 14.0 * (k as f64 + 1.0)),
        ));
    }
    document(title, &body)
}

fn heat_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(11.0, 255.0), lerp(61.0, 209.0), lerp(145.0, 26.0))
}

/// Cell-per-sample heat map of `outputs[i][j]` over `a_values[i]` (x axis)
/// and `b_values[j]` (y axis).
pub fn heatmap_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    a_values: &[f64],
    b_values: &[f64],
    outputs: &[Vec<f64>],
    scale_max: f64,
) -> String {
    let frame = Frame {
        x_min: a_values[0],
        x_max: a_values[a_values.len() - 1],
        y_min: b_values[0],
        y_max: b_values[b_values.len() - 1],
    };
    let cell_w = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / a_values.len() as f64;
    let cell_h = (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) / b_values.len() as f64;
    let mut body = String::new();
    for (i, row) in outputs.iter().enumerate() {
        for (j, &value) in row.iter().enumerate() {
            let x = MARGIN_LEFT + i as f64 * cell_w;
            let y = HEIGHT - MARGIN_BOTTOM - (j as f64 + 1.0) * cell_h;
            body.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                px(x),
                px(y),
                px(cell_w + 0.5),
                px(cell_h + 0.5),
                heat_color(value / scale_max),
            ));
        }
    }
    body.push_str(&axes(&frame, x_label, y_label));
    document(title, &body)
}

/// Labelled vertical bars, e.g. matching degree per class/tag row.
pub fn bar_chart(title: &str, y_label: &str, labels: &[String], values: &[f64], scale_max: f64) -> String {
    let frame = Frame {
        x_min: 0.0,
        x_max: labels.len() as f64,
        y_min: 0.0,
        y_max: scale_max,
    };
    let slot = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / labels.len() as f64;
    let mut body = axes(&frame, "", y_label);
    for (k, (label, &value)) in labels.iter().zip(values).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let x = MARGIN_LEFT + k as f64 * slot + 0.15 * slot;
        let y = frame.y(value);
        body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>\n",
            px(x),
            px(y),
            px(0.7 * slot),
            px((HEIGHT - MARGIN_BOTTOM - y).max(0.0)),
        ));
        body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{label}</text>\n",
            px(x + 0.35 * slot),
            px(HEIGHT - MARGIN_BOTTOM + 16.0),
        ));
    }
    document(title, &body)
}
