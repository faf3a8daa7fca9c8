//! CSV renderings of harness reports. Floats are written with 17 significant
//! digits so they parse back to the same `f64`.

use super::{ConvergenceReport, EstimatorReport, TauStats, TauSweep};

pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn render(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

const ESTIMATOR_HEADER: [&str; 7] = ["h", "mean", "error", "half_width", "mean_collisions", "rejected_fraction", "slope"];

fn estimator_row(r: &EstimatorReport) -> Vec<String> {
    vec![
        num(r.h),
        num(r.mean),
        opt(r.error),
        num(r.half_width),
        num(r.mean_collisions),
        num(r.rejected_fraction),
        String::new(),
    ]
}

/// One row per step size and a footer row holding the fitted slope.
pub fn convergence_csv(c: &ConvergenceReport) -> String {
    let mut rows: Vec<Vec<String>> = c.rows.iter().map(estimator_row).collect();
    let mut footer = vec![String::new(); ESTIMATOR_HEADER.len()];
    footer[0] = "slope".into();
    footer[6] = num(c.slope);
    rows.push(footer);
    render(&ESTIMATOR_HEADER, rows)
}

/// Estimator rows without a fit.
pub fn estimator_csv(rows: &[EstimatorReport]) -> String {
    render(&ESTIMATOR_HEADER, rows.iter().map(estimator_row).collect())
}

/// Histogram of `τ₁/h` in equal bins on `(0, 1)`.
pub fn tau_histogram_csv(t: &TauStats) -> String {
    let b = t.histogram.len() as f64;
    let rows = t
        .histogram
        .iter()
        .enumerate()
        .map(|(i, c)| vec![num(t.h * i as f64 / b), num(t.h * (i + 1) as f64 / b), c.to_string()])
        .collect();
    render(&["tau_lo", "tau_hi", "count"], rows)
}

pub fn tau_sweep_csv(s: &TauSweep) -> String {
    let mut rows: Vec<Vec<String>> = s
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.h),
                num(r.lambda1),
                num(r.lambda1_half_width),
                num(r.lambda2),
                num(r.lambda2_half_width),
                r.count.to_string(),
                String::new(),
            ]
        })
        .collect();
    rows.push(vec!["slope".into(), String::new(), String::new(), String::new(), String::new(), String::new(), num(s.lambda1_slope)]);
    render(&["h", "lambda1", "lambda1_half_width", "lambda2", "lambda2_half_width", "count", "slope"], rows)
}
