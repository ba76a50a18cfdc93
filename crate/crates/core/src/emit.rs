//! Deterministic artifact rendering: CSV vector tables, SVG scatter plots,
//! JSON reports.
//!
//! Reals are rendered through [`format_sig9`]: nine significant digits,
//! positional notation, trailing zeros trimmed. The same bytes come out of
//! the same report on every run and platform, so artifact files can be
//! compared byte for byte.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::ExperimentReport;

/// Render a finite real with nine significant digits in the shortest
/// positional form: `0.5`, `-0.123456789`, `12345.6789`, `0.666666667`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string(); // covers -0.0 as well
    }
    debug_assert!(x.is_finite(), "artifact values are finite by invariant");
    let scientific = format!("{x:.8e}"); // d.dddddddd e exp
    let (mantissa, exponent) = scientific
        .split_once('e')
        .expect("{:.8e} always contains an exponent");
    let exponent: i32 = exponent.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    if digits.is_empty() {
        return "0".to_string();
    }

    // Value is 0.<digits> * 10^(exponent + 1); `point` counts the digits
    // left of the decimal point.
    let point = exponent + 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(digits);
    } else if point as usize >= digits.len() {
        out.push_str(digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

/// Round to the value [`format_sig9`] renders. Idempotent.
pub fn round_sig9(x: f64) -> f64 {
    format_sig9(x).parse().expect("format_sig9 emits valid f64 text")
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, content)?;
    Ok(())
}

/// CSV table of every seed's input vectors: `seed,word,dim0,dim1,...`,
/// rows sorted by (seed, word), LF line endings.
pub fn vectors_csv(report: &ExperimentReport) -> String {
    let dim = report.config.training.dim;
    let mut out = String::from("seed,word");
    for d in 0..dim {
        out.push_str(&format!(",dim{d}"));
    }
    out.push('\n');

    let mut rows: Vec<(u64, &str, &[f64])> = report
        .embeddings
        .iter()
        .flat_map(|se| {
            se.vectors
                .iter()
                .map(move |wv| (se.seed, wv.word.as_str(), wv.vector.as_slice()))
        })
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));

    for (seed, word, vector) in rows {
        out.push_str(&format!("{seed},{word}"));
        for &x in vector {
            out.push(',');
            out.push_str(&format_sig9(x));
        }
        out.push('\n');
    }
    out
}

pub fn emit_vectors_csv(report: &ExperimentReport, path: &Path) -> Result<()> {
    write_file(path, &vectors_csv(report))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ScatterOptions {
    /// Draw an arrow (line) from the origin to each point.
    pub arrows: bool,
}

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 40.0;

/// Standalone SVG scatter of one seed's 2-d vectors: labeled points, axes
/// through the origin, equal-aspect world box padded 10% beyond the data
/// extent (origin included so the axes are always visible). Elements appear
/// in word-sorted order, making the bytes deterministic.
pub fn scatter_svg(report: &ExperimentReport, seed: u64, options: &ScatterOptions) -> Result<String> {
    let table = report
        .embeddings
        .iter()
        .find(|se| se.seed == seed)
        .ok_or_else(|| Error::InvalidConfig {
            field: "seed".into(),
            message: format!("seed {seed} is not part of this report"),
        })?;
    let dim = report.config.training.dim;
    if dim != 2 {
        return Err(Error::ScatterDimension { dim });
    }

    let mut points: Vec<(&str, f64, f64)> = table
        .vectors
        .iter()
        .map(|wv| (wv.word.as_str(), wv.vector[0], wv.vector[1]))
        .collect();
    points.sort_by(|a, b| a.0.cmp(b.0));

    // World box: data extent plus the origin, squared up, padded 10%.
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &(_, x, y) in &points {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    let center_x = (min_x + max_x) / 2.0;
    let center_y = (min_y + max_y) / 2.0;
    let mut half = ((max_x - min_x).max(max_y - min_y) / 2.0) * 1.1;
    if half <= 0.0 {
        half = 1.0;
    }
    let plot = CANVAS - 2.0 * MARGIN;
    let to_px = |x: f64| MARGIN + (x - (center_x - half)) / (2.0 * half) * plot;
    let to_py = |y: f64| MARGIN + ((center_y + half) - y) / (2.0 * half) * plot;
    let f = format_sig9;

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CANVAS}\" height=\"{CANVAS}\" viewBox=\"0 0 {CANVAS} {CANVAS}\">\n"
    ));
    svg.push_str(&format!(
        "  <title>{} vectors, seed {}</title>\n",
        report.config.name, seed
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{CANVAS}\" height=\"{CANVAS}\" fill=\"white\"/>\n"
    ));
    // Axes through the origin.
    let ox = to_px(0.0);
    let oy = to_py(0.0);
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999\" stroke-width=\"1\"/>\n",
        f(MARGIN),
        f(oy),
        f(CANVAS - MARGIN),
        f(oy)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999\" stroke-width=\"1\"/>\n",
        f(ox),
        f(MARGIN),
        f(ox),
        f(CANVAS - MARGIN)
    ));

    for &(word, x, y) in &points {
        let px = to_px(x);
        let py = to_py(y);
        if options.arrows {
            svg.push_str(&format!(
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbb\" stroke-width=\"1\"/>\n",
                f(ox),
                f(oy),
                f(px),
                f(py)
            ));
        }
        svg.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#205ea6\"/>\n",
            f(px),
            f(py)
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\">{}</text>\n",
            f(px + 7.0),
            f(py - 7.0),
            word
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_scatter_svg(
    report: &ExperimentReport,
    seed: u64,
    path: &Path,
    options: &ScatterOptions,
) -> Result<()> {
    write_file(path, &scatter_svg(report, seed, options)?)
}

/// Pretty JSON with the report's field order; reparsing reproduces the
/// report exactly (minus the in-memory duration).
pub fn report_json(report: &ExperimentReport) -> Result<String> {
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    Ok(json)
}

pub fn emit_report_json(report: &ExperimentReport, path: &Path) -> Result<()> {
    write_file(path, &report_json(report)?)
}

/// Parse a report back from JSON text (duration comes back zeroed).
pub fn parse_report_json(text: &str) -> Result<ExperimentReport> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{royalty_config, run_experiment};
    use crate::rng::SplitMix64;

    #[test]
    fn formats_nine_significant_digits() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(-0.0), "0");
        assert_eq!(format_sig9(0.5), "0.5");
        assert_eq!(format_sig9(-0.123456789), "-0.123456789");
        assert_eq!(format_sig9(2.0), "2");
        assert_eq!(format_sig9(100.0), "100");
        assert_eq!(format_sig9(12345.6789), "12345.6789");
        assert_eq!(format_sig9(1.5e-7), "0.00000015");
        assert_eq!(format_sig9(2.0 / 3.0), "0.666666667");
        assert_eq!(format_sig9(4.0 / 6.0), "0.666666667");
        assert_eq!(format_sig9(-1.0 / 3.0), "-0.333333333");
        assert_eq!(format_sig9(9.999999999), "10");
        assert_eq!(format_sig9(120.0001234), "120.000123");
    }

    #[test]
    fn rounding_is_close_and_idempotent() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..1_000 {
            let x = rng.uniform(-10.0, 10.0);
            let r = round_sig9(x);
            assert!(
                (x - r).abs() <= x.abs().max(1e-300) * 1e-8,
                "{x} rounded too far to {r}"
            );
            assert_eq!(round_sig9(r), r);
            assert_eq!(format_sig9(r), format_sig9(round_sig9(r)));
        }
    }

    fn smoke_report() -> crate::experiment::ExperimentReport {
        let mut config = royalty_config("emit-smoke", 80, 0.5);
        config.training.epochs = 2;
        config.seeds = Some(vec![2, 1]); // deliberately unsorted
        run_experiment(&config).unwrap()
    }

    #[test]
    fn csv_is_sorted_and_lf_terminated() {
        let report = smoke_report();
        let csv = vectors_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "seed,word,dim0,dim1");
        // 6 vocabulary words x 2 seeds
        assert_eq!(lines.len(), 13);
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
        // seeds ascend even though the config listed them descending
        assert!(lines[1].starts_with("1,a,"));
        assert!(lines[7].starts_with("2,a,"));
        let words: Vec<&str> = lines[1..7]
            .iter()
            .map(|l| l.split(',').nth(1).unwrap())
            .collect();
        assert_eq!(words, ["a", "is", "king", "man", "queen", "woman"]);
    }

    #[test]
    fn csv_bytes_are_reproducible() {
        let a = vectors_csv(&smoke_report());
        let b = vectors_csv(&smoke_report());
        assert_eq!(a, b);
    }

    #[test]
    fn svg_labels_every_word_and_reproduces() {
        let report = smoke_report();
        let svg = scatter_svg(&report, 1, &ScatterOptions::default()).unwrap();
        for word in ["a", "king", "is", "man", "queen", "woman"] {
            assert!(svg.contains(&format!(">{word}</text>")), "label {word}");
        }
        assert_eq!(svg.matches("<circle").count(), 6);
        assert_eq!(svg.matches("<line").count(), 2); // axes only
        assert!(svg.starts_with("<?xml"));
        assert_eq!(
            svg,
            scatter_svg(&report, 1, &ScatterOptions::default()).unwrap()
        );

        let with_arrows = scatter_svg(&report, 1, &ScatterOptions { arrows: true }).unwrap();
        assert_eq!(with_arrows.matches("<line").count(), 8); // axes + 6 arrows
    }

    #[test]
    fn svg_rejects_unknown_seed_and_wrong_dimension() {
        let report = smoke_report();
        assert!(matches!(
            scatter_svg(&report, 99, &ScatterOptions::default()),
            Err(Error::InvalidConfig { .. })
        ));

        let mut config = royalty_config("dim3", 80, 0.5);
        config.training.epochs = 1;
        config.training.dim = 3;
        config.seeds = Some(vec![1]);
        let report3 = run_experiment(&config).unwrap();
        assert!(matches!(
            scatter_svg(&report3, 1, &ScatterOptions::default()),
            Err(Error::ScatterDimension { dim: 3 })
        ));
    }

    #[test]
    fn report_json_round_trips_exactly() {
        let report = smoke_report();
        let json = report_json(&report).unwrap();
        let parsed = parse_report_json(&json).unwrap();
        assert_eq!(parsed, report.timeless());
        // and the re-emitted bytes match too
        assert_eq!(report_json(&parsed).unwrap(), json);
    }

    #[test]
    fn files_land_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let report = smoke_report();
        let csv = dir.path().join("nested/vectors.csv");
        let svg = dir.path().join("nested/scatter.svg");
        let json = dir.path().join("nested/report.json");
        emit_vectors_csv(&report, &csv).unwrap();
        emit_scatter_svg(&report, 1, &svg, &ScatterOptions::default()).unwrap();
        emit_report_json(&report, &json).unwrap();
        assert_eq!(std::fs::read_to_string(&csv).unwrap(), vectors_csv(&report));
        assert!(std::fs::read_to_string(&svg).unwrap().contains("</svg>"));
        let reparsed = parse_report_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(reparsed, report.timeless());
    }
}
