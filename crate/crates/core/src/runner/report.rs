use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::experiment::{MeanMetrics, ReportBundle, SampleTable};
use super::RunError;
use crate::metrics::RocCurve;

/// Row labels of the comparison tables, top to bottom.
pub const METRIC_ROWS: [&str; 8] = [
    "Acc", "AUC", "Pre(no)", "Pre(yes)", "Rec(no)", "Rec(yes)", "F1(no)", "F1(yes)",
];

/// Metrics as rows, models as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub columns: Vec<String>,
    /// `values[row][column]`, rows in [`METRIC_ROWS`] order.
    pub values: Vec<Vec<f64>>,
}

fn metric_column(m: &MeanMetrics) -> [f64; 8] {
    [
        m.accuracy,
        m.auc,
        m.no.precision,
        m.yes.precision,
        m.no.recall,
        m.yes.recall,
        m.no.f1,
        m.yes.f1,
    ]
}

impl ComparisonTable {
    fn from_means(means: &[MeanMetrics]) -> Self {
        let cols: Vec<[f64; 8]> = means.iter().map(metric_column).collect();
        Self {
            columns: means.iter().map(|m| m.name.clone()).collect(),
            values: (0..METRIC_ROWS.len())
                .map(|r| cols.iter().map(|c| c[r]).collect())
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (label, row) in METRIC_ROWS.iter().zip(&self.values) {
            out.push_str(label);
            for v in row {
                let _ = write!(out, ",{v:.3}");
            }
            out.push('\n');
        }
        out
    }

    /// Right-aligned columns separated by two spaces.
    pub fn to_text(&self) -> String {
        let label_w = METRIC_ROWS.iter().map(|l| l.len()).max().unwrap_or(0);
        let widths: Vec<usize> = self.columns.iter().map(|c| c.len().max(5)).collect();
        let mut out = format!("{:label_w$}", "");
        for (c, w) in self.columns.iter().zip(&widths) {
            let _ = write!(out, "  {c:>w$}");
        }
        out.push('\n');
        for (label, row) in METRIC_ROWS.iter().zip(&self.values) {
            let _ = write!(out, "{label:label_w$}");
            for (v, w) in row.iter().zip(&widths) {
                let _ = write!(out, "  {:>w$}", format!("{v:.3}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Classifier comparison, one column per configured classifier.
pub fn compare_table(bundle: &ReportBundle) -> ComparisonTable {
    ComparisonTable::from_means(&bundle.summary.classifiers)
}

/// Kernel sweep in the same layout, one column per kernel family.
pub fn kernel_table(bundle: &ReportBundle) -> ComparisonTable {
    ComparisonTable::from_means(&bundle.summary.kernels)
}

/// A curve with the label and AUC shown in the legend.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedCurve {
    pub name: String,
    pub auc: f64,
    pub curve: RocCurve,
}

/// Curves of every model on the first seed, classifiers first.
pub fn first_run_curves(bundle: &ReportBundle) -> Vec<NamedCurve> {
    bundle
        .runs
        .first()
        .map(|run| {
            run.classifiers
                .iter()
                .chain(&run.kernels)
                .map(|m| NamedCurve {
                    name: m.name.clone(),
                    auc: m.report.auc,
                    curve: m.report.roc.clone(),
                })
                .collect()
        })
        .unwrap_or_default()
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

const PLOT: f64 = 400.0;
const LEFT: f64 = 60.0;
const TOP: f64 = 20.0;

fn px(fpr: f64) -> f64 {
    LEFT + fpr * PLOT
}

fn py(tpr: f64) -> f64 {
    TOP + (1.0 - tpr) * PLOT
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Self-contained SVG: unit-square axes, chance diagonal, one polyline and
/// one legend entry per curve.
pub fn render_roc_svg(curves: &[NamedCurve]) -> String {
    let legend_h = 18.0 * curves.len() as f64;
    let width = LEFT + PLOT + 240.0;
    let height = (TOP + PLOT + 50.0).max(TOP + legend_h + 20.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t:.2}</text>"#,
            px(t),
            TOP + PLOT + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.2}</text>"#,
            LEFT - 6.0,
            py(t) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">False positive rate</text>"#,
        px(0.5),
        TOP + PLOT + 36.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">True positive rate</text>"#,
        py(0.5)
    );
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999999" stroke-dasharray="4 4"/>"##,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    for (i, c) in curves.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = c
            .curve
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(p.fpr), py(p.tpr)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + PLOT + 20.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="3"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{} (AUC = {:.3})</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&c.name),
            c.auc
        );
    }
    s.push_str("</svg>\n");
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    std::fs::write(path, contents).map_err(|source| RunError::Output {
        path: path.display().to_string(),
        source,
    })
}

pub fn emit_roc_svg(curves: &[NamedCurve], path: impl AsRef<Path>) -> Result<(), RunError> {
    if curves.is_empty() {
        return Err(RunError::Report("no ROC curves to plot".into()));
    }
    write_file(path.as_ref(), &render_roc_svg(curves))
}

fn yes_no(label: u8) -> &'static str {
    if label == 1 {
        "YES"
    } else {
        "NO"
    }
}

impl SampleTable {
    /// `row,actual,<model>…` with YES/NO cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,actual");
        for m in &self.models {
            out.push(',');
            out.push_str(&m.name);
        }
        out.push('\n');
        for (i, (&row, &actual)) in self.rows.iter().zip(&self.actual).enumerate() {
            let _ = write!(out, "{row},{}", yes_no(actual));
            for m in &self.models {
                let _ = write!(out, ",{}", yes_no(m.predicted[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Keeps file names portable.
fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes every artefact of a run into `dir` and returns the paths, in
/// write order.
pub fn write_outputs(bundle: &ReportBundle, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, RunError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| RunError::Output {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let mut put = |name: &str, contents: &str| -> Result<(), RunError> {
        let p = dir.join(name);
        write_file(&p, contents)?;
        written.push(p);
        Ok(())
    };
    put("report.json", &bundle.to_json())?;
    if !bundle.summary.classifiers.is_empty() {
        put("table1.csv", &compare_table(bundle).to_csv())?;
    }
    if !bundle.summary.kernels.is_empty() {
        put("table2.csv", &kernel_table(bundle).to_csv())?;
    }
    let curves = first_run_curves(bundle);
    if !curves.is_empty() {
        put("roc_all.svg", &render_roc_svg(&curves))?;
    }
    for c in &curves {
        put(&format!("roc_{}.csv", file_stem(&c.name)), &c.curve.to_csv())?;
    }
    put("sample_comparison.csv", &bundle.sample.to_csv())?;
    Ok(written)
}
