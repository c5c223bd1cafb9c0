use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{BenchError, BenchOp, BenchReport, BenchRecord, CellSummary};
use crate::abe::Scheme;
use crate::fsutil::write_atomic;
use crate::pairing::SecurityLevel;

pub const CSV_HEADER: [&str; 13] = [
    "scheme",
    "op",
    "level",
    "n_attrs",
    "trial",
    "wall_time_ms",
    "peak_mem_bytes",
    "exp_g1",
    "exp_g2",
    "exp_gt",
    "pairings",
    "hash_to_group",
    "energy_est_j",
];

pub const SUMMARY_HEADER: [&str; 14] = [
    "scheme",
    "op",
    "level",
    "n_attrs",
    "trials",
    "mean_ms",
    "ci95_ms",
    "median_ms",
    "exp_g1",
    "exp_g2",
    "exp_gt",
    "pairings",
    "hash_to_group",
    "mean_energy_j",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchOutputs {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub plots: Vec<PathBuf>,
}

fn record_row(r: &BenchRecord) -> Vec<String> {
    let c = &r.counters;
    vec![
        r.scheme.to_string(),
        r.op.name().to_string(),
        r.level.bits().to_string(),
        r.n_attrs.to_string(),
        r.trial.to_string(),
        format!("{:.4}", r.wall_time_ms),
        r.peak_mem_bytes.to_string(),
        c.exp_g1.to_string(),
        c.exp_g2.to_string(),
        c.exp_gt.to_string(),
        c.pairings.to_string(),
        c.hash_to_group.to_string(),
        format!("{:.6}", r.energy_est_j),
    ]
}

fn summary_row(s: &CellSummary) -> Vec<String> {
    let c = &s.counters;
    vec![
        s.scheme.to_string(),
        s.op.name().to_string(),
        s.level.bits().to_string(),
        s.n_attrs.to_string(),
        s.trials.to_string(),
        format!("{:.4}", s.mean_ms),
        format!("{:.4}", s.ci95_ms),
        format!("{:.4}", s.median_ms),
        c.exp_g1.to_string(),
        c.exp_g2.to_string(),
        c.exp_gt.to_string(),
        c.pairings.to_string(),
        c.hash_to_group.to_string(),
        format!("{:.6}", s.mean_energy_j),
    ]
}

fn to_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn records_csv(records: &[BenchRecord]) -> Vec<u8> {
    to_csv(&CSV_HEADER, records.iter().map(record_row))
}

pub fn summary_csv(summary: &[CellSummary]) -> Vec<u8> {
    to_csv(&SUMMARY_HEADER, summary.iter().map(summary_row))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "bench".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn write_outputs(report: &BenchReport, csv_path: &Path, plots: bool) -> Result<BenchOutputs, BenchError> {
    write_atomic(csv_path, &records_csv(&report.records))?;
    let summary = sibling(csv_path, ".summary.csv");
    write_atomic(&summary, &summary_csv(&report.summary))?;
    let mut written = Vec::new();
    if plots {
        let mut keys: Vec<(Scheme, BenchOp)> = report.summary.iter().map(|c| (c.scheme, c.op)).collect();
        keys.dedup();
        for (scheme, op) in keys {
            let cells: Vec<&CellSummary> =
                report.summary.iter().filter(|c| c.scheme == scheme && c.op == op).collect();
            let p = sibling(csv_path, &format!("-{scheme}-{}.svg", op.name()));
            write_atomic(&p, plot_svg(&format!("{scheme} {} time", op.name()), &cells).as_bytes())?;
            written.push(p);
        }
    }
    Ok(BenchOutputs { csv: csv_path.to_path_buf(), summary, plots: written })
}

const COLORS: [&str; 3] = ["#1b9e77", "#d95f02", "#7570b3"];

/// Mean time against attribute count, one line per security level.
pub fn plot_svg(title: &str, cells: &[&CellSummary]) -> String {
    let (w, h, left, right, top, bottom) = (640.0, 400.0, 60.0, 110.0, 30.0, 40.0);
    let max_x = cells.iter().map(|c| c.n_attrs).max().unwrap_or(1).max(2) as f64;
    let max_y = cells.iter().map(|c| c.mean_ms + c.ci95_ms).fold(0.0, f64::max).max(1e-3) * 1.05;
    let px = |x: f64| left + (x - 1.0) / (max_x - 1.0) * (w - left - right);
    let py = |y: f64| h - bottom - y / max_y * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="13">{}</text>"#, w / 2.0, xml_escape(title));
    let (x0, y0, x1, y1) = (left, h - bottom, w - right, top);
    let _ = writeln!(s, r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" stroke="black" fill="none"/>"#);
    for i in 0..=4 {
        let v = max_y * i as f64 / 4.0;
        let y = py(v);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{v:.1}</text>"#, x0 - 4.0, y + 4.0);
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#ddd"/>"##);
    }
    let step = ((max_x / 10.0).ceil() as usize).max(1);
    for n in (1..=max_x as usize).step_by(step) {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{n}</text>"#, px(n as f64), y0 + 14.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">attributes</text>"#, (x0 + x1) / 2.0, h - 6.0);
    let _ = writeln!(s, r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">ms</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0);

    for (i, level) in SecurityLevel::ALL.iter().enumerate() {
        let mut pts: Vec<&&CellSummary> = cells.iter().filter(|c| c.level == *level).collect();
        if pts.is_empty() {
            continue;
        }
        pts.sort_by_key(|c| c.n_attrs);
        let color = COLORS[i % COLORS.len()];
        let line: Vec<String> =
            pts.iter().map(|c| format!("{:.1},{:.1}", px(c.n_attrs as f64), py(c.mean_ms))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#, line.join(" "));
        for c in &pts {
            let (x, lo, hi) = (px(c.n_attrs as f64), py(c.mean_ms - c.ci95_ms), py(c.mean_ms + c.ci95_ms));
            let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{lo:.1}" x2="{x:.1}" y2="{hi:.1}" stroke="{color}"/>"#);
        }
        let ly = top + 10.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, x1 + 10.0, x1 + 30.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{} bits</text>"#, x1 + 34.0, ly + 4.0, level.bits());
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{run_bench, BenchConfig};

    #[test]
    fn files_round_trip_through_csv_reader() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.csv");
        let cfg = BenchConfig {
            levels: vec![SecurityLevel::S80],
            attr_counts: vec![1, 2],
            trials: 5,
            output: Some(out.clone()),
            plots: true,
            ..Default::default()
        };
        let report = run_bench(&cfg).unwrap();
        let outputs = report.outputs.clone().unwrap();

        let mut rd = csv::Reader::from_path(&out).unwrap();
        assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
        let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
        // 2 counts x 2 ops x 5 trials
        assert_eq!(rows.len(), 20);
        assert_eq!(&rows[0][0], "cp");
        assert_eq!(&rows[0][2], "80");

        let mut rd = csv::Reader::from_path(&outputs.summary).unwrap();
        assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), SUMMARY_HEADER);
        let cells: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().all(|c| &c[4] == "5"));
        assert!(outputs.summary.ends_with("run.summary.csv"));

        assert_eq!(outputs.plots.len(), 2);
        let svg = std::fs::read_to_string(&outputs.plots[0]).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("polyline") && svg.contains("80 bits"));
    }
}
