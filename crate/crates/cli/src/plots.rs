//! Figures derived from the CSV files of a report directory.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;

use crate::svg::{Plot, Style};
use crate::table::Table;

/// CSV files that have a figure, in rendering order.
pub const PLOTTED: [&str; 7] = [
    "oracle.csv",
    "scan.csv",
    "harnack.csv",
    "density.csv",
    "active.csv",
    "lorenz.csv",
    "mc.csv",
];

/// Splits `(x, y)` pairs into series keyed by the text of `key`.
fn grouped(t: &Table, key: &str, x: &str, y: &str) -> Result<BTreeMap<String, Vec<(f64, f64)>>> {
    let (k, xs, ys) = (t.text_column(key)?, t.column(x)?, t.column(y)?);
    let mut out: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for ((k, x), y) in k.into_iter().zip(xs).zip(ys) {
        out.entry(k).or_default().push((x, y));
    }
    Ok(out)
}

fn with_groups(
    mut p: Plot,
    prefix: &str,
    style: Style,
    groups: BTreeMap<String, Vec<(f64, f64)>>,
) -> Plot {
    for (k, pts) in groups {
        p = p.with(&format!("{prefix}{k}"), style, pts);
    }
    p
}

pub fn plot_for(csv_name: &str, t: &Table) -> Result<Option<Plot>> {
    let p = match csv_name {
        "oracle.csv" => with_groups(
            Plot::new("Disk oracle: L2 error", "h", "L2 error", true, true),
            "a=",
            Style::Line,
            grouped(t, "a", "h", "l2_error")?,
        ),
        "scan.csv" => with_groups(
            Plot::new("Ratio scan", "A = a*sigma(Delta)", "R", true, true),
            "C=",
            Style::Points,
            grouped(t, "c_pole", "A_param", "R")?,
        ),
        "harnack.csv" => with_groups(
            Plot::new(
                "Boundary Harnack ratio",
                "A = a*sigma(Delta)",
                "ratio",
                true,
                true,
            ),
            "center ",
            Style::Points,
            grouped(t, "center_id", "A_param", "ratio")?,
        ),
        "density.csv" => Plot::new("Density bound", "1/(a*sigma(B))", "min u", false, true).with(
            "m(a)",
            Style::Line,
            t.column("inv_a_sigma")?
                .into_iter()
                .zip(t.column("min_u")?)
                .collect(),
        ),
        "active.csv" => Plot::new("Active boundary", "a", "delta", true, true).with(
            "delta(a)",
            Style::Line,
            t.column("a")?.into_iter().zip(t.column("delta")?).collect(),
        ),
        "lorenz.csv" => {
            let mut p = Plot::new(
                "Lorenz curves against sigma",
                "sigma fraction",
                "measure fraction",
                false,
                false,
            );
            let mut dirichlet_done = false;
            for (k, pts) in grouped(t, "curve_id", "sigma_fraction", "measure_fraction")? {
                if k.starts_with("dirichlet") {
                    if dirichlet_done {
                        continue;
                    }
                    dirichlet_done = true;
                    p = p.with("dirichlet", Style::Line, pts);
                } else {
                    p = p.with(&k, Style::Line, pts);
                }
            }
            p
        }
        "mc.csv" => {
            let seeds = t.column("seed")?;
            let est = t.column("estimate")?;
            let exact = t.column("exact")?;
            Plot::new("Monte Carlo estimates", "seed", "omega(E)", false, false)
                .with(
                    "walks",
                    Style::Points,
                    seeds.iter().copied().zip(est).collect(),
                )
                .with(
                    "deterministic",
                    Style::Line,
                    seeds.iter().copied().zip(exact).collect(),
                )
        }
        _ => return Ok(None),
    };
    Ok(Some(p))
}

/// Renders an SVG next to every plotted CSV in `dir`; returns the SVG names.
pub fn render_dir(dir: &Path) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for name in PLOTTED {
        let path = dir.join(name);
        if !path.exists() {
            continue;
        }
        if let Some(plot) = plot_for(name, &Table::read(&path)?)? {
            let svg = name.replace(".csv", ".svg");
            std::fs::write(dir.join(&svg), plot.render())?;
            out.push(svg);
        }
    }
    Ok(out)
}
