use std::fmt::Write;

use super::curves::CurveResult;
use super::points::PointCloudResult;

fn push_xyz(out: &mut String, chart: usize, x: &[f64]) {
    let c = |i: usize| x.get(i).copied().unwrap_or(0.0);
    let _ = writeln!(out, "{chart} {:.17e} {:.17e} {:.17e}", c(0), c(1), c(2));
}

/// One `chart_id x y z` line per point.
pub fn dump_points(result: &PointCloudResult) -> String {
    let mut out = String::new();
    for p in &result.points {
        push_xyz(&mut out, p.chart, &p.x);
    }
    out
}

/// One `chart_id x y z` line per vertex, components separated by a blank line.
pub fn dump_curves(result: &CurveResult) -> String {
    let mut out = String::new();
    for (i, c) in result.components.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for v in &c.vertices {
            push_xyz(&mut out, v.chart, &v.x);
        }
    }
    out
}

/// Parses a curve dump back into per-component `(chart, point)` lists.
pub fn parse_curve_dump(text: &str) -> crate::Result<Vec<Vec<(usize, [f64; 3])>>> {
    let mut comps = vec![Vec::new()];
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !comps.last().unwrap().is_empty() {
                comps.push(Vec::new());
            }
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || crate::Error::invalid(format!("curve dump line {}", lineno + 1));
        if f.len() != 4 {
            return Err(bad());
        }
        let chart = f[0].parse().map_err(|_| bad())?;
        let mut x = [0.0; 3];
        for i in 0..3 {
            x[i] = f[i + 1].parse().map_err(|_| bad())?;
        }
        comps.last_mut().unwrap().push((chart, x));
    }
    if comps.last().is_some_and(|c| c.is_empty()) {
        comps.pop();
    }
    Ok(comps)
}
