//! SVG plots drawn only from CSV text written by the run and sweep layers.
//!
//! Paths are shaded from light gray (first) to black (last), so an iterate
//! overlay shows the straight line faintest and the final path darkest.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 48.0;
const LEGEND: f64 = 150.0;
/// Longer overlays only label the first and last path.
const MAX_LEGEND: usize = 12;

#[derive(Debug, Clone, PartialEq)]
struct Node {
    kind: String,
    index: usize,
    xy: [f64; 2],
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::Reader::from_reader(text.as_bytes())
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Parse(format!("CSV column `{name}` missing")))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse(format!("bad CSV field `{raw}`")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Points of a CSV with `x` and `y` columns, split by `group` if given.
fn read_paths(text: &str, group: Option<&str>) -> Result<Vec<(String, Vec<[f64; 2]>)>> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let (cx, cy) = (column(&headers, "x")?, column(&headers, "y")?);
    let cg = group.map(|g| column(&headers, g)).transpose()?;
    let mut paths: BTreeMap<usize, Vec<[f64; 2]>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let key = match cg {
            Some(c) => field(&rec, c)?,
            None => 0,
        };
        paths.entry(key).or_default().push([field(&rec, cx)?, field(&rec, cy)?]);
    }
    Ok(paths.into_iter().map(|(k, p)| (k.to_string(), p)).collect())
}

fn read_nodes(text: &str) -> Result<Vec<Node>> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let c = [
        column(&headers, "kind")?,
        column(&headers, "index")?,
        column(&headers, "x")?,
        column(&headers, "y")?,
    ];
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            Ok(Node {
                kind: field(&rec, c[0])?,
                index: field(&rec, c[1])?,
                xy: [field(&rec, c[2])?, field(&rec, c[3])?],
            })
        })
        .collect()
}

/// Overlay of every SCA iterate from `iterates.csv` over `nodes.csv`.
pub fn render_iterates_svg(iterates_csv: &str, nodes_csv: &str) -> Result<String> {
    let paths = read_paths(iterates_csv, Some("j"))?
        .into_iter()
        .map(|(j, p)| (format!("iteration {j}"), p))
        .collect::<Vec<_>>();
    Ok(render("UAV trajectory over iterations", &paths, &read_nodes(nodes_csv)?))
}

/// Overlay of several `trajectory.csv` files, one labelled path each.
pub fn render_overlay_svg(title: &str, trajectories: &[(String, String)], nodes_csv: &str) -> Result<String> {
    let mut paths = Vec::with_capacity(trajectories.len());
    for (label, text) in trajectories {
        let pts = read_paths(text, None)?.into_iter().flat_map(|(_, p)| p).collect();
        paths.push((label.clone(), pts));
    }
    Ok(render(title, &paths, &read_nodes(nodes_csv)?))
}

fn shade(i: usize, count: usize) -> String {
    let level = if count <= 1 { 0.0 } else { 200.0 * (1.0 - i as f64 / (count - 1) as f64) };
    let g = level.round() as u8;
    format!("#{g:02x}{g:02x}{g:02x}")
}

fn render(title: &str, paths: &[(String, Vec<[f64; 2]>)], nodes: &[Node]) -> String {
    let pts = paths.iter().flat_map(|p| p.1.iter()).chain(nodes.iter().map(|n| &n.xy));
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    if !lo[0].is_finite() {
        (lo, hi) = ([0.0; 2], [1.0; 2]);
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let plot = WIDTH - 2.0 * MARGIN;
    let scale = plot / span;
    let height = (hi[1] - lo[1]) * scale + 2.0 * MARGIN;
    let px = |p: [f64; 2]| (MARGIN + (p[0] - lo[0]) * scale, height - MARGIN - (p[1] - lo[1]) * scale);

    let mut out = String::new();
    let total_w = WIDTH + LEGEND;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{height:.0}" viewBox="0 0 {total_w:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="{:.1}" font-size="14">{title}</text>"#, MARGIN / 2.0);
    let (x0, y0) = px(lo);
    let (x1, y1) = px(hi);
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#999"/>"##,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(out, r#"<text x="{x0:.2}" y="{:.2}">{:.0} m</text>"#, y0 + 16.0, lo[0]);
    let _ = writeln!(out, r#"<text x="{x1:.2}" y="{:.2}" text-anchor="end">{:.0} m</text>"#, y0 + 16.0, hi[0]);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{y1:.2}" text-anchor="end">{:.0} m</text>"#, x0 - 4.0, hi[1]);

    for (i, (label, path)) in paths.iter().enumerate() {
        let colour = shade(i, paths.len());
        let points: Vec<String> = path
            .iter()
            .map(|&p| {
                let (x, y) = px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            points.join(" ")
        );
        let slot = if paths.len() <= MAX_LEGEND {
            i
        } else if i == 0 {
            0
        } else if i + 1 == paths.len() {
            1
        } else {
            continue;
        };
        let ly = MARGIN + 18.0 * slot as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{label}</text>"#,
            WIDTH + 4.0,
            WIDTH + 28.0,
            WIDTH + 34.0,
            ly + 4.0
        );
    }

    for n in nodes {
        let (x, y) = px(n.xy);
        let (shape, label) = match n.kind.as_str() {
            "bs" => (format!(r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="navy"/>"#, x - 5.0, y - 5.0), "BS".to_string()),
            "ris" => (
                format!(
                    r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="darkgreen"/>"#,
                    x, y - 7.0, x + 7.0, y, x, y + 7.0, x - 7.0, y
                ),
                "RIS".to_string(),
            ),
            "ue" => (format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="firebrick"/>"#), format!("UE{}", n.index)),
            "start" | "end" => (format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="black"/>"#), n.kind.clone()),
            _ => continue,
        };
        let _ = writeln!(out, "{shape}<text x=\"{:.2}\" y=\"{:.2}\">{label}</text>", x + 8.0, y - 8.0);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const NODES: &str = "kind,index,x,y\nbs,0,0,0\nris,0,500,0\nue,1,20,450\nstart,0,0,0\nend,0,500,500\n";

    #[test]
    fn iterates_are_shaded_light_to_dark() {
        let it = "j,n,x,y\n0,0,0,0\n0,1,500,500\n1,0,0,0\n1,1,250,400\n2,0,0,0\n2,1,200,450\n";
        let svg = render_iterates_svg(it, NODES).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        let first = svg.find("#c8c8c8").unwrap();
        let last = svg.find("#000000").unwrap();
        assert!(first < last);
        assert!(svg.contains("UE1") && svg.contains("RIS"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let t = "n,x,y,vx,vy,speed,propulsion_W\n0,0,0,1,1,1.4,100\n1,1,1,,,,\n";
        let a = render_overlay_svg("t", &[("a".into(), t.into())], NODES).unwrap();
        let b = render_overlay_svg("t", &[("a".into(), t.into())], NODES).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_column_is_reported() {
        assert!(render_iterates_svg("j,n,x\n0,0,1\n", NODES).is_err());
    }
}
