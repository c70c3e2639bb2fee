//! Ternary plot of three-level states.

use std::fmt::Write;

const SIDE: f64 = 420.0;
const MARGIN: f64 = 40.0;

/// Corner 1 bottom left, corner 2 bottom right, corner 3 on top.
fn project(p: &[f64]) -> (f64, f64) {
    let h = SIDE * 3f64.sqrt() / 2.0;
    let x = MARGIN + SIDE * (p[1] + p[2] / 2.0);
    let y = MARGIN + h - h * p[2];
    (x, y)
}

/// Points sorted by angle about their centroid, so a convex set draws as a
/// simple polygon.
fn ring(points: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let mut xy: Vec<(f64, f64)> = points.iter().map(|p| project(p)).collect();
    let n = xy.len() as f64;
    let cx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = xy.iter().map(|p| p.1).sum::<f64>() / n;
    xy.sort_by(|a, b| {
        let ta = (a.1 - cy).atan2(a.0 - cx);
        let tb = (b.1 - cy).atan2(b.0 - cx);
        ta.total_cmp(&tb)
    });
    xy
}

fn polygon(out: &mut String, pts: &[(f64, f64)], style: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
    let _ = writeln!(out, r#"  <polygon points="{}" {style}/>"#, coords.join(" "));
}

/// `hull` is the reachable set, `polytope` the inner bound and states with
/// third weight above `top_bound` are shaded as excluded.
pub fn simplex_svg(hull: &[Vec<f64>], polytope: &[Vec<f64>], top_bound: f64) -> String {
    let width = SIDE + 2.0 * MARGIN;
    let height = SIDE * 3f64.sqrt() / 2.0 + 2.0 * MARGIN + 40.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="13">"#
    );
    let corners = [
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ];
    let tri: Vec<(f64, f64)> = corners.iter().map(|c| project(c)).collect();
    polygon(
        &mut s,
        &tri,
        r##"fill="#ffffff" stroke="#000000" stroke-width="1""##,
    );

    if top_bound < 1.0 {
        let b = top_bound.max(0.0);
        let band = [
            project(&[1.0 - b, 0.0, b]),
            project(&[0.0, 1.0 - b, b]),
            project(&[0.0, 0.0, 1.0]),
        ];
        polygon(
            &mut s,
            &band,
            r##"fill="#bbbbbb" fill-opacity="0.6" stroke="none""##,
        );
    }
    if !hull.is_empty() {
        polygon(
            &mut s,
            &ring(hull),
            r##"fill="#4f81bd" fill-opacity="0.45" stroke="#1f4e79" stroke-width="1.2""##,
        );
        for p in hull {
            let (x, y) = project(p);
            let _ = writeln!(
                s,
                r##"  <circle cx="{x:.3}" cy="{y:.3}" r="2" fill="#1f4e79"/>"##
            );
        }
    }
    if !polytope.is_empty() {
        polygon(
            &mut s,
            &ring(polytope),
            r##"fill="#e46c0a" fill-opacity="0.45" stroke="#984807" stroke-width="1.2""##,
        );
    }

    let labels = [("1", -18.0, 14.0), ("2", 8.0, 14.0), ("3", -4.0, -8.0)];
    for ((x, y), (t, dx, dy)) in tri.iter().zip(labels) {
        let _ = writeln!(
            s,
            r#"  <text x="{:.3}" y="{:.3}">{t}</text>"#,
            x + dx,
            y + dy
        );
    }
    let ly = height - 20.0;
    let legend = [
        ("#4f81bd", "reachable hull"),
        ("#e46c0a", "inner polytope"),
        ("#bbbbbb", "excluded by top-weight bound"),
    ];
    for (k, (color, text)) in legend.iter().enumerate() {
        let x = MARGIN + 150.0 * k as f64;
        let _ = writeln!(
            s,
            r#"  <rect x="{x:.0}" y="{:.0}" width="12" height="12" fill="{color}"/>"#,
            ly - 11.0
        );
        let _ = writeln!(
            s,
            r#"  <text x="{:.0}" y="{ly:.0}" font-size="11">{text}</text>"#,
            x + 16.0
        );
    }
    s.push_str("</svg>\n");
    s
}
