//! SVG rendering of a single mechanism, viewed along the axles.
//!
//! Gears are circles at their pitch radius, stroked and tinted by plane and
//! labelled with their catalog id. Coaxial gears share a centre, so they show
//! up as concentric rings of different colours. Axles are small filled dots.
//! Breaches are highlighted: out-of-bounds overhang is hatched and overlaps
//! (disc/disc or disc/axle) are filled as red lenses.

use std::fmt::Write;

use mechsynth_core::geometry::BreachKind;

use crate::record::MechanismRecord;

const PX_PER_MM: f64 = 3.0;
const MARGIN: f64 = 24.0;
const PLANE_COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];

fn plane_color(plane: u32) -> &'static str {
    PLANE_COLORS[plane as usize % PLANE_COLORS.len()]
}

/// Lens (intersection) of two circles whose centres lie on one horizontal
/// line. Returns `None` when they do not intersect; when one contains the
/// other, the smaller circle is the lens.
fn lens_path(c1: f64, r1: f64, c2: f64, r2: f64, y: f64) -> Option<String> {
    let (c1, r1, c2, r2) = if c1 <= c2 { (c1, r1, c2, r2) } else { (c2, r2, c1, r1) };
    let d = c2 - c1;
    if d >= r1 + r2 {
        return None;
    }
    if d <= (r1 - r2).abs() {
        let (c, r) = if r1 <= r2 { (c1, r1) } else { (c2, r2) };
        return Some(format!(
            "M {:.3} {:.3} A {r:.3} {r:.3} 0 1 1 {:.3} {y:.3} A {r:.3} {r:.3} 0 1 1 {:.3} {y:.3} Z",
            c - r,
            y,
            c + r,
            c - r
        ));
    }
    // chord position measured from c1
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let x = c1 + a;
    let large1 = u8::from(a < 0.0);
    let large2 = u8::from(d - a < 0.0);
    Some(format!(
        "M {x:.3} {:.3} A {r1:.3} {r1:.3} 0 {large1} 1 {x:.3} {:.3} A {r2:.3} {r2:.3} 0 {large2} 1 {x:.3} {:.3} Z",
        y - h,
        y + h,
        y - h
    ))
}

/// Renders `mech` as a standalone SVG document. Output is a pure function of
/// the record.
pub fn render_mechanism(mech: &MechanismRecord, title: &str) -> String {
    let s = PX_PER_MM;
    let max_r = mech.gears.iter().map(|g| g.radius_mm).fold(0.0, f64::max);
    let min_x = mech.gears.iter().map(|g| g.center_x_mm - g.radius_mm).fold(0.0, f64::min);
    let max_x = mech.gears.iter().map(|g| g.center_x_mm + g.radius_mm).fold(mech.box_length_mm, f64::max);

    let width = (max_x - min_x) * s + 2.0 * MARGIN;
    let height = 2.0 * max_r * s + 2.0 * MARGIN + 20.0;
    let cy = MARGIN + 20.0 + max_r * s;
    let px = |x_mm: f64| MARGIN + (x_mm - min_x) * s;

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(
        w,
        r##"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><line x1="0" y1="0" x2="0" y2="6" stroke="#d62728" stroke-width="2"/></pattern></defs>"##
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{width:.3}" height="{height:.3}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{MARGIN:.3}" y="16" font-family="sans-serif" font-size="12">{}</text>"#,
        escape(title)
    );
    // gear box
    let _ = writeln!(
        w,
        r##"<rect class="box" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#555" stroke-dasharray="6 4"/>"##,
        px(0.0),
        cy - max_r * s,
        mech.box_length_mm * s,
        2.0 * max_r * s
    );

    // larger radii first so smaller concentric gears stay visible
    let mut order: Vec<usize> = (0..mech.gears.len()).collect();
    order.sort_by(|&a, &b| mech.gears[b].radius_mm.total_cmp(&mech.gears[a].radius_mm).then(a.cmp(&b)));
    for &i in &order {
        let g = &mech.gears[i];
        let color = plane_color(g.plane);
        let _ = writeln!(
            w,
            r#"<circle class="gear" data-index="{i}" data-plane="{}" cx="{:.3}" cy="{cy:.3}" r="{:.3}" fill="{color}" fill-opacity="0.25" stroke="{color}" stroke-width="2"/>"#,
            g.plane,
            px(g.center_x_mm),
            g.radius_mm * s
        );
    }

    for b in &mech.breaches {
        let g = &mech.gears[b.gear];
        match b.kind {
            BreachKind::OutOfBounds => {
                let (lo, hi) = (g.center_x_mm - g.radius_mm, g.center_x_mm + g.radius_mm);
                let mut spans = Vec::new();
                if lo < 0.0 {
                    spans.push((lo, 0.0));
                }
                if hi > mech.box_length_mm {
                    spans.push((mech.box_length_mm, hi));
                }
                for (a, z) in spans {
                    let _ = writeln!(
                        w,
                        r#"<rect class="breach out-of-bounds" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="url(#hatch)" fill-opacity="0.8"/>"#,
                        px(a),
                        cy - g.radius_mm * s,
                        (z - a) * s,
                        2.0 * g.radius_mm * s
                    );
                }
            }
            BreachKind::DiscOverlap | BreachKind::AxleClash => {
                let (c2, r2) = match (b.kind, b.other) {
                    (BreachKind::DiscOverlap, Some(j)) => (mech.gears[j].center_x_mm, mech.gears[j].radius_mm),
                    (_, Some(axle)) => {
                        let x = mech
                            .gears
                            .iter()
                            .find(|h| h.axle_id as usize == axle)
                            .map_or(g.center_x_mm, |h| h.center_x_mm);
                        (x, mech.axle_radius_mm)
                    }
                    _ => continue,
                };
                if let Some(d) = lens_path(px(g.center_x_mm), g.radius_mm * s, px(c2), r2 * s, cy) {
                    let kind = if b.kind == BreachKind::DiscOverlap { "overlap" } else { "axle-clash" };
                    let _ = writeln!(w, r##"<path class="breach {kind}" d="{d}" fill="#d62728" fill-opacity="0.6"/>"##);
                }
            }
        }
    }

    let mut axles: Vec<(u32, f64)> = mech.gears.iter().map(|g| (g.axle_id, g.center_x_mm)).collect();
    axles.sort_by_key(|a| a.0);
    axles.dedup_by_key(|a| a.0);
    for (id, x) in axles {
        let _ = writeln!(
            w,
            r##"<circle class="axle" data-axle="{id}" cx="{:.3}" cy="{cy:.3}" r="{:.3}" fill="#222"/>"##,
            px(x),
            mech.axle_radius_mm.max(0.5) * s
        );
    }

    for (i, g) in mech.gears.iter().enumerate() {
        // label just inside the top of the rim; equal-radius coaxial gears
        // are nudged apart by plane
        let dx = if mech.gears.iter().take(i).any(|h| h.axle_id == g.axle_id && h.radius_mm == g.radius_mm) {
            10.0 * g.plane as f64
        } else {
            0.0
        };
        let _ = writeln!(
            w,
            r#"<text class="label" x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="middle" fill="{}">{}</text>"#,
            px(g.center_x_mm) + dx,
            cy - g.radius_mm * s + 13.0,
            plane_color(g.plane),
            g.gear_id
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
