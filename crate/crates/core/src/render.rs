//! SVG rendering with 100-unit cells.

use crate::emulator::execute;
use crate::model::{Cell, Direction, ItemKind, PenColor, Pose, Program, Task};

pub const CELL: usize = 100;

fn item_color(kind: ItemKind) -> &'static str {
    match kind {
        ItemKind::Strawberry => "#e53935",
        ItemKind::Lemon => "#fdd835",
        ItemKind::Apple => "#43a047",
        ItemKind::Banana => "#fb8c00",
    }
}

fn pen_color(color: PenColor) -> &'static str {
    match color {
        PenColor::Black => "#000000",
        PenColor::Red => "#e53935",
        PenColor::Green => "#43a047",
        PenColor::Blue => "#1e88e5",
        PenColor::Yellow => "#fdd835",
        PenColor::White => "#ffffff",
    }
}

fn center(c: Cell) -> (usize, usize) {
    (c.col * CELL + CELL / 2, c.row * CELL + CELL / 2)
}

fn turtle_points(pose: Pose) -> String {
    let (cx, cy) = center(pose.cell());
    let (cx, cy) = (cx as i64, cy as i64);
    // Triangle pointing up, rotated to the heading.
    let shape = [(0i64, -35i64), (25, 25), (-25, 25)];
    let rot = |(x, y): (i64, i64)| match pose.dir {
        Direction::North => (x, y),
        Direction::East => (-y, x),
        Direction::South => (-x, -y),
        Direction::West => (y, -x),
    };
    shape
        .iter()
        .map(|&p| {
            let (x, y) = rot(p);
            format!("{},{}", cx + x, cy + y)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Deterministic SVG of `task`, with the trajectory of `code` overlaid when given.
pub fn render_svg(task: &Task, code: Option<&Program>) -> String {
    let w = &task.world;
    let (width, height) = (w.cols * CELL, w.rows * CELL);
    let mut s = String::new();
    let mut line = |text: String| {
        s.push_str(&text);
        s.push('\n');
    };
    line(format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" width="{width}" height="{height}">"#
    ));
    line(concat!(
        r#"<defs><pattern id="hatch" width="12" height="12" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">"#,
        r##"<rect width="12" height="12" fill="#fdecea"/><line x1="0" y1="0" x2="0" y2="12" stroke="#c62828" stroke-width="4"/></pattern></defs>"##
    )
    .to_string());
    line(format!(
        r##"<rect class="background" x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>"##
    ));
    for c in &w.walls {
        line(format!(
            r##"<rect class="wall" x="{}" y="{}" width="{CELL}" height="{CELL}" fill="#5d4037"/>"##,
            c.col * CELL,
            c.row * CELL
        ));
    }
    for c in &w.forbidden {
        line(format!(
            r#"<rect class="forbidden" x="{}" y="{}" width="{CELL}" height="{CELL}" fill="url(#hatch)"/>"#,
            c.col * CELL,
            c.row * CELL
        ));
    }
    for r in 0..=w.rows {
        let y = r * CELL;
        line(format!(
            r##"<line class="grid" x1="0" y1="{y}" x2="{width}" y2="{y}" stroke="#9e9e9e" stroke-width="2"/>"##
        ));
    }
    for c in 0..=w.cols {
        let x = c * CELL;
        line(format!(
            r##"<line class="grid" x1="{x}" y1="0" x2="{x}" y2="{height}" stroke="#9e9e9e" stroke-width="2"/>"##
        ));
    }
    for seg in w.segments() {
        let ((x1, y1), (x2, y2)) = (center(seg.edge.from()), center(seg.edge.to()));
        line(format!(
            r##"<line class="pattern" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{}" stroke-width="10" stroke-linecap="round" data-color="{}"/>"##,
            pen_color(seg.color),
            seg.color
        ));
    }
    for (&c, &kind) in &w.items {
        let (cx, cy) = center(c);
        let initial = kind.name()[..1].to_uppercase();
        line(format!(
            r##"<circle class="item" cx="{cx}" cy="{cy}" r="28" fill="{}" stroke="#212121" stroke-width="2" data-kind="{kind}"/>"##,
            item_color(kind)
        ));
        line(format!(
            r##"<text class="label" x="{cx}" y="{}" font-family="sans-serif" font-size="28" text-anchor="middle" fill="#212121">{initial}</text>"##,
            cy + 10
        ));
    }
    if let Some(code) = code {
        let traj = execute(code, w).trajectory;
        let mut points: Vec<(usize, usize)> = Vec::new();
        for c in &traj.visited {
            let p = center(*c);
            if points.last() != Some(&p) {
                points.push(p);
            }
        }
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x},{y}")).collect();
        line(format!(
            r##"<polyline class="trajectory" points="{}" fill="none" stroke="#1565c0" stroke-width="6" stroke-dasharray="12 8" stroke-linejoin="round"/>"##,
            pts.join(" ")
        ));
        if let Some(reason) = traj.crash {
            let (cx, cy) = center(traj.final_cell());
            line(format!(
                r##"<text class="crash" x="{cx}" y="{}" font-family="sans-serif" font-size="20" text-anchor="middle" fill="#b71c1c">{}</text>"##,
                cy - 38,
                reason.name()
            ));
        }
    }
    line(format!(
        r##"<polygon class="turtle" points="{}" fill="#2e7d32" stroke="#1b5e20" stroke-width="3"/>"##,
        turtle_points(w.start)
    ));
    s.push_str("</svg>\n");
    s
}
