//! Static SVG pictures of a network, colored by ground-truth label or by a
//! classifier's verdict.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::ConnectivityGraph;
use crate::truth::Label;
use crate::Verdict;

/// What decides a node's fill color.
#[derive(Debug, Clone, Copy)]
pub enum NodeStyle<'a> {
    Plain,
    Labels(&'a [Label]),
    Verdicts(&'a [Verdict]),
}

#[derive(Debug, Clone)]
pub struct RenderOptions {
    /// Pixels per unit of communication distance.
    pub scale: f64,
    pub node_radius: f64,
    pub draw_edges: bool,
    pub margin: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { scale: 20.0, node_radius: 2.5, draw_edges: true, margin: 10.0 }
    }
}

fn label_color(l: Label) -> &'static str {
    match l {
        Label::Mandatory => "#d62728",
        Label::Optional => "#ff9f1c",
        Label::Interior => "#9e9e9e",
    }
}

fn verdict_color(v: Verdict) -> &'static str {
    match v {
        Verdict::Boundary => "#1f4e9e",
        Verdict::Interior => "#c8c8c8",
    }
}

pub fn render_svg(g: &ConnectivityGraph, style: NodeStyle<'_>, opts: &RenderOptions) -> Result<String> {
    let pos = g.positions().ok_or(Error::MissingData("positions"))?;
    let len = match style {
        NodeStyle::Plain => g.n(),
        NodeStyle::Labels(l) => l.len(),
        NodeStyle::Verdicts(v) => v.len(),
    };
    if len != g.n() {
        return Err(Error::UniverseMismatch { truth: g.n(), classified: len });
    }
    if !(opts.scale > 0.0 && opts.scale.is_finite()) {
        return Err(Error::InvalidConfig(format!("scale must be positive, got {}", opts.scale)));
    }

    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if let Some(p) = pos.first() {
        (x0, y0, x1, y1) = (p.x, p.y, p.x, p.y);
    }
    for p in pos {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let width = (x1 - x0) * opts.scale + 2.0 * opts.margin;
    let height = (y1 - y0) * opts.scale + 2.0 * opts.margin;
    // SVG's y axis points down.
    let px = |x: f64| (x - x0) * opts.scale + opts.margin;
    let py = |y: f64| (y1 - y) * opts.scale + opts.margin;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    if opts.draw_edges {
        writeln!(s, r##"<g id="edges" stroke="#dddddd" stroke-width="0.5">"##).unwrap();
        for (u, v) in g.edges() {
            writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                px(pos[u].x),
                py(pos[u].y),
                px(pos[v].x),
                py(pos[v].y)
            )
            .unwrap();
        }
        writeln!(s, "</g>").unwrap();
    }
    writeln!(s, r#"<g id="nodes">"#).unwrap();
    for (u, p) in pos.iter().enumerate() {
        let fill = match style {
            NodeStyle::Plain => "#444444",
            NodeStyle::Labels(l) => label_color(l[u]),
            NodeStyle::Verdicts(v) => verdict_color(v[u]),
        };
        writeln!(
            s,
            r#"<circle id="n{u}" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{fill}"/>"#,
            px(p.x),
            py(p.y),
            opts.node_radius
        )
        .unwrap();
    }
    writeln!(s, "</g>\n</svg>").unwrap();
    Ok(s)
}
