//! SVG maps: one panel per collection, plus the alignment with dots on the
//! units where the collections disagree.

use std::fmt::Write;

use crate::distance::Alignment;
use crate::error::{Error, Result};
use crate::model::{Instance, Layout, Partition};
use crate::solver1d::path_order;

const CELL: f64 = 24.0;
const GAP: f64 = 24.0;
const TITLE: f64 = 18.0;

/// Cell of every unit, plus width and height.
type Layout2d = (Vec<(usize, usize)>, usize, usize);

/// Grid coordinates of every unit, `y` growing upwards.
fn positions(instance: &Instance) -> Result<Layout2d> {
    match instance.layout() {
        Layout::Grid { width, height } => Ok((
            (0..instance.unit_count())
                .map(|i| (i % width, i / width))
                .collect(),
            width,
            height,
        )),
        Layout::Explicit => {
            let order = path_order(instance).map_err(|e| Error::NoLayout(e.to_string()))?;
            let mut pos = vec![(0, 0); instance.unit_count()];
            for (x, u) in order.iter().enumerate() {
                pos[u.index()] = (x, 0);
            }
            Ok((pos, order.len(), 1))
        }
    }
}

fn colour(i: usize) -> String {
    // Golden-angle hue steps keep neighbouring label indices apart.
    let hue = (i as f64 * 137.508) % 360.0;
    format!("hsl({hue:.0},65%,62%)")
}

const UNMAPPED: &str = "#bbbbbb";

pub fn render_svg(instance: &Instance, alignment: Option<&Alignment>) -> Result<String> {
    let (pos, w, h) = positions(instance)?;
    let n = instance.unit_count();
    let panel_w = w as f64 * CELL;
    let panel_h = h as f64 * CELL + TITLE;

    // Fill per unit per panel, and the disagreement units.
    let mut panels: Vec<(String, Vec<String>)> = Vec::new();
    let mut dots = vec![false; n];
    match alignment {
        Some(a) => {
            let target = &a.result;
            let mut images: Vec<Vec<Option<usize>>> = Vec::new();
            for c in instance.collections() {
                let map = a.correspondence.get(&c.name)?;
                let img: Vec<Option<usize>> = instance
                    .units()
                    .map(|u| {
                        let l = c.partition.label_of(u)?;
                        map.get(l)?.as_deref().and_then(|t| target.label_index(t))
                    })
                    .collect();
                panels.push((
                    c.name.clone(),
                    img.iter()
                        .map(|i| i.map_or(UNMAPPED.into(), colour))
                        .collect(),
                ));
                images.push(img);
            }
            for (u, dot) in dots.iter_mut().enumerate() {
                *dot = images.iter().any(|img| img[u] != images[0][u]);
            }
            panels.push(("alignment".into(), fills(target)));
        }
        None => {
            for c in instance.collections() {
                panels.push((c.name.clone(), fills(&c.partition)));
            }
        }
    }

    let total_w = panels.len() as f64 * (panel_w + GAP) + GAP;
    let total_h = panel_h + 2.0 * GAP;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total_w}" height="{total_h}" viewBox="0 0 {total_w} {total_h}" font-family="sans-serif" font-size="12">"#
    );
    for (p, (title, fill)) in panels.iter().enumerate() {
        let ox = GAP + p as f64 * (panel_w + GAP);
        let oy = GAP;
        let _ = writeln!(
            svg,
            r#"<g id="panel-{p}"><text x="{ox}" y="{}">{}</text>"#,
            oy + 12.0,
            escape(title)
        );
        for u in 0..n {
            let (x, y) = pos[u];
            let rx = ox + x as f64 * CELL;
            let ry = oy + TITLE + (h - 1 - y) as f64 * CELL;
            let _ = writeln!(
                svg,
                r##"<rect x="{rx}" y="{ry}" width="{CELL}" height="{CELL}" fill="{}" stroke="#ffffff"><title>{}</title></rect>"##,
                fill[u],
                escape(instance.unit_name(crate::model::UnitId(u as u32)))
            );
        }
        if alignment.is_some() && p + 1 == panels.len() {
            for u in (0..n).filter(|&u| dots[u]) {
                let (x, y) = pos[u];
                let cx = ox + (x as f64 + 0.5) * CELL;
                let cy = oy + TITLE + (h - 1 - y) as f64 * CELL + CELL / 2.0;
                let _ = writeln!(
                    svg,
                    r#"<circle class="disagree" cx="{cx}" cy="{cy}" r="4" fill="red"/>"#
                );
            }
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn fills(p: &Partition) -> Vec<String> {
    (0..p.unit_count())
        .map(|u| {
            p.owner(crate::model::UnitId(u as u32))
                .map_or(UNMAPPED.into(), colour)
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_random, GenParams};
    use crate::model::{AdjacencyGraph, Collection, UnitId};

    #[test]
    fn non_path_explicit_layout_rejected() {
        let names = (0..3).map(|i| format!("u{i}")).collect();
        let g = AdjacencyGraph::new(
            3,
            [
                (UnitId(0), UnitId(1)),
                (UnitId(1), UnitId(2)),
                (UnitId(0), UnitId(2)),
            ],
        );
        let c = Collection {
            name: "C".into(),
            partition: Partition::new(3, [("a".to_string(), (0..3).map(UnitId).collect())]),
            population: vec![1; 3],
        };
        let inst = Instance::new(names, g, vec![c], Layout::Explicit).unwrap();
        assert!(matches!(render_svg(&inst, None), Err(Error::NoLayout(_))));
    }

    #[test]
    fn panels_and_cells() {
        let inst = gen_random(
            5,
            &GenParams {
                width: 3,
                height: 2,
                k: 2,
                m: 2,
                population: 1..=5,
            },
        )
        .unwrap();
        let svg = render_svg(&inst, None).unwrap();
        assert_eq!(svg.matches("<rect").count(), 12);
        assert_eq!(svg.matches("<circle").count(), 0);
    }
}
