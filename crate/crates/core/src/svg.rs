//! Deployment figures as standalone SVG: cells colored by AP, APs as red
//! squares, FCs as black circles, centroids as crosses, and (in limited
//! mode) one sensing disk per active AP.

use crate::model::{Deployment, Partition, Scenario};
use crate::scene::DensityGrid;
use std::fmt::Write;

const PALETTE: [&str; 10] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
    "#d9d9d9", "#bc80bd",
];

/// Renders one deployment snapshot. 1-D scenarios draw as a thin strip.
pub fn render_figure(
    dep: &Deployment,
    part: &Partition,
    grid: &DensityGrid,
    sc: &Scenario,
) -> String {
    let region = grid.region();
    let (xlo, xhi) = region.x_bounds();
    let width = xhi - xlo;
    let (ylo, height) = if region.dim() == 1 {
        (-0.05 * width, 0.1 * width)
    } else {
        let (ylo, yhi) = region.y_bounds();
        (ylo, yhi - ylo)
    };
    // flip y so larger coordinates draw upward
    let fy = |y: f64| ylo + height - (y - ylo);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"640\" height=\"{}\">",
        xlo,
        ylo,
        width,
        height,
        (640.0 * height / width).round()
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{xlo}\" y=\"{ylo}\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>"
    );

    // cells, colored by owning AP
    let (nx, ny) = grid.shape();
    let dx = width / nx as f64;
    let dy = height / ny.max(1) as f64;
    for (i, &w) in grid.centers().iter().enumerate() {
        if let Some(n) = part.assign[i] {
            let color = PALETTE[n % PALETTE.len()];
            let cy = if region.dim() == 1 {
                ylo
            } else {
                fy(w.y) - dy / 2.0
            };
            let _ = writeln!(
                svg,
                "<rect class=\"cell\" x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\" fill=\"{}\"/>",
                w.x - dx / 2.0,
                cy,
                dx,
                if region.dim() == 1 { height } else { dy },
                color
            );
        }
    }

    // sensing disks of active APs (limited mode only)
    if sc.limited() {
        for n in dep.active_aps() {
            if let Ok(r) = sc.sensing_radius(n) {
                let _ = writeln!(
                    svg,
                    "<circle class=\"range\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"none\" stroke=\"#666666\" stroke-dasharray=\"0.15 0.1\" stroke-width=\"0.04\"/>",
                    dep.p[n].x,
                    fy(dep.p[n].y)
                , r);
            }
        }
    }

    // centroid crosses
    let arm = 0.012 * width;
    for c in part.centroids.iter().flatten() {
        let (cx, cy) = (c.x, fy(c.y));
        let _ = writeln!(
            svg,
            "<path class=\"centroid\" d=\"M {} {} L {} {} M {} {} L {} {}\" stroke=\"#333333\" stroke-width=\"0.05\"/>",
            cx - arm, cy - arm, cx + arm, cy + arm, cx - arm, cy + arm, cx + arm, cy - arm
        );
    }

    // APs as red squares
    let side = 0.016 * width;
    for p in &dep.p {
        let _ = writeln!(
            svg,
            "<rect class=\"ap\" x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\" fill=\"red\"/>",
            p.x - side,
            fy(p.y) - side,
            2.0 * side,
            2.0 * side
        );
    }

    // FCs as black circles
    for q in &dep.q {
        let _ = writeln!(
            svg,
            "<circle class=\"fc\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"black\"/>",
            q.x,
            fy(q.y),
            0.012 * width
        );
    }

    svg.push_str("</svg>\n");
    svg
}

/// Scatter plot of a trade-off curve: envelope points solid, others hollow.
pub fn render_tradeoff(points: &[(f64, f64, bool)]) -> String {
    let mut svg = String::new();
    let (mut smax, mut amax) = (0.0f64, 0.0f64);
    for &(s, a, _) in points {
        smax = smax.max(s);
        amax = amax.max(a);
    }
    if smax <= 0.0 {
        smax = 1.0;
    }
    if amax <= 0.0 {
        amax = 1.0;
    }
    let w = 640.0;
    let h = 480.0;
    let margin = 40.0;
    let sx = |s: f64| margin + (w - 2.0 * margin) * s / smax;
    let sy = |a: f64| h - margin - (h - 2.0 * margin) * a / amax;
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\" width=\"{w}\" height=\"{h}\">"
    );
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "<path d=\"M {m} {m} L {m} {ybot} L {xright} {ybot}\" stroke=\"black\" fill=\"none\"/>",
        m = margin,
        ybot = h - margin,
        xright = w - margin
    );
    // connect the envelope
    let env: Vec<&(f64, f64, bool)> = points.iter().filter(|p| p.2).collect();
    if env.len() > 1 {
        let mut d = String::new();
        for (k, &&(s, a, _)) in env.iter().enumerate() {
            let _ = write!(
                d,
                "{} {:.3} {:.3} ",
                if k == 0 { "M" } else { "L" },
                sx(s),
                sy(a)
            );
        }
        let _ = writeln!(
            svg,
            "<path class=\"envelope\" d=\"{}\" stroke=\"#1f77b4\" fill=\"none\"/>",
            d.trim()
        );
    }
    for &(s, a, on_env) in points {
        let _ = writeln!(
            svg,
            "<circle class=\"pt\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"{}\" stroke=\"#1f77b4\"/>",
            sx(s),
            sy(a),
            if on_env { "#1f77b4" } else { "white" }
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::partition::assign_cells;
    use crate::scene::{DensityModel, Region};

    #[test]
    fn figure_counts_markers() {
        let region = Region::unit_square_10();
        let sc = Scenario {
            n_aps: 2,
            n_fcs: 1,
            a: vec![1.0, 2.0],
            b: vec![vec![1.0], vec![1.0]],
            beta: 0.25,
            sensor_budget: None,
            ap_budgets: None,
            region,
            density: DensityModel::Uniform,
        };
        let dep = Deployment::new(
            vec![Point::new(3.0, 3.0), Point::new(7.0, 7.0)],
            vec![Point::new(5.0, 5.0)],
            vec![Some(0), Some(0)],
        );
        let grid = DensityGrid::discretize(&region, &DensityModel::Uniform, 20).unwrap();
        let part = assign_cells(&dep, &grid, &sc);
        let svg = render_figure(&dep, &part, &grid, &sc);
        assert_eq!(svg.matches("class=\"ap\"").count(), 2);
        assert_eq!(svg.matches("class=\"fc\"").count(), 1);
        assert_eq!(svg.matches("class=\"centroid\"").count(), 2);
        assert_eq!(svg.matches("class=\"range\"").count(), 0);
    }

    #[test]
    fn limited_mode_draws_disks_for_active_aps_only() {
        let region = Region::unit_square_10();
        let sc = Scenario {
            n_aps: 2,
            n_fcs: 1,
            a: vec![1.0, 2.0],
            b: vec![vec![1.0], vec![1.0]],
            beta: 0.25,
            sensor_budget: Some(4.0),
            ap_budgets: Some(vec![25.0, 25.0]),
            region,
            density: DensityModel::Uniform,
        };
        let dep = Deployment::new(
            vec![Point::new(3.0, 3.0), Point::new(7.0, 7.0)],
            vec![Point::new(5.0, 5.0)],
            vec![Some(0), None],
        );
        let grid = DensityGrid::discretize(&region, &DensityModel::Uniform, 20).unwrap();
        let part = assign_cells(&dep, &grid, &sc);
        let svg = render_figure(&dep, &part, &grid, &sc);
        assert_eq!(svg.matches("class=\"range\"").count(), 1);
    }

    #[test]
    fn single_node_figure_has_one_of_each_marker() {
        let region = Region::unit_square_10();
        let sc = Scenario {
            n_aps: 1,
            n_fcs: 1,
            a: vec![1.0],
            b: vec![vec![1.0]],
            beta: 0.25,
            sensor_budget: None,
            ap_budgets: None,
            region,
            density: DensityModel::Uniform,
        };
        let dep = Deployment::new(
            vec![Point::new(4.0, 6.0)],
            vec![Point::new(5.0, 5.0)],
            vec![Some(0)],
        );
        let grid = DensityGrid::discretize(&region, &DensityModel::Uniform, 10).unwrap();
        let part = assign_cells(&dep, &grid, &sc);
        let svg = render_figure(&dep, &part, &grid, &sc);
        assert_eq!(svg.matches("class=\"ap\"").count(), 1);
        assert_eq!(svg.matches("class=\"fc\"").count(), 1);
        assert_eq!(svg.matches("class=\"centroid\"").count(), 1);
    }

    #[test]
    fn one_dimensional_figure_renders_as_strip() {
        let region = Region::interval(0.0, 1.0).unwrap();
        let sc = Scenario {
            n_aps: 2,
            n_fcs: 1,
            a: vec![1.0, 1.0],
            b: vec![vec![1.0], vec![1.0]],
            beta: 1.0,
            sensor_budget: None,
            ap_budgets: None,
            region,
            density: DensityModel::Uniform,
        };
        let dep = Deployment::new(
            vec![Point::on_axis(0.25), Point::on_axis(0.75)],
            vec![Point::on_axis(0.5)],
            vec![Some(0), Some(0)],
        );
        let grid = DensityGrid::discretize(&region, &DensityModel::Uniform, 16).unwrap();
        let part = assign_cells(&dep, &grid, &sc);
        let svg = render_figure(&dep, &part, &grid, &sc);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("class=\"ap\"").count(), 2);
        assert_eq!(svg.matches("class=\"cell\"").count(), 16);
    }
}
