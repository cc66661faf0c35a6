//! Target region, sensor density models and the discretization grid.
//!
//! Every integral in the crate (cell volumes, centroids, powers, coverage)
//! is evaluated by midpoint quadrature on a [`DensityGrid`]: a regular grid
//! of cell centers `w_i` with masses `f(w_i)·Δ`. The rule is deterministic,
//! O(Δ²) accurate and shared by all modules, so two quantities computed on
//! the same grid are always mutually consistent.

use crate::error::{Error, Result};
use crate::geom::Point;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

/// Axis-aligned target region: an interval in 1-D, a rectangle in 2-D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    dim: usize,
    x: (f64, f64),
    /// Unused (0, 0) in 1-D.
    y: (f64, f64),
}

impl Region {
    /// 1-D interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::Config(format!(
                "region interval requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Region {
            dim: 1,
            x: (lo, hi),
            y: (0.0, 0.0),
        })
    }

    /// 2-D rectangle `[xlo, xhi] × [ylo, yhi]`.
    pub fn rect(xlo: f64, xhi: f64, ylo: f64, yhi: f64) -> Result<Self> {
        for (lo, hi) in [(xlo, xhi), (ylo, yhi)] {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::Config(format!(
                    "region requires lo < hi on every axis, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Region {
            dim: 2,
            x: (xlo, xhi),
            y: (ylo, yhi),
        })
    }

    /// `[0, 10]²`, the square used by the built-in presets.
    pub fn unit_square_10() -> Self {
        Region::rect(0.0, 10.0, 0.0, 10.0).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x_bounds(&self) -> (f64, f64) {
        self.x
    }

    pub fn y_bounds(&self) -> (f64, f64) {
        self.y
    }

    /// Lebesgue measure: length in 1-D, area in 2-D.
    pub fn measure(&self) -> f64 {
        let dx = self.x.1 - self.x.0;
        if self.dim == 1 {
            dx
        } else {
            dx * (self.y.1 - self.y.0)
        }
    }

    pub fn contains(&self, w: Point) -> bool {
        let in_x = w.x >= self.x.0 && w.x <= self.x.1;
        if self.dim == 1 {
            in_x
        } else {
            in_x && w.y >= self.y.0 && w.y <= self.y.1
        }
    }

    /// Nearest point of the region (per-axis clamp).
    pub fn clamp(&self, w: Point) -> Point {
        let x = w.x.clamp(self.x.0, self.x.1);
        if self.dim == 1 {
            Point::on_axis(x)
        } else {
            Point::new(x, w.y.clamp(self.y.0, self.y.1))
        }
    }

    /// Corners of the rectangle (2-D) or endpoints of the interval (1-D).
    pub fn corners(&self) -> Vec<Point> {
        if self.dim == 1 {
            vec![Point::on_axis(self.x.0), Point::on_axis(self.x.1)]
        } else {
            vec![
                Point::new(self.x.0, self.y.0),
                Point::new(self.x.0, self.y.1),
                Point::new(self.x.1, self.y.0),
                Point::new(self.x.1, self.y.1),
            ]
        }
    }
}

/// One Gaussian component of a mixture: diagonal covariance only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: [f64; 2],
    /// Per-axis variances (diagonal of the covariance matrix).
    pub var: [f64; 2],
}

/// Sensor density `f` over the region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensityModel {
    /// Constant `1 / measure(Ω)`.
    Uniform,
    /// Weighted sum of bivariate normal densities. Not renormalized over Ω:
    /// mass escaping the region is simply lost to the grid (≤ 2% for the
    /// built-in preset).
    GaussianMixture { components: Vec<GaussianComponent> },
    /// Piecewise-constant density given by a value per grid cell, loaded
    /// from a CSV matrix.
    EmpiricalGrid {
        rows: usize,
        cols: usize,
        bounds: [f64; 4],
        values: Vec<f64>,
    },
}

impl DensityModel {
    pub fn gaussian_mixture(components: Vec<GaussianComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config(
                "gaussian mixture needs at least one component".into(),
            ));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        for c in &components {
            if c.weight <= 0.0 {
                return Err(Error::Config(
                    "gaussian mixture weights must be positive".into(),
                ));
            }
            if c.var[0] <= 0.0 || c.var[1] <= 0.0 {
                return Err(Error::Config("gaussian variances must be positive".into()));
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "gaussian mixture weights must sum to 1, got {total}"
            )));
        }
        Ok(DensityModel::GaussianMixture { components })
    }

    /// Loads an empirical density from a CSV file with a header line
    /// `rows,cols,xmin,xmax,ymin,ymax` followed by `rows` lines of `cols`
    /// comma-separated values (row-major, row 0 at ymin).
    pub fn empirical_from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::empirical_from_csv_str(&text)
    }

    pub fn empirical_from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empirical grid csv is empty".into()))?;
        let head: Vec<&str> = header.split(',').map(str::trim).collect();
        if head.len() != 6 {
            return Err(Error::Config(
                "empirical grid header must be rows,cols,xmin,xmax,ymin,ymax".into(),
            ));
        }
        let rows: usize = head[0]
            .parse()
            .map_err(|_| Error::Config(format!("bad rows value {:?}", head[0])))?;
        let cols: usize = head[1]
            .parse()
            .map_err(|_| Error::Config(format!("bad cols value {:?}", head[1])))?;
        let mut bounds = [0.0; 4];
        for (i, s) in head[2..].iter().enumerate() {
            bounds[i] = s
                .parse()
                .map_err(|_| Error::Config(format!("bad bound value {s:?}")))?;
        }
        if rows == 0 || cols == 0 {
            return Err(Error::Config(
                "empirical grid must have rows, cols >= 1".into(),
            ));
        }
        let mut values = Vec::with_capacity(rows * cols);
        for line in lines {
            for tok in line.split(',') {
                let v: f64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad density value {tok:?}")))?;
                values.push(v);
            }
        }
        if values.len() != rows * cols {
            return Err(Error::Config(format!(
                "empirical grid expects {} values, found {}",
                rows * cols,
                values.len()
            )));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::Config("empirical grid values must be >= 0".into()));
        }
        if !values.iter().any(|&v| v > 0.0) {
            return Err(Error::Config(
                "empirical grid needs at least one positive value".into(),
            ));
        }
        Ok(DensityModel::EmpiricalGrid {
            rows,
            cols,
            bounds,
            values,
        })
    }

    /// Density value `f(w)`. Errors if `w` is outside the region.
    pub fn eval(&self, region: &Region, w: Point) -> Result<f64> {
        if !region.contains(w) {
            return Err(Error::Domain(format!(
                "point ({}, {}) lies outside the region",
                w.x, w.y
            )));
        }
        Ok(match self {
            DensityModel::Uniform => 1.0 / region.measure(),
            DensityModel::GaussianMixture { components } => components
                .iter()
                .map(|c| {
                    let dx = w.x - c.mean[0];
                    let dy = w.y - c.mean[1];
                    let expo = -(dx * dx / (2.0 * c.var[0]) + dy * dy / (2.0 * c.var[1]));
                    c.weight * expo.exp() / (2.0 * PI * (c.var[0] * c.var[1]).sqrt())
                })
                .sum(),
            DensityModel::EmpiricalGrid {
                rows,
                cols,
                bounds,
                values,
            } => {
                let [xmin, xmax, ymin, ymax] = *bounds;
                let fx = ((w.x - xmin) / (xmax - xmin) * *cols as f64).floor();
                let fy = ((w.y - ymin) / (ymax - ymin) * *rows as f64).floor();
                let cx = (fx as usize).min(cols - 1);
                let cy = (fy as usize).min(rows - 1);
                values[cy * cols + cx]
            }
        })
    }
}

/// Discretized density field: midpoint-rule quadrature substrate.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    region: Region,
    resolution: usize,
    nx: usize,
    ny: usize,
    centers: Vec<Point>,
    masses: Vec<f64>,
    cell_measure: f64,
}

impl DensityGrid {
    /// Midpoint-rule grid with `resolution` cells per axis.
    /// `masses[i] = f(center_i) · Δ` where `Δ` is the cell measure.
    pub fn discretize(region: &Region, model: &DensityModel, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::Config(format!(
                "grid resolution must be >= 2, got {resolution}"
            )));
        }
        let (xlo, xhi) = region.x_bounds();
        let nx = resolution;
        let ny = if region.dim() == 1 { 1 } else { resolution };
        let dx = (xhi - xlo) / nx as f64;
        let (dy, ylo) = if region.dim() == 1 {
            (1.0, 0.0)
        } else {
            let (ylo, yhi) = region.y_bounds();
            ((yhi - ylo) / ny as f64, ylo)
        };
        let cell_measure = if region.dim() == 1 { dx } else { dx * dy };

        let mut centers = Vec::with_capacity(nx * ny);
        let mut masses = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                let w = if region.dim() == 1 {
                    Point::on_axis(xlo + (ix as f64 + 0.5) * dx)
                } else {
                    Point::new(xlo + (ix as f64 + 0.5) * dx, ylo + (iy as f64 + 0.5) * dy)
                };
                let f = model.eval(region, w)?;
                centers.push(w);
                masses.push(f * cell_measure);
            }
        }
        if !masses.iter().any(|&m| m > 0.0) {
            return Err(Error::Config(
                "discretized density has zero total mass".into(),
            ));
        }
        Ok(DensityGrid {
            region: *region,
            resolution,
            nx,
            ny,
            centers,
            masses,
            cell_measure,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Midpoint-rule integral `Σ_i weight(w_i) · mass_i`.
    pub fn moment(&self, mut weight: impl FnMut(Point) -> f64) -> f64 {
        self.centers
            .iter()
            .zip(&self.masses)
            .map(|(&w, &m)| weight(w) * m)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_interval() -> Region {
        Region::interval(0.0, 1.0).unwrap()
    }

    /// The Gaussian mixture used by the built-in presets.
    pub(crate) fn preset_mixture() -> DensityModel {
        DensityModel::gaussian_mixture(vec![
            GaussianComponent {
                weight: 0.5,
                mean: [3.0, 3.0],
                var: [1.5, 1.5],
            },
            GaussianComponent {
                weight: 0.25,
                mean: [6.0, 7.0],
                var: [2.0, 2.0],
            },
            GaussianComponent {
                weight: 0.25,
                mean: [7.5, 2.5],
                var: [1.0, 1.0],
            },
        ])
        .unwrap()
    }

    #[test]
    fn uniform_density_on_square() {
        let r = Region::unit_square_10();
        let f = DensityModel::Uniform
            .eval(&r, Point::new(5.0, 5.0))
            .unwrap();
        assert!((f - 0.01).abs() < 1e-15);
    }

    #[test]
    fn uniform_density_on_interval_is_one() {
        let r = unit_interval();
        let f = DensityModel::Uniform
            .eval(&r, Point::on_axis(0.37))
            .unwrap();
        assert!((f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixture_density_at_first_mean() {
        // hand-summed value of the three components at (3, 3)
        let r = Region::unit_square_10();
        let f = preset_mixture().eval(&r, Point::new(3.0, 3.0)).unwrap();
        assert!((f - 0.05309145969233148).abs() < 1e-12, "f = {f}");
    }

    #[test]
    fn eval_outside_region_is_domain_error() {
        let r = Region::unit_square_10();
        let err = DensityModel::Uniform
            .eval(&r, Point::new(11.0, 5.0))
            .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn mixture_is_positive_everywhere() {
        let r = Region::unit_square_10();
        let m = preset_mixture();
        let mut state = 88172645463325252u64;
        for _ in 0..500 {
            // xorshift, just to scatter sample points
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let x = (state % 10_000) as f64 / 1000.0;
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let y = (state % 10_000) as f64 / 1000.0;
            assert!(m.eval(&r, Point::new(x, y)).unwrap() > 0.0);
        }
    }

    #[test]
    fn discretize_uniform_square() {
        let r = Region::unit_square_10();
        let g = DensityGrid::discretize(&r, &DensityModel::Uniform, 100).unwrap();
        assert_eq!(g.len(), 10_000);
        for &m in g.masses() {
            assert!((m - 1e-4).abs() < 1e-15);
        }
        assert!((g.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discretize_uniform_interval_res4() {
        let r = unit_interval();
        let g = DensityGrid::discretize(&r, &DensityModel::Uniform, 4).unwrap();
        assert_eq!(g.masses(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn discretize_rejects_resolution_below_two() {
        let r = unit_interval();
        let err = DensityGrid::discretize(&r, &DensityModel::Uniform, 1).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn mixture_truncated_mass() {
        // exact truncated mass of the preset mixture over [0,10]^2 is 0.98496...
        let r = Region::unit_square_10();
        let g = DensityGrid::discretize(&r, &preset_mixture(), 100).unwrap();
        let total = g.total_mass();
        assert!((0.98..=1.0).contains(&total), "total = {total}");
        assert!((total - 0.9849629736433809).abs() < 1e-3);
    }

    #[test]
    fn discretize_empirical_grid() {
        // 2x2 piecewise-constant density sampled on a matching 4x4 grid
        let csv = "2,2,0,1,0,1\n1.0,2.0\n3.0,4.0\n";
        let m = DensityModel::empirical_from_csv_str(csv).unwrap();
        let r = Region::rect(0.0, 1.0, 0.0, 1.0).unwrap();
        let g = DensityGrid::discretize(&r, &m, 4).unwrap();
        // each source cell covers four grid cells of measure 1/16
        let expect = (1.0 + 2.0 + 3.0 + 4.0) * 4.0 / 16.0;
        assert!((g.total_mass() - expect).abs() < 1e-12);
        assert!((g.masses()[0] - 1.0 / 16.0).abs() < 1e-12);
        assert!((g.masses()[15] - 4.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn moment_of_constant_weight_is_total_mass() {
        let r = Region::unit_square_10();
        let g = DensityGrid::discretize(&r, &DensityModel::Uniform, 100).unwrap();
        assert!((g.moment(|_| 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moment_variance_of_uniform_interval() {
        let r = unit_interval();
        let g = DensityGrid::discretize(&r, &DensityModel::Uniform, 2000).unwrap();
        let v = g.moment(|w| (w.x - 0.5) * (w.x - 0.5));
        assert!((v - 1.0 / 12.0).abs() < 1e-7, "v = {v}");
    }

    #[test]
    fn moment_halfspace_indicator() {
        let r = Region::unit_square_10();
        let g = DensityGrid::discretize(&r, &DensityModel::Uniform, 100).unwrap();
        let v = g.moment(|w| if w.x < 5.0 { 1.0 } else { 0.0 });
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn refinement_error_is_second_order() {
        // midpoint-rule error for a smooth weight shrinks ~4x per 2x refinement
        let r = unit_interval();
        let exact = 1.0 / 12.0;
        let mut errs = Vec::new();
        for res in [50, 100, 200] {
            let g = DensityGrid::discretize(&r, &DensityModel::Uniform, res).unwrap();
            errs.push((g.moment(|w| (w.x - 0.5) * (w.x - 0.5)) - exact).abs());
        }
        for pair in errs.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((3.0..5.0).contains(&ratio), "ratio = {ratio}");
        }
    }

    #[test]
    fn empirical_grid_round_trip() {
        let csv = "2,2,0,1,0,1\n1.0,2.0\n3.0,4.0\n";
        let m = DensityModel::empirical_from_csv_str(csv).unwrap();
        let r = Region::rect(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(m.eval(&r, Point::new(0.25, 0.25)).unwrap(), 1.0);
        assert_eq!(m.eval(&r, Point::new(0.75, 0.25)).unwrap(), 2.0);
        assert_eq!(m.eval(&r, Point::new(0.25, 0.75)).unwrap(), 3.0);
        assert_eq!(m.eval(&r, Point::new(1.0, 1.0)).unwrap(), 4.0);
    }

    #[test]
    fn empirical_grid_rejects_negative_values() {
        let csv = "1,2,0,1,0,1\n1.0,-2.0\n";
        assert!(matches!(
            DensityModel::empirical_from_csv_str(csv),
            Err(Error::Config(_))
        ));
    }
}
