//! Problem constants and the power/coverage objectives.
//!
//! The two-tier objective combines the sensors' transmission power (squared
//! distance to their AP, weighted per AP) and the APs' uplink power (squared
//! distance to their FC, weighted per AP/FC pair) through the multiplier β.

use crate::error::{not_positive, Error, Result};
use crate::geom::Point;
use crate::scene::{DensityGrid, DensityModel, Region};
use serde::{Deserialize, Serialize};

/// All problem constants of one deployment instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub n_aps: usize,
    pub n_fcs: usize,
    /// Sensor-side weight `a_n` per AP (power per squared meter).
    pub a: Vec<f64>,
    /// AP-side weight matrix `b[n][m]`, N rows of M columns.
    pub b: Vec<Vec<f64>>,
    /// Lagrangian multiplier β ≥ 0 combining the two powers.
    pub beta: f64,
    /// Sensor power budget σ²; present only in limited (range-constrained) mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensor_budget: Option<f64>,
    /// Per-AP power budget σ_n²; present only in limited mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ap_budgets: Option<Vec<f64>>,
    pub region: Region,
    pub density: DensityModel,
}

impl Scenario {
    /// Validates every invariant; call after construction or deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.n_fcs < 1 {
            return Err(Error::Config("n_fcs must be >= 1".into()));
        }
        if self.n_aps < self.n_fcs {
            return Err(Error::Config(format!(
                "n_aps ({}) must be >= n_fcs ({})",
                self.n_aps, self.n_fcs
            )));
        }
        if self.a.len() != self.n_aps {
            return Err(Error::Config(format!(
                "a must have {} entries, got {}",
                self.n_aps,
                self.a.len()
            )));
        }
        if let Some((n, &v)) = self.a.iter().enumerate().find(|(_, &v)| not_positive(v)) {
            return Err(Error::Config(format!("a[{n}] must be positive, got {v}")));
        }
        if self.b.len() != self.n_aps {
            return Err(Error::Config(format!(
                "b must have {} rows, got {}",
                self.n_aps,
                self.b.len()
            )));
        }
        for (n, row) in self.b.iter().enumerate() {
            if row.len() != self.n_fcs {
                return Err(Error::Config(format!(
                    "b[{n}] must have {} entries, got {}",
                    self.n_fcs,
                    row.len()
                )));
            }
            if let Some((m, &v)) = row.iter().enumerate().find(|(_, &v)| not_positive(v)) {
                return Err(Error::Config(format!(
                    "b[{n}][{m}] must be positive, got {v}"
                )));
            }
        }
        if self.beta.is_nan() || self.beta < 0.0 {
            return Err(Error::Config(format!(
                "beta must be >= 0, got {}",
                self.beta
            )));
        }
        match (&self.sensor_budget, &self.ap_budgets) {
            (None, None) => {}
            (Some(s), Some(aps)) => {
                if not_positive(*s) {
                    return Err(Error::Config(format!(
                        "sensor_budget must be positive, got {s}"
                    )));
                }
                if aps.len() != self.n_aps {
                    return Err(Error::Config(format!(
                        "ap_budgets must have {} entries, got {}",
                        self.n_aps,
                        aps.len()
                    )));
                }
                if let Some((n, &v)) = aps.iter().enumerate().find(|(_, &v)| not_positive(v)) {
                    return Err(Error::Config(format!(
                        "ap_budgets[{n}] must be positive, got {v}"
                    )));
                }
            }
            _ => {
                return Err(Error::Config(
                    "sensor_budget and ap_budgets must be both present (limited mode) \
                     or both absent (unconstrained mode)"
                        .into(),
                ));
            }
        }
        Ok(())
    }

    /// Range-constrained mode: both power budgets present.
    pub fn limited(&self) -> bool {
        self.sensor_budget.is_some() && self.ap_budgets.is_some()
    }

    /// Sensing radius `σ / √a_n` of AP `n`; requires the sensor budget.
    pub fn sensing_radius(&self, n: usize) -> Result<f64> {
        let s2 = self
            .sensor_budget
            .ok_or_else(|| Error::Mode("sensing radius requires a sensor budget".into()))?;
        Ok((s2 / self.a[n]).sqrt())
    }

    /// Uplink radius `σ_n / √b_{n,m}` of the AP n – FC m link; requires AP budgets.
    pub fn uplink_radius(&self, n: usize, m: usize) -> Result<f64> {
        let budgets = self
            .ap_budgets
            .as_ref()
            .ok_or_else(|| Error::Mode("uplink radius requires AP budgets".into()))?;
        Ok((budgets[n] / self.b[n][m]).sqrt())
    }
}

/// AP index assigned to a fusion center, or unassigned (out of range).
pub type FcIndex = Option<usize>;

/// Positions of all nodes plus the AP→FC index map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    /// AP positions, length N.
    pub p: Vec<Point>,
    /// FC positions, length M.
    pub q: Vec<Point>,
    /// `t[n] = Some(m)` when AP n forwards to FC m; `None` only in limited mode.
    pub t: Vec<FcIndex>,
}

impl Deployment {
    pub fn new(p: Vec<Point>, q: Vec<Point>, t: Vec<FcIndex>) -> Self {
        Deployment { p, q, t }
    }

    /// APs with an assigned FC.
    pub fn active_aps(&self) -> impl Iterator<Item = usize> + '_ {
        self.t.iter().enumerate().filter_map(|(n, t)| t.map(|_| n))
    }

    /// JSON export `{"p": [[x,y],...], "q": [[x,y],...], "t": [...]}`
    /// with 0-based FC indices and -1 for unassigned APs.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Wire {
            p: Vec<[f64; 2]>,
            q: Vec<[f64; 2]>,
            t: Vec<i64>,
        }
        let wire = Wire {
            p: self.p.iter().map(|pt| [pt.x, pt.y]).collect(),
            q: self.q.iter().map(|pt| [pt.x, pt.y]).collect(),
            t: self
                .t
                .iter()
                .map(|t| t.map(|m| m as i64).unwrap_or(-1))
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("deployment serialization cannot fail")
    }
}

/// Per-grid-cell AP assignment with derived cell volumes and centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// AP index per grid cell; `None` marks an uncovered cell (no active AP).
    pub assign: Vec<Option<usize>>,
    /// Mass `v_n` of each AP's cell.
    pub volumes: Vec<f64>,
    /// Mass-weighted centroid `c_n`, or `None` when `v_n = 0`.
    pub centroids: Vec<Option<Point>>,
}

/// All power figures of one (deployment, partition) snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub sensor_power: f64,
    pub ap_power: f64,
    pub two_tier_power: f64,
    /// Mass fraction within sensing range of an active AP (limited mode),
    /// or the assigned-mass fraction (unconstrained mode).
    pub coverage: f64,
}

/// Sensor-side power: `Σ_cells a_{assign} · ‖p_{assign} − w‖² · mass`.
/// Uncovered cells contribute zero.
pub fn sensor_power(
    dep: &Deployment,
    part: &Partition,
    grid: &DensityGrid,
    sc: &Scenario,
) -> Result<f64> {
    let mut total = 0.0;
    for (i, &assign) in part.assign.iter().enumerate() {
        let Some(n) = assign else { continue };
        if n >= sc.n_aps {
            return Err(Error::Consistency(format!(
                "partition references AP {n} but the scenario has {}",
                sc.n_aps
            )));
        }
        total += sc.a[n] * dep.p[n].dist_sq(grid.centers()[i]) * grid.masses()[i];
    }
    Ok(total)
}

/// AP-side power: `Σ_n b_{n,T(n)} · ‖p_n − q_{T(n)}‖² · v_n`.
pub fn ap_power(dep: &Deployment, part: &Partition, sc: &Scenario) -> Result<f64> {
    let mut total = 0.0;
    for (n, &v) in part.volumes.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let Some(m) = dep.t[n] else {
            return Err(Error::Consistency(format!(
                "AP {n} owns mass but has no assigned fusion center"
            )));
        };
        total += sc.b[n][m] * dep.p[n].dist_sq(dep.q[m]) * v;
    }
    Ok(total)
}

/// Mass fraction of the grid within sensing range `σ/√a_n` of at least one
/// active AP, normalized by total grid mass. Requires the sensor budget.
pub fn coverage(dep: &Deployment, grid: &DensityGrid, sc: &Scenario) -> Result<f64> {
    let s2 = sc
        .sensor_budget
        .ok_or_else(|| Error::Mode("coverage requires a sensor budget".into()))?;
    let active: Vec<usize> = dep.active_aps().collect();
    if active.is_empty() {
        return Ok(0.0);
    }
    let mut covered = 0.0;
    for (i, &w) in grid.centers().iter().enumerate() {
        let hit = active.iter().any(|&n| sc.a[n] * dep.p[n].dist_sq(w) <= s2);
        if hit {
            covered += grid.masses()[i];
        }
    }
    Ok(covered / grid.total_mass())
}

impl PowerReport {
    /// Evaluates all three powers plus coverage for one snapshot.
    ///
    /// In limited mode, coverage follows the sensing-disk definition; in
    /// unconstrained mode it is the assigned-mass fraction (1 whenever at
    /// least one AP participates).
    pub fn compute(
        dep: &Deployment,
        part: &Partition,
        grid: &DensityGrid,
        sc: &Scenario,
    ) -> Result<PowerReport> {
        let sensor = sensor_power(dep, part, grid, sc)?;
        let ap = ap_power(dep, part, sc)?;
        let cov = if sc.limited() {
            coverage(dep, grid, sc)?
        } else {
            let assigned: f64 = part
                .assign
                .iter()
                .zip(grid.masses())
                .filter_map(|(a, &m)| a.map(|_| m))
                .sum();
            assigned / grid.total_mass()
        };
        Ok(PowerReport {
            sensor_power: sensor,
            ap_power: ap,
            two_tier_power: sensor + sc.beta * ap,
            coverage: cov,
        })
    }
}
