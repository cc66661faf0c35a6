//! Index maps and the generalized Voronoi partition.
//!
//! Cells are computed by direct per-cell argmin of
//! `a_n‖p_n − w‖² + β·b_{n,T(n)}‖p_n − q_{T(n)}‖²` over the participating
//! APs, which is exact on grid centers. The pairwise half-space / disk /
//! disk-complement characterization is kept as an independent geometric
//! oracle: cells of a heterogeneous instance may be non-convex or even
//! disconnected, so rasterizing them directly would be error-prone.
//!
//! Ties are broken toward the smaller AP (or FC) index everywhere, making
//! every assignment deterministic across runs and platforms.

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::model::{Deployment, FcIndex, Partition, Scenario};
use crate::scene::DensityGrid;

/// `T(n) = argmin_m b_{n,m}·‖p_n − q_m‖²`, ties to the smaller index.
///
/// Due to heterogeneity an AP may not connect to its nearest FC.
pub fn optimal_index_map(p: &[Point], q: &[Point], sc: &Scenario) -> Vec<FcIndex> {
    p.iter()
        .enumerate()
        .map(|(n, &pn)| {
            let mut best = 0usize;
            let mut best_cost = f64::INFINITY;
            for (m, &qm) in q.iter().enumerate() {
                let cost = sc.b[n][m] * pn.dist_sq(qm);
                if cost < best_cost {
                    best_cost = cost;
                    best = m;
                }
            }
            Some(best)
        })
        .collect()
}

/// Range-constrained index map: the argmin runs over FCs within uplink
/// range (`‖p_n − q_m‖ ≤ σ_n/√b_{n,m}`); `None` when no FC is reachable.
///
/// Reachability allows the same slack the projections guarantee, so an AP
/// placed exactly on its range boundary stays attached.
pub fn limited_index_map(p: &[Point], q: &[Point], sc: &Scenario) -> Result<Vec<FcIndex>> {
    if sc.ap_budgets.is_none() {
        return Err(Error::Mode("limited index map requires AP budgets".into()));
    }
    Ok(p.iter()
        .enumerate()
        .map(|(n, &pn)| {
            let mut best: FcIndex = None;
            let mut best_cost = f64::INFINITY;
            for (m, &qm) in q.iter().enumerate() {
                let radius = sc.uplink_radius(n, m).expect("budgets checked above");
                if pn.dist(qm) > radius + crate::geom::GEOM_EPS {
                    continue;
                }
                let cost = sc.b[n][m] * pn.dist_sq(qm);
                if cost < best_cost {
                    best_cost = cost;
                    best = Some(m);
                }
            }
            best
        })
        .collect())
}

/// Generalized Voronoi assignment of every grid cell to a participating AP.
///
/// Only APs with an assigned FC participate; with none, every cell is
/// marked uncovered and all volumes are zero (the caller's descent loop can
/// still recover through relocation).
pub fn assign_cells(dep: &Deployment, grid: &DensityGrid, sc: &Scenario) -> Partition {
    let active: Vec<usize> = dep.active_aps().collect();
    let n_aps = dep.p.len();
    if active.is_empty() {
        return Partition {
            assign: vec![None; grid.len()],
            volumes: vec![0.0; n_aps],
            centroids: vec![None; n_aps],
        };
    }
    // constant uplink term of each participating AP
    let uplink: Vec<f64> = active
        .iter()
        .map(|&n| {
            let m = dep.t[n].expect("active AP has an FC");
            sc.beta * sc.b[n][m] * dep.p[n].dist_sq(dep.q[m])
        })
        .collect();

    let assign: Vec<Option<usize>> = grid
        .centers()
        .iter()
        .map(|&w| {
            let mut best = active[0];
            let mut best_cost = f64::INFINITY;
            for (k, &n) in active.iter().enumerate() {
                let cost = sc.a[n] * dep.p[n].dist_sq(w) + uplink[k];
                if cost < best_cost {
                    best_cost = cost;
                    best = n;
                }
            }
            Some(best)
        })
        .collect();

    let (volumes, centroids) = stats_from_assignment(&assign, grid, n_aps);
    Partition {
        assign,
        volumes,
        centroids,
    }
}

/// Cell volumes `v_n = Σ mass` and mass-weighted centroids `c_n`;
/// a centroid is undefined (`None`) when its volume is zero.
pub fn cell_stats(part: &Partition, grid: &DensityGrid) -> (Vec<f64>, Vec<Option<Point>>) {
    let n_aps = part.volumes.len();
    stats_from_assignment(&part.assign, grid, n_aps)
}

fn stats_from_assignment(
    assign: &[Option<usize>],
    grid: &DensityGrid,
    n_aps: usize,
) -> (Vec<f64>, Vec<Option<Point>>) {
    let mut volumes = vec![0.0; n_aps];
    let mut sums = vec![Point::ORIGIN; n_aps];
    for (i, &a) in assign.iter().enumerate() {
        let Some(n) = a else { continue };
        let m = grid.masses()[i];
        volumes[n] += m;
        sums[n] = sums[n] + grid.centers()[i] * m;
    }
    let centroids = volumes
        .iter()
        .zip(&sums)
        .map(|(&v, &s)| if v > 0.0 { Some(s * (1.0 / v)) } else { None })
        .collect();
    (volumes, centroids)
}

/// Pairwise Voronoi region of AP `i` against AP `j`: the set of points
/// where `i`'s weighted cost does not exceed `j`'s, before intersecting
/// with the region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairwiseCell {
    /// `{w : A·w + B ≤ 0}`; arises only for equal sensor weights.
    HalfSpace {
        a: Point,
        b: f64,
    },
    /// Closed disk; the stronger-weighted AP keeps a bounded cell.
    Disk {
        center: Point,
        radius: f64,
    },
    /// Closed complement of an open disk.
    DiskComplement {
        center: Point,
        radius: f64,
    },
    Empty,
    Full,
}

impl PairwiseCell {
    pub fn contains(&self, w: Point) -> bool {
        match *self {
            PairwiseCell::HalfSpace { a, b } => a.dot(w) + b <= 0.0,
            PairwiseCell::Disk { center, radius } => w.dist_sq(center) <= radius * radius,
            PairwiseCell::DiskComplement { center, radius } => w.dist_sq(center) >= radius * radius,
            PairwiseCell::Empty => false,
            PairwiseCell::Full => true,
        }
    }
}

/// Case analysis of the pairwise region between two participating APs.
pub fn pairwise_cell(i: usize, j: usize, dep: &Deployment, sc: &Scenario) -> Result<PairwiseCell> {
    if i == j {
        return Err(Error::Usage("pairwise cell of an AP against itself".into()));
    }
    let (ai, aj) = (sc.a[i], sc.a[j]);
    let (pi, pj) = (dep.p[i], dep.p[j]);
    let gi = uplink_term(i, dep, sc)?;
    let gj = uplink_term(j, dep, sc)?;

    if ai == aj {
        // perpendicular bisector shifted by the uplink terms
        let a = pj * aj - pi * ai;
        let b = (ai * pi.norm_sq() - aj * pj.norm_sq() + gi - gj) / 2.0;
        return Ok(PairwiseCell::HalfSpace { a, b });
    }

    let diff = ai - aj;
    let l = ai * aj * pi.dist_sq(pj) / (diff * diff) - (gi - gj) / diff;
    let center = (pi * ai - pj * aj) * (1.0 / diff);
    let radius = l.max(0.0).sqrt();
    Ok(if ai > aj {
        if l >= 0.0 {
            PairwiseCell::Disk { center, radius }
        } else {
            PairwiseCell::Empty
        }
    } else if l >= 0.0 {
        PairwiseCell::DiskComplement { center, radius }
    } else {
        PairwiseCell::Full
    })
}

fn uplink_term(n: usize, dep: &Deployment, sc: &Scenario) -> Result<f64> {
    let m = dep.t[n]
        .ok_or_else(|| Error::Consistency(format!("pairwise cell requires AP {n} to be active")))?;
    Ok(sc.beta * sc.b[n][m] * dep.p[n].dist_sq(dep.q[m]))
}
