//! The HTTL four-step descent loop and its range-constrained variant.
//!
//! One iteration of HTTL: (i) refresh the index map, (ii) recompute the
//! generalized Voronoi partition with volumes and centroids, (iii) move
//! every non-idle FC to the weighted mean of its attached APs and relocate
//! idle FCs randomly, (iv) move every AP onto the segment between its cell
//! centroid and its FC. Limited-HTTL runs the same loop with the
//! range-restricted index map, projects both node kinds back into their
//! desired regions, and randomly moves APs that lost all reachable FCs.
//!
//! All randomness flows through one seeded generator: a
//! (seed, scenario, resolution) triple fully determines a trace.

use crate::error::{not_positive, Error, Result};
use crate::geom::{Point, GEOM_EPS};
use crate::model::{Deployment, FcIndex, Partition, PowerReport, Scenario};
use crate::partition::{assign_cells, limited_index_map, optimal_index_map};
use crate::scene::{DensityGrid, Region};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimOptions {
    /// Stop once the relative power improvement drops below this threshold.
    pub epsilon: f64,
    /// Hard iteration cap per run.
    pub max_iters: usize,
    /// Base RNG seed; restart `k` derives seed + k.
    pub seed: u64,
    /// Number of random initializations.
    pub restarts: usize,
}

impl Default for OptimOptions {
    fn default() -> Self {
        OptimOptions {
            epsilon: 1e-6,
            max_iters: 100,
            seed: 0,
            restarts: 10,
        }
    }
}

impl OptimOptions {
    pub fn validate(&self) -> Result<()> {
        if not_positive(self.epsilon) {
            return Err(Error::Config(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if self.restarts < 1 {
            return Err(Error::Config("restarts must be >= 1".into()));
        }
        Ok(())
    }
}

/// One recorded iterate.
#[derive(Debug, Clone)]
pub struct IterRecord {
    pub deployment: Deployment,
    pub report: PowerReport,
    /// True when this iteration moved a node randomly (idle FC, or an
    /// unassigned AP in limited mode). The power recorded one iteration
    /// later may then rise, since the refreshed partition first sees the
    /// moved node there.
    pub relocated: bool,
}

/// Full history of one run.
#[derive(Debug, Clone)]
pub struct RunTrace {
    /// Entry 0 is the evaluated initial deployment; one entry per iteration after.
    pub iters: Vec<IterRecord>,
    pub converged: bool,
}

impl RunTrace {
    pub fn final_record(&self) -> &IterRecord {
        self.iters
            .last()
            .expect("trace always has the initial record")
    }

    /// Iterations executed after the initial evaluation.
    pub fn iterations_used(&self) -> usize {
        self.iters.len() - 1
    }

    /// Whether the power comparison `iters[k-1] -> iters[k]` is exempt from
    /// the descent guarantee: a random relocation in either iteration can
    /// raise the recorded power once the partition catches up with the move.
    pub fn descent_exempt(&self, k: usize) -> bool {
        debug_assert!(k >= 1 && k < self.iters.len());
        self.iters[k].relocated || self.iters[k - 1].relocated
    }

    /// Per-iteration CSV: `iter,sensor_power,ap_power,two_tier_power,coverage`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,sensor_power,ap_power,two_tier_power,coverage\n");
        for (k, rec) in self.iters.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                k,
                rec.report.sensor_power,
                rec.report.ap_power,
                rec.report.two_tier_power,
                rec.report.coverage
            ));
        }
        out
    }
}

/// Optimal AP position for fixed partition and FC: the convex combination
/// `(a_n·c_n + β·b_{n,m}·q) / (a_n + β·b_{n,m})`, a point on the segment
/// from the cell centroid to the FC.
///
/// When the cell is empty (`centroid = None`) the AP's current position
/// stands in for the centroid, so the update still pulls the idle AP toward
/// its FC without increasing power (its cell contributes none).
pub fn ap_update(
    centroid: Option<Point>,
    current: Point,
    q: Point,
    n: usize,
    m: usize,
    sc: &Scenario,
) -> Point {
    let c = centroid.unwrap_or(current);
    let bw = sc.beta * sc.b[n][m];
    (c * sc.a[n] + q * bw) * (1.0 / (sc.a[n] + bw))
}

/// Optimal FC position for fixed APs: weighted mean
/// `Σ b_{n,m}·v_n·p_n / Σ b_{n,m}·v_n` over attached APs.
/// A zero denominator signals an idle FC; the caller must relocate it.
pub fn fc_update(
    p: &[Point],
    volumes: &[f64],
    t: &[FcIndex],
    m: usize,
    sc: &Scenario,
) -> Result<Point> {
    let mut num = Point::ORIGIN;
    let mut den = 0.0;
    for (n, &tn) in t.iter().enumerate() {
        if tn == Some(m) {
            let w = sc.b[n][m] * volumes[n];
            num = num + p[n] * w;
            den += w;
        }
    }
    if den > 0.0 {
        Ok(num * (1.0 / den))
    } else {
        Err(Error::IdleFc(m))
    }
}

/// New position for an idle FC: pick a donor FC with probability
/// proportional to its attached-AP count, then a cell of the donor's
/// region with probability proportional to cell mass, and return that
/// cell's center.
///
/// Falls back to a uniform random point of the region when no FC has
/// attached APs, or to a uniform cell choice when the donor region
/// carries no mass.
pub fn relocate_idle_fc(
    t: &[FcIndex],
    part: &Partition,
    grid: &DensityGrid,
    n_fcs: usize,
    rng: &mut StdRng,
) -> Point {
    let counts: Vec<usize> = (0..n_fcs)
        .map(|m| t.iter().filter(|&&tn| tn == Some(m)).count())
        .collect();
    let total: usize = counts.iter().sum();
    if total == 0 {
        return uniform_point(grid.region(), rng);
    }
    let mut pick = rng.gen_range(0..total);
    let mut donor = 0;
    for (m, &c) in counts.iter().enumerate() {
        if pick < c {
            donor = m;
            break;
        }
        pick -= c;
    }

    let cells: Vec<usize> = part
        .assign
        .iter()
        .enumerate()
        .filter_map(|(i, &a)| {
            let n = a?;
            (t[n] == Some(donor)).then_some(i)
        })
        .collect();
    if cells.is_empty() {
        return uniform_point(grid.region(), rng);
    }
    let mass: f64 = cells.iter().map(|&i| grid.masses()[i]).sum();
    if mass <= 0.0 {
        let i = cells[rng.gen_range(0..cells.len())];
        return grid.centers()[i];
    }
    let mut ticket = rng.gen_range(0.0..mass);
    for &i in &cells {
        ticket -= grid.masses()[i];
        if ticket <= 0.0 {
            return grid.centers()[i];
        }
    }
    grid.centers()[*cells.last().expect("nonempty")]
}

pub fn uniform_point(region: &Region, rng: &mut StdRng) -> Point {
    let (xlo, xhi) = region.x_bounds();
    let x = rng.gen_range(xlo..xhi);
    if region.dim() == 1 {
        Point::on_axis(x)
    } else {
        let (ylo, yhi) = region.y_bounds();
        Point::new(x, rng.gen_range(ylo..yhi))
    }
}

/// Closest point to `target` in the AP's desired region
/// `B(q, radius) ∩ Ω`, by exact candidate enumeration.
///
/// Candidates: the target itself, its radial projection onto the disk
/// boundary, its clamp onto Ω, and the disk/edge intersection points.
/// Ties break toward the lexicographically smaller point.
pub fn project_ap(target: Point, q: Point, radius: f64, region: &Region) -> Result<Point> {
    project_onto_disks(target, &[(q, radius)], region).map_err(|_| {
        Error::InfeasibleProjection(format!(
            "desired region of radius {radius} around ({}, {}) misses the region",
            q.x, q.y
        ))
    })
}

/// Closest point to `target` in `∩_n B(p_n, r_n) ∩ Ω` via finite candidate
/// enumeration (projections onto each disk, pairwise circle intersections,
/// circle/edge intersections, region corners and clamp).
///
/// Errors when no candidate is feasible; the caller then refreshes the
/// index map, which shrinks the attachment set.
pub fn project_fc(target: Point, disks: &[(Point, f64)], region: &Region) -> Result<Point> {
    if disks.is_empty() {
        return Ok(region.clamp(target));
    }
    project_onto_disks(target, disks, region)
        .map_err(|_| Error::InfeasibleProjection("disk intersection is empty".into()))
}

fn project_onto_disks(target: Point, disks: &[(Point, f64)], region: &Region) -> Result<Point> {
    if region.dim() == 1 {
        // every disk is an interval: intersect and clamp
        let (mut lo, mut hi) = region.x_bounds();
        for &(c, r) in disks {
            lo = lo.max(c.x - r);
            hi = hi.min(c.x + r);
        }
        if lo > hi + GEOM_EPS {
            return Err(Error::InfeasibleProjection("empty interval".into()));
        }
        return Ok(Point::on_axis(target.x.clamp(lo, hi.max(lo))));
    }

    let (xlo, xhi) = region.x_bounds();
    let (ylo, yhi) = region.y_bounds();
    let feasible = |w: Point| -> bool {
        w.x >= xlo - GEOM_EPS
            && w.x <= xhi + GEOM_EPS
            && w.y >= ylo - GEOM_EPS
            && w.y <= yhi + GEOM_EPS
            && disks.iter().all(|&(c, r)| w.dist(c) <= r + GEOM_EPS)
    };

    let mut candidates: Vec<Point> = Vec::with_capacity(8 + 6 * disks.len());
    candidates.push(target);
    candidates.push(region.clamp(target));
    candidates.extend(region.corners());
    for &(c, r) in disks {
        // radial projection of the target onto this disk's boundary
        let d = target.dist(c);
        if d > 0.0 {
            candidates.push(c + (target - c) * (r / d));
        }
        candidates.extend(circle_edge_intersections(c, r, region));
    }
    for (i, &(c1, r1)) in disks.iter().enumerate() {
        for &(c2, r2) in &disks[i + 1..] {
            candidates.extend(circle_circle_intersections(c1, r1, c2, r2));
        }
    }

    let mut best: Option<Point> = None;
    let mut best_d = f64::INFINITY;
    for w in candidates {
        if !w.is_finite() || !feasible(w) {
            continue;
        }
        let d = target.dist_sq(w);
        let better = match best {
            None => true,
            Some(b) => {
                d < best_d - 1e-12
                    || ((d - best_d).abs() <= 1e-12 && w.lex_cmp(b) == std::cmp::Ordering::Less)
            }
        };
        if better {
            best = Some(w);
            best_d = d;
        }
    }
    best.ok_or_else(|| Error::InfeasibleProjection("no feasible candidate".into()))
}

/// Intersections of the circle `‖w − c‖ = r` with the rectangle edges.
fn circle_edge_intersections(c: Point, r: f64, region: &Region) -> Vec<Point> {
    let (xlo, xhi) = region.x_bounds();
    let (ylo, yhi) = region.y_bounds();
    let mut out = Vec::new();
    for x in [xlo, xhi] {
        let h2 = r * r - (x - c.x) * (x - c.x);
        if h2 >= 0.0 {
            let h = h2.sqrt();
            for y in [c.y - h, c.y + h] {
                if y >= ylo - GEOM_EPS && y <= yhi + GEOM_EPS {
                    out.push(Point::new(x, y.clamp(ylo, yhi)));
                }
            }
        }
    }
    for y in [ylo, yhi] {
        let h2 = r * r - (y - c.y) * (y - c.y);
        if h2 >= 0.0 {
            let h = h2.sqrt();
            for x in [c.x - h, c.x + h] {
                if x >= xlo - GEOM_EPS && x <= xhi + GEOM_EPS {
                    out.push(Point::new(x.clamp(xlo, xhi), y));
                }
            }
        }
    }
    out
}

/// Intersection points of two circles; empty when disjoint, nested or
/// concentric.
fn circle_circle_intersections(c1: Point, r1: f64, c2: Point, r2: f64) -> Vec<Point> {
    let d = c1.dist(c2);
    if d == 0.0 {
        return Vec::new();
    }
    let along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h2 = r1 * r1 - along * along;
    if h2 < 0.0 {
        return Vec::new();
    }
    let h = h2.max(0.0).sqrt();
    let dir = (c2 - c1) * (1.0 / d);
    let base = c1 + dir * along;
    let off = dir.perp() * h;
    vec![base + off, base - off]
}

/// Unconstrained descent. Any index map in `init` is ignored; it is
/// initialized from the optimal map before the first evaluation.
pub fn run_httl(
    sc: &Scenario,
    grid: &DensityGrid,
    init: &Deployment,
    opts: &OptimOptions,
) -> Result<RunTrace> {
    run_loop(sc, grid, init, opts, Mode::Unconstrained)
}

/// Range-constrained descent with projections and idle-node relocation.
pub fn run_limited_httl(
    sc: &Scenario,
    grid: &DensityGrid,
    init: &Deployment,
    opts: &OptimOptions,
) -> Result<RunTrace> {
    if !sc.limited() {
        return Err(Error::Mode("limited descent requires power budgets".into()));
    }
    run_loop(sc, grid, init, opts, Mode::Limited)
}

/// Seeded uniform initialization plus a single descent run.
pub fn run_from_seed(
    sc: &Scenario,
    grid: &DensityGrid,
    opts: &OptimOptions,
    seed: u64,
    limited: bool,
) -> Result<RunTrace> {
    let mut rng = StdRng::seed_from_u64(seed);
    let p: Vec<Point> = (0..sc.n_aps)
        .map(|_| uniform_point(&sc.region, &mut rng))
        .collect();
    let q: Vec<Point> = (0..sc.n_fcs)
        .map(|_| uniform_point(&sc.region, &mut rng))
        .collect();
    let init = Deployment::new(p, q, vec![None; sc.n_aps]);
    let mut o = *opts;
    o.seed = seed;
    if limited {
        run_limited_httl(sc, grid, &init, &o)
    } else {
        run_httl(sc, grid, &init, &o)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Unconstrained,
    Limited,
}

fn index_map(p: &[Point], q: &[Point], sc: &Scenario, mode: Mode) -> Result<Vec<FcIndex>> {
    match mode {
        Mode::Unconstrained => Ok(optimal_index_map(p, q, sc)),
        Mode::Limited => limited_index_map(p, q, sc),
    }
}

fn run_loop(
    sc: &Scenario,
    grid: &DensityGrid,
    init: &Deployment,
    opts: &OptimOptions,
    mode: Mode,
) -> Result<RunTrace> {
    opts.validate()?;
    sc.validate()?;
    let mut rng = StdRng::seed_from_u64(opts.seed);

    let mut p = init.p.clone();
    let mut q = init.q.clone();
    let mut t = index_map(&p, &q, sc, mode)?;
    let mut dep = Deployment::new(p.clone(), q.clone(), t.clone());
    let mut part = assign_cells(&dep, grid, sc);
    let mut report = PowerReport::compute(&dep, &part, grid, sc)?;

    let mut iters = vec![IterRecord {
        deployment: dep,
        report,
        relocated: false,
    }];
    let mut converged = false;

    for _ in 0..opts.max_iters {
        let power_old = report.two_tier_power;
        let mut relocated = false;

        // (i) index map
        t = index_map(&p, &q, sc, mode)?;
        // (ii) partition, volumes, centroids
        dep = Deployment::new(p.clone(), q.clone(), t.clone());
        part = assign_cells(&dep, grid, sc);

        // (iii) FC moves
        for (m, qm) in q.iter_mut().enumerate() {
            match fc_update(&p, &part.volumes, &t, m, sc) {
                Ok(target) => {
                    *qm = match mode {
                        Mode::Unconstrained => target,
                        Mode::Limited => {
                            let disks: Vec<(Point, f64)> = t
                                .iter()
                                .enumerate()
                                .filter(|&(_, &tn)| tn == Some(m))
                                .map(|(n, _)| Ok((p[n], sc.uplink_radius(n, m)?)))
                                .collect::<Result<_>>()?;
                            // the previous position is feasible, so the
                            // projection cannot come back empty
                            project_fc(target, &disks, &sc.region).unwrap_or(*qm)
                        }
                    };
                }
                Err(Error::IdleFc(_)) => {
                    *qm = relocate_idle_fc(&t, &part, grid, sc.n_fcs, &mut rng);
                    relocated = true;
                }
                Err(e) => return Err(e),
            }
        }

        // (iv) AP moves
        for n in 0..sc.n_aps {
            match t[n] {
                Some(m) => {
                    let target = ap_update(part.centroids[n], p[n], q[m], n, m, sc);
                    p[n] = match mode {
                        Mode::Unconstrained => target,
                        Mode::Limited => {
                            project_ap(target, q[m], sc.uplink_radius(n, m)?, &sc.region)?
                        }
                    };
                }
                None => {
                    debug_assert!(mode == Mode::Limited);
                    p[n] = uniform_point(&sc.region, &mut rng);
                    relocated = true;
                }
            }
        }

        // evaluate the moved nodes against this iteration's partition
        dep = Deployment::new(p.clone(), q.clone(), t.clone());
        report = PowerReport::compute(&dep, &part, grid, sc)?;
        iters.push(IterRecord {
            deployment: dep,
            report,
            relocated,
        });

        // stop once relative improvement falls below epsilon; with zero
        // reference power there is nothing to measure yet (limited mode
        // before any AP activates), so keep iterating
        if power_old > 0.0 {
            let improvement = (power_old - report.two_tier_power) / power_old;
            if improvement < opts.epsilon {
                converged = true;
                break;
            }
        }
    }

    Ok(RunTrace { iters, converged })
}

/// Best-of-restarts driver. Returns one trace per restart, in restart order;
/// restart `k` runs with seed `opts.seed + k`.
pub fn run_restarts(
    sc: &Scenario,
    grid: &DensityGrid,
    opts: &OptimOptions,
    limited: bool,
) -> Result<Vec<RunTrace>> {
    (0..opts.restarts)
        .map(|k| run_from_seed(sc, grid, opts, opts.seed + k as u64, limited))
        .collect()
}

/// Index of the best restart: minimum final power in unconstrained mode;
/// maximum coverage (ties toward lower power) in limited mode, since
/// coverage is the headline metric there.
pub fn best_restart(traces: &[RunTrace], limited: bool) -> usize {
    assert!(!traces.is_empty());
    let mut best = 0;
    for k in 1..traces.len() {
        let cand = traces[k].final_record().report;
        let cur = traces[best].final_record().report;
        let better = if limited {
            cand.coverage > cur.coverage
                || (cand.coverage == cur.coverage && cand.two_tier_power < cur.two_tier_power)
        } else {
            cand.two_tier_power < cur.two_tier_power
        };
        if better {
            best = k;
        }
    }
    best
}
