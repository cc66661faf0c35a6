//! Closed-form solutions for small instances, used as independent oracles:
//! the two-AP/one-FC optimum on `[0,1]`, the fixed-partition and closed-form
//! AP–Sensor power functions, the brute-force one-tier distortion `D_K`, and
//! the β-sweep that traces the AP–Sensor trade-off empirically.

use crate::error::{not_positive, Error, Result};
use crate::geom::Point;
use crate::model::{Partition, Scenario};
use crate::optimize::{best_restart, run_restarts, OptimOptions};
use crate::scene::DensityGrid;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Closed-form optimum of the two-AP/one-FC system on `[0,1]` with uniform
/// density and proportional uplink weights `b_i = κ·a_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoApSolution {
    /// Whether both APs carry traffic at the optimum.
    pub useful: bool,
    /// Cell boundary; the weaker AP's region is empty when not useful.
    pub r_star: f64,
    /// FC position.
    pub q_star: f64,
    pub p1: f64,
    pub p2: f64,
    /// Optimal two-tier power.
    pub power: f64,
    /// The four stationary (r, q) pairs of the zero-gradient equations,
    /// kept for audit. Entries may be non-finite in degenerate cases
    /// (equal weights, β′ = 0) where the corresponding root disappears.
    pub stationary_pairs: [(f64, f64); 4],
}

/// Both APs carry traffic iff
/// `√((4β′+1)/(β′+1)) − 1 ≤ √(a1/a2) ≤ 1/(√((4β′+1)/(β′+1)) − 1)`.
/// Always true at β′ = 0, and never violated for equal weights.
pub fn usefulness_condition(a1: f64, a2: f64, beta_prime: f64) -> bool {
    let s = ((4.0 * beta_prime + 1.0) / (beta_prime + 1.0)).sqrt();
    let lo = s - 1.0;
    let ratio = (a1 / a2).sqrt();
    ratio >= lo && (lo <= 0.0 || ratio <= 1.0 / lo)
}

/// Two-tier power of the two-AP system at boundary `r` and FC position `q`,
/// with the AP positions already at their conditional optimum. Exact
/// integral, no quadrature.
pub fn two_ap_power(r: f64, q: f64, a1: f64, a2: f64, beta_prime: f64) -> f64 {
    let bp = beta_prime;
    let p1 = (r + 2.0 * bp * q) / (2.0 * (1.0 + bp));
    let p2 = (1.0 + r + 2.0 * bp * q) / (2.0 * (1.0 + bp));
    // ∫_0^r (p1 − w)² dw and ∫_r^1 (p2 − w)² dw
    let s1 = (p1.powi(3) - (p1 - r).powi(3)) / 3.0;
    let s2 = ((p2 - r).powi(3) - (p2 - 1.0).powi(3)) / 3.0;
    let denom = 4.0 * (1.0 + bp) * (1.0 + bp);
    let u1 = r * bp * (r - 2.0 * q) * (r - 2.0 * q) / denom;
    let u2 = (1.0 - r) * bp * (1.0 + r - 2.0 * q) * (1.0 + r - 2.0 * q) / denom;
    a1 * (s1 + u1) + a2 * (s2 + u2)
}

/// Optimal two-AP/one-FC deployment on `[0,1]`.
pub fn two_ap_optimum(a1: f64, a2: f64, kappa: f64, beta: f64) -> Result<TwoApSolution> {
    if not_positive(a1) || not_positive(a2) || not_positive(kappa) {
        return Err(Error::Config(
            "two-AP weights and kappa must be positive".into(),
        ));
    }
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::Config("beta must be >= 0".into()));
    }
    let bp = beta * kappa;
    let ratio = (a1 / a2).sqrt();
    let useful = usefulness_condition(a1, a2, bp);

    let pairs = stationary_pairs(a1, a2, bp);

    if useful {
        let r = 1.0 / (1.0 + ratio);
        let g = (a1 * a2).sqrt() / (a1.sqrt() + a2.sqrt());
        let power = (4.0 * bp + 1.0) / (12.0 * (bp + 1.0)) * g * g;
        let p1 = (r + 2.0 * bp * r) / (2.0 * (1.0 + bp));
        let p2 = (1.0 + r + 2.0 * bp * r) / (2.0 * (1.0 + bp));
        Ok(TwoApSolution {
            useful,
            r_star: r,
            q_star: r,
            p1,
            p2,
            power,
            stationary_pairs: pairs,
        })
    } else {
        // all sensors go to the stronger (lower-weight) AP at the centroid
        let r = if a1 <= a2 { 1.0 } else { 0.0 };
        Ok(TwoApSolution {
            useful,
            r_star: r,
            q_star: 0.5,
            p1: 0.5,
            p2: 0.5,
            power: a1.min(a2) / 12.0,
            stationary_pairs: pairs,
        })
    }
}

fn stationary_pairs(a1: f64, a2: f64, bp: f64) -> [(f64, f64); 4] {
    let t = (a1 / a2).sqrt();
    let r1 = 1.0 / (1.0 + t);
    let r2 = 1.0 / (1.0 - t);
    let den = 1.0 - a1 / a2;
    let u = (bp / (bp + 1.0)).sqrt();
    let v = ((bp + 1.0) / bp).sqrt();
    let mid = (u + v) / 2.0;
    [
        (r1, r1),
        (r2, r2),
        ((1.0 - u * t) / den, (1.0 - mid * t) / den),
        ((1.0 + u * t) / den, (1.0 + mid * t) / den),
    ]
}

/// Minimum one-tier power `H(R)` for a fixed partition: every point charged
/// to its own cell's centroid.
pub fn fixed_partition_h(grid: &DensityGrid, part: &Partition, a: &[f64]) -> f64 {
    let mut h = 0.0;
    for (i, &assign) in part.assign.iter().enumerate() {
        let Some(n) = assign else { continue };
        let Some(c) = part.centroids[n] else { continue };
        h += a[n] * c.dist_sq(grid.centers()[i]) * grid.masses()[i];
    }
    h
}

/// One-point distortion `J(R)`: every point charged to the weighted grand
/// centroid `Σ a_n v_n c_n / Σ a_n v_n`.
pub fn fixed_partition_j(grid: &DensityGrid, part: &Partition, a: &[f64]) -> f64 {
    let mut num = Point::ORIGIN;
    let mut den = 0.0;
    for (n, &v) in part.volumes.iter().enumerate() {
        if let Some(c) = part.centroids[n] {
            num = num + c * (a[n] * v);
            den += a[n] * v;
        }
    }
    if den == 0.0 {
        return 0.0;
    }
    let x = num * (1.0 / den);
    let mut j = 0.0;
    for (i, &assign) in part.assign.iter().enumerate() {
        let Some(n) = assign else { continue };
        j += a[n] * x.dist_sq(grid.centers()[i]) * grid.masses()[i];
    }
    j
}

/// Fixed-partition AP–Sensor power function for one FC and proportional
/// uplink weights `b_{i,1} = κ·a_i`:
/// `A(s,R) = κ·[√(J−H) − √(s−H)]²` on `H ≤ s ≤ J`, zero beyond `J`.
pub fn a_s_fixed_partition(
    grid: &DensityGrid,
    part: &Partition,
    a: &[f64],
    kappa: f64,
    s: f64,
) -> Result<f64> {
    let h = fixed_partition_h(grid, part, a);
    let j = fixed_partition_j(grid, part, a);
    if s < h - 1e-12 * h.max(1.0) {
        return Err(Error::Domain(format!(
            "sensor power {s} below the fixed-partition minimum {h}"
        )));
    }
    if s >= j {
        return Ok(0.0);
    }
    let bracket = (j - h).sqrt() - (s - h).max(0.0).sqrt();
    Ok(kappa * bracket * bracket)
}

/// Closed-form AP–Sensor power function of the two-AP/one-FC system:
/// `A(s) = κ·[g/2 − √(s − g²/12)]²` with `g = √(a1·a2)/(√a1 + √a2)`,
/// on `g²/12 ≤ s < min(a1,a2)/12`, and zero from `min(a1,a2)/12` on.
/// For unequal weights the function jumps to zero at `min(a1,a2)/12`;
/// for equal weights it reaches zero continuously.
pub fn a_s_closed_form(a1: f64, a2: f64, kappa: f64, s: f64) -> Result<f64> {
    if !(a1 > 0.0 && a2 > 0.0 && kappa > 0.0) {
        return Err(Error::Config("weights and kappa must be positive".into()));
    }
    let g = (a1 * a2).sqrt() / (a1.sqrt() + a2.sqrt());
    let lo = g * g / 12.0;
    let hi = a1.min(a2) / 12.0;
    if s < lo - 1e-12 * lo.max(1.0) {
        return Err(Error::Domain(format!(
            "sensor power {s} below the two-level minimum {lo}"
        )));
    }
    if s >= hi {
        return Ok(0.0);
    }
    let bracket = 0.5 * g - (s - lo).max(0.0).sqrt();
    Ok(kappa * bracket * bracket)
}

/// Brute-force minimum distortion of a heterogeneous K-level one-tier
/// quantizer: multi-start weighted Lloyd descent over the grid. Intended
/// as an oracle at small K.
pub fn brute_force_dk(grid: &DensityGrid, a: &[f64], restarts: usize, seed: u64) -> f64 {
    assert!(!a.is_empty());
    let mut rng = StdRng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..restarts.max(1) {
        let d = one_tier_lloyd(grid, a, &mut rng);
        if d < best {
            best = d;
        }
    }
    best
}

fn sample_center(grid: &DensityGrid, rng: &mut StdRng) -> Point {
    let total = grid.total_mass();
    let mut ticket = rng.gen_range(0.0..total);
    for (i, &m) in grid.masses().iter().enumerate() {
        ticket -= m;
        if ticket <= 0.0 {
            return grid.centers()[i];
        }
    }
    *grid.centers().last().expect("grid is nonempty")
}

fn one_tier_lloyd(grid: &DensityGrid, a: &[f64], rng: &mut StdRng) -> f64 {
    let k = a.len();
    let mut x: Vec<Point> = (0..k).map(|_| sample_center(grid, rng)).collect();
    let mut last = f64::INFINITY;
    for _ in 0..500 {
        // assignment by weighted squared distance, ties to the smaller index
        let mut volumes = vec![0.0; k];
        let mut sums = vec![Point::ORIGIN; k];
        let mut distortion = 0.0;
        for (i, &w) in grid.centers().iter().enumerate() {
            let mut best = 0;
            let mut best_cost = f64::INFINITY;
            for (idx, &xi) in x.iter().enumerate() {
                let cost = a[idx] * xi.dist_sq(w);
                if cost < best_cost {
                    best_cost = cost;
                    best = idx;
                }
            }
            let m = grid.masses()[i];
            distortion += best_cost * m;
            volumes[best] += m;
            sums[best] = sums[best] + w * m;
        }
        for idx in 0..k {
            if volumes[idx] > 0.0 {
                x[idx] = sums[idx] * (1.0 / volumes[idx]);
            } else {
                x[idx] = sample_center(grid, rng);
            }
        }
        if last.is_finite() && last - distortion < 1e-13 * last.max(1e-300) {
            return distortion.min(last);
        }
        last = distortion;
    }
    last
}

/// One point of the AP–Sensor trade-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub beta: f64,
    pub sensor_power: f64,
    pub ap_power: f64,
    /// Point of the non-increasing lower envelope.
    pub on_envelope: bool,
}

/// Empirical AP–Sensor trade-off: best-of-restarts powers per β, sorted by
/// sensor power, with the lower envelope marked.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    pub points: Vec<TradeoffPoint>,
}

impl TradeoffCurve {
    pub fn envelope(&self) -> impl Iterator<Item = &TradeoffPoint> {
        self.points.iter().filter(|p| p.on_envelope)
    }

    /// CSV export: `beta,sensor_power,ap_power,on_envelope`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,sensor_power,ap_power,on_envelope\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.beta, p.sensor_power, p.ap_power, p.on_envelope as u8
            ));
        }
        out
    }
}

/// Sweeps β over the scenario (best of `opts.restarts` HTTL runs each) and
/// extracts the non-increasing lower envelope of the resulting
/// (sensor power, AP power) cloud.
///
/// Duplicate β values are deduplicated, and per-β seeds derive from the
/// position in the sorted list, so the result does not depend on the order
/// or multiplicity of the input.
pub fn tradeoff_sweep(
    sc: &Scenario,
    grid: &DensityGrid,
    beta_list: &[f64],
    opts: &OptimOptions,
) -> Result<TradeoffCurve> {
    if beta_list.is_empty() {
        return Err(Error::Usage("beta sweep needs at least one value".into()));
    }
    if beta_list.iter().any(|&b| b.is_nan() || b < 0.0) {
        return Err(Error::Config("beta values must be >= 0".into()));
    }
    let mut betas = beta_list.to_vec();
    betas.sort_by(f64::total_cmp);
    betas.dedup();

    let mut points = Vec::with_capacity(betas.len());
    for (idx, &beta) in betas.iter().enumerate() {
        let mut sc_b = sc.clone();
        sc_b.beta = beta;
        let o = OptimOptions {
            seed: opts.seed + 10_000 * idx as u64,
            ..*opts
        };
        let traces = run_restarts(&sc_b, grid, &o, false)?;
        let best = traces[best_restart(&traces, false)].final_record().report;
        points.push(TradeoffPoint {
            beta,
            sensor_power: best.sensor_power,
            ap_power: best.ap_power,
            on_envelope: false,
        });
    }
    points.sort_by(|a, b| {
        a.sensor_power
            .total_cmp(&b.sensor_power)
            .then(a.ap_power.total_cmp(&b.ap_power))
    });
    let mut floor = f64::INFINITY;
    for p in &mut points {
        if p.ap_power < floor {
            p.on_envelope = true;
            floor = p.ap_power;
        }
    }
    Ok(TradeoffCurve { points })
}
