//! Energy-optimal node deployment for heterogeneous two-tier wireless
//! sensor networks.
//!
//! A two-tier network collects data from densely deployed sensors through
//! `N` heterogeneous access points (APs) that forward to `M` heterogeneous
//! fusion centers (FCs). This crate models the transmission-power objective,
//! computes the generalized Voronoi partition that is optimal for it, and
//! runs the HTTL and Limited-HTTL alternating descent algorithms that place
//! the nodes. Closed-form solutions for small instances live in [`analytic`]
//! and double as test oracles; [`harness`] drives seeded multi-restart
//! experiments and writes CSV/JSON/SVG artifacts.
//!
//! ```
//! use ttwsn::optimize::{best_restart, run_restarts, OptimOptions};
//! use ttwsn::{DensityGrid, DensityModel, Region, Scenario};
//!
//! // two APs and one FC on [0,1]: the optimum is known in closed form
//! let sc = Scenario {
//!     n_aps: 2,
//!     n_fcs: 1,
//!     a: vec![1.0, 1.0],
//!     b: vec![vec![1.0], vec![1.0]],
//!     beta: 1.0,
//!     sensor_budget: None,
//!     ap_budgets: None,
//!     region: Region::interval(0.0, 1.0)?,
//!     density: DensityModel::Uniform,
//! };
//! let grid = DensityGrid::discretize(&sc.region, &sc.density, 500)?;
//! let opts = OptimOptions { restarts: 5, seed: 0, ..OptimOptions::default() };
//! let traces = run_restarts(&sc, &grid, &opts, false)?;
//! let best = traces[best_restart(&traces, false)].final_record();
//!
//! let exact = ttwsn::analytic::two_ap_optimum(1.0, 1.0, 1.0, 1.0)?.power;
//! assert!((best.report.two_tier_power - exact).abs() < 1e-3);
//! # Ok::<(), ttwsn::Error>(())
//! ```

pub mod analytic;
pub mod error;
pub mod geom;
pub mod harness;
pub mod model;
pub mod optimize;
pub mod partition;
pub mod scene;
pub mod svg;

pub use error::{Error, Result};
pub use geom::Point;
pub use model::{Deployment, Partition, PowerReport, Scenario};
pub use optimize::{OptimOptions, RunTrace};
pub use scene::{DensityGrid, DensityModel, Region};
