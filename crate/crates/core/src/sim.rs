//! Euler–Maruyama simulation of killed paths of `dX = dt + X dB`.
//!
//! Every path owns the ChaCha8 stream numbered by its index under the
//! common seed, so ensembles do not depend on how paths are scheduled
//! across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsd::QsdModel;

/// Default cap on `n_paths · horizon / dt`.
pub const DEFAULT_STEP_BUDGET: f64 = 2e10;
/// Environment variable overriding [`DEFAULT_STEP_BUDGET`].
pub const STEP_BUDGET_ENV: &str = "SHIRYAEV_QSD_STEP_BUDGET";
/// Default number of survival-curve bins.
pub const DEFAULT_BINS: usize = 200;
/// Minimum survivors for a KS distance.
pub const MIN_KS_SAMPLES: usize = 100;
/// Minimum populated bins in the rate-fit window.
pub const MIN_FIT_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(rename = "A")]
    pub boundary: f64,
    pub x0: f64,
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// When false no path is ever killed and `boundary` is ignored.
    pub kill: bool,
    pub bins: usize,
}

impl SimConfig {
    pub fn new(a: f64, x0: f64, dt: f64, horizon: f64, n_paths: usize, seed: u64) -> Self {
        SimConfig {
            boundary: a,
            x0,
            dt,
            horizon,
            n_paths,
            seed,
            kill: true,
            bins: DEFAULT_BINS,
        }
    }

    /// Start one unit above the boundary.
    pub fn with_default_start(a: f64, dt: f64, horizon: f64, n_paths: usize, seed: u64) -> Self {
        Self::new(a, a + 1.0, dt, horizon, n_paths, seed)
    }

    /// Same dynamics without killing.
    pub fn unkilled(x0: f64, dt: f64, horizon: f64, n_paths: usize, seed: u64) -> Self {
        SimConfig {
            kill: false,
            ..Self::new(0.0, x0, dt, horizon, n_paths, seed)
        }
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round().max(1.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.kill && !(self.boundary > 0.0 && self.boundary.is_finite()) {
            return Err(Error::Domain(format!(
                "boundary A must be positive, got {}",
                self.boundary
            )));
        }
        if self.kill && !(self.x0 > self.boundary) {
            return Err(Error::Domain(format!(
                "start x0 = {} must exceed the boundary {}",
                self.x0, self.boundary
            )));
        }
        if !self.x0.is_finite() {
            return Err(Error::Domain("start x0 must be finite".into()));
        }
        if !(self.dt > 0.0 && self.horizon > 0.0 && self.dt <= self.horizon) {
            return Err(Error::Domain(format!(
                "need 0 < dt <= horizon, got dt = {}, horizon = {}",
                self.dt, self.horizon
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::Domain("n_paths must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(Error::Domain("bins must be at least 1".into()));
        }
        Ok(())
    }
}

/// Step budget from the environment, falling back to the default.
pub fn step_budget() -> f64 {
    std::env::var(STEP_BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|b| *b > 0.0)
        .unwrap_or(DEFAULT_STEP_BUDGET)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KilledPathEnsemble {
    pub config: SimConfig,
    /// `X` at the horizon for each surviving path, in path order.
    pub survivor_values: Vec<f64>,
    /// `(t, number of paths alive at t)` at the right edge of each bin.
    pub survival_counts: Vec<(f64, u64)>,
    pub n_killed: usize,
}

impl KilledPathEnsemble {
    pub fn n_survivors(&self) -> usize {
        self.survivor_values.len()
    }

    pub fn sorted_survivors(&self) -> Vec<f64> {
        let mut v = self.survivor_values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// The random stream of one path.
pub fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

enum PathEnd {
    Killed(usize),
    Survived(f64),
}

fn run_path(cfg: &SimConfig, steps: usize, path: usize) -> PathEnd {
    let mut rng = path_rng(cfg.seed, path);
    let sq = cfg.dt.sqrt();
    let mut x = cfg.x0;
    for k in 1..=steps {
        let z: f64 = rng.sample(StandardNormal);
        x += cfg.dt + x * sq * z;
        if cfg.kill && x <= cfg.boundary {
            return PathEnd::Killed(k);
        }
    }
    PathEnd::Survived(x)
}

/// Simulate `n_paths` independent paths up to the horizon.
pub fn simulate(cfg: &SimConfig) -> Result<KilledPathEnsemble> {
    simulate_with_budget(cfg, step_budget())
}

pub fn simulate_with_budget(cfg: &SimConfig, budget: f64) -> Result<KilledPathEnsemble> {
    cfg.validate()?;
    let requested = cfg.n_paths as f64 * cfg.horizon / cfg.dt;
    if requested > budget {
        return Err(Error::Budget { requested, budget });
    }
    let steps = cfg.steps();
    let ends: Vec<PathEnd> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|p| run_path(cfg, steps, p))
        .collect();

    let bins = cfg.bins;
    let bin_width = cfg.horizon / bins as f64;
    // killed[i]: paths killed at or before the end of bin i
    let mut killed_in = vec![0u64; bins];
    let mut survivors = Vec::new();
    let mut n_killed = 0;
    for end in ends {
        match end {
            PathEnd::Killed(k) => {
                n_killed += 1;
                let t = k as f64 * cfg.dt;
                let i = ((t / bin_width).ceil() as usize)
                    .saturating_sub(1)
                    .min(bins - 1);
                killed_in[i] += 1;
            }
            PathEnd::Survived(x) => survivors.push(x),
        }
    }
    let mut alive = cfg.n_paths as u64;
    let survival_counts = killed_in
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            alive -= k;
            ((i + 1) as f64 * bin_width, alive)
        })
        .collect();
    Ok(KilledPathEnsemble {
        config: *cfg,
        survivor_values: survivors,
        survival_counts,
        n_killed,
    })
}

/// Fraction of survivors at or below `x`.
pub fn empirical_cdf(ens: &KilledPathEnsemble, x: f64) -> Result<f64> {
    let n = ens.n_survivors();
    if n == 0 {
        return Err(Error::NoSurvivors { needed: 1, have: 0 });
    }
    let below = ens.survivor_values.iter().filter(|&&v| v <= x).count();
    Ok(below as f64 / n as f64)
}

/// Two-sided Kolmogorov–Smirnov statistic of ascending samples against a
/// continuous distribution function.
pub fn ks_statistic<F>(sorted: &[f64], mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// KS distance between the survivors and the model distribution.
pub fn ks_distance(ens: &KilledPathEnsemble, model: &QsdModel) -> Result<f64> {
    let n = ens.n_survivors();
    if n < MIN_KS_SAMPLES {
        return Err(Error::NoSurvivors {
            needed: MIN_KS_SAMPLES,
            have: n,
        });
    }
    ks_statistic(&ens.sorted_survivors(), |x| model.cdf(x))
}

/// Negative slope of `ln(survival fraction)` against `t`, least squares over
/// the bins in `[horizon/2, horizon]`.
pub fn estimate_kill_rate(ens: &KilledPathEnsemble) -> Result<f64> {
    let h = ens.config.horizon;
    let n = ens.config.n_paths as f64;
    let pts: Vec<(f64, f64)> = ens
        .survival_counts
        .iter()
        .filter(|(t, c)| *t >= 0.5 * h * (1.0 - 1e-12) && *c > 0)
        .map(|&(t, c)| (t, (c as f64 / n).ln()))
        .collect();
    if pts.len() < MIN_FIT_BINS {
        return Err(Error::InsufficientData(format!(
            "{} populated bins in the fit window, need {MIN_FIT_BINS}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, y) in &pts {
        sxy += (t - tm) * (y - ym);
        sxx += (t - tm) * (t - tm);
    }
    Ok(0.0 - sxy / sxx)
}
