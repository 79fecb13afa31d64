//! Parameter sweeps producing plot-ready tables.
//!
//! Trials and grid points run in parallel; each uses a seed derived from the sweep seed and its
//! index, and rows come out in index order.

use std::f64::consts::{FRAC_PI_4, PI};
use std::str::FromStr;

use anyhow::{bail, Context};
use rayon::prelude::*;
use weur_core::bounds::{
    bound_q_lmf, bound_q_s, bound_q_scb, numerical_optimal_bound, pure_state_i_com, q_alpha_from_norm,
};
use weur_core::ensembles::{haar_random_bases, qubit_family, qutrit_four_bases_with, QutritPhase};
use weur_core::entropy::RenyiOrder;
use weur_core::steering::{noise_threshold, optimize_weights, NoiseSide, ThresholdOptions, WeightSearchOptions};
use weur_core::viewop::view_report;

use crate::output::{fmt_f64, fmt_opt, CsvTable};

/// splitmix64 mix of the sweep seed and an index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn parse_angle(s: &str) -> anyhow::Result<f64> {
    let s = s.trim();
    let value = if let Some(rest) = s.strip_prefix("pi") {
        match rest.strip_prefix('/') {
            Some(den) => PI / den.parse::<f64>().with_context(|| format!("bad angle `{s}`"))?,
            None if rest.is_empty() => PI,
            None => bail!("bad angle `{s}`"),
        }
    } else {
        s.parse::<f64>().with_context(|| format!("bad number `{s}`"))?
    };
    if !value.is_finite() {
        bail!("non-finite value `{s}`");
    }
    Ok(value)
}

/// Grid of values: empty, a comma list (`0,0.5,pi/4`), or `start:stop:count` with both ends included.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Grid(Vec::new()));
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [single] => Ok(Grid(single.split(',').map(parse_angle).collect::<anyhow::Result<_>>()?)),
            [start, stop, count] => {
                let (a, b) = (parse_angle(start)?, parse_angle(stop)?);
                let n: usize = count.trim().parse().with_context(|| format!("bad point count `{count}`"))?;
                Ok(Grid(match n {
                    0 => Vec::new(),
                    1 => vec![a],
                    _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
                }))
            }
            _ => bail!("grid `{s}` is neither a list nor start:stop:count"),
        }
    }
}

/// Parses a comma list of Rényi orders (`1`, `2`, `inf`).
pub fn parse_orders(s: &str) -> anyhow::Result<Vec<RenyiOrder>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let t = t.trim();
            if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
                Ok(RenyiOrder::Infinity)
            } else {
                let a: f64 = t.parse().with_context(|| format!("bad order `{t}`"))?;
                Ok(RenyiOrder::new(a)?)
            }
        })
        .collect()
}

fn order_label(o: RenyiOrder) -> String {
    o.to_string()
}

#[derive(Debug, Clone)]
pub struct RandomSweep {
    pub d: usize,
    pub count: usize,
    pub trials: usize,
    pub orders: Vec<RenyiOrder>,
    pub restarts: usize,
    pub seed: u64,
}

/// Random sets of `count` Haar bases; all bound columns are sum-form (equal weights), state independent.
pub fn random_sweep(cfg: &RandomSweep) -> anyhow::Result<CsvTable> {
    if cfg.d < 2 || cfg.count < 2 {
        bail!("random sweeps need d >= 2 and count >= 2");
    }
    if cfg.restarts < 1 {
        bail!("at least one restart is required");
    }
    for &o in &cfg.orders {
        if o != RenyiOrder::Shannon && !o.has_ic_estimate() {
            bail!("order {o} has no IC bound; use 1 or an order >= 2");
        }
    }
    let mut columns = vec!["trial".to_string(), "seed".into(), "x_tot".into(), "g_norm".into()];
    columns.extend(cfg.orders.iter().map(|&o| format!("q_{}", order_label(o))));
    columns.extend(["q_s".into(), "q_lmf".into(), "q_scb".into()]);
    columns.extend(cfg.orders.iter().map(|&o| format!("b_{}", order_label(o))));
    let mut table = CsvTable::new("sweep-random", columns);

    let rows: Vec<anyhow::Result<Vec<String>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(cfg.seed, trial as u64);
            let e = haar_random_bases(cfg.d, cfg.count, seed)?;
            let view = view_report(&e);
            let i_com = pure_state_i_com(cfg.d);
            let theta = cfg.count as f64;
            let mut row = vec![trial.to_string(), seed.to_string(), fmt_f64(view.exclusivity), fmt_f64(view.g_avg_norm)];
            for &o in &cfg.orders {
                row.push(fmt_f64(theta * q_alpha_from_norm(e.outcomes(), view.g_avg_norm, i_com, o)?));
            }
            row.push(fmt_f64(bound_q_s(e.povms(), i_com)?));
            row.push(fmt_f64(bound_q_lmf(e.povms(), 0.0)?));
            row.push(fmt_f64(bound_q_scb(e.povms(), 0.0)?));
            for &o in &cfg.orders {
                row.push(fmt_f64(theta * numerical_optimal_bound(&e, o, cfg.restarts, seed)?.value));
            }
            Ok(row)
        })
        .collect();
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

/// Four qutrit bases along the `beta` family: `beta, x_tot, q_s, q_scb` (pure-state forms).
pub fn qutrit_sweep(grid: &Grid, phase: QutritPhase) -> anyhow::Result<CsvTable> {
    if let Some(b) = grid.0.iter().find(|b| !(-1e-12..=FRAC_PI_4 + 1e-12).contains(*b)) {
        bail!("beta = {b} outside [0, pi/4]");
    }
    let mut table = CsvTable::new("sweep-qutrit", ["beta", "x_tot", "q_s", "q_scb"]);
    let rows: Vec<anyhow::Result<Vec<String>>> = grid
        .0
        .par_iter()
        .map(|&beta| {
            let e = qutrit_four_bases_with(beta.clamp(0.0, FRAC_PI_4), phase)?;
            let view = view_report(&e);
            Ok(vec![
                fmt_f64(beta),
                fmt_f64(view.exclusivity),
                fmt_f64(bound_q_s(e.povms(), pure_state_i_com(3))?),
                fmt_f64(bound_q_scb(e.povms(), 0.0)?),
            ])
        })
        .collect();
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct SteeringSweep {
    pub beta1: Grid,
    pub beta2: Grid,
    pub order: RenyiOrder,
    pub tol: f64,
    pub optimize_weights: bool,
    pub restarts: usize,
    pub noise_side: NoiseSide,
    pub seed: u64,
}

/// Noise thresholds over the `(beta1, beta2)` grid of the three-observable qubit family.
/// Failures are reported in the `status` column without aborting the sweep.
pub fn steering_sweep(cfg: &SteeringSweep) -> CsvTable {
    let mut table =
        CsvTable::new("steering", ["beta1", "beta2", "eta_equ", "eta_opt", "w1", "w2", "w3", "status"]);
    let points: Vec<(f64, f64)> =
        cfg.beta1.0.iter().flat_map(|&b1| cfg.beta2.0.iter().map(move |&b2| (b1, b2))).collect();
    let threshold = ThresholdOptions { order: cfg.order, tol: cfg.tol, noise_side: cfg.noise_side, ..Default::default() };
    let rows: Vec<Vec<String>> = points
        .par_iter()
        .enumerate()
        .map(|(i, &(b1, b2))| {
            let family = qubit_family(b1, b2);
            let mut row = vec![fmt_f64(b1), fmt_f64(b2)];
            let result = if cfg.optimize_weights {
                let opts = WeightSearchOptions {
                    threshold,
                    restarts: cfg.restarts,
                    seed: derive_seed(cfg.seed, i as u64),
                    ..Default::default()
                };
                optimize_weights(family.povms(), &opts).map(|s| {
                    let mut cells = vec![fmt_opt(s.equal_weights_threshold), fmt_opt(s.threshold)];
                    cells.extend(s.weights.iter().map(|&w| fmt_f64(w)));
                    cells
                })
            } else {
                noise_threshold(&family, &threshold).map(|t| {
                    let mut cells = vec![fmt_opt(t), String::new()];
                    cells.extend(family.weights().iter().map(|&w| fmt_f64(w)));
                    cells
                })
            };
            match result {
                Ok(cells) => {
                    row.extend(cells);
                    row.push("ok".into());
                }
                Err(e) => {
                    row.extend((0..5).map(|_| String::new()));
                    row.push(format!("error: {}", e.to_string().replace([',', '\n'], ";")));
                }
            }
            row
        })
        .collect();
    for row in rows {
        table.push(row);
    }
    table
}
