use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{boltzmann_weights, invert_demand, mean_demand, FirmDistribution};
use crate::error::{Error, Result};
use crate::gb2::Gb2Params;
use crate::record::ProductivityRecord;
use crate::superstat::DemandLaw;

/// Settings for a synthetic panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub firms: usize,
    pub workers: u64,
    pub firm_params: Gb2Params,
    pub delta: f64,
    pub periods: usize,
    pub seed: u64,
    /// Number of quantile-block sectors.
    pub sectors: usize,
    /// Year stamped on every record; all periods are pooled into it.
    pub year: i32,
    /// Draw firm levels one per probability stratum `((k + U)/K)` instead of
    /// independently.
    pub stratified: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            firms: 10_000,
            workers: 1_000_000,
            firm_params: Gb2Params::new(1.8, 1.0, 3.0, 50.0).expect("valid defaults"),
            delta: 0.5,
            periods: 200,
            seed: 1,
            sectors: 20,
            year: 2000,
            stratified: true,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if !(self.delta < 1.0) {
            return Err(Error::Normalizability(format!(
                "demand law needs delta < 1, got {}",
                self.delta
            )));
        }
        if self.firms < 50 {
            return Err(Error::InsufficientData {
                needed: 50,
                got: self.firms,
            });
        }
        if self.workers < self.firms as u64 {
            return Err(Error::InvalidParams(format!(
                "need at least as many workers as firms ({} < {})",
                self.workers, self.firms
            )));
        }
        if self.periods == 0 || self.sectors == 0 || self.sectors > self.firms {
            return Err(Error::InvalidParams(
                "periods must be >= 1 and sectors in 1..=firms".into(),
            ));
        }
        Ok(())
    }
}

/// One period of Boltzmann allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodDraw {
    pub demand: f64,
    pub beta: f64,
    /// Units allocated to each level, in level order.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthPanel {
    /// Firm productivity levels `c_k`, indexed by firm.
    pub levels: Vec<f64>,
    pub sector_of: Vec<usize>,
    pub periods: Vec<PeriodDraw>,
    pub records: Vec<ProductivityRecord>,
}

/// Multinomial draw of `n` units over probabilities `p` by sequential
/// conditional binomials.
pub fn multinomial<R: Rng + ?Sized>(n: u64, p: &[f64], rng: &mut R) -> Vec<u64> {
    let mut suffix = vec![0.0; p.len() + 1];
    for k in (0..p.len()).rev() {
        suffix[k] = suffix[k + 1] + p[k];
    }
    let mut counts = vec![0u64; p.len()];
    let mut left = n;
    for k in 0..p.len() {
        if left == 0 {
            break;
        }
        if k + 1 == p.len() {
            counts[k] = left;
            break;
        }
        let prob = if suffix[k] > 0.0 {
            (p[k] / suffix[k]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let x = Binomial::new(left, prob)
            .expect("probability in [0, 1]")
            .sample(rng);
        counts[k] = x;
        left -= x;
    }
    counts
}

/// Allocates `units` over `levels` in each of `periods` periods.
///
/// Each period draws a demand `D` from `f_D ∝ (c̄ − D)^(−δ)` on
/// `(min c, c̄)`, solves `D(β) = D` on the empirical level distribution and
/// allocates with probabilities `∝ e^(−βc_k)`. Period `t` uses ChaCha8
/// stream `t + 1` of `seed`, so the result does not depend on scheduling.
pub fn allocate_periods(
    levels: &[f64],
    delta: f64,
    units: u64,
    periods: usize,
    seed: u64,
) -> Result<Vec<PeriodDraw>> {
    let firm = FirmDistribution::empirical(levels)?;
    let mean = mean_demand(&firm, 0.0)?;
    let law = DemandLaw::with_min(delta, mean, firm.support_min())?;
    (0..periods)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64 + 1);
            let demand = law.draw(&mut rng);
            let beta = invert_demand(&firm, demand)?;
            let p = boltzmann_weights(levels, beta)?;
            let counts = multinomial(units, &p, &mut rng);
            Ok(PeriodDraw {
                demand,
                beta,
                counts,
            })
        })
        .collect()
}

/// Rounds `c` to a mantissa of `53 − ⌈log2(max_units + 1)⌉` bits, so that
/// `n·c` is exact for every `n ≤ max_units` and `(n·c)/n` returns `c`.
pub fn snap_level(c: f64, max_units: u64) -> f64 {
    let bits = 53 - (64 - max_units.leading_zeros()) as i32;
    let e = c.log2().floor() as i32;
    let scale = 2f64.powi(bits - 1 - e);
    (c * scale).round() / scale
}

/// Draws `K` firm levels from GB2.
pub fn draw_firm_levels(
    params: &Gb2Params,
    k: usize,
    stratified: bool,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    if !stratified {
        return Ok(params.sample_with(&mut rng, k));
    }
    let mut levels = Vec::with_capacity(k);
    for i in 0..k {
        let u = ((rng.random::<u64>() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
        levels.push(params.quantile_upper((i as f64 + u) / k as f64)?);
    }
    levels.shuffle(&mut rng);
    Ok(levels)
}

/// Synthetic panel: GB2 firm levels, then Boltzmann allocation of workers in
/// every period, emitted as one record per firm and period with at least one
/// worker.
pub fn synth_generate(config: &SynthConfig) -> Result<SynthPanel> {
    config.validate()?;
    let levels: Vec<f64> = draw_firm_levels(
        &config.firm_params,
        config.firms,
        config.stratified,
        config.seed,
    )?
    .into_iter()
    .map(|c| snap_level(c, config.workers))
    .collect();
    let periods = allocate_periods(
        &levels,
        config.delta,
        config.workers,
        config.periods,
        config.seed,
    )?;

    let k = levels.len();
    let mut rank: Vec<usize> = (0..k).collect();
    rank.sort_by(|&a, &b| levels[a].total_cmp(&levels[b]).then(a.cmp(&b)));
    let mut sector_of = vec![0usize; k];
    for (r, &i) in rank.iter().enumerate() {
        sector_of[i] = r * config.sectors / k;
    }
    let width = (k - 1).to_string().len();
    let ids: Vec<String> = (0..k).map(|i| format!("F{i:0width$}")).collect();
    let sectors: Vec<String> = (0..config.sectors).map(|s| format!("S{s:02}")).collect();

    let mut records = Vec::new();
    for p in &periods {
        for (i, &n) in p.counts.iter().enumerate() {
            if n > 0 {
                let y = n as f64 * levels[i];
                records.push(ProductivityRecord::new(
                    ids[i].clone(),
                    config.year,
                    sectors[sector_of[i]].clone(),
                    y,
                    n,
                )?);
            }
        }
    }
    Ok(SynthPanel {
        levels,
        sector_of,
        periods,
        records,
    })
}
