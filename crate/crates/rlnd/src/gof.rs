//! Histogram binning and the Pearson chi-square machinery: the raw
//! statistic, the comparative indices for the normal and modulated
//! models, degrees of freedom, and p-values.

use serde::Serialize;

use crate::dist::{NormalParams, RlndParams};
use crate::numerics::chi_square_sf;
use crate::{Error, Result};

/// How bin edges are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BinMode {
    EqualWidth,
    EqualProbability,
}

/// Binning configuration.
#[derive(Debug, Clone, Copy)]
pub struct BinningSpec {
    pub mode: BinMode,
    pub group_count_m: usize,
    /// Bins span `mean ± range_multiplier · sample_sd`.
    pub range_multiplier: f64,
    /// Bins with expected count below this are merged outward-to-inward.
    pub min_expected_count: f64,
}

impl Default for BinningSpec {
    fn default() -> Self {
        Self {
            mode: BinMode::EqualWidth,
            group_count_m: 50,
            range_multiplier: 6.0,
            min_expected_count: 5.0,
        }
    }
}

impl BinningSpec {
    fn validate(&self) -> Result<()> {
        if self.group_count_m < 3 {
            return Err(Error::InvalidParams("group_count_m must be at least 3".into()));
        }
        if !(self.range_multiplier > 0.0) {
            return Err(Error::InvalidParams("range_multiplier must be positive".into()));
        }
        if !(self.min_expected_count >= 0.0) {
            return Err(Error::InvalidParams("min_expected_count must be >= 0".into()));
        }
        Ok(())
    }
}

/// Either fitting model, for bin-probability evaluation.
#[derive(Debug, Clone)]
pub enum Model {
    Normal(NormalParams),
    Rlnd(RlndParams),
}

impl Model {
    pub fn cdf(&self, y: f64) -> f64 {
        match self {
            Model::Normal(p) => p.cdf(y),
            Model::Rlnd(p) => p.cdf(y),
        }
    }

    /// Tail limits: (lower, upper).
    pub fn tail_limits(&self) -> (f64, f64) {
        match self {
            Model::Normal(_) => (0.0, 1.0),
            Model::Rlnd(p) => {
                let m = p.mass_report();
                (m.lower_mass, m.upper_mass)
            }
        }
    }
}

/// Binned observations with relative frequencies.
#[derive(Debug, Clone)]
pub struct BinnedSample {
    /// `m + 1` strictly increasing edges; the first is `-inf`, the last
    /// `+inf`. Bin `i` is the half-open interval `[edges[i], edges[i+1])`.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub n: usize,
    pub q: Vec<f64>,
}

impl BinnedSample {
    pub fn group_count(&self) -> usize {
        self.counts.len()
    }
}

/// Which statistic a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GofVariant {
    Lambda,
    Delta,
    DeltaCcnPaper,
    DeltaCcnStandard,
}

/// Which probabilities sit in the comparative index's denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// The normal model's probabilities, exactly as the index is written.
    Paper,
    /// Each model's own probabilities (ordinary Pearson form).
    Standard,
}

/// A chi-square goodness-of-fit result.
#[derive(Debug, Clone, Serialize)]
pub struct GofReport {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub variant: GofVariant,
    /// Per bin: `(p_i, q_i, contribution)`.
    pub per_bin: Vec<(f64, f64, f64)>,
}

/// Bin the observations.
///
/// Equal-width edges span `mean ± range_multiplier·sd` (the outermost
/// bins are extended to ±inf); equal-probability edges come from the
/// reference model's quantiles when one is given, otherwise from the
/// empirical quantiles. Bins whose expected count under the reference
/// (observed count when absent) falls below the floor are merged from
/// the outside in.
pub fn bin_data(
    data: &[f64],
    spec: &BinningSpec,
    reference: Option<&Model>,
) -> Result<BinnedSample> {
    spec.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let n = data.len();
    let m = spec.group_count_m;

    let mean = data.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };

    let mut edges = Vec::with_capacity(m + 1);
    match spec.mode {
        BinMode::EqualWidth => {
            let lo = mean - spec.range_multiplier * sd;
            let hi = mean + spec.range_multiplier * sd;
            if !(hi > lo) {
                return Err(Error::DegenerateData(
                    "zero sample spread, cannot place bins".into(),
                ));
            }
            edges.push(f64::NEG_INFINITY);
            for i in 1..m {
                edges.push(lo + (hi - lo) * i as f64 / m as f64);
            }
            edges.push(f64::INFINITY);
        }
        BinMode::EqualProbability => {
            edges.push(f64::NEG_INFINITY);
            match reference {
                Some(model) => {
                    let (lo_mass, hi_mass) = model.tail_limits();
                    let mass = hi_mass - lo_mass;
                    for i in 1..m {
                        let u = lo_mass + mass * i as f64 / m as f64;
                        let e = match model {
                            Model::Normal(p) => p.quantile(u)?,
                            Model::Rlnd(p) => p.quantile(u)?,
                        };
                        edges.push(e);
                    }
                }
                None => {
                    let mut sorted = data.to_vec();
                    sorted.sort_by(f64::total_cmp);
                    for i in 1..m {
                        let idx = (i * n / m).min(n - 1);
                        edges.push(sorted[idx]);
                    }
                }
            }
            edges.push(f64::INFINITY);
            edges.dedup();
            if edges.len() < 4 {
                return Err(Error::DegenerateData(
                    "too few distinct quantile edges".into(),
                ));
            }
        }
    }

    let mut counts = vec![0u64; edges.len() - 1];
    for &x in data {
        // half-open [lo, hi) convention
        let i = edges.partition_point(|&e| e <= x) - 1;
        let last = counts.len() - 1;
        counts[i.min(last)] += 1;
    }

    merge_small_bins(&mut edges, &mut counts, n, spec.min_expected_count, reference);

    let q: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(BinnedSample {
        edges,
        counts,
        n,
        q,
    })
}

fn expected_fraction(edges: &[f64], i: usize, reference: Option<&Model>, counts: &[u64], n: usize) -> f64 {
    match reference {
        Some(model) => {
            let lo = if edges[i].is_finite() {
                model.cdf(edges[i])
            } else {
                model.tail_limits().0
            };
            let hi = if edges[i + 1].is_finite() {
                model.cdf(edges[i + 1])
            } else {
                model.tail_limits().1
            };
            hi - lo
        }
        None => counts[i] as f64 / n as f64,
    }
}

fn merge_small_bins(
    edges: &mut Vec<f64>,
    counts: &mut Vec<u64>,
    n: usize,
    min_expected: f64,
    reference: Option<&Model>,
) {
    if min_expected <= 0.0 {
        return;
    }
    let floor = min_expected / n as f64;
    // from the left edge inward
    while counts.len() > 3
        && expected_fraction(edges, 0, reference, counts, n) < floor
    {
        counts[1] += counts[0];
        counts.remove(0);
        edges.remove(1);
    }
    // from the right edge inward
    while counts.len() > 3 && {
        let last = counts.len() - 1;
        expected_fraction(edges, last, reference, counts, n) < floor
    } {
        let last = counts.len() - 1;
        counts[last - 1] += counts[last];
        counts.remove(last);
        edges.remove(edges.len() - 2);
    }
    // remaining undersized interior bins join their smaller neighbor
    loop {
        let mut merged = false;
        for i in 0..counts.len() {
            if counts.len() <= 3 {
                return;
            }
            if expected_fraction(edges, i, reference, counts, n) < floor {
                let j = if i == 0 {
                    1
                } else if i == counts.len() - 1 {
                    i - 1
                } else {
                    let left = expected_fraction(edges, i - 1, reference, counts, n);
                    let right = expected_fraction(edges, i + 1, reference, counts, n);
                    if left <= right {
                        i - 1
                    } else {
                        i + 1
                    }
                };
                let (keep, drop) = if j < i { (j, i) } else { (i, j) };
                counts[keep] += counts[drop];
                counts.remove(drop);
                edges.remove(drop);
                merged = true;
                break;
            }
        }
        if !merged {
            return;
        }
    }
}

/// Bin probabilities of a fitting model over the sample's partition.
///
/// With `renormalize` set, the probabilities are divided by the model's
/// total finite mass so they sum to one; otherwise they sum to exactly
/// that mass.
pub fn model_bin_probs(model: &Model, bins: &BinnedSample, renormalize: bool) -> Vec<f64> {
    let (lo_mass, hi_mass) = model.tail_limits();
    let mass = hi_mass - lo_mass;
    let cdf_at = |e: f64| {
        if e == f64::NEG_INFINITY {
            lo_mass
        } else if e == f64::INFINITY {
            hi_mass
        } else {
            model.cdf(e)
        }
    };
    (0..bins.group_count())
        .map(|i| {
            let p = cdf_at(bins.edges[i + 1]) - cdf_at(bins.edges[i]);
            if renormalize {
                p / mass
            } else {
                p
            }
        })
        .collect()
}

/// Core statistic `Σ (n/p_den_i)(q_i - p_num_i)²` with Fisher's
/// fitted-parameter correction to the degrees of freedom.
fn chi_square_report(
    bins: &BinnedSample,
    num_probs: &[f64],
    den_probs: &[f64],
    fitted_params: usize,
    variant: GofVariant,
) -> Result<GofReport> {
    let m = bins.group_count();
    if num_probs.len() != m || den_probs.len() != m {
        return Err(Error::Domain(format!(
            "probability list length {} does not match {} bins",
            num_probs.len().min(den_probs.len()),
            m
        )));
    }
    for &p in den_probs.iter().chain(num_probs.iter()) {
        if !(p > 0.0) {
            return Err(Error::Domain(format!(
                "bin probabilities must be strictly positive, got {p}"
            )));
        }
    }
    let sum: f64 = num_probs.iter().sum();
    if sum > 1.0 + 1e-9 {
        return Err(Error::Domain(format!(
            "bin probabilities sum to {sum} > 1"
        )));
    }
    if m < fitted_params + 2 {
        return Err(Error::Domain(format!(
            "degrees of freedom {m} - 1 - {fitted_params} must be at least 1"
        )));
    }
    let df = m - 1 - fitted_params;
    let n = bins.n as f64;
    let mut statistic = 0.0;
    let mut per_bin = Vec::with_capacity(m);
    for i in 0..m {
        let contribution = n / den_probs[i] * (bins.q[i] - num_probs[i]).powi(2);
        statistic += contribution;
        per_bin.push((num_probs[i], bins.q[i], contribution));
    }
    Ok(GofReport {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df)?,
        variant,
        per_bin,
    })
}

/// The Pearson statistic against a fixed set of bin probabilities.
///
/// `fitted_params` is Fisher's `r`: the number of parameters estimated
/// from the same data (0 for a fully specified null).
pub fn pearson_lambda(
    bins: &BinnedSample,
    probs: &[f64],
    fitted_params: usize,
) -> Result<GofReport> {
    chi_square_report(bins, probs, probs, fitted_params, GofVariant::Lambda)
}

/// The two comparative fit indices: the normal model's statistic and
/// the modulated model's, in the selected denominator convention.
///
/// Degrees of freedom use `r = 2` for the normal (location and scale
/// fitted) and `r = 4` for the modulated model (two more shape
/// parameters).
pub fn delta_pair(
    bins: &BinnedSample,
    normal_probs: &[f64],
    rlnd_probs: &[f64],
    denominator: Denominator,
) -> Result<(GofReport, GofReport)> {
    let mut delta = chi_square_report(bins, normal_probs, normal_probs, 2, GofVariant::Delta)?;
    delta.variant = GofVariant::Delta;
    let ccn = match denominator {
        Denominator::Paper => {
            chi_square_report(bins, rlnd_probs, normal_probs, 4, GofVariant::DeltaCcnPaper)?
        }
        Denominator::Standard => {
            chi_square_report(bins, rlnd_probs, rlnd_probs, 4, GofVariant::DeltaCcnStandard)?
        }
    };
    Ok((delta, ccn))
}
