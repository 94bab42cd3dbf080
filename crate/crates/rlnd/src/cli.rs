//! Command-line surface: `fit`, `gof`, `eval`, `check`, `plotdata`,
//! `sample`.
//!
//! Exit codes are a stable contract: 0 success, 1 usage error, 2
//! data/parse error, 3 numerical failure, 4 validity-check failure.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dist::{MassReport, NormalParams, RlndParams};
use crate::fitting::{fit_normal, fit_rlnd, FitObjective, FitSpec};
use crate::gof::{
    bin_data, delta_pair, model_bin_probs, BinMode, BinnedSample, BinningSpec, Denominator,
    GofReport, Model,
};
use crate::ingest::{filter_range, log_returns, read_price_csv, read_returns, write_returns, ReturnSeries};
use crate::validity::{
    check_monotone_cdf, heat_equation_oracle, verify_case2_derivative_sign, verify_fx_positive,
    HeatSolveSpec,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VALIDITY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "rlnd", version, about = "Random limit normal distribution toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// RNG seed for anything stochastic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the normal baseline and the modulated model to return data.
    Fit(FitArgs),
    /// Goodness-of-fit indices for an existing parameter file.
    Gof(GofArgs),
    /// Tabulate CDF/PDF or quantiles for a parameter file.
    Eval(EvalArgs),
    /// Run the validity checks and the heat-equation oracle.
    Check(CheckArgs),
    /// Emit plot-ready densities from previous fit outputs.
    Plotdata(PlotdataArgs),
    /// Draw renormalized samples into a returns file.
    Sample(SampleArgs),
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Input file: a price CSV (by extension `.csv`) or a returns file.
    #[arg(long)]
    input: PathBuf,

    /// Date column name for price CSVs.
    #[arg(long, default_value = "Date")]
    date_col: String,

    /// Price column name; defaults to `Adj Close` when present, else `Close`.
    #[arg(long)]
    price_col: Option<String>,

    /// Inclusive start date (YYYY-MM-DD).
    #[arg(long)]
    from: Option<String>,

    /// Inclusive end date (YYYY-MM-DD).
    #[arg(long)]
    to: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct BinArgs {
    /// Number of groups before merging.
    #[arg(long, default_value_t = 50)]
    bins: usize,

    #[arg(long, value_enum, default_value_t = BinModeArg::EqualWidth)]
    bin_mode: BinModeArg,

    /// Bins span mean ± this many sample standard deviations.
    #[arg(long, default_value_t = 6.0)]
    range_mult: f64,

    /// Merge bins whose expected count falls below this floor.
    #[arg(long, default_value_t = 5.0)]
    min_expected: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum BinModeArg {
    EqualWidth,
    EqualProbability,
}

impl BinArgs {
    fn to_spec(&self) -> BinningSpec {
        BinningSpec {
            mode: match self.bin_mode {
                BinModeArg::EqualWidth => BinMode::EqualWidth,
                BinModeArg::EqualProbability => BinMode::EqualProbability,
            },
            group_count_m: self.bins,
            range_multiplier: self.range_mult,
            min_expected_count: self.min_expected,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum DenominatorArg {
    Paper,
    Standard,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ObjectiveArg {
    DeltaCcnPaper,
    DeltaCcnStandard,
    NegLogLikelihood,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    binning: BinArgs,

    #[arg(long, value_enum, default_value_t = ObjectiveArg::DeltaCcnStandard)]
    objective: ObjectiveArg,

    /// Which variant's per-bin contributions go into bins.tsv; both
    /// variants always appear in the JSON report.
    #[arg(long, value_enum, default_value_t = DenominatorArg::Standard)]
    denominator: DenominatorArg,

    /// Fix K instead of searching.
    #[arg(long)]
    k: Option<f64>,

    /// Fix c instead of searching.
    #[arg(long)]
    c: Option<f64>,

    /// Skip the search entirely; requires --k and --c.
    #[arg(long, default_value_t = false)]
    no_search: bool,

    #[arg(long, default_value_t = 40)]
    grid_res: usize,

    #[arg(long, default_value_t = 200.0)]
    k_max: f64,

    #[arg(long, default_value_t = 5.0)]
    c_max: f64,

    /// Skip the derivative-free polish after the grid search.
    #[arg(long, default_value_t = false)]
    no_polish: bool,

    /// Likelihood objective only: re-fit the location jointly and anchor
    /// the scale to a median/MAD gauge (robust to heavy tails).
    #[arg(long, default_value_t = false)]
    joint: bool,
}

#[derive(Args, Debug)]
struct GofArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    binning: BinArgs,

    /// Parameter file produced by `fit` (or written by hand).
    #[arg(long)]
    params: PathBuf,

    /// Feed unrenormalized bin probabilities (diagnostics only).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    renormalize: bool,

    /// Which variant's per-bin contributions go into bins.tsv; both
    /// variants always appear in the JSON report.
    #[arg(long, value_enum, default_value_t = DenominatorArg::Standard)]
    denominator: DenominatorArg,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    params: PathBuf,

    /// Comma-separated evaluation points: print y, cdf, pdf.
    #[arg(long, value_delimiter = ',')]
    y: Vec<f64>,

    /// Comma-separated probabilities: print p, quantile.
    #[arg(long, value_delimiter = ',')]
    prob: Vec<f64>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    params: PathBuf,

    #[arg(long, default_value_t = 10_000)]
    grid: usize,

    /// Skip the (comparatively slow) heat-equation comparison.
    #[arg(long, default_value_t = false)]
    no_heat: bool,
}

#[derive(Args, Debug)]
struct PlotdataArgs {
    /// Directory holding params.txt, fit.json, and bins.tsv from `fit`.
    #[arg(long)]
    fit_dir: PathBuf,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    params: PathBuf,

    #[arg(long)]
    n: usize,

    /// Output path; defaults to samples.txt in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse argv and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not usage errors
            use clap::error::ErrorKind::*;
            let _ = e.print();
            return match e.kind() {
                DisplayHelp | DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::EmptyData
        | Error::Io(_)
        | Error::DegenerateData(_)
        | Error::InvalidParams(_) => EXIT_DATA,
        Error::QuadratureNonConvergence { .. }
        | Error::Unstable { .. }
        | Error::NoSignChange { .. }
        | Error::OutOfRange { .. }
        | Error::Domain(_) => EXIT_NUMERICAL,
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Fit(args) => cmd_fit(cli, args),
        Command::Gof(args) => cmd_gof(cli, args),
        Command::Eval(args) => cmd_eval(args),
        Command::Check(args) => cmd_check(args),
        Command::Plotdata(args) => cmd_plotdata(cli, args),
        Command::Sample(args) => cmd_sample(cli, args),
    }
}

fn parse_cli_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| Error::Parse {
        line: 0,
        message: format!("bad date `{s}`, expected YYYY-MM-DD"),
    })
}

fn load_returns(args: &InputArgs) -> Result<ReturnSeries> {
    let is_csv = args
        .input
        .extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false);
    if !is_csv {
        return read_returns(&args.input);
    }
    let mut prices = match &args.price_col {
        Some(col) => read_price_csv(&args.input, &args.date_col, col)?,
        None => read_price_csv(&args.input, &args.date_col, "Adj Close")
            .or_else(|_| read_price_csv(&args.input, &args.date_col, "Close"))?,
    };
    if args.from.is_some() || args.to.is_some() {
        let start = args
            .from
            .as_deref()
            .map(parse_cli_date)
            .transpose()?
            .unwrap_or(NaiveDate::MIN);
        let end = args
            .to
            .as_deref()
            .map(parse_cli_date)
            .transpose()?
            .unwrap_or(NaiveDate::MAX);
        prices = filter_range(&prices, start, end);
        if prices.is_empty() {
            eprintln!("warning: date window [{start}, {end}] selects no records");
        }
    }
    log_returns(&prices, &args.input.display().to_string())
}

#[derive(Serialize)]
struct GofSummary {
    statistic: f64,
    df: usize,
    p_value: f64,
}

impl From<&GofReport> for GofSummary {
    fn from(r: &GofReport) -> Self {
        Self {
            statistic: r.statistic,
            df: r.df,
            p_value: r.p_value,
        }
    }
}

#[derive(Serialize)]
struct FitReportJson {
    source: String,
    n: usize,
    mu: f64,
    sigma: f64,
    k: f64,
    c: f64,
    objective: FitObjective,
    objective_value: f64,
    converged: bool,
    trace_len: usize,
    mass: MassReport,
    delta: GofSummary,
    delta_ccn_paper: GofSummary,
    delta_ccn_standard: GofSummary,
}

fn symmetric_kc(params: &RlndParams) -> Result<(f64, f64)> {
    match &params.h {
        crate::dist::HFunction::Case2Linear { k_pos, c, .. } => Ok((*k_pos, *c)),
        _ => Err(Error::Domain("expected the piecewise linear h".into())),
    }
}

fn write_bins_tsv(
    path: &Path,
    bins: &BinnedSample,
    normal_probs: &[f64],
    rlnd_probs: &[f64],
    contributions: &[f64],
) -> Result<()> {
    use std::io::Write;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "edge_lo\tedge_hi\tcount\tq_i\tp_i\tp_i_ccn\tcontribution")?;
    for i in 0..bins.group_count() {
        writeln!(
            f,
            "{:.16e}\t{:.16e}\t{}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}",
            bins.edges[i],
            bins.edges[i + 1],
            bins.counts[i],
            bins.q[i],
            normal_probs[i],
            rlnd_probs[i],
            contributions[i],
        )?;
    }
    Ok(())
}

fn full_gof(
    bins: &BinnedSample,
    normal_probs: &[f64],
    rlnd_probs: &[f64],
) -> Result<(GofReport, GofReport, GofReport)> {
    let (delta, ccn_paper) = delta_pair(bins, normal_probs, rlnd_probs, Denominator::Paper)?;
    let (_, ccn_standard) = delta_pair(bins, normal_probs, rlnd_probs, Denominator::Standard)?;
    Ok((delta, ccn_paper, ccn_standard))
}

fn cmd_fit(cli: &Cli, args: &FitArgs) -> Result<i32> {
    let series = load_returns(&args.input)?;
    let objective = match args.objective {
        ObjectiveArg::DeltaCcnPaper => FitObjective::DeltaCcnPaper,
        ObjectiveArg::DeltaCcnStandard => FitObjective::DeltaCcnStandard,
        ObjectiveArg::NegLogLikelihood => FitObjective::NegLogLikelihood,
    };
    let spec = FitSpec {
        objective,
        k_bounds: match args.k {
            Some(k) => (k, k),
            None => (0.0, args.k_max),
        },
        c_bounds: match args.c {
            Some(c) => (c, c),
            None => (0.01, args.c_max),
        },
        grid_resolution: if args.no_search { 1 } else { args.grid_res },
        polish: !(args.no_polish || args.no_search || (args.k.is_some() && args.c.is_some())),
        joint: args.joint,
        binning: args.binning.to_spec(),
        seed: cli.seed,
    };
    if args.no_search && (args.k.is_none() || args.c.is_none()) {
        return Err(Error::InvalidParams(
            "--no-search requires both --k and --c".into(),
        ));
    }
    let fit = fit_rlnd(&series.values, &spec)?;
    let (k, c) = symmetric_kc(&fit.params)?;
    let normal = fit.normal_baseline.0;

    // reports at the fitted parameters
    let reference = Model::Normal(normal);
    let bins = bin_data(&series.values, &spec.binning, Some(&reference))?;
    let normal_probs = model_bin_probs(&reference, &bins, true);
    let rlnd_probs = model_bin_probs(&Model::Rlnd(fit.params.clone()), &bins, true);
    let (delta, ccn_paper, ccn_standard) = full_gof(&bins, &normal_probs, &rlnd_probs)?;

    std::fs::create_dir_all(&cli.out_dir)?;
    std::fs::write(cli.out_dir.join("params.txt"), fit.params.to_key_value())?;
    let report = FitReportJson {
        source: series.source_label.clone(),
        n: series.n(),
        mu: normal.mu,
        sigma: normal.sigma,
        k,
        c,
        objective,
        objective_value: fit.objective_value,
        converged: fit.converged,
        trace_len: fit.trace.len(),
        mass: fit.params.mass_report(),
        delta: (&delta).into(),
        delta_ccn_paper: (&ccn_paper).into(),
        delta_ccn_standard: (&ccn_standard).into(),
    };
    std::fs::write(
        cli.out_dir.join("fit.json"),
        serde_json::to_string_pretty(&report).expect("serializable") + "\n",
    )?;
    let chosen = match args.denominator {
        DenominatorArg::Paper => &ccn_paper,
        DenominatorArg::Standard => &ccn_standard,
    };
    let contributions: Vec<f64> = chosen.per_bin.iter().map(|&(_, _, c)| c).collect();
    write_bins_tsv(
        &cli.out_dir.join("bins.tsv"),
        &bins,
        &normal_probs,
        &rlnd_probs,
        &contributions,
    )?;
    println!(
        "fit: n={} mu={:.6e} sigma={:.6e} K={:.6} c={:.6} delta={:.6} delta_ccn(paper)={:.6} delta_ccn(standard)={:.6}",
        series.n(),
        normal.mu,
        normal.sigma,
        k,
        c,
        delta.statistic,
        ccn_paper.statistic,
        ccn_standard.statistic
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct GofJson {
    source: String,
    n: usize,
    delta: GofSummary,
    delta_ccn_paper: GofSummary,
    delta_ccn_standard: GofSummary,
}

fn cmd_gof(cli: &Cli, args: &GofArgs) -> Result<i32> {
    let series = load_returns(&args.input)?;
    let params_text = std::fs::read_to_string(&args.params)?;
    let params = RlndParams::from_key_value(&params_text)?;
    let normal = fit_normal(&series.values)?;
    let reference = Model::Normal(normal);
    let spec = args.binning.to_spec();
    let bins = bin_data(&series.values, &spec, Some(&reference))?;
    let normal_probs = model_bin_probs(&reference, &bins, true);
    let rlnd_probs = model_bin_probs(&Model::Rlnd(params.clone()), &bins, args.renormalize);
    let (delta, ccn_paper, ccn_standard) = full_gof(&bins, &normal_probs, &rlnd_probs)?;

    std::fs::create_dir_all(&cli.out_dir)?;
    let report = GofJson {
        source: series.source_label.clone(),
        n: series.n(),
        delta: (&delta).into(),
        delta_ccn_paper: (&ccn_paper).into(),
        delta_ccn_standard: (&ccn_standard).into(),
    };
    std::fs::write(
        cli.out_dir.join("gof.json"),
        serde_json::to_string_pretty(&report).expect("serializable") + "\n",
    )?;
    let chosen = match args.denominator {
        DenominatorArg::Paper => &ccn_paper,
        DenominatorArg::Standard => &ccn_standard,
    };
    let contributions: Vec<f64> = chosen.per_bin.iter().map(|&(_, _, c)| c).collect();
    write_bins_tsv(
        &cli.out_dir.join("bins.tsv"),
        &bins,
        &normal_probs,
        &rlnd_probs,
        &contributions,
    )?;
    println!(
        "gof: delta={:.10e} (df {}, p {:.6e}) delta_ccn(paper)={:.10e} (df {}, p {:.6e}) delta_ccn(standard)={:.10e} (df {}, p {:.6e})",
        delta.statistic,
        delta.df,
        delta.p_value,
        ccn_paper.statistic,
        ccn_paper.df,
        ccn_paper.p_value,
        ccn_standard.statistic,
        ccn_standard.df,
        ccn_standard.p_value
    );
    Ok(EXIT_OK)
}

fn cmd_eval(args: &EvalArgs) -> Result<i32> {
    let params = RlndParams::from_key_value(&std::fs::read_to_string(&args.params)?)?;
    if args.y.is_empty() && args.prob.is_empty() {
        return Err(Error::InvalidParams(
            "provide --y and/or --prob values to evaluate".into(),
        ));
    }
    if !args.y.is_empty() {
        println!("y\tcdf\tpdf");
        for &y in &args.y {
            println!("{:.16e}\t{:.16e}\t{:.16e}", y, params.cdf(y), params.pdf(y));
        }
    }
    if !args.prob.is_empty() {
        println!("p\tquantile");
        for &p in &args.prob {
            match params.quantile(p) {
                Ok(q) => println!("{p:.16e}\t{q:.16e}"),
                Err(Error::OutOfRange { lo, hi, .. }) => {
                    println!("{p:.16e}\tout-of-range ({lo:.16e}, {hi:.16e})");
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_check(args: &CheckArgs) -> Result<i32> {
    let params = RlndParams::from_key_value(&std::fs::read_to_string(&args.params)?)?;
    let mut ok = true;

    let report = check_monotone_cdf(&params, args.grid)?;
    print!("{report}");
    ok &= report.is_monotone;

    if let crate::dist::HFunction::Case2Linear { k_neg, .. } = &params.h {
        if *k_neg < 0.0 {
            let sign = verify_case2_derivative_sign(*k_neg, args.grid)?;
            println!(
                "case2 sign condition: holds={} min_margin={:.6e} endpoint={:.6e}",
                sign.holds, sign.min_margin, sign.endpoint_value
            );
            ok &= sign.holds;
        }
        let pos = verify_fx_positive(&params, args.grid)?;
        println!(
            "density positivity: holds={} min_pdf={:.6e} left_edge_pdf={:.6e}",
            pos.holds, pos.min_pdf, pos.left_edge_pdf
        );
        ok &= pos.holds;
    }

    if !args.no_heat {
        let mass = params.mass_report();
        let spec = HeatSolveSpec::default();
        for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let prob = mass.lower_mass + mass.mass() * frac;
            let y = params.quantile(prob)?;
            let oracle = heat_equation_oracle(&params, y, &spec)?;
            let exact = params.cdf(y);
            let diff = (oracle.value - exact).abs();
            println!(
                "heat oracle at y={y:.6e}: u={:.8e} cdf={exact:.8e} |diff|={diff:.2e} est={:.2e}",
                oracle.value, oracle.error_estimate
            );
            ok &= diff <= 1e-3;
        }
    }

    if ok {
        println!("all checks passed");
        Ok(EXIT_OK)
    } else {
        println!("CHECK FAILED");
        Ok(EXIT_VALIDITY)
    }
}

fn cmd_plotdata(cli: &Cli, args: &PlotdataArgs) -> Result<i32> {
    use std::io::Write;
    let params =
        RlndParams::from_key_value(&std::fs::read_to_string(args.fit_dir.join("params.txt"))?)?;
    let fit_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(args.fit_dir.join("fit.json"))?).map_err(
            |e| Error::Parse {
                line: 0,
                message: format!("fit.json: {e}"),
            },
        )?;
    let normal = NormalParams::new(
        fit_json["mu"].as_f64().ok_or_else(|| Error::Parse {
            line: 0,
            message: "fit.json missing mu".into(),
        })?,
        fit_json["sigma"].as_f64().ok_or_else(|| Error::Parse {
            line: 0,
            message: "fit.json missing sigma".into(),
        })?,
    )?;
    let bins_text = std::fs::read_to_string(args.fit_dir.join("bins.tsv"))?;
    let mut rows: Vec<(f64, f64, f64)> = Vec::new(); // edge_lo, edge_hi, q
    for (i, line) in bins_text.lines().enumerate().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 4 {
            return Err(Error::Parse {
                line: i + 1,
                message: "bins.tsv row too short".into(),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("bad number `{s}`: {e}"),
            })
        };
        rows.push((parse(cols[0])?, parse(cols[1])?, parse(cols[3])?));
    }
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }

    // replace the infinite outer edges by one mean interior width
    let interior_widths: Vec<f64> = rows
        .iter()
        .filter(|r| r.0.is_finite() && r.1.is_finite())
        .map(|r| r.1 - r.0)
        .collect();
    let mean_width = if interior_widths.is_empty() {
        1.0
    } else {
        interior_widths.iter().sum::<f64>() / interior_widths.len() as f64
    };
    let m = rows.len();
    if rows[0].0 == f64::NEG_INFINITY {
        rows[0].0 = rows[0].1 - mean_width;
    }
    if rows[m - 1].1 == f64::INFINITY {
        rows[m - 1].1 = rows[m - 1].0 + mean_width;
    }

    let mass = params.mass_report().mass();
    std::fs::create_dir_all(&cli.out_dir)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(cli.out_dir.join("plotdata.tsv"))?);
    writeln!(f, "bin_center\tobserved_density\tnormal_density\trlnd_density")?;
    for &(lo, hi, q) in &rows {
        let center = 0.5 * (lo + hi);
        let width = hi - lo;
        writeln!(
            f,
            "{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}",
            center,
            q / width,
            normal.pdf(center),
            params.pdf(center) / mass,
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_sample(cli: &Cli, args: &SampleArgs) -> Result<i32> {
    let params = RlndParams::from_key_value(&std::fs::read_to_string(&args.params)?)?;
    let values = params.sample(args.n, cli.seed)?;
    let series = ReturnSeries {
        values,
        source_label: format!("sampled from {} (seed {})", args.params.display(), cli.seed),
        date_range: None,
    };
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| cli.out_dir.join("samples.txt"));
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    write_returns(&series, &out)?;
    println!("wrote {} samples to {}", args.n, out.display());
    Ok(EXIT_OK)
}
