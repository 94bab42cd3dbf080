//! Mechanical verification of the distributional claims: CDF
//! monotonicity scans, the sign condition behind the piecewise-linear
//! case, density positivity, and a finite-difference heat-equation
//! oracle for the defining PDE.

use crate::dist::{HFunction, RlndParams};
use crate::{Error, Result};

/// Outcome of a monotonicity scan.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidityReport {
    pub is_monotone: bool,
    /// Adjacent-pair violations `(y, F(y), y', F(y'))` with `y < y'`
    /// and `F(y) > F(y') + tol`.
    pub violations: Vec<(f64, f64, f64, f64)>,
    pub grid_size: usize,
    pub case2_condition_holds: Option<bool>,
    pub min_derivative_margin: f64,
}

impl std::fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "monotone: {}", self.is_monotone)?;
        writeln!(f, "grid_size: {}", self.grid_size)?;
        match self.case2_condition_holds {
            Some(v) => writeln!(f, "case2_condition_holds: {v}")?,
            None => writeln!(f, "case2_condition_holds: n/a")?,
        }
        writeln!(f, "min_derivative_margin: {:.16e}", self.min_derivative_margin)?;
        writeln!(f, "violations: {}", self.violations.len())?;
        for (y0, f0, y1, f1) in &self.violations {
            writeln!(f, "  F({y0:.16e}) = {f0:.16e} > F({y1:.16e}) = {f1:.16e}")?;
        }
        Ok(())
    }
}

/// Floating-point noise threshold for the monotonicity scan.
const MONOTONE_TOL: f64 = 1e-13;

/// Half-width of the scan grid: twelve effective scales, widened once so
/// that linear growth of `h` is taken into account.
fn scan_halfwidth(p: &RlndParams) -> f64 {
    let h_max = match &p.h {
        HFunction::Case1Tabulated { knots } => {
            knots.iter().map(|&(_, h)| h).fold(0.0f64, f64::max)
        }
        HFunction::Case2Linear { .. } => {
            let r0 = 12.0 * p.sigma * p.h.eval(0.0);
            p.h.eval(-r0).max(p.h.eval(r0))
        }
    };
    12.0 * p.sigma * h_max
}

/// Scan the CDF on a grid for monotonicity violations.
///
/// The grid spans twelve effective scales either side of `μ` and the
/// tail-limit values from the mass report are appended as virtual
/// endpoints, so a CDF that overshoots its own limits is caught too.
pub fn check_monotone_cdf(p: &RlndParams, grid_size: usize) -> Result<ValidityReport> {
    if grid_size < 2 {
        return Err(Error::Domain("grid_size must be at least 2".into()));
    }
    let r = scan_halfwidth(p);
    let mass = p.mass_report();
    let mut violations = Vec::new();

    let mut prev_y = f64::NEG_INFINITY;
    let mut prev_f = mass.lower_mass;
    for i in 0..grid_size {
        let y = p.mu - r + 2.0 * r * i as f64 / (grid_size - 1) as f64;
        let f = p.cdf(y);
        if f < prev_f - MONOTONE_TOL {
            violations.push((prev_y, prev_f, y, f));
        }
        prev_y = y;
        prev_f = f;
    }
    if mass.upper_mass < prev_f - MONOTONE_TOL {
        violations.push((prev_y, prev_f, f64::INFINITY, mass.upper_mass));
    }

    let (case2_holds, min_margin) = match &p.h {
        HFunction::Case2Linear { k_neg, .. } if *k_neg < 0.0 => {
            let rep = verify_case2_derivative_sign(*k_neg, grid_size)?;
            (Some(rep.holds), rep.min_margin)
        }
        _ => (None, f64::NAN),
    };

    Ok(ValidityReport {
        is_monotone: violations.is_empty(),
        violations,
        grid_size,
        case2_condition_holds: case2_holds,
        min_derivative_margin: min_margin,
    })
}

/// Result of the quadratic sign check `K·m² - m - K > 0` on `(1/K, 0]`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Case2SignReport {
    pub holds: bool,
    pub min_margin: f64,
    /// Analytic value at both endpoints, `q(0) = q(1/K) = -K`.
    pub endpoint_value: f64,
}

/// Check the derivative-positivity condition of the negative branch:
/// `q(m) = K·m² - m - K` stays positive on a uniform grid over `(1/K, 0]`.
pub fn verify_case2_derivative_sign(k: f64, samples: usize) -> Result<Case2SignReport> {
    if !(k < 0.0) {
        return Err(Error::Domain(format!(
            "negative-branch slope required, got k={k}"
        )));
    }
    if samples < 2 {
        return Err(Error::Domain("samples must be at least 2".into()));
    }
    let left = 1.0 / k;
    let q = |m: f64| k * m * m - m - k;
    let mut min_margin = f64::INFINITY;
    // open at 1/K, closed at 0
    for i in 1..=samples {
        let m = left + (0.0 - left) * i as f64 / samples as f64;
        min_margin = min_margin.min(q(m));
    }
    Ok(Case2SignReport {
        holds: min_margin > 0.0,
        min_margin,
        endpoint_value: -k,
    })
}

/// Result of the density positivity scan.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FxPositiveReport {
    pub holds: bool,
    pub min_pdf: f64,
    pub left_edge_pdf: f64,
    /// Whether the left grid edge density is below 1e-6 of the density
    /// at the center. The tails fall off like `y^-2`, so an absolute
    /// threshold would depend on the scan width.
    pub edge_decay_ok: bool,
}

/// Scan the density of a piecewise-linear-`h` distribution for strict
/// positivity and left-tail decay.
pub fn verify_fx_positive(p: &RlndParams, grid_size: usize) -> Result<FxPositiveReport> {
    if !matches!(p.h, HFunction::Case2Linear { .. }) {
        return Err(Error::Domain(
            "density positivity scan requires the piecewise linear h".into(),
        ));
    }
    if grid_size < 2 {
        return Err(Error::Domain("grid_size must be at least 2".into()));
    }
    let r = scan_halfwidth(p);
    let mut min_pdf = f64::INFINITY;
    for i in 0..grid_size {
        let y = p.mu - r + 2.0 * r * i as f64 / (grid_size - 1) as f64;
        min_pdf = min_pdf.min(p.pdf(y));
    }
    let left_edge_pdf = p.pdf(p.mu - r);
    Ok(FxPositiveReport {
        holds: min_pdf > 0.0,
        min_pdf,
        left_edge_pdf,
        edge_decay_ok: left_edge_pdf < 1e-6 * p.pdf(p.mu),
    })
}

/// Resolution of one heat-equation solve.
#[derive(Debug, Clone, Copy)]
pub struct HeatSolveSpec {
    pub domain_halfwidth_multiplier: f64,
    pub space_points: usize,
    pub time_steps: usize,
    /// Half-width of the linear ramp replacing the indicator jump;
    /// `None` means one space step.
    pub smoothing_width: Option<f64>,
}

impl Default for HeatSolveSpec {
    fn default() -> Self {
        Self {
            domain_halfwidth_multiplier: 10.0,
            space_points: 4001,
            time_steps: 2000,
            smoothing_width: None,
        }
    }
}

impl HeatSolveSpec {
    fn validate(&self) -> Result<()> {
        if self.space_points < 101 || self.space_points % 2 == 0 {
            return Err(Error::InvalidParams(
                "space_points must be odd and at least 101".into(),
            ));
        }
        if self.time_steps < 10 {
            return Err(Error::InvalidParams("time_steps must be at least 10".into()));
        }
        if !(self.domain_halfwidth_multiplier > 0.0) {
            return Err(Error::InvalidParams(
                "domain_halfwidth_multiplier must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Value of the oracle together with a Richardson-style error estimate.
#[derive(Debug, Clone, Copy)]
pub struct HeatOracleResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// Solve the constant-coefficient heat equation whose diffusivity is
/// frozen at the query point and read off `u(1, 0)`, which must equal
/// the closed-form CDF.
///
/// Implicit trapezoidal (Crank-Nicolson) stepping, central differences,
/// Dirichlet far-field values 1 (left) and 0 (right) matching the
/// smoothed indicator `1_{x ≤ y-μ}`. The error estimate is the change
/// under one full coarsening; if it exceeds 0.01 the solve is rejected.
pub fn heat_equation_oracle(
    p: &RlndParams,
    y: f64,
    spec: &HeatSolveSpec,
) -> Result<HeatOracleResult> {
    spec.validate()?;
    let fine = heat_solve_once(p, y, spec)?;
    let mut coarse_points = (spec.space_points - 1) / 2 + 1;
    if coarse_points % 2 == 0 {
        coarse_points += 1;
    }
    let coarse_spec = HeatSolveSpec {
        space_points: coarse_points,
        time_steps: (spec.time_steps / 2).max(10),
        ..*spec
    };
    let value = if coarse_spec.space_points >= 101 {
        let coarse = heat_solve_once(p, y, &coarse_spec)?;
        HeatOracleResult {
            value: fine,
            error_estimate: (fine - coarse).abs().max(f64::EPSILON),
        }
    } else {
        HeatOracleResult {
            value: fine,
            error_estimate: f64::NAN,
        }
    };
    if value.error_estimate > 0.01 {
        return Err(Error::Unstable {
            estimate: value.error_estimate,
            limit: 0.01,
        });
    }
    Ok(value)
}

fn heat_solve_once(p: &RlndParams, y: f64, spec: &HeatSolveSpec) -> Result<f64> {
    let t_q = y - p.mu;
    let s = p.sigma * p.h.eval(t_q);
    let diffusivity = 0.5 * s * s;
    let halfwidth = t_q.abs() + spec.domain_halfwidth_multiplier * s;
    let n = spec.space_points;
    let dx = 2.0 * halfwidth / (n - 1) as f64;
    let dt = 1.0 / spec.time_steps as f64;
    let ramp = spec.smoothing_width.unwrap_or(dx);

    // initial condition: smoothed indicator, 1 left of the jump
    let mut u: Vec<f64> = (0..n)
        .map(|i| {
            let x = -halfwidth + i as f64 * dx;
            if x <= t_q - ramp {
                1.0
            } else if x >= t_q + ramp {
                0.0
            } else {
                (t_q + ramp - x) / (2.0 * ramp)
            }
        })
        .collect();
    u[0] = 1.0;
    u[n - 1] = 0.0;

    let r = diffusivity * dt / (dx * dx);
    // constant tridiagonal system: (-r/2, 1+r, -r/2) on the interior;
    // forward-elimination coefficients precomputed once
    let m = n - 2;
    let diag = 1.0 + r;
    let off = -0.5 * r;
    let mut cp = vec![0.0f64; m];
    cp[0] = off / diag;
    for i in 1..m {
        cp[i] = off / (diag - off * cp[i - 1]);
    }

    let mut rhs = vec![0.0f64; m];
    for _ in 0..spec.time_steps {
        for i in 0..m {
            let j = i + 1;
            rhs[i] = 0.5 * r * u[j - 1] + (1.0 - r) * u[j] + 0.5 * r * u[j + 1];
        }
        // boundary contributions of the implicit side
        rhs[0] += 0.5 * r * u[0];
        // right boundary is 0, nothing to add
        rhs[0] /= diag;
        for i in 1..m {
            rhs[i] = (rhs[i] - off * rhs[i - 1]) / (diag - off * cp[i - 1]);
        }
        for i in (0..m - 1).rev() {
            rhs[i] -= cp[i] * rhs[i + 1];
        }
        u[1..=m].copy_from_slice(&rhs);
    }

    // x = 0 sits at the center node
    Ok(u[(n - 1) / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::std_normal_cdf;

    fn paper_sp500() -> RlndParams {
        RlndParams::symmetric(0.0, 0.013_445_393_151_679_1, 24.0, 0.5).unwrap()
    }

    #[test]
    fn monotone_case2() {
        let p = RlndParams::symmetric(0.0, 1.0, 24.0, 0.5).unwrap();
        let rep = check_monotone_cdf(&p, 10_000).unwrap();
        assert!(rep.is_monotone, "{rep}");
        assert_eq!(rep.case2_condition_holds, Some(true));
    }

    #[test]
    fn monotone_case1_tent() {
        let h = HFunction::case1_tabulated(vec![(-2.0, 0.3), (0.0, 1.5), (2.0, 0.4)]).unwrap();
        let p = RlndParams::new(0.0, 1.0, h).unwrap();
        let rep = check_monotone_cdf(&p, 10_000).unwrap();
        assert!(rep.is_monotone, "{rep}");
    }

    #[test]
    fn adversarial_h_caught() {
        // h growing on the positive side drags the CDF argument down
        let mut knots = vec![(-0.001, 1.0)];
        for i in 0..=60 {
            let y = i as f64 * 0.05;
            knots.push((y + 1e-9, 1.0 + 5.0 * y * y));
        }
        let h = HFunction::tabulated_unchecked(knots).unwrap();
        let p = RlndParams::new(0.0, 1.0, h).unwrap();
        let rep = check_monotone_cdf(&p, 10_000).unwrap();
        assert!(!rep.is_monotone);
        assert!(!rep.violations.is_empty());
    }

    #[test]
    fn derivative_sign_examples() {
        let rep = verify_case2_derivative_sign(-24.0, 10_000).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.endpoint_value, 24.0);

        assert!(verify_case2_derivative_sign(-0.1, 10_000).unwrap().holds);

        // K = -1: the parabola opens downward, so the grid minimum sits
        // at the m = 0 endpoint where q(0) = -K = 1
        let rep = verify_case2_derivative_sign(-1.0, 10_000).unwrap();
        assert!(rep.holds);
        assert!((rep.min_margin - 1.0).abs() < 1e-3, "min={}", rep.min_margin);

        assert!(verify_case2_derivative_sign(1.0, 100).is_err());
        assert!(verify_case2_derivative_sign(0.0, 100).is_err());
    }

    #[test]
    fn fx_positive_scan() {
        let p = RlndParams::symmetric(0.0, 1.0, 24.0, 0.5).unwrap();
        let rep = verify_fx_positive(&p, 10_000).unwrap();
        assert!(rep.holds);
        assert!(rep.edge_decay_ok, "edge pdf {}", rep.left_edge_pdf);

        let n = RlndParams::symmetric(0.0, 1.0, 0.0, 1.0).unwrap();
        let rep = verify_fx_positive(&n, 10_000).unwrap();
        assert!(rep.holds);
        assert!(rep.min_pdf > 0.0);
    }

    #[test]
    fn heat_oracle_classical() {
        let p = RlndParams::symmetric(0.0, 1.0, 0.0, 1.0).unwrap();
        let spec = HeatSolveSpec::default();
        let r = heat_equation_oracle(&p, 0.0, &spec).unwrap();
        assert!((r.value - 0.5).abs() < 1e-3, "got {}", r.value);
        let r = heat_equation_oracle(&p, 1.0, &spec).unwrap();
        assert!((r.value - std_normal_cdf(1.0)).abs() < 1e-3, "got {}", r.value);
    }

    #[test]
    fn heat_oracle_matches_cdf_on_modulated_params() {
        let p = paper_sp500();
        let spec = HeatSolveSpec::default();
        let r = heat_equation_oracle(&p, 0.01, &spec).unwrap();
        assert!((r.value - p.cdf(0.01)).abs() < 1e-3, "got {}", r.value);
    }

    #[test]
    fn heat_oracle_converges_under_refinement() {
        let p = RlndParams::symmetric(0.0, 1.0, 0.0, 1.0).unwrap();
        let exact = std_normal_cdf(0.7);
        let mut errs = Vec::new();
        for (np, nt) in [(251usize, 60usize), (501, 120), (1001, 240)] {
            let spec = HeatSolveSpec {
                space_points: np,
                time_steps: nt,
                ..Default::default()
            };
            let r = heat_equation_oracle(&p, 0.7, &spec).unwrap();
            errs.push((r.value - exact).abs());
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "errors {errs:?}");
    }

    #[test]
    fn smoothing_sensitivity_within_estimate() {
        let p = paper_sp500();
        let spec = HeatSolveSpec::default();
        let base = heat_equation_oracle(&p, 0.005, &spec).unwrap();
        let dx = {
            let t = 0.005 - p.mu;
            let s = p.sigma * p.h.eval(t);
            2.0 * (t.abs() + 10.0 * s) / (spec.space_points - 1) as f64
        };
        let halved = heat_equation_oracle(
            &p,
            0.005,
            &HeatSolveSpec {
                smoothing_width: Some(dx / 2.0),
                ..spec
            },
        )
        .unwrap();
        assert!(
            (base.value - halved.value).abs() <= base.error_estimate,
            "delta {} vs estimate {}",
            (base.value - halved.value).abs(),
            base.error_estimate
        );
    }

    #[test]
    fn bad_specs_rejected() {
        let p = paper_sp500();
        let spec = HeatSolveSpec {
            space_points: 100,
            ..Default::default()
        };
        assert!(heat_equation_oracle(&p, 0.0, &spec).is_err());
        let spec = HeatSolveSpec {
            time_steps: 5,
            ..Default::default()
        };
        assert!(heat_equation_oracle(&p, 0.0, &spec).is_err());
    }
}
