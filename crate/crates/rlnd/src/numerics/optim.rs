//! Bounded Nelder-Mead simplex minimization.
//!
//! Trial points are projected onto the box before evaluation, so the
//! returned optimum always respects the bounds. Fully deterministic.

/// Outcome of a Nelder-Mead run.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(lo, hi);
    }
}

/// Minimize `objective` over the box `bounds` starting from `x0`.
///
/// Standard reflection/expansion/contraction/shrink coefficients
/// (1, 2, 0.5, 0.5). Stops when the simplex collapses below 1e-10 in
/// both coordinates and values, or after `max_iter` iterations (the
/// best point so far is returned with `converged = false`).
pub fn nelder_mead<F>(
    mut objective: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    max_iter: usize,
) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x0.len(), bounds.len());
    let n = x0.len();
    let mut eval = |x: &mut Vec<f64>| {
        project(x, bounds);
        objective(x)
    };

    // initial simplex: x0 plus one vertex per axis, stepped by 5% of the
    // box width (inward if the step would leave the box)
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut first = x0.to_vec();
    let f0 = eval(&mut first);
    simplex.push((first, f0));
    for i in 0..n {
        let (lo, hi) = bounds[i];
        let step = 0.05 * (hi - lo).max(1e-8);
        let mut v = x0.to_vec();
        v[i] = if v[i] + step <= hi { v[i] + step } else { v[i] - step };
        let fv = eval(&mut v);
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));

        let size = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        let spread = simplex[n].1 - simplex[0].1;
        if size < 1e-10 && spread.abs() < 1e-10 {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(v, _)| v[i]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();

        let mut refl: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(c, w)| c + (c - w))
            .collect();
        let f_refl = eval(&mut refl);

        if f_refl < simplex[0].1 {
            let mut exp: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let f_exp = eval(&mut exp);
            simplex[n] = if f_exp < f_refl { (exp, f_exp) } else { (refl, f_refl) };
        } else if f_refl < simplex[n - 1].1 {
            simplex[n] = (refl, f_refl);
        } else {
            let mut contr: Vec<f64> = if f_refl < worst.1 {
                centroid
                    .iter()
                    .zip(&refl)
                    .map(|(c, r)| c + 0.5 * (r - c))
                    .collect()
            } else {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + 0.5 * (w - c))
                    .collect()
            };
            let f_contr = eval(&mut contr);
            if f_contr < worst.1.min(f_refl) {
                simplex[n] = (contr, f_contr);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let mut v: Vec<f64> = entry
                        .0
                        .iter()
                        .zip(&best)
                        .map(|(x, b)| b + 0.5 * (x - b))
                        .collect();
                    let fv = eval(&mut v);
                    *entry = (v, fv);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    NelderMeadResult {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = nelder_mead(
            |x| (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(2),
            &[0.0, 0.0],
            &[(-10.0, 10.0), (-10.0, 10.0)],
            1000,
        );
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-6 && (r.x[1] + 1.0).abs() < 1e-6);
        assert!(r.value < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[(-5.0, 5.0), (-5.0, 5.0)],
            5000,
        );
        assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn minimum_outside_bounds_projects() {
        let r = nelder_mead(
            |x| (x[0] - 3.0).powi(2),
            &[0.5, 0.0],
            &[(0.0, 1.0), (-1.0, 1.0)],
            1000,
        );
        assert!((r.x[0] - 1.0).abs() < 1e-6, "expected boundary optimum, got {}", r.x[0]);
    }

    #[test]
    fn deterministic() {
        let run = || {
            nelder_mead(
                |x| x[0].sin() + (x[1] * 1.3).cos() + 0.01 * x[0] * x[0],
                &[0.3, 0.7],
                &[(-8.0, 8.0), (-8.0, 8.0)],
                2000,
            )
        };
        let a = run();
        let b = run();
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
    }
}
