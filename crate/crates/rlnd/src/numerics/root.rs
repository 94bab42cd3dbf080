//! Bracketed root finding: Brent's method with a bisection guarantee.

use crate::{Error, Result};

/// A sign-changing bracket for root finding.
#[derive(Debug, Clone, Copy)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidParams(format!(
                "bracket requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParams("bracket tol must be positive".into()));
        }
        Ok(Self { lo, hi, tol })
    }
}

/// Find a root of `f` inside `bracket`.
///
/// Brent's combination of inverse quadratic interpolation, secant, and
/// bisection; converges for any continuous `f` with a sign change.
pub fn find_root<F>(f: F, bracket: RootBracket) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut a = bracket.lo;
    let mut b = bracket.hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * bracket.tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // interpolation step
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::std_normal_cdf;

    #[test]
    fn linear_root() {
        let r = find_root(|x| x - 1.0, RootBracket::new(0.0, 2.0, 1e-12).unwrap()).unwrap();
        assert!((r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn normal_cdf_inverse() {
        let r = find_root(
            |x| std_normal_cdf(x) - 0.8413447,
            RootBracket::new(0.0, 2.0, 1e-12).unwrap(),
        )
        .unwrap();
        assert!((r - 1.0).abs() < 1e-6);
    }

    #[test]
    fn no_sign_change() {
        let r = find_root(|x| x * x, RootBracket::new(1.0, 2.0, 1e-12).unwrap());
        assert!(matches!(r, Err(Error::NoSignChange { .. })));
    }
}
