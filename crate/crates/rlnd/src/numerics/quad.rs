//! Globally adaptive Gauss-Kronrod quadrature with semi-infinite and
//! doubly infinite endpoints handled by rational substitution.

use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Tolerances and budget for one integral evaluation.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParams(
                "quadrature tolerances must be strictly positive".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParams(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Integrate `f` over `(lo, hi)`; either endpoint may be infinite.
///
/// Infinite endpoints are mapped onto (0, 1) by `x = a - t/(1-t)` (lower)
/// or `x = a + t/(1-t)` (upper); the doubly infinite case splits at 0.
pub fn integrate<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_dyn(&f, lo, hi, spec)
}

fn integrate_dyn(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => adaptive(&f, lo, hi, spec),
        (false, true) => {
            // x = hi - t/(1-t), t in (0,1); t=0 -> x=hi, t=1 -> x=-inf
            let g = |t: f64| {
                let w = 1.0 - t;
                let x = hi - t / w;
                let fx = f(x);
                if fx == 0.0 {
                    0.0
                } else {
                    fx / (w * w)
                }
            };
            adaptive(&g, 0.0, 1.0, spec)
        }
        (true, false) => {
            let g = |t: f64| {
                let w = 1.0 - t;
                let x = lo + t / w;
                let fx = f(x);
                if fx == 0.0 {
                    0.0
                } else {
                    fx / (w * w)
                }
            };
            adaptive(&g, 0.0, 1.0, spec)
        }
        (false, false) => {
            let half = QuadratureSpec {
                abs_tol: spec.abs_tol / 2.0,
                ..*spec
            };
            let left = integrate_dyn(f, f64::NEG_INFINITY, 0.0, &half)?;
            let right = integrate_dyn(f, 0.0, f64::INFINITY, &half)?;
            Ok(left + right)
        }
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One Gauss-Kronrod 15 application: returns (integral, error estimate).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = kron.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kron += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kron * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    resasc *= half.abs();
    let mut err = ((kron - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0_f64.min((200.0 * err / resasc).powf(1.5));
    }
    let resabs = resabs * half.abs();
    let min_err = 50.0 * f64::EPSILON * resabs;
    if min_err > err {
        err = min_err;
    }
    (kron * half, err)
}

struct Segment {
    err: f64,
    val: f64,
    a: f64,
    b: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    let (val, err) = qk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { err, val, a, b });
    let mut total_val = val;
    let mut total_err = err;
    let mut subdivisions = 0usize;

    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total_val.abs());
        if total_err <= tol {
            return Ok(total_val);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                error: total_err,
                tolerance: tol,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval no longer splittable in f64; accept what we have
            let tol = spec.abs_tol.max(spec.rel_tol * total_val.abs());
            if total_err <= tol.max(1e3 * f64::EPSILON * total_val.abs()) {
                return Ok(total_val);
            }
            return Err(Error::QuadratureNonConvergence {
                error: total_err,
                tolerance: tol,
                subdivisions,
            });
        }
        let (v1, e1) = qk15(f, worst.a, mid);
        let (v2, e2) = qk15(f, mid, worst.b);
        total_val += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            err: e1,
            val: v1,
            a: worst.a,
            b: mid,
        });
        heap.push(Segment {
            err: e2,
            val: v2,
            a: mid,
            b: worst.b,
        });
        subdivisions += 1;
    }
}
