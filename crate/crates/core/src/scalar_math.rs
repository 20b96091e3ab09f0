//! Scalar special functions and bracketed root finding.
//!
//! Every density evaluation in the crate goes through [`lambert_w0_exp`],
//! which works on the logarithm of the Lambert argument so that arguments
//! like `m e^m e^{-(m-1) beta (U - C)}` never have to be formed explicitly.

use crate::error::{Error, Result};

const MAX_ITER: usize = 100;

/// Principal branch `W_0(x)` of the Lambert function for `x >= 0`.
///
/// Halley iteration on `w e^w - x` from a series guess near the origin and a
/// log-asymptotic guess for large arguments.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("lambert_w0 requires finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < 0.25 {
        // W(x) = x - x^2 + 3/2 x^3 - 8/3 x^4 + ...
        x * (1.0 - x * (1.0 - x * (1.5 - x * 8.0 / 3.0)))
    } else if x < std::f64::consts::E {
        (1.0 + x).ln() * 0.8
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(w)
}

/// `W_0(e^z)` evaluated without forming `e^z`.
///
/// Solves `w + ln w = z` for `w > 0`. For `z <= -40` the result is `e^z`,
/// which is exact to double precision there.
pub fn lambert_w0_exp(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("lambert_w0_exp requires finite z, got {z}")));
    }
    if z <= -40.0 {
        return Ok(z.exp());
    }
    let mut w = if z < 1.0 {
        lambert_w0(z.exp())?
    } else {
        // z - ln z is a lower bound of the root for z >= 1 and Newton on the
        // concave residual increases monotonically from below.
        z - z.ln()
    };
    for _ in 0..MAX_ITER {
        let next = w * (1.0 + z - w.ln()) / (1.0 + w);
        let done = (next - w).abs() <= 2.0 * f64::EPSILON * next;
        w = next;
        if done {
            break;
        }
    }
    Ok(w)
}

/// A scalar function together with a bracket and a stopping tolerance.
///
/// `tol` is the residual tolerance on `|f(x)|`; the solver also stops when
/// the bracket shrinks below `x_tol` (defaults to `tol`).
pub struct BracketedFn<F> {
    pub f: F,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub x_tol: f64,
}

impl<F: FnMut(f64) -> f64> BracketedFn<F> {
    pub fn new(f: F, lo: f64, hi: f64, tol: f64) -> Self {
        Self { f, lo, hi, tol, x_tol: tol }
    }

    /// Override the bracket-width stopping criterion; `0.0` means machine
    /// precision so only the residual test terminates early.
    pub fn with_x_tol(mut self, x_tol: f64) -> Self {
        self.x_tol = x_tol;
        self
    }
}

/// Brent's method. Deterministic for fixed inputs.
pub fn find_root<F: FnMut(f64) -> f64>(bf: BracketedFn<F>) -> Result<f64> {
    let BracketedFn { mut f, lo, hi, tol, x_tol } = bf;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("root tolerance must be positive, got {tol}")));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain(format!("non-finite bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi, f_lo: fa, f_hi: fb });
    }
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..500 {
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
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
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Ok(b)
}

/// Brent's method on `[lo, hi]`, doubling the distance of the upper endpoint
/// from `lo` (up to `max_expansions` times) until `f` changes sign.
///
/// Intended for functions increasing in their argument with `f(lo) <= 0`.
pub fn find_root_expanding<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    x_tol: f64,
    max_expansions: usize,
) -> Result<f64> {
    let f_lo = f(lo);
    let mut hi = hi;
    let mut f_hi = f(hi);
    let mut expansions = 0;
    while f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        if expansions == max_expansions {
            return Err(Error::BracketExhausted { lo, hi, expansions, f_lo, f_hi });
        }
        hi = lo + 2.0 * (hi - lo).max(1.0);
        f_hi = f(hi);
        expansions += 1;
    }
    find_root(BracketedFn::new(f, lo, hi, tol).with_x_tol(x_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn newton_oracle(x: f64) -> f64 {
        // plain Newton on w e^w - x, independent of the Halley path
        let mut w = 0.5f64;
        for _ in 0..200 {
            w -= (w * w.exp() - x) / ((1.0 + w) * w.exp());
        }
        w
    }

    #[test]
    fn w0_examples() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        let omega = newton_oracle(1.0);
        assert!((omega - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert!((lambert_w0(1.0).unwrap() - omega).abs() < 1e-15);
        for m in [0.1, 0.5, 2.0, 7.5, 30.0] {
            let w = lambert_w0(m * f64::exp(m)).unwrap();
            assert!((w - m).abs() <= 1e-13 * m.max(1.0), "m={m} w={w}");
        }
    }

    #[test]
    fn w0_rejects_negative() {
        assert!(matches!(lambert_w0(-0.1), Err(Error::Domain(_))));
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn w0_residual_over_decades() {
        for k in -8..=8 {
            let x = 10f64.powi(k);
            let w = lambert_w0(x).unwrap();
            let r = (w * w.exp() - x).abs() / x.max(1.0);
            assert!(r <= 1e-12, "x={x} residual={r}");
        }
    }

    #[test]
    fn w0_exp_examples() {
        assert!((lambert_w0_exp(1.0).unwrap() - 1.0).abs() < 1e-15);
        let w = lambert_w0_exp(-50.0).unwrap();
        assert!(((w - (-50f64).exp()) / (-50f64).exp()).abs() < 1e-12);

        // fixed point w <- 100 - ln w
        let mut oracle = 100.0;
        for _ in 0..200 {
            oracle = 100.0 - f64::ln(oracle);
        }
        let w = lambert_w0_exp(100.0).unwrap();
        assert!((w - oracle).abs() / oracle < 1e-14, "{w} vs {oracle}");
        assert!((w - 95.441_486_6).abs() < 1e-6);
        assert!(lambert_w0_exp(f64::INFINITY).is_err());
    }

    #[test]
    fn w0_exp_matches_direct_evaluation() {
        let mut z = -700.0;
        while z <= 700.0 {
            let a = lambert_w0_exp(z).unwrap();
            let b = lambert_w0(z.exp()).unwrap();
            assert!((a - b).abs() <= 1e-10 * b, "z={z}: {a} vs {b}");
            let residual = (a + a.ln() - z).abs() / z.abs().max(1.0);
            assert!(residual <= 1e-12, "z={z} residual={residual}");
            z += 0.37;
        }
    }

    #[test]
    fn brent_examples() {
        let r = find_root(BracketedFn::new(|x| x - 3.0, 0.0, 10.0, 1e-10)).unwrap();
        assert!((r - 3.0).abs() < 1e-10);
        let r = find_root(BracketedFn::new(|x| x * x - 2.0, 0.0, 2.0, 1e-12)).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn brent_reports_missing_sign_change() {
        let err = find_root(BracketedFn::new(|x| x * x + 1.0, -1.0, 1.0, 1e-10)).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn expanding_bracket_finds_distant_root() {
        let r = find_root_expanding(|x| x - 1000.0, 0.0, 1.0, 1e-10, 0.0, 60).unwrap();
        assert!((r - 1000.0).abs() < 1e-9);
        let err = find_root_expanding(|_| -1.0, 0.0, 1.0, 1e-10, 0.0, 5).unwrap_err();
        assert!(matches!(err, Error::BracketExhausted { expansions: 5, .. }));
    }

    proptest::proptest! {
        #[test]
        fn w0_exp_is_monotone(z in -700.0f64..700.0, dz in 1e-6f64..5.0) {
            let a = lambert_w0_exp(z).unwrap();
            let b = lambert_w0_exp(z + dz).unwrap();
            proptest::prop_assert!(a < b);
        }

        #[test]
        fn w0_is_monotone(x in 0.0f64..1e6, dx in 1e-3f64..10.0) {
            proptest::prop_assert!(lambert_w0(x).unwrap() <= lambert_w0(x + dx).unwrap());
        }
    }
}
