//! Bisection on brackets whose endpoint values may be infinite.

use crate::error::{Error, Result};

/// Locates the switch point of a predicate that is `false` at `lo` and
/// `true` at `hi`, narrowing the bracket until its width is at most
/// `tolerance`. Returns the midpoint of the final bracket.
pub fn bisect_predicate<F>(mut pred: F, mut lo: f64, mut hi: f64, tolerance: f64) -> f64
where
    F: FnMut(f64) -> bool,
{
    debug_assert!(tolerance > 0.0);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of `f` on `[lo, hi]` by bisection. `f(lo)` and `f(hi)` must have
/// strictly opposite signs; either may be infinite.
pub fn bisect_root<F>(f: F, lo: f64, hi: f64, tolerance: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tolerance > 0.0) {
        return Err(Error::Domain {
            name: "tolerance",
            range: "(0,inf)",
            value: tolerance,
        });
    }
    let (f_lo, f_hi) = (f(lo), f(hi));
    let rising = f_lo < 0.0 && f_hi > 0.0;
    let falling = f_lo > 0.0 && f_hi < 0.0;
    if !(rising || falling) {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut exact = None;
    let root = bisect_predicate(
        |x| {
            let v = f(x);
            if v == 0.0 {
                exact.get_or_insert(x);
            }
            if rising {
                v >= 0.0
            } else {
                v <= 0.0
            }
        },
        lo,
        hi,
        tolerance,
    );
    Ok(exact.unwrap_or(root))
}
