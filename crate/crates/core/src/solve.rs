//! One-dimensional root finding and maximization.

/// Golden ratio conjugate, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `|f(x)|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

/// Root of a function that changes sign on `[lo, hi]`, by bisection.
///
/// Stops when `|f(x)| <= ftol` or the bracket collapses to adjacent floats.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, ftol: f64) -> Root {
    let mut f_lo = f(lo);
    let mut best = Root {
        x: lo,
        residual: f_lo.abs(),
        iterations: 0,
    };
    let f_hi = f(hi);
    if f_hi.abs() < best.residual {
        best.x = hi;
        best.residual = f_hi.abs();
    }
    for it in 1..=200 {
        if best.residual <= ftol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid.abs() < best.residual {
            best = Root {
                x: mid,
                residual: f_mid.abs(),
                iterations: it,
            };
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        best.iterations = it;
    }
    best
}

/// Root of a strictly decreasing, differentiable function bracketed by
/// `f(lo) >= 0 >= f(hi)`. Newton steps are taken while they stay inside the
/// bracket; otherwise the step falls back to bisection.
pub fn safeguarded_newton(
    mut f: impl FnMut(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    ftol: f64,
) -> Root {
    let mut x = lo;
    let (mut fx, mut dfx) = f(x);
    for it in 1..=200 {
        if fx.abs() <= ftol {
            return Root {
                x,
                residual: fx.abs(),
                iterations: it - 1,
            };
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == x || hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            return Root {
                x,
                residual: fx.abs(),
                iterations: it,
            };
        }
        x = next;
        (fx, dfx) = f(x);
    }
    Root {
        x,
        residual: fx.abs(),
        iterations: 200,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
///
/// The endpoints are evaluated too, so a monotone objective returns its edge.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> Maximum {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    while (b - a).abs() > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    let mut best = if fc >= fd {
        Maximum {
            x: c,
            value: fc,
            evaluations,
        }
    } else {
        Maximum {
            x: d,
            value: fd,
            evaluations,
        }
    };
    for edge in [lo, hi] {
        let v = f(edge);
        best.evaluations += 1;
        if v > best.value {
            best.x = edge;
            best.value = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((r.x - 2f64.sqrt()).abs() < 1e-11);
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn newton_matches_bisection() {
        let f = |x: f64| 3.0 - x - x.exp();
        let r = safeguarded_newton(|x| (f(x), -1.0 - x.exp()), 0.0, 3.0, 1e-13);
        let s = bisect(f, 0.0, 3.0, 1e-13);
        assert!((r.x - s.x).abs() < 1e-12);
        assert!(r.iterations < s.iterations);
    }

    #[test]
    fn golden_max_of_parabola() {
        let m = golden_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-9);
        assert!((m.x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn golden_max_monotone_hits_edge() {
        let m = golden_max(|x| x, 0.0, 1.0, 1e-6);
        assert_eq!(m.x, 1.0);
    }
}
