//! One-dimensional bracketing minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Result of a bracketed scalar minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol` or after `max_iter`
/// shrink steps. The endpoints are evaluated too, so a function that is
/// monotone on the bracket reports the correct endpoint.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa_end = f(a);
    let fb_end = f(b);

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > tol && iterations < max_iter {
        if fc <= fd {
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
        iterations += 1;
    }

    let mut best = if fc <= fd {
        Minimum {
            x: c,
            value: fc,
            iterations,
        }
    } else {
        Minimum {
            x: d,
            value: fd,
            iterations,
        }
    };
    for (x, value) in [(lo.min(hi), fa_end), (lo.max(hi), fb_end)] {
        if value < best.value {
            best = Minimum { x, value, iterations };
        }
    }
    best
}
