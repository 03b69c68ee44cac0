//! Integer-order Bessel functions of the first kind.
//!
//! All orders `0..=n` are produced at once by Miller's backward recurrence,
//! normalised with `J0 + 2·Σ J_2k = 1`. Backward recurrence is stable for
//! every order, including `n > x` where the forward direction loses all
//! significant digits.

const RESCALE_ABOVE: f64 = 1e250;

/// `J_order(x)` for any integer order and finite real `x`.
pub fn bessel_j(order: i32, x: f64) -> f64 {
    let n = order.unsigned_abs() as usize;
    let value = bessel_j_table(n, x.abs())[n];
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
    let flips = u32::from(order < 0) + u32::from(x < 0.0);
    if n % 2 == 1 && flips == 1 {
        -value
    } else {
        value
    }
}

/// `[J_0(x), J_1(x), ..., J_max_order(x)]` for `x ≥ 0`.
///
/// # Panics
/// If `x` is negative or not finite.
pub fn bessel_j_table(max_order: usize, x: f64) -> Vec<f64> {
    assert!(x.is_finite() && x >= 0.0, "bessel_j_table needs finite x >= 0, got {x}");
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let span = max_order.max(x.ceil() as usize);
    let mut start = span + 30 + (50.0 * span as f64).sqrt() as usize;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut above = 0.0_f64; // J_{k+1}
    let mut current = 1e-30_f64; // J_k, arbitrary seed
    let mut norm = 0.0_f64;
    for k in (1..=start).rev() {
        if k <= max_order {
            out[k] = current;
        }
        if k % 2 == 0 {
            norm += 2.0 * current;
        }
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            current *= s;
            above *= s;
            norm *= s;
            for v in out.iter_mut().skip(k) {
                *v *= s;
            }
        }
    }
    out[0] = current;
    norm += current;
    for v in &mut out {
        *v /= norm;
    }
    out
}
