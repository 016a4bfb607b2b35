//! Float helpers that `core` does not provide.

/// `b^n` by repeated squaring.
pub(crate) fn powi(b: f64, n: i32) -> f64 {
    let mut exp = n.unsigned_abs();
    let mut base = b;
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    if n < 0 {
        1.0 / acc
    } else {
        acc
    }
}

/// Splits `u` into `(n, t)` with `n + t` as close to `u` as doubles allow and
/// `t` in `[0, 1)`. Normally `n = floor(u)` and the subtraction is exact; a
/// tiny negative `u` rounds `u - floor(u)` up to 1, and then `(floor(u) + 1, 0)`
/// is the nearer split.
pub(crate) fn split_floor(u: f64) -> (i64, f64) {
    let n = libm::floor(u);
    let t = u - n;
    if t >= 1.0 {
        (n as i64 + 1, 0.0)
    } else {
        (n as i64, t)
    }
}

/// Largest double strictly below 1.
pub(crate) const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_multiplication() {
        assert_eq!(powi(3.0, 0), 1.0);
        assert_eq!(powi(3.0, 4), 81.0);
        assert_eq!(powi(2.0, -3), 0.125);
        assert_eq!(powi(-2.0, 3), -8.0);
    }

    #[test]
    fn floor_split() {
        assert_eq!(split_floor(2.75), (2, 0.75));
        assert_eq!(split_floor(-0.25), (-1, 0.75));
        assert_eq!(split_floor(3.0), (3, 0.0));
        assert_eq!(split_floor(-1e-300), (0, 0.0));
        assert_eq!(split_floor(-f64::EPSILON / 4.0), (0, 0.0));
        let (n, t) = split_floor(-f64::EPSILON);
        assert_eq!(n, -1);
        assert!(t < 1.0);
        assert_eq!(ONE_MINUS_ULP.to_bits(), 1f64.to_bits() - 1);
    }
}
