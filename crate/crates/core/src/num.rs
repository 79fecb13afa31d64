//! Small float helpers shared across modules.

pub(crate) use num_traits::Float;

/// Snapping window for values that should be integers (e.g. `1/c` at a breakpoint).
pub(crate) const SNAP_TOL: f64 = 1e-9;

pub(crate) fn snap_to_integer(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < SNAP_TOL {
        r
    } else {
        x
    }
}

pub(crate) fn snapped_floor(x: f64) -> f64 {
    snap_to_integer(x).floor()
}

pub(crate) fn snapped_ceil(x: f64) -> f64 {
    snap_to_integer(x).ceil()
}

/// `-x log2 x` with `0 log 0 = 0`.
pub(crate) fn neg_xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping() {
        assert_eq!(snapped_floor(2.9999999999), 3.0);
        assert_eq!(snapped_floor(2.99), 2.0);
        assert_eq!(snapped_ceil(3.0000000001), 3.0);
        assert_eq!(snapped_ceil(3.01), 4.0);
        assert_eq!(neg_xlogx(0.0), 0.0);
        assert_eq!(neg_xlogx(0.5), 0.5);
    }
}
