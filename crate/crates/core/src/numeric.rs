//! Overflow-safe scalar helpers.

/// `(1/(e^x + 1), 1/(e^{−x} + 1))`, both computed from `exp(−|x|)`.
pub fn logistic_pair(x: f64) -> (f64, f64) {
    let e = (-x.abs()).exp();
    let small = e / (1.0 + e);
    let large = 1.0 / (1.0 + e);
    if x >= 0.0 {
        (small, large)
    } else {
        (large, small)
    }
}

/// `sech(x) = 2 e^{−|x|} / (1 + e^{−2|x|})`.
pub fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// Splits `arccos(x)` for `x` given implicitly through `(1 − x)/2` and
/// `(1 + x)/2`, returning `arccos(x) / 2`.
///
/// Both halves are passed separately so callers can evaluate them without
/// cancellation. Negative halves within `tol` are clipped to zero; larger
/// excursions are reported as `Err` with the offending value.
pub fn half_arccos(sin_sq: f64, cos_sq: f64, tol: f64) -> Result<f64, f64> {
    if !(sin_sq.is_finite() && cos_sq.is_finite()) {
        return Err(f64::NAN);
    }
    if sin_sq < -tol {
        return Err(1.0 - 2.0 * sin_sq);
    }
    if cos_sq < -tol {
        return Err(2.0 * cos_sq - 1.0);
    }
    Ok(sin_sq.max(0.0).sqrt().atan2(cos_sq.max(0.0).sqrt()))
}
