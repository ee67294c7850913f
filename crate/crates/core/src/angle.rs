//! Degree/radian helpers. Public APIs speak degrees, internals radians.

use std::f64::consts::PI;

#[inline]
pub fn deg_to_rad(deg: f64) -> f64 {
    deg * (PI / 180.0)
}

#[inline]
pub fn rad_to_deg(rad: f64) -> f64 {
    rad * (180.0 / PI)
}

/// Wraps an angle in degrees into (-180, 180].
pub fn wrap_deg(deg: f64) -> f64 {
    let mut w = deg.rem_euclid(360.0);
    if w > 180.0 {
        w -= 360.0;
    }
    w
}

/// Magnitude of the wrapped angle, in [0, 180]. Depends only on `|deg|`,
/// so `abs_wrap_deg(x - y) == abs_wrap_deg(y - x)` bit for bit.
pub fn abs_wrap_deg(deg: f64) -> f64 {
    let d = deg.abs() % 360.0;
    d.min(360.0 - d)
}

/// Wraps an angle in radians into (-pi, pi].
pub fn wrap_rad(rad: f64) -> f64 {
    let mut w = rad.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}
