//! Fixed-precision number formatting for report and trajectory files.

/// Formats `x` with 17 significant digits in scientific notation.
///
/// Seventeen digits round-trip every `f64`, and the fixed layout keeps
/// output files byte-stable across runs.
pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    // `-0.0` would otherwise leak a sign into otherwise identical files.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}
