/// Relative width at which bisection on Ē stops.
pub const REVERSAL_RTOL: f64 = 1e-3;

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// First Ē where the ordering of two curves on a shared grid flips.
///
/// Points where either curve is missing or the curves touch are skipped.
/// With `diff` (evaluating `a − b` at any Ē) the bracketing interval is
/// bisected to relative width [`REVERSAL_RTOL`], geometrically when it lies
/// in Ē > 0; otherwise the crossing is interpolated linearly.
pub fn detect_reversal(
    grid: &[f64],
    a: &[Option<f64>],
    b: &[Option<f64>],
    diff: Option<&dyn Fn(f64) -> Option<f64>>,
) -> Option<f64> {
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(a.iter().zip(b))
        .filter_map(|(&e, (x, y))| Some((e, (*x)? - (*y)?)))
        .filter(|p| sign(p.1) != 0)
        .collect();
    let w = pts.windows(2).find(|w| sign(w[0].1) != sign(w[1].1))?;
    let ((mut lo, mut f_lo), (mut hi, f_hi)) = (w[0], w[1]);
    let Some(diff) = diff else {
        return Some(lo + (hi - lo) * f_lo / (f_lo - f_hi));
    };
    while hi - lo > REVERSAL_RTOL * hi.abs() {
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let f_mid = match diff(mid) {
            Some(v) => v,
            None => break,
        };
        if f_mid == 0.0 {
            return Some(mid);
        }
        if sign(f_mid) == sign(f_lo) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) })
}
