//! Adaptive Simpson quadrature.

/// Integral of `f` over `[a, b]` with its accumulated error estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut err = 0.0;
    let v = recurse(&f, a, b, fa, fm, fb, whole, tol, max_depth, &mut err);
    (v, err)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        *err += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, err)
        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_integral() {
        let (v, e) = adaptive_simpson(|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-13, 40);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
        assert!(e < 1e-10);
    }

    #[test]
    fn oscillatory() {
        let (v, _) = adaptive_simpson(|x: f64| (10.0 * x).cos().powi(2), 0.0, 3.0, 1e-12, 40);
        let exact = 1.5 + (60.0_f64).sin() / 40.0;
        assert!((v - exact).abs() < 1e-10);
    }
}
