//! Small quadrature helpers for the log-power tail laws.

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
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
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// `int_{x0}^{inf} g(x) dx / x`, i.e. `g(e^u)` integrated over `u >= ln x0`.
///
/// `g` must decay at least geometrically in `u`; the remainder past the last
/// unit chunk is extrapolated from the decay rate of the final two chunks.
pub fn integrate_log_tail<G: Fn(f64) -> f64>(g: G, x0: f64) -> f64 {
    let h = |u: f64| g(u.exp());
    let mut u = x0.ln();
    let mut total = 0.0;
    let mut prev_chunk = f64::NAN;
    while u < 700.0 {
        let chunk = simpson(&h, u, u + 1.0, 1e-15);
        total += chunk;
        u += 1.0;
        if chunk.abs() <= 1e-16 * total.abs() {
            return total;
        }
        if prev_chunk.is_finite() && chunk > 0.0 && prev_chunk > chunk && chunk < 1e-6 * total.abs() {
            let ratio = chunk / prev_chunk;
            return total + chunk * ratio / (1.0 - ratio);
        }
        prev_chunk = chunk;
    }
    total
}
