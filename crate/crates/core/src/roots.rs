//! Log-spaced bracketing and bisection in `ln x`.

/// `lo, ..., hi` with `per_decade` points per factor of ten; always ends on `hi`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let steps = ((decades * per_decade as f64).ceil() as usize).max(1);
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    (0..=steps)
        .map(|i| {
            if i == steps {
                hi
            } else {
                (ln_lo + (ln_hi - ln_lo) * i as f64 / steps as f64).exp()
            }
        })
        .collect()
}

/// Bisects `f` on `[lo, hi]` in the variable `ln x` until the bracket is
/// narrower than `ln_tol`; `f_lo`, `f_hi` must differ in sign. Returns the
/// geometric midpoint of the final bracket.
pub fn bisect_ln<E, F>(mut f: F, lo: f64, hi: f64, f_lo: f64, f_hi: f64, ln_tol: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    debug_assert!(f_lo.signum() != f_hi.signum() || f_lo == 0.0 || f_hi == 0.0);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut fa = f_lo;
    // 200 halvings exhausts any f64 bracket.
    for _ in 0..200 {
        if b - a <= ln_tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m.exp())?;
        if fm == 0.0 {
            return Ok(m.exp());
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_log_spaced_and_closed() {
        let g = log_grid(1e-3, 10.0, 10);
        assert_eq!(g.len(), 41);
        assert!((g[0] / 1e-3 - 1.0).abs() < 1e-14);
        assert_eq!(*g.last().unwrap(), 10.0);
        let r0 = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-12);
        }
    }

    #[test]
    fn bisection_finds_root_in_log_variable() {
        let f = |x: f64| -> Result<f64, ()> { Ok(x.ln() - 0.3_f64.ln()) };
        let root = bisect_ln(f, 0.01, 1.0, f(0.01).unwrap(), f(1.0).unwrap(), 1e-13).unwrap();
        assert!((root / 0.3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bisection_propagates_errors() {
        let f = |_x: f64| -> Result<f64, &'static str> { Err("boom") };
        assert_eq!(bisect_ln(f, 0.1, 1.0, -1.0, 1.0, 1e-12), Err("boom"));
    }
}
