//! Dense LU solver for the saddle system.
//!
//! The systems here are small (a few hundred unknowns), symmetric but
//! indefinite, and the failure contract matters more than speed: a pivot
//! falling below `floor_rel * scale` must surface as a structured error
//! carrying the elimination step, so callers can report "degenerate point
//! set" with evidence rather than returning garbage coefficients.

/// Why the factorization stopped.
#[derive(Debug)]
pub(crate) struct PivotBreakdown {
    /// Magnitude of the best available pivot at the failing step.
    pub pivot: f64,
    /// Elimination step (column) at which it occurred.
    pub step: usize,
}

/// Solve `A x = b` in place by LU with partial pivoting.
///
/// `a` is `n x n` row-major and is destroyed; `b` is overwritten with the
/// solution. `scale` is the caller's measure of the matrix magnitude (max
/// absolute entry of the *original* matrix); any pivot with magnitude at most
/// `floor_rel * scale` aborts with a [`PivotBreakdown`].
pub(crate) fn lu_solve_in_place(
    a: &mut [f64],
    b: &mut [f64],
    n: usize,
    floor_rel: f64,
    scale: f64,
) -> Result<(), PivotBreakdown> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let floor = floor_rel * scale;
    for k in 0..n {
        // Partial pivoting: pick the largest magnitude in column k at or
        // below the diagonal.
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in (k + 1)..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if !(best > floor) {
            return Err(PivotBreakdown { pivot: best, step: k });
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        let diag = a[k * n + k];
        for i in (k + 1)..n {
            let factor = a[i * n + k] / diag;
            if factor == 0.0 {
                continue;
            }
            a[i * n + k] = 0.0;
            for j in (k + 1)..n {
                a[i * n + j] -= factor * a[k * n + j];
            }
            b[i] -= factor * b[k];
        }
    }
    // Back substitution.
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in (k + 1)..n {
            s -= a[k * n + j] * b[j];
        }
        b[k] = s / a[k * n + k];
    }
    Ok(())
}
