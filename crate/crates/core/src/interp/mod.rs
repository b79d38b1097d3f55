//! Scattered-data interpolation with the shifted surface spline.
//!
//! The interpolant has the form
//!
//! ```text
//! s(x) = p(x) + sum_j c_j h(x - x_j),    p in P_(m-1),
//! ```
//!
//! with the side conditions `sum_j c_j q(x_j) = 0` for every polynomial `q`
//! of degree below `m`. Coefficients come from the symmetric saddle system
//!
//! ```text
//! [ A  P ] [c]   [y]
//! [ P' 0 ] [b] = [0]
//! ```
//!
//! where `A_ij = h(x_i - x_j)` and `P` holds the graded-lex monomial basis
//! evaluated at the data sites. The system is solved densely with partial
//! pivoting; a pivot below `1e-13 * max|entry|` aborts with a degeneracy
//! error rather than silently returning noise, and the solved system must
//! pass an infinity-norm residual check before an interpolant is returned.

mod linalg;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kernel::eval_h_diff;
use crate::theory::KernelParams;
use crate::Result;

/// A scattered interpolation problem: `N` points in `R^n` with one value per
/// point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScatteredData {
    /// Space dimension.
    pub n: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl ScatteredData {
    pub fn new(n: usize, points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        let data = ScatteredData { n, points, values };
        data.validate()?;
        Ok(data)
    }

    /// Structural checks: consistent dimensions, finite entries, no duplicate
    /// points. (Deserialized documents call this too — serde can't.)
    pub fn validate(&self) -> Result<()> {
        if self.points.len() != self.values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} points but {} values",
                self.points.len(),
                self.values.len()
            )));
        }
        if self.points.is_empty() {
            return Err(Error::InvalidParameter("empty point set".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != self.n {
                return Err(Error::InvalidParameter(format!(
                    "point {i} has dimension {}, expected {}",
                    p.len(),
                    self.n
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("point {i} has a non-finite coordinate")));
            }
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite data value".into()));
        }
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                let d2: f64 = self.points[i]
                    .iter()
                    .zip(&self.points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d2 == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate points at indices {i} and {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// An axis-aligned cube `prod_i [lower_i, lower_i + side]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CubeDomain {
    pub lower: Vec<f64>,
    pub side: f64,
}

impl CubeDomain {
    pub fn new(lower: Vec<f64>, side: f64) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidParameter("cube needs at least one dimension".into()));
        }
        if !(side > 0.0) || !side.is_finite() {
            return Err(Error::InvalidParameter(format!("cube side must be positive, got {side}")));
        }
        if lower.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("cube corner has a non-finite coordinate".into()));
        }
        Ok(CubeDomain { lower, side })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.lower)
                .all(|(v, lo)| *v >= *lo && *v <= *lo + self.side)
    }
}

/// Exponent tuples of all monomials in `dim` variables of total degree at
/// most `degree`, graded-lexicographic: degree-major, and within a degree the
/// *earlier* variables carry the higher exponents first. For `dim = 2`,
/// `degree = 2`: `1, x1, x2, x1^2, x1 x2, x2^2`.
pub fn monomial_exponents(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    fn fixed_total(dim: usize, total: u32, out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>) {
        if dim == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=total).rev() {
            prefix.push(e);
            fixed_total(dim - 1, total - e, out, prefix);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=degree {
        fixed_total(dim, total, &mut out, &mut Vec::new());
    }
    out
}

/// Evaluate the graded-lex monomial basis of `P_degree` at `x`.
pub fn poly_basis(dim: usize, degree: u32, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != dim {
        return Err(Error::InvalidParameter(format!(
            "basis point has dimension {}, expected {dim}",
            x.len()
        )));
    }
    Ok(monomial_exponents(dim, degree)
        .iter()
        .map(|exps| {
            exps.iter()
                .zip(x)
                .map(|(&e, &v)| v.powi(e as i32))
                .product()
        })
        .collect())
}

/// Dimension of `P_degree(R^dim)`: `C(dim + degree, dim)`.
pub fn poly_space_dim(dim: usize, degree: u32) -> usize {
    let mut q = 1usize;
    for j in 1..=dim {
        q = q * (degree as usize + j) / j;
    }
    q
}

/// Solver knobs. Defaults match the acceptance contract; both are
/// overridable (the CLI exposes the residual tolerance).
#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// Residual acceptance: `||A c + P b - y||_inf <= tol (1 + ||y||_inf)`.
    pub residual_tol: f64,
    /// Pivot floor, relative to the max absolute matrix entry.
    pub pivot_floor: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { residual_tol: 1e-8, pivot_floor: 1e-13 }
    }
}

/// A solved interpolant. Serializes to the documented JSON schema
/// (`params`, `centers`, `kernel_coeffs`, `poly_coeffs`,
/// `basis_order: "graded-lex"`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Interpolant {
    pub params: KernelParams,
    pub centers: Vec<Vec<f64>>,
    pub kernel_coeffs: Vec<f64>,
    pub poly_coeffs: Vec<f64>,
    pub basis_order: String,
}

impl Interpolant {
    /// Degree of the polynomial tail, `m - 1`.
    pub fn poly_degree(&self) -> u32 {
        self.params.m() - 1
    }

    /// Structural checks for deserialized documents.
    pub fn validate(&self) -> Result<()> {
        if self.basis_order != "graded-lex" {
            return Err(Error::Format(format!(
                "unsupported basis order {:?} (only \"graded-lex\")",
                self.basis_order
            )));
        }
        KernelParams::new(self.params.n, self.params.lambda, self.params.c)?;
        if self.centers.len() != self.kernel_coeffs.len() {
            return Err(Error::Format(format!(
                "{} centers but {} kernel coefficients",
                self.centers.len(),
                self.kernel_coeffs.len()
            )));
        }
        let q = poly_space_dim(self.params.n, self.poly_degree());
        if self.poly_coeffs.len() != q {
            return Err(Error::Format(format!(
                "expected {q} polynomial coefficients, got {}",
                self.poly_coeffs.len()
            )));
        }
        if self.centers.iter().any(|p| p.len() != self.params.n) {
            return Err(Error::Format("center dimension mismatch".into()));
        }
        Ok(())
    }
}

/// Assemble and solve the saddle system for the given data.
pub fn build_interpolant(
    data: &ScatteredData,
    params: &KernelParams,
    opts: &BuildOptions,
) -> Result<Interpolant> {
    data.validate()?;
    if data.n != params.n {
        return Err(Error::InvalidParameter(format!(
            "data dimension {} does not match kernel dimension {}",
            data.n, params.n
        )));
    }
    let n_pts = data.len();
    let degree = params.m() - 1;
    let q = poly_space_dim(params.n, degree);
    if n_pts < q {
        return Err(Error::InsufficientPoints { required: q, actual: n_pts });
    }

    let size = n_pts + q;
    let mut mat = vec![0.0f64; size * size];
    for i in 0..n_pts {
        for j in 0..=i {
            let v = eval_h_diff(&data.points[i], &data.points[j], params)?;
            mat[i * size + j] = v;
            mat[j * size + i] = v;
        }
        let basis = poly_basis(params.n, degree, &data.points[i])?;
        for (l, &bv) in basis.iter().enumerate() {
            mat[i * size + n_pts + l] = bv;
            mat[(n_pts + l) * size + i] = bv;
        }
    }
    let mut rhs = vec![0.0f64; size];
    rhs[..n_pts].copy_from_slice(&data.values);
    let mat_orig = mat.clone();

    // Equilibrate the polynomial tail. Monomial columns have a scale set by
    // the node coordinates, unrelated to the kernel block's, which can push
    // their pivots far outside the global pivot-floor window even for
    // well-posed systems. Symmetric scaling (tail column and row `l` by
    // `sqrt(kernel scale) / max |column l|`) centers both blocks on a common
    // scale; the solution is unscaled afterwards and the residual check runs
    // on the original matrix.
    let kernel_scale = (0..n_pts)
        .flat_map(|i| (0..n_pts).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max(mat[i * size + j].abs()));
    let mut tail_scale = vec![1.0f64; q];
    for (l, s) in tail_scale.iter_mut().enumerate() {
        let colmax = (0..n_pts).fold(0.0f64, |m, i| m.max(mat[i * size + n_pts + l].abs()));
        if colmax > 0.0 && kernel_scale > 0.0 {
            *s = kernel_scale.sqrt() / colmax;
        }
    }
    for l in 0..q {
        for i in 0..size {
            mat[i * size + n_pts + l] *= tail_scale[l];
            mat[(n_pts + l) * size + i] *= tail_scale[l];
        }
    }

    let scale = mat.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut sol = rhs.clone();
    linalg::lu_solve_in_place(&mut mat, &mut sol, size, opts.pivot_floor, scale).map_err(
        |bd| Error::Degenerate {
            stage: "lu-factorization",
            detail: format!(
                "pivot {:.3e} at elimination step {} is below the floor {:.3e} (= {:.0e} x matrix scale {:.3e})",
                bd.pivot,
                bd.step,
                opts.pivot_floor * scale,
                opts.pivot_floor,
                scale
            ),
        },
    )?;
    for (l, s) in tail_scale.iter().enumerate() {
        sol[n_pts + l] *= s;
    }

    // Residual acceptance on both blocks of the saddle system.
    let y_scale = 1.0 + data.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    for i in 0..size {
        let ax: f64 = (0..size).map(|j| mat_orig[i * size + j] * sol[j]).sum();
        worst = worst.max((ax - rhs[i]).abs());
    }
    if worst > opts.residual_tol * y_scale {
        return Err(Error::Numerical {
            stage: "residual-check",
            detail: format!(
                "saddle-system residual {worst:.3e} exceeds {:.3e}",
                opts.residual_tol * y_scale
            ),
        });
    }

    Ok(Interpolant {
        params: *params,
        centers: data.points.clone(),
        kernel_coeffs: sol[..n_pts].to_vec(),
        poly_coeffs: sol[n_pts..].to_vec(),
        basis_order: "graded-lex".to_string(),
    })
}

/// Evaluate a solved interpolant at `x`.
pub fn eval_interpolant(interp: &Interpolant, x: &[f64]) -> Result<f64> {
    if x.len() != interp.params.n {
        return Err(Error::InvalidParameter(format!(
            "evaluation point has dimension {}, interpolant needs {}",
            x.len(),
            interp.params.n
        )));
    }
    let mut s = 0.0f64;
    for (center, &coef) in interp.centers.iter().zip(&interp.kernel_coeffs) {
        if coef != 0.0 {
            s += coef * eval_h_diff(x, center, &interp.params)?;
        } else {
            // Even zero-weight centers must be well-formed.
            debug_assert_eq!(center.len(), x.len());
        }
    }
    let basis = poly_basis(interp.params.n, interp.poly_degree(), x)?;
    s += basis
        .iter()
        .zip(&interp.poly_coeffs)
        .map(|(b, c)| b * c)
        .sum::<f64>();
    Ok(s)
}

/// Grid estimate of the fill distance `sup_{x in E} min_j |x - x_j|`.
///
/// Evaluates the max-min over a uniform grid with `resolution` points per
/// axis, corners included. The estimate is a *lower* bound on the true fill
/// distance, short of it by at most `sqrt(n) * side / (2 (resolution - 1))`
/// (half the grid-cell diagonal).
pub fn fill_distance(domain: &CubeDomain, centers: &[Vec<f64>], resolution: usize) -> Result<f64> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!(
            "fill-distance grid needs resolution >= 2, got {resolution}"
        )));
    }
    if centers.is_empty() {
        return Err(Error::InvalidParameter("fill distance needs at least one center".into()));
    }
    let dim = domain.dim();
    for (i, c) in centers.iter().enumerate() {
        if c.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "center {i} has dimension {}, domain has {dim}",
                c.len()
            )));
        }
    }
    let step = domain.side / (resolution - 1) as f64;
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0f64; dim];
    let mut max_min2 = 0.0f64;
    loop {
        for (k, &i) in idx.iter().enumerate() {
            x[k] = domain.lower[k] + step * i as f64;
        }
        let mut min2 = f64::INFINITY;
        for c in centers {
            let d2: f64 = c.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < min2 {
                min2 = d2;
            }
        }
        if min2 > max_min2 {
            max_min2 = min2;
        }
        // Odometer increment over the grid indices.
        let mut k = 0;
        loop {
            if k == dim {
                return Ok(max_min2.sqrt());
            }
            idx[k] += 1;
            if idx[k] < resolution {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
