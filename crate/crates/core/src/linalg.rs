//! Dense complex linear algebra helpers shared by the algebra modules.
//!
//! Every rank decision in the crate goes through [`rank_threshold`]: a singular
//! value counts as nonzero when it exceeds `tol * sigma_max`.

use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type CRow = RowDVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Spectral norm.
pub fn norm2(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn rank_threshold(sigma_max: f64, tol: f64) -> f64 {
    tol * sigma_max
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Full SVD of an `r × n` matrix returning descending singular values (padded
/// with zeros to length `n`) and the complete `n × n` right singular basis as
/// columns.
fn full_right_svd(a: &CMat) -> (Vec<f64>, CMat) {
    let (rows, n) = a.shape();
    let padded = if rows < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (rows, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut v = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let row = v_t.row(i);
        for k in 0..n {
            v[(k, col)] = row[k].conj();
        }
    }
    (sigma, v)
}

/// Orthonormal basis (columns) of the kernel of `a`.
pub fn null_space(a: &CMat, tol: f64) -> CMat {
    let n = a.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return CMat::identity(n, n);
    }
    let (sigma, v) = full_right_svd(a);
    let cut = rank_threshold(sigma[0], tol);
    let rank = if sigma[0] == 0.0 {
        0
    } else {
        sigma.iter().filter(|&&s| s > cut).count()
    };
    v.columns(rank, n - rank).into_owned()
}

pub fn rank(a: &CMat, tol: f64) -> usize {
    let s = singular_values(a);
    match s.first() {
        Some(&smax) if smax > 0.0 => {
            let cut = rank_threshold(smax, tol);
            s.iter().filter(|&&x| x > cut).count()
        }
        _ => 0,
    }
}

/// Orthonormal basis (columns) of the column space of `a`.
pub fn column_space(a: &CMat, tol: f64) -> CMat {
    column_space_with_floor(a, tol, 0.0)
}

/// Column space with the cutoff `tol * max(sigma_max, reference)`, so that a
/// matrix of pure roundoff relative to `reference` has rank zero.
pub fn column_space_with_floor(a: &CMat, tol: f64, reference: f64) -> CMat {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return CMat::zeros(rows, 0);
    }
    // Column space of `a` is the row space of `a^H`, i.e. the right singular
    // vectors of `a^H` with nonzero singular values.
    let (sigma, v) = full_right_svd(&a.adjoint());
    if sigma[0] == 0.0 {
        return CMat::zeros(rows, 0);
    }
    let cut = rank_threshold(sigma[0].max(reference), tol);
    let r = sigma.iter().filter(|&&s| s > cut).count();
    v.columns(0, r).into_owned()
}

/// Moore-Penrose pseudo-inverse with the crate-wide relative cutoff.
pub fn pinv(a: &CMat, tol: f64) -> CMat {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return CMat::zeros(cols, rows);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return CMat::zeros(cols, rows);
    }
    let cut = rank_threshold(smax, tol);
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let mut out = CMat::zeros(cols, rows);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cut {
            let vi = v_t.row(i).adjoint();
            let ui = u.column(i).adjoint();
            out += (vi * ui) * real(1.0 / s);
        }
    }
    out
}

/// Hermitian eigen-decomposition with eigenvalues sorted ascending.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let sym = (h + h.adjoint()) * real(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vecs)
}

pub fn hermiticity_defect(h: &CMat) -> f64 {
    max_abs(&(h - h.adjoint()))
}

/// Orthogonal projector onto the column span of `basis` (orthonormalized first).
pub fn projector(basis: &CMat, tol: f64) -> CMat {
    let n = basis.nrows();
    let q = column_space(basis, tol);
    if q.ncols() == 0 {
        return CMat::zeros(n, n);
    }
    &q * q.adjoint()
}

/// Spectral-norm distance between the orthogonal projectors onto two spans.
/// Zero iff the spans coincide; 1 whenever their dimensions differ.
pub fn subspace_distance(a: &CMat, b: &CMat, tol: f64) -> f64 {
    let pa = projector(a, tol);
    let pb = projector(b, tol);
    norm2(&(pa - pb))
}

/// Stack vectors as the columns of a matrix of height `n`.
pub fn columns(vectors: &[CVec], n: usize) -> CMat {
    let mut m = CMat::zeros(n, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Reduced row-echelon basis of the span of `vectors`, so that spans such as
/// `span{d_w}` come back as the literal basis vector. Rank is decided by SVD.
pub fn echelon_basis(vectors: &[CVec], n: usize, tol: f64) -> Vec<CVec> {
    echelon_basis_with_floor(vectors, n, tol, 0.0)
}

/// [`echelon_basis`] with the rank cutoff floored as in [`column_space_with_floor`].
pub fn echelon_basis_with_floor(vectors: &[CVec], n: usize, tol: f64, reference: f64) -> Vec<CVec> {
    if vectors.is_empty() || n == 0 {
        return Vec::new();
    }
    let ortho = column_space_with_floor(&columns(vectors, n), tol, reference);
    let r = ortho.ncols();
    if r == 0 {
        return Vec::new();
    }
    let mut rows = ortho.transpose();
    let mut pivot_row = 0;
    for col in 0..n {
        if pivot_row == r {
            break;
        }
        let (best, mag) = (pivot_row..r)
            .map(|i| (i, rows[(i, col)].norm()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= tol {
            continue;
        }
        rows.swap_rows(pivot_row, best);
        let p = rows[(pivot_row, col)];
        for k in 0..n {
            rows[(pivot_row, k)] /= p;
        }
        for i in 0..r {
            if i != pivot_row {
                let f = rows[(i, col)];
                if f != ZERO {
                    for k in 0..n {
                        let sub = f * rows[(pivot_row, k)];
                        rows[(i, k)] -= sub;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    (0..pivot_row)
        .map(|i| CVec::from_iterator(n, rows.row(i).iter().map(|z| chop(*z))))
        .collect()
}

/// Zero out real and imaginary parts below `64 ε`.
pub fn chop(z: C64) -> C64 {
    let clean = 64.0 * f64::EPSILON;
    let re = if z.re.abs() < clean { 0.0 } else { z.re };
    let im = if z.im.abs() < clean { 0.0 } else { z.im };
    c(re, im)
}

/// Least-squares solve of `a x = b` via the pseudo-inverse. Returns the
/// minimum-norm solution and the residual `max |a x - b|`.
pub fn lstsq(a: &CMat, b: &CVec, tol: f64) -> (CVec, f64) {
    let x = pinv(a, tol) * b;
    let r = max_abs_vec(&(a * &x - b));
    (x, r)
}
