//! Canonical triangular (Minkowski-space) representation of an Ito algebra.
//!
//! The state's Kolmogorov factorization `l(star(a)·b) = k(a)^H k(b)` gives the
//! pre-Hilbert space `K∘` together with the left-multiplication representation
//! `i`. Each element maps to the quadruple `(l, k, k†, i)` arranged as the
//! triangular block matrix
//!
//! ```text
//!     [ 0  k†(a)  l(a) ]
//!     [ 0  i(a)   k(a) ]
//!     [ 0  0      0    ]
//! ```
//!
//! on `C ⊕ K∘ ⊕ C`, with the star realized as the adjoint `G a^H G` for the
//! antidiagonal Minkowski metric `G`.

use crate::algebra::{check_axioms, Element, ItoAlgebra, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, real, CMat, CRow, CVec, C64, ONE, ZERO};

/// Quadruple `(l, k, k†, i)` of one basis element.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadruple {
    pub l: C64,
    pub k: CVec,
    pub kdag: CRow,
    pub a: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalRep {
    gns_dim: usize,
    quotient_map: CMat,
    quadruples: Vec<Quadruple>,
    tol: f64,
}

impl FundamentalRep {
    pub fn gns_dim(&self) -> usize {
        self.gns_dim
    }

    pub fn dim(&self) -> usize {
        self.quadruples.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Kolmogorov map `Q` with `k(a) = Q a` on coefficients.
    pub fn quotient_map(&self) -> &CMat {
        &self.quotient_map
    }

    pub fn quadruples(&self) -> &[Quadruple] {
        &self.quadruples
    }

    /// Gram matrix of `K∘` in the frame used by the quadruples.
    pub fn gram(&self) -> CMat {
        CMat::identity(self.gns_dim, self.gns_dim)
    }

    pub fn metric(&self) -> MinkowskiMetric {
        MinkowskiMetric::new(self.gns_dim)
    }

    fn check_len(&self, x: &Element) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn l(&self, x: &Element) -> C64 {
        self.quadruples.iter().zip(x.0.iter()).map(|(q, v)| q.l * v).sum()
    }

    pub fn k(&self, x: &Element) -> CVec {
        &self.quotient_map * &x.0
    }

    pub fn kdag(&self, x: &Element) -> CRow {
        let mut row = CRow::zeros(self.gns_dim);
        for (q, v) in self.quadruples.iter().zip(x.0.iter()) {
            if *v != ZERO {
                row += &q.kdag * *v;
            }
        }
        row
    }

    /// Operator block `i(x)` on `K∘`.
    pub fn i(&self, x: &Element) -> CMat {
        let mut m = CMat::zeros(self.gns_dim, self.gns_dim);
        for (q, v) in self.quadruples.iter().zip(x.0.iter()) {
            if *v != ZERO {
                m += &q.a * *v;
            }
        }
        m
    }

    /// Matrix `m × n` whose column `j` is `k†(a_j)` transposed, so that its
    /// kernel is the right null ideal `{b : k†(b) = 0}`.
    pub fn kdag_map(&self) -> CMat {
        let mut m = CMat::zeros(self.gns_dim, self.dim());
        for (j, q) in self.quadruples.iter().enumerate() {
            for r in 0..self.gns_dim {
                m[(r, j)] = q.kdag[r];
            }
        }
        m
    }

    /// Whether every operator block vanishes.
    pub fn operator_part_vanishes(&self) -> bool {
        let scale = self.scale();
        self.quadruples
            .iter()
            .all(|q| linalg::max_abs(&q.a) <= self.tol * (1.0 + scale))
    }

    pub(crate) fn scale(&self) -> f64 {
        self.quadruples.iter().fold(0.0, |acc, q| {
            acc.max(q.l.norm())
                .max(linalg::max_abs_vec(&q.k))
                .max(q.kdag.iter().fold(0.0, |a, z| a.max(z.norm())))
                .max(linalg::max_abs(&q.a))
        })
    }

    /// Assemble a representation from explicit quadruples, e.g. ones read back
    /// from a triangular Krein representation.
    pub fn from_parts(quotient_map: CMat, quadruples: Vec<Quadruple>, tol: f64) -> Result<Self> {
        let m = quotient_map.nrows();
        if quotient_map.ncols() != quadruples.len() {
            return Err(Error::DimensionMismatch {
                expected: quadruples.len(),
                found: quotient_map.ncols(),
            });
        }
        for q in &quadruples {
            if q.k.len() != m || q.kdag.len() != m || q.a.shape() != (m, m) {
                return Err(Error::Shape {
                    field: "quadruple".into(),
                    message: format!("blocks must have gns dimension {m}"),
                });
            }
        }
        Ok(FundamentalRep {
            gns_dim: m,
            quotient_map,
            quadruples,
            tol,
        })
    }
}

/// Antidiagonal metric on `C ⊕ K∘ ⊕ C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinkowskiMetric {
    gns_dim: usize,
}

impl MinkowskiMetric {
    pub fn new(gns_dim: usize) -> Self {
        MinkowskiMetric { gns_dim }
    }

    pub fn size(&self) -> usize {
        self.gns_dim + 2
    }

    pub fn matrix(&self) -> CMat {
        let s = self.size();
        let mut g = CMat::zeros(s, s);
        g[(0, s - 1)] = ONE;
        g[(s - 1, 0)] = ONE;
        for i in 1..s - 1 {
            g[(i, i)] = ONE;
        }
        g
    }

    /// `G a^H G`, the adjoint with respect to the metric.
    pub fn adjoint(&self, a: &CMat) -> CMat {
        let g = self.matrix();
        &g * a.adjoint() * &g
    }
}

/// Orthonormal basis of a subspace of the algebra, as coefficient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NullIdealBasis {
    pub basis: Vec<Element>,
}

impl NullIdealBasis {
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix(&self, n: usize) -> CMat {
        let cols: Vec<CVec> = self.basis.iter().map(|e| e.0.clone()).collect();
        linalg::columns(&cols, n)
    }
}

fn require_axioms(alg: &ItoAlgebra) -> Result<()> {
    let report = check_axioms(alg);
    if report.pass {
        Ok(())
    } else {
        let names: Vec<&str> = report.violations.iter().map(|v| v.axiom).collect();
        Err(Error::AxiomFailure(names.join(", ")))
    }
}

/// `H[i][j] = l(star(a_i)·a_j)`; refuses algebras failing the axioms.
pub fn gram_matrix(alg: &ItoAlgebra) -> Result<CMat> {
    require_axioms(alg)?;
    Ok(alg.gram())
}

/// Largest *-ideal invisible to the state:
/// `{b : l(b) = l(b·a_j) = l(a_i·b) = l(a_i·b·a_j) = 0 for all i, j}`.
pub fn null_ideal(alg: &ItoAlgebra) -> NullIdealBasis {
    let n = alg.dim();
    let ell = alg.state().transpose();
    let lefts: Vec<CMat> = (0..n).map(|i| alg.left_mul_matrix(i)).collect();
    let rights: Vec<CMat> = (0..n).map(|j| alg.right_mul_matrix(j)).collect();
    let mut rows: Vec<CRow> = vec![ell.clone()];
    for r in &rights {
        rows.push(&ell * r);
    }
    for l in &lefts {
        let el = &ell * l;
        rows.push(el.clone());
        for r in &rights {
            rows.push(&el * r);
        }
    }
    let mut m = CMat::zeros(rows.len(), n);
    for (i, r) in rows.iter().enumerate() {
        m.set_row(i, r);
    }
    let ns = linalg::null_space(&m, alg.tol());
    NullIdealBasis {
        basis: ns.column_iter().map(|c| Element(c.into_owned())).collect(),
    }
}

/// Quotient by the null ideal. The quotient keeps a subset of the original
/// basis (chosen greedily in order), so labels carry over. Returns the
/// quotient and the coefficient projection `P` (quotient dim × n).
pub fn quotient_faithful(alg: &ItoAlgebra) -> Result<(ItoAlgebra, CMat)> {
    let n = alg.dim();
    let ideal = null_ideal(alg);
    if ideal.is_empty() {
        return Ok((alg.clone(), CMat::identity(n, n)));
    }
    let tol = alg.tol();
    let mut cols: Vec<CVec> = ideal.basis.iter().map(|e| e.0.clone()).collect();
    let mut selected = Vec::new();
    for i in 0..n {
        if cols.len() == n {
            break;
        }
        let mut trial = cols.clone();
        trial.push(alg.basis_element(i).0);
        if linalg::rank(&linalg::columns(&trial, n), tol) == trial.len() {
            cols = trial;
            selected.push(i);
        }
    }
    let s = selected.len();
    // columns: ideal first, then selected basis vectors
    let full = linalg::columns(&cols, n);
    let inv = full
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Presentation("quotient complement is singular".into()))?;
    let r = ideal.len();
    let proj = inv.rows(r, s).into_owned();
    let lift = CMat::from_fn(n, s, |row, col| if row == selected[col] { ONE } else { ZERO });

    let mut mul = vec![ZERO; s * s * s];
    for p in 0..s {
        for q in 0..s {
            let prod = alg.mul_unchecked(&alg.basis_element(selected[p]), &alg.basis_element(selected[q]));
            let coords = &proj * &prod.0;
            for t in 0..s {
                mul[(p * s + q) * s + t] = coords[t];
            }
        }
    }
    let star = &proj * alg.star_matrix() * &lift;
    let death = Element(&proj * &alg.death().0);
    let state = (alg.state().transpose() * &lift).transpose();
    let labels = selected.iter().map(|&i| alg.labels()[i].clone()).collect();
    let q = ItoAlgebra::new(labels, mul, star, death, state)?.with_tol(tol);
    Ok((q, proj))
}

/// Factor `H = Q^H Q` with `Q` of full row rank `m`, in a canonical frame: the
/// rows of `Q` are obtained by Gram-Schmidt over the basis images in basis
/// order, so pivots are real and positive.
pub(crate) fn kolmogorov_factor(h: &CMat, tol: f64) -> CMat {
    kolmogorov_factor_with_floor(h, tol, 0.0)
}

/// As [`kolmogorov_factor`], with eigenvalues below `tol·reference` dropped
/// even when they dominate the spectrum.
pub(crate) fn kolmogorov_factor_with_floor(h: &CMat, tol: f64, reference: f64) -> CMat {
    let n = h.nrows();
    let (eigs, vecs) = linalg::hermitian_eigen(h);
    let lmax = eigs.iter().copied().fold(0.0, f64::max);
    let cut = linalg::rank_threshold(lmax.max(reference), tol);
    if lmax <= cut {
        return CMat::zeros(0, n);
    }
    let keep: Vec<usize> = (0..n).filter(|&i| eigs[i] > cut).collect();
    let r = keep.len();
    let mut q0 = CMat::zeros(r, n);
    for (row, &i) in keep.iter().enumerate() {
        let s = eigs[i].sqrt();
        for col in 0..n {
            q0[(row, col)] = vecs[(col, i)].conj() * s;
        }
    }

    let smax = lmax.sqrt();
    let mut frame: Vec<CVec> = Vec::with_capacity(r);
    let residual = |v: &CVec, frame: &[CVec]| {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in frame {
                let proj = u.dotc(&w);
                w -= u * proj;
            }
        }
        w
    };
    for col in 0..n {
        if frame.len() == r {
            break;
        }
        let w = residual(&q0.column(col).into_owned(), &frame);
        let norm = w.norm();
        if norm > tol * smax.max(1.0) * 1e3 {
            frame.push(w / real(norm));
        }
    }
    while frame.len() < r {
        // fallback for ill-conditioned orderings: take the largest residual
        let (w, norm) = (0..n)
            .map(|col| {
                let w = residual(&q0.column(col).into_owned(), &frame);
                let nrm = w.norm();
                (w, nrm)
            })
            .fold((CVec::zeros(r), -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        frame.push(w / real(norm));
    }
    let mut u = CMat::zeros(r, r);
    for (row, f) in frame.iter().enumerate() {
        for col in 0..r {
            u[(row, col)] = f[col].conj();
        }
    }
    u * q0
}

/// Build the canonical quadruples of a faithful algebra.
pub fn gns_build(alg: &ItoAlgebra) -> Result<FundamentalRep> {
    require_axioms(alg)?;
    let ideal = null_ideal(alg);
    if !ideal.is_empty() {
        return Err(Error::NotFaithful(ideal.len()));
    }
    let n = alg.dim();
    let tol = alg.tol();
    let q = kolmogorov_factor(&alg.gram(), tol);
    let m = q.nrows();
    let q_pinv = linalg::pinv(&q, tol);
    let qnorm = linalg::max_abs(&q);

    let mut quadruples = Vec::with_capacity(n);
    for i in 0..n {
        let left = alg.left_mul_matrix(i);
        let ql = &q * &left;
        let a = &ql * &q_pinv;
        let residual = linalg::max_abs(&(&a * &q - &ql));
        let scale = 1.0 + qnorm * linalg::max_abs(&left).max(1.0);
        if residual > tol * scale {
            return Err(Error::IllDefinedRepresentation {
                label: alg.labels()[i].clone(),
                residual,
            });
        }
        let star_i = alg.star_matrix().column(i).into_owned();
        let kdag = (&q * star_i).adjoint();
        quadruples.push(Quadruple {
            l: alg.state()[i],
            k: q.column(i).into_owned(),
            kdag,
            a,
        });
    }
    Ok(FundamentalRep {
        gns_dim: m,
        quotient_map: q,
        quadruples,
        tol,
    })
}

/// Triangular block matrix of `x` on `C ⊕ K∘ ⊕ C`.
pub fn fundamental_matrix(rep: &FundamentalRep, x: &Element) -> Result<CMat> {
    rep.check_len(x)?;
    let m = rep.gns_dim;
    let mut out = CMat::zeros(m + 2, m + 2);
    out[(0, m + 1)] = rep.l(x);
    let kdag = rep.kdag(x);
    let k = rep.k(x);
    for j in 0..m {
        out[(0, j + 1)] = kdag[j];
        out[(j + 1, m + 1)] = k[j];
    }
    out.view_mut((1, 1), (m, m)).copy_from(&rep.i(x));
    Ok(out)
}

/// Representation on a space with a Hermitian, possibly indefinite metric
/// `J`, with inner product `(x|y) = x^H J y`.
#[derive(Debug, Clone, PartialEq)]
pub struct KreinRep {
    pub metric: CMat,
    pub reps: Vec<CMat>,
    pub cyclic: CVec,
    pub tol: f64,
}

impl KreinRep {
    pub fn new(metric: CMat, reps: Vec<CMat>, cyclic: CVec) -> Result<Self> {
        let d = metric.nrows();
        if metric.ncols() != d {
            return Err(Error::Shape {
                field: "metric".into(),
                message: format!("expected {d}×{d}"),
            });
        }
        if cyclic.len() != d || reps.iter().any(|r| r.shape() != (d, d)) {
            return Err(Error::Shape {
                field: "reps".into(),
                message: format!("expected {d}×{d} matrices and a length-{d} cyclic vector"),
            });
        }
        Ok(KreinRep {
            metric,
            reps,
            cyclic,
            tol: DEFAULT_TOL,
        })
    }

    /// The triangular representation itself, on the Minkowski metric with the
    /// cyclic vector `(0, .., 0, 1)`.
    pub fn from_fundamental(rep: &FundamentalRep) -> Self {
        let metric = rep.metric().matrix();
        let n = rep.dim();
        let reps = (0..n)
            .map(|i| fundamental_matrix(rep, &Element::basis(n, i)).expect("basis element"))
            .collect();
        let s = rep.gns_dim + 2;
        let mut cyclic = CVec::zeros(s);
        cyclic[s - 1] = ONE;
        KreinRep {
            metric,
            reps,
            cyclic,
            tol: rep.tol,
        }
    }

    pub fn space_dim(&self) -> usize {
        self.metric.nrows()
    }

    pub fn inner(&self, x: &CVec, y: &CVec) -> C64 {
        x.dotc(&(&self.metric * y))
    }

    pub fn operator(&self, x: &Element) -> CMat {
        let d = self.space_dim();
        let mut m = CMat::zeros(d, d);
        for (r, v) in self.reps.iter().zip(x.0.iter()) {
            if *v != ZERO {
                m += r * *v;
            }
        }
        m
    }

    /// Metric adjoint `J^{-1} R^H J`.
    pub fn adjoint(&self, r: &CMat) -> Option<CMat> {
        let jinv = self.metric.clone().try_inverse()?;
        Some(jinv * r.adjoint() * &self.metric)
    }

    /// Largest defect of multiplicativity, adjointness and the state over
    /// basis elements of `alg`.
    pub fn defect(&self, alg: &ItoAlgebra) -> Result<f64> {
        let n = alg.dim();
        if self.reps.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.reps.len(),
            });
        }
        let mut worst: f64 = linalg::hermiticity_defect(&self.metric);
        for i in 0..n {
            let ai = alg.basis_element(i);
            for j in 0..n {
                let prod = alg.mul_unchecked(&ai, &alg.basis_element(j));
                let d = linalg::max_abs(&(&self.reps[i] * &self.reps[j] - self.operator(&prod)));
                worst = worst.max(d);
            }
            let adj = self
                .adjoint(&self.reps[i])
                .ok_or_else(|| Error::NonMinimal("metric is singular".into()))?;
            worst = worst.max(linalg::max_abs(&(adj - self.operator(&alg.star_unchecked(&ai)))));
            let l = self.inner(&self.cyclic, &(&self.reps[i] * &self.cyclic));
            worst = worst.max((l - alg.state()[i]).norm());
        }
        Ok(worst)
    }
}

/// Bring a minimal Krein-space representation into canonical triangular
/// form. Returns the quadruples and the basis change `B = [k_-, K∘ frame, k_+]`
/// with `B^{-1} R_i B` triangular.
pub fn canonicalize_representation(kr: &KreinRep, death: &Element) -> Result<(FundamentalRep, CMat)> {
    let d = kr.space_dim();
    let n = kr.reps.len();
    let tol = kr.tol;
    if death.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: death.len(),
        });
    }
    let jnorm = linalg::norm2(&kr.metric);
    if linalg::hermiticity_defect(&kr.metric) > tol * (1.0 + jnorm) {
        return Err(Error::Shape {
            field: "metric".into(),
            message: "metric is not Hermitian".into(),
        });
    }
    if linalg::rank(&kr.metric, tol) < d {
        return Err(Error::NonMinimal("metric is singular".into()));
    }

    let k_minus = kr.operator(death) * &kr.cyclic;
    let kk = kr.inner(&kr.cyclic, &kr.cyclic);
    let k_plus = if kk.norm() > tol * (1.0 + kr.cyclic.norm_squared() * jnorm) {
        &kr.cyclic - &k_minus * (kk * real(0.5))
    } else {
        kr.cyclic.clone()
    };

    let ls: Vec<C64> = kr.reps.iter().map(|r| kr.inner(&k_plus, &(r * &k_plus))).collect();
    let vs: Vec<CVec> = kr
        .reps
        .iter()
        .zip(&ls)
        .map(|(r, l)| r * &k_plus - &k_minus * *l)
        .collect();
    let v = linalg::columns(&vs, d);
    let h = v.adjoint() * &kr.metric * &v;
    let hnorm = linalg::norm2(&h);
    let (eigs, _) = linalg::hermitian_eigen(&h);
    if let Some(&lowest) = eigs.first() {
        if lowest < -tol * (1.0 + hnorm) {
            return Err(Error::NonMinimal(format!(
                "central block has negative norm (eigenvalue {lowest:e})"
            )));
        }
    }
    let rscale = kr.reps.iter().map(linalg::norm2).fold(0.0, f64::max);
    let q = kolmogorov_factor_with_floor(&h, tol, (rscale * k_plus.norm()).powi(2) * jnorm);
    let m = q.nrows();
    let frame = &v * linalg::pinv(&q, tol);
    let vscale = linalg::max_abs(&v);
    let degenerate = linalg::max_abs(&(&v - &frame * &q));
    if degenerate > tol * 1e2 * (1.0 + vscale) {
        return Err(Error::NonMinimal(format!(
            "metric is degenerate on the cyclic subspace (residual {degenerate:e})"
        )));
    }
    if d != m + 2 {
        return Err(Error::NonMinimal(format!(
            "representation space has dimension {d}, the cyclic subspace needs {}",
            m + 2
        )));
    }

    let mut basis = CMat::zeros(d, d);
    basis.set_column(0, &k_minus);
    for j in 0..m {
        basis.set_column(j + 1, &frame.column(j));
    }
    basis.set_column(d - 1, &k_plus);
    let inv = basis
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NonMinimal("canonical basis is singular".into()))?;

    let mut quadruples = Vec::with_capacity(n);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for (r, l) in kr.reps.iter().zip(&ls) {
        let t = &inv * r * &basis;
        scale = scale.max(linalg::max_abs(&t));
        for i in 0..d {
            worst = worst.max(t[(i, 0)].norm()).max(t[(d - 1, i)].norm());
        }
        worst = worst.max((t[(0, d - 1)] - l).norm());
        quadruples.push(Quadruple {
            l: *l,
            k: t.view((1, d - 1), (m, 1)).column(0).into_owned(),
            kdag: t.view((0, 1), (1, m)).row(0).into_owned(),
            a: t.view((1, 1), (m, m)).into_owned(),
        });
    }
    if worst > tol * 1e2 * scale {
        return Err(Error::NonMinimal(format!(
            "representation does not reduce to triangular form (residual {worst:e})"
        )));
    }
    let rep = FundamentalRep::from_parts(q, quadruples, tol)?;
    Ok((rep, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraBuilder;
    use crate::linalg::c;

    fn wiener() -> ItoAlgebra {
        AlgebraBuilder::new(["d_t", "d_w"])
            .death(0)
            .product(1, 1, 0, ONE)
            .build()
            .unwrap()
    }

    fn hp() -> ItoAlgebra {
        // d_t, e_-, e^+, e
        AlgebraBuilder::new(["d_t", "e_-", "e^+", "e"])
            .death(0)
            .star_pair(1, 2)
            .product(1, 2, 0, ONE)
            .product(1, 3, 1, ONE)
            .product(3, 2, 2, ONE)
            .product(3, 3, 3, ONE)
            .build()
            .unwrap()
    }

    fn zero_intensity() -> ItoAlgebra {
        AlgebraBuilder::new(["d_t", "e"])
            .death(0)
            .product(1, 1, 1, ONE)
            .build()
            .unwrap()
    }

    #[test]
    fn wiener_gram_by_hand() {
        let h = gram_matrix(&wiener()).unwrap();
        assert_eq!(h, CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]));
    }

    #[test]
    fn newton_gram_is_zero() {
        let a = AlgebraBuilder::new(["d_t"]).death(0).build().unwrap();
        assert_eq!(gram_matrix(&a).unwrap(), CMat::zeros(1, 1));
    }

    #[test]
    fn hp_gram_single_entry() {
        let h = gram_matrix(&hp()).unwrap();
        let mut expected = CMat::zeros(4, 4);
        expected[(2, 2)] = ONE;
        assert_eq!(h, expected);
    }

    #[test]
    fn gram_refuses_broken_algebra() {
        let mut a = wiener();
        a.set_constant(1, 1, 0, real(-1.0));
        assert!(matches!(gram_matrix(&a), Err(Error::AxiomFailure(_))));
    }

    #[test]
    fn null_ideal_examples() {
        assert!(null_ideal(&wiener()).is_empty());
        assert!(null_ideal(&hp()).is_empty());
        let ideal = null_ideal(&zero_intensity());
        assert_eq!(ideal.len(), 1);
        let v = &ideal.basis[0].0;
        assert!(v[0].norm() < 1e-14 && (v[1].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quotient_of_faithful_is_identity() {
        let (q, p) = quotient_faithful(&wiener()).unwrap();
        assert_eq!(q, wiener());
        assert_eq!(p, CMat::identity(2, 2));
    }

    #[test]
    fn quotient_of_zero_intensity_is_newton() {
        let (q, p) = quotient_faithful(&zero_intensity()).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(q.labels(), &["d_t".to_string()]);
        assert!(q.constant(0, 0, 0).norm() < 1e-12);
        assert!((q.death().0[0] - ONE).norm() < 1e-12);
        assert!((q.state()[0] - ONE).norm() < 1e-12);
        assert_eq!(p.shape(), (1, 2));
        assert!(check_axioms(&q).pass);
    }

    #[test]
    fn gns_refuses_non_faithful() {
        assert_eq!(gns_build(&zero_intensity()).unwrap_err(), Error::NotFaithful(1));
    }

    #[test]
    fn gns_wiener() {
        let rep = gns_build(&wiener()).unwrap();
        assert_eq!(rep.gns_dim(), 1);
        let q = &rep.quadruples()[1];
        assert!((q.k[0] - ONE).norm() < 1e-14);
        assert!(q.a[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn gns_newton_has_no_central_block() {
        let a = AlgebraBuilder::new(["d_t"]).death(0).build().unwrap();
        let rep = gns_build(&a).unwrap();
        assert_eq!(rep.gns_dim(), 0);
        assert_eq!(rep.quadruples()[0].l, ONE);
    }

    #[test]
    fn gns_hp() {
        let rep = gns_build(&hp()).unwrap();
        assert_eq!(rep.gns_dim(), 1);
        let qs = rep.quadruples();
        assert!((qs[3].a[(0, 0)] - ONE).norm() < 1e-14);
        assert!(qs[1].a[(0, 0)].norm() < 1e-14);
        assert!((qs[2].k[0] - ONE).norm() < 1e-14);
        assert!((qs[1].kdag[0] - ONE).norm() < 1e-14);
    }

    #[test]
    fn time_matrix_is_corner() {
        let rep = gns_build(&hp()).unwrap();
        let d = fundamental_matrix(&rep, &Element::basis(4, 0)).unwrap();
        let mut expected = CMat::zeros(3, 3);
        expected[(0, 2)] = ONE;
        assert_eq!(d, expected);
    }

    #[test]
    fn fundamental_matrix_dimension_check() {
        let rep = gns_build(&wiener()).unwrap();
        assert!(fundamental_matrix(&rep, &Element::zeros(3)).is_err());
    }

    #[test]
    fn metric_is_involutive() {
        let g = MinkowskiMetric::new(3).matrix();
        assert_eq!(&g * &g, CMat::identity(5, 5));
        assert_eq!(g.adjoint(), g);
    }

    #[test]
    fn canonicalize_fixed_point() {
        let rep = gns_build(&hp()).unwrap();
        let kr = KreinRep::from_fundamental(&rep);
        let (back, basis) = canonicalize_representation(&kr, &Element::basis(4, 0)).unwrap();
        assert!(linalg::max_abs(&(basis - CMat::identity(3, 3))) < 1e-14);
        for (a, b) in back.quadruples().iter().zip(rep.quadruples()) {
            assert!(linalg::max_abs(&(&a.a - &b.a)) < 1e-14);
            assert!(linalg::max_abs_vec(&(&a.k - &b.k)) < 1e-14);
        }
    }

    #[test]
    fn canonicalize_two_by_two_newton() {
        // d̂_t = (σ3 + iσ1)/2 on C² with metric diag(1, -1); the cyclic vector
        // √2·e_+ has nonzero length and gets shifted along k_-.
        let half = real(0.5);
        let dt = CMat::from_row_slice(2, 2, &[half, c(0.0, 0.5), c(0.0, 0.5), -half]);
        let j = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, real(-1.0)]);
        let k = CVec::from_vec(vec![real(2f64.sqrt()), ZERO]);
        let kr = KreinRep::new(j, vec![dt], k).unwrap();
        let (rep, basis) = canonicalize_representation(&kr, &Element::basis(1, 0)).unwrap();
        assert_eq!(rep.gns_dim(), 0);
        let t = basis.clone().try_inverse().unwrap() * &kr.reps[0] * &basis;
        let expected = CMat::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(linalg::max_abs(&(t - expected)) < 1e-14);
    }

    #[test]
    fn canonicalize_ignores_roundoff_in_empty_center() {
        // Newton on C² conjugated by pseudo-unitaries leaves roundoff debris
        // in the would-be central block
        let rep = gns_build(&crate::catalog::newton()).unwrap();
        let base = KreinRep::from_fundamental(&rep);
        let id = CMat::identity(2, 2);
        for s in 1..=40 {
            let t = s as f64;
            let h = CMat::from_row_slice(
                2,
                2,
                &[
                    real(t.sin()),
                    c(t.cos(), 0.7 * (2.0 * t).sin()),
                    c(t.cos(), -0.7 * (2.0 * t).sin()),
                    real((3.0 * t).cos()),
                ],
            );
            let ix = &base.metric * h * c(0.0, 1.0);
            let w = (&id + &ix) * (&id - &ix).try_inverse().unwrap();
            let winv = w.clone().try_inverse().unwrap();
            let kr = KreinRep::new(
                w.adjoint() * &base.metric * &w,
                vec![&winv * &base.reps[0] * &w],
                &winv * &base.cyclic,
            )
            .unwrap();
            let (canon, _) = canonicalize_representation(&kr, &Element::basis(1, 0)).unwrap();
            assert_eq!(canon.gns_dim(), 0, "conjugation {s}");
        }
    }

    #[test]
    fn canonicalize_rejects_non_minimal() {
        // Wiener rep padded with an extra orthogonal dimension
        let rep = gns_build(&wiener()).unwrap();
        let kr = KreinRep::from_fundamental(&rep);
        let pad = |m: &CMat| {
            let mut p = CMat::zeros(4, 4);
            p.view_mut((0, 0), (3, 3)).copy_from(m);
            p
        };
        let mut j = pad(&kr.metric);
        j[(3, 3)] = ONE;
        let reps = kr.reps.iter().map(pad).collect();
        let mut k = CVec::zeros(4);
        k[2] = ONE;
        let padded = KreinRep::new(j, reps, k).unwrap();
        assert!(matches!(
            canonicalize_representation(&padded, &Element::basis(2, 0)),
            Err(Error::NonMinimal(_))
        ));
    }
}
