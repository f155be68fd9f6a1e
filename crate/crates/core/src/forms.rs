//! Explicit vacuum and thermal presentations of an algebra.
//!
//! A [`VacuumForm`] assigns every basis element a triple `(α, ζ ⊕ η, A)` with
//! `ζ ∈ K`, `η ∈ K†` and `A` an operator on `K = C^p`, multiplied by the
//! quadruple convolution product. A [`ThermalForm`] assigns pairs `(α, ξ)` with
//! `ξ` in a finite-dimensional *-algebra `D` carrying a Hermitian inner product
//! `⟨·|·⟩_+`. Both carry enough data to rebuild the algebra and to split it
//! without going through the generic decomposition.

use crate::algebra::{Element, ItoAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CRow, CVec, C64, ONE, ZERO};
use crate::representation::FundamentalRep;

#[derive(Debug, Clone, PartialEq)]
pub struct VacuumTriple {
    pub alpha: C64,
    pub zeta: CVec,
    pub eta: CRow,
    pub a: CMat,
}

impl VacuumTriple {
    pub fn zero(p: usize) -> Self {
        VacuumTriple {
            alpha: ZERO,
            zeta: CVec::zeros(p),
            eta: CRow::zeros(p),
            a: CMat::zeros(p, p),
        }
    }

    pub fn product(&self, other: &VacuumTriple) -> VacuumTriple {
        VacuumTriple {
            alpha: (&self.eta * &other.zeta)[0],
            zeta: &self.a * &other.zeta,
            eta: &self.eta * &other.a,
            a: &self.a * &other.a,
        }
    }

    pub fn star(&self) -> VacuumTriple {
        VacuumTriple {
            alpha: self.alpha.conj(),
            zeta: self.eta.adjoint(),
            eta: self.zeta.adjoint(),
            a: self.a.adjoint(),
        }
    }

    fn add_scaled(&mut self, other: &VacuumTriple, s: C64) {
        self.alpha += other.alpha * s;
        self.zeta += &other.zeta * s;
        self.eta += &other.eta * s;
        self.a += &other.a * s;
    }

    /// Flatten as `[α, ζ, η, vec(A)]`.
    pub fn flatten(&self) -> CVec {
        let p = self.zeta.len();
        let mut v = CVec::zeros(1 + 2 * p + p * p);
        v[0] = self.alpha;
        for r in 0..p {
            v[1 + r] = self.zeta[r];
            v[1 + p + r] = self.eta[r];
        }
        for (idx, z) in self.a.iter().enumerate() {
            v[1 + 2 * p + idx] = *z;
        }
        v
    }

    fn distance(&self, other: &VacuumTriple) -> f64 {
        linalg::max_abs_vec(&(self.flatten() - other.flatten()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VacuumForm {
    pub k_dim: usize,
    pub elements: Vec<VacuumTriple>,
}

impl VacuumForm {
    /// Presentation read off the fundamental representation.
    pub fn from_rep(rep: &FundamentalRep) -> Self {
        VacuumForm {
            k_dim: rep.gns_dim(),
            elements: rep
                .quadruples()
                .iter()
                .map(|q| VacuumTriple {
                    alpha: q.l,
                    zeta: q.k.clone(),
                    eta: q.kdag.clone(),
                    a: q.a.clone(),
                })
                .collect(),
        }
    }

    pub fn triple(&self, x: &Element) -> VacuumTriple {
        let mut t = VacuumTriple::zero(self.k_dim);
        for (e, v) in self.elements.iter().zip(x.0.iter()) {
            if *v != ZERO {
                t.add_scaled(e, *v);
            }
        }
        t
    }

    /// Columns are the flattened triples of the basis elements.
    pub fn embedding(&self) -> CMat {
        let cols: Vec<CVec> = self.elements.iter().map(VacuumTriple::flatten).collect();
        linalg::columns(&cols, 1 + 2 * self.k_dim + self.k_dim * self.k_dim)
    }

    /// Largest mismatch between the presentation and `alg` over products,
    /// stars and state values of basis elements.
    pub fn defect(&self, alg: &ItoAlgebra) -> Result<f64> {
        let n = alg.dim();
        if self.elements.len() != n {
            return Err(Error::Presentation(format!(
                "vacuum form lists {} elements, algebra has dimension {n}",
                self.elements.len()
            )));
        }
        let p = self.k_dim;
        for t in &self.elements {
            if t.zeta.len() != p || t.eta.len() != p || t.a.shape() != (p, p) {
                return Err(Error::Presentation(format!("vacuum triple blocks must have size {p}")));
            }
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let ai = alg.basis_element(i);
            for j in 0..n {
                let prod = alg.mul_unchecked(&ai, &alg.basis_element(j));
                worst = worst.max(
                    self.elements[i]
                        .product(&self.elements[j])
                        .distance(&self.triple(&prod)),
                );
            }
            worst = worst.max(self.elements[i].star().distance(&self.triple(&alg.star_unchecked(&ai))));
            worst = worst.max((self.elements[i].alpha - alg.state()[i]).norm());
        }
        Ok(worst)
    }

    pub fn check(&self, alg: &ItoAlgebra) -> Result<()> {
        let d = self.defect(alg)?;
        if d > alg.tol() * (1.0 + self.scale()) {
            return Err(Error::Presentation(format!(
                "vacuum form does not reproduce the algebra (defect {d:e})"
            )));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        linalg::max_abs(&self.embedding())
    }

    /// The vacuum algebra `C d_t ⊕ K ⊕ K† ⊕ A` on basis
    /// `[d_t, e_-.., e^+.., operators..]`, where `operators` spans a *-closed
    /// operator algebra on `K = C^p`.
    pub fn algebra<S: AsRef<str>>(
        p: usize,
        operators: &[CMat],
        operator_labels: &[S],
    ) -> Result<(ItoAlgebra, VacuumForm)> {
        if operator_labels.len() != operators.len() {
            return Err(Error::Shape {
                field: "operator_labels".into(),
                message: format!("expected {} labels", operators.len()),
            });
        }
        if let Some(bad) = operators.iter().find(|a| a.shape() != (p, p)) {
            return Err(Error::Shape {
                field: "operators".into(),
                message: format!("expected {p}×{p}, found {}×{}", bad.nrows(), bad.ncols()),
            });
        }
        let suffix = |r: usize| if p == 1 { String::new() } else { (r + 1).to_string() };
        let mut labels = vec!["d_t".to_string()];
        let mut elements = vec![VacuumTriple {
            alpha: ONE,
            ..VacuumTriple::zero(p)
        }];
        for r in 0..p {
            labels.push(format!("e_-{}", suffix(r)));
            let mut t = VacuumTriple::zero(p);
            t.eta[r] = ONE;
            elements.push(t);
        }
        for r in 0..p {
            labels.push(format!("e^+{}", suffix(r)));
            let mut t = VacuumTriple::zero(p);
            t.zeta[r] = ONE;
            elements.push(t);
        }
        for (a, label) in operators.iter().zip(operator_labels) {
            labels.push(label.as_ref().to_string());
            elements.push(VacuumTriple {
                a: a.clone(),
                ..VacuumTriple::zero(p)
            });
        }
        let form = VacuumForm { k_dim: p, elements };
        let n = form.elements.len();
        let emb = form.embedding();
        let tol = crate::algebra::DEFAULT_TOL;
        if linalg::rank(&emb, tol) != n {
            return Err(Error::Presentation("operators are linearly dependent".into()));
        }
        let pinv = linalg::pinv(&emb, tol);
        let scale = 1.0 + form.scale();
        let coords = |t: &VacuumTriple, what: &str| -> Result<CVec> {
            let v = t.flatten();
            let x = &pinv * &v;
            let r = linalg::max_abs_vec(&(&emb * &x - v));
            if r > tol * scale * scale {
                return Err(Error::Presentation(format!("operator set is not closed under {what}")));
            }
            Ok(x)
        };
        let mut mul = vec![ZERO; n * n * n];
        let mut star = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let x = coords(&form.elements[i].product(&form.elements[j]), "multiplication")?;
                for k in 0..n {
                    mul[(i * n + j) * n + k] = linalg::chop(x[k]);
                }
            }
            star.set_column(i, &coords(&form.elements[i].star(), "adjoints")?.map(linalg::chop));
        }
        let death = Element::basis(n, 0);
        let state = death.0.clone();
        let alg = ItoAlgebra::new(labels, mul, star, death, state)?;
        Ok((alg, form))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalPair {
    pub alpha: C64,
    pub xi: CVec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalForm {
    pub d_dim: usize,
    /// Structure constants of `D`, indexed `(i*q + j)*q + k`.
    pub mul: Vec<C64>,
    /// Antilinear involution on `D`: `ξ⋆ = S conj(ξ)`.
    pub star: CMat,
    /// Hermitian positive-definite Gram matrix of `⟨·|·⟩_+`.
    pub plus_metric: CMat,
    pub elements: Vec<ThermalPair>,
}

impl ThermalForm {
    pub fn d_mul(&self, x: &CVec, y: &CVec) -> CVec {
        let q = self.d_dim;
        let mut out = CVec::zeros(q);
        for i in 0..q {
            for j in 0..q {
                let w = x[i] * y[j];
                if w == ZERO {
                    continue;
                }
                for k in 0..q {
                    out[k] += w * self.mul[(i * q + j) * q + k];
                }
            }
        }
        out
    }

    pub fn d_star(&self, x: &CVec) -> CVec {
        &self.star * x.map(|z| z.conj())
    }

    pub fn plus(&self, x: &CVec, y: &CVec) -> C64 {
        x.dotc(&(&self.plus_metric * y))
    }

    /// `⟨x|y⟩^- = ⟨y⋆|x⋆⟩_+`, antilinear in `x`.
    pub fn minus(&self, x: &CVec, y: &CVec) -> C64 {
        self.plus(&self.d_star(y), &self.d_star(x))
    }

    pub fn pair(&self, x: &Element) -> ThermalPair {
        let mut alpha = ZERO;
        let mut xi = CVec::zeros(self.d_dim);
        for (e, v) in self.elements.iter().zip(x.0.iter()) {
            if *v != ZERO {
                alpha += e.alpha * v;
                xi += &e.xi * *v;
            }
        }
        ThermalPair { alpha, xi }
    }

    pub fn pair_product(&self, x: &ThermalPair, y: &ThermalPair) -> ThermalPair {
        ThermalPair {
            alpha: self.plus(&self.d_star(&x.xi), &y.xi),
            xi: self.d_mul(&x.xi, &y.xi),
        }
    }

    pub fn embedding(&self) -> CMat {
        let q = self.d_dim;
        let mut m = CMat::zeros(1 + q, self.elements.len());
        for (j, e) in self.elements.iter().enumerate() {
            m[(0, j)] = e.alpha;
            for r in 0..q {
                m[(1 + r, j)] = e.xi[r];
            }
        }
        m
    }

    fn pair_distance(a: &ThermalPair, b: &ThermalPair) -> f64 {
        (a.alpha - b.alpha).norm().max(linalg::max_abs_vec(&(&a.xi - &b.xi)))
    }

    pub fn defect(&self, alg: &ItoAlgebra) -> Result<f64> {
        let n = alg.dim();
        let q = self.d_dim;
        if self.elements.len() != n {
            return Err(Error::Presentation(format!(
                "thermal form lists {} elements, algebra has dimension {n}",
                self.elements.len()
            )));
        }
        if self.mul.len() != q * q * q
            || self.star.shape() != (q, q)
            || self.plus_metric.shape() != (q, q)
            || self.elements.iter().any(|e| e.xi.len() != q)
        {
            return Err(Error::Presentation(format!("thermal form blocks must have size {q}")));
        }
        let mut worst: f64 = linalg::hermiticity_defect(&self.plus_metric);
        for i in 0..n {
            let ai = alg.basis_element(i);
            for j in 0..n {
                let prod = alg.mul_unchecked(&ai, &alg.basis_element(j));
                let lhs = self.pair_product(&self.elements[i], &self.elements[j]);
                worst = worst.max(Self::pair_distance(&lhs, &self.pair(&prod)));
            }
            let s = ThermalPair {
                alpha: self.elements[i].alpha.conj(),
                xi: self.d_star(&self.elements[i].xi),
            };
            worst = worst.max(Self::pair_distance(&s, &self.pair(&alg.star_unchecked(&ai))));
            worst = worst.max((self.elements[i].alpha - alg.state()[i]).norm());
        }
        Ok(worst)
    }

    pub fn check(&self, alg: &ItoAlgebra) -> Result<()> {
        let d = self.defect(alg)?;
        let scale = linalg::max_abs(&self.plus_metric).max(linalg::max_abs(&self.embedding()));
        if d > alg.tol() * (1.0 + scale * scale) {
            return Err(Error::Presentation(format!(
                "thermal form does not reproduce the algebra (defect {d:e})"
            )));
        }
        let (eigs, _) = linalg::hermitian_eigen(&self.plus_metric);
        if eigs.first().is_some_and(|&e| e <= 0.0) {
            return Err(Error::Presentation("plus metric is not positive definite".into()));
        }
        Ok(())
    }

    /// Presentation of `C d_t ⊕ D` on the basis `[d_t, e_1 .. e_q]`.
    pub fn new(d_dim: usize, mul: Vec<C64>, star: CMat, plus_metric: CMat) -> Self {
        let q = d_dim;
        let mut elements = vec![ThermalPair {
            alpha: ONE,
            xi: CVec::zeros(q),
        }];
        for r in 0..q {
            let mut xi = CVec::zeros(q);
            xi[r] = ONE;
            elements.push(ThermalPair { alpha: ZERO, xi });
        }
        ThermalForm {
            d_dim: q,
            mul,
            star,
            plus_metric,
            elements,
        }
    }

    /// The Ito algebra on `[d_t, labels..]` whose product is the pair product.
    /// Only meaningful for forms built by [`ThermalForm::new`].
    pub fn to_algebra<S: AsRef<str>>(&self, labels: &[S]) -> Result<ItoAlgebra> {
        let q = self.d_dim;
        if labels.len() != q {
            return Err(Error::Shape {
                field: "labels".into(),
                message: format!("expected {q} labels"),
            });
        }
        if self.mul.len() != q * q * q || self.star.shape() != (q, q) || self.plus_metric.shape() != (q, q) {
            return Err(Error::Presentation(format!("thermal form blocks must have size {q}")));
        }
        let n = q + 1;
        let mut all_labels = vec!["d_t".to_string()];
        all_labels.extend(labels.iter().map(|s| s.as_ref().to_string()));
        let mut mul_full = vec![ZERO; n * n * n];
        for i in 0..q {
            for j in 0..q {
                let p = self.pair_product(&self.elements[i + 1], &self.elements[j + 1]);
                let base = ((i + 1) * n + (j + 1)) * n;
                mul_full[base] = p.alpha;
                for k in 0..q {
                    mul_full[base + 1 + k] = p.xi[k];
                }
            }
        }
        let mut star_full = CMat::zeros(n, n);
        star_full[(0, 0)] = ONE;
        star_full.view_mut((1, 1), (q, q)).copy_from(&self.star);
        let death = Element::basis(n, 0);
        let state = death.0.clone();
        ItoAlgebra::new(all_labels, mul_full, star_full, death, state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;

    #[test]
    fn vacuum_product_rules() {
        // HP generators on K = C
        let ann = VacuumTriple {
            alpha: ZERO,
            zeta: CVec::zeros(1),
            eta: CRow::from_element(1, ONE),
            a: CMat::zeros(1, 1),
        };
        let cre = ann.star();
        let num = VacuumTriple {
            alpha: ZERO,
            zeta: CVec::zeros(1),
            eta: CRow::zeros(1),
            a: CMat::identity(1, 1),
        };
        assert_eq!(ann.product(&cre).alpha, ONE);
        assert_eq!(ann.product(&num).eta, ann.eta);
        assert_eq!(num.product(&cre).zeta, cre.zeta);
        assert_eq!(cre.product(&ann).flatten(), VacuumTriple::zero(1).flatten());
    }

    #[test]
    fn thermal_wiener_plus_poisson_line() {
        // D = C²: e_1 e_1 = 0, e_2 e_2 = e_2
        let mut mul = vec![ZERO; 8];
        mul[(2 + 1) * 2 + 1] = ONE;
        let form = ThermalForm::new(2, mul, CMat::identity(2, 2), CMat::identity(2, 2));
        let alg = form.to_algebra(&["d_w", "d_m"]).unwrap();
        form.check(&alg).unwrap();
        let dm = alg.basis_element(2);
        assert_eq!(alg.mul(&dm, &dm).unwrap(), Element::from_real(&[1.0, 0.0, 1.0]));
        let dw = alg.basis_element(1);
        assert_eq!(alg.mul(&dw, &dw).unwrap(), Element::from_real(&[1.0, 0.0, 0.0]));
        assert_eq!(form.minus(&form.elements[1].xi, &form.elements[1].xi), real(1.0));
    }
}
