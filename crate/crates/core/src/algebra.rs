//! Finite-dimensional Ito *-algebras given by structure constants.
//!
//! An [`ItoAlgebra`] is a complex associative *-algebra on a declared basis
//! `a_0 .. a_{n-1}` together with a death element `d_t` annihilating the whole
//! algebra and a positive state normalized by `l(d_t) = 1`. Elements are plain
//! coefficient vectors over the basis.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64, ONE, ZERO};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Coefficient vector over an algebra's basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Element(pub CVec);

impl Element {
    pub fn zeros(n: usize) -> Self {
        Element(CVec::zeros(n))
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = CVec::zeros(n);
        v[i] = ONE;
        Element(v)
    }

    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        Element(CVec::from_vec(coeffs))
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Element(CVec::from_iterator(coeffs.len(), coeffs.iter().map(|&x| c(x, 0.0))))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &CVec {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs_vec(&self.0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Element(&self.0 * s)
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        Element(&self.0 + &rhs.0)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        Element(&self.0 - &rhs.0)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element(-&self.0)
    }
}

impl Mul<C64> for &Element {
    type Output = Element;
    fn mul(self, rhs: C64) -> Element {
        self.scale(rhs)
    }
}

/// A finite-dimensional Ito *-algebra.
///
/// `mul[(i*n + j)*n + k]` is the coefficient of `a_k` in `a_i · a_j`; the
/// involution acts antilinearly as `star(x) = S · conj(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ItoAlgebra {
    labels: Vec<String>,
    mul: Vec<C64>,
    star: CMat,
    death: Element,
    state: CVec,
    tol: f64,
}

impl ItoAlgebra {
    /// Assemble an algebra, checking only shapes. Axioms are verified
    /// separately by [`check_axioms`].
    pub fn new(labels: Vec<String>, mul: Vec<C64>, star: CMat, death: Element, state: CVec) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Shape {
                field: "dim".into(),
                message: "expected a positive dimension".into(),
            });
        }
        if mul.len() != n * n * n {
            return Err(Error::Shape {
                field: "mul".into(),
                message: format!("expected n×n×n with n = {n}, found {} constants", mul.len()),
            });
        }
        if star.shape() != (n, n) {
            return Err(Error::Shape {
                field: "star".into(),
                message: format!("expected {n}×{n}"),
            });
        }
        if death.len() != n {
            return Err(Error::Shape {
                field: "death".into(),
                message: format!("expected length {n}"),
            });
        }
        if state.len() != n {
            return Err(Error::Shape {
                field: "state".into(),
                message: format!("expected length {n}"),
            });
        }
        Ok(ItoAlgebra {
            labels,
            mul,
            star,
            death,
            state,
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn death(&self) -> &Element {
        &self.death
    }

    pub fn state(&self) -> &CVec {
        &self.state
    }

    pub fn star_matrix(&self) -> &CMat {
        &self.star
    }

    pub fn structure_constants(&self) -> &[C64] {
        &self.mul
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> C64 {
        let n = self.dim();
        self.mul[(i * n + j) * n + k]
    }

    pub fn set_constant(&mut self, i: usize, j: usize, k: usize, value: C64) {
        let n = self.dim();
        self.mul[(i * n + j) * n + k] = value;
    }

    pub fn basis_element(&self, i: usize) -> Element {
        Element::basis(self.dim(), i)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
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

    pub fn mul(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.mul_unchecked(x, y))
    }

    pub(crate) fn mul_unchecked(&self, x: &Element, y: &Element) -> Element {
        let n = self.dim();
        let mut out = CVec::zeros(n);
        for i in 0..n {
            let xi = x.0[i];
            if xi == ZERO {
                continue;
            }
            for j in 0..n {
                let w = xi * y.0[j];
                if w == ZERO {
                    continue;
                }
                let base = (i * n + j) * n;
                for k in 0..n {
                    let ck = self.mul[base + k];
                    if ck != ZERO {
                        out[k] += w * ck;
                    }
                }
            }
        }
        Element(out)
    }

    pub fn star(&self, x: &Element) -> Result<Element> {
        self.check_len(x)?;
        Ok(self.star_unchecked(x))
    }

    pub(crate) fn star_unchecked(&self, x: &Element) -> Element {
        Element(&self.star * x.0.map(|z| z.conj()))
    }

    pub fn state_eval(&self, x: &Element) -> Result<C64> {
        self.check_len(x)?;
        Ok(self.state_unchecked(x))
    }

    pub(crate) fn state_unchecked(&self, x: &Element) -> C64 {
        self.state.iter().zip(x.0.iter()).map(|(l, v)| l * v).sum()
    }

    /// Factor-product `x y - l(x·y) d_t` of the quotient by `C d_t`.
    pub fn factor_mul(&self, x: &Element, y: &Element) -> Result<Element> {
        let p = self.mul(x, y)?;
        let m = self.state_unchecked(&p);
        Ok(&p - &self.death.scale(m))
    }

    /// `x - l(x) d_t`.
    pub fn zero_mean(&self, x: &Element) -> Result<Element> {
        let m = self.state_eval(x)?;
        Ok(x - &self.death.scale(m))
    }

    /// Matrix of left multiplication `y ↦ a_i · y` on coefficients.
    pub fn left_mul_matrix(&self, i: usize) -> CMat {
        let n = self.dim();
        CMat::from_fn(n, n, |k, j| self.constant(i, j, k))
    }

    /// Matrix of right multiplication `y ↦ y · a_j` on coefficients.
    pub fn right_mul_matrix(&self, j: usize) -> CMat {
        let n = self.dim();
        CMat::from_fn(n, n, |k, i| self.constant(i, j, k))
    }

    /// Gram matrix `H[i][j] = l(star(a_i) · a_j)`.
    pub fn gram(&self) -> CMat {
        let n = self.dim();
        let stars: Vec<Element> = (0..n).map(|i| self.star_unchecked(&self.basis_element(i))).collect();
        CMat::from_fn(n, n, |i, j| {
            self.state_unchecked(&self.mul_unchecked(&stars[i], &self.basis_element(j)))
        })
    }

    pub(crate) fn structure_scale(&self) -> f64 {
        self.mul.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Render an element as a combination of basis labels.
    pub fn display(&self, x: &Element) -> String {
        format_element(&self.labels, x)
    }
}

pub fn format_element(labels: &[String], x: &Element) -> String {
    let mut terms = Vec::new();
    for (i, z) in x.0.iter().enumerate() {
        if z.norm() == 0.0 {
            continue;
        }
        let label = labels.get(i).map(String::as_str).unwrap_or("?");
        let coeff = if *z == ONE {
            String::new()
        } else if z.im == 0.0 {
            format!("{}*", z.re)
        } else if z.re == 0.0 {
            format!("{}i*", z.im)
        } else {
            format!("({}{:+}i)*", z.re, z.im)
        };
        terms.push(format!("{coeff}{label}"));
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

impl fmt::Display for ItoAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Ito algebra of dimension {} on {{{}}}",
            self.dim(),
            self.labels.join(", ")
        )
    }
}

/// Sparse construction of an algebra from its multiplication table.
#[derive(Debug, Clone)]
pub struct AlgebraBuilder {
    labels: Vec<String>,
    mul: Vec<C64>,
    star: CMat,
    death: CVec,
    state: CVec,
}

impl AlgebraBuilder {
    /// Start from the given labels; the involution defaults to fixing every
    /// basis element.
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        AlgebraBuilder {
            labels,
            mul: vec![ZERO; n * n * n],
            star: CMat::identity(n, n),
            death: CVec::zeros(n),
            state: CVec::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Add `coeff · a_k` to the product `a_i · a_j`.
    pub fn product(mut self, i: usize, j: usize, k: usize, coeff: C64) -> Self {
        let n = self.dim();
        self.mul[(i * n + j) * n + k] += coeff;
        self
    }

    /// Declare `star(a_i) = a_j` and `star(a_j) = a_i`.
    pub fn star_pair(mut self, i: usize, j: usize) -> Self {
        let n = self.dim();
        for idx in [i, j] {
            for r in 0..n {
                self.star[(r, idx)] = ZERO;
            }
        }
        self.star[(j, i)] = ONE;
        self.star[(i, j)] = ONE;
        self
    }

    pub fn star_matrix(mut self, s: CMat) -> Self {
        self.star = s;
        self
    }

    /// Death element `a_i`, with `l(a_i) = 1`.
    pub fn death(mut self, i: usize) -> Self {
        self.death = CVec::zeros(self.dim());
        self.death[i] = ONE;
        self.state[i] = ONE;
        self
    }

    pub fn state(mut self, i: usize, value: C64) -> Self {
        self.state[i] = value;
        self
    }

    pub fn build(self) -> Result<ItoAlgebra> {
        ItoAlgebra::new(self.labels, self.mul, self.star, Element(self.death), self.state)
    }
}

/// One failed axiom with the worst witness found.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub axiom: &'static str,
    pub witness: Vec<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub pass: bool,
    pub tol: f64,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn violated(&self, axiom: &str) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pass {
            return write!(f, "axioms: pass");
        }
        write!(f, "axioms: fail")?;
        for v in &self.violations {
            write!(f, "\n  {} at {:?}: residual {:e}", v.axiom, v.witness, v.residual)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Worst {
    witness: Vec<usize>,
    residual: f64,
}

impl Worst {
    fn offer(&mut self, residual: f64, witness: &[usize]) {
        if residual > self.residual {
            self.residual = residual;
            self.witness = witness.to_vec();
        }
    }

    fn into_violation(self, axiom: &'static str, threshold: f64) -> Option<Violation> {
        (self.residual > threshold).then_some(Violation {
            axiom,
            witness: self.witness,
            residual: self.residual,
        })
    }
}

/// Exhaustively check every Ito-algebra axiom over basis pairs and triples.
pub fn check_axioms(alg: &ItoAlgebra) -> AxiomReport {
    let n = alg.dim();
    let tol = alg.tol();
    let cmax = alg.structure_scale();
    let basis: Vec<Element> = (0..n).map(|i| alg.basis_element(i)).collect();
    let mut violations = Vec::new();

    // associativity
    let mut worst = Worst::default();
    let products: Vec<Vec<Element>> = (0..n)
        .map(|i| (0..n).map(|j| alg.mul_unchecked(&basis[i], &basis[j])).collect())
        .collect();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let left = alg.mul_unchecked(&products[i][j], &basis[k]);
                let right = alg.mul_unchecked(&basis[i], &products[j][k]);
                worst.offer((&left - &right).max_abs(), &[i, j, k]);
            }
        }
    }
    violations.extend(worst.into_violation("associativity", tol * (1.0 + cmax * cmax)));

    // involution: S conj(S) = I
    let s = alg.star_matrix();
    let s_conj = s.map(|z| z.conj());
    let defect = s * &s_conj - CMat::identity(n, n);
    let smax = linalg::max_abs(s);
    let mut worst = Worst::default();
    for i in 0..n {
        for j in 0..n {
            worst.offer(defect[(i, j)].norm(), &[i, j]);
        }
    }
    violations.extend(worst.into_violation("involution", tol * (1.0 + smax * smax)));

    // star(a_i a_j) = star(a_j) star(a_i)
    let stars: Vec<Element> = basis.iter().map(|b| alg.star_unchecked(b)).collect();
    let mut worst = Worst::default();
    for i in 0..n {
        for j in 0..n {
            let lhs = alg.star_unchecked(&products[i][j]);
            let rhs = alg.mul_unchecked(&stars[j], &stars[i]);
            worst.offer((&lhs - &rhs).max_abs(), &[i, j]);
        }
    }
    violations.extend(worst.into_violation("antimultiplicativity", tol * (1.0 + cmax * smax * (1.0 + smax))));

    // death annihilates the algebra and is self-adjoint
    let death = alg.death();
    let dmax = death.max_abs();
    let mut worst = Worst::default();
    for i in 0..n {
        let r = alg.mul_unchecked(&basis[i], death).max_abs();
        let l = alg.mul_unchecked(death, &basis[i]).max_abs();
        worst.offer(r.max(l), &[i]);
    }
    violations.extend(worst.into_violation("death annihilation", tol * (1.0 + cmax * dmax)));
    let mut worst = Worst::default();
    worst.offer((&alg.star_unchecked(death) - death).max_abs(), &[]);
    violations.extend(worst.into_violation("death star", tol * (1.0 + smax * dmax)));

    // state
    let mut worst = Worst::default();
    worst.offer((alg.state_unchecked(death) - ONE).norm(), &[]);
    violations.extend(worst.into_violation("state normalization", tol));

    let lmax = linalg::max_abs_vec(alg.state());
    let mut worst = Worst::default();
    for i in 0..n {
        let lhs = alg.state_unchecked(&stars[i]);
        let rhs = alg.state_unchecked(&basis[i]).conj();
        worst.offer((lhs - rhs).norm(), &[i]);
    }
    violations.extend(worst.into_violation("state hermiticity", tol * (1.0 + lmax * (1.0 + smax))));

    let h = alg.gram();
    let hnorm = linalg::norm2(&h);
    let mut worst = Worst::default();
    for i in 0..n {
        for j in 0..n {
            worst.offer((h[(i, j)] - h[(j, i)].conj()).norm(), &[i, j]);
        }
    }
    violations.extend(worst.into_violation("gram hermiticity", tol * (1.0 + hnorm)));

    let (eigs, vecs) = linalg::hermitian_eigen(&h);
    if let Some(&lowest) = eigs.first() {
        if lowest < -tol * (1.0 + hnorm) {
            // witness: dominant basis index of the offending eigenvector
            let v = vecs.column(0);
            let idx = (0..n)
                .max_by(|&a, &b| v[a].norm().partial_cmp(&v[b].norm()).unwrap())
                .unwrap_or(0);
            violations.push(Violation {
                axiom: "state positivity",
                witness: vec![idx],
                residual: -lowest,
            });
        }
    }

    AxiomReport {
        pass: violations.is_empty(),
        tol,
        violations,
    }
}
