//! Splitting an Ito algebra into an orthogonal sum of a Brownian part (zero
//! operator block, second-order nilpotent) and a Levy part (non-degenerate
//! operator block), plus the coarse classifiers built on the null ideals
//! `n_+ = ker k` and `n^- = ker k†`.

use crate::algebra::{Element, ItoAlgebra};
use crate::error::{Error, Result};
use crate::forms::{ThermalForm, VacuumForm, VacuumTriple};
use crate::linalg::{self, CMat, CVec, ZERO};
use crate::representation::FundamentalRep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Brownian,
    Levy,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoDimType {
    WienerType,
    PoissonType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub kind: Kind,
    pub vacuum_flag: bool,
    pub thermal_flag: bool,
    pub two_dim_type: Option<TwoDimType>,
}

/// Defects measured on a finished split. All but `completeness_rank` should
/// vanish.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Residuals {
    /// `max ‖b·c‖, ‖c·b‖` over Brownian `b` and Levy `c`.
    pub orthogonality: f64,
    /// `max ‖i(b)‖` together with the factor-products `b e`, `e b`.
    pub brownian_operator: f64,
    /// Distance of `b·b'` from `span{d_t}`.
    pub brownian_nilpotency: f64,
    /// Distance of `c·c'` and `star(c)` from `span(levy ∪ {d_t})`.
    pub levy_closure: f64,
    /// `‖E² - E‖` and `‖E - E†‖`.
    pub idempotent: f64,
    /// Rank of `brownian ∪ levy ∪ {d_t}`; equals the algebra dimension on success.
    pub completeness_rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Preimage of the operator identity, `None` under the pure-Brownian convention.
    pub e: Option<Element>,
    /// Orthoprojector onto the Levy part of the noise space.
    pub projector: CMat,
    pub brownian_basis: Vec<Element>,
    pub levy_basis: Vec<Element>,
    pub residuals: Residuals,
    pub threshold: f64,
}

impl Decomposition {
    pub fn verified(&self, dim: usize) -> bool {
        let r = &self.residuals;
        [
            r.orthogonality,
            r.brownian_operator,
            r.brownian_nilpotency,
            r.levy_closure,
            r.idempotent,
        ]
        .iter()
        .all(|&x| x <= self.threshold)
            && r.completeness_rank == dim
    }

    pub fn brownian_matrix(&self, n: usize) -> CMat {
        element_columns(&self.brownian_basis, n)
    }

    pub fn levy_matrix(&self, n: usize) -> CMat {
        element_columns(&self.levy_basis, n)
    }
}

fn element_columns(xs: &[Element], n: usize) -> CMat {
    let cols: Vec<CVec> = xs.iter().map(|x| x.0.clone()).collect();
    linalg::columns(&cols, n)
}

/// `x·y·z - l(x·y·z) d_t`.
fn factor3(alg: &ItoAlgebra, x: &Element, y: &Element, z: &Element) -> Element {
    let p = alg.mul_unchecked(&alg.mul_unchecked(x, y), z);
    let m = alg.state_unchecked(&p);
    &p - &alg.death().scale(m)
}

fn factor2(alg: &ItoAlgebra, x: &Element, y: &Element) -> Element {
    let p = alg.mul_unchecked(x, y);
    let m = alg.state_unchecked(&p);
    &p - &alg.death().scale(m)
}

fn check_rep(alg: &ItoAlgebra, rep: &FundamentalRep) -> Result<()> {
    if rep.dim() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            found: rep.dim(),
        });
    }
    Ok(())
}

/// Find a star-fixed `e` whose operator block is the identity of `i(a)`.
///
/// Returns `Ok(None)` when every operator block vanishes.
pub fn quotient_identity(alg: &ItoAlgebra, rep: &FundamentalRep) -> Result<Option<Element>> {
    check_rep(alg, rep)?;
    let n = alg.dim();
    let m = rep.gns_dim();
    if m == 0 || rep.operator_part_vanishes() {
        return Ok(None);
    }
    let tol = alg.tol();
    let blocks: Vec<&CMat> = rep.quadruples().iter().map(|q| &q.a).collect();
    // Unknowns x_i with Σ x_i A_i A_j = A_j and Σ x_i A_j A_i = A_j for all j.
    let block = m * m;
    let mut system = CMat::zeros(2 * n * block, n);
    let mut rhs = CVec::zeros(2 * n * block);
    for (j, aj) in blocks.iter().enumerate() {
        for (i, ai) in blocks.iter().enumerate() {
            let left = *ai * *aj;
            let right = *aj * *ai;
            for (idx, (l, r)) in left.iter().zip(right.iter()).enumerate() {
                system[(2 * j * block + idx, i)] = *l;
                system[((2 * j + 1) * block + idx, i)] = *r;
            }
        }
        for (idx, z) in aj.iter().enumerate() {
            rhs[2 * j * block + idx] = *z;
            rhs[(2 * j + 1) * block + idx] = *z;
        }
    }
    let scale = rep.scale();
    let (x, residual) = linalg::lstsq(&system, &rhs, tol);
    if residual > tol * (1.0 + scale * scale) {
        return Err(Error::NoQuotientIdentity { residual });
    }
    let raw = Element(x.map(linalg::chop));
    let mut e = (&raw + &alg.star_unchecked(&raw)).scale(linalg::real(0.5));
    let cmax = alg.structure_scale();
    let threshold = |e: &Element| tol * (1.0 + cmax) * (1.0 + e.max_abs()).powi(2);
    let ee = factor2(alg, &e, &e);
    if (&ee - &e).max_abs() > threshold(&e) {
        e = ee;
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let a = alg.basis_element(i);
        for k in 0..n {
            let c = alg.basis_element(k);
            worst = worst.max((&factor3(alg, &a, &e, &c) - &factor2(alg, &a, &c)).max_abs());
        }
    }
    if worst > threshold(&e) {
        return Err(Error::NoQuotientIdentity { residual: worst });
    }
    Ok(Some(e))
}

/// Split into Brownian and Levy parts with `c = ae + ea - eae` and `b = a - c`
/// on every zero-mean basis element.
pub fn decompose(alg: &ItoAlgebra, rep: &FundamentalRep) -> Result<Decomposition> {
    let e = quotient_identity(alg, rep)?;
    let n = alg.dim();
    let mut bs = Vec::with_capacity(n);
    let mut cs = Vec::with_capacity(n);
    for i in 0..n {
        let z = alg.zero_mean(&alg.basis_element(i))?;
        match &e {
            None => bs.push(z.0),
            Some(e) => {
                let c = &(&factor2(alg, &z, e) + &factor2(alg, e, &z)) - &factor3(alg, e, &z, e);
                bs.push((&z - &c).0);
                cs.push(c.0);
            }
        }
    }
    let projector = match &e {
        Some(e) => rep.i(e),
        None => CMat::zeros(rep.gns_dim(), rep.gns_dim()),
    };
    Ok(assemble(alg, e, projector, &bs, &cs, &|b| linalg::max_abs(&rep.i(b))))
}

fn assemble(
    alg: &ItoAlgebra,
    e: Option<Element>,
    projector: CMat,
    bs: &[CVec],
    cs: &[CVec],
    operator_norm: &dyn Fn(&Element) -> f64,
) -> Decomposition {
    let n = alg.dim();
    let tol = alg.tol();
    // both parts are measured against the size of the unsplit generators
    let reference = bs
        .iter()
        .enumerate()
        .map(|(i, b)| cs.get(i).map_or(b.norm(), |c| (b + c).norm()))
        .fold(0.0, f64::max);
    let span = |vs: &[CVec]| -> Vec<Element> {
        linalg::echelon_basis_with_floor(vs, n, tol, reference)
            .into_iter()
            .map(Element)
            .collect()
    };
    let brownian = span(bs);
    let levy = span(cs);
    let mut r = Residuals::default();
    for b in &brownian {
        for c in &levy {
            r.orthogonality = r
                .orthogonality
                .max(alg.mul_unchecked(b, c).max_abs())
                .max(alg.mul_unchecked(c, b).max_abs());
        }
        r.brownian_operator = r.brownian_operator.max(operator_norm(b));
        if let Some(e) = &e {
            r.brownian_operator = r
                .brownian_operator
                .max(factor2(alg, b, e).max_abs())
                .max(factor2(alg, e, b).max_abs());
        }
        for b2 in &brownian {
            r.brownian_nilpotency = r.brownian_nilpotency.max(factor2(alg, b, b2).max_abs());
        }
    }
    if !levy.is_empty() {
        let mut span: Vec<CVec> = levy.iter().map(|c| c.0.clone()).collect();
        span.push(alg.death().0.clone());
        let p = linalg::projector(&linalg::columns(&span, n), tol);
        let off = |x: &Element| linalg::max_abs_vec(&(&x.0 - &p * &x.0));
        for c in &levy {
            r.levy_closure = r.levy_closure.max(off(&alg.star_unchecked(c)));
            for c2 in &levy {
                r.levy_closure = r.levy_closure.max(off(&alg.mul_unchecked(c, c2)));
            }
        }
    }
    r.idempotent = linalg::max_abs(&(&projector * &projector - &projector)).max(linalg::hermiticity_defect(&projector));
    let mut all: Vec<CVec> = brownian.iter().chain(levy.iter()).map(|x| x.0.clone()).collect();
    all.push(alg.death().0.clone());
    r.completeness_rank = linalg::rank(&linalg::columns(&all, n), tol);
    let vmax = brownian
        .iter()
        .chain(levy.iter())
        .chain(e.iter())
        .fold(0.0, |acc: f64, x| acc.max(x.max_abs()));
    let cmax = alg.structure_scale();
    Decomposition {
        e,
        projector,
        brownian_basis: brownian,
        levy_basis: levy,
        residuals: r,
        threshold: tol * (1.0 + cmax) * (1.0 + vmax).powi(2),
    }
}

/// Brownian/Levy type of the algebra and its vacuum and thermal flags.
pub fn classify(alg: &ItoAlgebra, rep: &FundamentalRep) -> Result<Classification> {
    check_rep(alg, rep)?;
    let n = alg.dim();
    let m = rep.gns_dim();
    let tol = alg.tol();
    let kind = if rep.operator_part_vanishes() {
        Kind::Brownian
    } else {
        let mut stacked = CMat::zeros(n * m, m);
        for (i, q) in rep.quadruples().iter().enumerate() {
            stacked.view_mut((i * m, 0), (m, m)).copy_from(&q.a);
        }
        if linalg::null_space(&stacked, tol).ncols() == 0 {
            Kind::Levy
        } else {
            Kind::Mixed
        }
    };

    let slack = tol * (1.0 + rep.scale());
    let n_plus = linalg::null_space(rep.quotient_map(), tol);
    let n_minus = linalg::null_space(&rep.kdag_map(), tol);
    // k^- = {a : l(a⋆·b) = 0 for all b in n^-}
    let h = alg.gram();
    let k_minus = linalg::null_space(&(&h * &n_minus).adjoint(), tol);
    let vacuum_flag = linalg::subspace_distance(&n_plus, &k_minus, tol) <= slack;
    let death = linalg::columns(&[alg.death().0.clone()], n);
    let thermal_flag = linalg::subspace_distance(&n_plus, &death, tol) <= slack
        && linalg::subspace_distance(&n_minus, &death, tol) <= slack;

    let two_dim_type = (n == 2).then(|| {
        let z = (0..n)
            .map(|i| {
                alg.zero_mean(&alg.basis_element(i))
                    .expect("basis element has the algebra's dimension")
            })
            .max_by(|a, b| a.max_abs().total_cmp(&b.max_abs()))
            .expect("dimension is two");
        let zz = factor2(alg, &z, &z).max_abs();
        if zz <= tol * (1.0 + alg.structure_scale()) * (1.0 + z.max_abs()).powi(2) {
            TwoDimType::WienerType
        } else {
            TwoDimType::PoissonType
        }
    });

    Ok(Classification {
        kind,
        vacuum_flag,
        thermal_flag,
        two_dim_type,
    })
}

/// Coefficients of `target` in the span of the columns of `embedding`.
fn preimage(embedding: &CMat, pinv: &CMat, target: &CVec, limit: f64, what: &str) -> Result<CVec> {
    let x = pinv * target;
    let r = linalg::max_abs_vec(&(embedding * &x - target));
    if r > limit {
        return Err(Error::Presentation(format!(
            "{what} is not in the algebra (residual {r:e})"
        )));
    }
    Ok(x.map(linalg::chop))
}

/// Split a vacuum presentation with the maximal projector `P` annihilating the
/// operator algebra: `b = (0, Pζ ⊕ ηP, 0)` and `c = (0, Eζ ⊕ ηE, A)`, `E = I - P`.
pub fn vacuum_split(alg: &ItoAlgebra, form: &VacuumForm) -> Result<Decomposition> {
    form.check(alg)?;
    let n = alg.dim();
    let p = form.k_dim;
    let tol = alg.tol();
    let blocks: Vec<&CMat> = form.elements.iter().map(|t| &t.a).collect();
    let mut stacked = CMat::zeros(n * p, p);
    for (i, a) in blocks.iter().enumerate() {
        stacked.view_mut((i * p, 0), (p, p)).copy_from(a);
    }
    let kernel = linalg::null_space(&stacked, tol);
    let proj_p = &kernel * kernel.adjoint();
    let proj_e = CMat::identity(p, p) - &proj_p;

    let scale = 1.0 + linalg::max_abs(&form.embedding());
    let limit = tol * scale * scale;
    let emb = form.embedding();
    let pinv = linalg::pinv(&emb, tol);
    let e = if kernel.ncols() < p {
        // E must itself be an operator of the algebra.
        let mut basis = CMat::zeros(p * p, n);
        for (i, a) in blocks.iter().enumerate() {
            for (idx, z) in a.iter().enumerate() {
                basis[(idx, i)] = *z;
            }
        }
        let target = CVec::from_iterator(p * p, proj_e.iter().copied());
        let (x, residual) = linalg::lstsq(&basis, &target, tol);
        if residual > limit {
            return Err(Error::NoQuotientIdentity { residual });
        }
        // (0, 0, 0, E) itself when the algebra contains it, otherwise any
        // star-fixed element with operator block E
        let t = VacuumTriple {
            a: proj_e.clone(),
            ..VacuumTriple::zero(p)
        };
        let e = match preimage(&emb, &pinv, &t.flatten(), limit, "operator identity") {
            Ok(v) => Element(v),
            Err(_) => {
                let x = Element(x);
                let xs = alg.star(&x)?;
                Element((&x.0 + &xs.0).map(|z| linalg::chop(z * 0.5)))
            }
        };
        Some(e)
    } else {
        None
    };
    let mut bs = Vec::with_capacity(n);
    let mut cs = Vec::with_capacity(n);
    for i in 0..n {
        let t = form.triple(&alg.zero_mean(&alg.basis_element(i))?);
        let b = VacuumTriple {
            alpha: ZERO,
            zeta: &proj_p * &t.zeta,
            eta: &t.eta * &proj_p,
            a: CMat::zeros(p, p),
        };
        let c = VacuumTriple {
            alpha: ZERO,
            zeta: &proj_e * &t.zeta,
            eta: &t.eta * &proj_e,
            a: t.a.clone(),
        };
        bs.push(preimage(&emb, &pinv, &b.flatten(), limit, "Brownian component")?);
        cs.push(preimage(&emb, &pinv, &c.flatten(), limit, "Levy component")?);
    }
    let operator_norm = |b: &Element| linalg::max_abs(&form.triple(b).a);
    Ok(assemble(alg, e, proj_e, &bs, &cs, &operator_norm))
}

/// Split a thermal presentation along `D = G ⊕ span(DD)`, `G` the
/// `⟨·|·⟩_+`-orthogonal complement of `span(DD)`.
pub fn thermal_split(alg: &ItoAlgebra, form: &ThermalForm) -> Result<Decomposition> {
    form.check(alg)?;
    let n = alg.dim();
    let q = form.d_dim;
    let tol = alg.tol();
    let unit = |r: usize| {
        let mut v = CVec::zeros(q);
        v[r] = linalg::ONE;
        v
    };
    let mut products = Vec::with_capacity(q * q);
    for i in 0..q {
        for j in 0..q {
            products.push(form.d_mul(&unit(i), &unit(j)));
        }
    }
    let dd = linalg::column_space(&linalg::columns(&products, q), tol);
    let r = dd.ncols();
    let metric = &form.plus_metric;
    let scale = 1.0 + linalg::max_abs(metric).max(linalg::max_abs(&form.embedding()));
    let limit = tol * scale * scale;

    // unit ε of DD: ε w = w = w ε for every w in DD
    let unit_dd = if r == 0 {
        CVec::zeros(q)
    } else {
        let mut system = CMat::zeros(2 * r * q, r);
        let mut rhs = CVec::zeros(2 * r * q);
        for j in 0..r {
            let w = dd.column(j).into_owned();
            for i in 0..r {
                let u = dd.column(i).into_owned();
                let left = form.d_mul(&u, &w);
                let right = form.d_mul(&w, &u);
                for k in 0..q {
                    system[(2 * j * q + k, i)] = left[k];
                    system[((2 * j + 1) * q + k, i)] = right[k];
                }
            }
            for k in 0..q {
                rhs[2 * j * q + k] = w[k];
                rhs[(2 * j + 1) * q + k] = w[k];
            }
        }
        let (x, residual) = linalg::lstsq(&system, &rhs, tol);
        if residual > limit {
            return Err(Error::NoQuotientIdentity { residual });
        }
        &dd * x
    };

    // Right complement {ξ : ⟨w|ξ⟩_+ = 0} and left complement {ξ : ⟨w|ξ⟩^- = 0}.
    let projector_dd = if r == 0 {
        CMat::zeros(q, q)
    } else {
        let plus_rows = (metric * &dd).adjoint();
        let star = &form.star;
        let minus_metric = star.transpose() * metric.map(|z| z.conj()) * star.map(|z| z.conj());
        let minus_rows = (minus_metric * &dd).adjoint();
        let g_plus = linalg::null_space(&plus_rows, tol);
        let g_minus = linalg::null_space(&minus_rows, tol);
        let gap = linalg::subspace_distance(&g_plus, &g_minus, tol);
        if gap > limit {
            return Err(Error::Presentation(format!(
                "left and right orthogonal complements of DD differ (distance {gap:e})"
            )));
        }
        if g_plus.ncols() == 0 {
            CMat::identity(q, q)
        } else {
            let gram = g_plus.adjoint() * metric * &g_plus;
            let inv = gram
                .try_inverse()
                .ok_or_else(|| Error::Presentation("plus metric is degenerate on the complement".into()))?;
            CMat::identity(q, q) - &g_plus * inv * g_plus.adjoint() * metric
        }
    };
    let proj_g = CMat::identity(q, q) - &projector_dd;

    let emb = form.embedding();
    let pinv = linalg::pinv(&emb, tol);
    let lift = |xi: &CVec, what: &str| -> Result<CVec> {
        let mut v = CVec::zeros(1 + q);
        v.rows_mut(1, q).copy_from(xi);
        preimage(&emb, &pinv, &v, limit, what)
    };
    let e = if r == 0 {
        None
    } else {
        Some(Element(lift(&unit_dd, "unit of DD")?))
    };
    let mut bs = Vec::with_capacity(n);
    let mut cs = Vec::with_capacity(n);
    for i in 0..n {
        let pair = form.pair(&alg.zero_mean(&alg.basis_element(i))?);
        bs.push(lift(&(&proj_g * &pair.xi), "Wiener component")?);
        cs.push(lift(&(&projector_dd * &pair.xi), "Poisson component")?);
    }
    let operator_norm = |b: &Element| {
        let xi = form.pair(b).xi;
        (0..q).fold(0.0, |acc: f64, r| {
            acc.max(linalg::max_abs_vec(&form.d_mul(&xi, &unit(r))))
                .max(linalg::max_abs_vec(&form.d_mul(&unit(r), &xi)))
        })
    };
    // report the Euclidean projector onto span(DD)
    let orth = linalg::projector(&projector_dd, tol);
    Ok(assemble(alg, e, orth, &bs, &cs, &operator_norm))
}
