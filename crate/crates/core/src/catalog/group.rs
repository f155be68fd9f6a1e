//! Finite groups, their unitary irreps, positive-definite functions and the
//! compensated-Poisson algebra `d_g·d_h = λ_{gh} d_t + d_{gh}`.

use std::f64::consts::PI;

use crate::algebra::{check_axioms, AlgebraBuilder, AxiomReport, ItoAlgebra};
use crate::error::{Error, Result};
use crate::forms::ThermalForm;
use crate::linalg::{self, c, real, CMat, CVec, C64, ONE, ZERO};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupData {
    pub labels: Vec<String>,
    /// `cayley[g][h]` is the index of `g·h`.
    pub cayley: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    pub identity: usize,
}

impl FiniteGroupData {
    /// Validate a multiplication table and derive identity and inverses.
    pub fn from_table(labels: Vec<String>, cayley: Vec<Vec<usize>>) -> Result<Self> {
        let n = cayley.len();
        if n == 0 || labels.len() != n || cayley.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::Parameter(format!(
                "cayley table must be {n}×{n} with entries below {n}"
            )));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if cayley[cayley[a][b]][c] != cayley[a][cayley[b][c]] {
                        return Err(Error::Parameter(format!(
                            "cayley table is not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| cayley[e][g] == g && cayley[g][e] == g))
            .ok_or_else(|| Error::Parameter("cayley table has no identity".into()))?;
        let inverse = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| cayley[g][h] == identity && cayley[h][g] == identity)
                    .ok_or_else(|| Error::Parameter(format!("element {g} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteGroupData {
            labels,
            cayley,
            inverse,
            identity,
        })
    }

    pub fn order(&self) -> usize {
        self.cayley.len()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.cayley[g][h]
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z_N` with elements `0 .. N-1` under addition mod `N`.
    pub fn cyclic(order: usize) -> Self {
        let n = order.max(1);
        FiniteGroupData {
            labels: (0..n).map(|g| g.to_string()).collect(),
            cayley: (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect(),
            inverse: (0..n).map(|g| (n - g) % n).collect(),
            identity: 0,
        }
    }

    /// Permutations of `{0, 1, 2}` in lexicographic order, composed as
    /// `(g·h)(x) = g(h(x))`.
    pub fn symmetric3() -> Self {
        let perms = s3_permutations();
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed under composition");
        let cayley = perms
            .iter()
            .map(|g| perms.iter().map(|h| index([g[h[0]], g[h[1]], g[h[2]]])).collect())
            .collect();
        let labels = perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect();
        Self::from_table(labels, cayley).expect("S3 table is a group")
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|g| (0..n).all(|h| self.cayley[g][h] == self.cayley[h][g]))
    }
}

fn s3_permutations() -> [[usize; 3]; 6] {
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrrepData {
    pub label: String,
    pub dim: usize,
    /// `U_g` for every group element, in group order.
    pub matrices: Vec<CMat>,
    /// Plancherel weight `d_n = dim / |G|`.
    pub weight: f64,
}

/// Characters `g ↦ exp(2πi n g / N)` of `Z_N`.
pub fn cyclic_irreps(order: usize) -> Vec<IrrepData> {
    let n = order.max(1);
    (0..n)
        .map(|k| IrrepData {
            label: format!("chi_{k}"),
            dim: 1,
            matrices: (0..n)
                .map(|g| CMat::from_element(1, 1, root_of_unity((k * g) % n, n)))
                .collect(),
            weight: 1.0 / n as f64,
        })
        .collect()
}

/// `exp(2πi j/n)`, exact at quarter turns.
fn root_of_unity(j: usize, n: usize) -> C64 {
    if (4 * j).is_multiple_of(n) {
        return [ONE, c(0.0, 1.0), real(-1.0), c(0.0, -1.0)][4 * j / n];
    }
    let phase = 2.0 * PI * j as f64 / n as f64;
    c(phase.cos(), phase.sin())
}

/// Trivial, sign and two-dimensional standard irreps of [`FiniteGroupData::symmetric3`].
pub fn s3_irreps() -> Vec<IrrepData> {
    let perms = s3_permutations();
    let sign = |p: &[usize; 3]| {
        let inversions = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count();
        if inversions % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    // orthonormal basis of the sum-zero plane
    let b = CMat::from_row_slice(
        3,
        2,
        &[
            real(1.0 / s2),
            real(1.0 / s6),
            real(-1.0 / s2),
            real(1.0 / s6),
            ZERO,
            real(-2.0 / s6),
        ],
    );
    let standard = perms
        .iter()
        .map(|p| {
            let mut perm = CMat::zeros(3, 3);
            for x in 0..3 {
                perm[(p[x], x)] = ONE;
            }
            b.transpose() * perm * &b
        })
        .collect();
    vec![
        IrrepData {
            label: "trivial".into(),
            dim: 1,
            matrices: vec![CMat::identity(1, 1); 6],
            weight: 1.0 / 6.0,
        },
        IrrepData {
            label: "sign".into(),
            dim: 1,
            matrices: perms.iter().map(|p| CMat::from_element(1, 1, real(sign(p)))).collect(),
            weight: 1.0 / 6.0,
        },
        IrrepData {
            label: "standard".into(),
            dim: 2,
            matrices: standard,
            weight: 2.0 / 6.0,
        },
    ]
}

/// Check homomorphism, unitarity, weights and completeness of an irrep set.
pub fn validate_irreps(group: &FiniteGroupData, irreps: &[IrrepData], tol: f64) -> Result<()> {
    let order = group.order();
    let found: usize = irreps.iter().map(|r| r.dim * r.dim).sum();
    if found != order {
        return Err(Error::IncompleteIrreps { found, order });
    }
    for r in irreps {
        if r.matrices.len() != order || r.matrices.iter().any(|u| u.shape() != (r.dim, r.dim)) {
            return Err(Error::Parameter(format!(
                "irrep {} needs {order} matrices of size {}",
                r.label, r.dim
            )));
        }
        if (r.weight - r.dim as f64 / order as f64).abs() > tol {
            return Err(Error::Parameter(format!(
                "irrep {} has Plancherel weight {} != dim/|G|",
                r.label, r.weight
            )));
        }
        let id = CMat::identity(r.dim, r.dim);
        for g in 0..order {
            if linalg::max_abs(&(r.matrices[g].adjoint() * &r.matrices[g] - &id)) > tol {
                return Err(Error::Parameter(format!(
                    "irrep {} is not unitary at {}",
                    r.label, group.labels[g]
                )));
            }
            for h in 0..order {
                let gh = group.mul(g, h);
                if linalg::max_abs(&(&r.matrices[g] * &r.matrices[h] - &r.matrices[gh])) > tol {
                    return Err(Error::Parameter(format!(
                        "irrep {} is not a homomorphism at ({}, {})",
                        r.label, group.labels[g], group.labels[h]
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `λ` indexed by group elements.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveDefiniteFunction {
    pub values: CVec,
}

impl PositiveDefiniteFunction {
    pub fn delta(group: &FiniteGroupData) -> Self {
        let mut values = CVec::zeros(group.order());
        values[group.identity] = ONE;
        PositiveDefiniteFunction { values }
    }

    pub fn constant(group: &FiniteGroupData, value: C64) -> Self {
        PositiveDefiniteFunction {
            values: CVec::from_element(group.order(), value),
        }
    }

    /// `[λ_{g h⁻¹}]_{g,h}`.
    pub fn kernel_matrix(&self, group: &FiniteGroupData) -> CMat {
        let n = group.order();
        CMat::from_fn(n, n, |g, h| self.values[group.mul(g, group.inverse[h])])
    }

    /// `max |λ_{g⁻¹} - conj(λ_g)|`.
    pub fn hermiticity_residual(&self, group: &FiniteGroupData) -> f64 {
        (0..group.order()).fold(0.0, |acc, g| {
            acc.max((self.values[group.inverse[g]] - self.values[g].conj()).norm())
        })
    }

    pub fn validate(&self, group: &FiniteGroupData, tol: f64) -> Result<()> {
        if self.values.len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                found: self.values.len(),
            });
        }
        let scale = 1.0 + linalg::max_abs_vec(&self.values);
        let h = self.hermiticity_residual(group);
        if h > tol * scale {
            return Err(Error::Parameter(format!("lambda is not Hermitian: residual {h:e}")));
        }
        let min = min_eigenvalue(&self.kernel_matrix(group));
        if min < -tol * scale * group.order() as f64 {
            return Err(Error::Parameter(format!(
                "lambda is not positive definite: eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}

fn min_eigenvalue(h: &CMat) -> f64 {
    linalg::hermitian_eigen(h).0.first().copied().unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoisson {
    pub algebra: ItoAlgebra,
    pub report: AxiomReport,
    /// Pair presentation over the group algebra, present when the kernel
    /// matrix of `λ` is definite.
    pub thermal: Option<ThermalForm>,
}

/// Basis `[d_t, d_g ..]` with `d_g·d_h = λ_{gh} d_t + d_{gh}` and
/// `star(d_g) = d_{g⁻¹}`; the axiom report is attached rather than enforced.
pub fn build_group_poisson(
    group: &FiniteGroupData,
    lambda: &PositiveDefiniteFunction,
    tol: f64,
) -> Result<GroupPoisson> {
    lambda.validate(group, tol)?;
    let n = group.order();
    let mut labels = vec!["d_t".to_string()];
    labels.extend(group.labels.iter().map(|g| format!("d_{g}")));
    let mut b = AlgebraBuilder::new(labels).death(0);
    for g in 0..n {
        b = b.star_pair(1 + g, 1 + group.inverse[g]);
        for h in 0..n {
            let gh = group.mul(g, h);
            b = b
                .product(1 + g, 1 + h, 0, lambda.values[gh])
                .product(1 + g, 1 + h, 1 + gh, ONE);
        }
    }
    let algebra = b.build()?.with_tol(tol);
    let report = check_axioms(&algebra);

    // ⟨d_g|d_h⟩_+ = l(d_{g⁻¹}·d_h) = λ_{g⁻¹h}
    let metric = CMat::from_fn(n, n, |g, h| lambda.values[group.mul(group.inverse[g], h)]);
    let thermal = (min_eigenvalue(&metric) > tol).then(|| {
        let mut mul = vec![ZERO; n * n * n];
        let mut star = CMat::zeros(n, n);
        for g in 0..n {
            star[(group.inverse[g], g)] = ONE;
            for h in 0..n {
                mul[(g * n + h) * n + group.mul(g, h)] = ONE;
            }
        }
        ThermalForm::new(n, mul, star, metric)
    });
    Ok(GroupPoisson {
        algebra,
        report,
        thermal,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionReport {
    /// `max_g |[conj(λ) ∗ λ]_g - δ_g|`.
    pub self_inverse_residual: f64,
    pub hermiticity_residual: f64,
    /// Smallest eigenvalue of `[λ_{g h⁻¹}]`.
    pub min_eigenvalue: f64,
    pub self_inverse: bool,
    pub positive: bool,
}

pub fn convolution_checks(
    group: &FiniteGroupData,
    lambda: &PositiveDefiniteFunction,
    tol: f64,
) -> Result<ConvolutionReport> {
    let n = group.order();
    if lambda.values.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: lambda.values.len(),
        });
    }
    let mut residual: f64 = 0.0;
    for g in 0..n {
        let conv: C64 = (0..n)
            .map(|h| lambda.values[group.mul(g, group.inverse[h])].conj() * lambda.values[h])
            .sum();
        let target = if g == group.identity { ONE } else { ZERO };
        residual = residual.max((conv - target).norm());
    }
    let hermiticity_residual = lambda.hermiticity_residual(group);
    let min = min_eigenvalue(&lambda.kernel_matrix(group));
    let scale = 1.0 + linalg::max_abs_vec(&lambda.values);
    Ok(ConvolutionReport {
        self_inverse_residual: residual,
        hermiticity_residual,
        min_eigenvalue: min,
        self_inverse: residual <= tol * scale * scale,
        positive: hermiticity_residual <= tol * scale && min >= -tol * scale * n as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// `ρ_n = Σ_g λ_g U_g(n)†`, one per irrep.
    pub rho: Vec<CMat>,
    /// `max_g |λ_g - Σ_n Tr[ρ_n U_g(n)] d_n|`.
    pub residual: f64,
    /// Smallest eigenvalue of each `ρ_n`.
    pub min_eigenvalues: Vec<f64>,
    pub hermiticity_residual: f64,
}

pub fn spectral_decompose(
    group: &FiniteGroupData,
    irreps: &[IrrepData],
    lambda: &PositiveDefiniteFunction,
    tol: f64,
) -> Result<SpectralReport> {
    validate_irreps(group, irreps, tol)?;
    let n = group.order();
    if lambda.values.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: lambda.values.len(),
        });
    }
    let rho: Vec<CMat> = irreps
        .iter()
        .map(|r| {
            let mut acc = CMat::zeros(r.dim, r.dim);
            for g in 0..n {
                acc += r.matrices[g].adjoint() * lambda.values[g];
            }
            acc.map(linalg::chop)
        })
        .collect();
    let back = synthesize(group, irreps, &rho)?;
    let residual = linalg::max_abs_vec(&(&back.values - &lambda.values));
    let min_eigenvalues = rho.iter().map(min_eigenvalue).collect();
    let hermiticity_residual = rho
        .iter()
        .fold(0.0, |acc: f64, r| acc.max(linalg::hermiticity_defect(r)));
    Ok(SpectralReport {
        rho,
        residual,
        min_eigenvalues,
        hermiticity_residual,
    })
}

/// `λ_g = Σ_n Tr[ρ_n U_g(n)] d_n`.
pub fn synthesize(group: &FiniteGroupData, irreps: &[IrrepData], rho: &[CMat]) -> Result<PositiveDefiniteFunction> {
    if rho.len() != irreps.len() {
        return Err(Error::DimensionMismatch {
            expected: irreps.len(),
            found: rho.len(),
        });
    }
    let values = CVec::from_fn(group.order(), |g, _| {
        irreps
            .iter()
            .zip(rho)
            .map(|(r, p)| (p * &r.matrices[g]).trace() * r.weight)
            .sum()
    });
    Ok(PositiveDefiniteFunction { values })
}
