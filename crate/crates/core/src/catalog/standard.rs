use crate::algebra::{AlgebraBuilder, ItoAlgebra};
use crate::error::{Error, Result};
use crate::forms::{ThermalForm, VacuumForm, VacuumTriple};
use crate::linalg::{real, CMat, CRow, CVec, C64, ONE, ZERO};

/// Named algebras with their parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Standard {
    Newton,
    Wiener,
    Poisson,
    Hp,
    ThermalBrownian { rho_plus: f64, rho_minus: f64 },
    MixedWienerPoisson,
    ZeroIntensityPoisson,
    VacuumBrownian,
}

impl Standard {
    pub const NAMES: [&'static str; 8] = [
        "newton",
        "wiener",
        "poisson",
        "hp",
        "thermal_brownian",
        "mixed_wiener_poisson",
        "zero_intensity_poisson",
        "vacuum_brownian",
    ];

    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let no_params = |s: Standard| {
            if params.is_empty() {
                Ok(s)
            } else {
                Err(Error::Parameter(format!("{name} takes no parameters")))
            }
        };
        match name {
            "newton" => no_params(Standard::Newton),
            "wiener" => no_params(Standard::Wiener),
            "poisson" => no_params(Standard::Poisson),
            "hp" => no_params(Standard::Hp),
            "mixed_wiener_poisson" => no_params(Standard::MixedWienerPoisson),
            "zero_intensity_poisson" => no_params(Standard::ZeroIntensityPoisson),
            "vacuum_brownian" => no_params(Standard::VacuumBrownian),
            "thermal_brownian" => match params {
                [rho_plus, rho_minus] => Ok(Standard::ThermalBrownian {
                    rho_plus: *rho_plus,
                    rho_minus: *rho_minus,
                }),
                _ => Err(Error::Parameter("thermal_brownian takes rho_plus and rho_minus".into())),
            },
            other => Err(Error::Parameter(format!(
                "unknown algebra `{other}`, expected one of {}",
                Standard::NAMES.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Standard::Newton => "newton",
            Standard::Wiener => "wiener",
            Standard::Poisson => "poisson",
            Standard::Hp => "hp",
            Standard::ThermalBrownian { .. } => "thermal_brownian",
            Standard::MixedWienerPoisson => "mixed_wiener_poisson",
            Standard::ZeroIntensityPoisson => "zero_intensity_poisson",
            Standard::VacuumBrownian => "vacuum_brownian",
        }
    }
}

pub fn build_standard(which: &Standard) -> Result<ItoAlgebra> {
    match which {
        Standard::Newton => Ok(newton()),
        Standard::Wiener => Ok(wiener()),
        Standard::Poisson => Ok(poisson()),
        Standard::Hp => Ok(hp()),
        Standard::ThermalBrownian { rho_plus, rho_minus } => thermal_brownian(*rho_plus, *rho_minus),
        Standard::MixedWienerPoisson => Ok(mixed_wiener_poisson()),
        Standard::ZeroIntensityPoisson => Ok(zero_intensity_poisson()),
        Standard::VacuumBrownian => Ok(vacuum_brownian()),
    }
}

fn build(b: AlgebraBuilder) -> ItoAlgebra {
    b.build().expect("catalog tables are well shaped")
}

/// `C d_t` with `d_t² = 0`.
pub fn newton() -> ItoAlgebra {
    build(AlgebraBuilder::new(["d_t"]).death(0))
}

/// `d_w² = d_t`.
pub fn wiener() -> ItoAlgebra {
    build(AlgebraBuilder::new(["d_t", "d_w"]).product(1, 1, 0, ONE).death(0))
}

/// `d_m² = d_m + d_t`.
pub fn poisson() -> ItoAlgebra {
    build(
        AlgebraBuilder::new(["d_t", "d_m"])
            .product(1, 1, 0, ONE)
            .product(1, 1, 1, ONE)
            .death(0),
    )
}

/// Basis `[d_t, e_-, e^+, e]` with `e_-·e^+ = d_t`, `e_-·e = e_-`,
/// `e·e^+ = e^+`, `e·e = e` and `star(e_-) = e^+`.
pub fn hp() -> ItoAlgebra {
    build(
        AlgebraBuilder::new(["d_t", "e_-", "e^+", "e"])
            .product(1, 2, 0, ONE)
            .product(1, 3, 1, ONE)
            .product(3, 2, 2, ONE)
            .product(3, 3, 3, ONE)
            .star_pair(1, 2)
            .death(0),
    )
}

/// Triples of [`hp`] on `K = C`.
pub fn hp_vacuum_form() -> VacuumForm {
    let one = |x: C64| CVec::from_element(1, x);
    let t = |alpha, zeta, eta, a| VacuumTriple {
        alpha,
        zeta: one(zeta),
        eta: CRow::from_element(1, eta),
        a: CMat::from_element(1, 1, a),
    };
    VacuumForm {
        k_dim: 1,
        elements: vec![
            t(ONE, ZERO, ZERO, ZERO),
            t(ZERO, ZERO, ONE, ZERO),
            t(ZERO, ONE, ZERO, ZERO),
            t(ZERO, ZERO, ZERO, ONE),
        ],
    }
}

/// `d_w·d_w* = ρ_+ d_t`, `d_w*·d_w = ρ_- d_t` on `[d_t, d_w, d_w*]`.
pub fn thermal_brownian(rho_plus: f64, rho_minus: f64) -> Result<ItoAlgebra> {
    if !(rho_minus >= 0.0) || !(rho_plus >= rho_minus) || !rho_plus.is_finite() {
        return Err(Error::Parameter(format!(
            "thermal_brownian needs rho_plus >= rho_minus >= 0, got ({rho_plus}, {rho_minus})"
        )));
    }
    Ok(build(
        AlgebraBuilder::new(["d_t", "d_w", "d_w*"])
            .product(1, 2, 0, real(rho_plus))
            .product(2, 1, 0, real(rho_minus))
            .star_pair(1, 2)
            .death(0),
    ))
}

/// Pairs of [`thermal_brownian`] over the zero-product space `D = C²`, which
/// exist when `ρ_- > 0` so that the plus metric `diag(ρ_-, ρ_+)` is definite.
pub fn thermal_brownian_form(rho_plus: f64, rho_minus: f64) -> Option<ThermalForm> {
    (rho_minus > 0.0 && rho_plus >= rho_minus).then(|| {
        let swap = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let metric = CMat::from_diagonal(&CVec::from_vec(vec![real(rho_minus), real(rho_plus)]));
        ThermalForm::new(2, vec![ZERO; 8], swap, metric)
    })
}

/// Wiener and Poisson increments with `d_w·d_m = 0 = d_m·d_w`.
pub fn mixed_wiener_poisson() -> ItoAlgebra {
    build(
        AlgebraBuilder::new(["d_t", "d_w", "d_m"])
            .product(1, 1, 0, ONE)
            .product(2, 2, 0, ONE)
            .product(2, 2, 2, ONE)
            .death(0),
    )
}

/// Pairs of [`mixed_wiener_poisson`] over `D = C ⊕ C` with `e_2² = e_2`.
pub fn mixed_wiener_poisson_form() -> ThermalForm {
    let mut mul = vec![ZERO; 8];
    mul[(2 + 1) * 2 + 1] = ONE;
    ThermalForm::new(2, mul, CMat::identity(2, 2), CMat::identity(2, 2))
}

/// Poisson algebra of intensity zero: `e·e = e` and `l(e) = 0`, so `e` spans
/// the null ideal and the faithful quotient is [`newton`].
pub fn zero_intensity_poisson() -> ItoAlgebra {
    build(AlgebraBuilder::new(["d_t", "e"]).product(1, 1, 1, ONE).death(0))
}

/// `span{d_t, e_-, e^+}` inside [`hp`].
pub fn vacuum_brownian() -> ItoAlgebra {
    build(
        AlgebraBuilder::new(["d_t", "e_-", "e^+"])
            .product(1, 2, 0, ONE)
            .star_pair(1, 2)
            .death(0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_axioms, Element};

    #[test]
    fn every_standard_algebra_passes() {
        for name in Standard::NAMES {
            let params: &[f64] = if name == "thermal_brownian" { &[2.0, 1.0] } else { &[] };
            let alg = build_standard(&Standard::parse(name, params).unwrap()).unwrap();
            let report = check_axioms(&alg);
            assert!(report.pass, "{name}: {report}");
        }
    }

    #[test]
    fn newton_squares_to_zero() {
        let n = newton();
        assert_eq!(n.dim(), 1);
        let d = n.basis_element(0);
        assert_eq!(n.mul(&d, &d).unwrap(), Element::zeros(1));
    }

    #[test]
    fn hp_number_is_idempotent() {
        let h = hp();
        assert_eq!(h.dim(), 4);
        let e = h.basis_element(3);
        assert_eq!(h.mul(&e, &e).unwrap(), e);
        hp_vacuum_form().check(&h).unwrap();
    }

    #[test]
    fn mixed_increments_are_orthogonal() {
        let m = mixed_wiener_poisson();
        let (w, p) = (m.basis_element(1), m.basis_element(2));
        assert_eq!(m.mul(&w, &p).unwrap(), Element::zeros(3));
        assert_eq!(m.mul(&p, &w).unwrap(), Element::zeros(3));
        mixed_wiener_poisson_form().check(&m).unwrap();
    }

    #[test]
    fn thermal_parameters_validated() {
        assert!(matches!(thermal_brownian(1.0, 2.0), Err(Error::Parameter(_))));
        assert!(matches!(thermal_brownian(1.0, -0.5), Err(Error::Parameter(_))));
        assert!(thermal_brownian(1.0, 1.0).is_ok());
        let t = thermal_brownian(2.0, 1.0).unwrap();
        thermal_brownian_form(2.0, 1.0).unwrap().check(&t).unwrap();
        assert!(thermal_brownian_form(2.0, 0.0).is_none());
    }

    #[test]
    fn parse_rejects_unknown_and_stray_params() {
        assert!(Standard::parse("gauss", &[]).is_err());
        assert!(Standard::parse("wiener", &[1.0]).is_err());
        assert!(Standard::parse("thermal_brownian", &[1.0]).is_err());
    }
}
