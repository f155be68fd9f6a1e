//! Discrete toy Fock space: `N` time cells, each carrying `C ⊕ K∘` (vacuum
//! line plus one particle). The increment of `Λ(t, a)` over one cell is
//!
//! ```text
//! [ h l(a)      √h k†(a) ]
//! [ √h k(a)     i(a)     ]
//! ```
//!
//! and `Λ_n(a)` is the sum of that matrix placed in slots `0 .. n`. Operators
//! are applied to state vectors without materializing the `(1+m)^N` square
//! matrix.

use crate::algebra::{Element, ItoAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64, ZERO};
use crate::representation::FundamentalRep;

pub const DEFAULT_CAP: usize = 1 << 20;

/// Largest space for which [`ProcessState::to_dense`] builds a matrix.
pub const DENSE_CAP: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyFockConfig {
    pub h: f64,
    pub cells: usize,
    pub cap: usize,
}

impl ToyFockConfig {
    pub fn new(h: f64, cells: usize) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Parameter(format!("time step must be positive, got {h}")));
        }
        if cells == 0 {
            return Err(Error::Parameter("need at least one cell".into()));
        }
        Ok(ToyFockConfig {
            h,
            cells,
            cap: DEFAULT_CAP,
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// `(1 + m)^N`, or a cap error.
    pub fn space_dim(&self, gns_dim: usize) -> Result<usize> {
        let local = 1 + gns_dim;
        let mut dim: usize = 1;
        for _ in 0..self.cells {
            dim = dim
                .checked_mul(local)
                .filter(|&d| d <= self.cap)
                .ok_or(Error::DimensionCap {
                    dim: dim.saturating_mul(local),
                    cap: self.cap,
                })?;
        }
        Ok(dim)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellIncrement {
    pub h: f64,
    pub matrix: CMat,
}

impl CellIncrement {
    pub fn vacuum_mean(&self) -> C64 {
        self.matrix[(0, 0)]
    }

    pub fn local_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> CellIncrement {
        CellIncrement {
            h: self.h,
            matrix: self.matrix.adjoint(),
        }
    }
}

pub fn build_cell_increment(rep: &FundamentalRep, a: &Element, h: f64) -> Result<CellIncrement> {
    if a.len() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: a.len(),
        });
    }
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("time step must be positive, got {h}")));
    }
    let m = rep.gns_dim();
    let sh = linalg::real(h.sqrt());
    let mut matrix = CMat::zeros(1 + m, 1 + m);
    matrix[(0, 0)] = rep.l(a) * h;
    let k = rep.k(a);
    let kdag = rep.kdag(a);
    for r in 0..m {
        matrix[(0, 1 + r)] = kdag[r] * sh;
        matrix[(1 + r, 0)] = k[r] * sh;
    }
    matrix.view_mut((1, 1), (m, m)).copy_from(&rep.i(a));
    Ok(CellIncrement { h, matrix })
}

/// `(I ⊗ .. ⊗ M ⊗ .. ⊗ I) ψ` with `M` in `slot`; cell `j` is digit `j` of the
/// base-`d` state index.
pub fn apply_in_slot(m: &CMat, slot: usize, psi: &CVec) -> CVec {
    let d = m.nrows();
    let stride = d.pow(slot as u32);
    let block = stride * d;
    let mut out = CVec::zeros(psi.len());
    for base in (0..psi.len()).step_by(block) {
        for low in 0..stride {
            for s in 0..d {
                let v = psi[base + s * stride + low];
                if v == ZERO {
                    continue;
                }
                for r in 0..d {
                    let w = m[(r, s)];
                    if w != ZERO {
                        out[base + r * stride + low] += w * v;
                    }
                }
            }
        }
    }
    out
}

/// `Λ_n(a)` after `step` of `cells` cells; acts as the identity beyond `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessState {
    pub step: usize,
    pub cells: usize,
    pub increment: CellIncrement,
}

impl ProcessState {
    pub fn space_dim(&self) -> usize {
        self.increment.local_dim().pow(self.cells as u32)
    }

    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.space_dim());
        v[0] = linalg::ONE;
        v
    }

    pub fn apply(&self, psi: &CVec) -> CVec {
        let mut out = CVec::zeros(psi.len());
        for slot in 0..self.step {
            out += apply_in_slot(&self.increment.matrix, slot, psi);
        }
        out
    }

    pub fn adjoint(&self) -> ProcessState {
        ProcessState {
            increment: self.increment.adjoint(),
            ..self.clone()
        }
    }

    pub fn vacuum_mean(&self) -> C64 {
        self.apply(&self.vacuum())[0]
    }

    /// `⟨Ω| Λ_n^p Ω⟩` for `p = 1 ..= order`.
    pub fn moments(&self, order: usize) -> Vec<C64> {
        let mut v = self.vacuum();
        (0..order)
            .map(|_| {
                v = self.apply(&v);
                v[0]
            })
            .collect()
    }

    pub fn to_dense(&self) -> Result<CMat> {
        let n = self.space_dim();
        if n > DENSE_CAP {
            return Err(Error::DimensionCap { dim: n, cap: DENSE_CAP });
        }
        let mut out = CMat::zeros(n, n);
        for j in 0..n {
            let mut e = CVec::zeros(n);
            e[j] = linalg::ONE;
            out.set_column(j, &self.apply(&e));
        }
        Ok(out)
    }
}

/// States after steps `0 ..= N`.
pub fn simulate_process(rep: &FundamentalRep, a: &Element, config: &ToyFockConfig) -> Result<Vec<ProcessState>> {
    config.space_dim(rep.gns_dim())?;
    let increment = build_cell_increment(rep, a, config.h)?;
    Ok((0..=config.cells)
        .map(|step| ProcessState {
            step,
            cells: config.cells,
            increment: increment.clone(),
        })
        .collect())
}

/// Vacuum mean of `ΔΛ(a) ΔΛ(b) - ΔΛ(a·b)` in one cell, which equals
/// `h² l(a) l(b)`.
pub fn ito_deviation(alg: &ItoAlgebra, rep: &FundamentalRep, a: &Element, b: &Element, h: f64) -> Result<C64> {
    let ab = alg.mul(a, b)?;
    let ma = build_cell_increment(rep, a, h)?;
    let mb = build_cell_increment(rep, b, h)?;
    let mab = build_cell_increment(rep, &ab, h)?;
    Ok((&ma.matrix * &mb.matrix)[(0, 0)] - mab.matrix[(0, 0)])
}

/// Deviations at `h` and `h/10` and their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct ItoTableReport {
    pub h: f64,
    pub deviation: f64,
    pub deviation_refined: f64,
    /// `deviation / deviation_refined`; `None` when both vanish.
    pub ratio: Option<f64>,
    /// `deviation / h²`.
    pub constant: f64,
    pub order_two: bool,
}

/// Below this a deviation counts as exactly zero.
pub const EXACT_DEVIATION: f64 = 1e-14;

pub fn verify_ito_table(
    alg: &ItoAlgebra,
    rep: &FundamentalRep,
    a: &Element,
    b: &Element,
    h: f64,
) -> Result<ItoTableReport> {
    let coarse = ito_deviation(alg, rep, a, b, h)?.norm();
    let fine = ito_deviation(alg, rep, a, b, h / 10.0)?.norm();
    let exact = coarse <= EXACT_DEVIATION;
    let ratio = (!exact && fine > 0.0).then(|| coarse / fine);
    let order_two = exact || ratio.is_some_and(|r| (50.0..=200.0).contains(&r));
    Ok(ItoTableReport {
        h,
        deviation: coarse,
        deviation_refined: fine,
        ratio,
        constant: coarse / (h * h),
        order_two,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::real;
    use crate::representation::gns_build;

    #[test]
    fn wiener_increment_by_hand() {
        let w = catalog::wiener();
        let rep = gns_build(&w).unwrap();
        let inc = build_cell_increment(&rep, &w.basis_element(1), 0.25).unwrap();
        let want = CMat::from_row_slice(2, 2, &[ZERO, real(0.5), real(0.5), ZERO]);
        assert!(linalg::max_abs(&(&inc.matrix - want)) < 1e-15);
        assert_eq!(inc.vacuum_mean(), ZERO);
        let t = build_cell_increment(&rep, &w.basis_element(0), 0.25).unwrap();
        assert_eq!(t.vacuum_mean(), real(0.25));
    }

    #[test]
    fn star_gives_adjoint() {
        let h = catalog::hp();
        let rep = gns_build(&h).unwrap();
        let a = Element::from_coeffs(vec![linalg::c(0.3, 1.0), real(2.0), linalg::c(0.0, -1.0), real(0.5)]);
        let m = build_cell_increment(&rep, &a, 0.1).unwrap();
        let ms = build_cell_increment(&rep, &h.star(&a).unwrap(), 0.1).unwrap();
        assert!(linalg::max_abs(&(ms.matrix - m.matrix.adjoint())) < 1e-15);
    }

    #[test]
    fn wiener_second_moment() {
        let w = catalog::wiener();
        let rep = gns_build(&w).unwrap();
        let states = simulate_process(&rep, &w.basis_element(1), &ToyFockConfig::new(0.125, 8).unwrap()).unwrap();
        let last = states.last().unwrap();
        let m = last.moments(2);
        assert!(m[0].norm() < 1e-15);
        assert!((m[1] - real(1.0)).norm() < 1e-10);
    }

    #[test]
    fn time_mean_is_deterministic() {
        let p = catalog::poisson();
        let rep = gns_build(&p).unwrap();
        let states = simulate_process(&rep, &p.basis_element(0), &ToyFockConfig::new(0.3, 5).unwrap()).unwrap();
        for s in &states {
            assert!((s.vacuum_mean() - real(0.3 * s.step as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn number_process_has_zero_moments() {
        let h = catalog::hp();
        let rep = gns_build(&h).unwrap();
        let states = simulate_process(&rep, &h.basis_element(3), &ToyFockConfig::new(0.5, 4).unwrap()).unwrap();
        assert!(states.last().unwrap().moments(4).iter().all(|z| *z == ZERO));
    }

    #[test]
    fn cap_is_enforced() {
        let m = catalog::mixed_wiener_poisson();
        let rep = gns_build(&m).unwrap();
        let cfg = ToyFockConfig::new(0.1, 20).unwrap();
        assert!(matches!(
            simulate_process(&rep, &m.basis_element(1), &cfg),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn ito_table_examples() {
        let w = catalog::wiener();
        let rep = gns_build(&w).unwrap();
        let dw = w.basis_element(1);
        assert!(ito_deviation(&w, &rep, &dw, &dw, 0.01).unwrap().norm() < 1e-16);
        let dt = w.basis_element(0);
        let r = verify_ito_table(&w, &rep, &dt, &dt, 0.01).unwrap();
        assert!((r.deviation - 1e-4).abs() < 1e-18);
        assert!(r.order_two);
        assert!((r.ratio.unwrap() - 100.0).abs() < 1e-8);

        let h = catalog::hp();
        let rep = gns_build(&h).unwrap();
        for step in [1e-2, 1e-3] {
            let r = verify_ito_table(&h, &rep, &h.basis_element(1), &h.basis_element(2), step).unwrap();
            assert!(r.deviation <= step * step);
            assert!(r.order_two);
        }
    }

    #[test]
    fn disjoint_slots_commute() {
        let h = catalog::hp();
        let rep = gns_build(&h).unwrap();
        let a = build_cell_increment(&rep, &h.basis_element(1), 0.2).unwrap().matrix;
        let b = build_cell_increment(&rep, &h.basis_element(2), 0.2).unwrap().matrix;
        let psi = CVec::from_fn(8, |i, _| linalg::c(i as f64, 1.0 - i as f64));
        let ab = apply_in_slot(&a, 0, &apply_in_slot(&b, 2, &psi));
        let ba = apply_in_slot(&b, 2, &apply_in_slot(&a, 0, &psi));
        assert_eq!(ab, ba);
    }
}
