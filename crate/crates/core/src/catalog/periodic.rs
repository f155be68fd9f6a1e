//! Quantum Wiener periodic motion: `d_i·d_k⋆ = ρ_k δ_ik d_t` for
//! `|i|, |k| ≤ K` with `d_k⋆ = d_{-k}` and a self-inverse spectrum
//! `ρ_{-k} = 1/ρ_k`, and its realization by `N` annihilation/creation modes.

use std::f64::consts::PI;

use crate::algebra::{AlgebraBuilder, ItoAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{c, real, C64};

/// Full spectrum `[ρ_{-K} .. ρ_K]` from `ρ_1 .. ρ_K`, with `ρ_0 = 1`.
pub fn self_inverse_spectrum(positive: &[f64]) -> Vec<f64> {
    let mut full: Vec<f64> = positive.iter().rev().map(|r| 1.0 / r).collect();
    full.push(1.0);
    full.extend_from_slice(positive);
    full
}

fn validate_spectrum(k_max: usize, rho: &[f64], tol: f64) -> Result<()> {
    if rho.len() != 2 * k_max + 1 {
        return Err(Error::Parameter(format!(
            "expected {} spectral values ρ_-K .. ρ_K, got {}",
            2 * k_max + 1,
            rho.len()
        )));
    }
    if let Some(bad) = rho.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(Error::Parameter(format!("spectral values must be positive, got {bad}")));
    }
    for k in 0..=k_max {
        let (minus, plus) = (rho[k_max - k], rho[k_max + k]);
        if (minus * plus - 1.0).abs() > tol {
            return Err(Error::Parameter(format!(
                "spectrum is not self-inverse: ρ_{k} ρ_-{k} = {}",
                minus * plus
            )));
        }
    }
    Ok(())
}

pub fn mode_label(k: i64) -> String {
    format!("d_{k}")
}

/// Basis `[d_t, d_{-K} .. d_K]`, dimension `2K + 2`.
pub fn build_periodic_wiener(k_max: usize, rho: &[f64], tol: f64) -> Result<ItoAlgebra> {
    validate_spectrum(k_max, rho, tol)?;
    let kk = k_max as i64;
    let idx = |k: i64| (k + kk) as usize + 1;
    let mut labels = vec!["d_t".to_string()];
    labels.extend((-kk..=kk).map(mode_label));
    let mut b = AlgebraBuilder::new(labels).death(0);
    for i in -kk..=kk {
        b = b.star_pair(idx(i), idx(-i));
        // d_i · d_{-i} = d_i · d_i⋆ = ρ_i d_t
        b = b.product(idx(i), idx(-i), 0, real(rho[idx(i) - 1]));
    }
    Ok(b.build()?.with_tol(tol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeReport {
    pub k_max: usize,
    pub cells: usize,
    /// `grid[i + K][k + K]` is the coefficient of `d_t` in `d_i · d_k⋆`.
    pub grid: Vec<Vec<C64>>,
    /// `max |grid - ρ_k δ_ik|`.
    pub residual: f64,
}

/// Amplitudes over `N` modes with `θ_n = 2πn/N - π`: annihilation
/// `(ρ_k/N)^{1/2} e^{ikθ_n}`, creation `(ρ_{-k}/N)^{1/2} e^{ikθ_n}`.
pub fn mode_amplitudes(k_max: usize, rho: &[f64], cells: usize) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let kk = k_max as i64;
    let theta: Vec<f64> = (1..=cells).map(|n| 2.0 * PI * n as f64 / cells as f64 - PI).collect();
    let wave = |k: i64, weight: f64| -> Vec<C64> {
        let amp = (weight / cells as f64).sqrt();
        theta
            .iter()
            .map(|t| {
                let phase = k as f64 * t;
                c(amp * phase.cos(), amp * phase.sin())
            })
            .collect()
    };
    let at = |k: i64| rho[(k + kk) as usize];
    let ann = (-kk..=kk).map(|k| wave(k, at(k))).collect();
    let cre = (-kk..=kk).map(|k| wave(k, at(-k))).collect();
    (ann, cre)
}

/// Reproduce `d_i·d_k⋆ = ρ_k δ_ik d_t` from `dΛ_-^n dΛ_m^+ = δ_nm dt` and
/// `dΛ_m^+ dΛ_-^n = 0`: only the annihilation part of `d_i` meets the
/// creation part of `d_k⋆ = d_{-k}`.
pub fn verify_mode_realization(k_max: usize, rho: &[f64], cells: usize, tol: f64) -> Result<ModeReport> {
    validate_spectrum(k_max, rho, tol)?;
    if cells == 0 {
        return Err(Error::Parameter("need at least one mode".into()));
    }
    let kk = k_max as i64;
    let (ann, cre) = mode_amplitudes(k_max, rho, cells);
    let size = 2 * k_max + 1;
    let mut grid = vec![vec![C64::new(0.0, 0.0); size]; size];
    let mut residual: f64 = 0.0;
    let mut worst = (0i64, 0i64, 0.0f64);
    let mut pairs = Vec::new();
    for i in -kk..=kk {
        for k in -kk..=kk {
            let a = &ann[(i + kk) as usize];
            let b = &cre[(-k + kk) as usize];
            let value: C64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let expected = if i == k { rho[(k + kk) as usize] } else { 0.0 };
            let dev = (value - real(expected)).norm();
            grid[(i + kk) as usize][(k + kk) as usize] = value;
            if dev > residual {
                residual = dev;
            }
            if dev > tol {
                pairs.push((i, k));
                if dev > worst.2 {
                    worst = (i, k, value.norm());
                }
            }
        }
    }
    if !pairs.is_empty() {
        return Err(Error::Aliasing {
            cells,
            i: worst.0,
            k: worst.1,
            value: worst.2,
            pairs,
        });
    }
    Ok(ModeReport {
        k_max,
        cells,
        grid,
        residual,
    })
}
