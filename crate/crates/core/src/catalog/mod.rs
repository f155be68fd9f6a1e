//! Builders for the named algebras, the finite-group Poisson family and the
//! periodic Wiener family.

pub mod group;
pub mod periodic;
pub mod standard;

pub use group::{
    build_group_poisson, convolution_checks, cyclic_irreps, s3_irreps, spectral_decompose, synthesize, validate_irreps,
    ConvolutionReport, FiniteGroupData, GroupPoisson, IrrepData, PositiveDefiniteFunction, SpectralReport,
};
pub use periodic::{build_periodic_wiener, self_inverse_spectrum, verify_mode_realization, ModeReport};
pub use standard::{
    build_standard, hp, hp_vacuum_form, mixed_wiener_poisson, mixed_wiener_poisson_form, newton, poisson,
    thermal_brownian, thermal_brownian_form, vacuum_brownian, wiener, zero_intensity_poisson, Standard,
};
