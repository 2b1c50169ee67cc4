pub mod cube;
pub mod harmonic;
pub mod interpolation;
pub mod morrey;
pub mod simon;
pub mod superharmonic;
pub mod sweep;
