//! Work statistics of a thermal scalar field measured through the Ramsey
//! interferometric scheme with a pointlike Unruh-DeWitt detector.
//!
//! The pipeline is spectrum → switching → characteristic function → work
//! distribution. [`oracle`] holds a truncated Fock-space reference used to
//! validate the closed forms.

pub mod charfunc;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod spectra;
pub mod switching;
pub mod wightman;
pub mod workdist;

pub use charfunc::{charfunc_pointlike, magnus_phase, MuGrid, RunParams};
pub use error::{Error, Result};
pub use spectra::{lapse_rescale, ModeLine, ModeSpectrum, SpectrumKind};
pub use switching::SwitchingProfile;
pub use wightman::{kms_residual, thermal_wightman, StripPoint};
