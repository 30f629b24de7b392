//! Protocol math and efficiency calculators for photon-mediated entanglement
//! between trapped-ion memories.

pub mod error;
pub mod heralding;
pub mod hilbert;
pub mod ion_crystal;
pub mod light_collection;
pub mod network;
pub mod photon_source;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use hilbert::{Amplitude, BasisLabel, Channel, Level, Mode, Port, PureState};
pub use photon_source::QubitKind;
