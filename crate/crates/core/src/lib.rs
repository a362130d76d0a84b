//! Coherent states of the harmonic oscillator with a position-dependent
//! effective mass in the BenDaniel–Duke ordering.
//!
//! Units: `ħ = ω = 1`, with `2m(x)` as the mass profile. The ladder operators
//! `A = (1/√2m) d/dx + W`, `A† = −d/dx (1/√2m) + W` satisfy `[A, A†] = 1`, and
//! every quantity is computed through the mass-weighted coordinate
//! `x̄(x) = ∫₀ˣ √(2m)`.

pub mod coherent;
pub mod error;
pub mod oracle;
pub mod profiles;
pub mod quad;
pub mod squeeze;
pub mod states;
pub mod verify;
pub mod wigner;

pub use coherent::{coherent_state, evolve, CoherentSpec, QuadratureVariances};
pub use error::{Error, Result};
pub use oracle::{SpectrumReport, MAX_LEVELS};
pub use profiles::{MassProfile, ProfileKind};
pub use quad::{moments, Estimate, MomentReport, QuadConfig};
pub use squeeze::{Convention, Family, SweepRow, SweepSpec};
pub use states::{eigenstate, Wavefunction};
pub use wigner::{Axis, WignerDiagnostics, WignerGrid};

pub use num_complex::Complex64;
