//! Optimal covariant copying of entangled two-qubit states.
//!
//! An input `|psi> = alpha|up up> + beta|down down>` on qubits 1 and 2 is
//! copied onto qubits 3 and 4. The optimal covariant map is available in
//! three independent forms: the block matrices of the coupled basis, the
//! irreducible-tensor expansion and a Kraus/dilation realization.
//!
//! ```
//! use entcopy::cloner::{f_max, EntanglementClass};
//!
//! let bell = EntanglementClass::maximally_entangled();
//! assert!((f_max(bell) - 0.5).abs() < 1e-12);
//! ```

pub mod angular;
pub mod channel;
pub mod cloner;
pub mod error;
pub mod linalg;
pub mod measures;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
