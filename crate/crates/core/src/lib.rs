pub mod central;
pub mod cyclotomic;
pub mod discriminant;
pub mod error;
pub mod formulas;
pub mod laurent;
pub mod matrix;
pub mod modular;
pub mod ncpbw;
pub mod poisson;
pub mod poly;
pub mod scalar;
pub mod verify;

pub use cyclotomic::{make_field, CycNum, CyclotomicField, PrimeEmbedding};
pub use error::{Error, Result};
pub use laurent::LaurentQ;
pub use modular::Fp;
pub use ncpbw::{Algebra, NcElement, Presentation};
pub use poly::{FactoredPoly, Monomial, MultiPoly, Multidegree, PolyRing};

/// Polynomial in the central variables over Q(eps).
pub type Poly = MultiPoly<CycNum>;
/// Polynomial over F_p, the image of a [`Poly`] under a prime embedding.
pub type ModPoly = MultiPoly<Fp>;
pub type Factored = FactoredPoly<CycNum>;
