//! Schottky groups `Γ_δ = ⟨h_{p_n}⟩` acting on the upper half-plane, and the
//! horocyclic dynamics of the quotient surfaces along the ray through `i`.
//!
//! The crate is layered:
//!
//! - [`hyperbolic`]: points, Möbius maps, distances, Busemann cocycles and
//!   the geodesic and horocyclic flows;
//! - [`schottky`]: the parameter `δ`, the index sequence, generators,
//!   isometry circles and the disjointness and ping-pong certificates;
//! - [`words`]: reduced-word enumeration and the classification of `∞`;
//! - [`orbit`]: distances to the circles, injectivity estimates, Busemann
//!   limits and return times;
//! - [`suites`]: the five verification suites built from the above.
//!
//! Every suite yields a [`report::Certificate`] whose checks carry both sides
//! of an inequality, the margin and a pass flag.
//!
//! ```
//! use horoflow::schottky::SurfaceParameter;
//! use horoflow::suites::{run_suite, Suite, SuiteConfig};
//!
//! let config = SuiteConfig::new(SurfaceParameter::new(3.0)?);
//! let report = run_suite(Suite::Disjoint, &config)?;
//! assert!(report.passed());
//! # Ok::<(), horoflow::Error>(())
//! ```

mod error;
pub mod hyperbolic;
pub mod orbit;
pub mod precision;
pub mod report;
pub mod schottky;
pub mod suites;
pub mod tolerances;
pub mod words;

pub use error::{Error, Result};

/// Chapters of the guide in `book/`, compiled here so their snippets run
/// as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/half-plane.md")]
    pub mod half_plane {}
    #[doc = include_str!("../../../book/src/flows.md")]
    pub mod flows {}
    #[doc = include_str!("../../../book/src/schottky.md")]
    pub mod schottky {}
    #[doc = include_str!("../../../book/src/words.md")]
    pub mod words {}
    #[doc = include_str!("../../../book/src/fineness.md")]
    pub mod fineness {}
    #[doc = include_str!("../../../book/src/return-times.md")]
    pub mod return_times {}
    #[doc = include_str!("../../../book/src/precision.md")]
    pub mod precision {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
