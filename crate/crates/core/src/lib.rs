//! Kendall's τ-b as a picture.
//!
//! Every pair of observations becomes a segment from the origin; after
//! rotation by the pair's angle concordant pairs land above the x axis and
//! discordant pairs below it, so the balance of the two half-planes is the
//! rank correlation.
//!
//! ```
//! use taugraph::dataset::RankedDataset;
//! use taugraph::kendall::tau_b_fast;
//!
//! let d = RankedDataset::from_columns(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]);
//! let r = tau_b_fast(&d).unwrap();
//! assert_eq!(r.counts.concordant, 2);
//! assert_eq!(r.counts.discordant, 1);
//! ```

pub mod dataset;
pub mod geometry;
pub mod kendall;
pub mod render;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/pairs.md")]
    struct Pairs;
    #[doc = include_str!("../../../book/src/geometry.md")]
    struct Geometry;
    #[doc = include_str!("../../../book/src/rendering.md")]
    struct Rendering;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
    #[doc = include_str!("../../../book/src/service.md")]
    struct Service;
}
