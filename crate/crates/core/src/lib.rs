pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod initdata;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
pub use series::NormSeries;
pub use spectral::{Grid, SobolevSeminorm, SpectralField};

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    pub mod spectral {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    pub mod dynamics {}
    #[doc = include_str!("../../../book/src/initdata.md")]
    pub mod initdata {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    pub mod diagnostics {}
    #[doc = include_str!("../../../book/src/harness.md")]
    pub mod harness {}
}
