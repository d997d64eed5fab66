pub mod config;
pub mod error;
pub mod graph;
pub mod grid;
pub mod io;
pub mod layout;
pub mod mesh;
pub mod motion;
pub mod pipeline;
pub mod polygon;
pub mod steiner;
pub mod strain;
pub mod synth;
pub mod terminals;

pub use error::{Error, Result};

/// Guide chapters, compiled so that their code samples stay correct.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/strain.md")]
    pub struct Strain;
    #[doc = include_str!("../../../book/src/weights.md")]
    pub struct Weights;
    #[doc = include_str!("../../../book/src/steiner.md")]
    pub struct Steiner;
    #[doc = include_str!("../../../book/src/layout.md")]
    pub struct Layout;
    #[doc = include_str!("../../../book/src/pipeline.md")]
    pub struct Pipeline;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
    #[doc = include_str!("../../../book/src/http.md")]
    pub struct Http;
}
