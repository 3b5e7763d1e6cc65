pub mod builtin;
pub mod chaincx;
pub mod decomp;
pub mod error;
pub mod functor;
pub mod linalg;
pub mod poset;
pub mod random;
pub use chaincx::{ChainFunctor, ChainMap};
pub use error::{Error, Result};
pub use functor::{Morphism, VectFunctor};
pub use linalg::Mat;
pub use poset::{Dimension, FinPoset, Point, RealizedPoset};
