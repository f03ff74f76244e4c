pub mod error;
pub mod igusa;
pub mod exactfield;
pub mod genus2;
pub mod jacobian;
pub mod kowtop;
pub mod numverify;
pub mod tower;

pub use error::{Error, Result};
pub use exactfield::{Field, Poly, Rational, Ring};
pub use genus2::{HyperCurve, QuadSplit, RichelotOut};
pub use numverify::Report;
pub use tower::{build_tower, tower_report, Strategy, TowerMode, TowerOptions, TowerReport};
