//! Numerical toolkit for quantum reference frames on finite homogeneous
//! spaces: operator-valued integration of bounded functions against POVMs and
//! the relativization map built from it.

pub mod channel;
pub mod error;
pub mod group;
pub mod integrate;
pub mod linalg;
pub mod povm;
pub mod random;
pub mod relativize;
pub mod report;
pub mod scenario;
pub mod suite;

pub use channel::Channel;
pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupAction, UnitaryRep};
pub use integrate::{integrate, OperatorFunction};
pub use linalg::{ComplexMatrix, Effect, State};
pub use povm::Povm;
pub use relativize::{yen, Frame, RelativizedOperator};
pub use report::{CheckRecord, Format, Report};
pub use scenario::Scenario;
pub use suite::{run, RunConfig};
