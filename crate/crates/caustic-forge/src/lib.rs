//! Light-ray billiards inside convex ovals: beams of rays as curves on the
//! cylinder of oriented lines, their reflection caustics and wave fronts,
//! and the machine checks (exactness, inflection counts, curve-shortening
//! behaviour, front/evolute dualities) that keep the numerics honest.

pub mod beam;
pub mod billiard;
pub mod caustic;
pub mod error;
pub mod flow;
pub mod geom;
pub mod lines;
pub mod numerics;
pub mod oval;
pub mod scenario;
pub mod svg;
pub mod tolerances;

pub use error::{Error, Result};
pub use geom::Vec2;
pub use lines::{CylinderCurve, OrientedLine};
pub use oval::{Oval, OvalFamily, Poly2};
