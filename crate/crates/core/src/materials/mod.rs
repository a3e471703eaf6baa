//! Uniaxial constitutive laws for UHPC, mild steel and prestressing strand.

pub mod fiber;
pub mod steel;
pub mod uhpc;

pub use fiber::{fiber_response, rebar_response, update_fiber, FiberResponse, FiberState, RebarLaw, RebarState};
pub use steel::{SteelLaw, StrandLaw};
pub use uhpc::{damage_parameter, DamageMode, DamageOnset, FiberGeometry, MaterialRecord, UhpcLaw};
