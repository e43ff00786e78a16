//! Bundled example models, used by the test suites and the examples.

use crate::loader::augment_entry_resets;
use crate::model::{Composition, Declarations};
use crate::syntax::parse;

/// Flat two-location thermostat.
pub const THERMOSTAT_FLAT: &str = include_str!("../models/thermostat.hcif");
/// Thermostat whose On location contains a clock substructure.
pub const THERMOSTAT_HIER: &str = include_str!("../models/thermostat_hier.hcif");
/// Substructure with two candidate initial locations, only one of which the
/// entering reset enables.
pub const EAGER_CHOICE: &str = include_str!("../models/eager_choice.hcif");
/// Exponential guard and termination crossings during one delay.
pub const ENABLED_OVER_TIME: &str = include_str!("../models/enabled_over_time.hcif");
/// Two flat automata synchronizing on a handover action.
pub const HANDOVER: &str = include_str!("../models/handover.hcif");
/// Three levels of nesting.
pub const TOWER: &str = include_str!("../models/tower.hcif");

fn built_in(src: &str) -> (Declarations, Composition) {
    let file = parse(src).expect("bundled model parses");
    (file.declarations(), file.comp)
}

pub fn thermostat_flat() -> (Declarations, Composition) {
    built_in(THERMOSTAT_FLAT)
}

pub fn thermostat_hier() -> (Declarations, Composition) {
    built_in(THERMOSTAT_HIER)
}

/// The hierarchical thermostat with entry resets augmented, the form used
/// for simulation and equivalence checking.
pub fn thermostat_hier_augmented() -> (Declarations, Composition) {
    let file = parse(THERMOSTAT_HIER).expect("bundled model parses");
    let file = augment_entry_resets(&file);
    (file.declarations(), file.comp)
}

pub fn eager_choice() -> (Declarations, Composition) {
    built_in(EAGER_CHOICE)
}

pub fn enabled_over_time() -> (Declarations, Composition) {
    built_in(ENABLED_OVER_TIME)
}

pub fn handover() -> (Declarations, Composition) {
    built_in(HANDOVER)
}

pub fn tower() -> (Declarations, Composition) {
    built_in(TOWER)
}
