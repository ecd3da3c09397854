//! Actions, executions and message sequence charts.

mod action;
mod chart;
mod execution;

pub use action::{universe, Action, Arrow, Kind, Name};
pub use chart::{
    arrows_to_msc, concat, happens_before, is_prefix, linearisations, msc_equal, msc_is_rsc, msc_of, ArrowOrder, Event,
    HappensBefore, Linearisations, Msc,
};
pub use execution::{arrows_to_execution, exec_is_prefix, is_orphan_free, is_rsc, Execution};
