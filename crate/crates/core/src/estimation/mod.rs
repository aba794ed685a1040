//! Parameter estimation and structure selection.

pub mod ls;
pub mod selection;

pub use ls::{
    constrained_least_squares, constrained_least_squares_named, least_squares, least_squares_named,
    EqualityConstraint, Estimate, CONDITION_WARNING,
};
pub use selection::{
    aic_choose_size, aic_select, frols_matrix, frols_select, AicChoice, SelectionReport,
    SelectionStep,
};
