//! Case-study builders, the ionic-liquid continuous evaluator and the
//! black-box search interface.
//!
//! Both bundled parameter sets are synthetic placeholders (marked with
//! `"provenance": "synthetic"`). Feasible-configuration counts depend only
//! on constraint structure, so they hold for any coefficients.

pub mod ds;
pub mod il;
pub mod pattern;

pub use ds::{build_ds_discrete, DsDesignSpace};
pub use il::{build_il_discrete, il_continuous_solve, IlDesignSpace, IlSelection};
pub use pattern::{run_blackbox, BlackBoxObjective, Evaluation, SearchOptions, SearchResult, SearchStatus};

pub const IL_SYNTHETIC_JSON: &str = include_str!("../../data/il_synthetic.json");
pub const DS_SYNTHETIC_JSON: &str = include_str!("../../data/ds_synthetic.json");

pub fn bundled_il() -> IlDesignSpace {
    IlDesignSpace::from_json(IL_SYNTHETIC_JSON).expect("bundled IL data is valid")
}

pub fn bundled_ds() -> DsDesignSpace {
    DsDesignSpace::from_json(DS_SYNTHETIC_JSON).expect("bundled DS data is valid")
}
