//! Fault-injection campaigns over Hamming-coded memory layouts, and a Poisson
//! reliability model fed by their correction rates.

pub mod campaign;
pub mod codes;
pub mod error;
pub mod faults;
pub mod layout;
pub mod reliability;
pub mod report;

pub use campaign::{
    aggregate_means, classify_placement, run_campaign, run_physical, CampaignOptions, CampaignResult, CountingMode,
    FlipClass, MeanResult, MultiFlipPolicy, PhysicalResult, Rates, Tally,
};
pub use codes::{decode, decode_with, encode, encode_with, make_code, BitWord, CodeSpec, DecodeMode, DecodeOutcome};
pub use error::{Error, Result};
pub use faults::{place, Cell, ErrorPattern, Group, Offset, PatternCatalog, Placement};
pub use layout::{builtin_layout, builtin_layouts, LineLayout, MemoryGeometry};
pub use reliability::{
    calibrate_lambda, f_c, fc_table_from_campaign, p_if, p_mf, redundancy_rate, reliability, RedundancyProfile,
    ReliabilityInput,
};
pub use report::Report;
