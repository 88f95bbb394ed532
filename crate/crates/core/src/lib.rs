//! Timed opacity analysis: region and belief constructions, the opacity
//! game with its meta-strategies, an independent region-level oracle, and
//! the Minsky machine encoding.

pub mod belief;
pub mod dot;
pub mod format;
pub mod game;
pub mod minsky;
pub mod msf;
pub mod oracle;
pub mod region;
pub mod strategy;
pub mod ta;
