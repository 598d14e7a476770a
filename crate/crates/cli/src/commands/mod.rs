pub mod classify;
pub mod emergence;
pub mod simulate;
pub mod stats;
