//! Detailed-balance testing, mode occupancy, error summaries and report
//! output.

mod balance;
mod cluster;
mod occupancy;
mod report;
mod summary;

pub use cluster::{two_means, ClusterSplit};
pub use balance::{detailed_balance_test, BalanceStatus, FlowEstimate};
pub use occupancy::{mode_jumps, mode_occupancy, nearest_mode, Mode};
pub use report::{ComparisonReport, MethodSummary, Statistic};
pub use summary::{cumulative_rmse, hpd_interval, median, mse_report, sign_test_p, MseReport};
