//! Experiment orchestration: campaigns, descriptive statistics, Wilcoxon
//! rank-sum comparisons and CSV export.

pub mod campaign;
pub mod wilcoxon;

pub use campaign::{
    compare_groups, export_results, load_groups, run_campaign, summarize, AlgorithmGroup,
    AlgorithmSpec, Campaign, CampaignError, ComparisonRow, ProblemSpec, Summary,
};
pub use wilcoxon::{wilcoxon_rank_sum, StatsError, Verdict};
