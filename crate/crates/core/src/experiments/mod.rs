//! Data generation, ingestion and scenario orchestration for the
//! compressive-video and vote-network experiments.

pub mod config;
pub mod output;
pub mod scenario;
pub mod setup;
pub mod video;
pub mod votes;

pub use config::ConfigMap;
pub use output::{moving_average, read_loss_trace, write_bundle, LossTrace};
pub use scenario::{run_scenario, LearnerSettings, LemmaSummary, LossStream, ResultBundle, Snapshot, TruthRegret};
pub use setup::{video_setup, votes_setup, VideoSetup, VotesSetup};
pub use video::{generate_video, Leg, VideoData, VideoScenario, VideoStream};
pub use votes::{load_votes, save_votes, PlantedNetwork, SyntheticVotes, VoteLossStream, VoteStream};
