//! HTTP service over catsd projects: stored documents with revisions,
//! feasibility checks, background SMAA jobs, classification and what-if runs.

mod api;
mod edits;
mod state;

pub use api::{router, ApiError, ClassifyResponse};
pub use edits::{DeckEdit, Edits, ThresholdEdit};
pub use state::{AppState, Config, Job, JobStatus, Project, Snapshot};
