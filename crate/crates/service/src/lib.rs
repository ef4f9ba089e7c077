//! Authenticated HTTP API over the insights engine.

pub mod api;
pub mod auth;
pub mod config;
pub mod export;
pub mod http;

pub use api::{AggregateOutput, AggregateRequest, Operation, QueryError};
pub use config::ServiceConfig;
pub use http::{route_table, router, AppState, SharedState};
