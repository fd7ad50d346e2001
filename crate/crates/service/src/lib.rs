// SPDX-License-Identifier: Apache-2.0

//! HTTP front end: datasets and live inference sessions over JSON.
//!
//! ```text
//! POST /datasets                       -> {dataset_id, d, point_count}
//! POST /sessions {dataset_id, config}  -> SessionHandle
//! POST /sessions/{id}/events           -> {event_count}
//! GET  /sessions/{id}/posterior | bias | predictions?k=&exclude_visited= | summary
//! ```

mod error;
mod routes;
mod state;

use std::sync::Arc;

pub use error::{ApiError, ErrorBody};
pub use routes::{router, BiasDoc, DatasetCreated, DatasetView, EventAck, PosteriorDoc};
pub use state::{AppState, RestoreError, ServiceConfig, SessionHandle, Spool};

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
