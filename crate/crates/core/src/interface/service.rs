//! JSON/HTTP facade over the engine.
//!
//! | method | path              | body                |
//! |--------|-------------------|---------------------|
//! | GET    | `/health`         |                     |
//! | GET    | `/api/vocabulary` |                     |
//! | GET    | `/api/baseline`   | `?baseline_id=`     |
//! | POST   | `/api/check`      | [`CheckRequest`]    |
//! | POST   | `/api/simulate`   | [`SimulateRequest`] |
//!
//! Anything else is served from the static directory when one is configured.
//! The access log records method, path, status and duration only: never
//! bodies, query strings, or client addresses.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use axum::body::{Body, Bytes};
use axum::extract::{Query, Request, State};
use axum::http::StatusCode;
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::dsl::{compile, format_program, parse_source, Diagnostic};
use crate::engine::{
    headlines, run_scenario, EngineConfig, EngineError, Headlines, ScenarioDocument, ScriptSource, YearDiagnostics,
};
use crate::projection::{ProjectionSeries, Vocabulary, Year, YearRange};
use crate::ENGINE_VERSION;

/// Upper bound on a single script's size in any request.
pub const MAX_SCRIPT_BYTES: usize = 64 * 1024;

pub const DEFAULT_BASELINE_ID: &str = "default";

/// Immutable after startup; shared by every request.
#[derive(Debug)]
pub struct ServiceState {
    vocabulary: Arc<Vocabulary>,
    baselines: HashMap<String, ProjectionSeries>,
    default_baseline: String,
    config: EngineConfig,
}

impl ServiceState {
    pub fn new(baseline_id: &str, baseline: ProjectionSeries) -> Self {
        let vocabulary = baseline.vocabulary().clone();
        let mut baselines = HashMap::new();
        baselines.insert(baseline_id.to_string(), baseline);
        ServiceState { vocabulary, baselines, default_baseline: baseline_id.to_string(), config: EngineConfig::default() }
    }

    pub fn with_config(mut self, config: EngineConfig) -> Self {
        self.config = config;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub year: Year,
    pub region: String,
    pub variable: String,
    pub value: f64,
}

pub fn cells_of(series: &ProjectionSeries) -> Vec<Cell> {
    series
        .cells()
        .map(|(region, year, variable, value)| Cell {
            year,
            region: region.to_string(),
            variable: variable.to_string(),
            value,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRequest {
    pub script: String,
    /// Declared lever inputs; when present, `in.*` reads are validated against it.
    #[serde(default)]
    pub inputs: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResponse {
    pub clean: bool,
    pub diagnostics: Vec<Diagnostic>,
    /// Canonical form of the script when it parses.
    pub formatted: Option<String>,
}

fn default_baseline_id() -> String {
    DEFAULT_BASELINE_ID.to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateRequest {
    pub scenario: ScenarioDocument,
    #[serde(default = "default_baseline_id")]
    pub baseline_id: String,
    #[serde(default)]
    pub include_diagnostics: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateResponse {
    pub engine_version: String,
    pub baseline_id: String,
    pub run_years: YearRange,
    pub cells: Vec<Cell>,
    pub headlines: Headlines,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Vec<YearDiagnostics>>,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lever: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    year: Option<Year>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<u32>,
}

pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: &'static str, message: String) -> Self {
        ApiError {
            status,
            body: ErrorBody { error, message, diagnostics: Vec::new(), lever: None, year: None, line: None, column: None },
        }
    }

    fn validation(message: String) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "validation", message)
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let message = e.to_string();
        match e {
            EngineError::Script { lever, diagnostics } => {
                let mut err = ApiError::validation(message);
                err.body.line = diagnostics.first().map(|d| d.span.line);
                err.body.column = diagnostics.first().map(|d| d.span.column);
                err.body.lever = Some(lever);
                err.body.diagnostics = diagnostics;
                err
            }
            EngineError::ScriptRuntime { lever, year, error } => {
                let mut err = ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "script_runtime", message);
                err.body.lever = Some(lever);
                err.body.year = Some(year);
                err.body.line = Some(error.error.span.line);
                err.body.column = Some(error.error.span.column);
                err
            }
            EngineError::ConservationViolated { .. } => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
            }
            EngineError::InvalidScenario(_) | EngineError::YearRange { .. } | EngineError::Data(_) => {
                ApiError::validation(message)
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::validation(format!("malformed request body: {e}")))
}

async fn health() -> impl IntoResponse {
    Json(serde_json::json!({ "status": "ok", "engine_version": ENGINE_VERSION }))
}

async fn vocabulary(State(state): State<Arc<ServiceState>>) -> Response {
    (
        [(axum::http::header::CONTENT_TYPE, "application/json")],
        state.vocabulary.to_json(),
    )
        .into_response()
}

#[derive(Deserialize)]
struct BaselineQuery {
    baseline_id: Option<String>,
}

fn lookup<'s>(state: &'s ServiceState, id: &str) -> Result<&'s ProjectionSeries, ApiError> {
    state
        .baselines
        .get(id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_baseline", format!("no baseline `{id}`")))
}

async fn baseline(State(state): State<Arc<ServiceState>>, Query(q): Query<BaselineQuery>) -> Result<Response, ApiError> {
    let id = q.baseline_id.unwrap_or_else(|| state.default_baseline.clone());
    let series = lookup(&state, &id)?;
    Ok(Json(serde_json::json!({
        "baseline_id": id,
        "years": series.years(),
        "cells": cells_of(series),
    }))
    .into_response())
}

async fn check_script(State(state): State<Arc<ServiceState>>, body: Bytes) -> Result<Json<CheckResponse>, ApiError> {
    let req: CheckRequest = parse_body(&body)?;
    if req.script.len() > MAX_SCRIPT_BYTES {
        return Err(ApiError::validation(format!("script exceeds {MAX_SCRIPT_BYTES} bytes")));
    }
    let inputs: Option<BTreeSet<String>> = req.inputs.map(|v| v.into_iter().collect());
    let formatted = parse_source(&req.script, "script").ok().map(|p| format_program(&p));
    let diagnostics = match compile(&req.script, "script", &state.vocabulary, inputs.as_ref()) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    };
    Ok(Json(CheckResponse { clean: diagnostics.is_empty(), diagnostics, formatted }))
}

/// Runs a simulate request to completion. Shared by the HTTP handler and tests.
pub fn simulate(state: &ServiceState, req: SimulateRequest) -> Result<SimulateResponse, ApiError> {
    for lever in &req.scenario.levers {
        match &lever.script {
            ScriptSource::Inline(s) if s.len() > MAX_SCRIPT_BYTES => {
                return Err(ApiError::validation(format!(
                    "lever `{}`: script exceeds {MAX_SCRIPT_BYTES} bytes",
                    lever.id
                )))
            }
            ScriptSource::Path(_) => {
                return Err(ApiError::validation(format!(
                    "lever `{}`: the service only accepts inline_script",
                    lever.id
                )))
            }
            ScriptSource::Inline(_) => {}
        }
    }
    let base = lookup(state, &req.baseline_id)?;
    let scenario = req.scenario.compile(&state.vocabulary)?;
    let result = run_scenario(base, &scenario, &state.config)?;
    Ok(SimulateResponse {
        engine_version: ENGINE_VERSION.to_string(),
        baseline_id: req.baseline_id,
        run_years: result.run_years,
        cells: cells_of(&result.series),
        headlines: headlines(&result),
        diagnostics: req.include_diagnostics.then(|| result.diagnostics.clone()),
    })
}

async fn simulate_handler(
    State(state): State<Arc<ServiceState>>,
    body: Bytes,
) -> Result<Json<SimulateResponse>, ApiError> {
    let req: SimulateRequest = parse_body(&body)?;
    let response = tokio::task::spawn_blocking(move || simulate(&state, req))
        .await
        .map_err(|_| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", "simulation task failed".into()))??;
    Ok(Json(response))
}

async fn access_log(req: Request<Body>, next: Next) -> Response {
    let method = req.method().clone();
    let path = req.uri().path().to_string();
    let started = Instant::now();
    let response = next.run(req).await;
    log::info!(
        target: "policy_lab::access",
        "{method} {path} {} {:.1}ms",
        response.status().as_u16(),
        started.elapsed().as_secs_f64() * 1000.0
    );
    response
}

pub fn router(state: Arc<ServiceState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/health", get(health))
        .route("/api/vocabulary", get(vocabulary))
        .route("/api/baseline", get(baseline))
        .route("/api/check", post(check_script))
        .route("/api/simulate", post(simulate_handler))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(middleware::from_fn(access_log))
}

/// Serves `router` on `listener` until the process receives Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, router: Router) -> std::io::Result<()> {
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
