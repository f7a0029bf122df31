//! Routes and handlers.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Request, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use catsd::document::{requirements_from_doc, deck_from_doc, DeckDoc, ProblemDocument, RequirementsDoc, SmaaSettings};
use catsd::engine::{self, FeasibilityReport};
use catsd::export::{round3, ClassificationDocument, DistributionDocument};
use catsd::srf::{interaction_label, srf_deterministic};
use catsd::Error;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::edits::Edits;
use crate::state::{self, settings_key, AppState, JobStatus, Project, Snapshot};

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/projects", get(list_projects).post(create_project))
        .route("/projects/{id}", get(get_project).put(put_project).patch(patch_project).delete(delete_project))
        .route("/projects/{id}/feasibility", get(get_feasibility))
        .route("/projects/{id}/smaa", post(start_smaa))
        .route("/projects/{id}/jobs/{job}", get(get_job))
        .route("/projects/{id}/classify", post(classify))
        .route("/projects/{id}/whatif", post(whatif))
        .route("/projects/{id}/srf/deterministic", post(deterministic_srf))
        .layer(middleware::from_fn_with_state(state.clone(), auth))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({ "error": message.into() }) }
    }

    fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.body[key] = serde_json::to_value(value).unwrap_or(Value::Null);
        self
    }

    fn not_found(what: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("{what} not found"))
    }

    /// The document or request content is well-formed but unusable.
    fn invalid(e: Error) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "validation failed").with("diagnostics", [e.to_string()])
    }

    fn infeasible(report: &FeasibilityReport) -> Self {
        let bad: Vec<&str> = report.categories.iter().filter(|c| !c.feasible).map(|c| c.category.as_str()).collect();
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, format!("no compatible parameters for {}", bad.join(", ")))
            .with("feasibility", report)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Internal(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
            other => Self::invalid(other),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn auth(State(state): State<AppState>, req: Request, next: Next) -> Response {
    if let Some(token) = &state.config().token {
        let ok = req
            .headers()
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .is_some_and(|t| t == token);
        if !ok {
            return ApiError::new(StatusCode::UNAUTHORIZED, "missing or wrong bearer token").into_response();
        }
    }
    next.run(req).await
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    let body: &[u8] = if body.is_empty() { b"{}" } else { body };
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("request body: {e}")))
}

fn parse_document(body: &Bytes) -> ApiResult<(ProblemDocument, catsd::document::Model)> {
    let text = std::str::from_utf8(body).map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "body is not UTF-8"))?;
    let doc = ProblemDocument::from_json(text).map_err(ApiError::invalid)?;
    let model = doc.compile().map_err(ApiError::invalid)?;
    Ok((doc, model))
}

fn project(state: &AppState, id: &str) -> ApiResult<Arc<Project>> {
    state.project(id).ok_or_else(|| ApiError::not_found("project"))
}

fn check_revision(headers: &HeaderMap, current: u64) -> ApiResult<()> {
    let Some(v) = headers.get(header::IF_MATCH) else { return Ok(()) };
    let want = v.to_str().ok().map(|s| s.trim().trim_matches('"')).and_then(|s| s.parse::<u64>().ok());
    match want {
        Some(w) if w == current => Ok(()),
        Some(_) => Err(ApiError::new(StatusCode::CONFLICT, "revision mismatch").with("revision", current)),
        None => Err(ApiError::new(StatusCode::BAD_REQUEST, "If-Match must be a revision number")),
    }
}

#[derive(Serialize)]
struct ProjectSummary {
    id: String,
    name: Option<String>,
    revision: u64,
}

#[derive(Serialize)]
struct Revised {
    id: String,
    revision: u64,
    feasibility: Arc<FeasibilityReport>,
}

async fn list_projects(State(state): State<AppState>) -> Json<Vec<ProjectSummary>> {
    Json(
        state
            .projects()
            .iter()
            .map(|p| {
                let s = p.snapshot();
                ProjectSummary { id: p.id.clone(), name: s.document.name.clone(), revision: s.revision }
            })
            .collect(),
    )
}

async fn create_project(State(state): State<AppState>, body: Bytes) -> ApiResult<(StatusCode, Json<Revised>)> {
    let (doc, model) = parse_document(&body)?;
    let p = state.create(doc, model)?;
    let snap = p.snapshot();
    let feasibility = state::feasibility(&p, &snap).await;
    Ok((StatusCode::CREATED, Json(Revised { id: p.id.clone(), revision: snap.revision, feasibility })))
}

async fn get_project(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let p = project(&state, &id)?;
    let s = p.snapshot();
    Ok(Json(json!({ "id": p.id, "revision": s.revision, "document": &*s.document })))
}

async fn replace(p: &Project, headers: &HeaderMap, doc: ProblemDocument, model: catsd::document::Model) -> ApiResult<Json<Revised>> {
    let _guard = p.try_lock().ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "project is being modified"))?;
    check_revision(headers, p.snapshot().revision)?;
    let snap = p.replace(doc, model)?;
    let feasibility = state::feasibility(p, &snap).await;
    Ok(Json(Revised { id: p.id.clone(), revision: snap.revision, feasibility }))
}

async fn put_project(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<Revised>> {
    let p = project(&state, &id)?;
    let (doc, model) = parse_document(&body)?;
    replace(&p, &headers, doc, model).await
}

async fn patch_project(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<Revised>> {
    let p = project(&state, &id)?;
    let edits: Edits = parse_body(&body)?;
    let doc = edits.apply(&p.snapshot().document).map_err(ApiError::invalid)?;
    let model = doc.compile().map_err(ApiError::invalid)?;
    replace(&p, &headers, doc, model).await
}

async fn delete_project(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    let p = project(&state, &id)?;
    let _guard = p.try_lock().ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "project is being modified"))?;
    state.delete(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn get_feasibility(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let p = project(&state, &id)?;
    let snap = p.snapshot();
    let r = state::feasibility(&p, &snap).await;
    Ok(Json(json!({
        "revision": snap.revision,
        "all_feasible": r.all_feasible(),
        "categories": &r.categories,
    })))
}

/// Overrides of the stored SMAA settings.
#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct SettingsOverride {
    samples: Option<usize>,
    seed: Option<u64>,
    burn_in: Option<usize>,
    thinning: Option<usize>,
}

impl SettingsOverride {
    fn apply(&self, base: SmaaSettings) -> ApiResult<SmaaSettings> {
        let s = SmaaSettings {
            samples: self.samples.unwrap_or(base.samples),
            seed: self.seed.unwrap_or(base.seed),
            burn_in: self.burn_in.unwrap_or(base.burn_in),
            thinning: self.thinning.unwrap_or(base.thinning),
        };
        if s.samples == 0 {
            return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "samples must be positive"));
        }
        Ok(s)
    }
}

async fn require_feasible(p: &Project, snap: &Snapshot) -> ApiResult<()> {
    let r = state::feasibility(p, snap).await;
    if r.all_feasible() {
        Ok(())
    } else {
        Err(ApiError::infeasible(&r))
    }
}

fn job_json(job: &state::Job) -> Value {
    let st = job.state.lock().unwrap();
    let mut v = json!({
        "id": job.id,
        "project": job.project,
        "revision": job.revision,
        "settings": job.settings,
        "status": st.0,
    });
    if let Some(e) = &st.1 {
        v["error"] = json!(e);
    }
    if let Some(r) = &st.2 {
        v["result"] = serde_json::to_value(&**r).unwrap_or(Value::Null);
    }
    v
}

async fn start_smaa(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let p = project(&state, &id)?;
    let req: SettingsOverride = parse_body(&body)?;
    let snap = p.snapshot();
    let settings = req.apply(snap.model.smaa)?;
    require_feasible(&p, &snap).await?;
    let job = state.new_job(&p.id, snap.revision, settings);
    let (st, j) = (state.clone(), job.clone());
    tokio::spawn(async move {
        j.state.lock().unwrap().0 = JobStatus::Running;
        let out = state::distribution(&st, &p, &snap, settings, true).await;
        let mut s = j.state.lock().unwrap();
        match out {
            Ok(d) => {
                s.0 = JobStatus::Done;
                s.2 = Some(Arc::new(DistributionDocument::new(&d, Some(&snap.model.problem.hierarchy))));
            }
            Err(e) => {
                s.0 = JobStatus::Failed;
                s.1 = Some(e.to_string());
            }
        }
    });
    Ok((StatusCode::ACCEPTED, Json(job_json(&job))))
}

async fn get_job(State(state): State<AppState>, Path((id, job)): Path<(String, String)>) -> ApiResult<Json<Value>> {
    project(&state, &id)?;
    match state.job(&job) {
        Some(j) if j.project == id => Ok(Json(job_json(&j))),
        _ => Err(ApiError::not_found("job")),
    }
}

#[derive(Debug, Deserialize)]
struct ClassifyRequest {
    #[serde(default = "root_node")]
    node: String,
    #[serde(default)]
    requirements: Option<RequirementsDoc>,
    #[serde(flatten)]
    settings: SettingsOverride,
}

fn root_node() -> String {
    "g0".into()
}

#[derive(Debug, Serialize)]
pub struct ClassifyResponse {
    revision: u64,
    settings: SmaaSettings,
    #[serde(flatten)]
    classification: ClassificationDocument,
}

async fn classify(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Arc<ClassifyResponse>>> {
    let p = project(&state, &id)?;
    let req: ClassifyRequest = parse_body(&body)?;
    let snap = p.snapshot();
    let settings = req.settings.apply(snap.model.smaa)?;
    let model = &snap.model;
    let h = &model.problem.hierarchy;
    let node = h.resolve(&req.node).map_err(ApiError::invalid)?;
    let requirements = match &req.requirements {
        Some(r) => requirements_from_doc(r, &model.problem.categories.iter().map(|c| c.name.clone()).collect::<Vec<_>>()).map_err(ApiError::invalid)?,
        None => model.requirements_at(&node).clone(),
    };
    let key = (settings_key(&settings), format!("{node}|{requirements:?}"));
    if let Some(r) = p.cached_classification(snap.revision, &key) {
        return Ok(Json(r));
    }
    require_feasible(&p, &snap).await?;
    let dist = state::distribution(&state, &p, &snap, settings, true).await?;
    let c = engine::classify(&dist, &node, h.name(&node), &requirements)?;
    let r = Arc::new(ClassifyResponse {
        revision: snap.revision,
        settings,
        classification: ClassificationDocument::new(&c, &dist),
    });
    p.store_classification(snap.revision, key, r.clone());
    Ok(Json(r))
}

#[derive(Debug, Deserialize)]
struct WhatIfRequest {
    edits: Edits,
    #[serde(flatten)]
    settings: SettingsOverride,
}

#[derive(Serialize)]
struct ActionDelta {
    action: String,
    /// Variant minus baseline, per marginal column.
    marginals: Vec<f64>,
}

#[derive(Serialize)]
struct NodeDelta {
    node: String,
    name: String,
    actions: Vec<ActionDelta>,
}

fn deltas(base: &DistributionDocument, variant: &DistributionDocument) -> Vec<NodeDelta> {
    base.nodes
        .iter()
        .zip(&variant.nodes)
        .map(|(b, v)| NodeDelta {
            node: b.node.to_string(),
            name: b.name.clone(),
            actions: b
                .actions
                .iter()
                .zip(&v.actions)
                .map(|(x, y)| ActionDelta {
                    action: x.action.clone(),
                    marginals: x.marginals.iter().zip(&y.marginals).map(|(p, q)| round3(q - p)).collect(),
                })
                .collect(),
        })
        .collect()
}

async fn whatif(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let p = project(&state, &id)?;
    let req: WhatIfRequest = parse_body(&body)?;
    let snap = p.snapshot();
    let mut base = snap.model.smaa;
    base.samples = state.config().whatif_samples;
    let settings = req.settings.apply(base)?;

    let doc = req.edits.apply(&snap.document).map_err(ApiError::invalid)?;
    let model = Arc::new(doc.compile().map_err(ApiError::invalid)?);
    require_feasible(&p, &snap).await?;
    let m = model.clone();
    let report = tokio::task::spawn_blocking(move || engine::feasibility(&m)).await.expect("feasibility task panicked");
    if !report.all_feasible() {
        return Err(ApiError::infeasible(&report));
    }

    let baseline = state::distribution(&state, &p, &snap, settings, false).await?;
    let variant = state::compute(&state, model.clone(), settings).await?;
    let h = &snap.model.problem.hierarchy;
    let baseline = DistributionDocument::new(&baseline, Some(h));
    let variant = DistributionDocument::new(&variant, Some(&model.problem.hierarchy));
    Ok(Json(json!({
        "revision": snap.revision,
        "settings": settings,
        "columns": &baseline.columns,
        "delta": deltas(&baseline, &variant),
        "baseline": baseline,
        "variant": variant,
    })))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeterministicRequest {
    category: String,
    node: String,
    #[serde(default)]
    deck: Option<DeckDoc>,
}

async fn deterministic_srf(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let p = project(&state, &id)?;
    let req: DeterministicRequest = parse_body(&body)?;
    let snap = p.snapshot();
    let problem = &snap.model.problem;
    let h = &problem.hierarchy;
    problem.category_index(&req.category).map_err(ApiError::invalid)?;
    let node = h.resolve(&req.node).map_err(ApiError::invalid)?;
    let deck = match req.deck {
        Some(d) => d,
        None => snap
            .document
            .srf
            .get(&req.category)
            .and_then(|m| m.get(&req.node).or_else(|| m.get(h.name(&node))))
            .cloned()
            .ok_or_else(|| ApiError::not_found("deck"))?,
    };
    let deck = deck_from_doc(h, node.clone(), &deck).map_err(ApiError::invalid)?;
    let r = srf_deterministic(problem, &deck).map_err(ApiError::invalid)?;
    Ok(Json(json!({
        "revision": snap.revision,
        "category": req.category,
        "node": node.to_string(),
        "name": h.name(&node),
        "unit": r.unit,
        "cards": r.card_values.iter().map(|(c, v)| json!({ "card": c, "value": v })).collect::<Vec<_>>(),
        "weights": r.weights.iter().map(|(n, v)| json!({ "criterion": h.name(n), "value": v })).collect::<Vec<_>>(),
        "coefficients": r.coefficients.iter()
            .map(|(i, v)| json!({ "interaction": interaction_label(h, &problem.interactions[*i]), "value": v }))
            .collect::<Vec<_>>(),
    })))
}
