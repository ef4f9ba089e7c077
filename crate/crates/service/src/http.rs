//! The HTTP surface.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use insights_core::queryfilter::{suggest, TextSlot};
use insights_core::store::{Collection, Record, Snapshot, Store, StoreError};
use insights_core::topics::{JobManager, JobRequest, TopicError, TrainConfig};
use insights_core::{Author, Publication, Venue};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::api::{run, AggregateRequest, Operation, QueryError};
use crate::auth::{Auth, AuthError, Principal};
use crate::export::{render, ExportFormat};

/// Response header telling whether an aggregation came from the cache.
pub const CACHE_HEADER: &str = "x-cache";

pub const DEFAULT_SUGGEST_LIMIT: usize = 10;
pub const MAX_SUGGEST_LIMIT: usize = 100;
pub const DEFAULT_LIST_LIMIT: usize = 100;

pub struct AppState {
    pub store: Arc<Store>,
    pub auth: Auth,
    pub jobs: JobManager,
}

impl AppState {
    pub fn new(store: Arc<Store>, auth: Auth, workers: usize) -> AppState {
        let jobs = JobManager::new(store.clone(), workers, TrainConfig::default());
        AppState { store, auth, jobs }
    }
}

pub type SharedState = Arc<AppState>;

/// JSON error body `{code, message}` with its status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError { status, code, message: message.into() }
    }

    pub fn bad_query(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_query", message)
    }

    pub fn not_found(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    fn internal(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

#[derive(Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { code: self.code.to_string(), message: self.message })).into_response()
    }
}

impl From<AuthError> for ApiError {
    fn from(e: AuthError) -> Self {
        let (status, code) = match &e {
            AuthError::UsernameTaken => (StatusCode::CONFLICT, "username_taken"),
            AuthError::WeakPassword => (StatusCode::BAD_REQUEST, "weak_password"),
            AuthError::InvalidUsername => (StatusCode::BAD_REQUEST, "invalid_username"),
            AuthError::InvalidCredentials => (StatusCode::UNAUTHORIZED, "invalid_credentials"),
            AuthError::Unauthenticated => (StatusCode::UNAUTHORIZED, "unauthenticated"),
            AuthError::Forbidden => (StatusCode::FORBIDDEN, "forbidden"),
            AuthError::Storage(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Invalid(_) | StoreError::Filter(_) => ApiError::bad_query(e.to_string()),
            StoreError::Io(_) | StoreError::Corrupt { .. } => ApiError::internal(e.to_string()),
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::Store(s) => s.into(),
            other => ApiError::bad_query(other.to_string()),
        }
    }
}

impl From<TopicError> for ApiError {
    fn from(e: TopicError) -> Self {
        match e {
            TopicError::UnknownJob(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_job", e.to_string()),
            other => ApiError::new(StatusCode::BAD_REQUEST, other.code(), other.to_string()),
        }
    }
}

impl FromRequestParts<SharedState> for Principal {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &SharedState) -> Result<Self, Self::Rejection> {
        let token = parts
            .headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .ok_or(AuthError::Unauthenticated)?;
        Ok(state.auth.authenticate(token.trim())?)
    }
}

/// A caller holding the admin role.
pub struct Admin(pub Principal);

impl FromRequestParts<SharedState> for Admin {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &SharedState) -> Result<Self, Self::Rejection> {
        let p = Principal::from_request_parts(parts, state).await?;
        p.require_admin()?;
        Ok(Admin(p))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_query(format!("invalid JSON body: {e}")))
}

fn query_map(q: Result<Query<HashMap<String, String>>, QueryRejection>) -> Result<HashMap<String, String>, ApiError> {
    q.map(|Query(m)| m).map_err(|e| ApiError::bad_query(e.body_text()))
}

/// Runs CPU-bound or disk-bound work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(e.to_string()))?
}

#[derive(Deserialize)]
struct Credentials {
    username: String,
    password: String,
}

async fn register(State(state): State<SharedState>, body: Bytes) -> Result<Response, ApiError> {
    let c: Credentials = parse_json(&body)?;
    let account = blocking(move || Ok(state.auth.register(&c.username, &c.password)?)).await?;
    Ok((StatusCode::CREATED, Json(json!({"username": account.username, "role": account.role})))
        .into_response())
}

async fn login(State(state): State<SharedState>, body: Bytes) -> Result<Response, ApiError> {
    let c: Credentials = parse_json(&body)?;
    let token = blocking(move || Ok(state.auth.login(&c.username, &c.password)?)).await?;
    Ok(Json(token).into_response())
}

async fn suggest_values(
    State(state): State<SharedState>,
    _who: Principal,
    Path(field): Path<String>,
    q: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Result<Response, ApiError> {
    let q = query_map(q)?;
    let slot: TextSlot = field.parse().map_err(|e: insights_core::corpus::UnknownValue| ApiError::not_found(e.to_string()))?;
    let limit = match q.get("limit") {
        Some(l) => l.parse::<usize>().map_err(|_| ApiError::bad_query("limit must be a non-negative integer"))?,
        None => DEFAULT_SUGGEST_LIMIT,
    }
    .min(MAX_SUGGEST_LIMIT);
    let pattern = q.get("pattern").map(String::as_str).unwrap_or("");
    let snap = state.store.snapshot();
    let values = suggest(slot, pattern, limit, snap.value_counts(slot)).map_err(|e| ApiError::bad_query(e.to_string()))?;
    Ok(Json(values).into_response())
}

/// Serves an aggregation from the cache or computes and caches it. Returns
/// the body and whether it was a hit.
pub fn cached_aggregate(store: &Store, op: Operation, req: &AggregateRequest) -> Result<(Vec<u8>, bool), QueryError> {
    let key = req.cache_key(op);
    let snap = store.snapshot();
    if let Some(bytes) = store.cache_get(&key) {
        return Ok((bytes.to_vec(), true));
    }
    let body = run(&snap, op, req)?.to_json();
    store.cache_put(snap.generation(), key, body.clone());
    Ok((body, false))
}

async fn aggregate(
    State(state): State<SharedState>,
    _who: Principal,
    Path(operation): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let op: Operation = operation.parse()?;
    let req = AggregateRequest::parse(&body)?;
    let (bytes, hit) = blocking(move || Ok(cached_aggregate(&state.store, op, &req)?)).await?;
    Ok((
        [
            (header::CONTENT_TYPE, HeaderValue::from_static("application/json")),
            (header::HeaderName::from_static(CACHE_HEADER), HeaderValue::from_static(if hit { "hit" } else { "miss" })),
        ],
        bytes,
    )
        .into_response())
}

async fn export(
    State(state): State<SharedState>,
    _who: Principal,
    q: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Result<Response, ApiError> {
    let q = query_map(q)?;
    let op: Operation =
        q.get("operation").ok_or_else(|| ApiError::bad_query("missing operation parameter"))?.parse()?;
    let format: ExportFormat = q.get("format").map(|f| f.parse()).transpose()?.unwrap_or_default();
    let req = AggregateRequest::parse(q.get("query").map(String::as_bytes).unwrap_or_default())?;
    let bytes = blocking(move || Ok(render(&run(&state.store.snapshot(), op, &req)?, format))).await?;
    let disposition = format!("attachment; filename=\"{op}.{}\"", format.extension());
    Ok((
        [
            (header::CONTENT_TYPE, HeaderValue::from_static(format.content_type())),
            (header::CONTENT_DISPOSITION, HeaderValue::from_str(&disposition).expect("ascii header")),
        ],
        bytes,
    )
        .into_response())
}

async fn submit_job(State(state): State<SharedState>, _who: Principal, body: Bytes) -> Result<Response, ApiError> {
    let req: JobRequest = if body.iter().all(u8::is_ascii_whitespace) { JobRequest::default() } else { parse_json(&body)? };
    req.filter.validate().map_err(|e| ApiError::bad_query(e.to_string()))?;
    let id = state.jobs.submit(req)?;
    let job = state.jobs.poll(&id)?;
    let location = HeaderValue::from_str(&format!("/topics/jobs/{id}")).expect("ascii job id");
    Ok((StatusCode::ACCEPTED, [(header::LOCATION, location)], Json(json!({"id": job.id, "status": job.status})))
        .into_response())
}

async fn get_job(State(state): State<SharedState>, _who: Principal, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(state.jobs.poll(&id)?).into_response())
}

fn collection(name: &str) -> Result<Collection, ApiError> {
    Collection::parse(name).ok_or_else(|| ApiError::not_found(format!("unknown collection {name:?}")))
}

fn parse_record(c: Collection, body: &[u8]) -> Result<Record, ApiError> {
    Ok(match c {
        Collection::Publications => Record::Publication(parse_json::<Publication>(body)?),
        Collection::Authors => Record::Author(parse_json::<Author>(body)?),
        Collection::Venues => Record::Venue(parse_json::<Venue>(body)?),
    })
}

fn record_id(r: &Record) -> &str {
    match r {
        Record::Publication(p) => &p.id,
        Record::Author(a) => &a.id,
        Record::Venue(v) => &v.id,
    }
}

/// Abstracts are only ever returned to admins.
pub fn publication_json(p: &Publication, admin: bool) -> Value {
    let mut v = serde_json::to_value(p).expect("publication serializes");
    if !admin {
        if let Value::Object(m) = &mut v {
            m.remove("abstractText");
        }
    }
    v
}

fn record_json(r: &Record, admin: bool) -> Value {
    match r {
        Record::Publication(p) => publication_json(p, admin),
        Record::Author(a) => serde_json::to_value(a).expect("author serializes"),
        Record::Venue(v) => serde_json::to_value(v).expect("venue serializes"),
    }
}

fn lookup(snap: &Snapshot, c: Collection, id: &str, admin: bool) -> Option<Value> {
    match c {
        Collection::Publications => snap.publication(id).map(|p| publication_json(p, admin)),
        Collection::Authors => snap.author(id).map(|a| serde_json::to_value(a).expect("author serializes")),
        Collection::Venues => snap.venue(id).map(|v| serde_json::to_value(v).expect("venue serializes")),
    }
}

fn exists(snap: &Snapshot, c: Collection, id: &str) -> bool {
    match c {
        Collection::Publications => snap.publication(id).is_some(),
        Collection::Authors => snap.author(id).is_some(),
        Collection::Venues => snap.venue(id).is_some(),
    }
}

async fn create_record(
    State(state): State<SharedState>,
    _admin: Admin,
    Path(name): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let c = collection(&name)?;
    let record = parse_record(c, &body)?;
    let out = record_json(&record, true);
    blocking(move || {
        state.store.write(|b| {
            if exists(b.view(), c, record_id(&record)) {
                return Err(ApiError::new(StatusCode::CONFLICT, "already_exists", format!("{} exists", record_id(&record))));
            }
            b.upsert(record)?;
            Ok(())
        })
    })
    .await?;
    Ok((StatusCode::CREATED, Json(out)).into_response())
}

async fn list_records(
    State(state): State<SharedState>,
    who: Principal,
    Path(name): Path<String>,
    q: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> Result<Response, ApiError> {
    let c = collection(&name)?;
    let q = query_map(q)?;
    let number = |key: &str, default: usize| -> Result<usize, ApiError> {
        q.get(key).map_or(Ok(default), |v| v.parse().map_err(|_| ApiError::bad_query(format!("{key} must be an integer"))))
    };
    let (offset, limit) = (number("offset", 0)?, number("limit", DEFAULT_LIST_LIMIT)?);
    let snap = state.store.snapshot();
    let admin = who.is_admin();
    let items: Vec<Value> = match c {
        Collection::Publications => {
            snap.publications().skip(offset).take(limit).map(|p| publication_json(p, admin)).collect()
        }
        Collection::Authors => snap.authors().skip(offset).take(limit).map(|a| json!(a)).collect(),
        Collection::Venues => snap.venues().skip(offset).take(limit).map(|v| json!(v)).collect(),
    };
    Ok(Json(items).into_response())
}

async fn read_record(
    State(state): State<SharedState>,
    who: Principal,
    Path((name, id)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let c = collection(&name)?;
    let value = lookup(&state.store.snapshot(), c, &id, who.is_admin())
        .ok_or_else(|| ApiError::not_found(format!("no {name} record {id:?}")))?;
    Ok(Json(value).into_response())
}

async fn update_record(
    State(state): State<SharedState>,
    _admin: Admin,
    Path((name, id)): Path<(String, String)>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let c = collection(&name)?;
    let record = parse_record(c, &body)?;
    if record_id(&record) != id {
        return Err(ApiError::bad_query(format!("body id {:?} does not match path id {id:?}", record_id(&record))));
    }
    let out = record_json(&record, true);
    blocking(move || {
        state.store.write(|b| {
            if !exists(b.view(), c, &id) {
                return Err(ApiError::not_found(format!("no {name} record {id:?}")));
            }
            b.upsert(record)?;
            Ok(())
        })
    })
    .await?;
    Ok(Json(out).into_response())
}

async fn delete_record(
    State(state): State<SharedState>,
    _admin: Admin,
    Path((name, id)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let c = collection(&name)?;
    let existed = blocking(move || {
        // Skips the write, and the cache flush, when there is nothing to delete.
        if !exists(&state.store.snapshot(), c, &id) {
            return Ok(false);
        }
        Ok(state.store.delete(c, &id)?)
    })
    .await?;
    if existed {
        Ok(StatusCode::NO_CONTENT.into_response())
    } else {
        Err(ApiError::not_found("no such record"))
    }
}

async fn fallback() -> ApiError {
    ApiError::not_found("no such route")
}

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/auth/register", post(register))
        .route("/auth/login", post(login))
        .route("/suggest/{field}", get(suggest_values))
        .route("/aggregate/{operation}", post(aggregate))
        .route("/topics/jobs", post(submit_job))
        .route("/topics/jobs/{id}", get(get_job))
        .route("/admin/{collection}", post(create_record).get(list_records))
        .route("/admin/{collection}/{id}", get(read_record).put(update_record).delete(delete_record))
        .route("/export", get(export))
        .fallback(fallback)
        .with_state(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    Public,
    /// Any valid token.
    User,
    Admin,
}

#[derive(Debug, Clone)]
pub struct RouteInfo {
    pub method: Method,
    pub template: &'static str,
    /// A concrete path for the template.
    pub example: String,
    pub access: Access,
}

/// Every route the router serves, with its access class.
pub fn route_table() -> Vec<RouteInfo> {
    let r = |method: Method, template, example: &str, access| RouteInfo { method, template, example: example.to_string(), access };
    let mut routes = vec![
        r(Method::POST, "/auth/register", "/auth/register", Access::Public),
        r(Method::POST, "/auth/login", "/auth/login", Access::Public),
        r(Method::GET, "/suggest/{field}", "/suggest/authors", Access::User),
        r(Method::POST, "/topics/jobs", "/topics/jobs", Access::User),
        r(Method::GET, "/topics/jobs/{id}", "/topics/jobs/job-1", Access::User),
        r(Method::GET, "/export", "/export?operation=bins&format=csv", Access::User),
    ];
    for op in Operation::ALL {
        routes.push(r(Method::POST, "/aggregate/{operation}", &format!("/aggregate/{op}"), Access::User));
    }
    for c in ["publications", "authors", "venues"] {
        let (list, one) = (format!("/admin/{c}"), format!("/admin/{c}/x"));
        routes.push(r(Method::POST, "/admin/{collection}", &list, Access::Admin));
        routes.push(r(Method::GET, "/admin/{collection}", &list, Access::User));
        routes.push(r(Method::GET, "/admin/{collection}/{id}", &one, Access::User));
        routes.push(r(Method::PUT, "/admin/{collection}/{id}", &one, Access::Admin));
        routes.push(r(Method::DELETE, "/admin/{collection}/{id}", &one, Access::Admin));
    }
    routes
}

/// Serves until ctrl-c.
pub async fn serve(state: SharedState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
