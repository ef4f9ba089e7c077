//! Drives the HTTP API in-process: register, log in, aggregate twice (the
//! second call is a cache hit), write as admin and re-query.
//!
//!     cargo run -p insights-service --example api_walkthrough

use std::sync::Arc;

use anyhow::Result;
use axum::body::Body;
use axum::http::{Method, Request};
use axum::Router;
use http_body_util::BodyExt;
use insights_core::store::StoreError;
use insights_core::{synth, Store};
use insights_service::auth::SystemClock;
use insights_service::{router, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: Method, path: &str, token: Option<&str>, body: Value) -> Result<(u16, String, Value)> {
    let mut req = Request::builder().method(method).uri(path).header("content-type", "application/json");
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let resp = app.clone().oneshot(req.body(Body::from(body.to_string()))?).await?;
    let status = resp.status().as_u16();
    let cache = resp.headers().get("x-cache").and_then(|v| v.to_str().ok()).unwrap_or("-").to_string();
    let bytes = resp.into_body().collect().await?.to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes)? };
    Ok((status, cache, value))
}

#[tokio::main]
async fn main() -> Result<()> {
    let store = Store::in_memory();
    store.write(|b| {
        for p in synth::corpus(500, 1) {
            b.upsert_publication(p)?;
        }
        Ok::<_, StoreError>(())
    })?;
    let config = ServiceConfig {
        admin_username: Some("admin".into()),
        admin_password: Some("change-me-please".into()),
        pbkdf2_rounds: 10_000,
        ..Default::default()
    };
    let app = router(Arc::new(config.build_with_store(Arc::new(store), Arc::new(SystemClock))?));

    let creds = json!({"username": "ana", "password": "correct horse"});
    println!("register: {:?}", call(&app, Method::POST, "/auth/register", None, creds.clone()).await?);
    let (_, _, login) = call(&app, Method::POST, "/auth/login", None, creds).await?;
    let token = login["token"].as_str().unwrap().to_string();

    let (status, _, err) = call(&app, Method::POST, "/aggregate/top_k", None, json!({})).await?;
    println!("without a token: {status} {err}");

    let query = json!({"dimension": "venue", "metric": "citations", "k": 3, "filter": {"year_range": {"min": 2000, "max": 2022}}});
    for _ in 0..2 {
        let (status, cache, body) = call(&app, Method::POST, "/aggregate/top_k", Some(&token), query.clone()).await?;
        println!("top_k: {status} cache={cache} {body}");
    }

    let (status, _, err) = call(&app, Method::DELETE, "/admin/publications/p000000", Some(&token), Value::Null).await?;
    println!("user delete: {status} {err}");
    let (_, _, admin) = call(&app, Method::POST, "/auth/login", None, json!({"username": "admin", "password": "change-me-please"})).await?;
    let admin = admin["token"].as_str().unwrap().to_string();
    let (status, _, _) = call(&app, Method::DELETE, "/admin/publications/p000000", Some(&admin), Value::Null).await?;
    println!("admin delete: {status}");
    let (_, cache, body) = call(&app, Method::POST, "/aggregate/top_k", Some(&token), query).await?;
    println!("after the write: cache={cache} {body}");

    let (_, _, hints) = call(&app, Method::GET, "/suggest/venues?pattern=^c&limit=5", Some(&token), Value::Null).await?;
    println!("venue suggestions: {hints}");
    let (status, _, job) = call(&app, Method::POST, "/topics/jobs", Some(&token), json!({"k": 4})).await?;
    println!("topic job: {status} {job}");
    Ok(())
}
