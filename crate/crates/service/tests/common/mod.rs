#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{HeaderMap, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use insights_core::store::{Store, StoreError};
use insights_core::Publication;
use insights_service::auth::{ManualClock, Role};
use insights_service::{router, ServiceConfig, SharedState};
use serde_json::Value;
use tower::ServiceExt;

pub const ADMIN: (&str, &str) = ("admin", "admin-password");
pub const USER: (&str, &str) = ("reader", "reader-password");

pub struct App {
    pub router: Router,
    pub state: SharedState,
    pub clock: Arc<ManualClock>,
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn code(&self) -> String {
        self.json()["code"].as_str().unwrap_or_default().to_string()
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.get(name).and_then(|v| v.to_str().ok())
    }
}

pub fn store_with(pubs: Vec<Publication>) -> Store {
    let store = Store::in_memory();
    store
        .write(|b| {
            for p in pubs {
                b.upsert_publication(p)?;
            }
            Ok::<_, StoreError>(())
        })
        .unwrap();
    store
}

/// An app with a seeded admin, a registered user and a manual clock.
pub fn app(store: Store) -> App {
    let clock = Arc::new(ManualClock::new(1_700_000_000));
    let config = ServiceConfig {
        pbkdf2_rounds: 16,
        token_secret: Some("test secret".into()),
        admin_username: Some(ADMIN.0.into()),
        admin_password: Some(ADMIN.1.into()),
        workers: 1,
        ..Default::default()
    };
    let state = Arc::new(config.build_with_store(Arc::new(store), clock.clone()).unwrap());
    state.auth.register(USER.0, USER.1).unwrap();
    assert_eq!(state.auth.account(ADMIN.0).unwrap().role, Role::Admin);
    App { router: router(state.clone()), state, clock }
}

impl App {
    pub async fn call(&self, method: Method, path: &str, token: Option<&str>, body: Option<&Value>) -> Reply {
        let mut req = Request::builder().method(method).uri(path);
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        let body = match body {
            Some(v) => {
                req = req.header("content-type", "application/json");
                Body::from(serde_json::to_vec(v).unwrap())
            }
            None => Body::empty(),
        };
        let resp = self.router.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let headers = resp.headers().clone();
        let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        Reply { status, headers, body }
    }

    pub async fn login(&self, who: (&str, &str)) -> String {
        let r = self
            .call(Method::POST, "/auth/login", None, Some(&serde_json::json!({"username": who.0, "password": who.1})))
            .await;
        assert_eq!(r.status, StatusCode::OK, "{}", String::from_utf8_lossy(&r.body));
        r.json()["token"].as_str().unwrap().to_string()
    }
}

pub fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap()
}
