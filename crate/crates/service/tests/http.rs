mod common;

use std::time::Duration;

use axum::http::{Method, StatusCode};
use common::{app, store_with, ADMIN, USER};
use insights_core::corpus::DocumentType;
use insights_core::{synth, Publication};
use insights_service::api::{run, AggregateRequest, Operation};
use insights_service::auth::TOKEN_TTL_SECS;
use insights_service::export::cell;
use insights_service::http::{route_table, Access, CACHE_HEADER};
use serde_json::{json, Value};

fn tiny() -> Vec<Publication> {
    [("p1", Some(2020)), ("p2", Some(2020)), ("p3", None)]
        .into_iter()
        .map(|(id, year)| {
            let mut p = Publication::new(id, format!("Paper {id}"), DocumentType::Article);
            p.year_published = year;
            p.abstract_text = Some("copyrighted abstract".into());
            p.author_names = vec!["Terry Ruas".into()];
            p.author_ids = vec!["author:Terry Ruas".into()];
            p
        })
        .collect()
}

fn body_for(route: &str) -> Option<Value> {
    if route.starts_with("/admin") || route.starts_with("/aggregate") || route.starts_with("/topics") {
        Some(json!({}))
    } else {
        None
    }
}

#[tokio::test]
async fn every_protected_route_rejects_missing_or_invalid_tokens() {
    let a = app(store_with(tiny()));
    let routes = route_table();
    assert!(routes.iter().filter(|r| r.access != Access::Public).count() >= 20);
    for r in &routes {
        for token in [None, Some("garbage"), Some("a.b")] {
            let reply = a.call(r.method.clone(), &r.example, token, body_for(&r.example).as_ref()).await;
            if r.access == Access::Public {
                assert_ne!(reply.status, StatusCode::UNAUTHORIZED, "{} {}", r.method, r.example);
            } else {
                assert_eq!(reply.status, StatusCode::UNAUTHORIZED, "{} {}", r.method, r.example);
                assert_eq!(reply.code(), "unauthenticated");
            }
        }
    }
}

#[tokio::test]
async fn admin_routes_forbid_user_tokens() {
    let a = app(store_with(tiny()));
    let user = a.login(USER).await;
    for r in route_table().iter().filter(|r| r.access == Access::Admin) {
        let reply = a.call(r.method.clone(), &r.example, Some(&user), Some(&json!({}))).await;
        assert_eq!(reply.status, StatusCode::FORBIDDEN, "{} {}", r.method, r.example);
        assert_eq!(reply.code(), "forbidden");
    }
    let admin = a.login(ADMIN).await;
    let reply = a.call(Method::DELETE, "/admin/publications/p1", Some(&admin), None).await;
    assert_eq!(reply.status, StatusCode::NO_CONTENT);
}

#[tokio::test]
async fn routes_in_the_table_are_served() {
    let a = app(store_with(tiny()));
    let admin = a.login(ADMIN).await;
    for r in route_table() {
        let reply = a.call(r.method.clone(), &r.example, Some(&admin), body_for(&r.example).as_ref()).await;
        assert_ne!(reply.status, StatusCode::METHOD_NOT_ALLOWED, "{} {}", r.method, r.example);
        if reply.status == StatusCode::NOT_FOUND {
            // Only lookups of an absent id or job may 404.
            assert!(["not_found", "unknown_job"].contains(&reply.code().as_str()), "{}", r.example);
            assert!(r.template.contains("{id}"), "{}", r.example);
        }
    }
    let reply = a.call(Method::GET, "/no/such/route", Some(&admin), None).await;
    assert_eq!((reply.status, reply.code().as_str()), (StatusCode::NOT_FOUND, "not_found"));
}

#[tokio::test]
async fn registration_and_login() {
    let a = app(store_with(vec![]));
    let creds = |u: &str, p: &str| json!({"username": u, "password": p});
    let r = a.call(Method::POST, "/auth/register", None, Some(&creds("newbie", "long enough"))).await;
    assert_eq!(r.status, StatusCode::CREATED);
    assert_eq!(r.json()["role"], "user");
    let r = a.call(Method::POST, "/auth/register", None, Some(&creds("newbie", "long enough"))).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::CONFLICT, "username_taken"));
    let r = a.call(Method::POST, "/auth/register", None, Some(&creds("other", "abc"))).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::BAD_REQUEST, "weak_password"));
    let r = a.call(Method::POST, "/auth/login", None, Some(&creds("newbie", "wrong password"))).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::UNAUTHORIZED, "invalid_credentials"));
    let r = a.call(Method::POST, "/auth/login", None, Some(&creds("ghost", "long enough"))).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::UNAUTHORIZED, "invalid_credentials"));
    let r = a.call(Method::POST, "/auth/login", None, Some(&json!({"user": 1}))).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);

    let token = a.login(("newbie", "long enough")).await;
    let r = a.call(Method::POST, "/aggregate/bins", Some(&token), None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert!(!a.state.auth.account("newbie").unwrap().password_hash.contains("long enough"));
}

#[tokio::test]
async fn tokens_expire() {
    let a = app(store_with(tiny()));
    let token = a.login(USER).await;
    a.clock.advance(TOKEN_TTL_SECS - 1);
    assert_eq!(a.call(Method::POST, "/aggregate/bins", Some(&token), None).await.status, StatusCode::OK);
    a.clock.advance(1);
    let r = a.call(Method::POST, "/aggregate/bins", Some(&token), None).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::UNAUTHORIZED, "unauthenticated"));
}

#[tokio::test]
async fn per_year_on_three_records() {
    let a = app(store_with(tiny()));
    let token = a.login(USER).await;
    let r = a.call(Method::POST, "/aggregate/per_year", Some(&token), Some(&json!({"dimension": "paper"}))).await;
    assert_eq!(r.json(), json!({"years": {"2020": 2}, "na": 1}));
}

fn full_request() -> AggregateRequest {
    serde_json::from_value(json!({
        "dimension": "author",
        "selected": synth::AUTHORS[1],
        "window": [2012, synth::YEARS.1],
        "full_range": [synth::YEARS.0, synth::YEARS.1],
        "filter": {"year_range": {"min": 1995, "max": 2020}},
    }))
    .unwrap()
}

#[tokio::test]
async fn aggregation_is_a_cached_pass_through() {
    let a = app(store_with(synth::corpus(400, 8)));
    let token = a.login(USER).await;
    let req = full_request();
    let body = serde_json::to_value(&req).unwrap();
    for op in Operation::ALL {
        let path = format!("/aggregate/{op}");
        let first = a.call(Method::POST, &path, Some(&token), Some(&body)).await;
        assert_eq!(first.status, StatusCode::OK, "{op}: {}", String::from_utf8_lossy(&first.body));
        assert_eq!(first.header(CACHE_HEADER), Some("miss"), "{op}");
        let want = run(&a.state.store.snapshot(), op, &req).unwrap().to_json();
        assert_eq!(first.body, want, "{op}");
        let second = a.call(Method::POST, &path, Some(&token), Some(&body)).await;
        assert_eq!(second.header(CACHE_HEADER), Some("hit"), "{op}");
        assert_eq!(second.body, first.body, "{op}");
    }
}

#[tokio::test]
async fn writes_invalidate_cached_aggregations() {
    let a = app(store_with(tiny()));
    let (user, admin) = (a.login(USER).await, a.login(ADMIN).await);
    let q = json!({"dimension": "paper"});
    let count_2020 = |v: Value| v["years"]["2020"].as_u64().unwrap_or(0);
    let before = a.call(Method::POST, "/aggregate/per_year", Some(&user), Some(&q)).await;
    a.call(Method::POST, "/aggregate/per_year", Some(&user), Some(&q)).await;
    let mut p = Publication::new("p4", "Fresh paper", DocumentType::Inproceedings);
    p.year_published = Some(2020);
    let r = a.call(Method::POST, "/admin/publications", Some(&admin), Some(&serde_json::to_value(&p).unwrap())).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let after = a.call(Method::POST, "/aggregate/per_year", Some(&user), Some(&q)).await;
    assert_eq!(after.header(CACHE_HEADER), Some("miss"));
    assert_eq!(count_2020(after.json()), count_2020(before.json()) + 1);

    let r = a.call(Method::DELETE, "/admin/publications/p1", Some(&admin), None).await;
    assert_eq!(r.status, StatusCode::NO_CONTENT);
    let after_delete = a.call(Method::POST, "/aggregate/per_year", Some(&user), Some(&q)).await;
    assert_eq!(count_2020(after_delete.json()), count_2020(before.json()));
}

#[tokio::test]
async fn bad_queries() {
    let a = app(store_with(tiny()));
    let token = a.login(USER).await;
    let bad = [
        ("/aggregate/top_k", json!({"k": 0})),
        ("/aggregate/top_k", json!({"filter": {"authors": "not a list"}})),
        ("/aggregate/top_k", json!({"filter": {"colour": ["red"]}})),
        ("/aggregate/top_k", json!({"filter": {"year_range": {"min": 2020, "max": 2000}}})),
        ("/aggregate/co_occurrence", json!({"dimension": "author"})),
        ("/aggregate/co_occurrence", json!({"dimension": "venue", "selected": "ACL"})),
        ("/aggregate/activity", json!({"dimension": "author", "window": [2000, 2010], "full_range": [1990, 2020]})),
        ("/aggregate/grid", json!({"dimension": "planet"})),
        ("/aggregate/median", json!({})),
    ];
    for (path, body) in bad {
        let r = a.call(Method::POST, path, Some(&token), Some(&body)).await;
        assert_eq!((r.status, r.code().as_str()), (StatusCode::BAD_REQUEST, "bad_query"), "{path} {body}");
    }
}

#[tokio::test]
async fn crud_round_trip_and_redaction() {
    let a = app(store_with(tiny()));
    let (user, admin) = (a.login(USER).await, a.login(ADMIN).await);
    let mut p = Publication::new("p9", "Round trip", DocumentType::Article);
    p.abstract_text = Some("secret".into());
    p.year_published = Some(2001);
    let body = serde_json::to_value(&p).unwrap();
    assert_eq!(a.call(Method::POST, "/admin/publications", Some(&admin), Some(&body)).await.status, StatusCode::CREATED);
    let r = a.call(Method::POST, "/admin/publications", Some(&admin), Some(&body)).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::CONFLICT, "already_exists"));

    let read = a.call(Method::GET, "/admin/publications/p9", Some(&admin), None).await.json();
    assert_eq!(serde_json::from_value::<Publication>(read).unwrap(), p);
    let redacted = a.call(Method::GET, "/admin/publications/p9", Some(&user), None).await.json();
    assert!(redacted.get("abstractText").is_none());
    assert_eq!(redacted["title"], "Round trip");
    let listed = a.call(Method::GET, "/admin/publications", Some(&user), None).await.json();
    assert_eq!(listed.as_array().unwrap().len(), 4);
    assert!(listed.as_array().unwrap().iter().all(|v| v.get("abstractText").is_none()));
    let page = a.call(Method::GET, "/admin/publications?offset=1&limit=2", Some(&admin), None).await.json();
    assert_eq!(page.as_array().unwrap().len(), 2);

    p.title = "Renamed".into();
    let r = a.call(Method::PUT, "/admin/publications/p9", Some(&admin), Some(&serde_json::to_value(&p).unwrap())).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(a.state.store.snapshot().publication("p9").unwrap().title, "Renamed");
    let r = a.call(Method::PUT, "/admin/publications/other", Some(&admin), Some(&serde_json::to_value(&p).unwrap())).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    p.id = "nope".into();
    let r = a.call(Method::PUT, "/admin/publications/nope", Some(&admin), Some(&serde_json::to_value(&p).unwrap())).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);

    let mut invalid = serde_json::to_value(&p).unwrap();
    invalid["title"] = json!("");
    invalid["id"] = json!("p10");
    let r = a.call(Method::POST, "/admin/publications", Some(&admin), Some(&invalid)).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::BAD_REQUEST, "bad_query"));

    let author = json!({"id": "a1", "fullname": "Ada Lovelace"});
    assert_eq!(a.call(Method::POST, "/admin/authors", Some(&admin), Some(&author)).await.status, StatusCode::CREATED);
    assert_eq!(a.call(Method::GET, "/admin/authors/a1", Some(&user), None).await.json()["fullname"], "Ada Lovelace");
    let venue = json!({"id": "v1", "names": ["ACL"]});
    assert_eq!(a.call(Method::POST, "/admin/venues", Some(&admin), Some(&venue)).await.status, StatusCode::CREATED);

    assert_eq!(a.call(Method::DELETE, "/admin/venues/v1", Some(&admin), None).await.status, StatusCode::NO_CONTENT);
    let r = a.call(Method::DELETE, "/admin/venues/v1", Some(&admin), None).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::NOT_FOUND, "not_found"));
    let r = a.call(Method::GET, "/admin/planets/x", Some(&admin), None).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
}

fn csv_records(bytes: &[u8]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv::Reader::from_reader(bytes);
    let header = rd.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rd.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect();
    (header, rows)
}

#[tokio::test]
async fn csv_export_parses_back_to_json_rows() {
    let mut pubs = synth::corpus(250, 21);
    pubs[0].title = "Commas, \"quotes\"\nand newlines".into();
    let a = app(store_with(pubs));
    let token = a.login(USER).await;
    let mut req = full_request();
    for (op, dim) in Operation::ALL.iter().flat_map(|op| [(*op, "author"), (*op, "paper"), (*op, "venue")]) {
        req.dimension = dim.parse().unwrap();
        if op == Operation::CoOccurrence && dim != "author" {
            continue;
        }
        if op == Operation::Activity && dim == "paper" {
            continue;
        }
        let query = serde_json::to_string(&req).unwrap();
        let enc: String = query.bytes().map(|b| format!("%{b:02X}")).collect();
        let csv = a.call(Method::GET, &format!("/export?operation={op}&format=csv&query={enc}"), Some(&token), None).await;
        assert_eq!(csv.status, StatusCode::OK, "{op} {dim}: {}", String::from_utf8_lossy(&csv.body));
        assert!(csv.header("content-type").unwrap().starts_with("text/csv"));
        let js = a.call(Method::GET, &format!("/export?operation={op}&format=json&query={enc}"), Some(&token), None).await;
        let rows: Vec<serde_json::Map<String, Value>> = serde_json::from_slice(&js.body).unwrap();
        let (header, records) = csv_records(&csv.body);
        assert_eq!(records.len(), rows.len(), "{op} {dim}");
        for (rec, row) in records.iter().zip(&rows) {
            assert_eq!(header.len(), row.len());
            let want: Vec<String> = header.iter().map(|h| cell(&row[h])).collect();
            assert_eq!(rec, &want, "{op} {dim}");
        }
    }
}

#[tokio::test]
async fn empty_export_is_header_only() {
    let a = app(store_with(tiny()));
    let token = a.login(USER).await;
    let q = "%7B%22filter%22%3A%7B%22venues%22%3A%5B%22nowhere%22%5D%7D%7D";
    let r = a.call(Method::GET, &format!("/export?operation=top_k&query={q}"), Some(&token), None).await;
    assert_eq!(String::from_utf8(r.body).unwrap(), "name,label,value\r\n");
    let r = a.call(Method::GET, "/export?operation=bins&format=xlsx", Some(&token), None).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = a.call(Method::GET, "/export", Some(&token), None).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn suggestions() {
    let a = app(store_with(synth::corpus(100, 3)));
    let token = a.login(USER).await;
    let r = a.call(Method::GET, "/suggest/authors?pattern=^a&limit=3", Some(&token), None).await.json();
    let names: Vec<&str> = r.as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(!names.is_empty() && names.len() <= 3);
    assert!(names.iter().all(|n| n.to_lowercase().starts_with('a')));
    let r = a.call(Method::GET, "/suggest/types_of_paper?pattern=proc", Some(&token), None).await.json();
    assert_eq!(r, json!(["inproceedings", "proceedings"]));
    assert_eq!(a.call(Method::GET, "/suggest/colours", Some(&token), None).await.status, StatusCode::NOT_FOUND);
    let r = a.call(Method::GET, "/suggest/authors?pattern=(", Some(&token), None).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn topic_jobs() {
    let texts = ["cats purr and meow softly", "dogs bark and fetch sticks"];
    let pubs: Vec<Publication> = (0..40)
        .map(|i| Publication::new(format!("t{i:02}"), texts[i % 2].repeat(3), DocumentType::Article))
        .collect();
    let a = app(store_with(pubs));
    let token = a.login(USER).await;
    let r = a.call(Method::POST, "/topics/jobs", Some(&token), Some(&json!({"k": 2, "seed": 1}))).await;
    assert_eq!(r.status, StatusCode::ACCEPTED);
    let id = r.json()["id"].as_str().unwrap().to_string();
    assert_eq!(r.header("location"), Some(format!("/topics/jobs/{id}").as_str()));
    a.state.jobs.wait(&id, Duration::from_secs(60)).unwrap();
    let job = a.call(Method::GET, &format!("/topics/jobs/{id}"), Some(&token), None).await.json();
    assert_eq!(job["status"], "done");
    assert_eq!(job["result"]["topics"].as_array().unwrap().len(), 2);

    let r = a.call(Method::POST, "/topics/jobs", Some(&token), Some(&json!({"k": 0}))).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = a.call(Method::GET, "/topics/jobs/job-999", Some(&token), None).await;
    assert_eq!((r.status, r.code().as_str()), (StatusCode::NOT_FOUND, "unknown_job"));
}
