use std::collections::BTreeSet;

use atlas_core::registry::{load_registry, save_registry, Registry, RegistryStore};
use atlas_core::taxonomy::InferenceMode;
use atlas_service::{router, AppState};
use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;

const TOKEN: &str = "s3cret";

fn app_with(registry: Registry) -> Router {
    let state = AppState {
        store: RegistryStore::in_memory(registry),
        token: Some(TOKEN.into()),
    };
    router(state, None)
}

fn fixture() -> Registry {
    load_registry(&atlas_testkit::fixture_text()).unwrap()
}

struct Reply {
    status: StatusCode,
    headers: axum::http::HeaderMap,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap()
    }
}

async fn call(
    app: &Router,
    method: &str,
    uri: &str,
    token: Option<&str>,
    body: Option<Value>,
) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("X-Moderator-Token", t);
    }
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = to_bytes(resp.into_body(), usize::MAX)
        .await
        .unwrap()
        .to_vec();
    Reply {
        status,
        headers,
        body,
    }
}

async fn get(app: &Router, uri: &str) -> Reply {
    call(app, "GET", uri, None, None).await
}

fn check_uri(a: &str, b: &str) -> String {
    let q = url::form_urlencoded::Serializer::new(String::new())
        .append_pair("a", a)
        .append_pair("b", b)
        .finish();
    format!("/api/pipeline/check?{q}")
}

fn ids(reply: &Reply) -> BTreeSet<String> {
    reply
        .json()
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["id"].as_str().unwrap().to_owned())
        .collect()
}

#[tokio::test]
async fn empty_filter_lists_everything_by_name() {
    let app = app_with(fixture());
    let r = get(&app, "/api/tools").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.headers["x-total-count"], "12");
    let body = r.json();
    let names: Vec<&str> = body
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["name"].as_str().unwrap())
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(body[0]["overall_deployment"].is_string());
}

#[tokio::test]
async fn stage_and_inference_filter_matches_recount() {
    let reg = fixture();
    let app = app_with(reg.clone());
    let expected: BTreeSet<String> = reg
        .tools()
        .filter(|t| t.cj_stages.contains(&1))
        .filter(|t| {
            t.capabilities
                .iter()
                .any(|c| c.classification.inference == InferenceMode::Generation)
        })
        .map(|t| t.id.clone())
        .collect();
    assert!(!expected.is_empty());
    let r = get(&app, "/api/tools?stages=1&inference=generation").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(ids(&r), expected);
    assert_eq!(
        r.headers["x-total-count"],
        expected.len().to_string().as_str()
    );
}

#[tokio::test]
async fn malformed_filters_are_rejected() {
    let app = app_with(fixture());
    for uri in [
        "/api/tools?stages=9",
        "/api/tools?inference=magic",
        "/api/tools?color=red",
    ] {
        assert_eq!(
            get(&app, uri).await.status,
            StatusCode::BAD_REQUEST,
            "{uri}"
        );
    }
}

#[tokio::test]
async fn single_tool_and_missing_tool() {
    let app = app_with(fixture());
    let r = get(&app, "/api/tools/face-search").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["overall_deployment"], "deployed");
    assert_eq!(
        get(&app, "/api/tools/nope").await.status,
        StatusCode::NOT_FOUND
    );
}

#[tokio::test]
async fn summary_on_empty_registry() {
    let app = app_with(Registry::new());
    let r = get(&app, "/api/analytics/summary").await;
    assert_eq!(r.status, StatusCode::OK);
    let body = r.json();
    assert_eq!(body["tool_count"], 0);
    assert_eq!(body["inference_shares"], json!({}));
    assert_eq!(body["development_shares"], json!({}));
}

#[tokio::test]
async fn stage_table_and_map() {
    let app = app_with(fixture());
    let table = get(&app, "/api/analytics/stage-table").await.json();
    assert_eq!(table.as_array().unwrap().len(), 8);

    let m = get(&app, "/api/analytics/map?stage=2").await;
    assert_eq!(m.status, StatusCode::OK);
    assert_eq!(m.json()["cells"].as_array().unwrap().len(), 12);

    let svg = get(&app, "/api/analytics/map.svg?stage=2").await;
    assert_eq!(svg.headers["content-type"], "image/svg+xml");
    let text = String::from_utf8(svg.body).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(
        doc.descendants()
            .filter(|n| n.attribute("class") == Some("cell"))
            .count(),
        12
    );

    for uri in [
        "/api/analytics/map?stage=0",
        "/api/analytics/map.svg?stage=9",
        "/api/analytics/map",
        "/api/analytics/map?stage=x",
    ] {
        assert_eq!(
            get(&app, uri).await.status,
            StatusCode::BAD_REQUEST,
            "{uri}"
        );
    }
}

#[tokio::test]
async fn pipeline_check_endpoint() {
    let app = app_with(Registry::new());
    let r = get(
        &app,
        &check_uri(
            "Analysis (audio -> text)",
            "Generation (prompt, text -> text)",
        ),
    )
    .await;
    assert_eq!(r.status, StatusCode::OK);
    let body = r.json();
    assert_eq!(body["compatible"], true);
    assert_eq!(body["residual"], json!(["prompt"]));
    assert!(!body["binding"]["pairs"].as_array().unwrap().is_empty());

    let same = get(
        &app,
        &check_uri("Analysis(text->text)", "Analysis (text → text)"),
    )
    .await
    .json();
    assert_eq!(same["compatible"], true);
    assert_eq!(same["residual"], json!([]));

    let bad = get(
        &app,
        &check_uri("Analysis (text ->", "Analysis (text -> text)"),
    )
    .await;
    assert_eq!(bad.status, StatusCode::BAD_REQUEST);
    let body = bad.json();
    assert_eq!(body["param"], "a");
    assert!(body["position"].is_u64());
    assert!(!body["expected"].as_array().unwrap().is_empty());
}

fn new_tool(id: &str) -> Value {
    json!({
        "id": id,
        "name": "Bail Advisor",
        "purpose": "Summarise bail history",
        "cj_stages": [4, 5],
        "capabilities": [{"classification": "Generation (prompt, text → text)", "description": "summary"}],
        "users": [{"organization": "Court Service", "stage": "experimental"}],
    })
}

#[tokio::test]
async fn moderation_flow() {
    let app = app_with(fixture());
    let r = call(
        &app,
        "POST",
        "/api/change-requests",
        None,
        Some(json!({"kind": "add", "payload": new_tool("bail-advisor"), "submitter": "clerk"})),
    )
    .await;
    assert_eq!(r.status, StatusCode::CREATED);
    let id = r.json()["id"].as_str().unwrap().to_owned();
    assert_eq!(r.json()["status"], "pending");

    // Public status lookup, gated listing.
    assert_eq!(
        get(&app, &format!("/api/change-requests/{id}"))
            .await
            .json()["status"],
        "pending"
    );
    assert_eq!(
        get(&app, "/api/change-requests?status=pending")
            .await
            .status,
        StatusCode::UNAUTHORIZED
    );
    let pending = call(
        &app,
        "GET",
        "/api/change-requests?status=pending",
        Some(TOKEN),
        None,
    )
    .await;
    assert_eq!(pending.json().as_array().unwrap().len(), 1);

    let approve = format!("/api/change-requests/{id}/approve");
    for token in [None, Some("wrong"), Some("s3cre")] {
        let r = call(&app, "POST", &approve, token, None).await;
        assert_eq!(r.status, StatusCode::UNAUTHORIZED);
    }
    assert_eq!(
        get(&app, "/api/tools/bail-advisor").await.status,
        StatusCode::NOT_FOUND
    );
    assert!(get(&app, "/api/audit")
        .await
        .json()
        .as_array()
        .unwrap()
        .is_empty());

    let r = call(
        &app,
        "POST",
        &approve,
        Some(TOKEN),
        Some(json!({"reviewer": "lead", "note": "ok"})),
    )
    .await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["status"], "approved");
    assert_eq!(
        get(&app, "/api/tools/bail-advisor").await.status,
        StatusCode::OK
    );
    let audit = get(&app, "/api/audit").await.json();
    assert_eq!(audit.as_array().unwrap().len(), 1);
    assert_eq!(audit[0]["actor"], "lead");

    // Second review of the same request conflicts.
    let again = call(
        &app,
        "POST",
        &format!("/api/change-requests/{id}/reject"),
        Some(TOKEN),
        None,
    )
    .await;
    assert_eq!(again.status, StatusCode::CONFLICT);
    let missing = call(
        &app,
        "POST",
        "/api/change-requests/cr-9999/approve",
        Some(TOKEN),
        None,
    )
    .await;
    assert_eq!(missing.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn colliding_adds_conflict_on_second_approval() {
    let app = app_with(fixture());
    let mut ids = Vec::new();
    for _ in 0..2 {
        let r = call(
            &app,
            "POST",
            "/api/change-requests",
            None,
            Some(json!({"kind": "add", "payload": new_tool("twin")})),
        )
        .await;
        ids.push(r.json()["id"].as_str().unwrap().to_owned());
    }
    let ok = call(
        &app,
        "POST",
        &format!("/api/change-requests/{}/approve", ids[0]),
        Some(TOKEN),
        None,
    )
    .await;
    assert_eq!(ok.status, StatusCode::OK);
    let clash = call(
        &app,
        "POST",
        &format!("/api/change-requests/{}/approve", ids[1]),
        Some(TOKEN),
        None,
    )
    .await;
    assert_eq!(clash.status, StatusCode::CONFLICT);
    assert_eq!(
        get(&app, &format!("/api/change-requests/{}", ids[1]))
            .await
            .json()["status"],
        "pending"
    );
}

#[tokio::test]
async fn invalid_submissions_are_422_with_fields() {
    let app = app_with(fixture());
    let mut bad = new_tool("Bad Id");
    bad["name"] = json!("");
    let r = call(
        &app,
        "POST",
        "/api/change-requests",
        None,
        Some(json!({"kind": "add", "payload": bad})),
    )
    .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    let fields: BTreeSet<String> = r.json()["issues"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|i| i["severity"] == "error")
        .map(|i| i["field"].as_str().unwrap().to_owned())
        .collect();
    assert!(
        fields.contains("id") && fields.contains("name"),
        "{fields:?}"
    );

    let mut unparsable = new_tool("ok-id");
    unparsable["capabilities"][0]["classification"] = json!("Analysis (text ->");
    let r = call(
        &app,
        "POST",
        "/api/change-requests",
        None,
        Some(json!({"kind": "add", "payload": unparsable})),
    )
    .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(r.json()["issues"][0]["field"]
        .as_str()
        .unwrap()
        .starts_with("payload.capabilities"));

    let r = call(
        &app,
        "POST",
        "/api/change-requests",
        None,
        Some(json!({"kind": "retire", "target_id": "no-such-tool"})),
    )
    .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["issues"][0]["field"], "target_id");

    let r = call(
        &app,
        "POST",
        "/api/change-requests",
        None,
        Some(json!({"kind": "update", "target_id": "face-search", "payload": new_tool("other")})),
    )
    .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);

    let req = Request::post("/api/change-requests")
        .body(Body::from("{not json"))
        .unwrap();
    assert_eq!(
        app.clone().oneshot(req).await.unwrap().status(),
        StatusCode::BAD_REQUEST
    );
}

#[tokio::test]
async fn unset_token_refuses_moderation() {
    let app = router(
        AppState {
            store: RegistryStore::in_memory(fixture()),
            token: None,
        },
        None,
    );
    let r = call(&app, "GET", "/api/change-requests", Some(""), None).await;
    assert_eq!(r.status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn reads_leave_the_document_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("atlas.json");
    std::fs::write(&path, save_registry(&fixture())).unwrap();
    let before = std::fs::read(&path).unwrap();
    let app = router(
        AppState {
            store: RegistryStore::open(&path).unwrap(),
            token: Some(TOKEN.into()),
        },
        None,
    );
    for uri in [
        "/api/tools",
        "/api/tools/face-search",
        "/api/analytics/summary",
        "/api/analytics/stage-table",
        "/api/analytics/map?stage=3",
        "/api/analytics/map.svg?stage=3",
        "/api/audit",
        &check_uri("Analysis (text -> text)", "Analysis (text -> text)"),
    ] {
        assert_eq!(get(&app, uri).await.status, StatusCode::OK, "{uri}");
    }
    assert_eq!(std::fs::read(&path).unwrap(), before);

    let r = call(
        &app,
        "POST",
        "/api/change-requests",
        None,
        Some(json!({"kind": "add", "payload": new_tool("durable")})),
    )
    .await;
    let id = r.json()["id"].as_str().unwrap().to_owned();
    call(
        &app,
        "POST",
        &format!("/api/change-requests/{id}/approve"),
        Some(TOKEN),
        None,
    )
    .await;
    let reopened = RegistryStore::open(&path).unwrap();
    assert!(reopened.snapshot().tool("durable").is_some());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn readers_never_see_partial_approvals() {
    let app = app_with(fixture());
    let r = call(
        &app,
        "POST",
        "/api/change-requests",
        None,
        Some(json!({"kind": "add", "payload": new_tool("racer")})),
    )
    .await;
    let id = r.json()["id"].as_str().unwrap().to_owned();

    let mut readers = Vec::new();
    for _ in 0..4 {
        let app = app.clone();
        readers.push(tokio::spawn(async move {
            for _ in 0..50 {
                let tools = get(&app, "/api/tools").await;
                let has_tool = ids(&tools).contains("racer");
                let count: usize = tools.headers["x-total-count"]
                    .to_str()
                    .unwrap()
                    .parse()
                    .unwrap();
                assert_eq!(count, if has_tool { 13 } else { 12 });
            }
        }));
    }
    let ok = call(
        &app,
        "POST",
        &format!("/api/change-requests/{id}/approve"),
        Some(TOKEN),
        None,
    )
    .await;
    assert_eq!(ok.status, StatusCode::OK);
    for r in readers {
        r.await.unwrap();
    }
}

#[tokio::test]
async fn static_files_are_served_when_configured() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<h1>atlas</h1>").unwrap();
    let app = router(
        AppState {
            store: RegistryStore::in_memory(Registry::new()),
            token: None,
        },
        Some(dir.path().to_path_buf()),
    );
    let r = get(&app, "/index.html").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body, b"<h1>atlas</h1>");
    assert_eq!(get(&app, "/api/tools").await.status, StatusCode::OK);
}
