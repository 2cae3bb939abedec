use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use blockmorph::evaluation::TrainedSet;
use blockmorph::metrics::{compute_corpus_metrics, normalize, pearson_matrix, Indicator, MetricSet, MetricsFile, SetName};
use blockmorph::service::{router, AppState, DEFAULT_PAGE};
use blockmorph::som::{SomConfig, SomModel};
use blockmorph::synth;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn state() -> Arc<AppState> {
    static STATE: OnceLock<Arc<AppState>> = OnceLock::new();
    STATE
        .get_or_init(|| {
            let corpus = synth::corpus(130, 51).unwrap();
            let (records, _) = compute_corpus_metrics(&corpus);
            let pearson = pearson_matrix(&records).ok();
            let metrics = MetricsFile::new(records, pearson);
            let sets: BTreeMap<SetName, TrainedSet> = SetName::ALL
                .iter()
                .map(|&name| {
                    let f = normalize(&metrics.records, &MetricSet::new(name)).unwrap();
                    let model = SomModel::train(&f, &SomConfig { iterations: 50, ..SomConfig::default() }).unwrap();
                    (name, TrainedSet::encode_corpus(model, &metrics.records).unwrap())
                })
                .collect();
            Arc::new(AppState::new(corpus, metrics, sets).unwrap())
        })
        .clone()
}

fn app() -> Router {
    router(state(), None)
}

async fn send(app: Router, req: Request<Body>) -> (StatusCode, axum::http::HeaderMap, Vec<u8>) {
    let res = app.oneshot(req).await.unwrap();
    let status = res.status();
    let headers = res.headers().clone();
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, headers, body)
}

async fn get(uri: &str) -> (StatusCode, Value) {
    let (s, _, b) = send(app(), Request::get(uri).body(Body::empty()).unwrap()).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

async fn post(uri: &str, body: &str) -> (StatusCode, Value) {
    let req = Request::post(uri).header(header::CONTENT_TYPE, "application/json").body(Body::from(body.to_string())).unwrap();
    let (s, _, b) = send(app(), req).await;
    (s, serde_json::from_slice(&b).unwrap())
}

fn first_block() -> String {
    state().corpus.blocks[0].id.clone()
}

#[tokio::test]
async fn sets_lists_every_set_with_ranges() {
    let (s, v) = get("/api/sets").await;
    assert_eq!(s, StatusCode::OK);
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 4);
    let one = arr.iter().find(|x| x["name"] == "OneBMC").unwrap();
    assert_eq!(one["indicators"], json!(["WAH", "BCR", "NOB", "BA"]));
    let np = one["norm_params"].as_array().unwrap();
    assert_eq!(np.len(), 4);
    assert!(np.iter().all(|p| p["min"].as_f64() < p["max"].as_f64()));
}

#[tokio::test]
async fn blocks_are_paged() {
    let (s, h, b) = send(app(), Request::get("/api/blocks").body(Body::empty()).unwrap()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(h["x-total-count"], "130");
    let v: Value = serde_json::from_slice(&b).unwrap();
    assert_eq!(v.as_array().unwrap().len(), DEFAULT_PAGE);
    let item = &v[0];
    assert_eq!(item["id"], first_block().as_str());
    assert!(item["ba"].as_f64().unwrap() > 0.0);
    assert!(item["nob"].as_u64().unwrap() >= 1);
    assert!(item["centroid"][0].is_number() && item["centroid"][1].is_number());

    let (_, v) = get("/api/blocks?limit=10&offset=125").await;
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|x| x["id"].as_str().unwrap()).collect();
    let st = state();
    let expected: Vec<&str> = st.corpus.blocks[125..].iter().map(|b| b.id.as_str()).collect();
    assert_eq!(ids, expected);

    let (s, _) = get("/api/blocks?limit=abc").await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn block_detail() {
    let id = first_block();
    let (s, v) = get(&format!("/api/blocks/{id}")).await;
    assert_eq!(s, StatusCode::OK);
    let b = state().corpus.block(&id).unwrap().clone();
    assert_eq!(v["id"], id.as_str());
    assert_eq!(v["buildings"].as_array().unwrap().len(), b.buildings.len());
    assert_eq!(v["buildings"][0]["height"].as_f64().unwrap(), b.buildings[0].height);
    assert!(v["boundary"].is_object() || v["boundary"].is_array());
    let rec = state().metrics.record(&id).unwrap().clone();
    assert_eq!(v["metrics"]["bcr"].as_f64().unwrap(), rec.bcr);
    assert_eq!(v["metrics"]["nob"].as_u64().unwrap(), rec.nob as u64);

    let (s, v) = get("/api/blocks/NOPE").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"], "unknown_block");
}

#[tokio::test]
async fn som_grid() {
    let (s, v) = get("/api/som/Spacemate").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64()), (Some(10), Some(10)));
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 100);
    assert!(cells.iter().all(|c| c["rgb"].as_array().unwrap().len() == 3 && c["samples"].as_array().unwrap().len() <= 4));
    let total: u64 = cells.iter().map(|c| c["sample_count"].as_u64().unwrap()).sum();
    assert_eq!(total, 130);

    let (s, v) = get("/api/som/Spacemat").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"], "unknown_set");
}

#[tokio::test]
async fn pearson_matrix_endpoint() {
    let (s, v) = get("/api/pearson").await;
    assert_eq!(s, StatusCode::OK);
    let ind = v["indicators"].as_array().unwrap();
    assert_eq!(ind.len(), 15);
    assert_eq!(ind[0], "MaxH");
    let m = v["values"].as_array().unwrap();
    assert_eq!(m.len(), 15);
    let p = state().metrics.pearson.clone().unwrap();
    for i in 0..15 {
        for j in 0..15 {
            assert_eq!(m[i][j].as_f64().unwrap(), p.get(Indicator::ALL[i], Indicator::ALL[j]));
        }
    }
}

#[tokio::test]
async fn retrieve_by_block_and_values() {
    let id = first_block();
    let (s, v) = post("/api/retrieve", &json!({"set": "OneBMC", "source": {"block_id": id}, "k": 3}).to_string()).await;
    assert_eq!(s, StatusCode::OK);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    assert_eq!(results[0]["block_id"], id.as_str());
    assert_eq!(results[0]["rank"], 1);
    assert_eq!(v["encoding"].as_array().unwrap().len(), 100);
    assert_eq!(v["query_echo"]["k"], 3);

    let (_, v) = post("/api/retrieve", &json!({"set": "OneBMC", "source": {"block_id": id}, "exclude_self": true}).to_string()).await;
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 5);
    assert!(results.iter().all(|r| r["block_id"] != id.as_str()));

    let rec = state().metrics.record(&id).unwrap().clone();
    let values = json!({"WAH": rec.wah, "BCR": rec.bcr, "NOB": rec.nob, "BA": rec.ba});
    let (s, v) = post("/api/retrieve", &json!({"set": "OneBMC", "source": {"values": values}, "k": 1}).to_string()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["results"][0]["block_id"], id.as_str());
    assert!(v["warnings"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn retrieve_out_of_range() {
    let ts = &state().sets[&SetName::Spacemate];
    let mut values: serde_json::Map<String, Value> = ts.model.norm_params.iter().map(|p| (p.indicator.abbrev().to_string(), json!(p.min))).collect();
    values.insert("FAR".into(), json!(1e9));
    let body = json!({"set": "Spacemate", "source": {"values": values}}).to_string();
    let (s, v) = post("/api/retrieve", &body).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["warnings"].as_array().unwrap().len(), 1);
    let (s, v) = post("/api/retrieve?strict=1", &body).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"], "out_of_range");
}

#[tokio::test]
async fn retrieve_errors() {
    let id = first_block();
    let cases = [
        ("{not json", StatusCode::BAD_REQUEST),
        (r#"{"source": {"block_id": "x"}}"#, StatusCode::BAD_REQUEST),
        (&*json!({"set": "Spacemat", "source": {"block_id": id}}).to_string(), StatusCode::NOT_FOUND),
        (r#"{"set": "OneBMC", "source": {"block_id": "NOPE"}}"#, StatusCode::NOT_FOUND),
        (r#"{"set": "OneBMC", "source": {"values": {"WAH": 1}}}"#, StatusCode::BAD_REQUEST),
        (r#"{"set": "OneBMC", "source": {"values": {"WAH": 1, "BCR": 0.5, "NOB": 2, "BA": 900, "XYZ": 1}}}"#, StatusCode::BAD_REQUEST),
        (&*json!({"set": "OneBMC", "source": {"block_id": id}, "k": 0}).to_string(), StatusCode::BAD_REQUEST),
    ];
    for (body, status) in cases {
        let (s, v) = post("/api/retrieve", body).await;
        assert_eq!(s, status, "{body}: {v}");
        assert!(v["error"].is_string() && v["message"].is_string());
    }
}

#[tokio::test]
async fn cors_and_unknown_routes() {
    let req = Request::builder()
        .method(Method::OPTIONS)
        .uri("/api/retrieve")
        .header(header::ORIGIN, "http://localhost:5173")
        .header(header::ACCESS_CONTROL_REQUEST_METHOD, "POST")
        .header(header::ACCESS_CONTROL_REQUEST_HEADERS, "content-type")
        .body(Body::empty())
        .unwrap();
    let (s, h, _) = send(app(), req).await;
    assert!(s.is_success());
    assert_eq!(h[header::ACCESS_CONTROL_ALLOW_ORIGIN], "*");

    let req = Request::get("/api/sets").header(header::ORIGIN, "http://example.org").body(Body::empty()).unwrap();
    let (_, h, _) = send(app(), req).await;
    assert_eq!(h[header::ACCESS_CONTROL_ALLOW_ORIGIN], "*");

    let (s, _) = get("/api/nothing").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn static_files_are_served_when_configured() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<h1>explorer</h1>").unwrap();
    let app = router(state(), Some(dir.path().to_path_buf()));
    let (s, _, b) = send(app.clone(), Request::get("/index.html").body(Body::empty()).unwrap()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(b, b"<h1>explorer</h1>");
    let (s, _, _) = send(app, Request::get("/api/sets").body(Body::empty()).unwrap()).await;
    assert_eq!(s, StatusCode::OK);
}
