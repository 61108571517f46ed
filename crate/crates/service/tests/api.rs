use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use tower::ServiceExt;

use taugraph::dataset::{parse_csv, ColumnSpec};
use taugraph::geometry::{GeometryDocument, TransformConfig};
use taugraph::kendall::{tau_b_brute, PairClass};
use taugraph::render::{plot, PlotStyle, RenderConfig};
use taugraph_service::{app, ApiError, DatasetSummary, PairDetail, ServiceConfig};

const EIGHT: &str = "name,a,b\nA,20,40\nB,86,78\nC,35,80\nD,55,35\nE,60,25\nF,85,15\nG,8,19\nH,15,93\n";

fn service() -> Router {
    app(&ServiceConfig::default()).unwrap()
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>, Option<String>) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let ctype = res
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string());
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, body, ctype)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>, Option<String>) {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn upload(app: &Router, query: &str, csv: impl Into<Body>) -> (StatusCode, Vec<u8>) {
    let req = Request::post(format!("/api/datasets?{query}"))
        .header("content-type", "text/csv")
        .body(csv.into())
        .unwrap();
    let (s, b, _) = send(app, req).await;
    (s, b)
}

async fn upload_eight(app: &Router) -> DatasetSummary {
    let (status, body) = upload(app, "x=a&y=b&label=name", EIGHT).await;
    assert_eq!(status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&body));
    serde_json::from_slice(&body).unwrap()
}

fn error(body: &[u8]) -> ApiError {
    serde_json::from_slice(body).unwrap()
}

fn eight_dataset() -> taugraph::dataset::RankedDataset {
    parse_csv(EIGHT.as_bytes(), &ColumnSpec::new("a", "b").with_label("name"))
        .unwrap()
        .dataset
}

#[tokio::test]
async fn upload_reports_tau() {
    let app = service();
    let s = upload_eight(&app).await;
    assert_eq!(s.m, 8);
    assert_eq!(s.counts.concordant, 11);
    assert_eq!(s.counts.discordant, 17);
    assert_eq!(s.tau, tau_b_brute(&eight_dataset()).unwrap().tau);
    assert_eq!(s.id.len(), 32);
    let (status, body, _) = get(&app, &format!("/api/datasets/{}", s.id)).await;
    assert_eq!(status, StatusCode::OK);
    let again: DatasetSummary = serde_json::from_slice(&body).unwrap();
    assert_eq!((again.tau, again.counts), (s.tau, s.counts));
}

#[tokio::test]
async fn upload_errors() {
    let app = service();
    let (status, body) = upload(&app, "x=a&y=b", "a,b\n1,2\n").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(error(&body).status, 422);

    let (status, body) = upload(&app, "x=a&y=a", EIGHT).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error(&body).code, "same_column");

    let (status, _) = upload(&app, "x=a&y=zzz", EIGHT).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, body) = upload(&app, "x=a&y=b", b"a,b\n1,2\n\xff,3\n4,5\n".to_vec()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error(&body).code, "malformed_csv");

    let (status, body) = upload(&app, "y=b", EIGHT).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error(&body).code, "missing_parameter");
}

#[tokio::test]
async fn oversized_upload_is_413() {
    let config = ServiceConfig {
        body_limit: 1024,
        ..ServiceConfig::default()
    };
    let app = app(&config).unwrap();
    let mut csv = String::from("a,b\n");
    while csv.len() <= 2048 {
        csv.push_str("1,2\n");
    }
    let (status, body) = upload(&app, "x=a&y=b", csv).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    let e = error(&body);
    assert_eq!((e.status, e.code.as_str()), (413, "payload_too_large"));
}

#[tokio::test]
async fn default_limit_is_ten_megabytes() {
    let app = service();
    let big = vec![b'1'; 10 * 1024 * 1024 + 1];
    let (status, _) = upload(&app, "x=a&y=b", big).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn geometry_document() {
    let app = service();
    let s = upload_eight(&app).await;
    let (status, body, ctype) = get(&app, &format!("/api/datasets/{}/geometry?mode=translate-rotate", s.id)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("application/json"));
    let doc: GeometryDocument = serde_json::from_slice(&body).unwrap();
    assert_eq!(doc.segments.len(), 28);
    assert_eq!(doc.segments.iter().filter(|s| s.endpoint.y > 0.0).count(), 11);
    let lib = GeometryDocument::build(&eight_dataset(), &TransformConfig::default()).unwrap();
    assert_eq!(body, lib.to_json().into_bytes());

    let (_, body, _) = get(&app, &format!("/api/datasets/{}/geometry?mode=translate-only", s.id)).await;
    let doc: GeometryDocument = serde_json::from_slice(&body).unwrap();
    assert!(doc.segments.iter().all(|s| s.endpoint.x == s.x && s.endpoint.y == s.y));

    let (status, body, _) = get(&app, &format!("/api/datasets/{}/geometry?mode=sideways", s.id)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error(&body).code, "invalid_parameter");
    let (status, _, _) = get(&app, &format!("/api/datasets/{}/geometry?epsilon=-1", s.id)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_id_is_404() {
    let app = service();
    for path in ["geometry", "plot.svg", "pairs/0/1", "pairs/0/1/bars.svg"] {
        let (status, body, _) = get(&app, &format!("/api/datasets/ffffffffffffffffffffffffffffffff/{path}")).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{path}");
        assert_eq!(error(&body).code, "dataset_not_found");
    }
}

#[tokio::test]
async fn plot_matches_library() {
    let app = service();
    let s = upload_eight(&app).await;
    let uri = format!("/api/datasets/{}/plot.svg?style=segments,clock&mode=translate-rotate&clock_mode=calibrated", s.id);
    let (status, body, ctype) = get(&app, &uri).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("image/svg+xml"));
    let style = PlotStyle::from_tokens("segments,clock").unwrap();
    let lib = plot(&eight_dataset(), &style, &RenderConfig::default()).unwrap();
    assert_eq!(String::from_utf8(body.clone()).unwrap(), lib);
    let text = String::from_utf8(body).unwrap();
    assert_eq!(text.matches("class=\"segment\"").count(), 28);
    assert_eq!(text.matches("class=\"clock-vector\"").count(), 3);

    let (status, again, _) = get(&app, &uri).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, lib.into_bytes());

    let (status, body, _) = get(&app, &format!("/api/datasets/{}/plot.svg?style=bogus", s.id)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error(&body).code, "invalid_style");

    let (status, _, _) = get(&app, &format!("/api/datasets/{}/plot.svg?style=clock&mode=translate-only", s.id)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn pair_drilldown() {
    let app = service();
    let s = upload_eight(&app).await;
    // B(86,78) and G(8,19)
    let (status, body, _) = get(&app, &format!("/api/datasets/{}/pairs/1/6", s.id)).await;
    assert_eq!(status, StatusCode::OK);
    let p: PairDetail = serde_json::from_slice(&body).unwrap();
    assert_eq!(p.class, PairClass::Concordant);
    assert!(p.dx > 0.0 && p.dy > 0.0);
    assert_eq!((p.a.label.as_str(), p.b.label.as_str()), ("B", "G"));
    assert_eq!(p.anchor, 6);

    // F(85,15) and H(15,93): the largest dissimilarity, discordant
    let (_, body, _) = get(&app, &format!("/api/datasets/{}/pairs/5/7", s.id)).await;
    let p: PairDetail = serde_json::from_slice(&body).unwrap();
    assert_eq!(p.class, PairClass::Discordant);
    assert_eq!(p.dissimilarity, 148.0);
    assert!(p.a.x > p.b.x && p.a.y < p.b.y);
    assert!(p.endpoint.y < 0.0);

    for bad in ["3/3", "4/2", "0/8", "x/1"] {
        let (status, body, _) = get(&app, &format!("/api/datasets/{}/pairs/{bad}", s.id)).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad}");
        assert_eq!(error(&body).status, 400);
    }

    let (status, body, ctype) = get(&app, &format!("/api/datasets/{}/pairs/5/7/bars.svg", s.id)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("image/svg+xml"));
    let text = String::from_utf8(body).unwrap();
    assert_eq!(text.matches("class=\"bar\"").count(), 4);
}

#[tokio::test]
async fn health_is_stable() {
    let app = service();
    let mut bodies = Vec::new();
    for _ in 0..3 {
        let (status, body, _) = get(&app, "/api/health").await;
        assert_eq!(status, StatusCode::OK);
        bodies.push(body);
    }
    assert_eq!(bodies[0], br#"{"status":"ok"}"#.to_vec());
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}

#[tokio::test]
async fn health_after_many_uploads() {
    let app = service();
    for _ in 0..1000 {
        let (status, _) = upload(&app, "x=a&y=b", "a,b\n1,2\n2,1\n3,3\n").await;
        assert_eq!(status, StatusCode::CREATED);
    }
    let (status, _, _) = get(&app, "/api/health").await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn reupload_gives_new_id_same_tau() {
    let app = service();
    let a = upload_eight(&app).await;
    let b = upload_eight(&app).await;
    assert_ne!(a.id, b.id);
    assert_eq!((a.tau, a.counts), (b.tau, b.counts));
}

#[tokio::test]
async fn persistent_store_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let config = ServiceConfig {
        store_dir: Some(dir.path().to_path_buf()),
        ..ServiceConfig::default()
    };
    let first = app(&config).unwrap();
    let s = upload_eight(&first).await;
    let (_, before, _) = get(&first, &format!("/api/datasets/{}/geometry", s.id)).await;

    let second = app(&config).unwrap();
    let (status, after, _) = get(&second, &format!("/api/datasets/{}/geometry", s.id)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before, after);
}

#[tokio::test]
async fn cors_headers_present() {
    let app = service();
    let req = Request::get("/api/health")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let res = app.oneshot(req).await.unwrap();
    assert_eq!(res.headers().get("access-control-allow-origin").unwrap(), "*");
}

#[tokio::test]
async fn concurrent_uploads_get_distinct_ids() {
    let app = service();
    let handles: Vec<_> = (0..32)
        .map(|_| {
            let app = app.clone();
            tokio::spawn(async move { upload_eight(&app).await.id })
        })
        .collect();
    let mut ids = Vec::new();
    for h in handles {
        ids.push(h.await.unwrap());
    }
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), 32);
}
