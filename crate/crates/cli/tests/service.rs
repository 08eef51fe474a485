use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use inexpress::algebra::equivalent;
use inexpress::certificate::Certificate;
use inexpress::fixtures::{accept_all, finitely_many_a, finitely_many_b};
use inexpress::hoa::emit;
use inexpress::separation::{check_positive, ApproximationSession};
use inexpress::{Alphabet, DetOmegaAutomaton, Mode, RefuterTransducer};
use inexpress_cli::cli::parse_text;
use inexpress_cli::service::{router, AppState};

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn call_json(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, text) = call(app, method, uri, body).await;
    (status, serde_json::from_str(&text).unwrap_or(Value::Null))
}

async fn upload(app: &Router, a: &DetOmegaAutomaton) -> String {
    let (status, v) = call_json(app, "POST", "/automata", Some(json!({ "hoa": emit(a) }))).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

fn app() -> (AppState, Router) {
    let st = AppState::new(None);
    (st.clone(), router(st))
}

#[tokio::test]
async fn uploads_are_content_addressed() {
    let (_, app) = app();
    let id = upload(&app, &finitely_many_a()).await;
    assert_eq!(id.len(), 64);
    assert_eq!(upload(&app, &finitely_many_a()).await, id);
    let (status, text) = call(&app, "GET", &format!("/artifacts/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(equivalent(&parse_text(&text).unwrap(), &finitely_many_a()).unwrap());

    let (status, v) = call_json(&app, "POST", "/automata", Some(json!({ "hoa": "States: x" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"].as_str().unwrap().contains("syntax"), "{v}");
}

#[tokio::test]
async fn artifacts_persist_to_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(Some(dir.path().to_path_buf())));
    let id = upload(&app, &finitely_many_a()).await;
    assert!(dir.path().join(format!("{id}.hoa")).exists());
}

#[tokio::test]
async fn decide_and_verify() {
    let (_, app) = app();
    let fa = upload(&app, &finitely_many_a()).await;
    let (status, v) = call_json(&app, "POST", "/decide", Some(json!({ "automata": [fa], "family": "dbw" }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["decision"], "refuted");
    assert_eq!(v["certificate"]["text"], "⟨ε, b, a⟩");
    assert_eq!(v["certificate"]["words"][1], json!(["x1", "b"]));

    let (status, text) = call(&app, "GET", &format!("/artifacts/{}", v["refuter"].as_str().unwrap()), None).await;
    assert_eq!(status, StatusCode::OK);
    let r: RefuterTransducer = serde_json::from_str(&text).unwrap();
    assert!(r.num_states() <= 4);

    let cert_id = v["certificate"]["id"].clone();
    let (status, rep) = call_json(&app, "POST", "/certificates/verify", Some(json!({ "certificate": cert_id, "automata": [fa] }))).await;
    assert_eq!(status, StatusCode::OK, "{rep}");
    assert_eq!(rep["valid"], true);

    let bad = Certificate::three_word("dbw", &Alphabet::from_chars("ab"), "", "a", "b").unwrap();
    let body = json!({ "certificate": serde_json::to_value(&bad).unwrap(), "automata": [fa] });
    let (status, rep) = call_json(&app, "POST", "/certificates/verify", Some(body)).await;
    assert_eq!(status, StatusCode::OK, "{rep}");
    assert_eq!(rep["valid"], false);

    let fb = upload(&app, &finitely_many_b()).await;
    let (status, v) = call_json(&app, "POST", "/decide", Some(json!({ "automata": [fa, fb], "family": "dbw" }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["decision"], "separable");
    let (_, text) = call(&app, "GET", &format!("/artifacts/{}", v["automaton"].as_str().unwrap()), None).await;
    let sep = parse_text(&text).unwrap();
    assert!(check_positive(&sep, &Mode::separate(finitely_many_a(), finitely_many_b())).unwrap());

    let (status, _) = call_json(&app, "POST", "/decide", Some(json!({ "automata": [fa], "family": "bogus" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call_json(&app, "POST", "/decide", Some(json!({ "automata": ["nope"], "family": "dbw" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

async fn annotate(app: &Router, game: &str, a: &str) -> Value {
    let (status, v) = call_json(app, "POST", &format!("/games/{game}/annotate"), Some(json!({ "annotation": a }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    v
}

async fn new_game(app: &Router, aut: &str) -> Value {
    let (status, g) = call_json(app, "POST", "/games", Some(json!({ "automaton": aut, "family": "dbw" }))).await;
    assert_eq!(status, StatusCode::CREATED, "{g}");
    g
}

#[tokio::test]
async fn fix1_game_follows_the_refuter() {
    let (_, app) = app();
    let fa = upload(&app, &finitely_many_a()).await;
    let g = new_game(&app, &fa).await;
    let id = g["id"].as_str().unwrap().to_string();
    assert_eq!(g["annotation_alphabet"], json!(["acc", "rej"]));
    assert_eq!(g["certificate_text"], "⟨ε, b, a⟩");

    assert_eq!(annotate(&app, &id, "acc").await["letter"], "a");
    let mut last = Value::Null;
    for _ in 0..10 {
        last = annotate(&app, &id, "rej").await;
        assert_eq!(last["letter"], "b");
    }
    let status = &last["status"];
    assert_eq!(status["word"], "abbbbbbbbbb");
    let cycle = &status["cycle"];
    assert_eq!(cycle["word_in_language"], true);
    assert_eq!(cycle["annotations_accepting"], false);
    assert_eq!(cycle["prover_loses"], true);

    let (status, view) = call_json(&app, "GET", &format!("/games/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    let t = view["transcript"].as_array().unwrap();
    assert_eq!(t.len(), 11);
    assert_eq!(t[0], json!({ "annotation": "acc", "letter": "a" }));
    assert!(t[1..].iter().all(|r| r == &json!({ "annotation": "rej", "letter": "b" })));
}

#[tokio::test]
async fn game_errors() {
    let (_, app) = app();
    let fa = upload(&app, &finitely_many_a()).await;
    let id = new_game(&app, &fa).await["id"].as_str().unwrap().to_string();
    let (status, v) = call_json(&app, "POST", &format!("/games/{id}/annotate"), Some(json!({ "annotation": "maybe" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"].as_str().unwrap().contains("acc, rej"), "{v}");
    // the bad letter leaves the transcript untouched
    let (_, view) = call_json(&app, "GET", &format!("/games/{id}"), None).await;
    assert_eq!(view["transcript"], json!([]));

    let (status, _) = call_json(&app, "POST", "/games/game-999/annotate", Some(json!({ "annotation": "acc" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call_json(&app, "GET", "/games/game-999", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let all = upload(&app, &accept_all(Alphabet::from_chars("ab"))).await;
    let (status, _) = call_json(&app, "POST", "/games", Some(json!({ "automaton": all, "family": "dbw" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn scripted_plays_always_end_in_a_contradiction() {
    let (_, app) = app();
    let fa = upload(&app, &finitely_many_a()).await;
    for i in 0u32..50 {
        let g = new_game(&app, &fa).await;
        let id = g["id"].as_str().unwrap().to_string();
        // a prefix spelled by the bits of i, then one of three loops
        let mut seq: Vec<&str> = (0..6).map(|b| if i >> b & 1 == 1 { "acc" } else { "rej" }).collect();
        let block: &[&str] = match i % 3 {
            0 => &["acc"],
            1 => &["rej"],
            _ => &["acc", "rej", "rej"],
        };
        for _ in 0..8 {
            seq.extend_from_slice(block);
        }
        let mut status = Value::Null;
        for a in seq {
            status = annotate(&app, &id, a).await["status"].clone();
        }
        assert_eq!(status["cycle"]["prover_loses"], true, "play {i}: {status}");

        // replaying the transcript against the stored refuter reproduces the tape
        let (_, view) = call_json(&app, "GET", &format!("/games/{id}"), None).await;
        let (_, text) = call(&app, "GET", &format!("/artifacts/{}", view["refuter"].as_str().unwrap()), None).await;
        let r: RefuterTransducer = serde_json::from_str(&text).unwrap();
        let rounds = view["transcript"].as_array().unwrap();
        let ys: Vec<usize> = rounds.iter().map(|t| r.inputs.index(t["annotation"].as_str().unwrap()).unwrap()).collect();
        let tape: String = rounds.iter().map(|t| t["letter"].as_str().unwrap()).collect();
        assert_eq!(r.outputs.format_word(&r.run(&ys).unwrap()), tape);
        assert_eq!(view["status"]["word"], tape);
    }
}

#[tokio::test]
async fn approximation_session_separates_with_c2() {
    let (_, app) = app();
    let fa = upload(&app, &finitely_many_a()).await;
    let (status, s) = call_json(&app, "POST", "/sessions", Some(json!({ "automaton": fa, "family": "dbw" }))).await;
    assert_eq!(status, StatusCode::CREATED, "{s}");
    assert_eq!(s["status"], "running");
    assert_eq!(s["certificate"]["text"], "⟨ε, b, a⟩");
    let names: Vec<&str> = s["candidates"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["C0", "C1", "C2", "C3", "C4"]);
    assert_eq!(s["candidates"][2]["pattern"], "(a*·b)^ω");
    let id = s["id"].as_str().unwrap().to_string();

    let (status, same) = call_json(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(same, s);

    let (status, v) = call_json(&app, "POST", &format!("/sessions/{id}/choose"), Some(json!({ "candidate": "C9" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{v}");

    let (status, v) = call_json(&app, "POST", &format!("/sessions/{id}/choose"), Some(json!({ "candidate": "C2" }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["status"], "separated");
    assert_eq!(v["history"][0]["choice"], "C2");
    let sep_id = v["separator"].as_str().unwrap();
    let (status, text) = call(&app, "GET", &format!("/artifacts/{sep_id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    let sep = parse_text(&text).unwrap();
    assert!(check_positive(&sep, &Mode::separate(finitely_many_a(), finitely_many_b())).unwrap());

    let (status, _) = call_json(&app, "POST", &format!("/sessions/{id}/choose"), Some(json!({ "candidate": "C1" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (status, text) = call(&app, "GET", &format!("/sessions/{id}/export"), None).await;
    assert_eq!(status, StatusCode::OK);
    let rec = ApproximationSession::from_json(&text).unwrap();
    assert!(rec.replays_exactly().unwrap());
}

#[tokio::test]
async fn concurrent_mutation_is_rejected() {
    let (st, app) = app();
    let fa = upload(&app, &finitely_many_a()).await;
    let (_, s) = call_json(&app, "POST", "/sessions", Some(json!({ "automaton": fa, "family": "dbw" }))).await;
    let id = s["id"].as_str().unwrap().to_string();
    let token = st.hold_session(&id).unwrap();
    assert!(st.hold_session(&id).is_none());
    let (status, _) = call_json(&app, "POST", &format!("/sessions/{id}/choose"), Some(json!({ "candidate": "C2" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    // reads go through while the token is held
    let (status, v) = call_json(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!((status, v["status"].as_str()), (StatusCode::OK, Some("running")));
    drop(token);
    let (status, _) = call_json(&app, "POST", &format!("/sessions/{id}/choose"), Some(json!({ "candidate": "C2" }))).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn unknown_ids_are_404() {
    let (_, app) = app();
    for uri in ["/sessions/session-0", "/artifacts/00", "/sessions/x/export"] {
        let (status, _) = call_json(&app, "GET", uri, None).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{uri}");
    }
    let (status, _) = call_json(&app, "POST", "/sessions/x/choose", Some(json!({ "candidate": "C2" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call_json(&app, "POST", "/sessions", Some(json!({ "automaton": "x", "family": "dbw" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
