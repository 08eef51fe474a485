//! HTTP/JSON front end: automaton uploads, decisions, refuter games and
//! approximation sessions. Schema notes live in the repository README.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex, OwnedMutexGuard};

use inexpress::certificate::{verify_certificate, Certificate, Report};
use inexpress::game::{ArenaStats, Route};
use inexpress::hoa::emit;
use inexpress::separation::{
    approx_start_with, approx_step, decide, ApproximationSession, Decision, Offer, Options, Status, Verdict, DEFAULT_CAP,
    DEFAULT_MAX_STEPS,
};
use inexpress::{make_gamma, DetOmegaAutomaton, GammaDescriptor, LassoWord, MarkSet, Mode, RefuterTransducer};

use crate::store::{ArtifactStore, Kind};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown {what} `{id}`"))
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }

    fn busy(id: &str) -> Self {
        Self::new(StatusCode::CONFLICT, format!("`{id}` is being modified by another request"))
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl From<inexpress::Error> for ApiError {
    fn from(e: inexpress::Error) -> Self {
        ApiError::unprocessable(e.to_string())
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        ApiError::internal(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// A value with serialized writers and concurrent readers.
struct Slot<T> {
    writer: Arc<Mutex<()>>,
    value: RwLock<T>,
}

impl<T: Clone> Slot<T> {
    fn new(value: T) -> Arc<Self> {
        Arc::new(Slot {
            writer: Arc::new(Mutex::new(())),
            value: RwLock::new(value),
        })
    }

    fn read(&self) -> T {
        self.value.read().unwrap().clone()
    }

    fn claim(&self, id: &str) -> ApiResult<OwnedMutexGuard<()>> {
        self.writer.clone().try_lock_owned().map_err(|_| ApiError::busy(id))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Round {
    pub annotation: String,
    pub letter: String,
}

/// Outcome of the play if Prover repeats the annotations since `start` forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub start: usize,
    pub length: usize,
    pub word: String,
    pub annotations: String,
    pub word_in_language: bool,
    pub annotations_accepting: bool,
    pub structural: bool,
    pub prover_loses: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiveStatus {
    pub rounds: usize,
    pub word: String,
    pub language_state: usize,
    pub language_marks: Vec<u32>,
    pub annotation_state: usize,
    pub annotation_marks: Vec<u32>,
    pub cycle: Option<Cycle>,
}

fn bits(m: MarkSet) -> Vec<u32> {
    (0..64).filter(|i| m >> i & 1 == 1).collect()
}

#[derive(Debug, Clone)]
struct PlaySession {
    id: String,
    family: String,
    automaton: String,
    gamma: GammaDescriptor,
    language: DetOmegaAutomaton,
    refuter: RefuterTransducer,
    refuter_id: String,
    certificate_id: Option<String>,
    certificate: Option<String>,
    state: usize,
    lang: usize,
    acc: usize,
    structure: usize,
    annotations: Vec<usize>,
    letters: Vec<usize>,
    seen: HashMap<(usize, usize, usize, usize), usize>,
    cycle: Option<Cycle>,
}

impl PlaySession {
    fn key(&self) -> (usize, usize, usize, usize) {
        (self.state, self.lang, self.acc, self.structure)
    }

    fn play(&mut self, a: usize) -> ApiResult<usize> {
        let (t, out) = self.refuter.step(self.state, a);
        let x = out.ok_or_else(|| ApiError::internal("refuter state without output"))?;
        self.state = t;
        self.lang = self.language.succ(self.lang, x);
        self.acc = self.gamma.l_acc.succ(self.acc, a);
        self.structure = self.gamma.l_struct.succ(self.structure, a);
        self.annotations.push(a);
        self.letters.push(x);
        let now = self.letters.len();
        if let Some(&start) = self.seen.get(&self.key()) {
            self.cycle = Some(self.close(start)?);
        }
        self.seen.insert(self.key(), now);
        Ok(x)
    }

    fn close(&self, start: usize) -> ApiResult<Cycle> {
        let sigma = self.language.alphabet();
        let word = LassoWord::new(self.letters[..start].to_vec(), self.letters[start..].to_vec())?;
        let ann = LassoWord::new(self.annotations[..start].to_vec(), self.annotations[start..].to_vec())?;
        let word_in_language = self.language.accepts(&word)?;
        let annotations_accepting = self.gamma.accepts_annotation(&ann)?;
        let structural = self.gamma.structural(&ann)?;
        Ok(Cycle {
            start,
            length: self.letters.len() - start,
            word: word.format(sigma),
            annotations: ann.format(&self.gamma.annotations),
            word_in_language,
            annotations_accepting,
            structural,
            prover_loses: !structural || word_in_language != annotations_accepting,
        })
    }

    fn status(&self) -> LiveStatus {
        LiveStatus {
            rounds: self.letters.len(),
            word: self.language.alphabet().format_word(&self.letters),
            language_state: self.lang,
            language_marks: bits(self.language.marks(self.lang)),
            annotation_state: self.acc,
            annotation_marks: bits(self.gamma.l_acc.marks(self.acc)),
            cycle: self.cycle.clone(),
        }
    }

    fn view(&self) -> GameView {
        GameView {
            id: self.id.clone(),
            family: self.family.clone(),
            automaton: self.automaton.clone(),
            refuter: self.refuter_id.clone(),
            refuter_states: self.refuter.num_states(),
            certificate: self.certificate_id.clone(),
            certificate_text: self.certificate.clone(),
            annotation_alphabet: self.gamma.annotations.symbols().to_vec(),
            letter_alphabet: self.language.alphabet().symbols().to_vec(),
            transcript: self
                .annotations
                .iter()
                .zip(&self.letters)
                .map(|(&a, &x)| Round {
                    annotation: self.gamma.annotations.name(a).to_string(),
                    letter: self.language.alphabet().name(x).to_string(),
                })
                .collect(),
            status: self.status(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GameView {
    pub id: String,
    pub family: String,
    pub automaton: String,
    pub refuter: String,
    pub refuter_states: usize,
    pub certificate: Option<String>,
    pub certificate_text: Option<String>,
    pub annotation_alphabet: Vec<String>,
    pub letter_alphabet: Vec<String>,
    pub transcript: Vec<Round>,
    pub status: LiveStatus,
}

struct Inner {
    artifacts: ArtifactStore,
    automata: RwLock<HashMap<String, DetOmegaAutomaton>>,
    games: RwLock<HashMap<String, Arc<Slot<PlaySession>>>>,
    sessions: RwLock<HashMap<String, Arc<Slot<ApproximationSession>>>>,
    next_game: AtomicU64,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    /// Fresh state; artifacts are mirrored to `dir` when given.
    pub fn new(dir: Option<PathBuf>) -> Self {
        AppState(Arc::new(Inner {
            artifacts: ArtifactStore::new(dir),
            automata: RwLock::new(HashMap::new()),
            games: RwLock::new(HashMap::new()),
            sessions: RwLock::new(HashMap::new()),
            next_game: AtomicU64::new(1),
        }))
    }

    pub fn artifacts(&self) -> &ArtifactStore {
        &self.0.artifacts
    }

    /// Takes the write token of a session, as a request would; `None` if
    /// the session is unknown or already held.
    pub fn hold_session(&self, id: &str) -> Option<OwnedMutexGuard<()>> {
        let slot = self.0.sessions.read().unwrap().get(id).cloned()?;
        slot.writer.clone().try_lock_owned().ok()
    }

    fn store_automaton(&self, a: &DetOmegaAutomaton) -> ApiResult<String> {
        let id = self.0.artifacts.put(Kind::Automaton, emit(a))?;
        self.0.automata.write().unwrap().entry(id.clone()).or_insert_with(|| a.clone());
        Ok(id)
    }

    fn automaton(&self, id: &str) -> ApiResult<DetOmegaAutomaton> {
        self.0.automata.read().unwrap().get(id).cloned().ok_or_else(|| ApiError::not_found("automaton", id))
    }

    fn store_certificate(&self, c: &Certificate) -> ApiResult<String> {
        Ok(self.0.artifacts.put(Kind::Certificate, c.to_json())?)
    }

    fn store_refuter(&self, r: &RefuterTransducer) -> ApiResult<String> {
        let text = serde_json::to_string_pretty(r).map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(self.0.artifacts.put(Kind::Refuter, text)?)
    }

    fn game(&self, id: &str) -> ApiResult<Arc<Slot<PlaySession>>> {
        self.0.games.read().unwrap().get(id).cloned().ok_or_else(|| ApiError::not_found("game", id))
    }

    fn session(&self, id: &str) -> ApiResult<Arc<Slot<ApproximationSession>>> {
        self.0.sessions.read().unwrap().get(id).cloned().ok_or_else(|| ApiError::not_found("session", id))
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(e.to_string()))?
}

#[derive(Debug, Deserialize)]
pub struct UploadRequest {
    pub hoa: String,
}

#[derive(Debug, Serialize)]
pub struct UploadResponse {
    pub id: String,
    pub states: usize,
    pub alphabet: Vec<String>,
}

async fn upload(State(st): State<AppState>, Json(req): Json<UploadRequest>) -> ApiResult<(StatusCode, Json<UploadResponse>)> {
    let a = crate::cli::parse_text(&req.hoa).map_err(|e| ApiError::unprocessable(format!("{e:#}")))?;
    let id = st.store_automaton(&a)?;
    Ok((
        StatusCode::CREATED,
        Json(UploadResponse {
            id,
            states: a.num_states(),
            alphabet: a.alphabet().symbols().to_vec(),
        }),
    ))
}

#[derive(Debug, Deserialize)]
pub struct DecideRequest {
    /// one id to decide membership, two to decide separability
    pub automata: Vec<String>,
    pub family: String,
}

#[derive(Debug, Serialize)]
pub struct CertificateView {
    pub id: String,
    pub text: String,
    pub words: Vec<(String, String)>,
}

#[derive(Debug, Serialize)]
pub struct DecideResponse {
    pub decision: Decision,
    pub route: Route,
    pub stats: ArenaStats,
    pub automaton: Option<String>,
    pub refuter: Option<String>,
    pub certificate: Option<CertificateView>,
}

impl AppState {
    fn certificate_view(&self, c: &Certificate) -> ApiResult<CertificateView> {
        Ok(CertificateView {
            id: self.store_certificate(c)?,
            text: c.to_string(),
            words: c.named_words().into_iter().map(|(n, w)| (n, c.alphabet.format_word(w))).collect(),
        })
    }

    fn verdict_response(&self, v: &Verdict) -> ApiResult<DecideResponse> {
        Ok(DecideResponse {
            decision: v.decision,
            route: v.route,
            stats: v.stats,
            automaton: v.automaton().map(|a| self.store_automaton(a)).transpose()?,
            refuter: v.refuter().map(|r| self.store_refuter(r)).transpose()?,
            certificate: v.certificate().map(|c| self.certificate_view(c)).transpose()?,
        })
    }

    fn mode(&self, ids: &[String]) -> ApiResult<Mode> {
        match ids {
            [a] => Ok(Mode::recognize(self.automaton(a)?)),
            [a, b] => Ok(Mode::separate(self.automaton(a)?, self.automaton(b)?)),
            _ => Err(ApiError::unprocessable("expected one automaton id or a pair")),
        }
    }
}

async fn decide_handler(State(st): State<AppState>, Json(req): Json<DecideRequest>) -> ApiResult<Json<DecideResponse>> {
    let mode = st.mode(&req.automata)?;
    let g = make_gamma(&req.family)?;
    let v = blocking(move || Ok(decide(&mode, &g, &Options::default())?)).await?;
    Ok(Json(st.verdict_response(&v)?))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CertificateRef {
    Id(String),
    Inline(Certificate),
}

#[derive(Debug, Deserialize)]
pub struct VerifyRequest {
    pub certificate: CertificateRef,
    pub automata: Vec<String>,
}

async fn verify_handler(State(st): State<AppState>, Json(req): Json<VerifyRequest>) -> ApiResult<Json<Report>> {
    let c = match req.certificate {
        CertificateRef::Inline(c) => c,
        CertificateRef::Id(id) => {
            let art = st.artifacts().get(&id).filter(|a| a.kind == Kind::Certificate);
            let art = art.ok_or_else(|| ApiError::not_found("certificate", &id))?;
            Certificate::from_json(&art.content)?
        }
    };
    let mode = st.mode(&req.automata)?;
    let r = blocking(move || Ok(verify_certificate(&c, &mode)?)).await?;
    Ok(Json(r))
}

#[derive(Debug, Deserialize)]
pub struct GameRequest {
    pub automaton: String,
    pub family: String,
}

async fn create_game(State(st): State<AppState>, Json(req): Json<GameRequest>) -> ApiResult<(StatusCode, Json<GameView>)> {
    let language = st.automaton(&req.automaton)?;
    let gamma = make_gamma(&req.family)?;
    let (l, g) = (language.clone(), gamma.clone());
    let v = blocking(move || Ok(decide(&Mode::recognize(l), &g, &Options::default())?)).await?;
    let Some(refuter) = v.refuter().cloned() else {
        return Err(ApiError::unprocessable(format!("the language is in {}; there is no refuter to play", req.family)));
    };
    let certificate_id = v.certificate().map(|c| st.store_certificate(c)).transpose()?;
    let id = format!("game-{}", st.0.next_game.fetch_add(1, Ordering::Relaxed));
    let mut game = PlaySession {
        id: id.clone(),
        family: req.family,
        automaton: req.automaton,
        refuter_id: st.store_refuter(&refuter)?,
        certificate_id,
        certificate: v.certificate().map(|c| c.to_string()),
        state: refuter.initial,
        lang: language.initial(),
        acc: gamma.l_acc.initial(),
        structure: gamma.l_struct.initial(),
        gamma,
        language,
        refuter,
        annotations: Vec::new(),
        letters: Vec::new(),
        seen: HashMap::new(),
        cycle: None,
    };
    game.seen.insert(game.key(), 0);
    let view = game.view();
    st.0.games.write().unwrap().insert(id, Slot::new(game));
    Ok((StatusCode::CREATED, Json(view)))
}

#[derive(Debug, Deserialize)]
pub struct AnnotateRequest {
    pub annotation: String,
}

#[derive(Debug, Serialize)]
pub struct AnnotateResponse {
    pub letter: String,
    pub round: usize,
    pub status: LiveStatus,
}

async fn annotate(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<AnnotateRequest>,
) -> ApiResult<Json<AnnotateResponse>> {
    let slot = st.game(&id)?;
    let _token = slot.claim(&id)?;
    let mut game = slot.read();
    let a = game.gamma.annotations.index(req.annotation.trim()).ok_or_else(|| {
        ApiError::unprocessable(format!(
            "`{}` is not an annotation of {}; expected one of {}",
            req.annotation,
            game.family,
            game.gamma.annotations.symbols().join(", ")
        ))
    })?;
    let x = game.play(a)?;
    let resp = AnnotateResponse {
        letter: game.language.alphabet().name(x).to_string(),
        round: game.letters.len(),
        status: game.status(),
    };
    *slot.value.write().unwrap() = game;
    Ok(Json(resp))
}

async fn get_game(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<GameView>> {
    Ok(Json(st.game(&id)?.read().view()))
}

#[derive(Debug, Deserialize)]
pub struct SessionRequest {
    pub automaton: String,
    pub family: String,
    pub max_steps: Option<usize>,
    pub cap: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct PairView {
    pub l1: String,
    pub l1_states: usize,
    pub l2: String,
    pub l2_states: usize,
}

#[derive(Debug, Serialize)]
pub struct HistoryEntry {
    pub decision: Decision,
    pub certificate: Option<String>,
    pub choice: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SessionView {
    pub id: String,
    pub family: String,
    pub status: &'static str,
    pub steps: usize,
    pub max_steps: usize,
    pub pair: PairView,
    pub decision: Decision,
    pub certificate: Option<CertificateView>,
    pub refuter: Option<String>,
    pub candidates: Vec<Offer>,
    pub history: Vec<HistoryEntry>,
    pub separator: Option<String>,
}

impl AppState {
    fn session_view(&self, s: &ApproximationSession) -> ApiResult<SessionView> {
        let (l1, l2) = s.current();
        let last = s.last();
        let (status, separator) = match &s.status {
            Status::Running => ("running", None),
            Status::Exhausted => ("exhausted", None),
            Status::Separated { separator } => ("separated", Some(self.store_automaton(separator)?)),
        };
        Ok(SessionView {
            id: s.id.clone(),
            family: s.family.clone(),
            status,
            steps: s.steps_taken(),
            max_steps: s.max_steps,
            pair: PairView {
                l1: self.store_automaton(l1)?,
                l1_states: l1.num_states(),
                l2: self.store_automaton(l2)?,
                l2_states: l2.num_states(),
            },
            decision: last.verdict.decision,
            certificate: s.certificate().map(|c| self.certificate_view(c)).transpose()?,
            refuter: last.verdict.refuter().map(|r| self.store_refuter(r)).transpose()?,
            candidates: if s.status == Status::Running { s.candidates().to_vec() } else { Vec::new() },
            history: s
                .history
                .iter()
                .map(|h| HistoryEntry {
                    decision: h.verdict.decision,
                    certificate: h.verdict.certificate().map(|c| c.to_string()),
                    choice: h.choice.clone(),
                })
                .collect(),
            separator,
        })
    }
}

async fn create_session(
    State(st): State<AppState>,
    Json(req): Json<SessionRequest>,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let l = st.automaton(&req.automaton)?;
    let g = make_gamma(&req.family)?;
    let (steps, cap) = (req.max_steps.unwrap_or(DEFAULT_MAX_STEPS), req.cap.unwrap_or(DEFAULT_CAP));
    let s = blocking(move || Ok(approx_start_with(&l, &g, steps, cap)?)).await?;
    let view = st.session_view(&s)?;
    st.0.sessions.write().unwrap().insert(s.id.clone(), Slot::new(s));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let s = st.session(&id)?.read();
    Ok(Json(st.session_view(&s)?))
}

async fn export_session(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.session(&id)?.read();
    Ok(([(header::CONTENT_TYPE, "application/json")], s.to_json()).into_response())
}

#[derive(Debug, Deserialize)]
pub struct ChooseRequest {
    pub candidate: String,
}

async fn choose(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<ChooseRequest>,
) -> ApiResult<Json<SessionView>> {
    let slot = st.session(&id)?;
    let _token = slot.claim(&id)?;
    let s = slot.read();
    if s.status != Status::Running {
        return Err(ApiError::new(StatusCode::CONFLICT, format!("session `{id}` is no longer running")));
    }
    let name = s.resolve(&req.candidate)?;
    match s.candidates().iter().find(|o| o.name == name) {
        Some(o) if o.available => {}
        Some(o) => {
            return Err(ApiError::unprocessable(format!(
                "candidate {name} is unavailable: {}",
                o.error.as_deref().unwrap_or("no pair")
            )))
        }
        None => return Err(ApiError::unprocessable(format!("unknown candidate `{}`", req.candidate))),
    }
    let next = blocking(move || Ok(approx_step(s, &name)?)).await?;
    let view = st.session_view(&next)?;
    *slot.value.write().unwrap() = next;
    Ok(Json(view))
}

async fn artifact(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let a = st.artifacts().get(&id).ok_or_else(|| ApiError::not_found("artifact", &id))?;
    Ok(([(header::CONTENT_TYPE, a.kind.media_type())], a.content).into_response())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/automata", post(upload))
        .route("/decide", post(decide_handler))
        .route("/certificates/verify", post(verify_handler))
        .route("/games", post(create_game))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/annotate", post(annotate))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/choose", post(choose))
        .route("/sessions/{id}/export", get(export_session))
        .route("/artifacts/{id}", get(artifact))
        .with_state(state)
}
