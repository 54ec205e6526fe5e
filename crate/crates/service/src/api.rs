//! HTTP interface: game sessions, classification, generation and the census.

use std::net::SocketAddr;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use setsquare::census::{classify_census, CensusReport};
use setsquare::game::{GameState, Player, Status};
use setsquare::square::{ProfileDocument, SquareDocument};
use setsquare::{Card, MagicSquare, SquareType};

use crate::error::{Result, ServiceError};
use crate::generate::{generate, GenerationRequest};
use crate::session::{Session, SessionStore};

#[derive(Clone)]
pub struct AppState {
    pub sessions: Arc<SessionStore>,
    census: Arc<OnceLock<CensusReport>>,
}

impl AppState {
    pub fn new(idle_timeout: Duration) -> AppState {
        AppState { sessions: Arc::new(SessionStore::new(idle_timeout)), census: Arc::new(OnceLock::new()) }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self.code() {
            "unknown_game" => StatusCode::NOT_FOUND,
            "illegal_move" | "wrong_turn" | "game_over" => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        let mut error = json!({ "code": self.code(), "message": self.to_string() });
        if let Some(report) = self.violations() {
            error["violations"] = json!(report);
        }
        (status, Json(json!({ "error": error }))).into_response()
    }
}

fn body<T>(payload: std::result::Result<Json<T>, JsonRejection>) -> Result<T> {
    payload.map(|Json(t)| t).map_err(|e| ServiceError::BadRequest(e.body_text()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Human,
    Engine,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WinView {
    pub player: Player,
    pub side: Side,
    pub line: [Card; 3],
    pub order: u8,
    pub picks: usize,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StateView {
    pub status: &'static str,
    pub to_move: Option<Player>,
    pub human: Player,
    pub engine: Player,
    pub claimed_by_first: Vec<Card>,
    pub claimed_by_second: Vec<Card>,
    pub moves: Vec<Card>,
    pub legal_moves: Vec<Card>,
    pub transcript: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winner: Option<WinView>,
}

impl StateView {
    fn of(session: &Session) -> StateView {
        let state: &GameState = &session.state;
        let winner = match state.status() {
            Status::InProgress => None,
            Status::Won { player, line } => Some(WinView {
                player,
                side: if player == session.engine { Side::Engine } else { Side::Human },
                line: line.cards(),
                order: line.order(),
                picks: state.picks(player),
            }),
        };
        StateView {
            status: if winner.is_some() { "won" } else { "in_progress" },
            to_move: (!state.is_over()).then(|| state.to_move()),
            human: session.human(),
            engine: session.engine,
            claimed_by_first: state.claimed_by(Player::First),
            claimed_by_second: state.claimed_by(Player::Second),
            moves: state.moves().to_vec(),
            legal_moves: state.legal_moves(),
            transcript: state.transcript(),
            winner,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GameView {
    pub game_id: String,
    pub square: SquareDocument,
    pub state: StateView,
    pub engine_moves: Vec<Card>,
}

fn game_view(id: &str, session: &Session, engine_moves: Vec<Card>) -> GameView {
    GameView {
        game_id: id.to_string(),
        square: session.state.pool().to_document(true),
        state: StateView::of(session),
        engine_moves,
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewGame {
    pub first_player: Side,
    pub square_type: Option<String>,
    pub seed: Option<u64>,
}

fn parse_type(text: Option<&str>) -> Result<Option<SquareType>> {
    Ok(text.map(str::parse).transpose()?)
}

async fn new_game(
    State(app): State<AppState>,
    payload: std::result::Result<Json<NewGame>, JsonRejection>,
) -> Result<(StatusCode, Json<GameView>)> {
    let req = body(payload)?;
    let gen = GenerationRequest { square_type: parse_type(req.square_type.as_deref())?, order: None, seed: req.seed };
    let (pool, _) = generate(&gen)?;
    let engine = match req.first_player {
        Side::Engine => Player::First,
        Side::Human => Player::Second,
    };
    let mut session = Session::new(pool, engine);
    let opening = session.engine_reply()?;
    let id = app.sessions.insert(session).to_string();
    let view = app.sessions.with(&id, |s| Ok(game_view(&id, s, opening)))?;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_game(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<GameView>> {
    app.sessions.with(&id, |s| Ok(Json(game_view(&id, s, Vec::new()))))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub card: String,
}

async fn play_move(
    State(app): State<AppState>,
    Path(id): Path<String>,
    payload: std::result::Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Json<GameView>> {
    let req = body(payload);
    app.sessions.with(&id, |s| {
        let card: Card = req?.card.parse()?;
        let replies = s.human_move(card)?;
        Ok(Json(game_view(&id, s, replies)))
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyRequest {
    pub cells: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ClassifyView {
    #[serde(flatten)]
    pub profile: ProfileDocument,
    pub cells: [[Card; 3]; 3],
}

async fn classify(payload: std::result::Result<Json<ClassifyRequest>, JsonRejection>) -> Result<Json<ClassifyView>> {
    let req = body(payload)?;
    let cards: Vec<Card> = req.cells.iter().map(|c| c.parse()).collect::<setsquare::Result<_>>()?;
    let sq = MagicSquare::from_row_major(&cards)?;
    Ok(Json(ClassifyView { profile: ProfileDocument::from(&sq.profile()), cells: sq.cells() }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomParams {
    #[serde(rename = "type")]
    pub square_type: Option<String>,
    pub order: Option<u8>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct RandomView {
    pub seed: u64,
    pub square: SquareDocument,
}

async fn random_square(params: std::result::Result<Query<RandomParams>, QueryRejection>) -> Result<Json<RandomView>> {
    let Query(params) = params.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
    let square_type = parse_type(params.square_type.as_deref().filter(|t| !t.is_empty()))?;
    let req = GenerationRequest { square_type, order: params.order, seed: params.seed };
    let (sq, seed) = generate(&req)?;
    Ok(Json(RandomView { seed, square: sq.to_document(true) }))
}

async fn census(State(app): State<AppState>) -> Response {
    let cache = app.census.clone();
    let computed = tokio::task::spawn_blocking(move || {
        serde_json::to_value(cache.get_or_init(classify_census)).expect("report serializes")
    })
    .await;
    match computed {
        Ok(report) => Json(report).into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({ "error": { "code": "internal", "message": e.to_string() } })))
            .into_response(),
    }
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/games", post(new_game))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/moves", post(play_move))
        .route("/classify", post(classify))
        .route("/squares/random", get(random_square))
        .route("/census", get(census))
        .with_state(app)
}

/// Serves until the process is stopped, purging idle sessions once a minute.
pub async fn serve(addr: SocketAddr, idle_timeout: Duration) -> std::io::Result<()> {
    let app = AppState::new(idle_timeout);
    let sessions = app.sessions.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(idle_timeout.clamp(Duration::from_secs(1), Duration::from_secs(60)));
        loop {
            tick.tick().await;
            sessions.purge(Instant::now());
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(app)).await
}
