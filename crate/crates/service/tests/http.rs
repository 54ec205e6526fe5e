use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use setsquare::game::GameState;
use setsquare::MagicSquare;
use setsquare_service::api::{router, AppState};
use tower::ServiceExt;

const EXAMPLE_SQUARE: [&str; 9] = ["1111", "0101", "2121", "1010", "0000", "2020", "1212", "0202", "2222"];

fn app() -> Router {
    router(AppState::new(Duration::from_secs(600)))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

fn cards(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect()
}

/// The response state must match a replay of its own transcript.
fn assert_consistent(game: &Value) {
    let state = &game["state"];
    let replay = GameState::from_transcript(state["transcript"].as_str().unwrap()).unwrap();
    assert_eq!(replay.transcript(), state["transcript"]);
    let moves: Vec<String> = replay.moves().iter().map(|c| c.to_string()).collect();
    assert_eq!(cards(&state["moves"]), moves);
    let pool: MagicSquare = replay.pool().to_string().parse().unwrap();
    let cells: Vec<String> = game["square"]["cells"].as_array().unwrap().iter().flat_map(cards).collect();
    assert_eq!(cells.join(" "), pool.to_string());
}

#[tokio::test]
async fn classify_reports_the_profile() {
    let (status, body) = call(&app(), Method::POST, "/classify", Some(json!({ "cells": EXAMPLE_SQUARE }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["order"], 4);
    assert_eq!(body["type"], "(2-2;4-4)");
    assert_eq!(body["diversity"], "3");
    assert_eq!(body["rcDiversity"], "2");
    assert_eq!(body["familyOrders"], json!({ "rows": 2, "cols": 2, "diag": 4, "anti": 4 }));
}

#[tokio::test]
async fn classify_rejects_bad_input() {
    let app = app();
    let mut cells = EXAMPLE_SQUARE.to_vec();
    cells.swap(0, 1);
    let (status, body) = call(&app, Method::POST, "/classify", Some(json!({ "cells": cells }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "not_magic");
    assert!(!body["error"]["violations"]["failing_lines"].as_array().unwrap().is_empty());

    cells[0] = "9999";
    let (status, body) = call(&app, Method::POST, "/classify", Some(json!({ "cells": cells }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "malformed_card");

    let (status, body) = call(&app, Method::POST, "/classify", Some(json!({ "cells": 3 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "bad_request");
}

#[tokio::test]
async fn engine_first_wins_within_four_picks() {
    let app = app();
    for seed in 0..20u64 {
        let (status, game) =
            call(&app, Method::POST, "/games", Some(json!({ "firstPlayer": "engine", "seed": seed }))).await;
        assert_eq!(status, StatusCode::CREATED);
        assert_eq!(cards(&game["engineMoves"]).len(), 1);
        let id = game["gameId"].as_str().unwrap().to_string();
        let mut game = game;
        let mut turn = seed as usize;
        while game["state"]["status"] == "in_progress" {
            assert_consistent(&game);
            let legal = cards(&game["state"]["legalMoves"]);
            turn = turn * 5 + 1;
            let card = &legal[turn % legal.len()];
            let (status, next) =
                call(&app, Method::POST, &format!("/games/{id}/moves"), Some(json!({ "card": card }))).await;
            assert_eq!(status, StatusCode::OK, "{next}");
            game = next;
        }
        assert_consistent(&game);
        let winner = &game["state"]["winner"];
        assert_eq!(winner["side"], "engine");
        assert_eq!(winner["player"], "first");
        assert!(winner["picks"].as_u64().unwrap() <= 4);
        let line: Vec<setsquare::Card> = cards(&winner["line"]).iter().map(|c| c.parse().unwrap()).collect();
        assert!(setsquare::card::is_set(line[0], line[1], line[2]));
        assert_eq!(winner["order"], setsquare::card::set_order([line[0], line[1], line[2]]).unwrap());

        let (status, body) =
            call(&app, Method::POST, &format!("/games/{id}/moves"), Some(json!({ "card": line[0].to_string() }))).await;
        assert_eq!(status, StatusCode::CONFLICT);
        assert_eq!(body["error"]["code"], "game_over");
    }
}

#[tokio::test]
async fn requested_type_is_honoured() {
    let app = app();
    let body = json!({ "firstPlayer": "human", "squareType": "(2-2;4-4)", "seed": 9 });
    let (status, game) = call(&app, Method::POST, "/games", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(game["square"]["profile"]["type"], "(2-2;4-4)");
    assert_eq!(game["state"]["toMove"], "first");
    assert!(cards(&game["engineMoves"]).is_empty());

    let body = json!({ "firstPlayer": "human", "squareType": "(1-1;1-1)" });
    let (status, err) = call(&app, Method::POST, "/games", Some(body)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "unknown_type");
}

#[tokio::test]
async fn claimed_cards_and_unknown_games_are_rejected() {
    let app = app();
    let (_, game) = call(&app, Method::POST, "/games", Some(json!({ "firstPlayer": "engine", "seed": 4 }))).await;
    let id = game["gameId"].as_str().unwrap();
    let taken = cards(&game["engineMoves"])[0].clone();
    let uri = format!("/games/{id}/moves");
    let (status, body) = call(&app, Method::POST, &uri, Some(json!({ "card": taken }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"]["code"], "illegal_move");

    let (status, body) = call(&app, Method::POST, &uri, Some(json!({ "card": "9999" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "malformed_card");

    let (_, after) = call(&app, Method::GET, &format!("/games/{id}"), None).await;
    assert_eq!(after["state"]["transcript"], game["state"]["transcript"]);

    for uri in ["/games/not-a-game", "/games/00000000-0000-0000-0000-000000000000"] {
        let (status, body) = call(&app, Method::GET, uri, None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(body["error"]["code"], "unknown_game");
    }
}

#[tokio::test]
async fn games_against_a_second_player_engine_end_with_a_winner() {
    let app = app();
    for seed in 0..10u64 {
        let (_, mut game) =
            call(&app, Method::POST, "/games", Some(json!({ "firstPlayer": "human", "seed": seed }))).await;
        let id = game["gameId"].as_str().unwrap().to_string();
        let mut turn = seed as usize;
        while game["state"]["status"] == "in_progress" {
            let legal = cards(&game["state"]["legalMoves"]);
            turn = turn * 3 + 2;
            let card = &legal[turn % legal.len()];
            let (status, next) =
                call(&app, Method::POST, &format!("/games/{id}/moves"), Some(json!({ "card": card }))).await;
            assert_eq!(status, StatusCode::OK);
            game = next;
        }
        assert_consistent(&game);
        assert_eq!(game["state"]["status"], "won");
    }
}

#[tokio::test]
async fn interleaved_sessions_stay_isolated() {
    let app = app();
    let mut games = Vec::new();
    for seed in [1u64, 1, 2] {
        let (_, game) = call(&app, Method::POST, "/games", Some(json!({ "firstPlayer": "human", "seed": seed }))).await;
        games.push(game);
    }
    let ids: Vec<String> = games.iter().map(|g| g["gameId"].as_str().unwrap().to_string()).collect();
    assert_ne!(ids[0], ids[1]);
    let first_legal = cards(&games[0]["state"]["legalMoves"]);
    let (_, a) =
        call(&app, Method::POST, &format!("/games/{}/moves", ids[0]), Some(json!({ "card": first_legal[0] }))).await;
    let (_, b) =
        call(&app, Method::POST, &format!("/games/{}/moves", ids[1]), Some(json!({ "card": first_legal[8] }))).await;
    assert_ne!(a["state"]["transcript"], b["state"]["transcript"]);
    let (_, a_again) = call(&app, Method::GET, &format!("/games/{}", ids[0]), None).await;
    assert_eq!(a_again["state"]["transcript"], a["state"]["transcript"]);
    let (_, c) = call(&app, Method::GET, &format!("/games/{}", ids[2]), None).await;
    assert!(cards(&c["state"]["moves"]).is_empty());
}

#[tokio::test]
async fn random_squares_follow_the_query() {
    let app = app();
    let (status, a) = call(&app, Method::GET, "/squares/random?type=(3-3;3-3)&seed=1", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(a["square"]["profile"]["type"], "(3-3;3-3)");
    assert_eq!(a["seed"], 1);
    let (_, b) = call(&app, Method::GET, "/squares/random?type=%283-3%3B3-3%29&seed=1", None).await;
    assert_eq!(a, b);
    let (_, c) = call(&app, Method::GET, "/squares/random?order=2&seed=5", None).await;
    assert_eq!(c["square"]["profile"]["order"], 2);

    let (status, err) = call(&app, Method::GET, "/squares/random?type=(3-3;3-3)&order=2", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "inconsistent_request");
    let (status, err) = call(&app, Method::GET, "/squares/random?seed=abc", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "bad_request");
}

#[tokio::test]
async fn census_is_served_and_cached() {
    let app = app();
    let (status, report) = call(&app, Method::GET, "/census", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(report["totalSquares"], 505440);
    assert_eq!(report["byType"].as_object().unwrap().len(), 21);
    assert_eq!(report["byType"]["(3-3;3-3)"], 31104);
    let (_, again) = call(&app, Method::GET, "/census", None).await;
    assert_eq!(report, again);
}
