use std::env;
use std::net::SocketAddr;

use catsd_service::{router, AppState, Config};

fn var<T: std::str::FromStr>(name: &str, default: T) -> T {
    match env::var(name) {
        Ok(v) => v.parse().unwrap_or_else(|_| {
            eprintln!("error: cannot parse {name}={v}");
            std::process::exit(2);
        }),
        Err(_) => default,
    }
}

#[tokio::main]
async fn main() {
    let addr: SocketAddr = var("CATSD_SERVICE_ADDR", SocketAddr::from(([127, 0, 0, 1], 8080)));
    let mut config = Config::new(var("CATSD_DATA_DIR", String::from("catsd-data")));
    config.token = env::var("CATSD_TOKEN").ok().filter(|t| !t.is_empty());
    config.workers = var("CATSD_WORKERS", config.workers);
    config.whatif_samples = var("CATSD_WHATIF_SAMPLES", config.whatif_samples);

    let state = match AppState::open(config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: data directory: {e}");
            std::process::exit(1);
        }
    };
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: bind {addr}: {e}");
            std::process::exit(1);
        }
    };
    eprintln!("listening on {addr}");
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    if let Err(e) = axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
