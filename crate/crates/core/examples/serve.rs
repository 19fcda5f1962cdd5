//! Serve the toy baseline over HTTP on an ephemeral port, call each endpoint
//! once, then shut down.

use std::path::Path;
use std::sync::Arc;

use policy_lab::interface::service::{self, ServiceState};
use policy_lab::projection::{load_baseline, Vocabulary};
use tokio::io::{AsyncReadExt, AsyncWriteExt};

async fn request(addr: std::net::SocketAddr, method: &str, path: &str, body: &str) -> std::io::Result<String> {
    let mut stream = tokio::net::TcpStream::connect(addr).await?;
    let head = format!(
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    );
    stream.write_all(head.as_bytes()).await?;
    stream.write_all(body.as_bytes()).await?;
    let mut response = String::new();
    stream.read_to_string(&mut response).await?;
    Ok(response)
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let vocab = Arc::new(Vocabulary::from_json(&std::fs::read_to_string(dir.join("vocabulary.json"))?)?);
    let baseline = load_baseline(&std::fs::read_to_string(dir.join("baseline.csv"))?, vocab)?;
    let app = service::router(Arc::new(ServiceState::new("toy", baseline)), None);

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    tokio::spawn(async move { axum::serve(listener, app).await });

    let check = r#"{"script": "out.china.bogusMT = 1;"}"#;
    let simulate = format!(
        r#"{{"baseline_id": "toy", "scenario": {}}}"#,
        std::fs::read_to_string(dir.join("recycling_push.json"))?
    );
    for (method, path, body) in [
        ("GET", "/health", ""),
        ("GET", "/api/vocabulary", ""),
        ("POST", "/api/check", check),
        ("POST", "/api/simulate", simulate.as_str()),
    ] {
        let response = request(addr, method, path, body).await?;
        let status = response.lines().next().unwrap_or_default();
        let body = response.split("\r\n\r\n").nth(1).unwrap_or_default();
        println!("{method} {path}: {status}\n  {}", &body[..body.len().min(160)]);
    }
    Ok(())
}
