use std::net::SocketAddr;
use std::path::PathBuf;

use clap::Parser;
use qxsim_service::{router, ServiceConfig};

#[derive(Parser)]
#[command(name = "qxsim-service", version, about = "HTTP run service for qxsim")]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Directory of `<name>.toml` backend files.
    #[arg(long, env = "QX_BACKEND_DIR")]
    backend_dir: Option<PathBuf>,
    /// Browser origin allowed by CORS. Any origin when omitted.
    #[arg(long)]
    cors_origin: Option<String>,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    env_logger::init();
    let args = Args::parse();
    let app = router(ServiceConfig {
        backend_dir: args.backend_dir,
        cors_origin: args.cors_origin,
    });
    let listener = tokio::net::TcpListener::bind(args.addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await
}
