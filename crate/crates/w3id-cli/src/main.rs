//! `w3id` — generate, split, verify, chain, and resolve W3IDs.
//!
//! Exit codes are a stable contract:
//!   0  success / verified
//!   1  clean verification failure (or resolver miss)
//!   2  I/O error
//!   3  malformed input
//!   4  service startup failure

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use w3id_core::{
    generate_chain, generate_from_reader, render_qr, split, validate_chain, CanonicalObject,
    EcLevel, MonotonicIssuer, QuadChain, Timestamp, ValidationPolicy,
};
use w3id_service::{ApiConfig, DEFAULT_MAX_BODY_BYTES};

const EXIT_VERIFY_FAILED: i32 = 1;
const EXIT_IO: i32 = 2;
const EXIT_MALFORMED: i32 = 3;
const EXIT_SERVE: i32 = 4;

#[derive(Parser)]
#[command(name = "w3id", version, about = "Timestamped SHA-256 content identifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a W3ID for a file (or stdin) and print the sidecar record.
    Gen {
        /// Input file; `-` or absent reads stdin.
        input: Option<PathBuf>,
        /// 20-digit timestamp override, for reproducible vectors only.
        #[arg(long)]
        timestamp: Option<String>,
        /// Also write a QR symbol here (PNG if the path ends in .png,
        /// ASCII art otherwise).
        #[arg(long)]
        qr: Option<PathBuf>,
        /// Output format: text | json
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Split a 64-character identifier into its public and private halves.
    Split { w3id: String },
    /// Verify a file against a public key and timestamp.
    Verify {
        /// Input file; `-` or absent reads stdin.
        input: Option<PathBuf>,
        #[arg(long = "public-key")]
        public_key: String,
        #[arg(long)]
        timestamp: String,
    },
    /// Generate a quadruple chain (four records, strictly increasing
    /// timestamps) over one object.
    QuadGen {
        input: Option<PathBuf>,
        /// Write the chain JSON here; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a chain file against an object.
    QuadVerify {
        /// Input file; `-` reads stdin.
        input: PathBuf,
        chain: PathBuf,
        /// Match policy: all | three
        #[arg(long, default_value = "all")]
        policy: String,
    },
    /// Render an existing identifier as a QR symbol.
    Qr {
        w3id: String,
        /// PNG if the path ends in .png, ASCII art otherwise; stdout when
        /// absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Error-correction level: L | M | Q | H
        #[arg(long, default_value = "M")]
        ec: String,
        /// Pixels per module for PNG output.
        #[arg(long, default_value_t = 8)]
        scale: u32,
    },
    /// Run the HTTP resolver service until interrupted.
    Serve {
        #[arg(long, env = "W3ID_LISTEN", default_value = "127.0.0.1:8817")]
        listen: String,
        #[arg(long, env = "W3ID_STORE")]
        store: PathBuf,
        #[arg(long, env = "W3ID_MAX_BODY", default_value_t = DEFAULT_MAX_BODY_BYTES)]
        max_body: usize,
    },
    /// Resolve a public key against a running service.
    Resolve {
        public_key: String,
        #[arg(long, env = "W3ID_SERVER")]
        server: String,
    },
    /// Upload a file to a running service; prints the one-time response
    /// that includes the private key.
    Register {
        input: Option<PathBuf>,
        #[arg(long, env = "W3ID_SERVER")]
        server: String,
        #[arg(long, default_value = "")]
        platform: String,
        #[arg(long = "location-uri", default_value = "")]
        location_uri: String,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_MALFORMED,
            };
            let _ = err.print();
            return code;
        }
    };

    let outcome = match cli.command {
        Command::Gen { input, timestamp, qr, format } => {
            cmd_gen(input.as_deref(), timestamp.as_deref(), qr.as_deref(), &format)
        }
        Command::Split { w3id } => cmd_split(&w3id),
        Command::Verify { input, public_key, timestamp } => {
            cmd_verify(input.as_deref(), &public_key, &timestamp)
        }
        Command::QuadGen { input, out } => cmd_quad_gen(input.as_deref(), out.as_deref()),
        Command::QuadVerify { input, chain, policy } => {
            cmd_quad_verify(Some(input.as_path()), &chain, &policy)
        }
        Command::Qr { w3id, out, ec, scale } => cmd_qr(&w3id, out.as_deref(), &ec, scale),
        Command::Serve { listen, store, max_body } => cmd_serve(&listen, &store, max_body),
        Command::Resolve { public_key, server } => cmd_resolve(&public_key, &server),
        Command::Register { input, server, platform, location_uri } => {
            cmd_register(input.as_deref(), &server, &platform, &location_uri)
        }
    };

    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

/// Open the input file, or stdin for `-`/absent.
fn open_input(path: Option<&Path>) -> Result<Box<dyn Read>, Failure> {
    match path {
        None => Ok(Box::new(std::io::stdin())),
        Some(p) if p.as_os_str() == "-" => Ok(Box::new(std::io::stdin())),
        Some(p) => {
            let file = std::fs::File::open(p)
                .map_err(|e| fail(EXIT_IO, format!("cannot read {}: {e}", p.display())))?;
            Ok(Box::new(std::io::BufReader::new(file)))
        }
    }
}

fn read_input_bytes(path: Option<&Path>) -> Result<Vec<u8>, Failure> {
    let mut reader = open_input(path)?;
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| fail(EXIT_IO, format!("read failed: {e}")))?;
    Ok(bytes)
}

fn is_lower_hex(s: &str, len: usize) -> bool {
    s.len() == len && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

fn cmd_gen(
    input: Option<&Path>,
    timestamp: Option<&str>,
    qr: Option<&Path>,
    format: &str,
) -> Result<i32, Failure> {
    if format != "text" && format != "json" {
        return Err(fail(EXIT_MALFORMED, format!("unknown format {format:?}, expected text or json")));
    }
    let ts = match timestamp {
        Some(raw) => Timestamp::parse(raw)
            .map_err(|e| fail(EXIT_MALFORMED, format!("invalid timestamp override: {e}")))?,
        None => MonotonicIssuer::system()
            .next()
            .map_err(|e| fail(EXIT_IO, format!("clock failure: {e}")))?,
    };

    let reader = open_input(input)?;
    let record = generate_from_reader(&ts, reader)
        .map_err(|e| fail(EXIT_IO, format!("read failed: {e}")))?;

    if format == "json" {
        println!("{}", record.to_json());
    } else {
        println!("w3id: {}", record.w3id);
        println!("timestamp: {}", record.timestamp);
    }

    if let Some(qr_path) = qr {
        write_qr(&record.w3id, qr_path, EcLevel::default(), 8)?;
    }
    Ok(0)
}

fn cmd_split(w3id: &str) -> Result<i32, Failure> {
    let keys = split(w3id).map_err(|e| fail(EXIT_MALFORMED, e.to_string()))?;
    println!("public: {}", keys.public_key());
    println!("private: {}", keys.private_key());
    Ok(0)
}

fn cmd_verify(input: Option<&Path>, public_key: &str, timestamp: &str) -> Result<i32, Failure> {
    if !is_lower_hex(public_key, 32) {
        return Err(fail(EXIT_MALFORMED, "public key must be 32 lowercase hex characters"));
    }
    let ts = Timestamp::parse(timestamp)
        .map_err(|e| fail(EXIT_MALFORMED, format!("invalid timestamp: {e}")))?;

    let reader = open_input(input)?;
    let record = generate_from_reader(&ts, reader)
        .map_err(|e| fail(EXIT_IO, format!("read failed: {e}")))?;
    let derived = split(&record.w3id).expect("generated identifiers are well-formed");

    if derived.public_key() == public_key {
        println!("verified");
        Ok(0)
    } else {
        println!("not verified");
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn cmd_quad_gen(input: Option<&Path>, out: Option<&Path>) -> Result<i32, Failure> {
    let obj = CanonicalObject::ingest(read_input_bytes(input)?);
    let issuer = MonotonicIssuer::system();
    let chain =
        generate_chain(&obj, &issuer).map_err(|e| fail(EXIT_IO, format!("clock failure: {e}")))?;

    match out {
        Some(path) => {
            std::fs::write(path, chain.to_json())
                .map_err(|e| fail(EXIT_IO, format!("cannot write {}: {e}", path.display())))?;
            for (i, record) in chain.records().iter().enumerate() {
                println!("record {}: {} @ {}", i + 1, record.w3id, record.timestamp);
            }
            println!("chain written to {}", path.display());
        }
        None => println!("{}", chain.to_json()),
    }
    Ok(0)
}

fn parse_policy(raw: &str) -> Result<ValidationPolicy, Failure> {
    match raw {
        "all" => Ok(ValidationPolicy::AllFour),
        "three" => Ok(ValidationPolicy::ThreeConsecutive),
        other => Err(fail(
            EXIT_MALFORMED,
            format!("unknown policy {other:?}, expected all or three"),
        )),
    }
}

fn cmd_quad_verify(input: Option<&Path>, chain_path: &Path, policy: &str) -> Result<i32, Failure> {
    let policy = parse_policy(policy)?;
    let obj = CanonicalObject::ingest(read_input_bytes(input)?);
    let raw = std::fs::read_to_string(chain_path)
        .map_err(|e| fail(EXIT_IO, format!("cannot read {}: {e}", chain_path.display())))?;
    let chain = QuadChain::from_json(&raw).map_err(|e| fail(EXIT_MALFORMED, e.to_string()))?;

    let report =
        validate_chain(&chain, &obj, policy).map_err(|e| fail(EXIT_MALFORMED, e.to_string()))?;

    for (i, matched) in report.per_record_match.iter().enumerate() {
        println!("record {}: {}", i + 1, if *matched { "match" } else { "MISMATCH" });
    }
    println!("causality: {}", if report.causality_ok { "ok" } else { "VIOLATED" });
    println!("policy: {}", report.policy);
    println!("accepted: {}", if report.accepted { "yes" } else { "no" });
    Ok(if report.accepted { 0 } else { EXIT_VERIFY_FAILED })
}

fn write_qr(w3id: &str, path: &Path, ec: EcLevel, scale: u32) -> Result<i32, Failure> {
    let symbol = render_qr(w3id, ec).map_err(|e| fail(EXIT_MALFORMED, e.to_string()))?;
    let is_png = path
        .extension()
        .map(|ext| ext.eq_ignore_ascii_case("png"))
        .unwrap_or(false);
    let bytes = if is_png { symbol.to_png(scale) } else { symbol.to_ascii().into_bytes() };
    std::fs::write(path, bytes)
        .map_err(|e| fail(EXIT_IO, format!("cannot write {}: {e}", path.display())))?;
    Ok(0)
}

fn cmd_qr(w3id: &str, out: Option<&Path>, ec: &str, scale: u32) -> Result<i32, Failure> {
    let ec: EcLevel = ec.parse().map_err(|e: w3id_core::W3idError| fail(EXIT_MALFORMED, e.to_string()))?;
    match out {
        Some(path) => write_qr(w3id, path, ec, scale),
        None => {
            let symbol = render_qr(w3id, ec).map_err(|e| fail(EXIT_MALFORMED, e.to_string()))?;
            print!("{}", symbol.to_ascii());
            Ok(0)
        }
    }
}

fn cmd_serve(listen: &str, store: &Path, max_body: usize) -> Result<i32, Failure> {
    let listener = w3id_service::bind(listen).map_err(|e| fail(EXIT_SERVE, e.to_string()))?;
    let addr = listener
        .local_addr()
        .map_err(|e| fail(EXIT_SERVE, format!("cannot resolve bound address: {e}")))?;
    // A closed stdout (e.g. piped to a reader that went away) must not
    // take the server down, so write errors are ignored here.
    let mut stdout = std::io::stdout();
    let _ = writeln!(stdout, "listening on {addr}");
    let _ = writeln!(stdout, "store: {}", store.display());
    let _ = stdout.flush();

    let config = ApiConfig {
        listen_address: listen.to_string(),
        store_path: store.to_path_buf(),
        max_body_bytes: max_body,
    };
    w3id_service::run_blocking(listener, &config.store_path, config.max_body_bytes)
        .map_err(|e| fail(EXIT_SERVE, e.to_string()))?;
    Ok(0)
}

fn http_agent() -> ureq::Agent {
    ureq::Agent::config_builder().http_status_as_error(false).build().into()
}

/// Map a service response to the exit-code contract: 2xx ok, 404 is a
/// clean miss, other 4xx mean the request was malformed, everything else
/// is a transport/server failure.
fn print_http_response(mut resp: ureq::http::Response<ureq::Body>) -> Result<i32, Failure> {
    let status = resp.status().as_u16();
    let body = resp
        .body_mut()
        .read_to_string()
        .map_err(|e| fail(EXIT_IO, format!("read response: {e}")))?;
    match status {
        200..=299 => {
            println!("{body}");
            Ok(0)
        }
        404 => {
            eprintln!("not found: {body}");
            Ok(EXIT_VERIFY_FAILED)
        }
        400..=499 => Err(fail(EXIT_MALFORMED, format!("rejected ({status}): {body}"))),
        _ => Err(fail(EXIT_IO, format!("server error ({status}): {body}"))),
    }
}

fn cmd_resolve(public_key: &str, server: &str) -> Result<i32, Failure> {
    let url = format!("{}/v1/ids/{}", server.trim_end_matches('/'), public_key);
    let resp = http_agent()
        .get(&url)
        .call()
        .map_err(|e| fail(EXIT_IO, format!("request failed: {e}")))?;
    print_http_response(resp)
}

fn cmd_register(
    input: Option<&Path>,
    server: &str,
    platform: &str,
    location_uri: &str,
) -> Result<i32, Failure> {
    let bytes = read_input_bytes(input)?;
    let url = format!("{}/v1/ids", server.trim_end_matches('/'));
    let mut request = http_agent().post(&url);
    if !platform.is_empty() {
        request = request.header("X-Platform", platform);
    }
    if !location_uri.is_empty() {
        request = request.header("X-Location-URI", location_uri);
    }
    let resp = request
        .send(&bytes[..])
        .map_err(|e| fail(EXIT_IO, format!("request failed: {e}")))?;
    print_http_response(resp)
}
