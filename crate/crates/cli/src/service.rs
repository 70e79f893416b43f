//! Newline-delimited JSON request/response service.
//!
//! Request: `{"id": 1, "method": "classify", "params": {"poly": "1:0,0:0,-1:0"}}`.
//! Response: `{"id": 1, "result": {...}}` or `{"id": 1, "error": {"kind": ..., "message": ...}}`.
//! Results are the same records the command line prints, as JSON objects.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, ToSocketAddrs};

use serde_json::{json, Value as Json};
use skizze_core::deform::{DeformSession, WallOptions, DEFAULT_SAMPLES, DEFAULT_TOL_T};
use skizze_core::graph::CanonicalCode;
use skizze_core::poly::DEFAULT_ROOT_TOL;
use skizze_core::poset::Poset;
use skizze_core::{Error, Result};

use crate::commands::{self, PathSpec, POSET_CAP, TRACE_CAP};
use crate::record::Record;

/// Per-connection state: deformation sessions and posets built so far.
#[derive(Default)]
pub struct Service {
    sessions: BTreeMap<u64, DeformSession>,
    next_session: u64,
    posets: BTreeMap<usize, Poset>,
}

fn method_error(kind: &str, message: String) -> Json {
    json!({ "kind": kind, "message": message })
}

fn str_param<'a>(params: &'a Json, key: &str) -> Result<&'a str> {
    params
        .get(key)
        .and_then(Json::as_str)
        .ok_or_else(|| Error::InvalidArgument(format!("missing string parameter '{key}'")))
}

fn num_param(params: &Json, key: &str) -> Result<Option<f64>> {
    match params.get(key) {
        None | Some(Json::Null) => Ok(None),
        Some(Json::Number(n)) => Ok(n.as_f64()),
        Some(Json::String(s)) => s
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidArgument(format!("parameter '{key}' is not a number"))),
        Some(_) => Err(Error::InvalidArgument(format!("parameter '{key}' is not a number"))),
    }
}

fn usize_param(params: &Json, key: &str) -> Result<Option<usize>> {
    match num_param(params, key)? {
        Some(x) if x >= 0.0 && x.fract() == 0.0 => Ok(Some(x as usize)),
        Some(_) => Err(Error::InvalidArgument(format!("parameter '{key}' must be a non-negative integer"))),
        None => Ok(None),
    }
}

impl Service {
    pub fn new() -> Self {
        Self::default()
    }

    /// Handles one request line and returns the response line (without newline).
    pub fn handle_line(&mut self, line: &str) -> String {
        let req: Json = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => {
                return json!({ "id": null, "error": method_error("parse", e.to_string()) }).to_string();
            }
        };
        let id = req.get("id").cloned().unwrap_or(Json::Null);
        let Some(method) = req.get("method").and_then(Json::as_str) else {
            return json!({ "id": id, "error": method_error("invalid-request", "missing method".into()) })
                .to_string();
        };
        let params = req.get("params").cloned().unwrap_or_else(|| json!({}));
        match self.dispatch(method, &params) {
            Ok(Some(r)) => json!({ "id": id, "result": r.to_json() }).to_string(),
            Ok(None) => json!({
                "id": id,
                "error": method_error("unknown-method", format!("no method named {method:?}"))
            })
            .to_string(),
            Err(e) => json!({ "id": id, "error": method_error(e.kind(), e.to_string()) }).to_string(),
        }
    }

    fn poset(&mut self, n: usize) -> Result<&Poset> {
        if !self.posets.contains_key(&n) {
            self.posets.insert(n, commands::build_poset(n, POSET_CAP)?);
        }
        Ok(&self.posets[&n])
    }

    fn dispatch(&mut self, method: &str, params: &Json) -> Result<Option<Record>> {
        let cap = usize_param(params, "cap")?;
        let r = match method {
            "roots" => {
                let p = commands::parse_poly(str_param(params, "poly")?)?;
                commands::roots(&p, num_param(params, "tol")?.unwrap_or(DEFAULT_ROOT_TOL))?
            }
            "classify" => {
                let p = commands::parse_poly(str_param(params, "poly")?)?;
                commands::classify_poly(&p, cap.unwrap_or(TRACE_CAP))?
            }
            "trace" => {
                let p = commands::parse_poly(str_param(params, "poly")?)?;
                commands::trace_poly(&p, cap.unwrap_or(TRACE_CAP))?
            }
            "frobenius" => commands::frobenius(&commands::parse_poly(str_param(params, "poly")?)?)?,
            "enumerate" => {
                let n = usize_param(params, "n")?.ok_or_else(|| Error::InvalidArgument("missing 'n'".into()))?;
                commands::enumerate(n, cap.unwrap_or(POSET_CAP))?
            }
            "poset.neighbors" => {
                let code = CanonicalCode(str_param(params, "code")?.to_owned());
                let n = code.n()?;
                commands::check_cap(n, cap.unwrap_or(POSET_CAP))?;
                commands::neighbors(self.poset(n)?, &code)?
            }
            "deform.start" => {
                let spec = PathSpec::parse(
                    str_param(params, "path")?,
                    params.get("mode").and_then(Json::as_str).unwrap_or("coeff"),
                    usize_param(params, "samples")?.unwrap_or(DEFAULT_SAMPLES),
                )?;
                commands::check_cap(spec.p0.degree(), cap.unwrap_or(TRACE_CAP))?;
                let opts = WallOptions {
                    tol_t: num_param(params, "tol")?.unwrap_or(DEFAULT_TOL_T),
                    samples: spec.samples,
                    ..WallOptions::default()
                };
                let session = DeformSession::start_with(spec.path()?, &opts)?;
                let id = self.next_session;
                self.next_session += 1;
                let r = Record::new()
                    .scalar("session", id)
                    .scalar("t", session.t)
                    .scalar("code", &session.code);
                self.sessions.insert(id, session);
                r
            }
            "deform.step" => {
                let id = usize_param(params, "session")?
                    .ok_or_else(|| Error::InvalidArgument("missing 'session'".into()))? as u64;
                let dt = num_param(params, "dt")?.ok_or_else(|| Error::InvalidArgument("missing 'dt'".into()))?;
                let session = self
                    .sessions
                    .get_mut(&id)
                    .ok_or_else(|| Error::InvalidArgument(format!("no session {id}")))?;
                commands::step_record(&session.step(dt)?)
            }
            _ => return Ok(None),
        };
        Ok(Some(r))
    }

    /// Serves requests from `input` until end of stream.
    pub fn run<R: BufRead, W: Write>(&mut self, input: R, mut output: W) -> std::io::Result<()> {
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            writeln!(output, "{}", self.handle_line(&line))?;
            output.flush()?;
        }
        Ok(())
    }
}

/// Accepts connections on `addr`, one thread and one [`Service`] per connection.
/// `on_bound` receives the bound address (useful with port 0).
pub fn serve_tcp(addr: impl ToSocketAddrs, on_bound: impl FnOnce(std::net::SocketAddr)) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr)?;
    on_bound(listener.local_addr()?);
    for stream in listener.incoming() {
        let stream = stream?;
        std::thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(s) => BufReader::new(s),
                Err(_) => return,
            };
            let _ = Service::new().run(reader, stream);
        });
    }
    Ok(())
}
