//! Line-delimited JSON protocol for black-boxes living in another process.
//!
//! ```text
//! -> {"hello": "motif-shap/1"}
//! <- {"ready": true}
//! -> {"id": 0, "n": 5, "edges": [[0, 1, 1.0], [1, 2, 0.25]]}
//! <- {"id": 0, "p": 0.73}
//! ```
//!
//! One request is in flight per connection and replies must arrive in request
//! order.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::BlackBox;

pub const HANDSHAKE: &str = "motif-shap/1";

#[derive(Serialize, Deserialize)]
struct Request {
    id: u64,
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Deserialize)]
struct Response {
    id: u64,
    p: Option<f64>,
    error: Option<String>,
}

struct Connection {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    next_id: u64,
}

impl Connection {
    fn send(&mut self, line: &str) -> Result<()> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| Error::Transport("connection closed".into()))?;
        stdin
            .write_all(line.as_bytes())
            .and_then(|_| stdin.write_all(b"\n"))
            .and_then(|_| stdin.flush())
            .map_err(|e| Error::Transport(format!("write to black-box failed: {e}")))
    }

    fn receive(&mut self, timeout: Duration) -> Result<String> {
        match self.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(Error::Transport(format!("read from black-box failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(Error::Transport(format!(
                "black-box did not reply within {timeout:?}"
            ))),
            Err(RecvTimeoutError::Disconnected) => {
                let status = self
                    .child
                    .try_wait()
                    .ok()
                    .flatten()
                    .map_or("still running".to_string(), |s| s.to_string());
                Err(Error::Transport(format!(
                    "black-box closed its output ({status})"
                )))
            }
        }
    }
}

/// Client side of the protocol: a child process queried over its standard
/// input and output.
pub struct ExternalBlackBox {
    conn: Mutex<Connection>,
    timeout: Duration,
}

impl ExternalBlackBox {
    pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

    /// Spawns `program args..` and performs the handshake.
    pub fn spawn(program: &str, args: &[String], timeout: Duration) -> Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Transport(format!("cannot start {program:?}: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let bb = ExternalBlackBox {
            conn: Mutex::new(Connection {
                child,
                stdin,
                lines: rx,
                next_id: 0,
            }),
            timeout,
        };
        bb.handshake()?;
        Ok(bb)
    }

    /// Spawns a whitespace-separated command line.
    pub fn from_command_line(command: &str, timeout: Duration) -> Result<Self> {
        let mut parts = command.split_whitespace().map(str::to_string);
        let program = parts
            .next()
            .ok_or_else(|| Error::Config("empty black-box command".into()))?;
        let args: Vec<String> = parts.collect();
        Self::spawn(&program, &args, timeout)
    }

    fn handshake(&self) -> Result<()> {
        let mut conn = self.conn.lock().expect("connection lock");
        conn.send(&json!({ "hello": HANDSHAKE }).to_string())?;
        let reply = conn.receive(self.timeout)?;
        let value: serde_json::Value = serde_json::from_str(&reply)
            .map_err(|e| Error::Transport(format!("malformed handshake reply {reply:?}: {e}")))?;
        if value.get("ready") != Some(&serde_json::Value::Bool(true)) {
            return Err(Error::Transport(format!("black-box refused handshake: {reply}")));
        }
        Ok(())
    }
}

impl BlackBox for ExternalBlackBox {
    fn evaluate(&self, g: &Graph) -> Result<f64> {
        let mut conn = self.conn.lock().map_err(|_| {
            Error::Transport("connection poisoned by an earlier failure".into())
        })?;
        let id = conn.next_id;
        conn.next_id += 1;
        let request = Request {
            id,
            n: g.n(),
            edges: g.weighted_edges().map(|(e, w)| (e.u(), e.v(), w)).collect(),
        };
        conn.send(&serde_json::to_string(&request).expect("request serialization"))?;
        let reply = conn.receive(self.timeout)?;
        let response: Response = serde_json::from_str(&reply)
            .map_err(|e| Error::Transport(format!("malformed reply {reply:?}: {e}")))?;
        if response.id != id {
            return Err(Error::Transport(format!(
                "reply id {} does not match request id {id}",
                response.id
            )));
        }
        if let Some(err) = response.error {
            return Err(Error::Transport(format!("black-box error: {err}")));
        }
        match response.p {
            Some(p) if (0.0..=1.0).contains(&p) => Ok(p),
            Some(p) => Err(Error::Transport(format!("probability {p} outside [0, 1]"))),
            None => Err(Error::Transport(format!("reply {reply:?} carries no probability"))),
        }
    }
}

impl Drop for ExternalBlackBox {
    fn drop(&mut self) {
        let Ok(conn) = self.conn.get_mut() else {
            return;
        };
        // Closing stdin asks the child to exit.
        conn.stdin.take();
        let deadline = Instant::now() + Duration::from_secs(2);
        while Instant::now() < deadline {
            if let Ok(Some(_)) = conn.child.try_wait() {
                return;
            }
            thread::sleep(Duration::from_millis(5));
        }
        let _ = conn.child.kill();
        let _ = conn.child.wait();
    }
}

/// Server side of the protocol: answers requests read from `input` with
/// `bb`, until `input` is exhausted.
pub fn serve<B: BlackBox + ?Sized>(
    bb: &B,
    n: usize,
    input: impl BufRead,
    mut output: impl Write,
) -> Result<()> {
    let mut lines = input.lines();
    let hello = match lines.next() {
        Some(line) => line?,
        None => return Ok(()),
    };
    let greeting: serde_json::Value = serde_json::from_str(&hello)
        .map_err(|e| Error::Transport(format!("malformed handshake {hello:?}: {e}")))?;
    if greeting.get("hello").and_then(|v| v.as_str()) != Some(HANDSHAKE) {
        writeln!(output, "{}", json!({ "ready": false, "error": "unsupported protocol" }))?;
        output.flush()?;
        return Err(Error::Transport(format!("unsupported handshake {hello:?}")));
    }
    writeln!(output, "{}", json!({ "ready": true }))?;
    output.flush()?;

    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match serde_json::from_str::<Request>(&line) {
            Err(e) => json!({ "id": null, "error": format!("malformed request: {e}") }),
            Ok(req) if req.n != n => json!({
                "id": req.id,
                "error": format!("graph has {} nodes, model expects {n}", req.n),
            }),
            Ok(req) => match Graph::from_weighted_edges(req.n, req.edges)
                .and_then(|g| bb.evaluate(&g))
            {
                Ok(p) => json!({ "id": req.id, "p": p }),
                Err(e) => json!({ "id": req.id, "error": e.to_string() }),
            },
        };
        writeln!(output, "{reply}")?;
        output.flush()?;
    }
    Ok(())
}
