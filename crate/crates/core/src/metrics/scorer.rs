use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Stdio};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Similarity between two texts, nominally in [0, 1].
pub trait PairScorer: Send + Sync {
    fn score(&self, a: &str, b: &str) -> Result<f64, MetricsError>;
}

#[derive(Serialize)]
struct Request<'a> {
    a: &'a str,
    b: &'a str,
}

#[derive(Deserialize)]
struct Response {
    score: f64,
}

/// Line-delimited JSON exchange: `{"a": .., "b": ..}` out, `{"score": ..}` back.
pub struct LineScorer<R, W> {
    io: Mutex<(BufReader<R>, W)>,
}

impl<R: Read + Send, W: Write + Send> LineScorer<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self {
            io: Mutex::new((BufReader::new(reader), writer)),
        }
    }
}

fn unavailable(e: impl std::fmt::Display) -> MetricsError {
    MetricsError::ScorerUnavailable(e.to_string())
}

impl<R: Read + Send, W: Write + Send> PairScorer for LineScorer<R, W> {
    fn score(&self, a: &str, b: &str) -> Result<f64, MetricsError> {
        let mut guard = self.io.lock().map_err(unavailable)?;
        let (reader, writer) = &mut *guard;
        let mut line = serde_json::to_string(&Request { a, b }).map_err(unavailable)?;
        line.push('\n');
        writer.write_all(line.as_bytes()).map_err(unavailable)?;
        writer.flush().map_err(unavailable)?;
        let mut reply = String::new();
        if reader.read_line(&mut reply).map_err(unavailable)? == 0 {
            return Err(unavailable("scorer closed the stream"));
        }
        let resp: Response = serde_json::from_str(reply.trim()).map_err(|e| unavailable(format!("bad reply {reply:?}: {e}")))?;
        if !resp.score.is_finite() {
            return Err(unavailable(format!("non-finite score {}", resp.score)));
        }
        Ok(resp.score)
    }
}

/// Scorer running as a child process speaking the protocol on stdin/stdout.
pub struct ProcessScorer {
    child: Child,
    inner: LineScorer<std::process::ChildStdout, std::process::ChildStdin>,
}

impl ProcessScorer {
    pub fn spawn(program: &str, args: &[String]) -> Result<Self, MetricsError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| unavailable(format!("{program}: {e}")))?;
        let stdin = child.stdin.take().ok_or_else(|| unavailable("no stdin"))?;
        let stdout = child.stdout.take().ok_or_else(|| unavailable("no stdout"))?;
        Ok(Self {
            child,
            inner: LineScorer::new(stdout, stdin),
        })
    }
}

impl PairScorer for ProcessScorer {
    fn score(&self, a: &str, b: &str) -> Result<f64, MetricsError> {
        self.inner.score(a, b)
    }
}

impl Drop for ProcessScorer {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Scorer reached over a local socket: `host:port`, or `unix:/path` on Unix.
pub struct SocketScorer {
    inner: Box<dyn PairScorer>,
}

impl SocketScorer {
    pub fn connect(addr: &str) -> Result<Self, MetricsError> {
        #[cfg(unix)]
        if let Some(path) = addr.strip_prefix("unix:") {
            let stream = std::os::unix::net::UnixStream::connect(path).map_err(|e| unavailable(format!("{addr}: {e}")))?;
            let reader = stream.try_clone().map_err(unavailable)?;
            return Ok(Self {
                inner: Box::new(LineScorer::new(reader, stream)),
            });
        }
        let stream = TcpStream::connect(addr).map_err(|e| unavailable(format!("{addr}: {e}")))?;
        let reader = stream.try_clone().map_err(unavailable)?;
        Ok(Self {
            inner: Box::new(LineScorer::new(reader, stream)),
        })
    }
}

impl PairScorer for SocketScorer {
    fn score(&self, a: &str, b: &str) -> Result<f64, MetricsError> {
        self.inner.score(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::net::TcpListener;

    #[test]
    fn process_scorer_round_trip() {
        let script = r#"while read -r line; do echo '{"score": 0.75}'; done"#;
        let scorer = ProcessScorer::spawn("sh", &["-c".into(), script.into()]).unwrap();
        assert_eq!(scorer.score("a", "b").unwrap(), 0.75);
        assert_eq!(scorer.score("c", "d").unwrap(), 0.75);
    }

    #[test]
    fn dead_process_is_unavailable() {
        let scorer = ProcessScorer::spawn("sh", &["-c".into(), "exit 0".into()]).unwrap();
        assert!(matches!(scorer.score("a", "b"), Err(MetricsError::ScorerUnavailable(_))));
        assert!(ProcessScorer::spawn("/nonexistent/scorer", &[]).is_err());
    }

    #[test]
    fn socket_scorer_sends_both_texts() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap().to_string();
        let server = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut writer = stream;
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            let v: serde_json::Value = serde_json::from_str(&line).unwrap();
            let score = if v["a"] == v["b"] { 1.0 } else { 0.5 };
            writeln!(writer, "{{\"score\": {score}}}").unwrap();
            line
        });
        let scorer = SocketScorer::connect(&addr).unwrap();
        assert_eq!(scorer.score("same", "same").unwrap(), 1.0);
        let sent = server.join().unwrap();
        assert_eq!(sent.trim(), r#"{"a":"same","b":"same"}"#);
    }

    #[test]
    fn malformed_reply_is_unavailable() {
        let scorer = LineScorer::new("not json\n".as_bytes(), Vec::new());
        assert!(matches!(scorer.score("a", "b"), Err(MetricsError::ScorerUnavailable(_))));
    }
}
