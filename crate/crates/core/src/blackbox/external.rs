use std::io::{self, BufRead, Write};
use std::net::ToSocketAddrs;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Classifier, Label, ModelKind, Prediction};
use crate::error::{Error, Result};
use crate::jsonl::{serve_lines, ChannelError, JsonLinesChannel};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictRequest {
    pub op: String,
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictResponse {
    pub labels: Vec<u8>,
    pub scores: Vec<f64>,
}

/// Classifier living in another process, reached over JSON lines.
/// Wire access is serialized per connection.
#[derive(Debug)]
pub struct ExternalClassifier {
    channel: Mutex<JsonLinesChannel>,
}

impl ExternalClassifier {
    pub fn new(channel: JsonLinesChannel) -> Self {
        Self { channel: Mutex::new(channel) }
    }

    pub fn spawn(command_line: &str) -> Result<Self> {
        Ok(Self::new(JsonLinesChannel::spawn_command_line(command_line)?))
    }

    pub fn connect(addr: impl ToSocketAddrs) -> Result<Self> {
        Ok(Self::new(JsonLinesChannel::connect(addr)?))
    }
}

fn decode_response(resp: PredictResponse, expected: usize) -> Result<Vec<Prediction>> {
    if resp.labels.len() != expected || resp.scores.len() != expected {
        return Err(Error::Protocol(format!(
            "expected {expected} labels and scores, got {} and {}",
            resp.labels.len(),
            resp.scores.len()
        )));
    }
    resp.labels
        .iter()
        .zip(&resp.scores)
        .map(|(&label, &score)| {
            let label = Label::from_u8(label).ok_or_else(|| Error::Protocol(format!("label {label} not in {{0,1}}")))?;
            if !(0.0..=1.0).contains(&score) {
                return Err(Error::Protocol(format!("score {score} outside [0,1]")));
            }
            let p = Prediction::from_score(score);
            if p.label != label {
                return Err(Error::Protocol(format!("label {} inconsistent with score {score}", label.as_u8())));
            }
            Ok(p)
        })
        .collect()
}

impl Classifier for ExternalClassifier {
    fn kind(&self) -> ModelKind {
        ModelKind::External
    }

    fn predict_uncached(&self, texts: &[String]) -> Result<Vec<Prediction>> {
        let req = PredictRequest { op: "predict".into(), texts: texts.to_vec() };
        let mut channel = self.channel.lock().expect("channel lock");
        match channel.request::<_, PredictResponse>(&req) {
            Ok(resp) => decode_response(resp, texts.len()),
            Err(ChannelError::Transport(source)) => Err(Error::Transport { batch: texts.to_vec(), source }),
            Err(ChannelError::Protocol(msg)) => Err(Error::Protocol(msg)),
        }
    }
}

/// Answers classifier protocol requests with `model` until the reader hits EOF.
pub fn serve_classifier<R: BufRead, W: Write>(model: &dyn Classifier, reader: R, writer: W) -> io::Result<()> {
    serve_lines(reader, writer, |line| {
        let req: PredictRequest = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => return json!({ "error": e.to_string() }),
        };
        if req.op != "predict" {
            return json!({ "error": format!("unknown op {:?}", req.op) });
        }
        match model.predict_uncached(&req.texts) {
            Ok(preds) => json!({
                "labels": preds.iter().map(|p| p.label.as_u8()).collect::<Vec<_>>(),
                "scores": preds.iter().map(|p| p.score_positive).collect::<Vec<_>>(),
            }),
            Err(e) => json!({ "error": e.to_string() }),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::{BlackBox, FnClassifier};
    use std::io::{BufReader, Cursor};
    use std::net::TcpListener;
    use std::thread;

    fn planted(t: &str) -> f64 {
        if t.contains("love") {
            0.87
        } else {
            0.2
        }
    }

    #[test]
    fn tcp_round_trip_matches_in_process() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let reader = BufReader::new(stream.try_clone().unwrap());
            serve_classifier(&FnClassifier(planted), reader, stream).unwrap();
        });
        let remote = BlackBox::new(ExternalClassifier::connect(addr).unwrap());
        let local = BlackBox::new(FnClassifier(planted));
        let texts: Vec<String> = ["i love it", "meh", "love love"].iter().map(|s| s.to_string()).collect();
        assert_eq!(remote.predict_batch(&texts).unwrap(), local.predict_batch(&texts).unwrap());
        drop(remote);
        server.join().unwrap();
    }

    #[test]
    fn malformed_response_is_a_protocol_error() {
        let reader = Cursor::new(b"{\"labels\":[1],\"scores\":[0.2]}\n{\"nope\":1}\n".to_vec());
        let ext = ExternalClassifier::new(JsonLinesChannel::from_streams(reader, io::sink()));
        let err = ext.predict_uncached(&["x".into()]).unwrap_err();
        assert!(matches!(err, Error::Protocol(_)), "{err}");
        let err = ext.predict_uncached(&["x".into()]).unwrap_err();
        assert!(matches!(err, Error::Protocol(_)), "{err}");
    }

    #[test]
    fn closed_peer_is_a_retriable_transport_error() {
        let ext = ExternalClassifier::new(JsonLinesChannel::from_streams(Cursor::new(Vec::new()), io::sink()));
        let err = ext.predict_uncached(&["a".into(), "b".into()]).unwrap_err();
        assert!(err.is_retriable());
        match err {
            Error::Transport { batch, .. } => assert_eq!(batch, ["a", "b"]),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let resp = PredictResponse { labels: vec![1], scores: vec![0.9, 0.1] };
        assert!(matches!(decode_response(resp, 2), Err(Error::Protocol(_))));
    }
}
