use std::io::{self, BufRead, Write};
use std::net::ToSocketAddrs;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::generator::Generator;
use super::latent::LatentPoint;
use crate::error::{Error, Result};
use crate::jsonl::{serve_lines, ChannelError, JsonLinesChannel};

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum GeneratorRequest {
    Encode { texts: Vec<String> },
    Decode { vectors: Vec<Vec<f64>> },
    Dim,
}

#[derive(Deserialize)]
struct VectorsResponse {
    vectors: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct TextsResponse {
    texts: Vec<String>,
}

#[derive(Deserialize)]
struct DimResponse {
    dim: usize,
}

/// Generator in another process, reached over JSON lines. The dimension is fetched once at connect time.
#[derive(Debug)]
pub struct ExternalGenerator {
    channel: Mutex<JsonLinesChannel>,
    dim: usize,
}

impl ExternalGenerator {
    pub fn new(channel: JsonLinesChannel) -> Result<Self> {
        let mut channel = channel;
        let resp: DimResponse = call(&mut channel, &GeneratorRequest::Dim, &[])?;
        Ok(Self { channel: Mutex::new(channel), dim: resp.dim })
    }

    pub fn spawn(command_line: &str) -> Result<Self> {
        Self::new(JsonLinesChannel::spawn_command_line(command_line)?)
    }

    pub fn connect(addr: impl ToSocketAddrs) -> Result<Self> {
        Self::new(JsonLinesChannel::connect(addr)?)
    }
}

fn call<R: serde::de::DeserializeOwned>(
    channel: &mut JsonLinesChannel,
    req: &GeneratorRequest,
    batch: &[String],
) -> Result<R> {
    channel.request(req).map_err(|e| match e {
        ChannelError::Transport(source) => Error::Transport { batch: batch.to_vec(), source },
        ChannelError::Protocol(msg) => Error::Protocol(msg),
    })
}

impl Generator for ExternalGenerator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, texts: &[String]) -> Result<Vec<LatentPoint<f64>>> {
        let req = GeneratorRequest::Encode { texts: texts.to_vec() };
        let resp: VectorsResponse = call(&mut self.channel.lock().expect("channel lock"), &req, texts)?;
        if resp.vectors.len() != texts.len() {
            return Err(Error::Protocol(format!("{} vectors for {} texts", resp.vectors.len(), texts.len())));
        }
        resp.vectors
            .into_iter()
            .map(|v| {
                if v.len() != self.dim {
                    return Err(Error::Protocol(format!("vector arity {} != declared dimension {}", v.len(), self.dim)));
                }
                let p = LatentPoint(v);
                if !p.is_finite() {
                    return Err(Error::Protocol("non-finite latent component".into()));
                }
                Ok(p)
            })
            .collect()
    }

    fn decode(&self, points: &[LatentPoint<f64>]) -> Result<Vec<String>> {
        if let Some(p) = points.iter().find(|p| p.dim() != self.dim) {
            return Err(Error::Contract(format!("vector arity {} != declared dimension {}", p.dim(), self.dim)));
        }
        let req = GeneratorRequest::Decode { vectors: points.iter().map(|p| p.0.clone()).collect() };
        let resp: TextsResponse = call(&mut self.channel.lock().expect("channel lock"), &req, &[])?;
        if resp.texts.len() != points.len() {
            return Err(Error::Protocol(format!("{} texts for {} vectors", resp.texts.len(), points.len())));
        }
        Ok(resp.texts)
    }
}

/// Answers generator protocol requests with `generator` until EOF.
pub fn serve_generator<R: BufRead, W: Write>(generator: &dyn Generator, reader: R, writer: W) -> io::Result<()> {
    serve_lines(reader, writer, |line| {
        let req: GeneratorRequest = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => return json!({ "error": e.to_string() }),
        };
        let result = match req {
            GeneratorRequest::Dim => Ok(json!({ "dim": generator.dim() })),
            GeneratorRequest::Encode { texts } => generator
                .encode(&texts)
                .map(|vs| json!({ "vectors": vs.into_iter().map(|v| v.0).collect::<Vec<_>>() })),
            GeneratorRequest::Decode { vectors } => generator
                .decode(&vectors.into_iter().map(LatentPoint).collect::<Vec<_>>())
                .map(|texts| json!({ "texts": texts })),
        };
        result.unwrap_or_else(|e| json!({ "error": e.to_string() }))
    })
}
