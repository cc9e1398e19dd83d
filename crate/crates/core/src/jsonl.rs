//! Line-delimited JSON request/response channel over a child process or a TCP stream.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::process::{Child, Command, Stdio};

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug)]
pub enum ChannelError {
    Transport(io::Error),
    Protocol(String),
}

/// One request line out, one response line back.
pub struct JsonLinesChannel {
    reader: Box<dyn BufRead + Send>,
    writer: Box<dyn Write + Send>,
    child: Option<Child>,
}

impl std::fmt::Debug for JsonLinesChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JsonLinesChannel").field("child", &self.child.as_ref().map(Child::id)).finish()
    }
}

impl JsonLinesChannel {
    pub fn from_streams(reader: impl BufRead + Send + 'static, writer: impl Write + Send + 'static) -> Self {
        Self { reader: Box::new(reader), writer: Box::new(writer), child: None }
    }

    /// Spawns `program args...` and talks to it over its standard streams.
    pub fn spawn(program: &str, args: &[String]) -> io::Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        Ok(Self { reader: Box::new(BufReader::new(stdout)), writer: Box::new(stdin), child: Some(child) })
    }

    /// Spawns a whitespace-separated command line.
    pub fn spawn_command_line(command_line: &str) -> io::Result<Self> {
        let mut parts = command_line.split_whitespace().map(str::to_string);
        let program = parts
            .next()
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "empty command line"))?;
        let args: Vec<String> = parts.collect();
        Self::spawn(&program, &args)
    }

    pub fn connect(addr: impl ToSocketAddrs) -> io::Result<Self> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        let reader = BufReader::new(stream.try_clone()?);
        Ok(Self { reader: Box::new(reader), writer: Box::new(stream), child: None })
    }

    pub fn request<Req: Serialize, Resp: DeserializeOwned>(&mut self, req: &Req) -> Result<Resp, ChannelError> {
        let mut line = serde_json::to_string(req).map_err(|e| ChannelError::Protocol(e.to_string()))?;
        line.push('\n');
        self.writer.write_all(line.as_bytes()).map_err(ChannelError::Transport)?;
        self.writer.flush().map_err(ChannelError::Transport)?;
        let mut response = String::new();
        let n = self.reader.read_line(&mut response).map_err(ChannelError::Transport)?;
        if n == 0 {
            return Err(ChannelError::Transport(io::Error::new(
                io::ErrorKind::UnexpectedEof,
                "peer closed the stream",
            )));
        }
        serde_json::from_str(response.trim_end()).map_err(|e| ChannelError::Protocol(format!("{e}: {response:?}")))
    }
}

impl Drop for JsonLinesChannel {
    fn drop(&mut self) {
        if let Some(child) = self.child.as_mut() {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// Serves requests line by line until EOF. `handle` returns the response value for one request line.
pub fn serve_lines<R, W, F>(reader: R, mut writer: W, mut handle: F) -> io::Result<()>
where
    R: BufRead,
    W: Write,
    F: FnMut(&str) -> serde_json::Value,
{
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = handle(&line);
        serde_json::to_writer(&mut writer, &response)?;
        writer.write_all(b"\n")?;
        writer.flush()?;
    }
    Ok(())
}
