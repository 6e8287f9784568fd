use std::io::{BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use crate::coding::EncodedMessage;
use crate::error::{Error, Result};
use crate::extractor::{make_prover, Prover, ProverSpec};
use crate::keyed::SwTag;
use crate::schemes::{Scheme, SchemeKind};

use super::protocol::{
    decode_challenge, encode_response, read_frame, write_frame, Frame, FrameType, Hello, ERR_CONFIG_MISMATCH,
    ERR_MALFORMED_CHALLENGE, ERR_PROTOCOL,
};

/// What the prover daemon holds. In keyed mode this is `M` and the tag `S`,
/// never the key.
#[derive(Debug, Clone)]
pub struct ServerState {
    scheme: Scheme,
    blocks: EncodedMessage,
    tag: Option<SwTag>,
    behaviour: ProverSpec,
}

impl ServerState {
    pub fn new(scheme: Scheme, blocks: EncodedMessage, tag: Option<SwTag>, behaviour: ProverSpec) -> Result<Self> {
        if blocks.len() != scheme.n() {
            return Err(Error::LengthMismatch { left: scheme.n(), right: blocks.len() });
        }
        match (scheme.kind(), &tag) {
            (SchemeKind::ShachamWaters, None) => return Err(Error::Parameter("keyed scheme needs the tag".into())),
            (SchemeKind::ShachamWaters, Some(t)) if t.sigma.len() != scheme.n() => {
                return Err(Error::LengthMismatch { left: scheme.n(), right: t.sigma.len() })
            }
            (SchemeKind::ShachamWaters, _) => {}
            (_, Some(_)) => return Err(Error::Parameter("tag given for a keyless scheme".into())),
            (_, None) => {}
        }
        if behaviour == ProverSpec::SwAttack {
            return Err(Error::Parameter("the server cannot run the oracle attack (it holds no key)".into()));
        }
        let state = Self { scheme, blocks, tag, behaviour };
        state.prover()?;
        Ok(state)
    }

    pub fn honest(scheme: Scheme, blocks: EncodedMessage, tag: Option<SwTag>) -> Result<Self> {
        Self::new(scheme, blocks, tag, ProverSpec::Honest)
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn behaviour(&self) -> &ProverSpec {
        &self.behaviour
    }

    /// Fresh prover for one session. All behaviours are functions of the
    /// challenge and their seed only, so sessions see identical answers.
    fn prover(&self) -> Result<Box<dyn Prover>> {
        make_prover(&self.behaviour, &self.scheme, &self.blocks, self.tag.as_ref(), None)
    }
}

/// A bound prover daemon.
pub struct Server {
    listener: TcpListener,
    state: Arc<ServerState>,
    stop: Arc<AtomicBool>,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, state: ServerState) -> Result<Self> {
        Ok(Self {
            listener: TcpListener::bind(addr)?,
            state: Arc::new(state),
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accepts connections until shut down, one thread per session.
    pub fn run(self) -> Result<()> {
        for stream in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = stream else { continue };
            let state = Arc::clone(&self.state);
            thread::spawn(move || {
                let _ = handle_session(stream, &state);
            });
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> Result<ServerHandle> {
        let addr = self.local_addr()?;
        let stop = Arc::clone(&self.stop);
        let thread = thread::spawn(move || self.run());
        Ok(ServerHandle {
            addr,
            stop,
            thread: Some(thread),
        })
    }
}

/// Binds `addr` and serves until the process ends.
pub fn serve(state: ServerState, addr: impl ToSocketAddrs) -> Result<()> {
    Server::bind(addr, state)?.run()
}

pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<Result<()>>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting new sessions; sessions in progress run to completion.
    pub fn shutdown(mut self) -> Result<()> {
        self.stop_now()
    }

    fn stop_now(&mut self) -> Result<()> {
        let Some(thread) = self.thread.take() else { return Ok(()) };
        self.stop.store(true, Ordering::SeqCst);
        // wake the blocking accept
        let _ = TcpStream::connect(self.addr);
        thread
            .join()
            .map_err(|_| Error::Io("server thread panicked".into()))?
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        let _ = self.stop_now();
    }
}

fn handle_session(stream: TcpStream, state: &ServerState) -> Result<()> {
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    let fail = |w: &mut BufWriter<TcpStream>, code: u8, msg: String| -> Result<()> {
        write_frame(w, &Frame::error(code, &msg))?;
        let _ = w.get_ref().shutdown(std::net::Shutdown::Both);
        Ok(())
    };

    let first = match read_frame(&mut reader) {
        Ok(Some(f)) => f,
        Ok(None) => return Ok(()),
        Err(e) => return fail(&mut writer, ERR_PROTOCOL, e.to_string()),
    };
    if first.kind != FrameType::Hello {
        return fail(&mut writer, ERR_PROTOCOL, "session must start with HELLO".into());
    }
    let ours = Hello::for_scheme(&state.scheme);
    match Hello::decode(&first.payload) {
        Ok(theirs) if theirs == ours => {}
        Ok(theirs) => {
            return fail(
                &mut writer,
                ERR_CONFIG_MISMATCH,
                format!("server serves {ours:?}, client asked for {theirs:?}"),
            )
        }
        Err(e) => return fail(&mut writer, ERR_CONFIG_MISMATCH, e.to_string()),
    }
    write_frame(&mut writer, &ours.frame())?;

    let mut prover = state.prover()?;
    loop {
        let frame = match read_frame(&mut reader) {
            Ok(Some(f)) => f,
            Ok(None) => return Ok(()),
            Err(e) => return fail(&mut writer, ERR_PROTOCOL, e.to_string()),
        };
        if frame.kind != FrameType::Challenge {
            return fail(&mut writer, ERR_PROTOCOL, format!("unexpected {:?} frame", frame.kind));
        }
        let challenge = match decode_challenge(&state.scheme, &frame.payload) {
            Ok(c) => c,
            Err(e) => return fail(&mut writer, ERR_MALFORMED_CHALLENGE, e.to_string()),
        };
        let response = prover.answer(&challenge)?;
        write_frame(&mut writer, &Frame::new(FrameType::Response, encode_response(&response)))?;
    }
}
