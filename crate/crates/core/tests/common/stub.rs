//! An in-process chat-completion endpoint that records how it is driven:
//! request count, peak concurrent requests, and arrival times. Every
//! response carries `Connection: close`, so each request is its own TCP
//! connection and the counters see every call the client makes.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

pub struct StubOptions {
    /// The completion text returned inside the chat response envelope.
    pub reply: String,
    /// Respond 500 to this many requests before succeeding.
    pub fail_first: usize,
    /// Artificial handling time per successful request, to widen the
    /// window in which concurrent requests overlap.
    pub delay: Duration,
}

impl Default for StubOptions {
    fn default() -> Self {
        StubOptions {
            reply: "说话人：黄蓉；听话人：陆庄主".into(),
            fail_first: 0,
            delay: Duration::ZERO,
        }
    }
}

struct State {
    reply: String,
    fail_remaining: AtomicUsize,
    delay: Duration,
    hits: AtomicUsize,
    in_flight: AtomicUsize,
    max_in_flight: AtomicUsize,
    arrivals: Mutex<Vec<Instant>>,
    shutdown: AtomicBool,
}

pub struct StubServer {
    addr: SocketAddr,
    state: Arc<State>,
    accept_loop: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn start(options: StubOptions) -> StubServer {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub listener");
        let addr = listener.local_addr().expect("stub listener address");
        let state = Arc::new(State {
            reply: options.reply,
            fail_remaining: AtomicUsize::new(options.fail_first),
            delay: options.delay,
            hits: AtomicUsize::new(0),
            in_flight: AtomicUsize::new(0),
            max_in_flight: AtomicUsize::new(0),
            arrivals: Mutex::new(Vec::new()),
            shutdown: AtomicBool::new(false),
        });
        let loop_state = Arc::clone(&state);
        let accept_loop = thread::spawn(move || {
            for stream in listener.incoming() {
                if loop_state.shutdown.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let state = Arc::clone(&loop_state);
                thread::spawn(move || serve_connection(stream, &state));
            }
        });
        StubServer {
            addr,
            state,
            accept_loop: Some(accept_loop),
        }
    }

    pub fn endpoint(&self) -> String {
        format!("http://{}/v1/chat/completions", self.addr)
    }

    /// Total requests that reached the handler.
    pub fn hits(&self) -> usize {
        self.state.hits.load(Ordering::SeqCst)
    }

    /// Peak number of requests being handled at the same time.
    pub fn max_in_flight(&self) -> usize {
        self.state.max_in_flight.load(Ordering::SeqCst)
    }

    /// Time between consecutive request arrivals, in arrival order.
    pub fn arrival_gaps(&self) -> Vec<Duration> {
        let arrivals = self.state.arrivals.lock().expect("arrival log");
        arrivals.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.state.shutdown.store(true, Ordering::SeqCst);
        // Unblock the accept loop so it can observe the flag.
        let _ = TcpStream::connect(self.addr);
        if let Some(handle) = self.accept_loop.take() {
            let _ = handle.join();
        }
    }
}

fn serve_connection(stream: TcpStream, state: &State) {
    stream
        .set_read_timeout(Some(Duration::from_secs(5)))
        .expect("set stub read timeout");
    let mut reader = BufReader::new(&stream);

    let mut request_line = String::new();
    if reader.read_line(&mut request_line).unwrap_or(0) == 0 {
        return; // Shutdown poke or a client that never sent anything.
    }
    let mut content_length = 0usize;
    loop {
        let mut header = String::new();
        if reader.read_line(&mut header).unwrap_or(0) == 0 {
            return;
        }
        let header = header.trim_end();
        if header.is_empty() {
            break;
        }
        if let Some((name, value)) = header.split_once(':') {
            if name.eq_ignore_ascii_case("content-length") {
                content_length = value.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; content_length];
    if reader.read_exact(&mut body).is_err() {
        return;
    }

    state.arrivals.lock().expect("arrival log").push(Instant::now());
    state.hits.fetch_add(1, Ordering::SeqCst);
    let in_flight = state.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    state.max_in_flight.fetch_max(in_flight, Ordering::SeqCst);

    let injected_failure = state
        .fail_remaining
        .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
        .is_ok();
    let (status_line, payload) = if injected_failure {
        (
            "HTTP/1.1 500 Internal Server Error",
            r#"{"error":"injected failure"}"#.to_string(),
        )
    } else {
        if !state.delay.is_zero() {
            thread::sleep(state.delay);
        }
        let envelope = serde_json::json!({
            "choices": [{"message": {"role": "assistant", "content": state.reply}}],
        });
        ("HTTP/1.1 200 OK", envelope.to_string())
    };

    let response = format!(
        "{status_line}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len(),
    );
    let mut writer = &stream;
    let _ = writer.write_all(response.as_bytes());
    let _ = writer.flush();
    state.in_flight.fetch_sub(1, Ordering::SeqCst);
}
