use std::thread;
use std::time::Duration;

use super::ScoreError;

/// Bounded exponential backoff. `delays[i]` is the pause before retry `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetryPolicy {
    pub delays: Vec<Duration>,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            delays: [100, 400, 1600].map(Duration::from_millis).to_vec(),
        }
    }
}

impl RetryPolicy {
    pub fn no_retries() -> Self {
        Self { delays: Vec::new() }
    }

    /// `retries` retries without pausing.
    pub fn immediate(retries: usize) -> Self {
        Self {
            delays: vec![Duration::ZERO; retries],
        }
    }

    pub fn max_attempts(&self) -> usize {
        self.delays.len() + 1
    }
}

/// Errors that [`with_retry`] knows how to classify.
pub trait Retryable: std::fmt::Display {
    fn is_retryable(&self) -> bool;
    /// Records the total attempt count on the final error.
    fn with_attempts(self, attempts: usize) -> Self;
}

impl Retryable for ScoreError {
    fn is_retryable(&self) -> bool {
        ScoreError::is_retryable(self)
    }

    fn with_attempts(self, attempts: usize) -> Self {
        match self {
            ScoreError::Transport { message, .. } => ScoreError::Transport { attempts, message },
            other => other,
        }
    }
}

/// Runs `op`, retrying retryable failures according to `policy`. The final
/// transport error reports the total number of attempts.
pub fn with_retry<T, E: Retryable>(policy: &RetryPolicy, mut op: impl FnMut() -> Result<T, E>) -> Result<T, E> {
    let mut attempt = 0;
    loop {
        attempt += 1;
        match op() {
            Ok(v) => return Ok(v),
            Err(e) if e.is_retryable() && attempt <= policy.delays.len() => {
                log::warn!("attempt {attempt} failed: {e}; retrying");
                let pause = policy.delays[attempt - 1];
                if !pause.is_zero() {
                    thread::sleep(pause);
                }
            }
            Err(e) => return Err(e.with_attempts(attempt)),
        }
    }
}
