//! Streams of Bernoulli observations.
//!
//! Every estimator in this crate consumes observations through
//! [`ObservationSource`], which is either a seeded pseudo-random stream with
//! success probability `p`, a fixed in-memory sequence, or a bit file
//! (one ASCII character per observation, `'1'` = success, `'0'` = failure,
//! whitespace ignored).
//!
//! Reproducibility contract: the pseudo-random stream is xoshiro256++
//! seeded through the SplitMix64 finalizer, and an observation is a success
//! iff the top 53 bits of the next output, mapped to `[0, 1)`, are below `p`.
//! None of this is allowed to change silently; recorded CSV output is
//! seed-reproducible across platforms and versions.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

/// Default draw cap per source: 10^9 observations.
///
/// Expected sample sizes scale like `r / (p (1-p))`, so a stream with an
/// effective `p` near 0 or 1 turns into a hang without a cap. Overridable
/// process-wide via the `ODDS_SEQ_DEFAULT_CAP` environment variable
/// (read once, at first use).
pub const DEFAULT_CAP: u64 = 1_000_000_000;

static ENV_DEFAULT_CAP: LazyLock<u64> = LazyLock::new(|| {
    std::env::var("ODDS_SEQ_DEFAULT_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&cap| cap >= 1)
        .unwrap_or(DEFAULT_CAP)
});

/// The effective default cap: `ODDS_SEQ_DEFAULT_CAP` if set and valid,
/// otherwise [`DEFAULT_CAP`].
pub fn default_cap() -> u64 {
    *ENV_DEFAULT_CAP
}

/// Outcome of a single Bernoulli observation. `Success` is the event of
/// probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observation {
    Success,
    Failure,
}

impl Observation {
    /// Decodes the bit-file encoding: `'1'` is a success, `'0'` a failure.
    pub fn from_bit_char(c: char) -> Option<Observation> {
        match c {
            '1' => Some(Observation::Success),
            '0' => Some(Observation::Failure),
            _ => None,
        }
    }
}

/// Which outcome an inverse-binomial-sampling run counts toward its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Successes,
    Failures,
}

impl Target {
    /// Does `obs` count toward this target?
    pub fn matches(self, obs: Observation) -> bool {
        match self {
            Target::Successes => obs == Observation::Success,
            Target::Failures => obs == Observation::Failure,
        }
    }

    /// The complementary target.
    pub fn flipped(self) -> Target {
        match self {
            Target::Successes => Target::Failures,
            Target::Failures => Target::Successes,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Successes => write!(f, "successes"),
            Target::Failures => write!(f, "failures"),
        }
    }
}

/// Error type for source construction and draws.
#[derive(Debug)]
pub enum SourceError {
    /// `p` must lie strictly inside (0, 1).
    InvalidProbability(f64),
    /// Caps must be at least 1.
    InvalidCap,
    /// A finite source was fully consumed.
    Exhausted { len: u64 },
    /// The draw cap was reached; sampling would not terminate within budget.
    CapExceeded { cap: u64 },
    /// A bit file contained a byte other than '0', '1' or whitespace.
    InvalidBitChar { byte: u8, offset: usize },
    /// Bit file could not be read.
    Io(std::io::Error),
}

impl fmt::Display for SourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceError::InvalidProbability(p) => {
                write!(f, "probability {p} is outside the open interval (0, 1)")
            }
            SourceError::InvalidCap => write!(f, "observation cap must be at least 1"),
            SourceError::Exhausted { len } => {
                write!(f, "finite source exhausted after {len} observations")
            }
            SourceError::CapExceeded { cap } => {
                write!(f, "observation cap of {cap} draws reached")
            }
            SourceError::InvalidBitChar { byte, offset } => {
                write!(
                    f,
                    "invalid byte 0x{byte:02x} at offset {offset}: expected '0', '1' or whitespace"
                )
            }
            SourceError::Io(e) => write!(f, "bit file error: {e}"),
        }
    }
}

impl std::error::Error for SourceError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SourceError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for SourceError {
    fn from(e: std::io::Error) -> Self {
        SourceError::Io(e)
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer (Steele, Lea & Flood; as in `splitmix64.c`).
#[inline]
fn splitmix64_mix(z: u64) -> u64 {
    let mut z = z;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-replication seed: the `(index + 1)`-th output of the
/// SplitMix64 stream seeded at `master_seed`.
///
/// Replication seeds depend only on `(master_seed, replication_index)`,
/// never on worker identity, so Monte Carlo results are invariant to worker
/// count and scheduling. Distinct indices below 2^64 give distinct inputs to
/// the (bijective) finalizer, hence distinct outputs.
pub fn derive_child_seed(master_seed: u64, replication_index: u64) -> u64 {
    let stream_pos = replication_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA);
    splitmix64_mix(master_seed.wrapping_add(stream_pos))
}

/// xoshiro256++ (Blackman & Vigna, 2019), period 2^256 - 1, seeded by
/// expanding a 64-bit seed through SplitMix64 as its authors recommend.
#[derive(Debug, Clone)]
struct Xoshiro256PlusPlus {
    s: [u64; 4],
}

impl Xoshiro256PlusPlus {
    fn from_seed(seed: u64) -> Self {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for word in &mut s {
            sm = sm.wrapping_add(GOLDEN_GAMMA);
            *word = splitmix64_mix(sm);
        }
        // The all-zero state is the one fixed point xoshiro cannot leave.
        if s == [0; 4] {
            s[0] = GOLDEN_GAMMA;
        }
        Xoshiro256PlusPlus { s }
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform `f64` in `[0, 1)` from the top 53 bits.
    #[inline]
    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone)]
enum SourceKind {
    Prng { p: f64, rng: Xoshiro256PlusPlus },
    Fixed { seq: Vec<Observation>, pos: usize },
}

/// A capped, stateful supplier of Bernoulli observations.
///
/// A source instance is a single-threaded cursor; create one independent
/// source per concurrent estimation.
#[derive(Debug, Clone)]
pub struct ObservationSource {
    kind: SourceKind,
    cap: u64,
    drawn: u64,
}

impl ObservationSource {
    /// Pseudo-random stream with success probability `p` in (0, 1).
    pub fn prng(p: f64, seed: u64) -> Result<ObservationSource, SourceError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(SourceError::InvalidProbability(p));
        }
        Ok(ObservationSource {
            kind: SourceKind::Prng {
                p,
                rng: Xoshiro256PlusPlus::from_seed(seed),
            },
            cap: default_cap(),
            drawn: 0,
        })
    }

    /// Fixed finite sequence, replayed in order.
    pub fn fixed(seq: Vec<Observation>) -> ObservationSource {
        ObservationSource {
            kind: SourceKind::Fixed { seq, pos: 0 },
            cap: default_cap(),
            drawn: 0,
        }
    }

    /// Parses the bit-file encoding from a string: `'1'` = success,
    /// `'0'` = failure, all ASCII whitespace ignored.
    pub fn from_bit_str(text: &str) -> Result<ObservationSource, SourceError> {
        let mut seq = Vec::with_capacity(text.len());
        for (offset, c) in text.char_indices() {
            if c.is_whitespace() {
                continue;
            }
            match Observation::from_bit_char(c) {
                Some(obs) => seq.push(obs),
                None => {
                    let mut buf = [0u8; 4];
                    let byte = c.encode_utf8(&mut buf).as_bytes()[0];
                    return Err(SourceError::InvalidBitChar { byte, offset });
                }
            }
        }
        Ok(ObservationSource::fixed(seq))
    }

    /// Loads a bit file from disk (same encoding as [`Self::from_bit_str`]).
    pub fn bit_file<P: AsRef<Path>>(path: P) -> Result<ObservationSource, SourceError> {
        let text = fs::read_to_string(path)?;
        ObservationSource::from_bit_str(&text)
    }

    /// Replaces the draw cap. `cap` must be at least 1.
    pub fn with_cap(mut self, cap: u64) -> Result<ObservationSource, SourceError> {
        if cap < 1 {
            return Err(SourceError::InvalidCap);
        }
        self.cap = cap;
        Ok(self)
    }

    /// Observations drawn so far.
    pub fn drawn(&self) -> u64 {
        self.drawn
    }

    /// The draw cap in force.
    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Number of observations remaining in a finite source, if finite.
    pub fn remaining(&self) -> Option<u64> {
        match &self.kind {
            SourceKind::Fixed { seq, pos } => Some((seq.len() - pos) as u64),
            SourceKind::Prng { .. } => None,
        }
    }

    /// Draws the next observation, advancing the cursor.
    pub fn next_observation(&mut self) -> Result<Observation, SourceError> {
        if self.drawn >= self.cap {
            return Err(SourceError::CapExceeded { cap: self.cap });
        }
        let obs = match &mut self.kind {
            SourceKind::Prng { p, rng } => {
                if rng.next_f64() < *p {
                    Observation::Success
                } else {
                    Observation::Failure
                }
            }
            SourceKind::Fixed { seq, pos } => {
                if *pos >= seq.len() {
                    return Err(SourceError::Exhausted {
                        len: seq.len() as u64,
                    });
                }
                let obs = seq[*pos];
                *pos += 1;
                obs
            }
        };
        self.drawn += 1;
        Ok(obs)
    }
}
