use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;

use crate::error::Error;
use crate::numeric::ceil_sqrt;

/// Snapshot of a Fermat walk: centre `y = y0 + k`, deficit `d = y² − n`.
///
/// The iteration count always equals `k`. The checkpoint form is one line,
/// `n=<n> y0=<y0> k=<k>` in decimal; `d` is recomputed on load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchState {
    n: BigUint,
    y0: BigUint,
    k: u64,
    d: BigUint,
}

impl SearchState {
    pub(crate) fn from_parts(n: BigUint, y0: BigUint, k: u64, d: BigUint) -> Self {
        SearchState { n, y0, k, d }
    }

    /// Recomputes the deficit by full multiplication.
    pub(crate) fn at_offset(n: BigUint, y0: BigUint, k: u64) -> Self {
        let y = &y0 + k;
        let d = &y * &y - &n;
        SearchState { n, y0, k, d }
    }

    pub(crate) fn into_parts(self) -> (BigUint, BigUint, u64, BigUint) {
        (self.n, self.y0, self.k, self.d)
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn y0(&self) -> &BigUint {
        &self.y0
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Current deficit `D_k`.
    pub fn d(&self) -> &BigUint {
        &self.d
    }

    pub fn iterations(&self) -> u64 {
        self.k
    }

    /// Current centre `y0 + k`.
    pub fn y(&self) -> BigUint {
        &self.y0 + self.k
    }

    pub fn to_checkpoint(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SearchState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} y0={} k={}", self.n, self.y0, self.k)
    }
}

/// Snapshot of an x-scan: the next half-gap `x` to test.
///
/// Checkpoint form: `method=xscan n=<n> x=<x>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XScanState {
    n: BigUint,
    x: u64,
}

impl XScanState {
    pub(crate) fn new(n: BigUint, x: u64) -> Self {
        XScanState { n, x }
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn iterations(&self) -> u64 {
        self.x
    }
}

impl fmt::Display for XScanState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "method=xscan n={} x={}", self.n, self.x)
    }
}

/// A parsed checkpoint line of either method.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Checkpoint {
    Fermat(SearchState),
    Xscan(XScanState),
}

impl Checkpoint {
    pub fn n(&self) -> &BigUint {
        match self {
            Checkpoint::Fermat(s) => s.n(),
            Checkpoint::Xscan(s) => s.n(),
        }
    }
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Checkpoint::Fermat(s) => s.fmt(f),
            Checkpoint::Xscan(s) => s.fmt(f),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

fn fields(line: &str) -> Result<BTreeMap<&str, &str>, Error> {
    let mut map = BTreeMap::new();
    for token in line.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {token:?}")))?;
        if map.insert(key, value).is_some() {
            return Err(bad(format!("duplicate key {key:?}")));
        }
    }
    Ok(map)
}

fn take<'a>(map: &mut BTreeMap<&str, &'a str>, key: &str) -> Result<&'a str, Error> {
    map.remove(key).ok_or_else(|| bad(format!("missing key {key:?}")))
}

fn decimal(key: &str, value: &str) -> Result<BigUint, Error> {
    if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(format!("{key} must be a decimal integer, got {value:?}")));
    }
    value
        .parse()
        .map_err(|_| bad(format!("{key} must be a decimal integer, got {value:?}")))
}

fn offset(key: &str, value: &str) -> Result<u64, Error> {
    if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(format!("{key} must be a decimal integer, got {value:?}")));
    }
    value
        .parse()
        .map_err(|_| bad(format!("{key} = {value} does not fit in 64 bits")))
}

fn modulus(map: &mut BTreeMap<&str, &str>) -> Result<BigUint, Error> {
    let n = decimal("n", take(map, "n")?)?;
    if n < BigUint::from(3u32) || n.is_even() {
        return Err(bad(format!("n = {n} must be odd and >= 3")));
    }
    Ok(n)
}

impl FromStr for Checkpoint {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let mut map = fields(line.trim())?;
        let method = map.remove("method").unwrap_or("fermat");
        let checkpoint = match method {
            "fermat" => {
                let n = modulus(&mut map)?;
                let y0 = decimal("y0", take(&mut map, "y0")?)?;
                let k = offset("k", take(&mut map, "k")?)?;
                let expected = ceil_sqrt(&n);
                if y0 != expected {
                    return Err(bad(format!("y0 = {y0} but ceil_sqrt({n}) = {expected}")));
                }
                // Past the trivial representation there is nothing left to find.
                if &y0 + k > (&n + 1u32) >> 1u32 {
                    return Err(bad(format!("k = {k} lies beyond the trivial representation of {n}")));
                }
                Checkpoint::Fermat(SearchState::at_offset(n, y0, k))
            }
            "xscan" => {
                let n = modulus(&mut map)?;
                let x = offset("x", take(&mut map, "x")?)?;
                if BigUint::from(x) > (&n - 1u32) >> 1u32 {
                    return Err(bad(format!("x = {x} lies beyond the trivial representation of {n}")));
                }
                Checkpoint::Xscan(XScanState::new(n, x))
            }
            other => return Err(bad(format!("unknown method {other:?}"))),
        };
        if let Some(key) = map.keys().next() {
            return Err(bad(format!("unexpected key {key:?}")));
        }
        Ok(checkpoint)
    }
}

impl FromStr for SearchState {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        match line.parse()? {
            Checkpoint::Fermat(state) => Ok(state),
            Checkpoint::Xscan(_) => Err(bad("expected a fermat checkpoint, got an xscan one")),
        }
    }
}

impl FromStr for XScanState {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        match line.parse()? {
            Checkpoint::Xscan(state) => Ok(state),
            Checkpoint::Fermat(_) => Err(bad("expected an xscan checkpoint, got a fermat one")),
        }
    }
}
