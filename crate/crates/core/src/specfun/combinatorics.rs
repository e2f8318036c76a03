use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    // Each partial product C(n-k+i, i) is an integer, so the division is exact.
    (1..=k).fold(BigInt::one(), |acc, i| acc * (n - k + i) / i)
}

/// Catalan number `C_k = C(2k, k) / (k + 1)`.
pub fn catalan(k: u32) -> BigInt {
    binomial(2 * k, k) / (k + 1)
}

/// Triangular table of signed Stirling numbers of the first kind, `s(n, k)`
/// for `0 ≤ k ≤ n ≤ n_max`, filled by `s(n+1, k) = s(n, k-1) − n·s(n, k)`.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    pub const DEFAULT_MAX: u32 = 128;

    pub fn new(n_max: u32) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max as usize + 1);
        rows.push(vec![BigInt::one()]);
        for n in 0..n_max as usize {
            let prev = &rows[n];
            let mut next = vec![BigInt::zero(); n + 2];
            for k in 1..=n + 1 {
                let left = &prev[k - 1];
                let right = prev.get(k).cloned().unwrap_or_default();
                next[k] = left - right * BigInt::from(n);
            }
            rows.push(next);
        }
        Self { rows }
    }

    pub fn n_max(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    /// `s(n, k)`; zero outside the triangle, `None` beyond `n_max`.
    pub fn get(&self, n: u32, k: u32) -> Option<&BigInt> {
        let row = self.rows.get(n as usize)?;
        static ZERO: OnceLock<BigInt> = OnceLock::new();
        Some(
            row.get(k as usize)
                .unwrap_or_else(|| ZERO.get_or_init(BigInt::zero)),
        )
    }
}

fn shared_table() -> &'static StirlingTable {
    static TABLE: OnceLock<StirlingTable> = OnceLock::new();
    TABLE.get_or_init(|| StirlingTable::new(StirlingTable::DEFAULT_MAX))
}

/// Signed Stirling number of the first kind `s(n, k)` for `1 ≤ k ≤ n`.
pub fn stirling_first(n: u32, k: u32) -> Result<BigInt> {
    if k < 1 || k > n {
        return Err(Error::Domain(format!(
            "stirling_first requires 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    let shared = shared_table();
    if n <= shared.n_max() {
        return Ok(shared.get(n, k).cloned().expect("within table"));
    }
    Ok(StirlingTable::new(n).get(n, k).cloned().expect("within table"))
}
