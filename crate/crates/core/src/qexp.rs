//! Integer `q`-expansions of level-one forms, used as test data for the Mellin pipeline.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

fn overflow() -> Error {
    Error::Accuracy("q-expansion coefficient overflowed i128".into())
}

/// `Σ_{d | n} d^e` for `1 <= n <= len`, index `n - 1`.
fn divisor_power_sums(len: usize, e: u32) -> Result<Vec<i128>> {
    let mut out = vec![0i128; len];
    for d in 1..=len {
        let pw = (d as i128).checked_pow(e).ok_or_else(overflow)?;
        let mut m = d;
        while m <= len {
            out[m - 1] = out[m - 1].checked_add(pw).ok_or_else(overflow)?;
            m += d;
        }
    }
    Ok(out)
}

/// `E_{2j}` coefficients `1, c·σ_{2j-1}(1), …` up to `q^len`.
fn eisenstein(len: usize, e: u32, c: i128) -> Result<Vec<i128>> {
    let sig = divisor_power_sums(len, e)?;
    let mut out = Vec::with_capacity(len + 1);
    out.push(1);
    for s in sig {
        out.push(s.checked_mul(c).ok_or_else(overflow)?);
    }
    Ok(out)
}

/// `E_4 = 1 + 240 Σ σ_3(n) q^n`, coefficients of `q^0 … q^len`.
pub fn e4(len: usize) -> Result<Vec<i128>> {
    eisenstein(len, 3, 240)
}

/// `E_6 = 1 - 504 Σ σ_5(n) q^n`, coefficients of `q^0 … q^len`.
pub fn e6(len: usize) -> Result<Vec<i128>> {
    eisenstein(len, 5, -504)
}

#[cfg(test)]
fn mul_series(a: &[i128], b: &[i128], len: usize) -> Result<Vec<i128>> {
    let mut out = vec![0i128; len + 1];
    for (i, &x) in a.iter().enumerate().take(len + 1) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len + 1 - i) {
            let t = x.checked_mul(y).ok_or_else(overflow)?;
            out[i + j] = out[i + j].checked_add(t).ok_or_else(overflow)?;
        }
    }
    Ok(out)
}

/// `Δ = q Π (1 - q^n)^{24}`: coefficients `τ(1) … τ(len)`, index `n - 1`.
pub fn delta(len: usize) -> Result<Vec<i128>> {
    // Π (1 - q^n) = Σ_k (-1)^k q^{k(3k-1)/2} over all integers k (pentagonal numbers).
    let mut euler = vec![0i128; len];
    for k in 0i64.. {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let lo = (k * (3 * k - 1) / 2) as usize;
        if lo >= len {
            break;
        }
        euler[lo] = sign;
        let hi = (k * (3 * k + 1) / 2) as usize;
        if k > 0 && hi < len {
            euler[hi] = sign;
        }
    }
    // Sparse repeated multiplication: 24 passes over the short pentagonal series.
    let nz: Vec<(usize, i128)> = euler
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    let mut acc = vec![0i128; len];
    if len > 0 {
        acc[0] = 1;
    }
    for _ in 0..24 {
        let mut next = vec![0i128; len];
        for (i, &x) in acc.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for &(e, c) in &nz {
                if i + e >= len {
                    break;
                }
                next[i + e] = next[i + e].checked_add(x * c).ok_or_else(overflow)?;
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Coefficients `a_1 … a_len` of the weight-18 cusp form `Δ·E_6` on `Γ(1)`.
pub fn delta_e6(len: usize) -> Result<Vec<i128>> {
    let d = delta(len)?;
    let e = e6(len)?;
    let mut out = vec![0i128; len];
    for (n, slot) in out.iter_mut().enumerate() {
        // a_{n+1} = Σ_{m=0}^{n} τ(m+1) e6_{n-m}
        let mut acc: i128 = 0;
        for m in 0..=n {
            let t = d[m].checked_mul(e[n - m]).ok_or_else(overflow)?;
            acc = acc.checked_add(t).ok_or_else(overflow)?;
        }
        *slot = acc;
    }
    Ok(out)
}
