use crate::scalar::{Field, PrecisionContext};

/// Guard bits carried through the recurrence.
const GUARD: u32 = 32;

/// Generalized Laguerre polynomial `L_n^(α)(x)` by the ascending three-term
/// recurrence
///
/// `(k+1) L_{k+1} = (2k+1+α−x) L_k − (k+α) L_{k−1}`.
///
/// Exact when `T` is a rational type. For floating types the recurrence is
/// run with guard bits and rounded to `pc` at the end; it is stable for
/// `x < 0`, the only regime used by the moment formulas.
pub fn laguerre<T: Field>(n: u32, alpha: &T, x: &T, pc: PrecisionContext) -> T {
    let wp = pc.guarded(GUARD);
    let alpha = alpha.with_precision(wp);
    let x = x.with_precision(wp);
    let one = T::from_i64(1, wp);
    if n == 0 {
        return one.with_precision(pc);
    }
    let mut prev = one.clone();
    let mut cur = one + alpha.clone() - x.clone();
    for k in 1..n {
        let kk = T::from_i64(k as i64, wp);
        let a = T::from_i64(2 * k as i64 + 1, wp) + alpha.clone() - x.clone();
        let next = (a * cur.clone() - (kk + alpha.clone()) * prev) / T::from_i64(k as i64 + 1, wp);
        prev = cur;
        cur = next;
    }
    cur.with_precision(pc)
}
