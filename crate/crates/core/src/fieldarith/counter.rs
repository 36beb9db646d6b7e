//! Per-thread operation accounting. One solve runs on one thread, so the
//! solver reads these counters as deltas around its own work.

use std::cell::Cell;

const DEFAULT_REDUCE_BITS: u64 = 512;

thread_local! {
    static FIELD_OPS: Cell<u64> = const { Cell::new(0) };
    static REDUCE_BITS: Cell<u64> = const { Cell::new(DEFAULT_REDUCE_BITS) };
}

/// Field operations performed on this thread so far.
pub fn field_ops() -> u64 {
    FIELD_OPS.with(Cell::get)
}

#[inline]
pub(crate) fn bump() {
    FIELD_OPS.with(|c| c.set(c.get() + 1));
}

/// Elements whose denominator exceeds this many bits are reduced by the gcd
/// of their coefficients. Below the threshold no reduction happens.
pub fn set_reduce_threshold(bits: u64) {
    REDUCE_BITS.with(|c| c.set(bits));
}

pub fn reduce_threshold() -> u64 {
    REDUCE_BITS.with(Cell::get)
}
