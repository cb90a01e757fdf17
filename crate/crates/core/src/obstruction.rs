//! Embedding obstructions from capacity comparison.
//!
//! Capacities are monotone under symplectic embeddings: if one domain
//! embeds into another, every capacity of the source is at most the
//! corresponding capacity of the target. Contrapositively, a single index
//! `k` with `c_k(from) > c_k(into)` *obstructs* the embedding. The check
//! here scans indices `0..=k_max` for the smallest such `k`.
//!
//! A `no_violation` verdict is one-sided: it does **not** assert that an
//! embedding exists, only that this family of obstructions is silent up
//! to the checked index. The report also carries a volume precheck
//! (volume is monotone under embeddings too, and a volume gap guarantees
//! some capacity violation at large enough index, possibly beyond
//! `k_max`).

use crate::domains::{domain_volume, DomainSpec};
use crate::rational::render_rational;
use crate::sequences::{sequence_of_impl, CapacitySequence};
use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default number of indices scanned when the caller does not choose one.
pub const DEFAULT_K_MAX: u64 = 10_000;

/// Outcome of the index scan. Values are exact rationals rendered as
/// strings (`"11/5"`, `"2"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Verdict {
    /// Smallest index whose capacity comparison fails, with both values.
    Violation {
        index: u64,
        from_value: String,
        into_value: String,
    },
    /// No obstruction among the scanned indices. Not an existence claim.
    NoViolationUpTo { k_max: u64 },
}

/// Volume comparison attached to every report: `pass` iff
/// `vol(from) ≤ vol(into)`. Volumes are exact rationals as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VolumePrecheck {
    pub from_volume: String,
    pub into_volume: String,
    pub pass: bool,
}

/// Result of an obstruction scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub k_max_checked: u64,
    pub verdict: Verdict,
    pub volume_precheck: VolumePrecheck,
}

impl ObstructionReport {
    /// True when the scan found an obstruction.
    pub fn is_violation(&self) -> bool {
        matches!(self.verdict, Verdict::Violation { .. })
    }
}

/// Scans `k = 0..=k_max` for the smallest index with
/// `c_k(from) > c_k(into)`. Parallel under the `parallel` feature (the
/// minimum violating index is reduced deterministically); identical
/// output to [`check_embedding_seq`].
pub fn check_embedding(from: &DomainSpec, into: &DomainSpec, k_max: u64) -> ObstructionReport {
    check_impl(from, into, k_max, cfg!(feature = "parallel"))
}

/// Sequential variant of [`check_embedding`].
pub fn check_embedding_seq(from: &DomainSpec, into: &DomainSpec, k_max: u64) -> ObstructionReport {
    check_impl(from, into, k_max, false)
}

fn check_impl(
    from: &DomainSpec,
    into: &DomainSpec,
    k_max: u64,
    parallel: bool,
) -> ObstructionReport {
    let seq_from = sequence_of_impl(from, k_max, parallel);
    let seq_into = sequence_of_impl(into, k_max, parallel);

    let violating_index = smallest_violation(&seq_from, &seq_into, parallel);
    let verdict = match violating_index {
        Some(k) => Verdict::Violation {
            index: k,
            from_value: render_rational(&seq_from.value(k)),
            into_value: render_rational(&seq_into.value(k)),
        },
        None => Verdict::NoViolationUpTo { k_max },
    };

    let from_volume = domain_volume(from);
    let into_volume = domain_volume(into);
    ObstructionReport {
        k_max_checked: k_max,
        verdict,
        volume_precheck: VolumePrecheck {
            pass: from_volume <= into_volume,
            from_volume: render_rational(&from_volume),
            into_volume: render_rational(&into_volume),
        },
    }
}

/// Smallest `k` with `from[k] > into[k]`, comparing cross-multiplied
/// scaled numerators so no per-index reduction is needed.
fn smallest_violation(
    from: &CapacitySequence,
    into: &CapacitySequence,
    parallel: bool,
) -> Option<u64> {
    let (df, nf) = from.scaled();
    let (di, ni) = into.scaled();
    let len = nf.len().min(ni.len());
    let exceeds = |k: usize| &nf[k] * di > &ni[k] * df;

    #[cfg(feature = "parallel")]
    if parallel {
        return (0..len)
            .into_par_iter()
            .filter(|&k| exceeds(k))
            .min()
            .map(|k| k as u64);
    }
    let _ = parallel;
    (0..len).find(|&k| exceeds(k)).map(|k| k as u64)
}
