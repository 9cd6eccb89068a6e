//! Shattering tests, exact VC dimension with shatter coefficients, and
//! maximum/maximal classification for finite spaces.
//!
//! Subset enumeration is exact and layered by size. The caps below are
//! hard limits: exceeding one is an error, never a silent approximation.

use crate::bits::{combination_masks, full_mask};
use crate::corespace::{ConceptSpace, RelationSpace};
use crate::{Error, Result};

/// Domain cap for `vc_dimension` (subset enumeration over all sizes).
pub const VC_DOMAIN_CAP: usize = 24;
/// Domain cap for the maximum/maximal checks (2^n subset scans).
pub const MAXIMUM_DOMAIN_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcReport {
    pub vc: usize,
    /// A shattered subset of maximum size; lexicographically first by
    /// index vector among those.
    pub witness: Vec<String>,
    /// Exact s(C, n) for n = 0..=|domain|.
    pub shatter_coeffs: Vec<u64>,
}

/// Number of distinct traces `{c ∩ a : c ∈ concepts}`.
fn trace_count(concepts: &[u64], a: u64, scratch: &mut Vec<u64>) -> usize {
    scratch.clear();
    scratch.extend(concepts.iter().map(|&c| c & a));
    scratch.sort_unstable();
    scratch.dedup();
    scratch.len()
}

/// True iff the subset is shattered: every one of its 2^|A| subsets
/// appears as a trace.
pub fn is_shattered(space: &ConceptSpace, subset: &[String]) -> Result<bool> {
    let concepts = space.distinct_concept_masks()?;
    let idxs = space.indices_of(subset)?;
    let a = idxs.iter().fold(0u64, |m, &i| m | (1u64 << i));
    Ok(shattered_mask(&concepts, a))
}

fn shattered_mask(concepts: &[u64], a: u64) -> bool {
    let k = a.count_ones() as usize;
    if k >= 64 || concepts.len() < (1usize << k) {
        return k == 0; // the empty set is always shattered
    }
    let mut scratch = Vec::new();
    trace_count(concepts, a, &mut scratch) == (1usize << k)
}

/// Exact VC dimension, witness, and all shatter coefficients.
///
/// Layers are scanned in increasing subset size. Within a layer the scan
/// stops early once the coefficient has provably peaked; once the
/// coefficient saturates at the number of distinct concepts, later
/// layers are filled without enumeration (no shattering is possible
/// there because s(C, n) ≤ 2^n forces 2^n > |C| past saturation).
pub fn vc_dimension(space: &ConceptSpace) -> Result<VcReport> {
    let n = space.point_count();
    if n > VC_DOMAIN_CAP {
        return Err(Error::CapExceeded {
            what: "vc subset enumeration",
            limit: VC_DOMAIN_CAP,
            actual: n,
        });
    }
    let concepts = space.distinct_concept_masks()?;
    let distinct = concepts.len() as u64;

    let mut coeffs = vec![0u64; n + 1];
    coeffs[0] = 1;
    let mut vc = 0usize;
    let mut witness_mask = 0u64;
    let mut scratch = Vec::new();

    for k in 1..=n {
        if coeffs[k - 1] == distinct {
            coeffs[k] = distinct;
            continue;
        }
        let layer_cap = if k < 63 {
            distinct.min(1u64 << k)
        } else {
            distinct
        };
        let shatter_possible = k < 63 && distinct >= (1u64 << k);
        let mut layer_max = 0u64;
        let mut layer_witness: Option<u64> = None;
        for a in combination_masks(n, k) {
            let t = trace_count(&concepts, a, &mut scratch) as u64;
            if t > layer_max {
                layer_max = t;
            }
            if shatter_possible && t == (1u64 << k) && layer_witness.is_none() {
                layer_witness = Some(a);
            }
            // the layer peak is reached and no witness can still appear
            if layer_max == layer_cap && (!shatter_possible || layer_witness.is_some()) {
                break;
            }
        }
        coeffs[k] = layer_max;
        if let Some(w) = layer_witness {
            vc = k;
            witness_mask = w;
        }
    }

    let witness = (0..n)
        .filter(|&i| (witness_mask >> i) & 1 == 1)
        .map(|i| space.domain()[i].clone())
        .collect();
    Ok(VcReport {
        vc,
        witness,
        shatter_coeffs: coeffs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaximumMode {
    /// Check |C ⊓ A| = C(|A|, ≤d) for every subset A of the domain.
    Definition,
    /// Check |C| = C(|X|, ≤d); requires vc = d, which makes the two
    /// modes equivalent on finite spaces.
    Cardinality,
}

/// Small-range binomial tail sum, enough for domains within the caps.
fn binom_leq_u64(m: usize, d: usize) -> u64 {
    let mut total = 0u64;
    let mut term = 1u64; // C(m, 0)
    for i in 0..=d.min(m) {
        total += term;
        term = term * ((m - i) as u64) / ((i + 1) as u64);
    }
    total
}

pub fn is_maximum(space: &ConceptSpace, d: usize, mode: MaximumMode) -> Result<bool> {
    let n = space.point_count();
    match mode {
        MaximumMode::Definition => {
            if n > MAXIMUM_DOMAIN_CAP {
                return Err(Error::CapExceeded {
                    what: "maximum definition check",
                    limit: MAXIMUM_DOMAIN_CAP,
                    actual: n,
                });
            }
            let concepts = space.distinct_concept_masks()?;
            let mut scratch = Vec::new();
            for a in 0..=full_mask(n) {
                let k = a.count_ones() as usize;
                if trace_count(&concepts, a, &mut scratch) as u64 != binom_leq_u64(k, d) {
                    return Ok(false);
                }
                if a == full_mask(n) {
                    break;
                }
            }
            Ok(true)
        }
        MaximumMode::Cardinality => {
            let report = vc_dimension(space)?;
            if report.vc != d {
                return Err(Error::VcMismatch {
                    expected: d,
                    actual: report.vc,
                });
            }
            let distinct = space.distinct_concept_masks()?.len() as u64;
            Ok(distinct == binom_leq_u64(n, d))
        }
    }
}

/// True iff adding any missing concept raises the VC dimension above
/// `d`. Uses the single-missing-trace characterization: a candidate D
/// raises vc exactly when some (d+1)-subset A has all traces except
/// D ∩ A.
pub fn is_maximal(space: &ConceptSpace, d: usize) -> Result<bool> {
    let n = space.point_count();
    if n > MAXIMUM_DOMAIN_CAP {
        return Err(Error::CapExceeded {
            what: "maximal check",
            limit: MAXIMUM_DOMAIN_CAP,
            actual: n,
        });
    }
    let report = vc_dimension(space)?;
    if report.vc != d {
        return Err(Error::VcMismatch {
            expected: d,
            actual: report.vc,
        });
    }
    let concepts = space.distinct_concept_masks()?;
    let concept_set: std::collections::HashSet<u64> = concepts.iter().copied().collect();

    // subsets of size d+1 whose trace set misses exactly one trace,
    // together with that missing trace
    let mut single_missing: Vec<(u64, u64)> = Vec::new();
    if d + 1 <= n {
        let mut scratch = Vec::new();
        for a in combination_masks(n, d + 1) {
            scratch.clear();
            scratch.extend(concepts.iter().map(|&c| c & a));
            scratch.sort_unstable();
            scratch.dedup();
            let want = 1usize << (d + 1);
            if scratch.len() == want - 1 {
                // find the absent trace by scanning submasks of a
                let mut sub = a;
                let missing = loop {
                    if scratch.binary_search(&sub).is_err() {
                        break sub;
                    }
                    if sub == 0 {
                        unreachable!("one trace must be absent");
                    }
                    sub = (sub - 1) & a;
                };
                single_missing.push((a, missing));
            }
        }
    }

    for candidate in 0..=full_mask(n) {
        if !concept_set.contains(&candidate) {
            let raises = single_missing
                .iter()
                .any(|&(a, missing)| candidate & a == missing);
            if !raises {
                return Ok(false);
            }
        }
        if candidate == full_mask(n) {
            break;
        }
    }
    Ok(true)
}

/// VC dimension of a relation space, seen as the class of its columns
/// over the left points.
pub fn relation_vc(rs: &RelationSpace) -> Result<usize> {
    Ok(vc_dimension(&rs.to_concept_space(true)?)?.vc)
}
