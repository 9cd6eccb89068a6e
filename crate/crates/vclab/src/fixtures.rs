//! Named fixture spaces and schemes used by the test suites and the
//! `gen` command, so no table is ever hand-copied twice.

use crate::compress::{CompressionScheme, SchemeKey, SchemeKind};
use crate::corespace::{ConceptSpace, RelationSpace};
use crate::bits::Bits;
use crate::pacsim::SplitMix64;

fn point_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("p{i}")).collect()
}

/// Four points, ten concepts; 2-maximal but not 2-maximum.
pub fn example_124_space() -> ConceptSpace {
    let domain = vec!["1", "2", "3", "4"].into_iter().map(String::from).collect();
    // {1} {2} {3} {1,2} {1,3} {2,3} {1,4} {2,4} {3,4} {1,2,3}
    let masks = [
        0b0001, 0b0010, 0b0100, 0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100, 0b0111,
    ];
    ConceptSpace::from_masks(domain, &masks, true).unwrap()
}

/// Four points, ten concepts; the other 2-maximal non-maximum class.
pub fn example_125_space() -> ConceptSpace {
    let domain = vec!["1", "2", "3", "4"].into_iter().map(String::from).collect();
    // {1} {2} {1,2} {1,3} {2,3} {1,4} {2,4} {3,4} {1,2,3} {1,2,4}
    let masks = [
        0b0001, 0b0010, 0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100, 0b0111, 0b1011,
    ];
    ConceptSpace::from_masks(domain, &masks, true).unwrap()
}

/// Initial segments plus the empty set on a chain p1 < ... < pn.
pub fn chain_space(n: usize) -> ConceptSpace {
    assert!(n >= 1 && n <= 64);
    let mut masks = vec![0u64];
    for k in 1..=n {
        masks.push(crate::bits::full_mask(k));
    }
    ConceptSpace::from_masks(point_names(n), &masks, true).unwrap()
}

/// The size-1 scheme on a chain: every singleton key maps to the
/// initial segment it tops, the empty key to the empty set.
pub fn chain_scheme(n: usize) -> CompressionScheme {
    let mut scheme = CompressionScheme::new(1, vec![1, 1], SchemeKind::Unlabelled, n).unwrap();
    scheme
        .insert_entry(SchemeKey::unlabelled(0, 1), 0)
        .unwrap();
    for x in 0..n {
        let segment = crate::bits::full_mask(x + 1);
        scheme
            .insert_entry(SchemeKey::unlabelled(1 << x, 1), segment)
            .unwrap();
    }
    scheme
}

/// The paired variant: singleton keys map to the open segment below the
/// point, the empty key to the whole domain.
pub fn chain_scheme_prime(n: usize) -> CompressionScheme {
    let mut scheme = CompressionScheme::new(1, vec![1, 1], SchemeKind::Unlabelled, n).unwrap();
    scheme
        .insert_entry(SchemeKey::unlabelled(0, 1), crate::bits::full_mask(n))
        .unwrap();
    for x in 0..n {
        let below = crate::bits::full_mask(x + 1) & !(1u64 << x);
        scheme
            .insert_entry(SchemeKey::unlabelled(1 << x, 1), below)
            .unwrap();
    }
    scheme
}

/// The broken pairing used as a verification counterexample: singleton
/// keys from the plain scheme with the empty key sent to the full
/// domain. All-zero samples end up with no covering key.
pub fn chain_scheme_mismatched(n: usize) -> CompressionScheme {
    let mut scheme = CompressionScheme::new(1, vec![1, 1], SchemeKind::Unlabelled, n).unwrap();
    scheme
        .insert_entry(SchemeKey::unlabelled(0, 1), crate::bits::full_mask(n))
        .unwrap();
    for x in 0..n {
        let segment = crate::bits::full_mask(x + 1);
        scheme
            .insert_entry(SchemeKey::unlabelled(1 << x, 1), segment)
            .unwrap();
    }
    scheme
}

/// Five points carrying the power set of {1,2}.
pub fn example_245_space() -> ConceptSpace {
    let domain = (1..=5).map(|i| i.to_string()).collect();
    ConceptSpace::from_masks(domain, &[0b00, 0b01, 0b10, 0b11], true).unwrap()
}

/// The 4-copy size-0 scheme enumerating that power set.
pub fn example_245_scheme() -> CompressionScheme {
    let mut scheme = CompressionScheme::new(0, vec![4], SchemeKind::Unlabelled, 5).unwrap();
    for (l, mask) in [0b00u64, 0b01, 0b10, 0b11].into_iter().enumerate() {
        scheme
            .insert_entry(SchemeKey::unlabelled(0, (l + 1) as u64), mask)
            .unwrap();
    }
    scheme
}

/// Same class as `example_124_space`.
pub fn example_246_space() -> ConceptSpace {
    example_124_space()
}

/// The published 10-entry table for a 2-copy size-1 scheme on that
/// class, reproduced verbatim. Note: as printed it does not satisfy the
/// coverage condition (the sample 1↦0, 2↦1, 3↦1 on {1,2,3} has no
/// covering key), which the verifier reports; a correct table of the
/// same shape does exist and the solver finds one.
pub fn example_246_scheme() -> CompressionScheme {
    let mut scheme = CompressionScheme::new(1, vec![2, 2], SchemeKind::Unlabelled, 4).unwrap();
    let table: [(u64, u64, u64); 10] = [
        (0b0000, 1, 0b0011), // {} x1 -> {1,2}
        (0b0000, 2, 0b1100), // {} x2 -> {3,4}
        (0b0001, 1, 0b0100), // {1} x1 -> {3}
        (0b0001, 2, 0b0101), // {1} x2 -> {1,3}
        (0b0010, 1, 0b0001), // {2} x1 -> {1}
        (0b0010, 2, 0b1010), // {2} x2 -> {2,4}
        (0b0100, 1, 0b0010), // {3} x1 -> {2}
        (0b0100, 2, 0b0111), // {3} x2 -> {1,2,3}
        (0b1000, 1, 0b0110), // {4} x1 -> {2,3}
        (0b1000, 2, 0b1001), // {4} x2 -> {1,4}
    ];
    for (points, copy, hyp) in table {
        scheme
            .insert_entry(SchemeKey::unlabelled(points, copy), hyp)
            .unwrap();
    }
    scheme
}

/// Power set on n points, concepts in mask order.
pub fn power_set_space(n: usize) -> ConceptSpace {
    assert!(n >= 1 && n <= 16);
    let masks: Vec<u64> = (0..(1u64 << n)).collect();
    ConceptSpace::from_masks(point_names(n), &masks, true).unwrap()
}

/// All subsets of size at most d on n points, in mask order.
pub fn size_at_most_d_space(n: usize, d: usize) -> ConceptSpace {
    assert!(n >= 1 && n <= 24);
    let masks: Vec<u64> = (0..(1u64 << n))
        .filter(|m| (m.count_ones() as usize) <= d)
        .collect();
    ConceptSpace::from_masks(point_names(n), &masks, true).unwrap()
}

/// Final segments plus the empty set on a chain; the mirror image of
/// `chain_space`.
pub fn final_segments_space(n: usize) -> ConceptSpace {
    assert!(n >= 1 && n <= 64);
    let full = crate::bits::full_mask(n);
    let mut masks = vec![0u64];
    for k in 0..n {
        masks.push(full & !crate::bits::full_mask(k));
    }
    ConceptSpace::from_masks(point_names(n), &masks, true).unwrap()
}

/// Size-1 scheme for final segments: a singleton key holds the segment
/// it starts.
pub fn final_segments_scheme(n: usize) -> CompressionScheme {
    let full = crate::bits::full_mask(n);
    let mut scheme = CompressionScheme::new(1, vec![1, 1], SchemeKind::Unlabelled, n).unwrap();
    scheme.insert_entry(SchemeKey::unlabelled(0, 1), 0).unwrap();
    for x in 0..n {
        let segment = full & !crate::bits::full_mask(x);
        scheme
            .insert_entry(SchemeKey::unlabelled(1 << x, 1), segment)
            .unwrap();
    }
    scheme
}

/// Five plane points (four axis extremes and the center) with all
/// axis-aligned rectangle traces. Bounds are swept over a grid fine
/// enough to realize every distinct trace.
pub fn rectangle_truncation_space() -> ConceptSpace {
    let points: [(f64, f64); 5] = [(-1.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (0.0, 0.0)];
    let domain: Vec<String> = ["(-1,0)", "(1,0)", "(0,1)", "(0,-1)", "(0,0)"]
        .into_iter()
        .map(String::from)
        .collect();
    let grid = [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5];
    let mut masks: Vec<u64> = Vec::new();
    for (ai, &a) in grid.iter().enumerate() {
        for &b in &grid[ai..] {
            for (ci, &c) in grid.iter().enumerate() {
                for &d in &grid[ci..] {
                    let mut mask = 0u64;
                    for (i, &(x, y)) in points.iter().enumerate() {
                        if a <= x && x <= b && c <= y && y <= d {
                            mask |= 1 << i;
                        }
                    }
                    masks.push(mask);
                }
            }
        }
    }
    ConceptSpace::from_masks(domain, &masks, true).unwrap()
}

/// Random space with up to `max_points` points and `max_concepts`
/// concepts (duplicates collapsed). Deterministic in the generator
/// state.
pub fn random_space(rng: &mut SplitMix64, max_points: usize, max_concepts: usize) -> ConceptSpace {
    let n = 1 + (rng.next_u64() as usize) % max_points;
    let k = 1 + (rng.next_u64() as usize) % max_concepts;
    let full = crate::bits::full_mask(n);
    let masks: Vec<u64> = (0..k).map(|_| rng.next_u64() & full).collect();
    ConceptSpace::from_masks(point_names(n), &masks, true).unwrap()
}

/// Random bipartite relation with sides up to the given limits.
pub fn random_relation(rng: &mut SplitMix64, max_left: usize, max_right: usize) -> RelationSpace {
    let l = 1 + (rng.next_u64() as usize) % max_left;
    let r = 1 + (rng.next_u64() as usize) % max_right;
    let rows = (0..l)
        .map(|_| {
            let mask = rng.next_u64() & crate::bits::full_mask(r);
            Bits::from_mask(mask, r)
        })
        .collect();
    RelationSpace::new(point_names(l), (1..=r).map(|i| format!("q{i}")).collect(), rows).unwrap()
}
