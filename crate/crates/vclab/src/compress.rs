//! Sample compression schemes: representation, verification, exhaustive
//! construction, and the transformations between variants.
//!
//! A scheme maps keys (a point set, a copy index, and for labelled
//! schemes a label per point) to hypothesis subsets of the domain.
//! Entry maps are partial: a key that is absent behaves as the all-zero
//! hypothesis, which is always a legal totalization because coverage
//! only ever requires that some good key exists.
//!
//! Orderings are fixed throughout and shared with the reports:
//! point sets compare by sorted index vector, traces by bit string, and
//! keys by (size, point set, labels, copy). The solver enumerates its
//! constraints by decreasing subset size and resolves values in key
//! order, so results are deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bits::{fn_lex_cmp, full_mask, masks_in_lex_order, set_lex_cmp, subsets_within, Bits};
use crate::bounds::binom_leq;
use crate::corespace::ConceptSpace;
use crate::{Error, Result, SCHEMA_VERSION};

/// Domain cap for full verification (enumerates every subset/trace pair).
pub const VERIFY_DOMAIN_CAP: usize = 16;
/// Default domain cap for the exhaustive solver.
pub const SOLVE_DOMAIN_CAP: usize = 12;
/// Cap on the key lattice size for copy widening.
pub const WIDEN_KEY_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Unlabelled,
    Labelled,
}

/// A compression key: point set, labels on those points (labelled
/// schemes only), and a 1-based copy index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchemeKey {
    pub points: u64,
    pub labels: u64,
    pub copy: u64,
}

impl SchemeKey {
    pub fn unlabelled(points: u64, copy: u64) -> Self {
        SchemeKey {
            points,
            labels: 0,
            copy,
        }
    }

    pub fn labelled(points: u64, labels: u64, copy: u64) -> Self {
        debug_assert_eq!(labels & !points, 0);
        SchemeKey {
            points,
            labels,
            copy,
        }
    }

    pub fn size(&self) -> usize {
        self.points.count_ones() as usize
    }
}

impl Ord for SchemeKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| set_lex_cmp(self.points, other.points))
            .then_with(|| fn_lex_cmp(self.labels, other.labels))
            .then_with(|| self.copy.cmp(&other.copy))
    }
}

impl PartialOrd for SchemeKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A (possibly partial) compression scheme over a domain of at most 64
/// points. `copies[i]` is the number of copies available to keys of
/// size i; all ones means a plain scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionScheme {
    size: usize,
    copies: Vec<u64>,
    kind: SchemeKind,
    domain_len: usize,
    entries: BTreeMap<SchemeKey, u64>,
}

impl CompressionScheme {
    pub fn new(size: usize, copies: Vec<u64>, kind: SchemeKind, domain_len: usize) -> Result<Self> {
        if copies.len() != size + 1 {
            return Err(Error::InvalidParam(format!(
                "copies must list one count per key size 0..={size}, got {} entries",
                copies.len()
            )));
        }
        if domain_len == 0 || domain_len > 64 {
            return Err(Error::CapExceeded {
                what: "scheme domain",
                limit: 64,
                actual: domain_len,
            });
        }
        Ok(CompressionScheme {
            size,
            copies,
            kind,
            domain_len,
            entries: BTreeMap::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn copies(&self) -> &[u64] {
        &self.copies
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn domain_len(&self) -> usize {
        self.domain_len
    }

    pub fn entries(&self) -> &BTreeMap<SchemeKey, u64> {
        &self.entries
    }

    pub fn is_plain(&self) -> bool {
        self.copies.iter().all(|&c| c == 1)
    }

    pub fn hypothesis(&self, key: &SchemeKey) -> u64 {
        self.entries.get(key).copied().unwrap_or(0)
    }

    pub fn insert_entry(&mut self, key: SchemeKey, hypothesis: u64) -> Result<()> {
        let sz = key.size();
        if sz > self.size {
            return Err(Error::InvalidParam(format!(
                "key has {sz} points but the scheme size is {}",
                self.size
            )));
        }
        if key.copy == 0 || key.copy > self.copies[sz] {
            return Err(Error::InvalidParam(format!(
                "copy index {} outside 1..={} for keys of size {sz}",
                key.copy, self.copies[sz]
            )));
        }
        if key.labels & !key.points != 0 {
            return Err(Error::InvalidParam("labels must sit on key points".into()));
        }
        if self.kind == SchemeKind::Unlabelled && key.labels != 0 {
            return Err(Error::InvalidParam(
                "unlabelled scheme keys carry no labels".into(),
            ));
        }
        if hypothesis & !full_mask(self.domain_len) != 0 {
            return Err(Error::InvalidParam(
                "hypothesis has bits outside the domain".into(),
            ));
        }
        if key.points & !full_mask(self.domain_len) != 0 {
            return Err(Error::InvalidParam(
                "key points fall outside the domain".into(),
            ));
        }
        if self.entries.insert(key, hypothesis).is_some() {
            return Err(Error::InvalidParam("duplicate scheme key".into()));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SchemeFileEntry {
    points: Vec<String>,
    copy: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<String>,
    hypothesis: String,
}

#[derive(Serialize, Deserialize)]
struct SchemeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema_version: Option<u32>,
    size: usize,
    copies: Vec<u64>,
    kind: SchemeKind,
    entries: Vec<SchemeFileEntry>,
}

/// Parses a scheme file against the space whose domain its point names
/// and hypothesis strings refer to.
pub fn load_scheme(bytes: &[u8], space: &ConceptSpace) -> Result<CompressionScheme> {
    let f: SchemeFile = serde_json::from_slice(bytes)?;
    let n = space.point_count();
    let mut scheme = CompressionScheme::new(f.size, f.copies, f.kind, n)?;
    for e in &f.entries {
        let mut points = 0u64;
        let mut labels = 0u64;
        let label_bits: Option<Vec<char>> = e.labels.as_ref().map(|s| s.chars().collect());
        if let Some(lb) = &label_bits {
            if f.kind == SchemeKind::Unlabelled {
                return Err(Error::InvalidParam(
                    "unlabelled scheme entries must not carry labels".into(),
                ));
            }
            if lb.len() != e.points.len() {
                return Err(Error::LengthMismatch {
                    expected: e.points.len(),
                    got: lb.len(),
                });
            }
        } else if f.kind == SchemeKind::Labelled && !e.points.is_empty() {
            return Err(Error::MissingParam("labels"));
        }
        for (i, name) in e.points.iter().enumerate() {
            let idx = space.point_index(name)?;
            let bit = 1u64 << idx;
            if points & bit != 0 {
                return Err(Error::DuplicatePoint(name.clone()));
            }
            points |= bit;
            if let Some(lb) = &label_bits {
                match lb[i] {
                    '1' => labels |= bit,
                    '0' => {}
                    other => {
                        return Err(Error::Parse(format!("invalid label character {other:?}")))
                    }
                }
            }
        }
        let hyp = Bits::from_bitstring(&e.hypothesis)?;
        if hyp.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: hyp.len(),
            });
        }
        scheme.insert_entry(
            SchemeKey {
                points,
                labels,
                copy: e.copy,
            },
            hyp.as_mask().unwrap(),
        )?;
    }
    Ok(scheme)
}

/// Canonical serialization: entries in key order, point names in domain
/// order, labels aligned with the points.
pub fn save_scheme(scheme: &CompressionScheme, space: &ConceptSpace) -> String {
    let n = space.point_count();
    let entries = scheme
        .entries
        .iter()
        .map(|(key, &hyp)| {
            let idxs: Vec<usize> = (0..n).filter(|&i| (key.points >> i) & 1 == 1).collect();
            SchemeFileEntry {
                points: idxs.iter().map(|&i| space.domain()[i].clone()).collect(),
                copy: key.copy,
                labels: match scheme.kind {
                    SchemeKind::Unlabelled => None,
                    SchemeKind::Labelled => Some(
                        idxs.iter()
                            .map(|&i| if (key.labels >> i) & 1 == 1 { '1' } else { '0' })
                            .collect(),
                    ),
                },
                hypothesis: Bits::from_mask(hyp, n).to_bitstring(),
            }
        })
        .collect();
    let file = SchemeFile {
        schema_version: Some(SCHEMA_VERSION),
        size: scheme.size,
        copies: scheme.copies.clone(),
        kind: scheme.kind,
        entries,
    };
    serde_json::to_string(&file).expect("scheme serialization cannot fail")
}

/// A sample with no covering key: the subset and the trace on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub points: Vec<String>,
    pub labels: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    Valid,
    Invalid(Counterexample),
}

impl VerifyOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, VerifyOutcome::Valid)
    }
}

fn render_counterexample(space: &ConceptSpace, a: u64, f: u64) -> Counterexample {
    let idxs: Vec<usize> = (0..space.point_count())
        .filter(|&i| (a >> i) & 1 == 1)
        .collect();
    Counterexample {
        points: idxs.iter().map(|&i| space.domain()[i].clone()).collect(),
        labels: idxs
            .iter()
            .map(|&i| if (f >> i) & 1 == 1 { '1' } else { '0' })
            .collect(),
    }
}

fn distinct_traces(concepts: &[u64], a: u64) -> Vec<u64> {
    let mut traces: Vec<u64> = concepts.iter().map(|&c| c & a).collect();
    traces.sort_unstable_by(|x, y| fn_lex_cmp(*x, *y));
    traces.dedup();
    traces
}

/// Number of legal key shapes inside `a`: sum over sizes of
/// C(|a|, i) * copies[i].
fn legal_shapes_within(a: u64, size: usize, copies: &[u64]) -> u128 {
    let k = a.count_ones() as u64;
    let mut total: u128 = 0;
    let mut c = 1u128; // C(k, 0)
    for i in 0..=size.min(k as usize) {
        total += c * copies[i] as u128;
        c = c * (k as u128 - i as u128) / (i as u128 + 1);
    }
    total
}

/// Checks coverage of every sample: for each nonempty subset A and each
/// trace f of the class on A there must be a key inside A whose
/// hypothesis restricts to f (labelled keys must also carry f's labels).
/// Missing keys count as all-zero hypotheses. On failure returns the
/// first violating (A, f) — subsets in index-vector order, traces in
/// bit-string order.
pub fn verify_scheme(space: &ConceptSpace, scheme: &CompressionScheme) -> Result<VerifyOutcome> {
    let n = space.point_count();
    if n > VERIFY_DOMAIN_CAP {
        return Err(Error::CapExceeded {
            what: "scheme verification",
            limit: VERIFY_DOMAIN_CAP,
            actual: n,
        });
    }
    if scheme.domain_len != n {
        return Err(Error::DomainMismatch(format!(
            "scheme is over {} points, space has {n}",
            scheme.domain_len
        )));
    }
    let concepts = space.distinct_concept_masks()?;

    // labelled entries whose labels disagree with their own hypothesis
    // can never cover a sample; they still occupy their key shape
    let usable: Vec<(u64, u64)> = scheme
        .entries
        .iter()
        .filter(|(k, &h)| scheme.kind == SchemeKind::Unlabelled || k.labels == h & k.points)
        .map(|(k, &h)| (k.points, h))
        .collect();
    let zero_shape_entries: Vec<u64> = scheme
        .entries
        .keys()
        .filter(|k| scheme.kind == SchemeKind::Unlabelled || k.labels == 0)
        .map(|k| k.points)
        .collect();

    for a in masks_in_lex_order(n) {
        let traces = distinct_traces(&concepts, a);
        let mut covered: HashSet<u64> = usable
            .iter()
            .filter(|(points, _)| points & !a == 0)
            .map(|(_, h)| h & a)
            .collect();
        // a missing key of a legal shape provides the all-zero hypothesis
        let defined = zero_shape_entries
            .iter()
            .filter(|&&points| points & !a == 0)
            .count() as u128;
        if defined < legal_shapes_within(a, scheme.size, &scheme.copies) {
            covered.insert(0);
        }
        for &f in &traces {
            if !covered.contains(&f) {
                return Ok(VerifyOutcome::Invalid(render_counterexample(space, a, f)));
            }
        }
    }
    Ok(VerifyOutcome::Valid)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Found,
    Unsat,
    CapExceeded,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub constraints: usize,
    pub wall_ms: u64,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub scheme: Option<CompressionScheme>,
    pub stats: SolveStats,
}

/// One coverage obligation: the trace `f` of some concept on subset `a`.
#[derive(Clone, Copy, Debug)]
struct Pair {
    a: u64,
    f: u64,
}

/// Constraint pairs ordered by decreasing |A|, then subset order, then
/// trace order.
fn build_pairs(concepts: &[u64], n: usize) -> Vec<Pair> {
    let mut subsets = masks_in_lex_order(n);
    subsets.sort_by_key(|a| std::cmp::Reverse(a.count_ones()));
    let mut pairs = Vec::new();
    for a in subsets {
        for f in distinct_traces(concepts, a) {
            pairs.push(Pair { a, f });
        }
    }
    pairs
}

/// Distinct keys usable by traces on `a`; traces on a common subset are
/// pairwise inconsistent, so this is an upper bound on how many of them
/// can be covered. Exceeding it proves unsatisfiability.
fn key_capacity(a: u64, traces: &[u64], size: usize, copies: &[u64], kind: SchemeKind) -> u128 {
    match kind {
        SchemeKind::Unlabelled => legal_shapes_within(a, size, copies),
        SchemeKind::Labelled => {
            let mut total: u128 = 0;
            for sigma in subsets_within(a, size) {
                let ni = copies[sigma.count_ones() as usize] as u128;
                if ni == 0 {
                    continue;
                }
                let mut labels: Vec<u64> = traces.iter().map(|&f| f & sigma).collect();
                labels.sort_unstable();
                labels.dedup();
                total += labels.len() as u128 * ni;
            }
            total
        }
    }
}

struct KeyState {
    pos: u64,
    neg: u64,
    assigned: Vec<u32>,
}

/// Exhaustive backtracking search for a scheme of the given size and
/// copy profile.
///
/// Every pair (A, f) is assigned a key inside A; all pairs sharing a key
/// must agree as partial functions, and the key's hypothesis is the
/// union of its assigned traces (zero elsewhere). The search is
/// chronological in the fixed pair order with conflict-directed
/// backjumping: a dead end jumps straight to the most recent assignment
/// that contributed a conflict, which cannot skip any assignment in the
/// fixed value order, so the first scheme found is the same one plain
/// backtracking would return. A per-subset counting precheck decides
/// many unsatisfiable instances outright.
pub fn solve_scheme(
    space: &ConceptSpace,
    size: usize,
    copies: &[u64],
    kind: SchemeKind,
    domain_cap: usize,
) -> Result<SolveResult> {
    let start = Instant::now();
    let n = space.point_count();
    if copies.len() != size + 1 {
        return Err(Error::InvalidParam(format!(
            "copies must list one count per key size 0..={size}, got {} entries",
            copies.len()
        )));
    }
    if n > domain_cap {
        return Ok(SolveResult {
            status: SolveStatus::CapExceeded,
            scheme: None,
            stats: SolveStats {
                nodes: 0,
                constraints: 0,
                wall_ms: start.elapsed().as_millis() as u64,
            },
        });
    }
    let concepts = space.distinct_concept_masks()?;
    let pairs = build_pairs(&concepts, n);
    let constraints = pairs.len();

    // counting precheck per subset
    for a in masks_in_lex_order(n) {
        let traces = distinct_traces(&concepts, a);
        if traces.len() as u128 > key_capacity(a, &traces, size, copies, kind) {
            return Ok(SolveResult {
                status: SolveStatus::Unsat,
                scheme: None,
                stats: SolveStats {
                    nodes: 0,
                    constraints,
                    wall_ms: start.elapsed().as_millis() as u64,
                },
            });
        }
    }

    // candidate point sets per subset, shared across its traces
    let mut sigma_cache: HashMap<u64, std::rc::Rc<Vec<u64>>> = HashMap::new();
    let sigma_list = |cache: &mut HashMap<u64, std::rc::Rc<Vec<u64>>>, a: u64| {
        cache
            .entry(a)
            .or_insert_with(|| std::rc::Rc::new(subsets_within(a, size)))
            .clone()
    };

    let total = pairs.len();
    let mut assigned_key: Vec<Option<SchemeKey>> = vec![None; total];
    let mut iter_pos: Vec<(usize, u64)> = vec![(0, 1); total];
    let mut conflicts: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); total];
    let mut key_states: HashMap<SchemeKey, KeyState> = HashMap::new();
    let mut nodes: u64 = 0;

    let unassign = |key_states: &mut HashMap<SchemeKey, KeyState>,
                    assigned_key: &mut Vec<Option<SchemeKey>>,
                    pairs: &[Pair],
                    j: usize| {
        if let Some(key) = assigned_key[j].take() {
            let st = key_states.get_mut(&key).expect("assigned key has state");
            let popped = st.assigned.pop();
            debug_assert_eq!(popped, Some(j as u32));
            st.pos = 0;
            st.neg = 0;
            for &idx in &st.assigned {
                let p = pairs[idx as usize];
                st.pos |= p.f;
                st.neg |= p.a & !p.f;
            }
        }
    };

    let mut i = 0usize;
    let status = loop {
        if i == total {
            break SolveStatus::Found;
        }
        let pair = pairs[i];
        let sigmas = sigma_list(&mut sigma_cache, pair.a);
        let neg_f = pair.a & !pair.f;
        let mut assigned = false;
        loop {
            let (si, copy) = iter_pos[i];
            if si >= sigmas.len() {
                break;
            }
            let sigma = sigmas[si];
            let ncopies = copies[sigma.count_ones() as usize];
            if copy > ncopies {
                iter_pos[i] = (si + 1, 1);
                continue;
            }
            iter_pos[i] = (si, copy + 1);
            nodes += 1;
            let key = match kind {
                SchemeKind::Unlabelled => SchemeKey::unlabelled(sigma, copy),
                SchemeKind::Labelled => SchemeKey::labelled(sigma, pair.f & sigma, copy),
            };
            let st = key_states.entry(key).or_insert_with(|| KeyState {
                pos: 0,
                neg: 0,
                assigned: Vec::new(),
            });
            if (st.pos & neg_f) | (st.neg & pair.f) != 0 {
                for &j in &st.assigned {
                    conflicts[i].insert(j);
                }
                continue;
            }
            st.pos |= pair.f;
            st.neg |= neg_f;
            st.assigned.push(i as u32);
            assigned_key[i] = Some(key);
            assigned = true;
            break;
        }
        if assigned {
            i += 1;
            continue;
        }
        // dead end: jump to the most recent contributor
        let Some(&h) = conflicts[i].iter().next_back() else {
            break SolveStatus::Unsat;
        };
        let h = h as usize;
        let blame: Vec<u32> = conflicts[i].iter().copied().filter(|&j| j as usize != h).collect();
        conflicts[h].extend(blame);
        conflicts[i].clear();
        iter_pos[i] = (0, 1);
        for j in ((h + 1)..i).rev() {
            unassign(&mut key_states, &mut assigned_key, &pairs, j);
            iter_pos[j] = (0, 1);
            conflicts[j].clear();
        }
        unassign(&mut key_states, &mut assigned_key, &pairs, h);
        i = h;
    };

    let stats = SolveStats {
        nodes,
        constraints,
        wall_ms: start.elapsed().as_millis() as u64,
    };
    if status != SolveStatus::Found {
        return Ok(SolveResult {
            status,
            scheme: None,
            stats,
        });
    }
    let mut scheme = CompressionScheme::new(size, copies.to_vec(), kind, n)?;
    let mut hyps: BTreeMap<SchemeKey, u64> = BTreeMap::new();
    for (j, key) in assigned_key.iter().enumerate() {
        let key = key.expect("complete assignment");
        *hyps.entry(key).or_insert(0) |= pairs[j].f;
    }
    for (key, hyp) in hyps {
        scheme.insert_entry(key, hyp)?;
    }
    debug_assert!(verify_scheme(space, &scheme)?.is_valid());
    Ok(SolveResult {
        status: SolveStatus::Found,
        scheme: Some(scheme),
        stats,
    })
}

/// Turns a verified unlabelled scheme into a labelled one of the same
/// size and copy profile: every sample's covering key is re-keyed by
/// the sample's labels on the key points, keeping the hypothesis.
pub fn to_labelled(space: &ConceptSpace, scheme: &CompressionScheme) -> Result<CompressionScheme> {
    if scheme.kind == SchemeKind::Labelled {
        return Err(Error::InvalidParam("input scheme is already labelled".into()));
    }
    match verify_scheme(space, scheme)? {
        VerifyOutcome::Valid => {}
        VerifyOutcome::Invalid(ce) => {
            return Err(Error::SchemeInvalid(format!(
                "sample {:?} labelled {} has no covering key",
                ce.points, ce.labels
            )))
        }
    }
    let n = space.point_count();
    let concepts = space.distinct_concept_masks()?;
    let mut out = CompressionScheme::new(scheme.size, scheme.copies.clone(), SchemeKind::Labelled, n)?;
    for a in masks_in_lex_order(n) {
        let sigmas = subsets_within(a, scheme.size);
        for f in distinct_traces(&concepts, a) {
            let mut chosen = None;
            'keys: for &sigma in &sigmas {
                for copy in 1..=scheme.copies[sigma.count_ones() as usize] {
                    let hyp = scheme.hypothesis(&SchemeKey::unlabelled(sigma, copy));
                    if hyp & a == f {
                        chosen = Some((sigma, copy, hyp));
                        break 'keys;
                    }
                }
            }
            let (sigma, copy, hyp) = chosen.expect("verified scheme covers every sample");
            let key = SchemeKey::labelled(sigma, f & sigma, copy);
            match out.entries.get(&key) {
                Some(&existing) => debug_assert_eq!(existing, hyp),
                None => out.insert_entry(key, hyp)?,
            }
        }
    }
    debug_assert!(verify_scheme(space, &out)?.is_valid());
    Ok(out)
}

/// Restricts a verified scheme to a subspace: keys inside the subset
/// survive with hypotheses cut down to it.
pub fn restrict_scheme(
    space: &ConceptSpace,
    scheme: &CompressionScheme,
    subset: &[String],
) -> Result<CompressionScheme> {
    match verify_scheme(space, scheme)? {
        VerifyOutcome::Valid => {}
        VerifyOutcome::Invalid(ce) => {
            return Err(Error::SchemeInvalid(format!(
                "sample {:?} labelled {} has no covering key",
                ce.points, ce.labels
            )))
        }
    }
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let idxs = space.indices_of(subset)?;
    let sub_mask: u64 = idxs.iter().fold(0, |m, &i| m | (1u64 << i));
    let remap = |mask: u64| -> u64 {
        idxs.iter()
            .enumerate()
            .fold(0u64, |m, (t, &i)| m | (((mask >> i) & 1) << t))
    };
    let mut out =
        CompressionScheme::new(scheme.size, scheme.copies.clone(), scheme.kind, idxs.len())?;
    for (key, &hyp) in &scheme.entries {
        if key.points & !sub_mask != 0 {
            continue;
        }
        out.insert_entry(
            SchemeKey {
                points: remap(key.points),
                labels: remap(key.labels),
                copy: key.copy,
            },
            remap(hyp),
        )?;
    }
    Ok(out)
}

/// The counting condition for trading scheme size against copies:
/// n * C(m, ≤k) ≥ C(m, ≤d), evaluated exactly.
pub fn widen_feasible(m: u64, d: u64, k: u64, n: u64) -> bool {
    num_bigint::BigUint::from(n) * binom_leq(m, k) >= binom_leq(m, d)
}

/// Rebuilds a plain size-d scheme as an n-copy scheme of size k ≤ d by
/// matching every key to a (subset, copy) slot with the subset inside
/// the original key. Feasibility of the counting condition is checked
/// first; whether a subset-respecting perfect matching must then exist
/// is a separate question, so matching failure is reported as its own
/// error rather than folded into infeasibility.
pub fn widen_to_copies(
    space: &ConceptSpace,
    scheme: &CompressionScheme,
    k: usize,
    n: u64,
) -> Result<CompressionScheme> {
    let m = space.point_count();
    if scheme.domain_len != m {
        return Err(Error::DomainMismatch(format!(
            "scheme is over {} points, space has {m}",
            scheme.domain_len
        )));
    }
    if scheme.kind != SchemeKind::Unlabelled || !scheme.is_plain() {
        return Err(Error::InvalidParam(
            "copy widening expects a plain unlabelled scheme".into(),
        ));
    }
    let d = scheme.size;
    if k > d {
        return Err(Error::InvalidParam(format!(
            "target size {k} exceeds the scheme size {d}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParam("copy count must be at least 1".into()));
    }
    if !widen_feasible(m as u64, d as u64, k as u64, n) {
        return Err(Error::Infeasible(format!(
            "{n} * C({m}, <={k}) < C({m}, <={d})"
        )));
    }
    let key_count = binom_leq(m as u64, d as u64);
    if key_count > num_bigint::BigUint::from(WIDEN_KEY_CAP) {
        return Err(Error::CapExceeded {
            what: "widening key lattice",
            limit: WIDEN_KEY_CAP,
            actual: usize::MAX,
        });
    }

    let full = full_mask(m);
    let lefts = subsets_within(full, d);
    let rights = subsets_within(full, k);
    let right_index: HashMap<u64, usize> =
        rights.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let cap = usize::try_from(n).unwrap_or(usize::MAX);

    // Kuhn's augmenting paths over the subset-containment graph, rights
    // carrying capacity n
    let mut left_to_right: Vec<Option<usize>> = vec![None; lefts.len()];
    let mut occupants: Vec<Vec<usize>> = vec![Vec::new(); rights.len()];

    fn augment(
        l: usize,
        lefts: &[u64],
        right_index: &HashMap<u64, usize>,
        k: usize,
        cap: usize,
        left_to_right: &mut Vec<Option<usize>>,
        occupants: &mut Vec<Vec<usize>>,
        visited: &mut Vec<bool>,
    ) -> bool {
        for cand in subsets_within(lefts[l], k) {
            let r = right_index[&cand];
            if visited[r] {
                continue;
            }
            visited[r] = true;
            if occupants[r].len() < cap {
                occupants[r].push(l);
                left_to_right[l] = Some(r);
                return true;
            }
            for slot in 0..occupants[r].len() {
                let other = occupants[r][slot];
                if augment(
                    other,
                    lefts,
                    right_index,
                    k,
                    cap,
                    left_to_right,
                    occupants,
                    visited,
                ) {
                    occupants[r][slot] = l;
                    left_to_right[l] = Some(r);
                    return true;
                }
            }
        }
        false
    }

    for l in 0..lefts.len() {
        let mut visited = vec![false; rights.len()];
        if !augment(
            l,
            &lefts,
            &right_index,
            k,
            cap,
            &mut left_to_right,
            &mut occupants,
            &mut visited,
        ) {
            return Err(Error::MatchingFailed(format!(
                "no slot for the key on {} points with mask {:#b}",
                lefts[l].count_ones(),
                lefts[l]
            )));
        }
    }

    // copy indices handed out in key order per target subset
    let mut next_copy: Vec<u64> = vec![1; rights.len()];
    let mut out = CompressionScheme::new(k, vec![n; k + 1], SchemeKind::Unlabelled, m)?;
    for (l, &sigma) in lefts.iter().enumerate() {
        let r = left_to_right[l].expect("perfect matching");
        let copy = next_copy[r];
        next_copy[r] += 1;
        let hyp = scheme.hypothesis(&SchemeKey::unlabelled(sigma, 1));
        out.insert_entry(SchemeKey::unlabelled(rights[r], copy), hyp)?;
    }
    Ok(out)
}

/// Combines verified plain schemes for classes covering the target
/// class into one copy scheme: size is the largest part size, the copy
/// count at key size i is the number of parts of size at least i, and
/// copy l routes to the l-th largest part.
pub fn cover_to_copy_scheme(
    space: &ConceptSpace,
    parts: &[(ConceptSpace, CompressionScheme)],
) -> Result<CompressionScheme> {
    if parts.is_empty() {
        return Err(Error::InvalidParam("cover needs at least one part".into()));
    }
    for (part_space, part_scheme) in parts {
        if part_space.domain() != space.domain() {
            return Err(Error::DomainMismatch(
                "cover parts must share the target domain".into(),
            ));
        }
        if part_scheme.kind != SchemeKind::Unlabelled || !part_scheme.is_plain() {
            return Err(Error::InvalidParam(
                "cover parts must be plain unlabelled schemes".into(),
            ));
        }
        match verify_scheme(part_space, part_scheme)? {
            VerifyOutcome::Valid => {}
            VerifyOutcome::Invalid(ce) => {
                return Err(Error::SchemeInvalid(format!(
                    "cover part fails on sample {:?} labelled {}",
                    ce.points, ce.labels
                )))
            }
        }
    }
    let mut covered: HashSet<u64> = HashSet::new();
    for (part_space, _) in parts {
        covered.extend(part_space.distinct_concept_masks()?);
    }
    for c in space.distinct_concept_masks()? {
        if !covered.contains(&c) {
            return Err(Error::CoverageGap(format!(
                "concept {} is in no part",
                Bits::from_mask(c, space.point_count()).to_bitstring()
            )));
        }
    }

    let mut order: Vec<usize> = (0..parts.len()).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(parts[j].1.size));
    let k = parts[order[0]].1.size;
    let copies: Vec<u64> = (0..=k)
        .map(|i| parts.iter().filter(|(_, s)| s.size >= i).count() as u64)
        .collect();

    let mut out = CompressionScheme::new(k, copies, SchemeKind::Unlabelled, space.point_count())?;
    for (pos, &j) in order.iter().enumerate() {
        let copy = (pos + 1) as u64;
        for (key, &hyp) in &parts[j].1.entries {
            out.insert_entry(SchemeKey::unlabelled(key.points, copy), hyp)?;
        }
    }
    match verify_scheme(space, &out)? {
        VerifyOutcome::Valid => Ok(out),
        VerifyOutcome::Invalid(ce) => Err(Error::SchemeInvalid(format!(
            "combined cover scheme misses sample {:?} labelled {}",
            ce.points, ce.labels
        ))),
    }
}

/// Copy profile equivalent to a length-d array encoding with a padding
/// symbol: n_i counts the length-d sequences over an i-set plus padding
/// that mention all i elements (inclusion-exclusion).
pub fn array_scheme_copies(d: u32) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(d as usize + 1);
    for i in 0..=d {
        let mut acc: i128 = 0;
        for j in 0..=i {
            let c = num_traits::ToPrimitive::to_i128(&binom(i as u64, j as u64))
                .ok_or_else(|| Error::InvalidParam("array profile overflow".into()))?;
            let base = (i - j + 1) as i128;
            let pow = base
                .checked_pow(d)
                .ok_or_else(|| Error::InvalidParam("array profile overflow".into()))?;
            let term = c
                .checked_mul(pow)
                .ok_or_else(|| Error::InvalidParam("array profile overflow".into()))?;
            acc = if j % 2 == 0 { acc + term } else { acc - term };
        }
        out.push(
            u64::try_from(acc)
                .map_err(|_| Error::InvalidParam("array profile overflow".into()))?,
        );
    }
    Ok(out)
}

use crate::bounds::binom;

/// Copy profile of a size-k scheme extended with b side bits: 2^b
/// uniform copies.
pub fn extended_bits_copies(k: usize, b: u32) -> Result<Vec<u64>> {
    if b >= 64 {
        return Err(Error::InvalidParam("bit width must be below 64".into()));
    }
    Ok(vec![1u64 << b; k + 1])
}
