//! Concept spaces over finite domains: construction and serialization,
//! restriction to subspaces, the relation form with its dual, and
//! embedding verification/search.
//!
//! All values are immutable after construction and every operation is a
//! pure function, so everything here is safe to share across threads.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::{full_mask, set_lex_cmp, Bits};
use crate::{Error, Result, SCHEMA_VERSION};

/// A finite domain of named points together with a family of concepts,
/// each stored as a bit-vector over the domain ordering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConceptSpace {
    domain: Vec<String>,
    concepts: Vec<Bits>,
    index: HashMap<String, usize>,
}

impl ConceptSpace {
    /// Validates the invariants: nonempty domain of distinct names, a
    /// nonempty concept list, and one bit per point in every concept.
    /// With `dedup` set, duplicate concept vectors are dropped keeping
    /// the first occurrence.
    pub fn new(domain: Vec<String>, concepts: Vec<Bits>, dedup: bool) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut index = HashMap::with_capacity(domain.len());
        for (i, name) in domain.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicatePoint(name.clone()));
            }
        }
        if concepts.is_empty() {
            return Err(Error::EmptyConcepts);
        }
        for c in &concepts {
            if c.len() != domain.len() {
                return Err(Error::LengthMismatch {
                    expected: domain.len(),
                    got: c.len(),
                });
            }
        }
        let concepts = if dedup {
            let mut seen = std::collections::HashSet::new();
            concepts
                .into_iter()
                .filter(|c| seen.insert(c.clone()))
                .collect()
        } else {
            concepts
        };
        Ok(ConceptSpace {
            domain,
            concepts,
            index,
        })
    }

    /// Convenience constructor from point-set masks over a domain of at
    /// most 64 points.
    pub fn from_masks(domain: Vec<String>, masks: &[u64], dedup: bool) -> Result<Self> {
        let n = domain.len();
        if n > 64 {
            return Err(Error::CapExceeded {
                what: "mask-based construction",
                limit: 64,
                actual: n,
            });
        }
        let concepts = masks.iter().map(|&m| Bits::from_mask(m, n)).collect();
        ConceptSpace::new(domain, concepts, dedup)
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn concepts(&self) -> &[Bits] {
        &self.concepts
    }

    pub fn point_count(&self) -> usize {
        self.domain.len()
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn point_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    /// Indices of the named points, sorted ascending with duplicates
    /// collapsed.
    pub fn indices_of(&self, names: &[String]) -> Result<Vec<usize>> {
        let mut idxs = names
            .iter()
            .map(|n| self.point_index(n))
            .collect::<Result<Vec<_>>>()?;
        idxs.sort_unstable();
        idxs.dedup();
        Ok(idxs)
    }

    /// Concepts as single-word masks; requires at most 64 points.
    pub fn concept_masks(&self) -> Result<Vec<u64>> {
        if self.domain.len() > 64 {
            return Err(Error::CapExceeded {
                what: "bitmask operations",
                limit: 64,
                actual: self.domain.len(),
            });
        }
        Ok(self.concepts.iter().map(|c| c.as_mask().unwrap()).collect())
    }

    /// Distinct concept masks, sorted ascending.
    pub fn distinct_concept_masks(&self) -> Result<Vec<u64>> {
        let mut masks = self.concept_masks()?;
        masks.sort_unstable();
        masks.dedup();
        Ok(masks)
    }

    /// The subspace over `subset`: traces of every concept on the subset,
    /// deduplicated and ordered lexicographically by bit-vector. Point
    /// order follows the parent domain.
    pub fn restrict(&self, subset: &[String]) -> Result<ConceptSpace> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let idxs = self.indices_of(subset)?;
        let mut traces: Vec<Bits> = self.concepts.iter().map(|c| c.gather(&idxs)).collect();
        traces.sort();
        traces.dedup();
        let domain: Vec<String> = idxs.iter().map(|&i| self.domain[i].clone()).collect();
        ConceptSpace::new(domain, traces, false)
    }

    /// Relation form: left side is the domain, right side is the concept
    /// list (named by index), and cell (i, j) holds concept j's bit i.
    /// With `reduce`, points with identical concept membership and
    /// concepts with identical extensions are collapsed to their first
    /// occurrence.
    pub fn to_relation(&self, reduce: bool) -> RelationSpace {
        let left: Vec<String> = self.domain.clone();
        let right: Vec<String> = (0..self.concepts.len()).map(|j| j.to_string()).collect();
        let rows: Vec<Bits> = (0..self.domain.len())
            .map(|i| {
                let mut row = Bits::zeros(self.concepts.len());
                for (j, c) in self.concepts.iter().enumerate() {
                    if c.get(i) {
                        row.set(j, true);
                    }
                }
                row
            })
            .collect();
        let rs = RelationSpace { left, right, rows };
        if reduce {
            rs.reduced()
        } else {
            rs
        }
    }
}

/// A bipartite boolean relation: rows are left points, columns are right
/// points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSpace {
    left: Vec<String>,
    right: Vec<String>,
    rows: Vec<Bits>,
}

impl RelationSpace {
    pub fn new(left: Vec<String>, right: Vec<String>, rows: Vec<Bits>) -> Result<Self> {
        if rows.len() != left.len() {
            return Err(Error::LengthMismatch {
                expected: left.len(),
                got: rows.len(),
            });
        }
        for row in &rows {
            if row.len() != right.len() {
                return Err(Error::LengthMismatch {
                    expected: right.len(),
                    got: row.len(),
                });
            }
        }
        Ok(RelationSpace { left, right, rows })
    }

    pub fn left_len(&self) -> usize {
        self.left.len()
    }

    pub fn right_len(&self) -> usize {
        self.right.len()
    }

    pub fn left_names(&self) -> &[String] {
        &self.left
    }

    pub fn right_names(&self) -> &[String] {
        &self.right
    }

    pub fn get(&self, l: usize, r: usize) -> bool {
        self.rows[l].get(r)
    }

    /// The transpose with left and right swapped. An involution, bit for
    /// bit.
    pub fn dual(&self) -> RelationSpace {
        let rows: Vec<Bits> = (0..self.right.len())
            .map(|r| {
                let mut row = Bits::zeros(self.left.len());
                for l in 0..self.left.len() {
                    if self.get(l, r) {
                        row.set(l, true);
                    }
                }
                row
            })
            .collect();
        RelationSpace {
            left: self.right.clone(),
            right: self.left.clone(),
            rows,
        }
    }

    /// View as a concept space: domain = left points, one concept per
    /// right point (its column).
    pub fn to_concept_space(&self, dedup: bool) -> Result<ConceptSpace> {
        let concepts: Vec<Bits> = (0..self.right.len())
            .map(|r| {
                let mut col = Bits::zeros(self.left.len());
                for l in 0..self.left.len() {
                    if self.get(l, r) {
                        col.set(l, true);
                    }
                }
                col
            })
            .collect();
        ConceptSpace::new(self.left.clone(), concepts, dedup)
    }

    /// Collapse duplicate rows, then duplicate columns, keeping first
    /// occurrences. Row duplication and column duplication are judged on
    /// the original relation, so the two passes commute.
    pub fn reduced(&self) -> RelationSpace {
        let mut seen = std::collections::HashSet::new();
        let mut keep_rows = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            if seen.insert(row.clone()) {
                keep_rows.push(i);
            }
        }
        let mut cols_seen = std::collections::HashSet::new();
        let mut keep_cols = Vec::new();
        for r in 0..self.right.len() {
            let col: Vec<bool> = keep_rows.iter().map(|&l| self.get(l, r)).collect();
            if cols_seen.insert(col) {
                keep_cols.push(r);
            }
        }
        let left = keep_rows.iter().map(|&i| self.left[i].clone()).collect();
        let right = keep_cols.iter().map(|&r| self.right[r].clone()).collect();
        let rows = keep_rows
            .iter()
            .map(|&i| self.rows[i].gather(&keep_cols))
            .collect();
        RelationSpace { left, right, rows }
    }
}

/// A finite labelled sample: point names with label bits. Duplicate
/// names are allowed (i.i.d. draws) but must carry the same label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledSample {
    pub points: Vec<(String, bool)>,
}

/// Mask view of a sample resolved against a space: `support` is the set
/// of sampled points, `labels` the 1-labelled ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolvedSample {
    pub support: u64,
    pub labels: u64,
}

impl LabelledSample {
    pub fn new(points: Vec<(String, bool)>) -> Self {
        LabelledSample { points }
    }

    pub fn resolve(&self, space: &ConceptSpace) -> Result<ResolvedSample> {
        if space.point_count() > 64 {
            return Err(Error::CapExceeded {
                what: "bitmask operations",
                limit: 64,
                actual: space.point_count(),
            });
        }
        let mut support = 0u64;
        let mut labels = 0u64;
        for (name, label) in &self.points {
            let i = space.point_index(name)?;
            let bit = 1u64 << i;
            if support & bit != 0 && (labels & bit != 0) != *label {
                return Err(Error::InvalidParam(format!(
                    "conflicting labels for point {name:?}"
                )));
            }
            support |= bit;
            if *label {
                labels |= bit;
            }
        }
        Ok(ResolvedSample { support, labels })
    }
}

/// A tabulated map between relation grids, with an optional per-left
/// flip. `flip` absent means a plain embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingMap {
    src_left: usize,
    src_right: usize,
    images: Vec<(usize, usize)>,
    flip: Option<Vec<bool>>,
}

impl EmbeddingMap {
    pub fn new(
        src_left: usize,
        src_right: usize,
        images: Vec<(usize, usize)>,
        flip: Option<Vec<bool>>,
    ) -> Result<Self> {
        if images.len() != src_left * src_right {
            return Err(Error::LengthMismatch {
                expected: src_left * src_right,
                got: images.len(),
            });
        }
        if let Some(f) = &flip {
            if f.len() != src_left {
                return Err(Error::LengthMismatch {
                    expected: src_left,
                    got: f.len(),
                });
            }
        }
        Ok(EmbeddingMap {
            src_left,
            src_right,
            images,
            flip,
        })
    }

    pub fn image(&self, l: usize, r: usize) -> (usize, usize) {
        self.images[l * self.src_right + r]
    }

    pub fn flip(&self, l: usize) -> bool {
        self.flip.as_ref().map(|f| f[l]).unwrap_or(false)
    }

    pub fn is_generalized(&self) -> bool {
        self.flip.is_some()
    }

    pub fn images(&self) -> &[(usize, usize)] {
        &self.images
    }

    pub fn flips(&self) -> Option<&[bool]> {
        self.flip.as_deref()
    }
}

/// Checks the relation-preservation condition at every source pair:
/// related iff the image is related, inverted on flipped left points.
pub fn check_embedding(src: &RelationSpace, dst: &RelationSpace, m: &EmbeddingMap) -> Result<bool> {
    if (m.src_left, m.src_right) != (src.left_len(), src.right_len()) {
        return Err(Error::DomainMismatch(format!(
            "map covers a {}x{} grid, source is {}x{}",
            m.src_left,
            m.src_right,
            src.left_len(),
            src.right_len()
        )));
    }
    for l in 0..src.left_len() {
        for r in 0..src.right_len() {
            let (l2, r2) = m.image(l, r);
            if l2 >= dst.left_len() || r2 >= dst.right_len() {
                return Err(Error::OutOfRange(format!(
                    "image ({l2}, {r2}) outside {}x{} target grid",
                    dst.left_len(),
                    dst.right_len()
                )));
            }
            if src.get(l, r) != (dst.get(l2, r2) ^ m.flip(l)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub const EMBED_SRC_CAP: usize = 16;
pub const EMBED_DST_CAP: usize = 36;

/// Exhaustive search for an embedding built from coordinate maps: every
/// source left point gets a target left point (and, in the generalized
/// case, a flip bit), every source right point gets a target right
/// point. Left points are assigned first, in index order, with values
/// ordered (image ascending, unflipped before flipped); right images are
/// then forced greedily. The first assignment found in that order is
/// returned, so the result is deterministic.
pub fn find_embedding(
    src: &RelationSpace,
    dst: &RelationSpace,
    generalized: bool,
) -> Result<Option<EmbeddingMap>> {
    let (sl, sr) = (src.left_len(), src.right_len());
    let (dl, dr) = (dst.left_len(), dst.right_len());
    if sl * sr > EMBED_SRC_CAP {
        return Err(Error::CapExceeded {
            what: "embedding source grid",
            limit: EMBED_SRC_CAP,
            actual: sl * sr,
        });
    }
    if dl * dr > EMBED_DST_CAP {
        return Err(Error::CapExceeded {
            what: "embedding target grid",
            limit: EMBED_DST_CAP,
            actual: dl * dr,
        });
    }
    if dl == 0 || dr == 0 {
        return Ok(None);
    }

    let mut pi1 = vec![0usize; sl];
    let mut tau = vec![false; sl];

    // right r admits target column c under the left assignments so far?
    let right_candidate_ok =
        |pi1: &[usize], tau: &[bool], depth: usize, r: usize, c: usize| -> bool {
            (0..depth).all(|l| dst.get(pi1[l], c) == (src.get(l, r) ^ tau[l]))
        };
    let rights_feasible = |pi1: &[usize], tau: &[bool], depth: usize| -> bool {
        (0..sr).all(|r| (0..dr).any(|c| right_candidate_ok(pi1, tau, depth, r, c)))
    };

    fn search(
        depth: usize,
        sl: usize,
        dl: usize,
        generalized: bool,
        pi1: &mut Vec<usize>,
        tau: &mut Vec<bool>,
        feasible: &dyn Fn(&[usize], &[bool], usize) -> bool,
    ) -> bool {
        if depth == sl {
            return true;
        }
        for img in 0..dl {
            let flips: &[bool] = if generalized {
                &[false, true]
            } else {
                &[false]
            };
            for &fl in flips {
                pi1[depth] = img;
                tau[depth] = fl;
                if feasible(pi1, tau, depth + 1)
                    && search(depth + 1, sl, dl, generalized, pi1, tau, feasible)
                {
                    return true;
                }
            }
        }
        false
    }

    let found = search(0, sl, dl, generalized, &mut pi1, &mut tau, &rights_feasible);
    if !found {
        return Ok(None);
    }
    let mut pi2 = vec![0usize; sr];
    for r in 0..sr {
        pi2[r] = (0..dr)
            .find(|&c| right_candidate_ok(&pi1, &tau, sl, r, c))
            .expect("feasibility was checked for every right point");
    }
    let mut images = Vec::with_capacity(sl * sr);
    for l in 0..sl {
        for r in 0..sr {
            images.push((pi1[l], pi2[r]));
        }
    }
    let flip = if generalized { Some(tau) } else { None };
    Ok(Some(EmbeddingMap::new(sl, sr, images, flip)?))
}

#[derive(Serialize, Deserialize)]
struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema_version: Option<u32>,
    domain: Vec<String>,
    concepts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dedup: Option<bool>,
}

/// Parses the concept-space interchange format. `dedup` defaults to
/// true when the field is absent.
pub fn load_space(bytes: &[u8]) -> Result<ConceptSpace> {
    let f: SpaceFile = serde_json::from_slice(bytes)?;
    let concepts = f
        .concepts
        .iter()
        .map(|s| Bits::from_bitstring(s))
        .collect::<Result<Vec<_>>>()?;
    ConceptSpace::new(f.domain, concepts, f.dedup.unwrap_or(true))
}

/// Canonical single-line serialization. `dedup` is written as false so
/// a save/load round trip reproduces the value bit for bit.
pub fn save_space(space: &ConceptSpace) -> String {
    let file = SpaceFile {
        schema_version: Some(SCHEMA_VERSION),
        domain: space.domain().to_vec(),
        concepts: space.concepts().iter().map(|c| c.to_bitstring()).collect(),
        dedup: Some(false),
    };
    serde_json::to_string(&file).expect("space serialization cannot fail")
}

/// Shared helper for enumerating a space's point subsets as masks in a
/// fixed order; callers cap the domain size first.
pub fn subset_names(space: &ConceptSpace, mask: u64) -> Vec<String> {
    (0..space.point_count())
        .filter(|&i| (mask >> i) & 1 == 1)
        .map(|i| space.domain()[i].clone())
        .collect()
}

/// Mask for a set of point names.
pub fn names_to_mask(space: &ConceptSpace, names: &[String]) -> Result<u64> {
    if space.point_count() > 64 {
        return Err(Error::CapExceeded {
            what: "bitmask operations",
            limit: 64,
            actual: space.point_count(),
        });
    }
    let mut mask = 0u64;
    for idx in space.indices_of(names)? {
        mask |= 1u64 << idx;
    }
    Ok(mask)
}

/// Orders subset masks the way the searches and reports do: by
/// `set_lex_cmp` on index vectors.
pub fn sort_masks_lex(masks: &mut [u64]) {
    masks.sort_by(|a, b| set_lex_cmp(*a, *b));
}

#[allow(unused)]
fn _full_mask_reexport_check() {
    let _ = full_mask(3);
}
