//! Labeled 0/1 matrices, identity submatrices, non-overlapping covers, the
//! cover verifier, and the cover constructors: one per design family plus
//! the binomial (subset-indexed) matrix.
//!
//! A cover pairs each matrix with a list of identity submatrices such that
//! every 1-entry is covered exactly once; its size S fixes the delivery rate
//! S/F and, through the counting identity S*g = F*(K-r), the shuffle load.
//! Construction is deterministic: identical inputs yield byte-identical
//! serialized covers.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;

use crate::designs::{self, Design};
use crate::gf::FieldTable;
use crate::rat::binom_u64;
use crate::subspace::{self, Subspace, SubspaceDesign};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct BinaryMatrix {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    row_ones: Vec<Vec<u32>>,
    col_ones: Vec<Vec<u32>>,
    ones_count: usize,
}

impl BinaryMatrix {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        entries: Vec<(u32, u32)>,
    ) -> Result<BinaryMatrix> {
        let k = row_labels.len();
        let f = col_labels.len();
        if row_labels.iter().collect::<HashSet<_>>().len() != k {
            return Err(Error::BadParams("duplicate row labels".into()));
        }
        if col_labels.iter().collect::<HashSet<_>>().len() != f {
            return Err(Error::BadParams("duplicate column labels".into()));
        }
        let mut row_ones = vec![Vec::new(); k];
        let mut col_ones = vec![Vec::new(); f];
        let mut seen = HashSet::with_capacity(entries.len());
        for &(r, c) in &entries {
            if r as usize >= k || c as usize >= f {
                return Err(Error::BadParams(format!("entry ({r},{c}) out of range")));
            }
            if !seen.insert((r, c)) {
                return Err(Error::BadParams(format!("duplicate entry ({r},{c})")));
            }
            row_ones[r as usize].push(c);
            col_ones[c as usize].push(r);
        }
        for v in &mut row_ones {
            v.sort_unstable();
        }
        for v in &mut col_ones {
            v.sort_unstable();
        }
        Ok(BinaryMatrix {
            row_labels,
            col_labels,
            row_ones,
            col_ones,
            ones_count: entries.len(),
        })
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn ones_count(&self) -> usize {
        self.ones_count
    }

    pub fn get(&self, r: u32, c: u32) -> bool {
        self.row_ones[r as usize].binary_search(&c).is_ok()
    }

    pub fn row_ones(&self, r: usize) -> &[u32] {
        &self.row_ones[r]
    }

    pub fn col_ones(&self, c: usize) -> &[u32] {
        &self.col_ones[c]
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn row_index(&self, label: &str) -> Option<u32> {
        self.row_labels.iter().position(|l| l == label).map(|i| i as u32)
    }

    pub fn col_index(&self, label: &str) -> Option<u32> {
        self.col_labels.iter().position(|l| l == label).map(|i| i as u32)
    }

    pub fn constant_row_weight(&self) -> Option<usize> {
        let w = self.row_ones.first()?.len();
        self.row_ones.iter().all(|r| r.len() == w).then_some(w)
    }

    pub fn constant_col_weight(&self) -> Option<usize> {
        let w = self.col_ones.first()?.len();
        self.col_ones.iter().all(|c| c.len() == w).then_some(w)
    }

    /// `MATRIX K F` header, `ROWS`/`COLS` label lines, then one 0/1 line per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("MATRIX {} {}\n", self.rows(), self.cols());
        out.push_str("ROWS ");
        out.push_str(&self.row_labels.join(" "));
        out.push_str("\nCOLS ");
        out.push_str(&self.col_labels.join(" "));
        out.push('\n');
        for r in 0..self.rows() {
            let mut line = vec![b'0'; self.cols()];
            for &c in &self.row_ones[r] {
                line[c as usize] = b'1';
            }
            out.push_str(std::str::from_utf8(&line).unwrap());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<BinaryMatrix> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty matrix file".into() })?;
        let dims: Vec<usize> = header
            .strip_prefix("MATRIX ")
            .ok_or(Error::Parse { line: 1, msg: "missing MATRIX header".into() })?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse { line: 1, msg: "bad dimension".into() }))
            .collect::<Result<_>>()?;
        if dims.len() != 2 {
            return Err(Error::Parse { line: 1, msg: "MATRIX needs K F".into() });
        }
        let (k, f) = (dims[0], dims[1]);
        let (_, rows_line) = lines.next().ok_or(Error::Parse { line: 2, msg: "missing ROWS".into() })?;
        let row_labels: Vec<String> = rows_line
            .strip_prefix("ROWS ")
            .ok_or(Error::Parse { line: 2, msg: "missing ROWS".into() })?
            .split_whitespace()
            .map(String::from)
            .collect();
        let (_, cols_line) = lines.next().ok_or(Error::Parse { line: 3, msg: "missing COLS".into() })?;
        let col_labels: Vec<String> = cols_line
            .strip_prefix("COLS ")
            .ok_or(Error::Parse { line: 3, msg: "missing COLS".into() })?
            .split_whitespace()
            .map(String::from)
            .collect();
        if row_labels.len() != k || col_labels.len() != f {
            return Err(Error::Parse { line: 3, msg: "label count mismatch".into() });
        }
        let mut entries = Vec::new();
        let mut count = 0;
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line.len() != f {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected {f} characters, got {}", line.len()),
                });
            }
            for (c, ch) in line.bytes().enumerate() {
                match ch {
                    b'1' => entries.push((count as u32, c as u32)),
                    b'0' => {}
                    _ => {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!("bad character {:?}", ch as char),
                        })
                    }
                }
            }
            count += 1;
        }
        if count != k {
            return Err(Error::Parse { line: 0, msg: format!("expected {k} rows, got {count}") });
        }
        BinaryMatrix::new(row_labels, col_labels, entries)
    }
}

/// Matched (row, col) index pairs forming a permuted identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentitySubmatrix {
    pub pairs: Vec<(u32, u32)>,
}

impl IdentitySubmatrix {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }
}

#[derive(Debug, Clone)]
pub struct Cover {
    pub identities: Vec<IdentitySubmatrix>,
    /// Common identity size g when the cover is uniform.
    pub uniform_size: Option<usize>,
    /// Which construction produced this cover.
    pub source: String,
}

impl Cover {
    fn new(identities: Vec<IdentitySubmatrix>, source: &str) -> Cover {
        let uniform_size = identities
            .first()
            .map(|i| i.size())
            .filter(|&g| identities.iter().all(|i| i.size() == g));
        Cover {
            identities,
            uniform_size,
            source: source.to_string(),
        }
    }

    pub fn size(&self) -> usize {
        self.identities.len()
    }

    /// `COVER S g` header (g = 0 when non-uniform), one `ID` line per
    /// identity with (row,col) label pairs in canonical order.
    pub fn to_text(&self, m: &BinaryMatrix) -> String {
        let mut out = format!("COVER {} {}\n", self.size(), self.uniform_size.unwrap_or(0));
        for id in &self.identities {
            out.push_str("ID");
            for &(r, c) in &id.pairs {
                out.push_str(&format!(
                    " ({},{})",
                    m.row_labels()[r as usize],
                    m.col_labels()[c as usize]
                ));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, m: &BinaryMatrix) -> Result<Cover> {
        let row_idx: HashMap<&str, u32> = m
            .row_labels()
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let col_idx: HashMap<&str, u32> = m
            .col_labels()
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty cover file".into() })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 || head[0] != "COVER" {
            return Err(Error::Parse { line: 1, msg: "missing COVER header".into() });
        }
        let s: usize = head[1]
            .parse()
            .map_err(|_| Error::Parse { line: 1, msg: "bad cover size".into() })?;
        let mut identities = Vec::new();
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let rest = line.strip_prefix("ID").ok_or(Error::Parse {
                line: lineno + 1,
                msg: "expected ID line".into(),
            })?;
            let mut pairs = Vec::new();
            for token in rest.split_whitespace() {
                let inner = token
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or(Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad pair {token:?}"),
                    })?;
                let (rl, cl) = inner.split_once(',').ok_or(Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad pair {token:?}"),
                })?;
                let r = *row_idx.get(rl).ok_or(Error::Parse {
                    line: lineno + 1,
                    msg: format!("unknown row label {rl:?}"),
                })?;
                let c = *col_idx.get(cl).ok_or(Error::Parse {
                    line: lineno + 1,
                    msg: format!("unknown column label {cl:?}"),
                })?;
                pairs.push((r, c));
            }
            identities.push(IdentitySubmatrix { pairs });
        }
        if identities.len() != s {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected {s} identities, got {}", identities.len()),
            });
        }
        Ok(Cover::new(identities, "file"))
    }
}

#[derive(Debug, Clone)]
pub struct IdentityViolation {
    pub identity: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct CoverReport {
    pub ok: bool,
    pub identity_violations: Vec<IdentityViolation>,
    /// A 1-entry covered by two identities, with both their indices.
    pub overlap_witness: Option<((u32, u32), usize, usize)>,
    pub uncovered: Vec<(u32, u32)>,
}

/// Exhaustive check of the cover axioms: every member is an identity
/// submatrix of the matrix, the matched 1-entries never repeat, and they
/// account for every 1 in the matrix.
pub fn verify_cover(m: &BinaryMatrix, cover: &Cover) -> CoverReport {
    let mut report = CoverReport::default();
    for (idx, id) in cover.identities.iter().enumerate() {
        let rows: HashSet<u32> = id.pairs.iter().map(|&(r, _)| r).collect();
        let cols: HashSet<u32> = id.pairs.iter().map(|&(_, c)| c).collect();
        if rows.len() != id.size() || cols.len() != id.size() {
            report.identity_violations.push(IdentityViolation {
                identity: idx,
                detail: "repeated row or column".into(),
            });
            continue;
        }
        for &(r, c) in &id.pairs {
            if !m.get(r, c) {
                report.identity_violations.push(IdentityViolation {
                    identity: idx,
                    detail: format!("matched entry ({r},{c}) is 0"),
                });
            }
            // the only 1 of this row inside the identity's columns must be c
            let stray = m
                .row_ones(r as usize)
                .iter()
                .any(|&c2| c2 != c && cols.contains(&c2));
            if stray {
                report.identity_violations.push(IdentityViolation {
                    identity: idx,
                    detail: format!("row {r} has an off-diagonal 1 inside the identity"),
                });
            }
        }
        if report.identity_violations.len() > 32 {
            break;
        }
    }

    let mut covered: HashMap<(u32, u32), usize> = HashMap::with_capacity(m.ones_count());
    'outer: for (idx, id) in cover.identities.iter().enumerate() {
        for &pair in &id.pairs {
            if let Some(&first) = covered.get(&pair) {
                report.overlap_witness = Some((pair, first, idx));
                break 'outer;
            }
            covered.insert(pair, idx);
        }
    }
    for (r, ones) in m.row_ones.iter().enumerate() {
        for &c in ones {
            if !covered.contains_key(&(r as u32, c)) {
                report.uncovered.push((r as u32, c));
                if report.uncovered.len() > 32 {
                    break;
                }
            }
        }
    }
    report.ok = report.identity_violations.is_empty()
        && report.overlap_witness.is_none()
        && report.uncovered.is_empty();
    report
}

/// Counting identity S*g = F*(K-r): holds exactly for every uniform
/// non-overlapping cover of a constant-column-weight matrix.
pub fn counting_identity_holds(m: &BinaryMatrix, cover: &Cover) -> bool {
    let Some(g) = cover.uniform_size else {
        return false;
    };
    let Some(col_weight) = m.constant_col_weight() else {
        return false;
    };
    cover.size() * g == m.cols() * col_weight
}

fn ensure_design_ok(d: &Design) -> Result<()> {
    let report = designs::verify_design(d);
    if !report.ok {
        return Err(Error::InvalidDesign(
            report
                .violations
                .iter()
                .map(|v| v.to_string())
                .take(3)
                .join("; "),
        ));
    }
    Ok(())
}

/// Cover of a (v,k,1)-BIBD incidence matrix: one identity per point x, with
/// the blocks through x as columns and, in each such block, the cyclic
/// successor of x as the matched row. Sizes: S = v, g = (v-1)/(k-1).
pub fn cover_bibd(d: &Design) -> Result<(BinaryMatrix, Cover)> {
    if d.params.t != 2 || d.params.lambda != 1 || d.groups.is_some() {
        return Err(Error::BadParams(
            "cover construction needs a (v,k,1)-BIBD".into(),
        ));
    }
    ensure_design_ok(d)?;
    let m = designs::incidence_matrix(d, false)?;
    let point_index: HashMap<u32, u32> = d
        .points
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32))
        .collect();
    let k = d.params.k as usize;
    let mut identities = Vec::with_capacity(d.points.len());
    for (pi, &x) in d.points.iter().enumerate() {
        let mut pairs = Vec::new();
        for &bi in m.row_ones(pi) {
            let block = &d.blocks[bi as usize];
            let j = block.iter().position(|&p| p == x).expect("x lies in its block");
            let successor = block[(j + 1) % k];
            pairs.push((point_index[&successor], bi));
        }
        identities.push(IdentitySubmatrix { pairs });
    }
    let cover = Cover::new(identities, "bibd");
    assert_eq!(
        cover.identities.iter().map(|i| i.size()).sum::<usize>(),
        m.ones_count()
    );
    Ok((m, cover))
}

/// Cover of the t-(v,k,1) scheme matrix. Rows are the (t-1)-subsets of the
/// point set, columns the pairs (y, B) with y in B, and the entry is 1 iff
/// D + {y} is a t-subset inside B. One identity per (y, j): in each block
/// through y, the j-th (t-1)-subset of B minus y is the matched row.
/// Sizes: S = C(k-1,t-1)*v, g = C(v-1,t-1)/C(k-1,t-1).
pub fn cover_tdesign(d: &Design) -> Result<(BinaryMatrix, Cover)> {
    if d.params.lambda != 1 || d.params.t < 2 || d.groups.is_some() {
        return Err(Error::BadParams(
            "cover construction needs a t-(v,k,1) design with t >= 2".into(),
        ));
    }
    ensure_design_ok(d)?;
    let t = d.params.t as usize;
    let row_subsets: Vec<Vec<u32>> = d.points.iter().copied().combinations(t - 1).collect();
    let row_labels: Vec<String> = row_subsets.iter().map(|s| designs::block_label(s)).collect();
    let row_index: HashMap<Vec<u32>, u32> = row_subsets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as u32))
        .collect();

    let mut col_labels = Vec::new();
    let mut col_index: HashMap<(u32, usize), u32> = HashMap::new();
    let mut entries = Vec::new();
    for (bi, block) in d.blocks.iter().enumerate() {
        for &y in block {
            let ci = col_labels.len() as u32;
            col_index.insert((y, bi), ci);
            col_labels.push(format!("{y}:{}", designs::block_label(block)));
            for sub in block.iter().copied().filter(|&p| p != y).combinations(t - 1) {
                entries.push((row_index[&sub], ci));
            }
        }
    }
    let m = BinaryMatrix::new(row_labels, col_labels, entries)?;
    // each (t-1)-subset extends to t-subsets through v-t+1 further points
    assert_eq!(
        m.constant_row_weight(),
        Some((d.params.v - d.params.t + 1) as usize)
    );

    let per_block = binom_u64((d.params.k - 1) as u64, (d.params.t - 1) as u64)? as usize;
    let mut blocks_through: HashMap<u32, Vec<usize>> = HashMap::new();
    for (bi, block) in d.blocks.iter().enumerate() {
        for &y in block {
            blocks_through.entry(y).or_default().push(bi);
        }
    }
    let mut identities = Vec::new();
    for &y in &d.points {
        let through = &blocks_through[&y];
        for j in 0..per_block {
            let mut pairs = Vec::with_capacity(through.len());
            for &bi in through {
                let sub = d.blocks[bi]
                    .iter()
                    .copied()
                    .filter(|&p| p != y)
                    .combinations(t - 1)
                    .nth(j)
                    .expect("j ranges over the (t-1)-subsets of a block minus a point");
                pairs.push((row_index[&sub], col_index[&(y, bi)]));
            }
            identities.push(IdentitySubmatrix { pairs });
        }
    }
    let cover = Cover::new(identities, "tdesign");
    assert_eq!(
        cover.identities.iter().map(|i| i.size()).sum::<usize>(),
        m.ones_count()
    );
    Ok((m, cover))
}

/// Cover of the transposed TD(k,n) incidence matrix (rows = blocks, columns
/// = points): one identity per point x, matching each block through x with
/// that block's point in the cyclically next group. Sizes: S = kn, g = n.
pub fn cover_transversal(d: &Design) -> Result<(BinaryMatrix, Cover)> {
    let Some(groups) = &d.groups else {
        return Err(Error::BadParams("cover construction needs a transversal design".into()));
    };
    if d.params.lambda != 1 {
        return Err(Error::BadParams("cover construction needs lambda = 1".into()));
    }
    let k = d.params.k as usize;
    let n = d.params.v as usize / k;
    if k < n {
        return Err(Error::BadParams(format!("need k >= n, got k={k} n={n}")));
    }
    ensure_design_ok(d)?;
    let m = designs::incidence_matrix(d, true)?;
    let point_index: HashMap<u32, u32> = d
        .points
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32))
        .collect();
    let mut group_of: HashMap<u32, usize> = HashMap::new();
    for (gi, g) in groups.iter().enumerate() {
        for &p in g {
            group_of.insert(p, gi);
        }
    }
    let mut identities = Vec::with_capacity(d.points.len());
    for (pi, &x) in d.points.iter().enumerate() {
        let next_group = (group_of[&x] + 1) % k;
        let mut pairs = Vec::new();
        for &bi in m.col_ones(pi) {
            let partner = *d.blocks[bi as usize]
                .iter()
                .find(|p| group_of[p] == next_group)
                .expect("a block meets every group exactly once");
            pairs.push((bi, point_index[&partner]));
        }
        identities.push(IdentitySubmatrix { pairs });
    }
    let cover = Cover::new(identities, "transversal");
    assert_eq!(
        cover.identities.iter().map(|i| i.size()).sum::<usize>(),
        m.ones_count()
    );
    Ok((m, cover))
}

/// Cover of the t-(v,k,1)_q subspace scheme matrix. Rows are the (t-1)-dim
/// subspaces, columns the pairs (y, B) with y a 1-dim subspace of block B,
/// and the entry is 1 iff D + y is t-dim and inside B. One identity per
/// (y, j), matching in each block through y its j-th (t-1)-dim subspace not
/// containing y. Sizes: S = gbinom(k-1,t-1)*q^(t-1)*gbinom(v,1),
/// g = gbinom(v-1,t-1)/gbinom(k-1,t-1).
pub fn cover_subspace(
    field: &FieldTable,
    sd: &SubspaceDesign,
) -> Result<(BinaryMatrix, Cover)> {
    if sd.lambda != 1 || sd.t < 2 {
        return Err(Error::BadParams(
            "cover construction needs a t-(v,k,1)_q subspace design with t >= 2".into(),
        ));
    }
    let report = subspace::verify_subspace_design(field, sd)?;
    if !report.ok {
        return Err(Error::InvalidDesign(format!(
            "subspace design fails lambda check, e.g. {} in {} blocks",
            report.violations[0].subspace_label, report.violations[0].found
        )));
    }
    let t = sd.t as usize;
    let rows = subspace::enumerate_subspaces(field, sd.v, t - 1)?;
    let row_labels: Vec<String> = rows.iter().map(|s| s.label()).collect();
    let row_index: HashMap<Vec<u32>, u32> = rows
        .iter()
        .enumerate()
        .map(|(i, s)| (s.flattened(), i as u32))
        .collect();

    // per block: its 1-dim subspaces and its (t-1)-dim subspaces
    let mut col_labels = Vec::new();
    let mut col_index: HashMap<(usize, Vec<u32>), u32> = HashMap::new();
    let mut entries = Vec::new();
    let mut lines_per_block: Vec<Vec<Subspace>> = Vec::with_capacity(sd.blocks.len());
    let mut subs_per_block: Vec<Vec<Subspace>> = Vec::with_capacity(sd.blocks.len());
    for (bi, block) in sd.blocks.iter().enumerate() {
        let lines = subspace::subspaces_of(field, block, 1)?;
        let subs = subspace::subspaces_of(field, block, t - 1)?;
        for y in &lines {
            let ci = col_labels.len() as u32;
            col_index.insert((bi, y.flattened()), ci);
            col_labels.push(format!("{}:{}", y.label(), block.label()));
            for d_sub in &subs {
                if !subspace::member(field, d_sub, &y.basis[0]) {
                    entries.push((row_index[&d_sub.flattened()], ci));
                }
            }
        }
        lines_per_block.push(lines);
        subs_per_block.push(subs);
    }
    let m = BinaryMatrix::new(row_labels, col_labels, entries)?;
    let q = field.order() as u64;
    assert_eq!(
        m.constant_row_weight(),
        Some(
            (subspace::gauss_binom((sd.v - t + 1) as u64, 1, q)? * q.pow(sd.t - 1)) as usize
        )
    );

    let all_lines = subspace::enumerate_subspaces(field, sd.v, 1)?;
    let mut blocks_through: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    for (bi, lines) in lines_per_block.iter().enumerate() {
        for y in lines {
            blocks_through.entry(y.flattened()).or_default().push(bi);
        }
    }
    let per_block = (subspace::gauss_binom((sd.k - 1) as u64, (sd.t - 1) as u64, q)?
        * q.pow(sd.t - 1)) as usize;
    let mut identities = Vec::new();
    for y in &all_lines {
        let through = blocks_through
            .get(&y.flattened())
            .ok_or_else(|| Error::InvalidDesign("a 1-dim subspace lies in no block".into()))?;
        for j in 0..per_block {
            let mut pairs = Vec::with_capacity(through.len());
            for &bi in through {
                let d_sub = subs_per_block[bi]
                    .iter()
                    .filter(|d| !subspace::member(field, d, &y.basis[0]))
                    .nth(j)
                    .expect("j ranges over the (t-1)-dim subspaces avoiding y");
                pairs.push((
                    row_index[&d_sub.flattened()],
                    col_index[&(bi, y.flattened())],
                ));
            }
            identities.push(IdentitySubmatrix { pairs });
        }
    }
    let cover = Cover::new(identities, "subspace");
    assert_eq!(
        cover.identities.iter().map(|i| i.size()).sum::<usize>(),
        m.ones_count()
    );
    Ok((m, cover))
}

/// The binomial computing matrix: rows 1..K, columns the r-subsets of [K],
/// entry 1 iff the row element is outside the subset. The cover has one
/// identity of size r+1 per (r+1)-subset B, matching k with B minus k.
pub fn man_matrix(k: u64, r: u64) -> Result<(BinaryMatrix, Cover)> {
    if !(1 <= r && r < k) {
        return Err(Error::BadParams(format!("need 1 <= r < K, got K={k} r={r}")));
    }
    let f = binom_u64(k, r)?;
    let cap = crate::enumeration_cap();
    if f > cap {
        return Err(Error::CapExceeded(f, cap));
    }
    let row_labels: Vec<String> = (1..=k).map(|i| i.to_string()).collect();
    let subsets: Vec<Vec<u64>> = (1..=k).combinations(r as usize).collect();
    let col_labels: Vec<String> = subsets
        .iter()
        .map(|s| s.iter().map(|x| x.to_string()).join("."))
        .collect();
    let col_index: HashMap<Vec<u64>, u32> = subsets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as u32))
        .collect();
    let mut entries = Vec::new();
    for (ci, subset) in subsets.iter().enumerate() {
        for node in 1..=k {
            if !subset.contains(&node) {
                entries.push(((node - 1) as u32, ci as u32));
            }
        }
    }
    let m = BinaryMatrix::new(row_labels, col_labels, entries)?;
    let mut identities = Vec::new();
    for big in (1..=k).combinations(r as usize + 1) {
        let mut pairs = Vec::with_capacity(big.len());
        for &node in &big {
            let rest: Vec<u64> = big.iter().copied().filter(|&x| x != node).collect();
            pairs.push(((node - 1) as u32, col_index[&rest]));
        }
        identities.push(IdentitySubmatrix { pairs });
    }
    let cover = Cover::new(identities, "man");
    assert_eq!(
        cover.identities.iter().map(|i| i.size()).sum::<usize>(),
        m.ones_count()
    );
    Ok((m, cover))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{example_fano, example_steiner_8_4, example_td_4_3};
    use std::collections::BTreeSet;

    fn pair_labels(m: &BinaryMatrix, id: &IdentitySubmatrix) -> BTreeSet<(String, String)> {
        id.pairs
            .iter()
            .map(|&(r, c)| {
                (
                    m.row_labels()[r as usize].clone(),
                    m.col_labels()[c as usize].clone(),
                )
            })
            .collect()
    }

    #[test]
    fn fano_cover_matches_worked_example() {
        let (m, cover) = cover_bibd(&example_fano()).unwrap();
        assert_eq!(cover.size(), 7);
        assert_eq!(cover.uniform_size, Some(3));
        assert!(verify_cover(&m, &cover).ok);
        assert!(counting_identity_holds(&m, &cover));

        // identity for point 1: columns 127, 145, 136 with rows 2, 4, 3
        let c1 = pair_labels(&m, &cover.identities[0]);
        let expected: BTreeSet<(String, String)> = [("2", "1.2.7"), ("3", "1.3.6"), ("4", "1.4.5")]
            .iter()
            .map(|&(r, c)| (r.to_string(), c.to_string()))
            .collect();
        assert_eq!(c1, expected);

        // identity for point 6: columns 136, 467, 256 with rows 1, 7, 2
        let c6 = pair_labels(&m, &cover.identities[5]);
        let expected: BTreeSet<(String, String)> = [("1", "1.3.6"), ("2", "2.5.6"), ("7", "4.6.7")]
            .iter()
            .map(|&(r, c)| (r.to_string(), c.to_string()))
            .collect();
        assert_eq!(c6, expected);
    }

    #[test]
    fn bibd_9_3_cover_counts() {
        let (m, cover) = cover_bibd(&crate::designs::example_bibd_9_3()).unwrap();
        assert_eq!(cover.size(), 9);
        assert_eq!(cover.uniform_size, Some(4));
        assert_eq!(m.ones_count(), 36);
        assert!(verify_cover(&m, &cover).ok);
    }

    #[test]
    fn tdesign_cover_matches_worked_example() {
        let d = example_steiner_8_4();
        let (m, cover) = cover_tdesign(&d).unwrap();
        assert_eq!((m.rows(), m.cols()), (28, 56));
        assert_eq!(cover.size(), 3 * 8);
        assert_eq!(cover.uniform_size, Some(7));
        assert!(verify_cover(&m, &cover).ok);
        assert!(counting_identity_holds(&m, &cover));

        // identities for y = 4 start at index (4-1)*3; j = 1 matches rows
        // {37,26,15,12,35,25,16} and j = 2 rows {38,28,18,13,36,27,17}
        let t41 = &cover.identities[9];
        let rows41: BTreeSet<String> = pair_labels(&m, t41).iter().map(|(r, _)| r.clone()).collect();
        let expected41: BTreeSet<String> = ["1.2", "1.5", "1.6", "2.5", "2.6", "3.5", "3.7"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(rows41, expected41);
        assert!(pair_labels(&m, t41).iter().all(|(_, c)| c.starts_with("4:")));

        let t42 = &cover.identities[10];
        let rows42: BTreeSet<String> = pair_labels(&m, t42).iter().map(|(r, _)| r.clone()).collect();
        let expected42: BTreeSet<String> = ["1.3", "1.7", "1.8", "2.7", "2.8", "3.6", "3.8"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(rows42, expected42);
    }

    #[test]
    fn transversal_cover_matches_worked_example() {
        let d = example_td_4_3();
        let (m, cover) = cover_transversal(&d).unwrap();
        assert_eq!((m.rows(), m.cols()), (9, 12));
        assert_eq!(cover.size(), 12);
        assert_eq!(cover.uniform_size, Some(3));
        assert!(verify_cover(&m, &cover).ok);
        assert!(counting_identity_holds(&m, &cover));

        // identity for point 2: rows are the blocks through 2, columns 4, 5, 6
        let c2 = pair_labels(&m, &cover.identities[1]);
        let expected: BTreeSet<(String, String)> = [
            ("2.4.9.11", "4"),
            ("2.5.7.12", "5"),
            ("2.6.8.10", "6"),
        ]
        .iter()
        .map(|&(r, c)| (r.to_string(), c.to_string()))
        .collect();
        assert_eq!(c2, expected);
    }

    #[test]
    fn transversal_5_5_ones_count() {
        let d = crate::designs::construct_transversal(5, 5).unwrap();
        let (m, cover) = cover_transversal(&d).unwrap();
        assert_eq!(m.ones_count(), 125);
        assert_eq!(cover.size(), 25);
        assert_eq!(cover.uniform_size, Some(5));
        assert!(verify_cover(&m, &cover).ok);
    }

    #[test]
    fn subspace_cover_2_3_2_q2() {
        let field = FieldTable::new(2, 1).unwrap();
        let sd = crate::subspace::trivial_subspace_design(&field, 3, 2).unwrap();
        let (m, cover) = cover_subspace(&field, &sd).unwrap();
        assert_eq!((m.rows(), m.cols()), (7, 21));
        assert_eq!(cover.size(), 14);
        assert_eq!(cover.uniform_size, Some(3));
        // row weight gbinom(2,1)*2 = 6
        assert_eq!(m.constant_row_weight(), Some(6));
        assert_eq!(m.constant_col_weight(), Some(2));
        assert!(verify_cover(&m, &cover).ok);
        assert!(counting_identity_holds(&m, &cover));
    }

    #[test]
    fn subspace_cover_2_3_2_q4() {
        let field = FieldTable::new(2, 2).unwrap();
        let sd = crate::subspace::trivial_subspace_design(&field, 3, 2).unwrap();
        let (m, cover) = cover_subspace(&field, &sd).unwrap();
        assert_eq!((m.rows(), m.cols()), (21, 105));
        assert!(verify_cover(&m, &cover).ok);
        assert!(counting_identity_holds(&m, &cover));
    }

    #[test]
    fn man_matrices() {
        let (m, cover) = man_matrix(5, 2).unwrap();
        assert_eq!((m.rows(), m.cols()), (5, 10));
        assert_eq!(cover.size(), 10);
        assert_eq!(cover.uniform_size, Some(3));
        assert!(verify_cover(&m, &cover).ok);
        assert!(counting_identity_holds(&m, &cover));

        let (m, cover) = man_matrix(7, 4).unwrap();
        assert_eq!(m.cols(), 35);
        assert_eq!(cover.uniform_size, Some(5));
        assert!(verify_cover(&m, &cover).ok);

        // r = K-1: one column per node, a single identity of size K
        let (m, cover) = man_matrix(6, 5).unwrap();
        assert_eq!(m.cols(), 6);
        assert_eq!(cover.size(), 1);
        assert_eq!(cover.uniform_size, Some(6));
        assert!(verify_cover(&m, &cover).ok);
        assert!(counting_identity_holds(&m, &cover));

        assert!(man_matrix(5, 5).is_err());
        assert!(man_matrix(5, 0).is_err());
    }

    #[test]
    fn verify_rejects_broken_covers() {
        let (m, mut cover) = cover_bibd(&example_fano()).unwrap();
        // delete one matched pair: its entry becomes uncovered
        cover.identities[0].pairs.pop();
        let report = verify_cover(&m, &cover);
        assert!(!report.ok);
        assert_eq!(report.uncovered.len(), 1);

        // duplicate a 1x1 identity on the same entry: overlap witnessed
        let (m, mut cover) = cover_bibd(&example_fano()).unwrap();
        let pair = cover.identities[0].pairs[0];
        cover.identities.push(IdentitySubmatrix { pairs: vec![pair] });
        cover.identities.push(IdentitySubmatrix { pairs: vec![pair] });
        let report = verify_cover(&m, &cover);
        assert!(!report.ok);
        assert!(report.overlap_witness.is_some());

        // a rectangle with an off-diagonal 1 is not an identity submatrix
        let (m, mut cover) = cover_bibd(&example_fano()).unwrap();
        let other = cover.identities[1].pairs[0];
        cover.identities[0].pairs.push(other);
        let report = verify_cover(&m, &cover);
        assert!(!report.ok);
        assert!(!report.identity_violations.is_empty());
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(BinaryMatrix::parse("").is_err());
        assert!(BinaryMatrix::parse("MATRIX 2\nROWS a b\nCOLS x\n").is_err());
        assert!(BinaryMatrix::parse("MATRIX 1 2\nROWS a\nCOLS x y\n1\n").is_err());
        assert!(BinaryMatrix::parse("MATRIX 1 2\nROWS a\nCOLS x y\n1z\n").is_err());
        assert!(BinaryMatrix::parse("MATRIX 2 2\nROWS a b\nCOLS x y\n10\n").is_err());
        assert!(BinaryMatrix::parse("MATRIX 2 2\nROWS a a\nCOLS x y\n10\n01\n").is_err());

        let (m, _) = cover_bibd(&example_fano()).unwrap();
        assert!(Cover::parse("", &m).is_err());
        assert!(Cover::parse("COVER 2 3\nID (1,1.2.7)\n", &m).is_err());
        assert!(Cover::parse("COVER 1 1\nID (1;1.2.7)\n", &m).is_err());
        assert!(Cover::parse("COVER 1 1\nID (1,9.9.9)\n", &m).is_err());
    }

    #[test]
    fn matrix_text_roundtrip() {
        let (m, cover) = cover_bibd(&example_fano()).unwrap();
        let text = m.to_text();
        let parsed = BinaryMatrix::parse(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
        let cover_text = cover.to_text(&m);
        let parsed_cover = Cover::parse(&cover_text, &parsed).unwrap();
        assert_eq!(parsed_cover.to_text(&parsed), cover_text);
        assert!(verify_cover(&parsed, &parsed_cover).ok);
    }

    #[test]
    fn deterministic_construction() {
        let a = cover_tdesign(&example_steiner_8_4()).unwrap();
        let b = cover_tdesign(&example_steiner_8_4()).unwrap();
        assert_eq!(a.0.to_text(), b.0.to_text());
        assert_eq!(a.1.to_text(&a.0), b.1.to_text(&b.0));
    }
}
