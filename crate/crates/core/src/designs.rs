//! Set-system designs: t-designs, BIBDs, transversal designs, their
//! verifiers, incidence matrices, and the four parametrized constructions
//! used downstream (projective/affine planes, orthogonal-array transversal
//! designs, and the Moebius-image Steiner extension).
//!
//! Canonical form: point ids ascending, every block sorted ascending, the
//! block list sorted lexicographically, groups (transversal designs only)
//! listed in group order. All cover constructions depend on these orders.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::binmat::BinaryMatrix;
use crate::gf::{prime_power, FieldTable};
use crate::rat::binom_big;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignParams {
    pub t: u32,
    pub v: u32,
    pub k: u32,
    pub lambda: u64,
}

impl DesignParams {
    pub fn new(t: u32, v: u32, k: u32, lambda: u64) -> Result<DesignParams> {
        let p = DesignParams { t, v, k, lambda };
        if !(v > k && k >= t && t >= 1) || lambda == 0 {
            return Err(Error::BadParams(format!(
                "need v > k >= t >= 1 and lambda >= 1, got t={t} v={v} k={k} lambda={lambda}"
            )));
        }
        // necessary existence condition: lambda_s integral for 0 <= s <= t
        for s in 0..=t {
            lambda_s(&p, s)?;
        }
        Ok(p)
    }

    /// Number of blocks b = lambda_0.
    pub fn block_count(&self) -> Result<u64> {
        lambda_s(self, 0)
    }

    /// Replication number r = lambda_1, the blocks through each point.
    pub fn replication(&self) -> Result<u64> {
        lambda_s(self, 1)
    }
}

/// Blocks containing a fixed s-subset: lambda * C(v-s, t-s) / C(k-s, t-s).
/// Errors when the quotient is not an integer (no such design exists).
pub fn lambda_s(params: &DesignParams, s: u32) -> Result<u64> {
    if s > params.t {
        return Err(Error::BadParams(format!("s={s} exceeds t={}", params.t)));
    }
    let num = BigUint::from(params.lambda)
        * binom_big((params.v - s) as u64, (params.t - s) as u64);
    let den = binom_big((params.k - s) as u64, (params.t - s) as u64);
    if den.is_zero() || !(&num % &den).is_zero() {
        return Err(Error::NonIntegral {
            what: "lambda_s",
            num: num.to_u128().unwrap_or(u128::MAX),
            den: den.to_u128().unwrap_or(u128::MAX),
        });
    }
    (num / den).to_u64().ok_or(Error::Overflow("lambda_s"))
}

#[derive(Debug, Clone)]
pub struct Design {
    pub points: Vec<u32>,
    pub blocks: Vec<Vec<u32>>,
    pub params: DesignParams,
    /// Partition into k groups, present only for transversal designs.
    pub groups: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DesignViolation {
    PointCount { expected: u32, found: usize },
    DuplicatePoint(u32),
    BlockSize { block: Vec<u32>, expected: u32 },
    UnknownPoint { block: Vec<u32>, point: u32 },
    SubsetCoverage { subset: Vec<u32>, expected: u64, found: u64 },
    GroupShape { detail: String },
    PairCoverage { pair: (u32, u32), in_groups: usize, in_blocks: u64 },
}

impl std::fmt::Display for DesignViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DesignViolation::PointCount { expected, found } => {
                write!(f, "expected {expected} points, found {found}")
            }
            DesignViolation::DuplicatePoint(p) => write!(f, "duplicate point {p}"),
            DesignViolation::BlockSize { block, expected } => {
                write!(f, "block {block:?} does not have {expected} distinct points")
            }
            DesignViolation::UnknownPoint { block, point } => {
                write!(f, "block {block:?} contains unknown point {point}")
            }
            DesignViolation::SubsetCoverage { subset, expected, found } => {
                write!(f, "subset {subset:?} lies in {found} blocks, expected {expected}")
            }
            DesignViolation::GroupShape { detail } => write!(f, "bad groups: {detail}"),
            DesignViolation::PairCoverage { pair, in_groups, in_blocks } => write!(
                f,
                "pair {pair:?} lies in {in_groups} group(s) and {in_blocks} block(s)"
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DesignReport {
    pub ok: bool,
    pub violations: Vec<DesignViolation>,
}

const MAX_VIOLATIONS: usize = 32;

/// Exhaustive check of the design axioms: point count, block shape, and the
/// t-subset coverage count (or the pair/group axioms when groups are
/// present). Witnesses are collected up to a cap.
pub fn verify_design(d: &Design) -> DesignReport {
    let mut violations = Vec::new();
    let point_set: BTreeSet<u32> = d.points.iter().copied().collect();
    if point_set.len() != d.points.len() {
        let mut seen = BTreeSet::new();
        for &p in &d.points {
            if !seen.insert(p) {
                violations.push(DesignViolation::DuplicatePoint(p));
                break;
            }
        }
    }
    if d.points.len() != d.params.v as usize {
        violations.push(DesignViolation::PointCount {
            expected: d.params.v,
            found: d.points.len(),
        });
    }
    for block in &d.blocks {
        let distinct: BTreeSet<u32> = block.iter().copied().collect();
        if distinct.len() != d.params.k as usize || block.len() != d.params.k as usize {
            violations.push(DesignViolation::BlockSize {
                block: block.clone(),
                expected: d.params.k,
            });
        }
        for &p in block {
            if !point_set.contains(&p) {
                violations.push(DesignViolation::UnknownPoint {
                    block: block.clone(),
                    point: p,
                });
            }
        }
        if violations.len() >= MAX_VIOLATIONS {
            return DesignReport { ok: false, violations };
        }
    }
    if !violations.is_empty() {
        return DesignReport { ok: false, violations };
    }

    match &d.groups {
        None => verify_t_coverage(d, &mut violations),
        Some(groups) => verify_transversal_axioms(d, groups, &mut violations),
    }
    DesignReport { ok: violations.is_empty(), violations }
}

fn verify_t_coverage(d: &Design, violations: &mut Vec<DesignViolation>) {
    let t = d.params.t as usize;
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for block in &d.blocks {
        for sub in block.iter().copied().combinations(t) {
            *counts.entry(sub).or_insert(0) += 1;
        }
    }
    for sub in d.points.iter().copied().combinations(t) {
        let found = counts.get(&sub).copied().unwrap_or(0);
        if found != d.params.lambda {
            violations.push(DesignViolation::SubsetCoverage {
                subset: sub,
                expected: d.params.lambda,
                found,
            });
            if violations.len() >= MAX_VIOLATIONS {
                return;
            }
        }
    }
}

fn verify_transversal_axioms(
    d: &Design,
    groups: &[Vec<u32>],
    violations: &mut Vec<DesignViolation>,
) {
    let k = d.params.k as usize;
    let v = d.params.v as usize;
    if groups.len() != k {
        violations.push(DesignViolation::GroupShape {
            detail: format!("expected {k} groups, found {}", groups.len()),
        });
        return;
    }
    let n = v / k;
    let mut covered: BTreeSet<u32> = BTreeSet::new();
    for g in groups {
        if g.len() != n {
            violations.push(DesignViolation::GroupShape {
                detail: format!("group {g:?} does not have size {n}"),
            });
        }
        covered.extend(g.iter().copied());
    }
    if covered.len() != v || !d.points.iter().all(|p| covered.contains(p)) {
        violations.push(DesignViolation::GroupShape {
            detail: "groups do not partition the point set".into(),
        });
    }
    if !violations.is_empty() {
        return;
    }
    let mut group_of: HashMap<u32, usize> = HashMap::new();
    for (gi, g) in groups.iter().enumerate() {
        for &p in g {
            group_of.insert(p, gi);
        }
    }
    let mut pair_blocks: HashMap<(u32, u32), u64> = HashMap::new();
    for block in &d.blocks {
        for pair in block.iter().copied().combinations(2) {
            *pair_blocks.entry((pair[0], pair[1])).or_insert(0) += 1;
        }
    }
    for pair in d.points.iter().copied().combinations(2) {
        let (a, b) = (pair[0], pair[1]);
        let same_group = group_of.get(&a) == group_of.get(&b);
        let in_blocks = pair_blocks.get(&(a, b)).copied().unwrap_or(0);
        let ok = if same_group {
            in_blocks == 0
        } else {
            in_blocks == d.params.lambda
        };
        if !ok {
            violations.push(DesignViolation::PairCoverage {
                pair: (a, b),
                in_groups: usize::from(same_group),
                in_blocks,
            });
            if violations.len() >= MAX_VIOLATIONS {
                return;
            }
        }
    }
}

fn canonicalize_blocks(mut blocks: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort();
    blocks
}

/// Symmetric (n^2+n+1, n+1, 1)-BIBD from the projective plane of order n:
/// points are the 1-dim subspaces of GF(n)^3, blocks the point sets of the
/// 2-dim subspaces.
pub fn construct_projective_bibd(n: u64) -> Result<Design> {
    let (p, m) = prime_power(n).ok_or(Error::NotPrimePower(n))?;
    let field = FieldTable::new(p, m)?;
    let points = crate::subspace::enumerate_subspaces(&field, 3, 1)?;
    let planes = crate::subspace::enumerate_subspaces(&field, 3, 2)?;
    let blocks: Vec<Vec<u32>> = planes
        .iter()
        .map(|plane| {
            points
                .iter()
                .enumerate()
                .filter(|(_, pt)| crate::subspace::contains(&field, plane, pt))
                .map(|(i, _)| i as u32)
                .collect()
        })
        .collect();
    let v = points.len() as u32;
    let k = (n + 1) as u32;
    Ok(Design {
        points: (0..v).collect(),
        blocks: canonicalize_blocks(blocks),
        params: DesignParams::new(2, v, k, 1)?,
        groups: None,
    })
}

/// (n^2, n, 1)-BIBD from the affine plane of order n: points are GF(n)^2,
/// blocks the lines y = mx + c plus the verticals x = c.
pub fn construct_affine_bibd(n: u64) -> Result<Design> {
    let (p, m) = prime_power(n).ok_or(Error::NotPrimePower(n))?;
    let field = FieldTable::new(p, m)?;
    let n = n as u32;
    let id = |x: u32, y: u32| x * n + y;
    let mut blocks = Vec::new();
    for slope in field.elements() {
        for c in field.elements() {
            blocks.push(
                field
                    .elements()
                    .map(|x| id(x, field.add(field.mul(slope, x), c)))
                    .collect::<Vec<_>>(),
            );
        }
    }
    for c in field.elements() {
        blocks.push(field.elements().map(|y| id(c, y)).collect());
    }
    Ok(Design {
        points: (0..n * n).collect(),
        blocks: canonicalize_blocks(blocks),
        params: DesignParams::new(2, n * n, n, 1)?,
        groups: None,
    })
}

/// TD(k, n) for k in {n, n+1} from the orthogonal array over GF(n): groups
/// are indexed by slopes (plus one extra group when k = n+1), blocks by
/// pairs (a, b), with the block meeting slope-group j in symbol a*m_j + b
/// and the extra group in symbol a.
pub fn construct_transversal(k: u64, n: u64) -> Result<Design> {
    let (p, m) = prime_power(n).ok_or(Error::NotPrimePower(n))?;
    if k != n && k != n + 1 {
        return Err(Error::BadParams(format!(
            "transversal construction needs k in {{n, n+1}}, got k={k} n={n}"
        )));
    }
    let field = FieldTable::new(p, m)?;
    let n = n as u32;
    let k = k as u32;
    let id = |group: u32, symbol: u32| group * n + symbol;
    let mut blocks = Vec::new();
    for a in field.elements() {
        for b in field.elements() {
            let mut block: Vec<u32> = field
                .elements()
                .map(|slope| id(slope, field.add(field.mul(a, slope), b)))
                .collect();
            if k == n + 1 {
                block.push(id(n, a));
            }
            blocks.push(block);
        }
    }
    let groups = (0..k).map(|g| (0..n).map(|s| id(g, s)).collect()).collect();
    Ok(Design {
        points: (0..k * n).collect(),
        blocks: canonicalize_blocks(blocks),
        params: DesignParams { t: 2, v: k * n, k, lambda: 1 },
        groups: Some(groups),
    })
}

/// 3-(q^2+1, q+1, 1) design: points are GF(q^2) plus an extra symbol, the
/// base block is the subfield GF(q) plus that symbol, and the blocks are the
/// distinct images of the base block under all fractional-linear maps
/// z -> (az+b)/(cz+d) with ad != bc over GF(q^2).
pub fn construct_steiner3(q: u64) -> Result<Design> {
    let (p, m) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    if !(2..=5).contains(&q) {
        return Err(Error::BadParams(format!(
            "steiner3 construction capped at 2 <= q <= 5, got {q}"
        )));
    }
    let field = FieldTable::new(p, 2 * m)?;
    let q = q as u32;
    let qsq = field.order();
    let infinity = qsq;
    let mut base: Vec<u32> = field
        .elements()
        .filter(|&x| field.pow(x, q as u64) == x)
        .collect();
    base.push(infinity);
    debug_assert_eq!(base.len(), (q + 1) as usize);

    let apply = |a: u32, b: u32, c: u32, d: u32, z: u32| -> u32 {
        if z == infinity {
            if c == 0 {
                infinity
            } else {
                field.div(a, c).expect("nonzero denominator")
            }
        } else {
            let den = field.add(field.mul(c, z), d);
            if den == 0 {
                infinity
            } else {
                let num = field.add(field.mul(a, z), b);
                field.div(num, den).expect("nonzero denominator")
            }
        }
    };

    let mut images: BTreeSet<Vec<u32>> = BTreeSet::new();
    for a in field.elements() {
        for b in field.elements() {
            for c in field.elements() {
                for d in field.elements() {
                    if field.sub(field.mul(a, d), field.mul(b, c)) == 0 {
                        continue;
                    }
                    let mut img: Vec<u32> =
                        base.iter().map(|&z| apply(a, b, c, d, z)).collect();
                    img.sort_unstable();
                    images.insert(img);
                }
            }
        }
    }
    let params = DesignParams::new(3, qsq + 1, q + 1, 1)?;
    let blocks: Vec<Vec<u32>> = images.into_iter().collect();
    debug_assert_eq!(blocks.len() as u64, params.block_count()?);
    Ok(Design {
        points: (0..=qsq).collect(),
        blocks,
        params,
        groups: None,
    })
}

pub fn block_label(block: &[u32]) -> String {
    block.iter().map(|p| p.to_string()).join(".")
}

/// Incidence matrix: rows indexed by points, columns by blocks, entry 1 iff
/// the point lies in the block. The transposed variant swaps the roles.
pub fn incidence_matrix(d: &Design, transpose: bool) -> Result<BinaryMatrix> {
    let point_labels: Vec<String> = d.points.iter().map(|p| p.to_string()).collect();
    let block_labels: Vec<String> = d.blocks.iter().map(|b| block_label(b)).collect();
    let index_of: HashMap<u32, usize> =
        d.points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut entries = Vec::new();
    for (bi, block) in d.blocks.iter().enumerate() {
        for &p in block {
            let pi = index_of[&p];
            entries.push(if transpose {
                (bi as u32, pi as u32)
            } else {
                (pi as u32, bi as u32)
            });
        }
    }
    if transpose {
        BinaryMatrix::new(block_labels, point_labels, entries)
    } else {
        BinaryMatrix::new(point_labels, block_labels, entries)
    }
}

impl Design {
    /// Line-oriented text form:
    /// `DESIGN t v k lambda`, `POINTS ...`, optional `GROUP ...` lines,
    /// then one `BLOCK ...` line per block in canonical order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "DESIGN {} {} {} {}\n",
            self.params.t, self.params.v, self.params.k, self.params.lambda
        ));
        out.push_str("POINTS ");
        out.push_str(&self.points.iter().map(|p| p.to_string()).join(" "));
        out.push('\n');
        if let Some(groups) = &self.groups {
            for g in groups {
                out.push_str("GROUP ");
                out.push_str(&g.iter().map(|p| p.to_string()).join(" "));
                out.push('\n');
            }
        }
        for block in &self.blocks {
            out.push_str("BLOCK ");
            out.push_str(&block.iter().map(|p| p.to_string()).join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Design> {
        let mut params = None;
        let mut points: Vec<u32> = Vec::new();
        let mut groups: Vec<Vec<u32>> = Vec::new();
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let tag = tokens.next().unwrap();
            let nums: Vec<u64> = tokens
                .map(|t| {
                    t.parse::<u64>().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad integer {t:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            match tag {
                "DESIGN" => {
                    if nums.len() != 4 {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: "DESIGN needs t v k lambda".into(),
                        });
                    }
                    params = Some(DesignParams {
                        t: nums[0] as u32,
                        v: nums[1] as u32,
                        k: nums[2] as u32,
                        lambda: nums[3],
                    });
                }
                "POINTS" => points = nums.iter().map(|&x| x as u32).collect(),
                "GROUP" => groups.push(nums.iter().map(|&x| x as u32).collect()),
                "BLOCK" => blocks.push(nums.iter().map(|&x| x as u32).collect()),
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("unknown tag {tag:?}"),
                    })
                }
            }
        }
        let params = params.ok_or(Error::Parse {
            line: 0,
            msg: "missing DESIGN header".into(),
        })?;
        points.sort_unstable();
        Ok(Design {
            points,
            blocks: canonicalize_blocks(blocks),
            params,
            groups: if groups.is_empty() { None } else { Some(groups) },
        })
    }
}

/// The worked 3-(8,4,1) block list used in tests and docs.
pub fn example_steiner_8_4() -> Design {
    let blocks = vec![
        vec![1, 2, 5, 6],
        vec![3, 4, 7, 8],
        vec![1, 3, 5, 7],
        vec![2, 4, 6, 8],
        vec![1, 4, 5, 8],
        vec![2, 3, 6, 7],
        vec![1, 2, 3, 4],
        vec![5, 6, 7, 8],
        vec![1, 2, 7, 8],
        vec![3, 4, 5, 6],
        vec![1, 3, 6, 8],
        vec![2, 4, 5, 7],
        vec![1, 4, 6, 7],
        vec![2, 3, 5, 8],
    ];
    Design {
        points: (1..=8).collect(),
        blocks: canonicalize_blocks(blocks),
        params: DesignParams { t: 3, v: 8, k: 4, lambda: 1 },
        groups: None,
    }
}

/// The worked (9,3,1)-BIBD block list.
pub fn example_bibd_9_3() -> Design {
    let blocks = vec![
        vec![3, 5, 7],
        vec![1, 2, 3],
        vec![4, 5, 6],
        vec![7, 8, 9],
        vec![1, 4, 7],
        vec![2, 5, 8],
        vec![3, 6, 9],
        vec![1, 5, 9],
        vec![2, 6, 7],
        vec![3, 4, 8],
        vec![1, 6, 8],
        vec![2, 4, 9],
    ];
    Design {
        points: (1..=9).collect(),
        blocks: canonicalize_blocks(blocks),
        params: DesignParams { t: 2, v: 9, k: 3, lambda: 1 },
        groups: None,
    }
}

/// The worked (7,3,1)-BIBD (Fano plane) block list.
pub fn example_fano() -> Design {
    let blocks = vec![
        vec![1, 2, 7],
        vec![1, 4, 5],
        vec![1, 3, 6],
        vec![4, 6, 7],
        vec![2, 5, 6],
        vec![3, 5, 7],
        vec![2, 3, 4],
    ];
    Design {
        points: (1..=7).collect(),
        blocks: canonicalize_blocks(blocks),
        params: DesignParams { t: 2, v: 7, k: 3, lambda: 1 },
        groups: None,
    }
}

/// The worked TD(4,3) block list.
pub fn example_td_4_3() -> Design {
    let blocks = vec![
        vec![1, 4, 7, 10],
        vec![1, 5, 8, 11],
        vec![1, 6, 9, 12],
        vec![2, 4, 9, 11],
        vec![2, 5, 7, 12],
        vec![2, 6, 8, 10],
        vec![3, 4, 8, 12],
        vec![3, 5, 9, 10],
        vec![3, 6, 7, 11],
    ];
    Design {
        points: (1..=12).collect(),
        blocks: canonicalize_blocks(blocks),
        params: DesignParams { t: 2, v: 12, k: 4, lambda: 1 },
        groups: Some(vec![
            vec![1, 2, 3],
            vec![4, 5, 6],
            vec![7, 8, 9],
            vec![10, 11, 12],
        ]),
    }
}
