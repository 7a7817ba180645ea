//! Subspace machinery over GF(q)^v: canonical reduced-row-echelon
//! representatives, exhaustive enumeration, Gaussian binomials, the trivial
//! t = k subspace designs, and the exhaustive design verifier.
//!
//! Canonical order everywhere is lexicographic on the flattened RREF basis;
//! block indices and "j-th subspace" selections downstream resolve against
//! this order.

use std::collections::HashMap;

use itertools::Itertools;

use crate::gf::FieldTable;
use crate::{Error, Result};

/// A k-dim subspace of GF(q)^v held as its unique RREF basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    pub q: u32,
    pub ambient_dim: usize,
    /// RREF rows, each of length `ambient_dim`.
    pub basis: Vec<Vec<u32>>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn flattened(&self) -> Vec<u32> {
        self.basis.iter().flatten().copied().collect()
    }

    pub fn label(&self) -> String {
        self.basis.iter().map(|row| vec_label(row, self.q)).join(".")
    }
}

pub fn vec_label(row: &[u32], q: u32) -> String {
    if q <= 36 {
        row.iter()
            .map(|&x| char::from_digit(x, 36).unwrap().to_ascii_uppercase())
            .collect()
    } else {
        row.iter().map(|x| x.to_string()).join("-")
    }
}

/// Reduce rows to RREF over the field; returns the nonzero rows.
pub fn rref(field: &FieldTable, rows: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    if m.is_empty() {
        return m;
    }
    let width = m[0].len();
    let mut pivot_row = 0;
    for col in 0..width {
        let Some(src) = (pivot_row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(pivot_row, src);
        let inv = field.inv(m[pivot_row][col]).expect("pivot is nonzero");
        for x in m[pivot_row].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for r in 0..m.len() {
            if r == pivot_row || m[r][col] == 0 {
                continue;
            }
            let factor = m[r][col];
            let pivot = m[pivot_row].clone();
            for (x, &pv) in m[r].iter_mut().zip(pivot.iter()) {
                *x = field.sub(*x, field.mul(factor, pv));
            }
        }
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    m.truncate(pivot_row);
    m
}

pub fn canonicalize(field: &FieldTable, rows: &[Vec<u32>]) -> Subspace {
    let ambient_dim = rows.first().map(|r| r.len()).unwrap_or(0);
    Subspace {
        q: field.order(),
        ambient_dim,
        basis: rref(field, rows),
    }
}

/// Is the vector in the span of the RREF basis?
pub fn member(field: &FieldTable, space: &Subspace, vector: &[u32]) -> bool {
    let mut v = vector.to_vec();
    for row in &space.basis {
        let pivot = row.iter().position(|&x| x != 0).expect("RREF row nonzero");
        if v[pivot] != 0 {
            let factor = v[pivot];
            for (x, &rv) in v.iter_mut().zip(row.iter()) {
                *x = field.sub(*x, field.mul(factor, rv));
            }
        }
    }
    v.iter().all(|&x| x == 0)
}

/// Is every basis vector of `small` inside `big`?
pub fn contains(field: &FieldTable, big: &Subspace, small: &Subspace) -> bool {
    small.basis.iter().all(|row| member(field, big, row))
}

/// Span of the union of two subspaces, canonicalized.
pub fn subspace_sum(field: &FieldTable, a: &Subspace, b: &Subspace) -> Subspace {
    debug_assert_eq!(a.q, b.q);
    debug_assert_eq!(a.ambient_dim, b.ambient_dim);
    let rows: Vec<Vec<u32>> = a.basis.iter().chain(b.basis.iter()).cloned().collect();
    Subspace {
        q: a.q,
        ambient_dim: a.ambient_dim,
        basis: rref(field, &rows),
    }
}

/// Gaussian binomial: the number of k-dim subspaces of GF(q)^v, exact in
/// 64 bits with an explicit overflow error.
pub fn gauss_binom(v: u64, k: u64, q: u64) -> Result<u64> {
    if k > v {
        return Ok(0);
    }
    let mut acc: u128 = 1;
    for i in 1..=k {
        let num = pow_checked(q, v - k + i)? - 1;
        let den = pow_checked(q, i)? - 1;
        acc = acc
            .checked_mul(num)
            .ok_or(Error::Overflow("gaussian binomial"))?;
        debug_assert_eq!(acc % den, 0);
        acc /= den;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow("gaussian binomial"))
}

fn pow_checked(q: u64, e: u64) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc
            .checked_mul(q as u128)
            .filter(|&x| x < (1u128 << 100))
            .ok_or(Error::Overflow("gaussian binomial"))?;
    }
    Ok(acc)
}

/// All k-dim subspaces of GF(q)^v, each exactly once, in canonical order.
/// RREF matrices are generated pivot-column set by pivot-column set with all
/// assignments of the free entries, then sorted.
pub fn enumerate_subspaces(field: &FieldTable, v: usize, k: usize) -> Result<Vec<Subspace>> {
    let q = field.order();
    let count = gauss_binom(v as u64, k as u64, q as u64)?;
    let cap = crate::enumeration_cap();
    if count > cap {
        return Err(Error::CapExceeded(count, cap));
    }
    if k == 0 {
        return Ok(vec![Subspace { q, ambient_dim: v, basis: Vec::new() }]);
    }
    let mut out = Vec::with_capacity(count as usize);
    for pivots in (0..v).combinations(k) {
        // free positions: to the right of the row's pivot, not a pivot column
        let mut free = Vec::new();
        for (row, &p) in pivots.iter().enumerate() {
            for col in p + 1..v {
                if !pivots.contains(&col) {
                    free.push((row, col));
                }
            }
        }
        let mut assignment = vec![0u32; free.len()];
        loop {
            let mut basis = vec![vec![0u32; v]; k];
            for (row, &p) in pivots.iter().enumerate() {
                basis[row][p] = 1;
            }
            for (&(row, col), &val) in free.iter().zip(assignment.iter()) {
                basis[row][col] = val;
            }
            out.push(Subspace { q, ambient_dim: v, basis });
            // base-q counter over the free entries
            let mut done = true;
            for digit in assignment.iter_mut() {
                *digit += 1;
                if *digit < q {
                    done = false;
                    break;
                }
                *digit = 0;
            }
            if done {
                break;
            }
        }
    }
    out.sort_by_key(|a| a.flattened());
    debug_assert_eq!(out.len() as u64, count);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SubspaceDesign {
    pub q: u32,
    pub v: usize,
    pub t: u32,
    pub k: u32,
    pub lambda: u64,
    /// k-dim blocks in canonical order.
    pub blocks: Vec<Subspace>,
}

/// The t = k, lambda = 1 design whose blocks are all k-dim subspaces.
pub fn trivial_subspace_design(field: &FieldTable, v: usize, k: usize) -> Result<SubspaceDesign> {
    if !(2 <= k && k <= v) {
        return Err(Error::BadParams(format!(
            "trivial subspace design needs 2 <= k <= v, got k={k} v={v}"
        )));
    }
    Ok(SubspaceDesign {
        q: field.order(),
        v,
        t: k as u32,
        k: k as u32,
        lambda: 1,
        blocks: enumerate_subspaces(field, v, k)?,
    })
}

#[derive(Debug, Clone)]
pub struct SubspaceViolation {
    pub subspace_label: String,
    pub expected: u64,
    pub found: u64,
}

#[derive(Debug, Clone)]
pub struct SubspaceReport {
    pub ok: bool,
    pub violations: Vec<SubspaceViolation>,
}

/// List the d-dim subspaces of a block by enumerating RREF matrices inside
/// the block's own coordinates and mapping them through its basis.
pub fn subspaces_of(field: &FieldTable, block: &Subspace, d: usize) -> Result<Vec<Subspace>> {
    let k = block.dim();
    let inner = enumerate_subspaces(field, k, d)?;
    let mut out: Vec<Subspace> = inner
        .iter()
        .map(|inner_space| {
            let rows: Vec<Vec<u32>> = inner_space
                .basis
                .iter()
                .map(|coeffs| mix(field, coeffs, &block.basis, block.ambient_dim))
                .collect();
            canonicalize(field, &rows)
        })
        .collect();
    out.sort_by_key(|a| a.flattened());
    Ok(out)
}

fn mix(field: &FieldTable, coeffs: &[u32], basis: &[Vec<u32>], width: usize) -> Vec<u32> {
    let mut acc = vec![0u32; width];
    for (&c, row) in coeffs.iter().zip(basis.iter()) {
        if c == 0 {
            continue;
        }
        for (a, &x) in acc.iter_mut().zip(row.iter()) {
            *a = field.add(*a, field.mul(c, x));
        }
    }
    acc
}

/// Exhaustive lambda check: every t-dim subspace of the ambient space must
/// lie in exactly lambda blocks.
pub fn verify_subspace_design(field: &FieldTable, sd: &SubspaceDesign) -> Result<SubspaceReport> {
    let t = sd.t as usize;
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for block in &sd.blocks {
        if block.dim() != sd.k as usize || block.ambient_dim != sd.v || block.q != sd.q {
            return Err(Error::BadParams(format!(
                "block {} does not match design shape",
                block.label()
            )));
        }
        for sub in subspaces_of(field, block, t)? {
            *counts.entry(sub.flattened()).or_insert(0) += 1;
        }
    }
    let mut violations = Vec::new();
    for sub in enumerate_subspaces(field, sd.v, t)? {
        let found = counts.get(&sub.flattened()).copied().unwrap_or(0);
        if found != sd.lambda {
            violations.push(SubspaceViolation {
                subspace_label: sub.label(),
                expected: sd.lambda,
                found,
            });
            if violations.len() >= 32 {
                break;
            }
        }
    }
    Ok(SubspaceReport { ok: violations.is_empty(), violations })
}

impl SubspaceDesign {
    /// `QDESIGN q v t k lambda` header, then one `BLOCK` line per block
    /// listing the k*v RREF entries row-major.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "QDESIGN {} {} {} {} {}\n",
            self.q, self.v, self.t, self.k, self.lambda
        );
        for block in &self.blocks {
            out.push_str("BLOCK ");
            out.push_str(&block.flattened().iter().map(|x| x.to_string()).join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<SubspaceDesign> {
        let mut header: Option<(u32, usize, u32, u32, u64)> = None;
        let mut blocks = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let tag = tokens.next().unwrap();
            let nums: Vec<u64> = tokens
                .map(|tok| {
                    tok.parse::<u64>().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad integer {tok:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            match tag {
                "QDESIGN" => {
                    if nums.len() != 5 {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: "QDESIGN needs q v t k lambda".into(),
                        });
                    }
                    header = Some((
                        nums[0] as u32,
                        nums[1] as usize,
                        nums[2] as u32,
                        nums[3] as u32,
                        nums[4],
                    ));
                }
                "BLOCK" => {
                    let (q, v, _, k, _) = header.ok_or(Error::Parse {
                        line: lineno + 1,
                        msg: "BLOCK before QDESIGN header".into(),
                    })?;
                    if nums.len() != k as usize * v {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!("expected {} entries, got {}", k as usize * v, nums.len()),
                        });
                    }
                    let basis: Vec<Vec<u32>> = nums
                        .chunks(v)
                        .map(|row| row.iter().map(|&x| x as u32).collect())
                        .collect();
                    blocks.push(Subspace { q, ambient_dim: v, basis });
                }
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("unknown tag {tag:?}"),
                    })
                }
            }
        }
        let (q, v, t, k, lambda) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing QDESIGN header".into(),
        })?;
        Ok(SubspaceDesign { q, v, t, k, lambda, blocks })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_binom_values() {
        assert_eq!(gauss_binom(3, 1, 2).unwrap(), 7);
        assert_eq!(gauss_binom(5, 0, 2).unwrap(), 1);
        assert_eq!(gauss_binom(5, 3, 2).unwrap(), 155);
        assert_eq!(gauss_binom(4, 2, 2).unwrap(), 35);
        assert_eq!(gauss_binom(3, 1, 4).unwrap(), 21);
        assert_eq!(gauss_binom(5, 3, 3).unwrap(), 1210);
        assert_eq!(gauss_binom(2, 3, 2).unwrap(), 0);
        assert!(gauss_binom(300, 150, 2).is_err());
    }

    #[test]
    fn enumeration_counts_match_gauss_binom() {
        for q in [2u64, 3] {
            let (p, m) = crate::gf::prime_power(q).unwrap();
            let field = FieldTable::new(p, m).unwrap();
            for v in 1..=5usize {
                for k in 0..=v {
                    let spaces = enumerate_subspaces(&field, v, k).unwrap();
                    assert_eq!(
                        spaces.len() as u64,
                        gauss_binom(v as u64, k as u64, q).unwrap(),
                        "count mismatch at q={q} v={v} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn whole_space_is_unique() {
        let field = FieldTable::new(3, 1).unwrap();
        let spaces = enumerate_subspaces(&field, 4, 4).unwrap();
        assert_eq!(spaces.len(), 1);
        assert_eq!(spaces[0].dim(), 4);
    }

    #[test]
    fn rref_canonicity_under_basis_change() {
        // re-canonicalizing scrambled spanning sets lands on the same representative
        let field = FieldTable::new(2, 1).unwrap();
        let spaces = enumerate_subspaces(&field, 4, 2).unwrap();
        for s in &spaces {
            let a = &s.basis[0];
            let b = &s.basis[1];
            let sum: Vec<u32> = a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect();
            for scrambled in [
                vec![b.clone(), a.clone()],
                vec![sum.clone(), a.clone()],
                vec![b.clone(), sum.clone(), a.clone()],
            ] {
                assert_eq!(&canonicalize(&field, &scrambled), s);
            }
        }
    }

    #[test]
    fn membership_matches_span_enumeration() {
        let field = FieldTable::new(2, 1).unwrap();
        let spaces = enumerate_subspaces(&field, 4, 2).unwrap();
        for s in &spaces {
            // spell out all q^k combinations and compare against member()
            let mut span = std::collections::BTreeSet::new();
            for c0 in 0..2 {
                for c1 in 0..2 {
                    let v = mix(&field, &[c0, c1], &s.basis, 4);
                    span.insert(v);
                }
            }
            for x0 in 0..2u32 {
                for x1 in 0..2u32 {
                    for x2 in 0..2u32 {
                        for x3 in 0..2u32 {
                            let v = vec![x0, x1, x2, x3];
                            assert_eq!(member(&field, s, &v), span.contains(&v));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sum_is_idempotent_and_grows_dimension() {
        let field = FieldTable::new(2, 1).unwrap();
        let spaces = enumerate_subspaces(&field, 3, 1).unwrap();
        let d = &spaces[0];
        assert_eq!(&subspace_sum(&field, d, d), d);
        for y in &spaces {
            let s = subspace_sum(&field, d, y);
            if contains(&field, d, y) {
                assert_eq!(s.dim(), 1);
            } else {
                assert_eq!(s.dim(), 2);
            }
        }
    }

    #[test]
    fn pair_count_matches_row_weight_formula() {
        // for t = 2: pairs (y, H) with dim(D + y) = 2 number gbinom(v-1,1)*q
        for (q, v) in [(2u64, 3usize), (2, 4), (3, 3), (3, 4), (2, 5)] {
            let (p, m) = crate::gf::prime_power(q).unwrap();
            let field = FieldTable::new(p, m).unwrap();
            let lines = enumerate_subspaces(&field, v, 1).unwrap();
            let d = &lines[0];
            let pairs = lines
                .iter()
                .filter(|y| subspace_sum(&field, d, y).dim() == 2)
                .count() as u64;
            let expected = gauss_binom(v as u64 - 1, 1, q).unwrap() * q;
            assert_eq!(pairs, expected, "q={q} v={v}");
        }
    }

    #[test]
    fn trivial_designs() {
        let f2 = FieldTable::new(2, 1).unwrap();
        let sd = trivial_subspace_design(&f2, 3, 2).unwrap();
        assert_eq!(sd.blocks.len(), 7);
        assert!(verify_subspace_design(&f2, &sd).unwrap().ok);

        let f4 = FieldTable::new(2, 2).unwrap();
        let sd = trivial_subspace_design(&f4, 3, 2).unwrap();
        assert_eq!(sd.blocks.len(), 21);
        assert!(verify_subspace_design(&f4, &sd).unwrap().ok);

        let f3 = FieldTable::new(3, 1).unwrap();
        let sd = trivial_subspace_design(&f3, 4, 3).unwrap();
        // 40 blocks; the scheme built on it has K = gbinom(4,2)_3 = 130 rows
        assert_eq!(sd.blocks.len(), 40);
        assert_eq!(gauss_binom(4, 2, 3).unwrap(), 130);
        assert!(verify_subspace_design(&f3, &sd).unwrap().ok);
    }

    #[test]
    fn deleted_block_fails_verification() {
        let f2 = FieldTable::new(2, 1).unwrap();
        let mut sd = trivial_subspace_design(&f2, 4, 2).unwrap();
        sd.blocks.remove(0);
        let report = verify_subspace_design(&f2, &sd).unwrap();
        assert!(!report.ok);
        assert!(report.violations.iter().any(|v| v.found == 0));
    }

    #[test]
    fn text_roundtrip() {
        let f3 = FieldTable::new(3, 1).unwrap();
        let sd = trivial_subspace_design(&f3, 3, 2).unwrap();
        let text = sd.to_text();
        let parsed = SubspaceDesign::parse(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
        assert!(verify_subspace_design(&f3, &parsed).unwrap().ok);
    }

    #[test]
    fn cap_is_enforced() {
        let f2 = FieldTable::new(2, 1).unwrap();
        assert!(matches!(
            enumerate_subspaces(&f2, 30, 15),
            Err(Error::Overflow(_) | Error::CapExceeded(_, _))
        ));
    }
}
