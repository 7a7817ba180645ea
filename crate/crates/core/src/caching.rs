//! Broadcast caching over a constant-row-weight matrix: placement, cover-
//! indexed XOR delivery, byte-exact decode verification, and the closed-form
//! parameter formulas for every scheme family plus the two baselines used in
//! the comparison tables.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::binmat::{verify_cover, BinaryMatrix, Cover};
use crate::rat::{binom_big, binom_rat, rat_u64, Rat};
use crate::subspace::gauss_binom;
use crate::{Error, Result};

/// N equally sized files, each split into F subfiles of `subfile_len` bytes
/// under the matrix's column order.
#[derive(Debug, Clone)]
pub struct FileLibrary {
    pub files: Vec<Vec<u8>>,
    pub subfile_count: usize,
    pub subfile_len: usize,
}

impl FileLibrary {
    pub fn new(files: Vec<Vec<u8>>, subfile_count: usize) -> Result<FileLibrary> {
        let Some(first) = files.first() else {
            return Err(Error::BadParams("library needs at least one file".into()));
        };
        if first.is_empty() || first.len() % subfile_count != 0 {
            return Err(Error::BadParams(format!(
                "file length {} is not a positive multiple of F = {subfile_count}",
                first.len()
            )));
        }
        if files.iter().any(|f| f.len() != first.len()) {
            return Err(Error::BadParams("files differ in length".into()));
        }
        let subfile_len = first.len() / subfile_count;
        Ok(FileLibrary { files, subfile_count, subfile_len })
    }

    pub fn random(n_files: usize, subfile_count: usize, subfile_len: usize, seed: u64) -> FileLibrary {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let files = (0..n_files)
            .map(|_| {
                let mut bytes = vec![0u8; subfile_count * subfile_len];
                rng.fill_bytes(&mut bytes);
                bytes
            })
            .collect();
        FileLibrary { files, subfile_count, subfile_len }
    }

    pub fn file_count(&self) -> usize {
        self.files.len()
    }

    pub fn subfile(&self, file: usize, sub: usize) -> &[u8] {
        let start = sub * self.subfile_len;
        &self.files[file][start..start + self.subfile_len]
    }
}

/// Per-user cached subfile columns: user u holds every file's subfile f
/// exactly when the matrix has a 0 at (u, f).
#[derive(Debug, Clone)]
pub struct Placement {
    pub cached_cols: Vec<Vec<u32>>,
    pub uncached_per_row: usize,
}

pub fn place(matrix: &BinaryMatrix, lib: &FileLibrary) -> Result<Placement> {
    let z = matrix
        .constant_row_weight()
        .ok_or_else(|| Error::BadParams("caching matrix must have constant row weight".into()))?;
    if lib.subfile_count != matrix.cols() {
        return Err(Error::BadParams(format!(
            "library is split into {} subfiles but matrix has {} columns",
            lib.subfile_count,
            matrix.cols()
        )));
    }
    let cached_cols = (0..matrix.rows())
        .map(|u| {
            let ones = matrix.row_ones(u);
            (0..matrix.cols() as u32)
                .filter(|c| ones.binary_search(c).is_err())
                .collect()
        })
        .collect();
    Ok(Placement { cached_cols, uncached_per_row: z })
}

#[derive(Debug, Clone)]
pub struct Transmission {
    pub identity_index: usize,
    pub payload: Vec<u8>,
}

impl Transmission {
    pub fn to_log_line(&self) -> String {
        let hex: String = self.payload.iter().map(|b| format!("{b:02x}")).collect();
        format!("TX {} {}", self.identity_index, hex)
    }
}

#[derive(Debug, Clone)]
pub struct CachingReport {
    pub users: usize,
    pub subpacketization: usize,
    pub uncached_per_row: usize,
    pub cover_size: usize,
    pub rate: Rat,
    pub uncached: Rat,
    pub bits_transmitted: u64,
    pub per_user_ok: Vec<bool>,
    pub decode_ok: bool,
}

impl CachingReport {
    pub fn to_csv(&self) -> String {
        format!(
            "K,F,Z,S,R,uncached\n{},{},{},{},{},{}\n",
            self.users,
            self.subpacketization,
            self.uncached_per_row,
            self.cover_size,
            self.rate,
            self.uncached
        )
    }
}

fn xor_into(acc: &mut [u8], rhs: &[u8]) {
    for (a, b) in acc.iter_mut().zip(rhs) {
        *a ^= b;
    }
}

/// One XOR transmission per identity submatrix, then a full decode check:
/// every user reassembles its demanded file byte-exactly from its cache and
/// the transmissions.
pub fn deliver(
    matrix: &BinaryMatrix,
    cover: &Cover,
    lib: &FileLibrary,
    demands: &[usize],
) -> Result<(Vec<Transmission>, CachingReport)> {
    let report = verify_cover(matrix, cover);
    if !report.ok {
        return Err(Error::InvalidCover(format!(
            "{} identity violations, overlap: {:?}, {} uncovered",
            report.identity_violations.len(),
            report.overlap_witness,
            report.uncovered.len()
        )));
    }
    if demands.len() != matrix.rows() {
        return Err(Error::BadParams(format!(
            "need one demand per user, got {} for K = {}",
            demands.len(),
            matrix.rows()
        )));
    }
    if let Some(&d) = demands.iter().find(|&&d| d >= lib.file_count()) {
        return Err(Error::BadParams(format!(
            "demand {d} out of range for N = {}",
            lib.file_count()
        )));
    }
    let placement = place(matrix, lib)?;

    let transmissions: Vec<Transmission> = cover
        .identities
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let mut payload = vec![0u8; lib.subfile_len];
            for &(u, f) in &id.pairs {
                xor_into(&mut payload, lib.subfile(demands[u as usize], f as usize));
            }
            Transmission { identity_index: i, payload }
        })
        .collect();

    // which identity serves each missing (user, subfile) entry
    let mut serving: HashMap<(u32, u32), usize> = HashMap::with_capacity(matrix.ones_count());
    for (i, id) in cover.identities.iter().enumerate() {
        for &pair in &id.pairs {
            serving.insert(pair, i);
        }
    }

    let mut per_user_ok = Vec::with_capacity(matrix.rows());
    for u in 0..matrix.rows() {
        let want = &lib.files[demands[u]];
        let mut got = vec![0u8; want.len()];
        for &c in &placement.cached_cols[u] {
            let start = c as usize * lib.subfile_len;
            got[start..start + lib.subfile_len]
                .copy_from_slice(lib.subfile(demands[u], c as usize));
        }
        for &f in matrix.row_ones(u) {
            let identity = &cover.identities[serving[&(u as u32, f)]];
            let mut value = transmissions[serving[&(u as u32, f)]].payload.clone();
            for &(u2, f2) in &identity.pairs {
                if u2 == u as u32 {
                    continue;
                }
                // every other matched subfile is cached at user u
                debug_assert!(!matrix.get(u as u32, f2));
                xor_into(&mut value, lib.subfile(demands[u2 as usize], f2 as usize));
            }
            let start = f as usize * lib.subfile_len;
            got[start..start + lib.subfile_len].copy_from_slice(&value);
        }
        per_user_ok.push(&got == want);
    }

    let s = cover.size();
    let f = matrix.cols();
    let decode_ok = per_user_ok.iter().all(|&ok| ok);
    let report = CachingReport {
        users: matrix.rows(),
        subpacketization: f,
        uncached_per_row: placement.uncached_per_row,
        cover_size: s,
        rate: Rat::new(BigInt::from(s), BigInt::from(f)),
        uncached: Rat::new(
            BigInt::from(placement.uncached_per_row),
            BigInt::from(f),
        ),
        bits_transmitted: (s * lib.subfile_len * 8) as u64,
        per_user_ok,
        decode_ok,
    };
    Ok((transmissions, report))
}

/// Scheme families, parametrized by the underlying design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Bibd { v: u64, k: u64 },
    TDesign { t: u64, v: u64, k: u64 },
    Transversal { n: u64, k: u64 },
    Subspace { q: u64, v: u64, t: u64, k: u64 },
    /// Binomial computing matrix; has no caching closed form here.
    Man { k: u64, r: u64 },
}

/// Closed-form caching parameters. `rate` is the delivered rate S/F; for
/// BIBDs `rate_alt` carries the alternative closed form k(k-1)/v that some
/// summaries print instead.
#[derive(Debug, Clone)]
pub struct SchemeParams {
    pub users: u64,
    pub subpacketization: Rat,
    pub uncached: Rat,
    pub rate: Rat,
    pub rate_alt: Option<Rat>,
    pub cover_size: Rat,
    pub identity_size: Rat,
}

pub fn scheme_params(family: &Family) -> Result<SchemeParams> {
    match *family {
        Family::Bibd { v, k } => {
            if !(k >= 2 && v > k) {
                return Err(Error::BadParams(format!("bad BIBD parameters v={v} k={k}")));
            }
            let f = Rat::new(BigInt::from(v * (v - 1)), BigInt::from(k * (k - 1)));
            Ok(SchemeParams {
                users: v,
                subpacketization: f,
                uncached: Rat::new(BigInt::from(k), BigInt::from(v)),
                rate: Rat::new(BigInt::from(k * (k - 1)), BigInt::from(v - 1)),
                rate_alt: Some(Rat::new(BigInt::from(k * (k - 1)), BigInt::from(v))),
                cover_size: rat_u64(v),
                identity_size: Rat::new(BigInt::from(v - 1), BigInt::from(k - 1)),
            })
        }
        Family::TDesign { t, v, k } => {
            if !(t >= 2 && k >= t && v > k) {
                return Err(Error::BadParams(format!(
                    "bad t-design parameters t={t} v={v} k={k}"
                )));
            }
            let f = binom_rat(v, t) * rat_u64(k) / binom_rat(k, t);
            let s = binom_rat(k - 1, t - 1) * rat_u64(v);
            Ok(SchemeParams {
                users: crate::rat::binom_u64(v, t - 1)?,
                subpacketization: f.clone(),
                uncached: binom_rat(k, t) * rat_u64(v - t + 1)
                    / (binom_rat(v, t) * rat_u64(k)),
                rate: s.clone() / f,
                rate_alt: None,
                cover_size: s,
                identity_size: binom_rat(v - 1, t - 1) / binom_rat(k - 1, t - 1),
            })
        }
        Family::Transversal { n, k } => {
            if !(k >= n && n >= 2) {
                return Err(Error::BadParams(format!(
                    "bad transversal parameters n={n} k={k}"
                )));
            }
            Ok(SchemeParams {
                users: n * n,
                subpacketization: rat_u64(k * n),
                uncached: Rat::new(BigInt::one(), BigInt::from(n)),
                rate: Rat::one(),
                rate_alt: None,
                cover_size: rat_u64(k * n),
                identity_size: rat_u64(n),
            })
        }
        Family::Subspace { q, v, t, k } => {
            if !(t >= 2 && k >= t && v >= k) {
                return Err(Error::BadParams(format!(
                    "bad subspace parameters q={q} v={v} t={t} k={k}"
                )));
            }
            let gb = |a: u64, b: u64| -> Result<Rat> { Ok(rat_u64(gauss_binom(a, b, q)?)) };
            let qp = rat_u64(q.pow((t - 1) as u32));
            let users = gauss_binom(v, t - 1, q)?;
            let f = gb(v, t)? * gb(k, 1)? / gb(k, t)?;
            let s = gb(k - 1, t - 1)? * gb(v, 1)? * qp.clone();
            Ok(SchemeParams {
                users,
                subpacketization: f.clone(),
                uncached: gb(v - t + 1, 1)? * qp / f.clone(),
                rate: s.clone() / f,
                rate_alt: None,
                cover_size: s,
                identity_size: gb(v - 1, t - 1)? / gb(k - 1, t - 1)?,
            })
        }
        Family::Man { .. } => Err(Error::BadParams(
            "binomial matrices have no caching closed form here; simulate instead".into(),
        )),
    }
}

/// Optimal-rate baseline at the same K and uncached fraction: rate
/// K(1-M/N)/(1+K M/N) with subpacketization C(K, K M/N). A non-integral
/// cache point K*M/N is flagged and rounded to the nearest integer for the
/// subpacketization.
#[derive(Debug, Clone)]
pub struct ManBaseline {
    pub rate_star: Rat,
    pub f_star: BigInt,
    pub cache_point: Rat,
    pub cache_point_integral: bool,
}

pub fn man_baseline(users: u64, uncached: &Rat) -> ManBaseline {
    let k = rat_u64(users);
    let m_over_n = Rat::one() - uncached.clone();
    let cache_point = k.clone() * m_over_n.clone();
    let cache_point_integral = cache_point.is_integer();
    let rate_star = k.clone() * uncached.clone() / (Rat::one() + cache_point.clone());
    let rounded = cache_point.round().to_integer();
    let rounded_u64 = if rounded.is_negative() {
        0
    } else {
        u64::try_from(&rounded).unwrap_or(users)
    };
    ManBaseline {
        rate_star,
        f_star: BigInt::from(binom_big(users, rounded_u64.min(users))),
        cache_point,
        cache_point_integral,
    }
}

/// Closed forms for the strong-edge-coloring baseline, from its four
/// parameters (m, a, b, lambda).
#[derive(Debug, Clone)]
pub struct SecParams {
    pub users: u64,
    pub uncached: Rat,
    pub rate: Rat,
    pub subpacketization: u64,
}

pub fn sec_baseline(m: u64, a: u64, b: u64, lambda: u64) -> Result<SecParams> {
    if a > m || b > m || lambda > a.min(b) {
        return Err(Error::BadParams(format!(
            "need a,b <= m and lambda <= min(a,b), got m={m} a={a} b={b} lambda={lambda}"
        )));
    }
    let users = crate::rat::binom_u64(m, a)?;
    let f = crate::rat::binom_u64(m, b)?;
    let uncached = binom_rat(a, lambda) * binom_rat(m - a, b - lambda) / binom_rat(m, b);
    let first = binom_big(a + b - 2 * lambda, a - lambda);
    let second = if m + 2 * lambda >= a + b {
        binom_big(m + 2 * lambda - a - b, lambda)
    } else {
        num_bigint::BigUint::zero()
    };
    let denom = first.max(second);
    if denom.is_zero() {
        return Err(Error::BadParams("degenerate coloring denominator".into()));
    }
    let rate = rat_u64(users) * uncached.clone() / Rat::from_integer(BigInt::from(denom));
    Ok(SecParams { users, uncached, rate, subpacketization: f })
}
