//! Map/shuffle/reduce over a computing matrix: nodes map the subfiles their
//! row leaves uncovered, exchange intermediate values through one coded and
//! one uncoded transmission per identity submatrix, and reduce their share
//! of the output functions. Includes matching-based transmitter balancing
//! and the full- and partial-straggler variants.
//!
//! The simulation is honest about information flow: a node reduces only
//! from values it mapped itself or decoded out of the logged transmissions,
//! and the result is compared bit-exactly against a centralized oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::binmat::{verify_cover, BinaryMatrix, Cover};
use crate::caching::Family;
use crate::rat::{binom_rat, rat_u64, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ComputingConfig<'a> {
    pub matrix: &'a BinaryMatrix,
    pub cover: &'a Cover,
    pub q_total: usize,
    pub t_bits: usize,
}

impl<'a> ComputingConfig<'a> {
    pub fn new(
        matrix: &'a BinaryMatrix,
        cover: &'a Cover,
        q_total: usize,
        t_bits: usize,
    ) -> Result<ComputingConfig<'a>> {
        let report = verify_cover(matrix, cover);
        if !report.ok {
            return Err(Error::InvalidCover(format!(
                "{} identity violations, overlap: {:?}, {} uncovered",
                report.identity_violations.len(),
                report.overlap_witness,
                report.uncovered.len()
            )));
        }
        let g = cover
            .uniform_size
            .ok_or_else(|| Error::BadParams("cover must have uniform identity size".into()))?;
        if g < 2 {
            return Err(Error::BadParams(format!(
                "identity size g = {g} < 2: no exchange partner exists"
            )));
        }
        if matrix.constant_col_weight().is_none() {
            return Err(Error::BadParams(
                "computing matrix must have constant column weight".into(),
            ));
        }
        let k = matrix.rows();
        if q_total == 0 || !q_total.is_multiple_of(k) {
            return Err(Error::BadParams(format!(
                "Q = {q_total} must be a positive multiple of K = {k}"
            )));
        }
        if t_bits == 0 || !t_bits.is_multiple_of(8) {
            return Err(Error::BadParams(format!(
                "T = {t_bits} bits must be a positive multiple of 8"
            )));
        }
        Ok(ComputingConfig { matrix, cover, q_total, t_bits })
    }

    pub fn nodes(&self) -> usize {
        self.matrix.rows()
    }

    pub fn subfile_count(&self) -> usize {
        self.matrix.cols()
    }

    pub fn beta(&self) -> usize {
        self.q_total / self.nodes()
    }

    pub fn identity_size(&self) -> usize {
        self.cover.uniform_size.expect("validated at construction")
    }

    /// Computation load r: each subfile is mapped at K minus column-weight
    /// nodes.
    pub fn computation_load(&self) -> usize {
        self.nodes() - self.matrix.constant_col_weight().expect("validated")
    }

    /// Subfiles mapped by a node: the 0 columns of its row.
    pub fn map_set(&self, node: usize) -> Vec<u32> {
        let ones = self.matrix.row_ones(node);
        (0..self.subfile_count() as u32)
            .filter(|c| ones.binary_search(c).is_err())
            .collect()
    }

    /// Functions reduced by a node in the even split: {b*K + node}.
    pub fn reduce_set(&self, node: usize) -> Vec<u32> {
        (0..self.beta())
            .map(|b| (b * self.nodes() + node) as u32)
            .collect()
    }
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h = FNV_OFFSET;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Deterministic stand-in for an arbitrary map function: an FNV-1a digest
/// of (function id, subfile label, subfile bytes), re-hashed with a counter
/// to fill T bits.
pub fn iva_value(q: u32, subfile_label: &str, subfile: &[u8], t_bits: usize) -> Vec<u8> {
    let t_bytes = t_bits / 8;
    let seed = fnv1a(
        (q as u64)
            .to_le_bytes()
            .into_iter()
            .chain(subfile_label.bytes())
            .chain(std::iter::once(0u8))
            .chain(subfile.iter().copied()),
    );
    let mut out = Vec::with_capacity(t_bytes + 8);
    let mut counter = 0u64;
    while out.len() < t_bytes {
        let h = fnv1a(
            seed.to_le_bytes()
                .into_iter()
                .chain(counter.to_le_bytes()),
        );
        out.extend_from_slice(&h.to_le_bytes());
        counter += 1;
    }
    out.truncate(t_bytes);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxKind {
    Coded,
    Uncoded,
}

impl std::fmt::Display for TxKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TxKind::Coded => write!(f, "coded"),
            TxKind::Uncoded => write!(f, "uncoded"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShuffleRecord {
    pub round: usize,
    pub node: usize,
    pub node_label: String,
    pub kind: TxKind,
    pub bits: u64,
}

#[derive(Debug, Clone, Default)]
pub struct ShuffleLog {
    pub records: Vec<ShuffleRecord>,
}

impl ShuffleLog {
    pub fn total_bits(&self) -> u64 {
        self.records.iter().map(|r| r.bits).sum()
    }

    pub fn bits_per_node(&self, nodes: usize) -> Vec<u64> {
        let mut out = vec![0u64; nodes];
        for r in &self.records {
            out[r.node] += r.bits;
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!(
                "ROUND {} {} {} {}\n",
                r.round, r.node_label, r.kind, r.bits
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct LoadReport {
    pub nodes: usize,
    pub subfile_count: usize,
    pub computation_load: usize,
    pub identity_size: usize,
    pub q_total: usize,
    pub beta: usize,
    pub t_bits: usize,
    pub mode: String,
    pub kappa: usize,
    pub bits: u64,
    pub load: Rat,
}

impl LoadReport {
    pub fn to_csv(&self) -> String {
        format!(
            "K,F,r,g,Q,beta,T,mode,kappa,bits,load\n{},{},{},{},{},{},{},{},{},{},{}\n",
            self.nodes,
            self.subfile_count,
            self.computation_load,
            self.identity_size,
            self.q_total,
            self.beta,
            self.t_bits,
            self.mode,
            self.kappa,
            self.bits,
            self.load
        )
    }
}

#[derive(Debug, Clone)]
pub struct MapReduceRun {
    /// Reduced outputs by function id, as produced at the responsible node.
    pub outputs: BTreeMap<u32, Vec<u8>>,
    pub log: ShuffleLog,
    pub report: LoadReport,
    pub reduce_ok: bool,
    pub failures: Vec<String>,
    /// Intermediate values computed per node during the map phase.
    pub map_counts: Vec<usize>,
}

fn split_subfiles(file: &[u8], count: usize) -> Result<Vec<Vec<u8>>> {
    if file.is_empty() || !file.len().is_multiple_of(count) {
        return Err(Error::BadParams(format!(
            "file length {} is not a positive multiple of F = {count}",
            file.len()
        )));
    }
    let len = file.len() / count;
    Ok(file.chunks(len).map(|c| c.to_vec()).collect())
}

/// Per-node map output: (function id, subfile index) to T-bit value.
pub type IvaStore = HashMap<(u32, u32), Vec<u8>>;

/// The two payloads of one exchange round. `summed` lists the served
/// (node, subfile) pairs other than the coded transmitter's own; the coded
/// payload XORs their values slot by slot out of the coded transmitter's
/// store, and the uncoded payload carries the coded transmitter's own
/// missing values (when it serves one) out of the partner's store.
pub fn coded_round(
    summed: &[(usize, u32)],
    coded_tx_pair: Option<(usize, u32)>,
    reduce_sets: &[Vec<u32>],
    beta_eff: usize,
    t_bits: usize,
    coded_store: &IvaStore,
    uncoded_store: &IvaStore,
) -> Result<(Vec<u8>, Vec<u8>)> {
    let t_bytes = t_bits / 8;
    let mut coded_payload = vec![0u8; beta_eff * t_bytes];
    for b in 0..beta_eff {
        let chunk = &mut coded_payload[b * t_bytes..(b + 1) * t_bytes];
        for &(node, f) in summed {
            let q = reduce_sets[node][b];
            let value = coded_store.get(&(q, f)).ok_or_else(|| {
                Error::BadParams(format!("coded transmitter is missing value ({q},{f})"))
            })?;
            for (a, v) in chunk.iter_mut().zip(value) {
                *a ^= v;
            }
        }
    }
    let mut uncoded_payload = vec![0u8; beta_eff * t_bytes];
    if let Some((node, f)) = coded_tx_pair {
        for b in 0..beta_eff {
            let q = reduce_sets[node][b];
            let value = uncoded_store.get(&(q, f)).ok_or_else(|| {
                Error::BadParams(format!("uncoded transmitter is missing value ({q},{f})"))
            })?;
            uncoded_payload[b * t_bytes..(b + 1) * t_bytes].copy_from_slice(value);
        }
    }
    Ok((coded_payload, uncoded_payload))
}

type Store = IvaStore;

struct Engine<'a> {
    cfg: &'a ComputingConfig<'a>,
    subfiles: Vec<Vec<u8>>,
    /// Per node; empty means the node reduces nothing (failed).
    reduce_sets: Vec<Vec<u32>>,
    stores: Vec<Store>,
    /// Nodes allowed to transmit in the shuffle phase.
    eligible: Vec<bool>,
    /// Forced (coded, uncoded) transmitter per identity.
    assignment: Option<Vec<(usize, usize)>>,
    mode: String,
    kappa: usize,
}

impl Engine<'_> {
    fn run(self) -> Result<MapReduceRun> {
        let cover = self.cfg.cover;
        let t_bytes = self.cfg.t_bits / 8;
        let mut log = ShuffleLog::default();
        let mut failures: Vec<String> = Vec::new();
        let beta_eff = self
            .reduce_sets
            .iter()
            .map(|s| s.len())
            .find(|&l| l > 0)
            .unwrap_or(0);
        // received values per node, decoded from transmissions only
        let mut received: Vec<Store> = vec![HashMap::new(); self.cfg.nodes()];

        for (idx, identity) in cover.identities.iter().enumerate() {
            // pairs whose node still reduces; only their values are served
            let served: Vec<(usize, u32)> = identity
                .pairs
                .iter()
                .map(|&(r, c)| (r as usize, c))
                .filter(|&(node, _)| !self.reduce_sets[node].is_empty())
                .collect();
            if served.is_empty() {
                continue;
            }
            // default transmitters: the two smallest eligible rows
            let mut sorted_rows: Vec<usize> =
                identity.pairs.iter().map(|&(r, _)| r as usize).collect();
            sorted_rows.sort_unstable();
            let mut transmitters = sorted_rows.iter().copied().filter(|&n| self.eligible[n]);
            let (coded_tx, uncoded_tx) = match &self.assignment {
                Some(assignment) => assignment[idx],
                None => {
                    let p = transmitters.next().ok_or_else(|| {
                        Error::BadParams(format!("no eligible transmitter in identity {idx}"))
                    })?;
                    let u = transmitters.next().ok_or_else(|| {
                        Error::BadParams(format!(
                            "only one eligible transmitter in identity {idx}"
                        ))
                    })?;
                    (p, u)
                }
            };
            let rows: HashSet<usize> = identity.pairs.iter().map(|&(r, _)| r as usize).collect();
            if coded_tx == uncoded_tx
                || !rows.contains(&coded_tx)
                || !rows.contains(&uncoded_tx)
                || !self.eligible[coded_tx]
                || !self.eligible[uncoded_tx]
            {
                return Err(Error::BadParams(format!(
                    "invalid transmitter assignment ({coded_tx}, {uncoded_tx}) for identity {idx}"
                )));
            }

            // pairs combined into the coded sum: every served pair except the
            // coded transmitter's own
            let summed: Vec<(usize, u32)> = served
                .iter()
                .copied()
                .filter(|&(node, _)| node != coded_tx)
                .collect();
            let coded_tx_pair = served.iter().copied().find(|&(node, _)| node == coded_tx);
            let (coded_payload, uncoded_payload) = coded_round(
                &summed,
                coded_tx_pair,
                &self.reduce_sets,
                beta_eff,
                self.cfg.t_bits,
                &self.stores[coded_tx],
                &self.stores[uncoded_tx],
            )?;
            log.records.push(ShuffleRecord {
                round: idx,
                node: coded_tx,
                node_label: self.cfg.matrix.row_labels()[coded_tx].clone(),
                kind: TxKind::Coded,
                bits: (beta_eff * self.cfg.t_bits) as u64,
            });
            log.records.push(ShuffleRecord {
                round: idx,
                node: uncoded_tx,
                node_label: self.cfg.matrix.row_labels()[uncoded_tx].clone(),
                kind: TxKind::Uncoded,
                bits: (beta_eff * self.cfg.t_bits) as u64,
            });

            // decoding at every served node
            for &(node, f) in &served {
                for b in 0..beta_eff {
                    let q = self.reduce_sets[node][b];
                    let value = if node == coded_tx {
                        uncoded_payload[b * t_bytes..(b + 1) * t_bytes].to_vec()
                    } else {
                        let mut v =
                            coded_payload[b * t_bytes..(b + 1) * t_bytes].to_vec();
                        for &(other, f2) in &summed {
                            if other == node {
                                continue;
                            }
                            let q2 = self.reduce_sets[other][b];
                            let known = self.stores[node].get(&(q2, f2)).ok_or_else(|| {
                                Error::BadParams(format!(
                                    "node {node} cannot cancel value ({q2},{f2})"
                                ))
                            })?;
                            for (a, kv) in v.iter_mut().zip(known) {
                                *a ^= kv;
                            }
                        }
                        v
                    };
                    received[node].insert((q, f), value);
                }
            }
        }

        // reduce: XOR combiner over all subfiles, order independent
        let mut outputs: BTreeMap<u32, Vec<u8>> = BTreeMap::new();
        for (node, node_received) in received.iter().enumerate() {
            let map_cols: HashSet<u32> = self.cfg.map_set(node).into_iter().collect();
            for &q in &self.reduce_sets[node] {
                let mut acc = vec![0u8; t_bytes];
                let mut complete = true;
                for f in 0..self.cfg.subfile_count() as u32 {
                    let value = if map_cols.contains(&f) {
                        self.stores[node].get(&(q, f))
                    } else {
                        node_received.get(&(q, f))
                    };
                    match value {
                        Some(v) => {
                            for (a, b) in acc.iter_mut().zip(v) {
                                *a ^= b;
                            }
                        }
                        None => {
                            complete = false;
                            failures.push(format!("node {node} is missing value ({q},{f})"));
                        }
                    }
                }
                if complete {
                    outputs.insert(q, acc);
                }
            }
        }

        // centralized oracle
        let mut oracle_ok = true;
        for (&q, value) in &outputs {
            let mut acc = vec![0u8; t_bytes];
            for (f, subfile) in self.subfiles.iter().enumerate() {
                let v = iva_value(
                    q,
                    &self.cfg.matrix.col_labels()[f],
                    subfile,
                    self.cfg.t_bits,
                );
                for (a, b) in acc.iter_mut().zip(&v) {
                    *a ^= b;
                }
            }
            if &acc != value {
                oracle_ok = false;
                failures.push(format!("output {q} differs from the centralized result"));
            }
        }
        let expected_outputs: usize = self.reduce_sets.iter().map(|s| s.len()).sum();
        let reduce_ok = failures.is_empty() && oracle_ok && outputs.len() == expected_outputs;

        let bits = log.total_bits();
        let denominator = (self.cfg.q_total * self.cfg.subfile_count() * self.cfg.t_bits) as u64;
        let report = LoadReport {
            nodes: self.cfg.nodes(),
            subfile_count: self.cfg.subfile_count(),
            computation_load: self.cfg.computation_load(),
            identity_size: self.cfg.identity_size(),
            q_total: self.cfg.q_total,
            beta: self.cfg.beta(),
            t_bits: self.cfg.t_bits,
            mode: self.mode,
            kappa: self.kappa,
            bits,
            load: Rat::new(BigInt::from(bits), BigInt::from(denominator)),
        };
        let map_counts = self.stores.iter().map(|s| s.len()).collect();
        Ok(MapReduceRun { outputs, log, report, reduce_ok, failures, map_counts })
    }
}

fn full_map_store(cfg: &ComputingConfig, subfiles: &[Vec<u8>], node: usize) -> Store {
    let mut store = HashMap::new();
    for &f in &cfg.map_set(node) {
        for q in 0..cfg.q_total as u32 {
            store.insert(
                (q, f),
                iva_value(
                    q,
                    &cfg.matrix.col_labels()[f as usize],
                    &subfiles[f as usize],
                    cfg.t_bits,
                ),
            );
        }
    }
    store
}

/// Non-straggler run. Transmitters default to the first two nodes of each
/// identity in matrix row order; a balanced assignment from
/// [`balance_load`] may be supplied instead.
pub fn run_mapreduce(
    cfg: &ComputingConfig,
    file: &[u8],
    assignment: Option<Vec<(usize, usize)>>,
) -> Result<MapReduceRun> {
    let subfiles = split_subfiles(file, cfg.subfile_count())?;
    let stores: Vec<Store> = (0..cfg.nodes())
        .map(|n| full_map_store(cfg, &subfiles, n))
        .collect();
    let reduce_sets: Vec<Vec<u32>> = (0..cfg.nodes()).map(|n| cfg.reduce_set(n)).collect();
    Engine {
        cfg,
        subfiles,
        reduce_sets,
        stores,
        eligible: vec![true; cfg.nodes()],
        assignment,
        mode: "none".into(),
        kappa: cfg.nodes(),
    }
    .run()
}

/// Failed nodes skip every phase; the functions are re-split evenly over
/// the kappa survivors, which requires kappa to divide Q.
pub fn run_full_straggler(
    cfg: &ComputingConfig,
    file: &[u8],
    failed: &BTreeSet<usize>,
) -> Result<MapReduceRun> {
    let k = cfg.nodes();
    let g = cfg.identity_size();
    if failed.len() + 2 > g {
        return Err(Error::BadParams(format!(
            "{} stragglers exceed the g-2 = {} the cover tolerates",
            failed.len(),
            g - 2
        )));
    }
    if failed.iter().any(|&n| n >= k) {
        return Err(Error::BadParams("straggler index out of range".into()));
    }
    let kappa = k - failed.len();
    if !cfg.q_total.is_multiple_of(kappa) {
        return Err(Error::BadParams(format!(
            "kappa = {kappa} must divide Q = {}",
            cfg.q_total
        )));
    }
    let beta_prime = cfg.q_total / kappa;
    let survivors: Vec<usize> = (0..k).filter(|n| !failed.contains(n)).collect();
    let subfiles = split_subfiles(file, cfg.subfile_count())?;

    let mut reduce_sets = vec![Vec::new(); k];
    for (rank, &node) in survivors.iter().enumerate() {
        reduce_sets[node] = (0..beta_prime).map(|b| (b * kappa + rank) as u32).collect();
    }
    let stores: Vec<Store> = (0..k)
        .map(|n| {
            if failed.contains(&n) {
                HashMap::new()
            } else {
                full_map_store(cfg, &subfiles, n)
            }
        })
        .collect();
    let eligible: Vec<bool> = (0..k).map(|n| !failed.contains(&n)).collect();
    Engine {
        cfg,
        subfiles,
        reduce_sets,
        stores,
        eligible,
        assignment: None,
        mode: "full".into(),
        kappa,
    }
    .run()
}

/// Partial stragglers skip the shuffle and the catch-all third map
/// sub-phase but still reduce. The map phase runs in three sub-phases:
/// own-function values, decode-enabling values for every identity the node
/// appears in, then (active nodes only) everything left on their subfiles.
pub fn run_partial_straggler(
    cfg: &ComputingConfig,
    file: &[u8],
    stragglers: &BTreeSet<usize>,
) -> Result<MapReduceRun> {
    let k = cfg.nodes();
    let g = cfg.identity_size();
    if stragglers.len() + 2 > g {
        return Err(Error::BadParams(format!(
            "{} stragglers exceed the g-2 = {} the cover tolerates",
            stragglers.len(),
            g - 2
        )));
    }
    if stragglers.iter().any(|&n| n >= k) {
        return Err(Error::BadParams("straggler index out of range".into()));
    }
    let subfiles = split_subfiles(file, cfg.subfile_count())?;
    let reduce_sets: Vec<Vec<u32>> = (0..k).map(|n| cfg.reduce_set(n)).collect();

    let mut stores: Vec<Store> = vec![HashMap::new(); k];
    // sub-phase 1: own functions on own subfiles
    for (node, store) in stores.iter_mut().enumerate() {
        for &f in &cfg.map_set(node) {
            for &q in &reduce_sets[node] {
                store.insert(
                    (q, f),
                    iva_value(
                        q,
                        &cfg.matrix.col_labels()[f as usize],
                        &subfiles[f as usize],
                        cfg.t_bits,
                    ),
                );
            }
        }
    }
    // sub-phase 2: for each identity a node appears in, the values of the
    // other matched pairs (what it needs to cancel coded transmissions)
    for identity in &cfg.cover.identities {
        for &(node, _) in &identity.pairs {
            for &(other, f2) in &identity.pairs {
                if other == node {
                    continue;
                }
                for &q in &reduce_sets[other as usize] {
                    let fresh = stores[node as usize].insert(
                        (q, f2),
                        iva_value(
                            q,
                            &cfg.matrix.col_labels()[f2 as usize],
                            &subfiles[f2 as usize],
                            cfg.t_bits,
                        ),
                    );
                    // the sub-phases never compute the same value twice
                    debug_assert!(fresh.is_none());
                }
            }
        }
    }
    // sub-phase 3: the active set completes all remaining values
    for (node, store) in stores.iter_mut().enumerate() {
        if stragglers.contains(&node) {
            continue;
        }
        for &f in &cfg.map_set(node) {
            for q in 0..cfg.q_total as u32 {
                store.entry((q, f)).or_insert_with(|| {
                    iva_value(
                        q,
                        &cfg.matrix.col_labels()[f as usize],
                        &subfiles[f as usize],
                        cfg.t_bits,
                    )
                });
            }
        }
    }
    let eligible: Vec<bool> = (0..k).map(|n| !stragglers.contains(&n)).collect();
    Engine {
        cfg,
        subfiles,
        reduce_sets,
        stores,
        eligible,
        assignment: None,
        mode: "partial".into(),
        kappa: k - stragglers.len(),
    }
    .run()
}

/// Balanced transmitter choice via two perfect matchings on the bipartite
/// graph of gamma = S/K node copies versus identities. After the first
/// (coded) matching, all edges between a matched node and its identity are
/// removed, leaving a regular graph for the second (uncoded) matching; the
/// two transmitters per identity are therefore distinct, and every node
/// ends up with exactly gamma coded and gamma uncoded rounds.
pub fn balance_load(cfg: &ComputingConfig) -> Result<Vec<(usize, usize)>> {
    let k = cfg.nodes();
    let s = cfg.cover.size();
    if !s.is_multiple_of(k) {
        return Err(Error::BadParams(format!(
            "cover size S = {s} is not divisible by K = {k}"
        )));
    }
    let gamma = s / k;
    let mut appearances = vec![0usize; k];
    let mut node_identities: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (idx, identity) in cfg.cover.identities.iter().enumerate() {
        for &(r, _) in &identity.pairs {
            appearances[r as usize] += 1;
            node_identities[r as usize].push(idx);
        }
    }
    if appearances.iter().any(|&a| a != appearances[0]) {
        return Err(Error::BadParams(format!(
            "nodes appear in unequal numbers of identities: {appearances:?}"
        )));
    }

    let left_count = k * gamma;
    let forbidden: HashSet<(usize, usize)> = HashSet::new();
    let first = perfect_matching(left_count, s, gamma, &node_identities, &forbidden)
        .ok_or_else(|| Error::BadParams("no perfect matching for coded rounds".into()))?;
    let mut coded = vec![usize::MAX; s];
    let mut forbidden = HashSet::new();
    for (left, identity) in first.iter().enumerate() {
        let node = left / gamma;
        coded[*identity] = node;
        forbidden.insert((node, *identity));
    }
    let second = perfect_matching(left_count, s, gamma, &node_identities, &forbidden)
        .ok_or_else(|| Error::BadParams("no perfect matching for uncoded rounds".into()))?;
    let mut uncoded = vec![usize::MAX; s];
    for (left, identity) in second.iter().enumerate() {
        uncoded[*identity] = left / gamma;
    }
    let assignment: Vec<(usize, usize)> = coded.into_iter().zip(uncoded).collect();
    debug_assert!(assignment.iter().all(|&(c, u)| c != u));
    Ok(assignment)
}

/// Kuhn's augmenting-path matching; returns the matched identity per left
/// vertex when the matching is perfect.
fn perfect_matching(
    left_count: usize,
    right_count: usize,
    gamma: usize,
    node_identities: &[Vec<usize>],
    forbidden: &HashSet<(usize, usize)>,
) -> Option<Vec<usize>> {
    let mut match_right: Vec<Option<usize>> = vec![None; right_count];
    let mut match_left: Vec<Option<usize>> = vec![None; left_count];

    fn augment(
        left: usize,
        gamma: usize,
        node_identities: &[Vec<usize>],
        forbidden: &HashSet<(usize, usize)>,
        visited: &mut Vec<bool>,
        match_right: &mut Vec<Option<usize>>,
        match_left: &mut Vec<Option<usize>>,
    ) -> bool {
        let node = left / gamma;
        for &identity in &node_identities[node] {
            if visited[identity] || forbidden.contains(&(node, identity)) {
                continue;
            }
            visited[identity] = true;
            let free = match match_right[identity] {
                None => true,
                Some(other) => augment(
                    other,
                    gamma,
                    node_identities,
                    forbidden,
                    visited,
                    match_right,
                    match_left,
                ),
            };
            if free {
                match_right[identity] = Some(left);
                match_left[left] = Some(identity);
                return true;
            }
        }
        false
    }

    for left in 0..left_count {
        let mut visited = vec![false; right_count];
        if !augment(
            left,
            gamma,
            node_identities,
            forbidden,
            &mut visited,
            &mut match_right,
            &mut match_left,
        ) {
            return None;
        }
    }
    match_left.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct WorstCaseReport {
    pub exhaustive: bool,
    pub tested: usize,
    pub max_load: Rat,
    pub worst_subset: Vec<usize>,
    pub all_correct: bool,
    pub failures: Vec<String>,
}

const WORST_CASE_EXHAUSTIVE_CAP: u64 = 100_000;
const WORST_CASE_SAMPLES: usize = 1000;

/// Sweep straggler subsets up to `max_stragglers` (default g-2): exhaustive
/// below the subset-count cap, otherwise a fixed-seed sample. Reports the
/// largest load and any correctness failure.
pub fn worst_case_full(
    cfg: &ComputingConfig,
    file: &[u8],
    max_stragglers: Option<usize>,
) -> Result<WorstCaseReport> {
    worst_case_full_capped(cfg, file, max_stragglers, WORST_CASE_EXHAUSTIVE_CAP, WORST_CASE_SAMPLES)
}

fn worst_case_full_capped(
    cfg: &ComputingConfig,
    file: &[u8],
    max_stragglers: Option<usize>,
    exhaustive_cap: u64,
    samples: usize,
) -> Result<WorstCaseReport> {
    let k = cfg.nodes();
    let max = max_stragglers.unwrap_or(cfg.identity_size().saturating_sub(2));
    let total: u64 = (0..=max as u64)
        .map(|s| crate::rat::binom_big(k as u64, s).try_into().unwrap_or(u64::MAX))
        .sum();
    let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
    let exhaustive = total <= exhaustive_cap;
    if exhaustive {
        use itertools::Itertools;
        for size in 0..=max {
            for subset in (0..k).combinations(size) {
                subsets.push(subset.into_iter().collect());
            }
        }
    } else {
        let mut rng = ChaCha12Rng::seed_from_u64(0xDC0DE);
        for _ in 0..samples {
            let size = rng.random_range(0..=max);
            let mut subset = BTreeSet::new();
            while subset.len() < size {
                subset.insert(rng.random_range(0..k));
            }
            subsets.push(subset);
        }
    }

    let mut max_load = Rat::zero();
    let mut worst_subset = Vec::new();
    let mut failures = Vec::new();
    let tested = subsets.len();
    for subset in subsets {
        let run = run_full_straggler(cfg, file, &subset)?;
        if !run.reduce_ok {
            failures.push(format!(
                "subset {:?}: {}",
                subset,
                run.failures.join("; ")
            ));
        }
        if run.report.load > max_load {
            max_load = run.report.load.clone();
            worst_subset = subset.into_iter().collect();
        }
    }
    Ok(WorstCaseReport {
        exhaustive,
        tested,
        max_load,
        worst_subset,
        all_correct: failures.is_empty(),
        failures,
    })
}

/// Optimal full-straggler load of the subset-replication scheme at the same
/// (K, r, kappa), exact: (1 - r/K) * sum_i (1/i) C(r,i) C(K-r-1, kappa-i-1)
/// / C(K-1, kappa-1) over i from r+kappa-K to min(r, kappa-1).
pub fn qys_load(k: u64, r: u64, kappa: u64) -> Result<Rat> {
    if !(1 <= r && r < k && 1 <= kappa && kappa <= k && k - kappa < r) {
        return Err(Error::BadParams(format!(
            "need 1 <= r < K and K - kappa <= r - 1, got K={k} r={r} kappa={kappa}"
        )));
    }
    let lo = r + kappa - k;
    let hi = r.min(kappa - 1);
    let denom = binom_rat(k - 1, kappa - 1);
    let mut sum = Rat::zero();
    for i in lo..=hi {
        sum += binom_rat(r, i) * binom_rat(k - r - 1, kappa - i - 1)
            / (rat_u64(i) * denom.clone());
    }
    Ok((Rat::one() - Rat::new(BigInt::from(r), BigInt::from(k))) * sum)
}

/// Closed-form computing parameters per family; loads follow from the
/// counting identity with r = K - S*g/F.
#[derive(Debug, Clone)]
pub struct ComputingParams {
    pub nodes: u64,
    pub subfile_count: Rat,
    pub computation_load: Rat,
    pub identity_size: Rat,
    pub load: Rat,
}

impl ComputingParams {
    /// Full-straggler load with kappa survivors: (2/g)(K - r)/kappa.
    pub fn load_full(&self, kappa: u64) -> Rat {
        Rat::from_integer(BigInt::from(2))
            * (rat_u64(self.nodes) - self.computation_load.clone())
            / (self.identity_size.clone() * rat_u64(kappa))
    }
}

pub fn computing_params(family: &Family) -> Result<ComputingParams> {
    if let Family::Man { k, r } = *family {
        if !(1 <= r && r < k) {
            return Err(Error::BadParams(format!("need 1 <= r < K, got K={k} r={r}")));
        }
        let g = rat_u64(r + 1);
        let load = Rat::from_integer(BigInt::from(2)) * (rat_u64(k) - rat_u64(r))
            / (g.clone() * rat_u64(k));
        return Ok(ComputingParams {
            nodes: k,
            subfile_count: binom_rat(k, r),
            computation_load: rat_u64(r),
            identity_size: g,
            load,
        });
    }
    let p = crate::caching::scheme_params(family)?;
    let col_weight = p.cover_size.clone() * p.identity_size.clone() / p.subpacketization.clone();
    let r = rat_u64(p.users) - col_weight.clone();
    let load = Rat::from_integer(BigInt::from(2)) * col_weight
        / (p.identity_size.clone() * rat_u64(p.users));
    Ok(ComputingParams {
        nodes: p.users,
        subfile_count: p.subpacketization,
        computation_load: r,
        identity_size: p.identity_size,
        load,
    })
}
