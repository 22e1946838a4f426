use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DemandSideInfo, Instance, Partition};
use crate::error::{Error, Result};
use crate::exact::{one_based, ratio, Rational};
use crate::ff::{vandermonde_solve, CoeffMatrix, MessageVec, PrimeField};
use crate::rng::ProtocolRng;

/// One block of the query: sorted message indices and the coefficient rows applied to them.
/// Position `l` of every row multiplies the message at `indices[l]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    #[serde(with = "one_based")]
    pub indices: Vec<usize>,
    pub coeff_rows: Vec<Vec<u64>>,
}

/// What the server sees: the residual block and the (shuffled) full blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    #[serde(rename = "K")]
    pub k: usize,
    pub q: u64,
    pub m: usize,
    #[serde(rename = "rho")]
    pub residual_len: usize,
    #[serde(rename = "alpha")]
    pub block_len: usize,
    #[serde(rename = "gamma")]
    pub residual_eqs: usize,
    #[serde(rename = "D")]
    pub demand: usize,
    pub q0: Block,
    pub parts: Vec<Block>,
}

/// `a0[j]` answers row `j` of `Q0`; `ai[b][j]` answers row `j` of `parts[b]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub a0: Vec<MessageVec>,
    pub ai: Vec<Vec<MessageVec>>,
}

impl Query {
    /// Attaches the deterministic coefficient rows to a block layout.
    pub fn from_blocks(inst: &Instance, q0: Vec<usize>, parts: Vec<Vec<usize>>) -> Self {
        let p = inst.params();
        let field = inst.field();
        let residual_rows = field.power_rows(&p.omegas[..p.residual_len], p.residual_eqs);
        let block_rows = field.power_rows(&p.omegas, inst.demand);
        Query {
            k: inst.k,
            q: inst.q,
            m: inst.m,
            residual_len: p.residual_len,
            block_len: p.block_len,
            residual_eqs: p.residual_eqs,
            demand: inst.demand,
            q0: Block {
                indices: q0,
                coeff_rows: residual_rows,
            },
            parts: parts
                .into_iter()
                .map(|indices| Block {
                    indices,
                    coeff_rows: block_rows.clone(),
                })
                .collect(),
        }
    }

    pub fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.q)
    }

    /// `Q0` followed by the full blocks in transmitted order.
    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        std::iter::once(&self.q0).chain(&self.parts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("query serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let q: Query = serde_json::from_str(s)?;
        q.validate()?;
        Ok(q)
    }

    /// Structural checks for queries that arrive from outside.
    pub fn validate(&self) -> Result<()> {
        let field = self.field()?;
        let bad = |msg: String| Err(Error::MalformedQuery(msg));
        if self.q0.indices.len() != self.residual_len {
            return bad(format!(
                "Q0 has {} indices, rho = {}",
                self.q0.indices.len(),
                self.residual_len
            ));
        }
        if self.q0.coeff_rows.len() != self.residual_eqs {
            return bad("Q0 row count differs from gamma".into());
        }
        let mut seen = vec![false; self.k];
        for b in self.blocks() {
            if b.indices.windows(2).any(|w| w[0] >= w[1]) {
                return bad("block indices must be strictly increasing".into());
            }
            for &i in &b.indices {
                if i >= self.k || seen[i] {
                    return bad(format!("index {} repeated or out of range", i + 1));
                }
                seen[i] = true;
            }
            for r in &b.coeff_rows {
                if r.len() != b.indices.len() || r.iter().any(|&v| v >= field.order()) {
                    return bad("coefficient row has wrong length or out-of-field entry".into());
                }
            }
        }
        for b in &self.parts {
            if b.indices.len() != self.block_len || b.coeff_rows.len() != self.demand {
                return bad("full block does not have alpha indices and D rows".into());
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("blocks do not cover every message index".into());
        }
        Ok(())
    }
}

impl Answer {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("answer serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn build_query(partition: &Partition, inst: &Instance, rng: &mut ProtocolRng) -> Query {
    build_query_with(partition, inst, rng, true)
}

/// `shuffle = false` keeps the distinguished block first (used to show the permutation matters).
pub fn build_query_with(
    partition: &Partition,
    inst: &Instance,
    rng: &mut ProtocolRng,
    shuffle: bool,
) -> Query {
    let mut parts = partition.parts.clone();
    if shuffle {
        rng.shuffle(&mut parts);
    }
    Query::from_blocks(inst, partition.q0.clone(), parts)
}

fn combine(
    field: &PrimeField,
    block: &Block,
    messages: &[MessageVec],
    width: usize,
) -> Vec<MessageVec> {
    block
        .coeff_rows
        .iter()
        .map(|row| {
            let mut acc = MessageVec::zero(width);
            for (&c, &i) in row.iter().zip(&block.indices) {
                acc.add_scaled(field, c, &messages[i]);
            }
            acc
        })
        .collect()
}

/// Server side: each row of each block becomes one linear combination of messages.
pub fn answer_query(query: &Query, messages: &[MessageVec]) -> Result<Answer> {
    if messages.len() != query.k {
        return Err(Error::MessageCountMismatch {
            expected: query.k,
            got: messages.len(),
        });
    }
    if let Some(bad) = messages.iter().find(|x| x.len() != query.m) {
        return Err(Error::DimensionMismatch {
            expected: query.m,
            got: bad.len(),
        });
    }
    let field = query.field()?;
    Ok(Answer {
        a0: combine(&field, &query.q0, messages, query.m),
        ai: query
            .parts
            .iter()
            .map(|b| combine(&field, b, messages, query.m))
            .collect(),
    })
}

/// Aggregator side: subtract side information, then solve each block that holds a demand.
pub fn recover(
    query: &Query,
    answer: &Answer,
    ws: &DemandSideInfo,
    side_values: &BTreeMap<usize, MessageVec>,
) -> Result<BTreeMap<usize, MessageVec>> {
    if answer.ai.len() != query.parts.len() {
        return Err(Error::BlockMismatch(format!(
            "{} blocks in the query, {} in the answer",
            query.parts.len(),
            answer.ai.len()
        )));
    }
    if answer.a0.len() != query.q0.coeff_rows.len() {
        return Err(Error::BlockMismatch(
            "residual answer length differs from gamma".into(),
        ));
    }
    let field = query.field()?;
    let mut out = BTreeMap::new();
    let answered =
        std::iter::once((&query.q0, &answer.a0)).chain(query.parts.iter().zip(&answer.ai));
    for (block, values) in answered {
        if !block.indices.iter().any(|i| ws.demand.contains(i)) {
            continue;
        }
        if values.len() != block.coeff_rows.len() {
            return Err(Error::BlockMismatch(
                "block answer length differs from its row count".into(),
            ));
        }
        for (pos, x) in solve_block(&field, block, values, &ws.side, side_values, query.m)? {
            let idx = block.indices[pos];
            if ws.demand.contains(&idx) {
                out.insert(idx, x);
            }
        }
    }
    if out.len() != ws.demand.len() {
        return Err(Error::BlockMismatch(
            "some demanded index is in no block of the query".into(),
        ));
    }
    Ok(out)
}

/// Returns `(position in block, value)` for every index of the block outside `side`.
fn solve_block(
    field: &PrimeField,
    block: &Block,
    values: &[MessageVec],
    side: &[usize],
    side_values: &BTreeMap<usize, MessageVec>,
    width: usize,
) -> Result<Vec<(usize, MessageVec)>> {
    let mut unknown = Vec::new();
    let mut residual = values.to_vec();
    for (pos, idx) in block.indices.iter().enumerate() {
        if side.contains(idx) {
            let x = side_values.get(idx).ok_or_else(|| {
                Error::InvalidSets(format!(
                    "missing side-information value for index {}",
                    idx + 1
                ))
            })?;
            if x.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got: x.len(),
                });
            }
            for (r, row) in residual.iter_mut().zip(&block.coeff_rows) {
                r.sub_scaled(field, row[pos], x);
            }
        } else {
            unknown.push(pos);
        }
    }
    let n = unknown.len();
    if n > block.coeff_rows.len() {
        return Err(Error::Undecodable {
            unknowns: n,
            equations: block.coeff_rows.len(),
        });
    }
    // Row j is (w_l^j); read the nodes off row 1 and check the first n rows agree.
    let nodes: Vec<u64> = match block.coeff_rows.get(1) {
        Some(row) if n > 1 => unknown.iter().map(|&p| row[p]).collect(),
        _ => vec![1; n],
    };
    for (j, row) in block.coeff_rows.iter().take(n).enumerate() {
        for (&p, &w) in unknown.iter().zip(&nodes) {
            if row[p] != field.pow(w, j as u64) {
                return Err(Error::MalformedQuery(
                    "coefficient rows are not a power matrix".into(),
                ));
            }
        }
    }
    let solved = vandermonde_solve(field, &nodes, &residual[..n])?;
    Ok(unknown.into_iter().zip(solved).collect())
}

/// `K`-column matrix with one row per answered equation.
pub fn coefficient_matrix(query: &Query) -> Result<CoeffMatrix> {
    let field = query.field()?;
    let mut rows = Vec::new();
    for block in query.blocks() {
        for coeffs in &block.coeff_rows {
            let mut row = vec![0u64; query.k];
            for (&c, &i) in coeffs.iter().zip(&block.indices) {
                row[i] = c;
            }
            rows.push(row);
        }
    }
    CoeffMatrix::new(field, query.k, rows)
}

/// `D / rank`: with independent uniform messages the answer carries `rank * L` bits.
pub fn measured_rate(query: &Query) -> Result<Rational> {
    let rank = coefficient_matrix(query)?.rank();
    if rank == 0 {
        return Err(Error::MalformedQuery("query has no equations".into()));
    }
    Ok(ratio(query.demand as i64, rank as i64))
}
