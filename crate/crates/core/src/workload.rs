//! Linear counting-query workloads over a domain's cell vector.
//!
//! A workload is a sparse Q x N matrix: row q answers `sum_c w[q,c] * x[c]`.
//! Two generators cover the benchmark suite: [`all_range`] (the single
//! all-ones row, i.e. the total record count) and [`k_way_marginal`] (one
//! counting row per value combination of every k-attribute subset). Row
//! ordering is fixed (subsets lexicographic over attribute indices, value
//! tuples row-major) so emitted artifacts are stable across runs.

use std::fmt;

use crate::domain::{DataVector, Domain};
use crate::error::{Error, Result};

/// Workload family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkloadKind {
    AllRange,
    KWayMarginal(usize),
    Custom,
}

impl fmt::Display for WorkloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkloadKind::AllRange => write!(f, "all-range"),
            WorkloadKind::KWayMarginal(k) => write!(f, "{k}-way-marginal"),
            WorkloadKind::Custom => write!(f, "custom"),
        }
    }
}

/// One marginal inside a workload: the attribute subset it fixes and the
/// contiguous block of rows holding its per-value-tuple queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalSpec {
    /// Ascending attribute indices; empty for the 0-way (grand total) marginal.
    pub attrs: Vec<usize>,
    pub row_offset: usize,
    pub row_count: usize,
}

/// A sparse row: `(cell index, weight)` pairs, ascending by cell.
pub type SparseRow = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    domain: Domain,
    rows: Vec<SparseRow>,
    kind: WorkloadKind,
    /// Marginal decomposition, present when the workload is a union of
    /// marginals (strategies like Fourier and the data cube require it).
    marginals: Option<Vec<MarginalSpec>>,
}

impl Workload {
    /// A custom workload from explicit sparse rows.
    pub fn from_rows(domain: Domain, rows: Vec<SparseRow>) -> Result<Self> {
        for (q, row) in rows.iter().enumerate() {
            for &(cell, w) in row {
                if cell >= domain.total_size() {
                    return Err(Error::InvalidParameter(format!(
                        "row {q} references cell {cell}, domain has {} cells",
                        domain.total_size()
                    )));
                }
                if !w.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "row {q}: non-finite weight"
                    )));
                }
            }
        }
        Ok(Self {
            domain,
            rows,
            kind: WorkloadKind::Custom,
            marginals: None,
        })
    }

    /// A union-of-marginals workload from explicit rows and their marginal
    /// decomposition. The blocks must tile the rows exactly.
    pub fn from_marginal_rows(
        domain: Domain,
        rows: Vec<SparseRow>,
        marginals: Vec<MarginalSpec>,
    ) -> Result<Self> {
        let mut covered = 0usize;
        for m in &marginals {
            if m.attrs.windows(2).any(|w| w[0] >= w[1])
                || m.attrs.iter().any(|&a| a >= domain.num_attributes())
            {
                return Err(Error::InvalidParameter(
                    "marginal attributes must be ascending and in range".into(),
                ));
            }
            let cells: usize = m.attrs.iter().map(|&a| domain.cardinality(a)).product();
            if m.row_count != cells {
                return Err(Error::InvalidParameter(format!(
                    "marginal block over {:?} needs {cells} rows, has {}",
                    m.attrs, m.row_count
                )));
            }
            if m.row_offset != covered {
                return Err(Error::InvalidParameter(
                    "marginal blocks must tile the rows".into(),
                ));
            }
            covered += m.row_count;
        }
        if covered != rows.len() {
            return Err(Error::InvalidParameter(format!(
                "marginal blocks cover {covered} rows, workload has {}",
                rows.len()
            )));
        }
        // within a block, every domain cell belongs to exactly one row, with
        // weight 1 (the marginal reconstructions depend on this)
        for m in &marginals {
            let mut seen = vec![0u32; domain.total_size()];
            for row in &rows[m.row_offset..m.row_offset + m.row_count] {
                for &(cell, weight) in row {
                    if weight != 1.0 {
                        return Err(Error::InvalidParameter(format!(
                            "marginal rows must carry weight 1, found {weight}"
                        )));
                    }
                    seen[cell] += 1;
                }
            }
            if seen.iter().any(|&n| n != 1) {
                return Err(Error::InvalidParameter(format!(
                    "marginal block over {:?} must select every cell exactly once",
                    m.attrs
                )));
            }
        }
        let mut w = Self::from_rows(domain, rows)?;
        w.marginals = Some(marginals);
        Ok(w)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kind(&self) -> WorkloadKind {
        self.kind
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// The marginal decomposition, if this workload is a union of marginals.
    pub fn marginals(&self) -> Option<&[MarginalSpec]> {
        self.marginals.as_deref()
    }

    /// Sparse `(row, cell, weight)` triples for debugging.
    pub fn to_sparse_csv(&self) -> String {
        let mut out = String::from("row,cell,weight\n");
        for (q, row) in self.rows.iter().enumerate() {
            for &(cell, w) in row {
                out.push_str(&format!("{q},{cell},{w}\n"));
            }
        }
        out
    }
}

/// The single all-ones query: the total record count.
pub fn all_range(domain: &Domain) -> Workload {
    let row: SparseRow = (0..domain.total_size()).map(|c| (c, 1.0)).collect();
    Workload {
        domain: domain.clone(),
        rows: vec![row],
        kind: WorkloadKind::AllRange,
        marginals: Some(vec![MarginalSpec {
            attrs: vec![],
            row_offset: 0,
            row_count: 1,
        }]),
    }
}

/// All k-way marginals: for every k-attribute subset (lexicographic over
/// attribute indices), one row per value tuple (row-major value order) whose
/// weights select exactly the matching cells.
pub fn k_way_marginal(domain: &Domain, k: usize) -> Result<Workload> {
    let a = domain.num_attributes();
    if k == 0 || k > a {
        return Err(Error::InvalidParameter(format!(
            "k must be in 1..={a} for this domain, got {k}"
        )));
    }
    let mut rows: Vec<SparseRow> = Vec::new();
    let mut marginals = Vec::new();
    for attrs in combinations(a, k) {
        let block_size: usize = attrs.iter().map(|&i| domain.cardinality(i)).product();
        let row_offset = rows.len();
        let mut block: Vec<SparseRow> = vec![Vec::new(); block_size];
        for cell in 0..domain.total_size() {
            let coords = domain.decode(cell);
            // row-major index of this cell's value tuple within the subset
            let mut v = 0usize;
            for &i in &attrs {
                v = v * domain.cardinality(i) + coords[i];
            }
            block[v].push((cell, 1.0));
        }
        rows.extend(block);
        marginals.push(MarginalSpec {
            attrs,
            row_offset,
            row_count: block_size,
        });
    }
    Ok(Workload {
        domain: domain.clone(),
        rows,
        kind: WorkloadKind::KWayMarginal(k),
        marginals: Some(marginals),
    })
}

/// Evaluate every workload row exactly: `r[q] = sum_c w[q,c] * x[c]`.
pub fn evaluate(workload: &Workload, x: &DataVector) -> Result<Vec<f64>> {
    if workload.domain() != x.domain() {
        return Err(Error::DomainMismatch(format!(
            "workload over {}, data vector over {}",
            workload.domain().label(),
            x.domain().label()
        )));
    }
    let counts = x.counts();
    Ok(workload
        .rows
        .iter()
        .map(|row| row.iter().map(|&(c, w)| w * counts[c]).sum())
        .collect())
}

/// L1 sensitivity of the workload: the largest column L1 norm,
/// `max_c sum_q |w[q,c]|` (one record occupies one cell).
pub fn l1_sensitivity(workload: &Workload) -> f64 {
    let mut column_norms = vec![0.0f64; workload.domain.total_size()];
    for row in &workload.rows {
        for &(c, w) in row {
            column_norms[c] += w.abs();
        }
    }
    column_norms.into_iter().fold(0.0, f64::max)
}

/// Ascending k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
