//! Discretized data domains and cell-count extraction.
//!
//! A [`Domain`] is an ordered list of attributes with finite cardinalities.
//! Its cells are all coordinate combinations, indexed row-major over the
//! declaration order (first attribute varies slowest); that fixed order makes
//! every downstream artifact reproducible. A [`DataVector`] is the flat
//! histogram of a [`Table`] over those cells: `counts[c]` is the number of
//! rows whose binned coordinates encode to cell `c`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One attribute: a display name and the number of discrete levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub cardinality: usize,
}

/// An ordered attribute list defining a cell grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    attributes: Vec<Attribute>,
    total_size: usize,
}

impl Domain {
    pub fn new(attributes: Vec<(impl Into<String>, usize)>) -> Result<Self> {
        let attributes: Vec<Attribute> = attributes
            .into_iter()
            .map(|(name, cardinality)| Attribute {
                name: name.into(),
                cardinality,
            })
            .collect();
        if attributes.is_empty() {
            return Err(Error::InvalidParameter(
                "domain needs at least one attribute".into(),
            ));
        }
        let mut total: usize = 1;
        for a in &attributes {
            if a.cardinality == 0 {
                return Err(Error::InvalidParameter(format!(
                    "attribute '{}' has cardinality 0",
                    a.name
                )));
            }
            total = total
                .checked_mul(a.cardinality)
                .ok_or_else(|| Error::InvalidParameter("domain size overflows usize".into()))?;
        }
        Ok(Self {
            attributes,
            total_size: total,
        })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn cardinality(&self, attr: usize) -> usize {
        self.attributes[attr].cardinality
    }

    /// Number of cells, `prod(cardinalities)`.
    pub fn total_size(&self) -> usize {
        self.total_size
    }

    /// Row-major mixed-radix encoding of per-attribute coordinates.
    pub fn encode(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.attributes.len());
        let mut cell = 0usize;
        for (c, a) in coords.iter().zip(&self.attributes) {
            debug_assert!(*c < a.cardinality);
            cell = cell * a.cardinality + c;
        }
        cell
    }

    /// Inverse of [`Domain::encode`].
    pub fn decode(&self, mut cell: usize) -> Vec<usize> {
        debug_assert!(cell < self.total_size);
        let mut coords = vec![0usize; self.attributes.len()];
        for (slot, a) in coords.iter_mut().zip(&self.attributes).rev() {
            *slot = cell % a.cardinality;
            cell /= a.cardinality;
        }
        coords
    }

    /// A compact label like `4x8`, used in result tables.
    pub fn label(&self) -> String {
        self.attributes
            .iter()
            .map(|a| a.cardinality.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// The flat cell-count histogram of a table over a domain.
///
/// Counts are stored as reals so that noisy post-processing composes, but
/// ingestion always produces integers and `sum() == row count`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataVector {
    domain: Domain,
    counts: Vec<f64>,
}

impl DataVector {
    pub fn new(domain: Domain, counts: Vec<f64>) -> Result<Self> {
        if counts.len() != domain.total_size() {
            return Err(Error::DimensionMismatch(format!(
                "count vector has length {}, domain has {} cells",
                counts.len(),
                domain.total_size()
            )));
        }
        if counts.iter().any(|c| *c < 0.0 || !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "cell counts must be finite and non-negative".into(),
            ));
        }
        Ok(Self { domain, counts })
    }

    pub fn zeros(domain: Domain) -> Self {
        let counts = vec![0.0; domain.total_size()];
        Self { domain, counts }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// Per-attribute discretization rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    /// Ascending bin edges for a continuous signal; `len - 1` levels. A value
    /// lands in level `i` when `edges[i] <= v < edges[i+1]`; the last bin is
    /// closed on the right.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<Vec<f64>>,
    /// Number of levels for an already-discrete column holding integers in
    /// `[0, levels)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
}

impl AttributeSchema {
    fn cardinality(&self) -> Result<usize> {
        match (&self.bins, self.levels) {
            (Some(edges), None) => {
                if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidParameter(format!(
                        "attribute '{}': bin edges must be strictly ascending with >= 2 entries",
                        self.name
                    )));
                }
                Ok(edges.len() - 1)
            }
            (None, Some(k)) if k >= 1 => Ok(k),
            _ => Err(Error::InvalidParameter(format!(
                "attribute '{}': exactly one of 'bins' or 'levels' required",
                self.name
            ))),
        }
    }

    /// Map a raw value to its level.
    fn bin(&self, value: f64) -> Result<usize> {
        let outside = || Error::ValueOutsideBins {
            column: self.name.clone(),
            value,
        };
        match (&self.bins, self.levels) {
            (Some(edges), None) => {
                let last = edges.len() - 1;
                if value < edges[0] || value > edges[last] {
                    return Err(outside());
                }
                if value == edges[last] {
                    return Ok(last - 1);
                }
                // edges are ascending; find the bin whose half-open range holds the value
                Ok(edges
                    .windows(2)
                    .position(|w| value >= w[0] && value < w[1])
                    .ok_or_else(outside)?)
            }
            (None, Some(k)) => {
                if value.fract() != 0.0 || value < 0.0 || value >= k as f64 {
                    return Err(outside());
                }
                Ok(value as usize)
            }
            _ => Err(Error::InvalidParameter(format!(
                "attribute '{}': exactly one of 'bins' or 'levels' required",
                self.name
            ))),
        }
    }
}

/// The full discretization spec: one rule per attribute, in domain order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSchema {
    pub attributes: Vec<AttributeSchema>,
}

impl TableSchema {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain> {
        let attrs = self
            .attributes
            .iter()
            .map(|a| Ok((a.name.clone(), a.cardinality()?)))
            .collect::<Result<Vec<_>>>()?;
        Domain::new(attrs)
    }
}

/// A parsed table: raw columns plus the binned level of every value.
#[derive(Debug, Clone)]
pub struct Table {
    schema: TableSchema,
    /// Raw values, one inner vector per attribute (schema order).
    columns: Vec<Vec<f64>>,
    /// Binned levels, same shape as `columns`.
    levels: Vec<Vec<usize>>,
    rows: usize,
}

impl Table {
    pub fn schema(&self) -> &TableSchema {
        &self.schema
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn raw_columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Binned coordinates of one row, in attribute order.
    pub fn row_levels(&self, row: usize) -> Vec<usize> {
        self.levels.iter().map(|col| col[row]).collect()
    }
}

/// Parse a CSV file (UTF-8, header row naming attributes, decimal numbers)
/// under the given schema. Every schema attribute must appear in the header;
/// extra columns are ignored.
pub fn parse_table(path: impl AsRef<Path>, schema: &TableSchema) -> Result<Table> {
    let text = std::fs::read_to_string(path)?;
    parse_table_str(&text, schema)
}

/// [`parse_table`] over an in-memory CSV string.
pub fn parse_table_str(text: &str, schema: &TableSchema) -> Result<Table> {
    schema.domain()?; // validate the schema up front
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::MalformedRow {
        line: 1,
        msg: "missing header row".into(),
    })?;
    let header: Vec<&str> = header.split(',').map(str::trim).collect();

    let col_index: Vec<usize> = schema
        .attributes
        .iter()
        .map(|a| {
            header
                .iter()
                .position(|h| *h == a.name)
                .ok_or_else(|| Error::MalformedRow {
                    line: 1,
                    msg: format!("header missing column '{}'", a.name),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns = vec![Vec::new(); schema.attributes.len()];
    let mut levels = vec![Vec::new(); schema.attributes.len()];
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        for (attr_pos, (attr, &ci)) in schema.attributes.iter().zip(&col_index).enumerate() {
            let raw = fields.get(ci).ok_or_else(|| Error::MalformedRow {
                line: line_no,
                msg: format!(
                    "row has {} fields, column '{}' needs index {}",
                    fields.len(),
                    attr.name,
                    ci
                ),
            })?;
            let value: f64 = raw.parse().map_err(|_| Error::MalformedRow {
                line: line_no,
                msg: format!("column '{}': cannot parse '{raw}' as a number", attr.name),
            })?;
            let level = attr.bin(value)?;
            columns[attr_pos].push(value);
            levels[attr_pos].push(level);
        }
        rows += 1;
    }
    Ok(Table {
        schema: schema.clone(),
        columns,
        levels,
        rows,
    })
}

/// Histogram a table into the cell counts of `domain`.
///
/// The table's attributes must match the domain's in order and cardinality
/// (names are the table's own business).
pub fn build_data_vector(table: &Table, domain: &Domain) -> Result<DataVector> {
    let schema_domain = table.schema.domain()?;
    let schema_cards: Vec<usize> = schema_domain
        .attributes()
        .iter()
        .map(|a| a.cardinality)
        .collect();
    let domain_cards: Vec<usize> = domain.attributes().iter().map(|a| a.cardinality).collect();
    if schema_cards != domain_cards {
        return Err(Error::DimensionMismatch(format!(
            "table schema describes domain {}, expected {}",
            schema_domain.label(),
            domain.label()
        )));
    }
    let mut counts = vec![0.0f64; domain.total_size()];
    for row in 0..table.rows {
        counts[domain.encode(&table.row_levels(row))] += 1.0;
    }
    DataVector::new(domain.clone(), counts)
}

/// A domain re-encoded over bit strings, for the Fourier strategy.
///
/// Only defined when every cardinality is a power of two. Attribute bit
/// fields are concatenated in attribute order, so with row-major cell
/// indexing the d-bit pattern of a cell is just its index: `cell_bits` and
/// `bits_cell` form the identity bijection, kept explicit for clarity. The
/// last attribute occupies the least significant bits.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDomain {
    base: Domain,
    bit_widths: Vec<u32>,
    /// Per-attribute bit masks within the d-bit cell pattern.
    attr_masks: Vec<u64>,
    d: u32,
}

impl BinaryDomain {
    pub fn base(&self) -> &Domain {
        &self.base
    }

    /// Total bit count; `2^d == base.total_size()`.
    pub fn bits(&self) -> u32 {
        self.d
    }

    pub fn bit_widths(&self) -> &[u32] {
        &self.bit_widths
    }

    /// Mask of the bits owned by one attribute.
    pub fn attr_mask(&self, attr: usize) -> u64 {
        self.attr_masks[attr]
    }

    /// Union mask of a set of attributes.
    pub fn subset_mask(&self, attrs: &[usize]) -> u64 {
        attrs.iter().fold(0u64, |m, &a| m | self.attr_masks[a])
    }

    /// The d-bit pattern of a cell.
    pub fn cell_bits(&self, cell: usize) -> u64 {
        debug_assert!(cell < self.base.total_size());
        cell as u64
    }

    /// The cell of a d-bit pattern.
    pub fn bits_cell(&self, bits: u64) -> usize {
        debug_assert!(bits < (1u64 << self.d) || self.d == 64);
        bits as usize
    }
}

/// Re-encode a domain over bit strings.
///
/// Errors with [`Error::NonBinarizableDomain`] when any cardinality is not a
/// power of two (the Fourier strategy is unavailable there).
pub fn binarize(domain: &Domain) -> Result<BinaryDomain> {
    let mut bit_widths = Vec::with_capacity(domain.num_attributes());
    for a in domain.attributes() {
        if !a.cardinality.is_power_of_two() {
            return Err(Error::NonBinarizableDomain(format!(
                "attribute '{}' has cardinality {}, not a power of two",
                a.name, a.cardinality
            )));
        }
        bit_widths.push(a.cardinality.trailing_zeros());
    }
    let d: u32 = bit_widths.iter().sum();
    if d > 48 {
        return Err(Error::NonBinarizableDomain(format!(
            "{d} bits exceeds the supported 48"
        )));
    }
    // Masks, first attribute in the most significant field.
    let mut attr_masks = Vec::with_capacity(bit_widths.len());
    let mut used = 0u32;
    for &w in &bit_widths {
        used += w;
        let shift = d - used;
        let mask = if w == 0 {
            0
        } else {
            ((1u64 << w) - 1) << shift
        };
        attr_masks.push(mask);
    }
    Ok(BinaryDomain {
        base: domain.clone(),
        bit_widths,
        attr_masks,
        d,
    })
}
