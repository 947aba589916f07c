//! Ternary edge-list files (`trustor<DELIM>trustee<DELIM>value`), id
//! densification and Table-style dataset statistics.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::matrix::{sparsity_degree, TrustRecord};

/// Field separator. `Whitespace` splits on any run of blanks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Char(char),
    Whitespace,
}

impl Default for Delimiter {
    fn default() -> Self {
        Delimiter::Char('\t')
    }
}

impl Delimiter {
    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match *self {
            Delimiter::Char(c) => line.split(c).map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }

    /// Separator used when writing; whitespace mode writes a tab.
    pub fn output_char(&self) -> char {
        match *self {
            Delimiter::Char(c) => c,
            Delimiter::Whitespace => '\t',
        }
    }
}

impl std::str::FromStr for Delimiter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tab" | "\\t" | "\t" => Ok(Delimiter::Char('\t')),
            "space" | " " => Ok(Delimiter::Char(' ')),
            "comma" | "," => Ok(Delimiter::Char(',')),
            "ws" | "whitespace" => Ok(Delimiter::Whitespace),
            other => {
                let mut chars = other.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Delimiter::Char(c)),
                    _ => Err(Error::InvalidParameter(format!("unsupported delimiter {other:?}"))),
                }
            }
        }
    }
}

impl std::fmt::Display for Delimiter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Delimiter::Char('\t') => f.write_str("tab"),
            Delimiter::Char(' ') => f.write_str("space"),
            Delimiter::Char(',') => f.write_str("comma"),
            Delimiter::Char(c) => write!(f, "{c}"),
            Delimiter::Whitespace => f.write_str("whitespace"),
        }
    }
}

/// How raw id strings become matrix indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdPolicy {
    /// Contiguous ids in order of first appearance.
    #[default]
    Densify,
    /// Raw ids are already non-negative integers; keep them, `m = max + 1`.
    Preserve,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub delimiter: Delimiter,
    /// Raw values are divided by this.
    pub value_scale: f64,
    /// Skip the first non-comment line.
    pub header: bool,
    /// Also emit the reverse of every edge (undirected friendship networks).
    pub symmetric: bool,
    pub ids: IdPolicy,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: Delimiter::default(),
            value_scale: 1.0,
            header: false,
            symmetric: false,
            ids: IdPolicy::Densify,
        }
    }
}

/// Bijection between raw id strings and dense indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdMap {
    raw: IndexSet<String>,
}

impl IdMap {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn dense(&self, raw: &str) -> Option<usize> {
        self.raw.get_index_of(raw)
    }

    pub fn raw(&self, dense: usize) -> Option<&str> {
        self.raw.get_index(dense).map(String::as_str)
    }

    fn intern(&mut self, raw: &str) -> usize {
        match self.raw.get_index_of(raw) {
            Some(i) => i,
            None => self.raw.insert_full(raw.to_string()).0,
        }
    }

    /// Identity map over `0..m`.
    pub fn identity(m: usize) -> Self {
        Self {
            raw: (0..m).map(|i| i.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MalformedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct TernaryDataset {
    pub records: Vec<TrustRecord>,
    pub ids: IdMap,
    pub m: usize,
    /// Lines that were skipped because they could not be parsed.
    pub malformed: Vec<MalformedLine>,
}

pub fn load_ternary(path: impl AsRef<Path>, options: &LoadOptions) -> Result<TernaryDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_ternary(BufReader::new(file), path, options)
}

/// Parses ternary lines from any reader; `origin` only labels diagnostics.
pub fn parse_ternary<R: BufRead>(reader: R, origin: &Path, options: &LoadOptions) -> Result<TernaryDataset> {
    if !(options.value_scale > 0.0) || !options.value_scale.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "value scale must be positive, got {}",
            options.value_scale
        )));
    }
    let mut ids = IdMap::default();
    let mut max_id = 0usize;
    let mut records = Vec::new();
    let mut malformed = Vec::new();
    let mut header_pending = options.header;

    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() || text.trim_start().starts_with('#') {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let fields = options.delimiter.split(text);
        if fields.len() < 3 {
            malformed.push(MalformedLine {
                line: line_no,
                reason: format!("expected 3 fields, found {}", fields.len()),
            });
            continue;
        }
        let raw_value: f64 = match fields[2].parse() {
            Ok(v) => v,
            Err(_) => {
                malformed.push(MalformedLine {
                    line: line_no,
                    reason: format!("unparsable value {:?}", fields[2]),
                });
                continue;
            }
        };
        let value = raw_value / options.value_scale;
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Line {
                path: origin.to_path_buf(),
                line: line_no,
                message: format!("value {raw_value} scales to {value}, outside [0, 1]"),
            });
        }
        let (a, b) = match options.ids {
            IdPolicy::Densify => (ids.intern(fields[0]), ids.intern(fields[1])),
            IdPolicy::Preserve => match (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                (Ok(a), Ok(b)) => {
                    max_id = max_id.max(a).max(b);
                    (a, b)
                }
                _ => {
                    malformed.push(MalformedLine {
                        line: line_no,
                        reason: "ids are not non-negative integers".into(),
                    });
                    continue;
                }
            },
        };
        records.push(TrustRecord::new(a, b, value));
        if options.symmetric && a != b {
            records.push(TrustRecord::new(b, a, value));
        }
    }

    if records.is_empty() {
        return Err(Error::EmptyDataset(origin.to_path_buf()));
    }
    let (ids, m) = match options.ids {
        IdPolicy::Densify => {
            let m = ids.len();
            (ids, m)
        }
        IdPolicy::Preserve => (IdMap::identity(max_id + 1), max_id + 1),
    };
    Ok(TernaryDataset {
        records,
        ids,
        m,
        malformed,
    })
}

/// Formats `v` with 12 significant digits, trailing zeros trimmed.
pub fn format_value(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Writes records sorted by trustor then trustee. With `ids`, indices are
/// printed as their raw ids.
pub fn write_ternary(
    records: &[TrustRecord],
    path: impl AsRef<Path>,
    delimiter: Delimiter,
    ids: Option<&IdMap>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_ternary_to(records, &mut out, delimiter, ids).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_ternary_to<W: Write>(
    records: &[TrustRecord],
    out: &mut W,
    delimiter: Delimiter,
    ids: Option<&IdMap>,
) -> std::io::Result<()> {
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| (r.trustor, r.trustee));
    let sep = delimiter.output_char();
    let name = |i: usize| -> String {
        ids.and_then(|m| m.raw(i))
            .map(str::to_string)
            .unwrap_or_else(|| i.to_string())
    };
    for r in &sorted {
        writeln!(
            out,
            "{}{sep}{}{sep}{}",
            name(r.trustor),
            name(r.trustee),
            format_value(r.value)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub num_users: usize,
    /// Item count for user-item rating files; `None` for square trust networks.
    pub num_items: Option<usize>,
    pub num_trust_edges: usize,
    pub sparsity_degree: f64,
    pub mean_friends_per_user: f64,
}

impl DatasetStats {
    pub fn from_counts(num_users: usize, num_items: Option<usize>, num_trust_edges: usize) -> Self {
        let cols = num_items.unwrap_or(num_users);
        Self {
            num_users,
            num_items,
            num_trust_edges,
            sparsity_degree: sparsity_degree(num_trust_edges, num_users, cols).unwrap_or(0.0),
            mean_friends_per_user: if num_users == 0 {
                0.0
            } else {
                num_trust_edges as f64 / num_users as f64
            },
        }
    }
}

/// Counts distinct nonzero `(trustor, trustee)` pairs over `m_users` rows and
/// `n_items` columns (square when `None`).
pub fn dataset_stats(records: &[TrustRecord], m_users: usize, n_items: Option<usize>) -> DatasetStats {
    let mut keys: Vec<(usize, usize)> = records
        .iter()
        .filter(|r| r.value != 0.0)
        .map(|r| (r.trustor, r.trustee))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    DatasetStats::from_counts(m_users, n_items, keys.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str, options: &LoadOptions) -> Result<TernaryDataset> {
        parse_ternary(Cursor::new(text), Path::new("mem"), options)
    }

    #[test]
    fn single_binary_edge() {
        let d = parse("1\t2\t1\n", &LoadOptions::default()).unwrap();
        assert_eq!(d.records, vec![TrustRecord::new(0, 1, 1.0)]);
        assert_eq!(d.m, 2);
        assert_eq!(d.ids.raw(1), Some("2"));
    }

    #[test]
    fn rating_scale() {
        let opts = LoadOptions {
            value_scale: 5.0,
            ..LoadOptions::default()
        };
        let d = parse("a\tb\t4\n", &opts).unwrap();
        assert_eq!(d.records[0].value, 0.8);
    }

    #[test]
    fn out_of_range_value_is_located() {
        let err = parse("# c\n1\t2\t1\n2\t3\t7\n", &LoadOptions::default()).unwrap_err();
        match err {
            Error::Line { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn malformed_lines_counted() {
        let d = parse("1\t2\t1\nbroken\n3\t4\tx\n5\t6\t0.5\n", &LoadOptions::default()).unwrap();
        assert_eq!(d.records.len(), 2);
        let lines: Vec<usize> = d.malformed.iter().map(|m| m.line).collect();
        assert_eq!(lines, vec![2, 3]);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(parse("", &LoadOptions::default()), Err(Error::EmptyDataset(_))));
        assert!(matches!(parse("# only\n\n", &LoadOptions::default()), Err(Error::EmptyDataset(_))));
    }

    #[test]
    fn header_comma_and_symmetric() {
        let opts = LoadOptions {
            delimiter: Delimiter::Char(','),
            header: true,
            symmetric: true,
            ..LoadOptions::default()
        };
        let d = parse("from,to,w\n7, 9, 0.5\n", &opts).unwrap();
        assert_eq!(d.records, vec![TrustRecord::new(0, 1, 0.5), TrustRecord::new(1, 0, 0.5)]);
    }

    #[test]
    fn whitespace_and_preserved_ids() {
        let opts = LoadOptions {
            delimiter: Delimiter::Whitespace,
            ids: IdPolicy::Preserve,
            ..LoadOptions::default()
        };
        let d = parse("3   1 1\r\n", &opts).unwrap();
        assert_eq!(d.records, vec![TrustRecord::new(3, 1, 1.0)]);
        assert_eq!(d.m, 4);
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_value(0.8), "0.8");
        assert_eq!(format_value(1.0), "1");
        assert_eq!(format_value(0.123456789012345), "0.123456789012");
        assert_eq!(format_value(1.0 / 3.0 * 1e-5), "0.00000333333333333");
    }

    #[test]
    fn sorted_output() {
        let mut buf = Vec::new();
        let recs = [TrustRecord::new(1, 0, 0.5), TrustRecord::new(0, 2, 0.25), TrustRecord::new(0, 1, 1.0)];
        write_ternary_to(&recs, &mut buf, Delimiter::default(), None).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0\t1\t1\n0\t2\t0.25\n1\t0\t0.5\n");
        let mut buf = Vec::new();
        write_ternary_to(&[], &mut buf, Delimiter::default(), None).unwrap();
        assert!(buf.is_empty());
    }

    #[test]
    fn table_counts() {
        let ciao = DatasetStats::from_counts(7_375, Some(99_746), 278_483);
        assert!((ciao.sparsity_degree * 100.0 - 0.0379).abs() < 0.0001);
        let douban = DatasetStats::from_counts(129_490, Some(58_541), 16_830_939);
        assert!((douban.sparsity_degree * 100.0 - 0.2220).abs() < 0.0001);
        let none = dataset_stats(&[], 10, None);
        assert_eq!(none.sparsity_degree, 0.0);
        assert_eq!(none.num_trust_edges, 0);
    }

    #[test]
    fn stats_deduplicate_keys() {
        let recs = [TrustRecord::new(0, 1, 1.0), TrustRecord::new(0, 1, 0.5), TrustRecord::new(1, 0, 0.0)];
        let s = dataset_stats(&recs, 2, None);
        assert_eq!(s.num_trust_edges, 1);
        assert_eq!(s.sparsity_degree, 0.25);
        assert_eq!(s.mean_friends_per_user, 0.5);
    }
}
