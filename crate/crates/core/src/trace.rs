//! Visit records, trace file I/O and the indexed dataset.
//!
//! Trace files are UTF-8 CSV with the header `user_id,title_id,cell_id,timestamp`.
//! Identifiers are restricted to `[A-Za-z0-9_:-]+`, so fields are never quoted.
//! The timestamp field may be empty.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const TRACE_HEADER: [&str; 4] = ["user_id", "title_id", "cell_id", "timestamp"];

/// One logged content access.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VisitRecord {
    pub user_id: String,
    pub title_id: String,
    pub cell_id: String,
    pub timestamp: Option<u64>,
}

impl VisitRecord {
    pub fn new(
        user_id: impl Into<String>,
        title_id: impl Into<String>,
        cell_id: impl Into<String>,
        timestamp: Option<u64>,
    ) -> Self {
        VisitRecord {
            user_id: user_id.into(),
            title_id: title_id.into(),
            cell_id: cell_id.into(),
            timestamp,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        for (field, value) in [
            ("user_id", &self.user_id),
            ("title_id", &self.title_id),
            ("cell_id", &self.cell_id),
        ] {
            check_identifier(field, value)?;
        }
        Ok(())
    }
}

pub fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b':' | b'-'))
}

fn check_identifier(field: &str, value: &str) -> std::result::Result<(), String> {
    if value.is_empty() {
        Err(format!("{field} is empty"))
    } else if !is_identifier(value) {
        Err(format!(
            "{field} `{value}` contains characters outside [A-Za-z0-9_:-]"
        ))
    } else {
        Ok(())
    }
}

macro_rules! handle {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

handle!(
    /// Dense handle of a user. Handles are assigned in ascending identifier
    /// order, so comparing handles compares identifiers.
    UserIx
);
handle!(
    /// Dense handle of a title, ordered like [`UserIx`].
    TitleIx
);
handle!(
    /// Dense handle of a cell, ordered like [`UserIx`].
    CellIx
);

/// Sorted identifier table with reverse lookup.
#[derive(Debug, Clone, PartialEq, Default)]
struct Interner {
    names: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl Interner {
    fn from_sorted(names: BTreeSet<&str>) -> Self {
        let names: Vec<String> = names.into_iter().map(str::to_owned).collect();
        let lookup = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        Interner { names, lookup }
    }

    fn get(&self, name: &str) -> Option<u32> {
        self.lookup.get(name).copied()
    }
}

/// Immutable visit collection plus the per-title and per-user aggregations
/// every analysis reads.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceDataset {
    records: Vec<VisitRecord>,
    users: Interner,
    titles: Interner,
    cells: Interner,
    title_visits: Vec<u64>,
    title_cell_visits: Vec<BTreeMap<CellIx, u64>>,
    title_users: Vec<Vec<UserIx>>,
    user_visits: Vec<u64>,
    user_cell_visits: Vec<BTreeMap<CellIx, u64>>,
    user_top_cell: Vec<CellIx>,
    cell_visits: Vec<u64>,
}

impl TraceDataset {
    /// Validates `records` and builds every index. Record order is kept.
    pub fn build(records: Vec<VisitRecord>) -> Result<Self> {
        for (index, r) in records.iter().enumerate() {
            r.validate()
                .map_err(|reason| Error::InvalidRecord { index, reason })?;
        }

        let users = Interner::from_sorted(records.iter().map(|r| r.user_id.as_str()).collect());
        let titles = Interner::from_sorted(records.iter().map(|r| r.title_id.as_str()).collect());
        let cells = Interner::from_sorted(records.iter().map(|r| r.cell_id.as_str()).collect());

        let mut title_visits = vec![0u64; titles.names.len()];
        let mut title_cell_visits = vec![BTreeMap::new(); titles.names.len()];
        let mut title_users: Vec<BTreeSet<UserIx>> = vec![BTreeSet::new(); titles.names.len()];
        let mut user_visits = vec![0u64; users.names.len()];
        let mut user_cell_visits = vec![BTreeMap::new(); users.names.len()];
        let mut cell_visits = vec![0u64; cells.names.len()];

        for r in &records {
            let u = UserIx(users.get(&r.user_id).expect("interned"));
            let t = TitleIx(titles.get(&r.title_id).expect("interned"));
            let c = CellIx(cells.get(&r.cell_id).expect("interned"));
            title_visits[t.index()] += 1;
            *title_cell_visits[t.index()].entry(c).or_insert(0) += 1;
            title_users[t.index()].insert(u);
            user_visits[u.index()] += 1;
            *user_cell_visits[u.index()].entry(c).or_insert(0) += 1;
            cell_visits[c.index()] += 1;
        }

        // Max count wins; BTreeMap iteration is ascending, so the first
        // maximum is the smallest cell identifier.
        let user_top_cell = user_cell_visits
            .iter()
            .map(|cells: &BTreeMap<CellIx, u64>| {
                let mut best: Option<(CellIx, u64)> = None;
                for (&c, &n) in cells {
                    if best.is_none_or(|(_, m)| n > m) {
                        best = Some((c, n));
                    }
                }
                best.expect("user has at least one visit").0
            })
            .collect();

        Ok(TraceDataset {
            records,
            users,
            titles,
            cells,
            title_visits,
            title_cell_visits,
            title_users: title_users
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
            user_visits,
            user_cell_visits,
            user_top_cell,
            cell_visits,
        })
    }

    pub fn records(&self) -> &[VisitRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<VisitRecord> {
        self.records
    }

    pub fn total_visits(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn user_count(&self) -> usize {
        self.users.names.len()
    }

    pub fn title_count(&self) -> usize {
        self.titles.names.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.names.len()
    }

    pub fn users(&self) -> impl ExactSizeIterator<Item = UserIx> + '_ {
        (0..self.user_count() as u32).map(UserIx)
    }

    pub fn titles(&self) -> impl ExactSizeIterator<Item = TitleIx> + '_ {
        (0..self.title_count() as u32).map(TitleIx)
    }

    pub fn cells(&self) -> impl ExactSizeIterator<Item = CellIx> + '_ {
        (0..self.cell_count() as u32).map(CellIx)
    }

    pub fn user_ix(&self, id: &str) -> Option<UserIx> {
        self.users.get(id).map(UserIx)
    }

    pub fn title_ix(&self, id: &str) -> Option<TitleIx> {
        self.titles.get(id).map(TitleIx)
    }

    pub fn cell_ix(&self, id: &str) -> Option<CellIx> {
        self.cells.get(id).map(CellIx)
    }

    pub fn require_user(&self, id: &str) -> Result<UserIx> {
        self.user_ix(id)
            .ok_or_else(|| Error::UnknownUser(id.to_owned()))
    }

    pub fn require_title(&self, id: &str) -> Result<TitleIx> {
        self.title_ix(id)
            .ok_or_else(|| Error::UnknownTitle(id.to_owned()))
    }

    pub fn user_id(&self, u: UserIx) -> &str {
        &self.users.names[u.index()]
    }

    pub fn title_id(&self, t: TitleIx) -> &str {
        &self.titles.names[t.index()]
    }

    pub fn cell_id(&self, c: CellIx) -> &str {
        &self.cells.names[c.index()]
    }

    /// Number of visits of `t`, the unicast cost of the title.
    pub fn title_visits(&self, t: TitleIx) -> u64 {
        self.title_visits[t.index()]
    }

    /// Visits of `t` per cell in which it was accessed.
    pub fn title_cell_visits(&self, t: TitleIx) -> &BTreeMap<CellIx, u64> {
        &self.title_cell_visits[t.index()]
    }

    /// Distinct visitors of `t`, ascending.
    pub fn title_users(&self, t: TitleIx) -> &[UserIx] {
        &self.title_users[t.index()]
    }

    /// Visits of `u` across all titles (its activity level).
    pub fn user_visits(&self, u: UserIx) -> u64 {
        self.user_visits[u.index()]
    }

    pub fn user_cell_visits(&self, u: UserIx) -> &BTreeMap<CellIx, u64> {
        &self.user_cell_visits[u.index()]
    }

    /// Cell with the most visits of `u`, ties to the smallest identifier.
    pub fn user_top_cell(&self, u: UserIx) -> CellIx {
        self.user_top_cell[u.index()]
    }

    pub fn cell_visits(&self, c: CellIx) -> u64 {
        self.cell_visits[c.index()]
    }
}

/// Input formats accepted by [`parse_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceFormat {
    #[default]
    Csv,
}

/// Reads and indexes a trace file.
pub fn parse_trace(path: impl AsRef<Path>, format: TraceFormat) -> Result<TraceDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        TraceFormat::Csv => read_trace(BufReader::new(file), path),
    }
}

/// Reads CSV trace data from `reader`; `source` names it in error messages.
pub fn read_trace<R: Read>(reader: R, source: impl AsRef<Path>) -> Result<TraceDataset> {
    let source = source.as_ref();
    let parse_err = |line: u64, message: String| Error::Parse {
        path: source.to_owned(),
        line,
        message,
    };

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut records = Vec::new();
    let mut saw_header = false;
    let mut row = csv::StringRecord::new();
    loop {
        let more = rdr.read_record(&mut row).map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        if !more {
            break;
        }
        let line = row.position().map_or(0, |p| p.line());
        if !saw_header {
            if row.iter().ne(TRACE_HEADER) {
                return Err(parse_err(
                    line,
                    format!("expected header `{}`", TRACE_HEADER.join(",")),
                ));
            }
            saw_header = true;
            continue;
        }
        if row.len() != TRACE_HEADER.len() {
            return Err(parse_err(
                line,
                format!(
                    "expected {} fields, found {}",
                    TRACE_HEADER.len(),
                    row.len()
                ),
            ));
        }
        let timestamp = match &row[3] {
            "" => None,
            s => Some(s.parse::<u64>().map_err(|_| {
                parse_err(
                    line,
                    format!("timestamp `{s}` is not a non-negative integer"),
                )
            })?),
        };
        let record = VisitRecord::new(&row[0], &row[1], &row[2], timestamp);
        record.validate().map_err(|m| parse_err(line, m))?;
        records.push(record);
    }

    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    TraceDataset::build(records)
}

/// Writes `dataset` in the format [`parse_trace`] reads.
pub fn write_trace(dataset: &TraceDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_records(dataset.records(), &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_records<W: Write>(records: &[VisitRecord], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{}", TRACE_HEADER.join(","))?;
    for r in records {
        match r.timestamp {
            Some(ts) => writeln!(out, "{},{},{},{}", r.user_id, r.title_id, r.cell_id, ts)?,
            None => writeln!(out, "{},{},{},", r.user_id, r.title_id, r.cell_id)?,
        }
    }
    Ok(())
}
