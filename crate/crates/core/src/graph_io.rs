//! Edge-list loading, normalization and CSR construction.
//!
//! Two on-disk edge formats are understood:
//!
//! * text: one `u v` pair per line, whitespace separated decimal ids. Lines
//!   starting with `#` or `%` and blank lines are ignored.
//! * binary: the magic `TCEL`, a little-endian `u64` pair count, then that
//!   many little-endian `(u64, u64)` pairs.
//!
//! Ids are 64-bit on disk and 32-bit in memory; anything that does not fit is
//! rejected at load time.
//!
//! Graphs are also persisted as binary CSR (`TCSR`, `u64` vertex count,
//! `u64` edge count, `vertex_count + 1` `u64` offsets, `edge_count` `u32`
//! neighbor ids), which is what partition dumps use.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::ops::Range;
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};

pub type VertexId = u32;

pub const EDGE_LIST_MAGIC: &[u8; 4] = b"TCEL";
pub const CSR_MAGIC: &[u8; 4] = b"TCSR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFormat {
    Text,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeList {
    pub edges: Vec<(VertexId, VertexId)>,
    pub vertex_count: usize,
}

impl EdgeList {
    /// Builds an edge list whose vertex count is `max id + 1`.
    pub fn from_pairs(edges: Vec<(VertexId, VertexId)>) -> Self {
        let vertex_count = edges
            .iter()
            .map(|&(u, v)| u.max(v) as usize + 1)
            .max()
            .unwrap_or(0);
        Self {
            edges,
            vertex_count,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

fn narrow(id: u64) -> Result<VertexId> {
    VertexId::try_from(id).map_err(|_| Error::VertexIdOverflow(id))
}

/// Reads a raw (unnormalized) edge list.
pub fn load_edge_list<R: Read>(source: R, format: EdgeFormat) -> Result<EdgeList> {
    let edges = match format {
        EdgeFormat::Text => parse_text(BufReader::new(source))?,
        EdgeFormat::Binary => parse_binary(BufReader::new(source))?,
    };
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(EdgeList::from_pairs(edges))
}

/// Opens `path` and loads it, transparently gunzipping `*.gz` files.
pub fn read_edge_list_file(path: &Path, format: EdgeFormat) -> Result<EdgeList> {
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        load_edge_list(MultiGzDecoder::new(file), format)
    } else {
        load_edge_list(file, format)
    }
}

fn parse_text<R: BufRead>(mut reader: R) -> Result<Vec<(VertexId, VertexId)>> {
    let mut edges = Vec::new();
    let mut line = String::new();
    let mut line_no = 0;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let parse_id = |field: Option<&str>| -> Result<VertexId> {
            let field = field.ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two vertex ids".into(),
            })?;
            let id: u64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid vertex id {field:?}"),
            })?;
            narrow(id)
        };
        let u = parse_id(fields.next())?;
        let v = parse_id(fields.next())?;
        if let Some(extra) = fields.next() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unexpected trailing field {extra:?}"),
            });
        }
        edges.push((u, v));
    }
    Ok(edges)
}

fn read_u64<R: Read>(reader: &mut R) -> io::Result<u64> {
    let mut buf = [0u8; 8];
    reader.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn truncated(e: io::Error, what: &str) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Format(format!("truncated {what}"))
    } else {
        Error::Io(e)
    }
}

fn parse_binary<R: Read>(mut reader: R) -> Result<Vec<(VertexId, VertexId)>> {
    let mut magic = [0u8; 4];
    reader
        .read_exact(&mut magic)
        .map_err(|e| truncated(e, "header"))?;
    if &magic != EDGE_LIST_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}, expected TCEL")));
    }
    let count = read_u64(&mut reader).map_err(|e| truncated(e, "header"))?;
    let mut edges = Vec::with_capacity(count.min(1 << 24) as usize);
    for _ in 0..count {
        let u = read_u64(&mut reader).map_err(|e| truncated(e, "edge data"))?;
        let v = read_u64(&mut reader).map_err(|e| truncated(e, "edge data"))?;
        edges.push((narrow(u)?, narrow(v)?));
    }
    Ok(edges)
}

pub fn write_edge_list_binary<W: Write>(edges: &EdgeList, sink: W) -> Result<()> {
    let mut w = BufWriter::new(sink);
    w.write_all(EDGE_LIST_MAGIC)?;
    w.write_all(&(edges.edges.len() as u64).to_le_bytes())?;
    for &(u, v) in &edges.edges {
        w.write_all(&u64::from(u).to_le_bytes())?;
        w.write_all(&u64::from(v).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Old-to-new vertex id map produced by [`normalize`]. `None` marks a vertex
/// that was dropped because it had no edges left.
pub type IdMap = Vec<Option<VertexId>>;

/// Drops self-loops and duplicates, symmetrizes, and compacts away orphan
/// vertices while keeping the relative order of the survivors.
///
/// The returned edges are sorted by `(u, v)`.
pub fn normalize(raw: &EdgeList) -> (EdgeList, IdMap) {
    let mut undirected: Vec<(VertexId, VertexId)> = raw
        .edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| if u < v { (u, v) } else { (v, u) })
        .collect();
    undirected.sort_unstable();
    undirected.dedup();

    let mut used = vec![false; raw.vertex_count];
    for &(u, v) in &undirected {
        used[u as usize] = true;
        used[v as usize] = true;
    }
    let mut next = 0;
    let id_map: IdMap = used
        .iter()
        .map(|&keep| {
            keep.then(|| {
                next += 1;
                next - 1
            })
        })
        .collect();

    let mut edges = Vec::with_capacity(undirected.len() * 2);
    for &(u, v) in &undirected {
        let (u, v) = (id_map[u as usize].unwrap(), id_map[v as usize].unwrap());
        edges.push((u, v));
        edges.push((v, u));
    }
    drop(undirected);
    edges.sort_unstable();

    (
        EdgeList {
            edges,
            vertex_count: next as usize,
        },
        id_map,
    )
}

/// Compressed sparse row adjacency.
///
/// `begin` has `vertex_count + 1` offsets into `adjacency`; every neighbor
/// list is sorted ascending and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrGraph {
    begin: Vec<usize>,
    adjacency: Vec<VertexId>,
}

impl CsrGraph {
    /// A graph with `vertex_count` vertices and no edges.
    pub fn empty(vertex_count: usize) -> Self {
        Self {
            begin: vec![0; vertex_count + 1],
            adjacency: Vec::new(),
        }
    }

    /// Validates and wraps raw CSR arrays.
    pub fn from_parts(begin: Vec<usize>, adjacency: Vec<VertexId>) -> Result<Self> {
        let bad = |msg: String| Err(Error::Format(msg));
        if begin.first() != Some(&0) {
            return bad("offsets must start at 0".into());
        }
        if *begin.last().unwrap() != adjacency.len() {
            return bad("last offset must equal the adjacency length".into());
        }
        let n = begin.len() - 1;
        for w in begin.windows(2) {
            if w[0] > w[1] {
                return bad("offsets must be non-decreasing".into());
            }
            let list = &adjacency[w[0]..w[1]];
            if list.windows(2).any(|p| p[0] >= p[1]) {
                return bad("neighbor lists must be strictly increasing".into());
            }
        }
        if let Some(&v) = adjacency.iter().find(|&&v| v as usize >= n) {
            return bad(format!("neighbor {v} out of range for {n} vertices"));
        }
        Ok(Self { begin, adjacency })
    }

    /// Builds a CSR from arbitrary directed pairs; lists are sorted and
    /// deduplicated.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Self {
        let mut begin = vec![0usize; vertex_count + 1];
        for &(u, _) in edges {
            begin[u as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            begin[i + 1] += begin[i];
        }
        let mut cursor = begin.clone();
        let mut adjacency = vec![0; edges.len()];
        for &(u, v) in edges {
            let slot = &mut cursor[u as usize];
            adjacency[*slot] = v;
            *slot += 1;
        }

        // sort each list, then squeeze out duplicates in place
        let mut write = 0;
        let mut start = 0;
        for u in 0..vertex_count {
            let end = begin[u + 1];
            adjacency[start..end].sort_unstable();
            let list_start = write;
            for i in start..end {
                if write == list_start || adjacency[write - 1] != adjacency[i] {
                    adjacency[write] = adjacency[i];
                    write += 1;
                }
            }
            begin[u] = list_start;
            start = end;
        }
        begin[vertex_count] = write;
        adjacency.truncate(write);
        Self { begin, adjacency }
    }

    pub fn vertex_count(&self) -> usize {
        self.begin.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn begin(&self) -> &[usize] {
        &self.begin
    }

    pub fn adjacency(&self) -> &[VertexId] {
        &self.adjacency
    }

    #[inline]
    pub fn range(&self, u: usize) -> Range<usize> {
        self.begin[u]..self.begin[u + 1]
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[VertexId] {
        &self.adjacency[self.begin[u]..self.begin[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.begin[u + 1] - self.begin[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.begin.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.begin
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .unwrap_or(0)
    }

    /// All directed edges in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.vertex_count())
            .flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u as VertexId, v)))
    }

    pub fn to_edge_list(&self) -> EdgeList {
        EdgeList {
            edges: self.edges().collect(),
            vertex_count: self.vertex_count(),
        }
    }

    pub fn write_binary<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = BufWriter::new(sink);
        w.write_all(CSR_MAGIC)?;
        w.write_all(&(self.vertex_count() as u64).to_le_bytes())?;
        w.write_all(&(self.edge_count() as u64).to_le_bytes())?;
        for &b in &self.begin {
            w.write_all(&(b as u64).to_le_bytes())?;
        }
        for &v in &self.adjacency {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(source: R) -> Result<Self> {
        let mut r = BufReader::new(source);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|e| truncated(e, "header"))?;
        if &magic != CSR_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}, expected TCSR")));
        }
        let n = read_u64(&mut r).map_err(|e| truncated(e, "header"))? as usize;
        let m = read_u64(&mut r).map_err(|e| truncated(e, "header"))? as usize;
        let mut begin = Vec::with_capacity(n.min(1 << 24) + 1);
        for _ in 0..=n {
            begin.push(read_u64(&mut r).map_err(|e| truncated(e, "offsets"))? as usize);
        }
        let mut adjacency = Vec::with_capacity(m.min(1 << 24));
        let mut buf = [0u8; 4];
        for _ in 0..m {
            r.read_exact(&mut buf)
                .map_err(|e| truncated(e, "adjacency"))?;
            adjacency.push(u32::from_le_bytes(buf));
        }
        Self::from_parts(begin, adjacency)
    }
}

/// Builds the CSR of a normalized edge list.
pub fn build_csr(normalized: &EdgeList) -> CsrGraph {
    CsrGraph::from_edges(normalized.vertex_count, &normalized.edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(s: &str) -> Result<EdgeList> {
        load_edge_list(s.as_bytes(), EdgeFormat::Text)
    }

    #[test]
    fn parses_text_pairs() {
        let el = text("0 1\n1 2\n").unwrap();
        assert_eq!(el.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(el.vertex_count, 3);
    }

    #[test]
    fn comments_skipped_and_self_loop_kept() {
        let el = text("# c\n2 2\n").unwrap();
        assert_eq!(el.edges, vec![(2, 2)]);
        assert_eq!(el.vertex_count, 3);
        let el = text("% mm\n\n0\t5\r\n").unwrap();
        assert_eq!(el.edges, vec![(0, 5)]);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match text("0 x") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match text("0 1\n# ok\n3\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(text("0 1 2"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(text(""), Err(Error::EmptyInput)));
        assert!(matches!(text("# nothing\n"), Err(Error::EmptyInput)));
    }

    #[test]
    fn oversized_ids_rejected() {
        assert!(matches!(
            text("0 4294967296"),
            Err(Error::VertexIdOverflow(4294967296))
        ));
    }

    #[test]
    fn binary_round_trip_and_truncation() {
        let el = EdgeList::from_pairs(vec![(0, 7), (3, 1)]);
        let mut buf = Vec::new();
        write_edge_list_binary(&el, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"TCEL");
        assert_eq!(buf.len(), 4 + 8 + 2 * 16);
        let back = load_edge_list(&buf[..], EdgeFormat::Binary).unwrap();
        assert_eq!(back, el);

        let cut = &buf[..buf.len() - 3];
        assert!(matches!(
            load_edge_list(cut, EdgeFormat::Binary),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            load_edge_list(&b"XXXX"[..], EdgeFormat::Binary),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn normalize_examples() {
        let (el, map) = normalize(&EdgeList::from_pairs(vec![(0, 1), (1, 0), (2, 2)]));
        assert_eq!(el.edges, vec![(0, 1), (1, 0)]);
        assert_eq!(el.vertex_count, 2);
        assert_eq!(map, vec![Some(0), Some(1), None]);

        let (el, _) = normalize(&EdgeList::from_pairs(vec![(0, 1), (0, 1)]));
        assert_eq!(el.edges, vec![(0, 1), (1, 0)]);

        let (el, map) = normalize(&EdgeList::from_pairs(vec![(0, 2)]));
        assert_eq!(el.edges, vec![(0, 1), (1, 0)]);
        assert_eq!(el.vertex_count, 2);
        assert_eq!(map, vec![Some(0), None, Some(1)]);
    }

    #[test]
    fn normalize_may_produce_empty() {
        let (el, map) = normalize(&EdgeList::from_pairs(vec![(3, 3)]));
        assert!(el.is_empty());
        assert_eq!(el.vertex_count, 0);
        assert!(map.iter().all(Option::is_none));
    }

    #[test]
    fn build_csr_examples() {
        let g = build_csr(&EdgeList::from_pairs(vec![(0, 1), (1, 0), (1, 2), (2, 1)]));
        assert_eq!(g.begin(), &[0, 1, 3, 4]);
        assert_eq!(g.adjacency(), &[1, 0, 2, 1]);

        let k3 = EdgeList::from_pairs(vec![(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]);
        let g = build_csr(&k3);
        assert_eq!(g.begin(), &[0, 2, 4, 6]);
        assert_eq!(g.adjacency(), &[1, 2, 0, 2, 0, 1]);

        let g = build_csr(&EdgeList::default());
        assert_eq!(g.begin(), &[0]);
        assert!(g.adjacency().is_empty());
    }

    #[test]
    fn csr_sorts_and_dedups_lists() {
        let g = CsrGraph::from_edges(3, &[(0, 2), (0, 1), (0, 2), (2, 0)]);
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.neighbors(1), &[] as &[u32]);
        assert_eq!(g.neighbors(2), &[0]);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn from_parts_validates() {
        assert!(CsrGraph::from_parts(vec![0, 2, 3], vec![1, 1, 0]).is_err());
        assert!(CsrGraph::from_parts(vec![0, 2, 1], vec![1, 0]).is_err());
        assert!(CsrGraph::from_parts(vec![0, 1], vec![5]).is_err());
        assert!(CsrGraph::from_parts(vec![1, 1], vec![0]).is_err());
        assert!(CsrGraph::from_parts(vec![0, 1, 2], vec![1, 0]).is_ok());
    }

    #[test]
    fn csr_binary_round_trip() {
        let g = CsrGraph::from_edges(4, &[(0, 1), (0, 3), (2, 3), (3, 0)]);
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        assert_eq!(CsrGraph::read_binary(&buf[..]).unwrap(), g);
        assert!(CsrGraph::read_binary(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn gz_files_are_decompressed() {
        use flate2::write::GzEncoder;
        use flate2::Compression;

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt.gz");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), Compression::fast());
        enc.write_all(b"# header\n0\t1\n1\t2\n").unwrap();
        enc.finish().unwrap();
        let el = read_edge_list_file(&path, EdgeFormat::Text).unwrap();
        assert_eq!(el.edges, vec![(0, 1), (1, 2)]);
    }
}
