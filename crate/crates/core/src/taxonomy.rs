//! Hypernym taxonomies and WordNet path similarity.
//!
//! Distances are shortest undirected paths over hypernym edges. All roots
//! hang off one virtual super-root, so any two synsets are connected.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fs;
use std::path::Path;
use std::sync::{Arc, RwLock};

use crate::csm::{ClassSimilarityMatrix, CsmKind};
use crate::error::{Error, Result};
use crate::ingest::ClassSpec;
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

const UNREACHED: u32 = u32::MAX;

#[derive(Debug)]
pub struct Taxonomy {
    ids: Vec<String>,
    lookup: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    edge_count: usize,
    sweeps: RwLock<HashMap<usize, Arc<Vec<u32>>>>,
}

/// Path similarity `1 / (1 + d)`, stored by its distance `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathSimilarity {
    distance: u32,
}

impl PathSimilarity {
    pub fn from_distance(distance: u32) -> Self {
        Self { distance }
    }

    pub fn distance(self) -> u32 {
        self.distance
    }

    pub fn value<T: Real>(self) -> T {
        T::one() / (T::one() + T::from_u32(self.distance).expect("distance representable"))
    }
}

impl Taxonomy {
    /// Builds a taxonomy from synset ids and, per synset, its hypernym ids.
    ///
    /// Fails on a parent id that is not itself a synset, or on a cycle.
    pub fn from_hypernyms<I, P>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, P)>,
        P: IntoIterator<Item = String>,
    {
        let entries: Vec<(String, Vec<String>)> = entries
            .into_iter()
            .map(|(id, ps)| (id, ps.into_iter().collect()))
            .collect();
        let mut lookup = HashMap::with_capacity(entries.len());
        let mut ids = Vec::with_capacity(entries.len());
        for (id, _) in &entries {
            if lookup.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::Domain(format!("duplicate synset {id}")));
            }
            ids.push(id.clone());
        }
        let mut parents = vec![Vec::new(); ids.len()];
        let mut children = vec![Vec::new(); ids.len()];
        let mut edge_count = 0;
        for (child, (id, ps)) in entries.iter().enumerate() {
            for p in ps {
                let &parent = lookup.get(p).ok_or_else(|| Error::DanglingParent {
                    child: id.clone(),
                    parent: p.clone(),
                })?;
                if !parents[child].contains(&parent) {
                    parents[child].push(parent);
                    children[parent].push(child);
                    edge_count += 1;
                }
            }
        }
        let roots = (0..ids.len()).filter(|&i| parents[i].is_empty()).collect();
        let t = Self {
            ids,
            lookup,
            parents,
            children,
            roots,
            edge_count,
            sweeps: RwLock::new(HashMap::new()),
        };
        t.check_acyclic()?;
        Ok(t)
    }

    fn check_acyclic(&self) -> Result<()> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let mut mark = vec![Mark::New; self.ids.len()];
        for start in 0..self.ids.len() {
            if mark[start] != Mark::New {
                continue;
            }
            // (node, next parent to visit)
            let mut stack = vec![(start, 0usize)];
            mark[start] = Mark::Active;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if let Some(&p) = self.parents[node].get(*next) {
                    *next += 1;
                    match mark[p] {
                        Mark::Active => return Err(Error::Cycle(self.ids[p].clone())),
                        Mark::New => {
                            mark[p] = Mark::Active;
                            stack.push((p, 0));
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[node] = Mark::Done;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, id: &str) -> bool {
        self.lookup.contains_key(id)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn root_ids(&self) -> Vec<&str> {
        self.roots.iter().map(|&r| self.ids[r].as_str()).collect()
    }

    pub fn hypernyms(&self, id: &str) -> Result<Vec<&str>> {
        let i = self.index_of(id)?;
        Ok(self.parents[i]
            .iter()
            .map(|&p| self.ids[p].as_str())
            .collect())
    }

    fn index_of(&self, id: &str) -> Result<usize> {
        self.lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownSynset(id.to_string()))
    }

    /// Breadth-first distances from `source` to every synset. Cached.
    fn sweep(&self, source: usize) -> Arc<Vec<u32>> {
        if let Some(d) = self
            .sweeps
            .read()
            .expect("sweep cache poisoned")
            .get(&source)
        {
            return Arc::clone(d);
        }
        let n = self.ids.len();
        let virtual_root = n;
        let mut dist = vec![UNREACHED; n + 1];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            let mut visit = |v: usize, queue: &mut VecDeque<usize>| {
                if dist[v] == UNREACHED {
                    dist[v] = next;
                    queue.push_back(v);
                }
            };
            if u == virtual_root {
                for &r in &self.roots {
                    visit(r, &mut queue);
                }
                continue;
            }
            for &p in &self.parents[u] {
                visit(p, &mut queue);
            }
            for &c in &self.children[u] {
                visit(c, &mut queue);
            }
            if self.parents[u].is_empty() {
                visit(virtual_root, &mut queue);
            }
        }
        dist.truncate(n);
        let dist = Arc::new(dist);
        self.sweeps
            .write()
            .expect("sweep cache poisoned")
            .entry(source)
            .or_insert_with(|| Arc::clone(&dist));
        dist
    }

    pub fn shortest_path_distance(&self, a: &str, b: &str) -> Result<u32> {
        let a = self.index_of(a)?;
        let b = self.index_of(b)?;
        Ok(self.sweep(a)[b])
    }

    pub fn path_similarity(&self, a: &str, b: &str) -> Result<PathSimilarity> {
        self.shortest_path_distance(a, b)
            .map(PathSimilarity::from_distance)
    }

    /// Drops cached distance sweeps.
    pub fn clear_cache(&self) {
        self.sweeps.write().expect("sweep cache poisoned").clear();
    }
}

/// Parses a simplified taxonomy: a JSON object mapping each synset id to
/// the list of its hypernym ids.
pub fn parse_taxonomy_json(path: impl AsRef<Path>) -> Result<Taxonomy> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_taxonomy_json_str(&text).map_err(|e| match e {
        Error::Domain(message) => Error::TaxonomyFile {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn parse_taxonomy_json_str(text: &str) -> Result<Taxonomy> {
    let map: BTreeMap<String, Vec<String>> =
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("malformed JSON: {e}")))?;
    Taxonomy::from_hypernyms(map)
}

/// Parses a WordNet 3.x `data.noun` file.
///
/// One synset per data line, id `n` + 8-digit offset. `@` and `@i`
/// pointers become hypernym edges; other pointers are ignored. Lines
/// starting with two spaces are the license header.
pub fn parse_wordnet_noun_db(path: impl AsRef<Path>) -> Result<Taxonomy> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    parse_wordnet_noun_str(&text).map_err(|e| match e {
        Error::Domain(message) => Error::TaxonomyFile {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

struct NounRecord {
    id: String,
    line: usize,
    hypernyms: Vec<String>,
}

pub fn parse_wordnet_noun_str(text: &str) -> Result<Taxonomy> {
    let mut records = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        records.push(parse_noun_line(line, line_no)?);
    }
    if records.is_empty() {
        return Err(Error::Domain("empty taxonomy: no synset records".into()));
    }

    let known: HashMap<&str, usize> = records.iter().map(|r| (r.id.as_str(), r.line)).collect();
    if known.len() != records.len() {
        let mut seen = HashMap::new();
        for r in &records {
            if let Some(first) = seen.insert(r.id.as_str(), r.line) {
                return Err(Error::Domain(format!(
                    "duplicate synset offset {} at line {} (first at line {first})",
                    r.id, r.line
                )));
            }
        }
    }
    for r in &records {
        if r.hypernyms.iter().any(|h| !known.contains_key(h.as_str())) {
            return Err(Error::Domain(format!(
                "unknown hypernym target at line {}",
                r.line
            )));
        }
    }
    Taxonomy::from_hypernyms(records.into_iter().map(|r| (r.id, r.hypernyms)))
}

fn parse_noun_line(line: &str, line_no: usize) -> Result<NounRecord> {
    let malformed =
        |what: &str| Error::Domain(format!("malformed record at line {line_no}: {what}"));
    let data = line.split(" | ").next().unwrap_or(line);
    let mut fields = data.split_ascii_whitespace();
    let mut next = |what: &str| fields.next().ok_or_else(|| malformed(what));

    let offset = next("missing synset offset")?;
    if offset.len() != 8 || !offset.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed("synset offset is not 8 digits"));
    }
    next("missing lex_filenum")?;
    let ss_type = next("missing ss_type")?;
    if ss_type != "n" {
        return Err(malformed("ss_type is not n"));
    }
    let w_cnt = usize::from_str_radix(next("missing w_cnt")?, 16)
        .map_err(|_| malformed("w_cnt is not hexadecimal"))?;
    for _ in 0..w_cnt {
        next("truncated word list")?;
        next("truncated word list")?;
    }
    let p_cnt: usize = next("missing p_cnt")?
        .parse()
        .map_err(|_| malformed("p_cnt is not a number"))?;
    let mut hypernyms = Vec::new();
    for _ in 0..p_cnt {
        let symbol = next("truncated pointer list")?;
        let target = next("truncated pointer list")?;
        let pos = next("truncated pointer list")?;
        next("truncated pointer list")?;
        if target.len() != 8 || !target.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed("pointer offset is not 8 digits"));
        }
        if (symbol == "@" || symbol == "@i") && pos == "n" {
            hypernyms.push(format!("n{target}"));
        }
    }
    Ok(NounRecord {
        id: format!("n{offset}"),
        line: line_no,
        hypernyms,
    })
}

/// Semantic class similarity matrix from pairwise path similarity.
pub fn scsm_from_taxonomy<T: Real>(
    taxonomy: &Taxonomy,
    classes: &[ClassSpec],
) -> Result<ClassSimilarityMatrix<T>> {
    let missing: Vec<String> = classes
        .iter()
        .filter(|c| c.synset_id.is_none())
        .map(|c| format!("{} ({})", c.index, c.name))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingSynsets(missing));
    }
    let nodes = classes
        .iter()
        .map(|c| taxonomy.index_of(c.synset_id.as_deref().expect("checked above")))
        .collect::<Result<Vec<_>>>()?;
    let n = nodes.len();
    let mut m = DenseMatrix::identity(n);
    for i in 0..n {
        let dist = taxonomy.sweep(nodes[i]);
        for j in i + 1..n {
            let v = PathSimilarity::from_distance(dist[nodes[j]]).value::<T>();
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    Ok(ClassSimilarityMatrix::from_trusted(
        CsmKind::Semantic,
        true,
        m,
    ))
}
