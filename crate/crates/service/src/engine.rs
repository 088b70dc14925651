//! Snapshots, reader sessions and the query / refine / collapse loop.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use facetjoint_core::joint::{
    resolve_query, CollapseChoice, CollapseOption, Ontology, RankedResult, ReaderState, Resolution,
    SemanticIndex,
};
use facetjoint_core::label::normalize;
use serde::Serialize;

use crate::error::{Result, ServiceError};
use crate::eval::{compute_stats, precision, recall, EvalStats, LogEntry, LogKind};
use crate::formats::{parse_judgments, query_tags};
use crate::snapshot::{Snapshot, SnapshotInfo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Query,
    Refine,
    Collapse,
}

/// Answer to one reader step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepResponse {
    pub snapshot_id: String,
    pub session_id: String,
    pub step: usize,
    pub kind: StepKind,
    /// `ok` or `collapse_required`.
    pub status: &'static str,
    pub query: String,
    pub tags: Vec<String>,
    pub facet: Option<String>,
    pub results: Vec<RankedResult>,
    pub refinements: Vec<String>,
    /// Options awaiting the reader when a collapse is required.
    pub options: Vec<CollapseOption>,
    /// The decided collapse that shaped these results, if any.
    pub collapse: Option<CollapseChoice>,
    pub subset: Vec<String>,
}

impl StepResponse {
    pub fn is_collapse_required(&self) -> bool {
        self.status == "collapse_required"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub step: usize,
    pub kind: StepKind,
    pub input: String,
    pub status: &'static str,
    pub facet: Option<String>,
    pub results: Vec<String>,
    pub chosen: Option<String>,
}

#[derive(Debug, Clone, Default)]
struct ActiveQuery {
    text: String,
    tags: Vec<String>,
    facet: Option<String>,
    refinements: Vec<String>,
    pending: Option<CollapseChoice>,
    decided: Option<CollapseChoice>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub reader_id: String,
    pub snapshot_id: String,
    pub state: ReaderState,
    pub history: Vec<HistoryEntry>,
    active: Option<ActiveQuery>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionView {
    pub session_id: String,
    pub reader_id: String,
    pub snapshot_id: String,
    pub query: Option<String>,
    pub facet: Option<String>,
    pub pending: Vec<CollapseOption>,
    pub history: Vec<HistoryEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryEval {
    pub query: String,
    pub retrieved: usize,
    pub relevant: usize,
    /// `None` when nothing was retrieved.
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub snapshot_id: String,
    pub queries: Vec<QueryEval>,
    /// Means over the queries where the measure is defined.
    pub macro_precision: Option<f64>,
    pub macro_recall: Option<f64>,
}

/// Facets of the results, best-scoring first.
fn refinements_of(results: &[RankedResult]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    results
        .iter()
        .filter(|r| seen.insert(r.facet.clone()))
        .map(|r| r.facet.clone())
        .collect()
}

fn step(
    index: &SemanticIndex,
    snapshot_id: &str,
    session: &mut Session,
    kind: StepKind,
    input: &str,
) -> Result<StepResponse> {
    let active = session.active.as_mut().ok_or(ServiceError::NoActiveQuery)?;
    let resolution = resolve_query(
        index,
        &active.tags,
        active.facet.as_deref(),
        &mut session.state,
    )?;
    let number = session.history.len() + 1;
    let mut response = StepResponse {
        snapshot_id: snapshot_id.to_owned(),
        session_id: session.id.clone(),
        step: number,
        kind,
        status: "ok",
        query: active.text.clone(),
        tags: active.tags.clone(),
        facet: active.facet.clone(),
        results: Vec::new(),
        refinements: Vec::new(),
        options: Vec::new(),
        collapse: None,
        subset: Vec::new(),
    };
    match resolution {
        Resolution::CollapseRequired(choice) => {
            response.status = "collapse_required";
            response.options = choice.options.clone();
            active.pending = Some(choice);
        }
        Resolution::Ranked {
            results,
            subset,
            choice,
        } => {
            active.pending = None;
            if choice.is_some() {
                active.decided = choice.clone();
            }
            if active.facet.is_none() {
                active.refinements = refinements_of(&results);
            }
            response.results = results;
            response.subset = subset;
            response.collapse = choice;
        }
    }
    response.refinements = active.refinements.clone();
    session.history.push(HistoryEntry {
        step: number,
        kind,
        input: input.to_owned(),
        status: response.status,
        facet: response.facet.clone(),
        results: response
            .results
            .iter()
            .map(|r| r.contribution_id.clone())
            .collect(),
        chosen: response.collapse.as_ref().and_then(|c| c.chosen.clone()),
    });
    Ok(response)
}

/// Resolves a query with no reader in the loop: a collapse takes `choose`
/// or, failing that, the top option.
pub fn resolve_headless(
    index: &SemanticIndex,
    tags: &[String],
    facet: Option<&str>,
    state: &mut ReaderState,
    choose: Option<&str>,
) -> Result<Vec<RankedResult>> {
    match resolve_query(index, tags, facet, state)? {
        Resolution::Ranked { results, .. } => Ok(results),
        Resolution::CollapseRequired(choice) => {
            state.decide(&choice, choose.unwrap_or("auto"))?;
            match resolve_query(index, tags, facet, state)? {
                Resolution::Ranked { results, .. } => Ok(results),
                Resolution::CollapseRequired(_) => {
                    unreachable!("a recorded decision resolves the choice")
                }
            }
        }
    }
}

pub struct Engine {
    ontology: Arc<Ontology>,
    snapshots: BTreeMap<String, Arc<Snapshot>>,
    current: Option<String>,
    sessions: BTreeMap<String, Session>,
    next_session: u64,
    log: Vec<LogEntry>,
    log_path: Option<PathBuf>,
}

impl Engine {
    pub fn new(ontology: Arc<Ontology>) -> Self {
        Self {
            ontology,
            snapshots: BTreeMap::new(),
            current: None,
            sessions: BTreeMap::new(),
            next_session: 1,
            log: Vec::new(),
            log_path: None,
        }
    }

    /// Also append every log entry to this JSONL file.
    pub fn with_log_file(mut self, path: PathBuf) -> Self {
        self.log_path = Some(path);
        self
    }

    pub fn ontology(&self) -> &Arc<Ontology> {
        &self.ontology
    }

    pub fn build_snapshot(&self, text: &str) -> Result<Snapshot> {
        Snapshot::from_text(text, self.ontology.clone())
    }

    /// Publishes a snapshot and makes it current; older ones stay available.
    pub fn publish(&mut self, snapshot: Snapshot) -> SnapshotInfo {
        let info = snapshot.info();
        self.current = Some(snapshot.id.clone());
        self.snapshots
            .entry(snapshot.id.clone())
            .or_insert_with(|| Arc::new(snapshot));
        info
    }

    pub fn ingest_text(&mut self, text: &str) -> Result<SnapshotInfo> {
        let snapshot = self.build_snapshot(text)?;
        Ok(self.publish(snapshot))
    }

    pub fn current_snapshot(&self) -> Result<Arc<Snapshot>> {
        let id = self.current.as_ref().ok_or(ServiceError::NoSnapshot)?;
        Ok(self.snapshots[id].clone())
    }

    pub fn snapshot(&self, id: &str) -> Result<Arc<Snapshot>> {
        self.snapshots
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSnapshot(id.to_owned()))
    }

    /// Drops a non-current snapshot once no session needs it.
    pub fn release(&mut self, id: &str) -> bool {
        let in_use = self.current.as_deref() == Some(id)
            || self.sessions.values().any(|s| s.snapshot_id == id);
        !in_use && self.snapshots.remove(id).is_some()
    }

    pub fn create_session(
        &mut self,
        reader_id: &str,
        snapshot_id: Option<&str>,
    ) -> Result<SessionView> {
        let snapshot = match snapshot_id {
            Some(id) => self.snapshot(id)?,
            None => self.current_snapshot()?,
        };
        let id = format!("s{}", self.next_session);
        self.next_session += 1;
        let session = Session {
            id: id.clone(),
            reader_id: normalize(reader_id),
            snapshot_id: snapshot.id.clone(),
            state: ReaderState::default(),
            history: Vec::new(),
            active: None,
        };
        self.sessions.insert(id.clone(), session);
        self.session_view(&id)
    }

    pub fn session_view(&self, id: &str) -> Result<SessionView> {
        let s = self
            .sessions
            .get(id)
            .ok_or_else(|| ServiceError::UnknownSession(id.to_owned()))?;
        Ok(SessionView {
            session_id: s.id.clone(),
            reader_id: s.reader_id.clone(),
            snapshot_id: s.snapshot_id.clone(),
            query: s.active.as_ref().map(|a| a.text.clone()),
            facet: s.active.as_ref().and_then(|a| a.facet.clone()),
            pending: s
                .active
                .as_ref()
                .and_then(|a| a.pending.as_ref())
                .map(|c| c.options.clone())
                .unwrap_or_default(),
            history: s.history.clone(),
        })
    }

    fn session_and_index(&mut self, id: &str) -> Result<(&mut Session, Arc<Snapshot>)> {
        let session = self
            .sessions
            .get_mut(id)
            .ok_or_else(|| ServiceError::UnknownSession(id.to_owned()))?;
        let snapshot = self
            .snapshots
            .get(&session.snapshot_id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSnapshot(session.snapshot_id.clone()))?;
        Ok((session, snapshot))
    }

    pub fn query(&mut self, session_id: &str, text: &str) -> Result<StepResponse> {
        let (session, snapshot) = self.session_and_index(session_id)?;
        session.active = Some(ActiveQuery {
            text: text.to_owned(),
            tags: query_tags(text),
            ..ActiveQuery::default()
        });
        let response = step(
            &snapshot.index,
            &snapshot.id,
            session,
            StepKind::Query,
            text,
        )?;
        self.record(session_id, LogKind::Query, text, &response)?;
        Ok(response)
    }

    pub fn refine(&mut self, session_id: &str, facet: &str) -> Result<StepResponse> {
        let (session, snapshot) = self.session_and_index(session_id)?;
        let active = session.active.as_mut().ok_or(ServiceError::NoActiveQuery)?;
        let facet = normalize(facet);
        if !active.refinements.contains(&facet) {
            return Err(ServiceError::UnknownFacet(facet));
        }
        active.facet = Some(facet.clone());
        let response = step(
            &snapshot.index,
            &snapshot.id,
            session,
            StepKind::Refine,
            &facet,
        )?;
        self.record(session_id, LogKind::Refine, &facet, &response)?;
        Ok(response)
    }

    /// Applies the reader's choice to the pending collapse, or replaces an
    /// earlier decision for the active query.
    pub fn collapse(&mut self, session_id: &str, option: &str) -> Result<StepResponse> {
        let (session, snapshot) = self.session_and_index(session_id)?;
        let active = session
            .active
            .as_ref()
            .ok_or(ServiceError::NoPendingChoice)?;
        let choice = active
            .pending
            .clone()
            .or_else(|| active.decided.clone())
            .ok_or(ServiceError::NoPendingChoice)?;
        session.state.decide(&choice, option)?;
        let response = step(
            &snapshot.index,
            &snapshot.id,
            session,
            StepKind::Collapse,
            option,
        )?;
        self.record(session_id, LogKind::Collapse, option, &response)?;
        Ok(response)
    }

    fn record(
        &mut self,
        session_id: &str,
        kind: LogKind,
        input: &str,
        response: &StepResponse,
    ) -> Result<()> {
        let reader_id = self.sessions[session_id].reader_id.clone();
        let entry = LogEntry {
            kind,
            reader_id,
            session_id: session_id.to_owned(),
            snapshot_id: response.snapshot_id.clone(),
            input: input.to_owned(),
            tags: response.tags.clone(),
            status: response.status.to_owned(),
            top_facet: response.results.first().map(|r| r.facet.clone()),
            visited: response
                .results
                .iter()
                .map(|r| r.contribution_id.clone())
                .collect(),
        };
        if let Some(path) = &self.log_path {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(f, "{}", serde_json::to_string(&entry)?)?;
        }
        self.log.push(entry);
        Ok(())
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn stats(&self) -> Result<EvalStats> {
        let nodes = self
            .current_snapshot()
            .ok()
            .map(|s| s.mean_nodes_per_context());
        compute_stats(&self.log, nodes)
    }

    pub fn evaluate(&self, judgments_text: &str) -> Result<EvalReport> {
        evaluate(&*self.current_snapshot()?, judgments_text)
    }
}

/// Precision and recall of headless runs against a judgments file.
pub fn evaluate(snapshot: &Snapshot, judgments_text: &str) -> Result<EvalReport> {
    let judgments = parse_judgments(judgments_text)?;
    let mut queries = Vec::with_capacity(judgments.len());
    for j in judgments {
        let mut state = ReaderState::default();
        let results = resolve_headless(
            &snapshot.index,
            &query_tags(&j.query),
            None,
            &mut state,
            None,
        )?;
        let retrieved: BTreeSet<String> = results.into_iter().map(|r| r.contribution_id).collect();
        queries.push(QueryEval {
            query: j.query,
            retrieved: retrieved.len(),
            relevant: j.relevant.len(),
            precision: precision(&retrieved, &j.relevant).ok(),
            recall: recall(&retrieved, &j.relevant).ok(),
        });
    }
    let mean = |xs: Vec<f64>| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    Ok(EvalReport {
        snapshot_id: snapshot.id.clone(),
        macro_precision: mean(queries.iter().filter_map(|q| q.precision).collect()),
        macro_recall: mean(queries.iter().filter_map(|q| q.recall).collect()),
        queries,
    })
}

/// One line of a replay script.
#[derive(Debug, Clone, PartialEq)]
pub enum ScriptStep {
    Query(String),
    Refine(String),
    Collapse(String),
}

/// Parses `query <text>`, `refine <facet>` and `collapse <option>` lines.
pub fn parse_script(text: &str) -> Result<Vec<ScriptStep>> {
    let mut steps = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (verb, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim().to_owned();
        steps.push(match verb {
            "query" => ScriptStep::Query(rest),
            "refine" => ScriptStep::Refine(rest),
            "collapse" => ScriptStep::Collapse(rest),
            other => {
                return Err(ServiceError::Parse {
                    line: i + 1,
                    message: format!("unknown step `{other}`"),
                })
            }
        });
    }
    Ok(steps)
}

impl Engine {
    pub fn run_step(&mut self, session_id: &str, s: &ScriptStep) -> Result<StepResponse> {
        match s {
            ScriptStep::Query(text) => self.query(session_id, text),
            ScriptStep::Refine(facet) => self.refine(session_id, facet),
            ScriptStep::Collapse(option) => self.collapse(session_id, option),
        }
    }
}
