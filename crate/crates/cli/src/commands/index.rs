use std::path::Path;

use divmetric_core::{
    brute_force_knn, brute_force_range, IndexedPoint, MetricSpec, QueryResult, VpTree,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::IndexAction;
use crate::error::{CliError, CliResult};
use crate::input::{read_rows, RowId};
use crate::report::{to_value, Outcome};

pub const INDEX_FORMAT: &str = "divmetric-vptree";
pub const INDEX_SCHEMA_VERSION: u64 = 1;

/// On-disk index: a JSON document embedding the metric and seed.
#[derive(Debug, Serialize, Deserialize)]
struct IndexFile {
    format: String,
    schema_version: u64,
    metric: MetricSpec,
    seed: u64,
    tree: VpTree<RowId>,
}

fn load(path: &Path) -> CliResult<IndexFile> {
    let bad = |message: String| CliError::BadFile {
        path: path.display().to_string(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| bad(format!("not JSON: {e}")))?;
    if raw.get("format").and_then(Value::as_str) != Some(INDEX_FORMAT) {
        return Err(bad(format!("not a {INDEX_FORMAT} file")));
    }
    let found = raw
        .get("schema_version")
        .and_then(Value::as_u64)
        .unwrap_or(0);
    if found != INDEX_SCHEMA_VERSION {
        return Err(CliError::SchemaVersion {
            found,
            expected: INDEX_SCHEMA_VERSION,
        });
    }
    serde_json::from_value(raw).map_err(|e| bad(format!("malformed index: {e}")))
}

pub fn run(action: &IndexAction) -> CliResult<Outcome> {
    match action {
        IndexAction::Build {
            input,
            input_args,
            family,
            s,
            seed,
            index,
        } => {
            let rows = read_rows(input, input_args)?;
            let metric = MetricSpec::new(*family, *s);
            let points: Vec<IndexedPoint<RowId>> = rows
                .into_iter()
                .map(|r| IndexedPoint::new(r.id, r.dist))
                .collect();
            let tree = VpTree::build(points, metric, seed.seed)?;
            let depth = tree.depth();
            let (count, dim) = (tree.len(), tree.dim());
            let file = IndexFile {
                format: INDEX_FORMAT.into(),
                schema_version: INDEX_SCHEMA_VERSION,
                metric,
                seed: seed.seed,
                tree,
            };
            let text = serde_json::to_string(&file).expect("index serializes");
            std::fs::write(index, text).map_err(|source| CliError::Io {
                path: index.clone(),
                source,
            })?;
            Ok(Outcome {
                command: "index build",
                config: json!({
                    "input": input,
                    "input_args": to_value(input_args),
                    "metric": metric,
                    "index": index,
                }),
                seed: Some(seed.seed),
                passed: true,
                results: json!({ "points": count, "dim": dim, "depth": depth }),
                violations: Vec::new(),
            })
        }
        IndexAction::Query {
            index,
            queries,
            input_args,
            k,
            radius,
            metric,
            brute,
        } => {
            let file = load(index)?;
            let built = file.metric;
            let family_ok = metric.family.is_none_or(|f| f == built.family);
            let s_ok = metric.s.is_none_or(|s| s == built.s);
            if !(family_ok && s_ok) {
                let requested = MetricSpec::new(
                    metric.family.unwrap_or(built.family),
                    metric.s.unwrap_or(built.s),
                );
                return Err(CliError::MetricMismatch {
                    index: built.to_string(),
                    requested: requested.to_string(),
                });
            }
            let search = match (k, radius) {
                (Some(k), None) => Search::Knn(*k),
                (None, Some(r)) => Search::Range(*r),
                (None, None) => Search::Knn(10),
                (Some(_), Some(_)) => unreachable!("clap rejects --k with --radius"),
            };
            let rows = read_rows(queries, input_args)?;
            let tree = &file.tree;
            let mut results = Vec::with_capacity(rows.len());
            let mut total_evals = 0u64;
            for row in &rows {
                let res: QueryResult<RowId> = match (search, *brute) {
                    (Search::Knn(k), false) => tree.knn_query(&row.dist, k),
                    (Search::Knn(k), true) => {
                        brute_force_knn(tree.points(), &row.dist, k, tree.metric())
                    }
                    (Search::Range(r), false) => tree.range_query(&row.dist, r),
                    (Search::Range(r), true) => {
                        brute_force_range(tree.points(), &row.dist, r, tree.metric())
                    }
                }
                .map_err(|e| CliError::Row {
                    path: queries.clone(),
                    line: row.line,
                    message: e.to_string(),
                })?;
                total_evals += res.evaluations;
                results.push(json!({
                    "query": row.id,
                    "neighbors": res.neighbors,
                    "evaluations": res.evaluations,
                }));
            }
            let brute_evals = (tree.len() * rows.len()) as u64;
            Ok(Outcome {
                command: "index query",
                config: json!({
                    "index": index,
                    "queries": queries,
                    "input_args": to_value(input_args),
                    "metric": built,
                    "search": to_value(&search),
                    "brute": brute,
                }),
                seed: Some(file.seed),
                passed: true,
                results: json!({
                    "queries": results,
                    "total_evaluations": total_evals,
                    "evaluation_ratio": total_evals as f64 / brute_evals as f64,
                }),
                violations: Vec::new(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
enum Search {
    Knn(usize),
    Range(f64),
}
