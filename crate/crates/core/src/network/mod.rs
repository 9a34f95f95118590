//! Character dialogue networks.
//!
//! A network summarizes who talks to whom: one node per retained character,
//! sized by how many quotations the character speaks, and one directed edge
//! per speaker/addressee pair, weighted by how many quotations flow that
//! way. Only characters grounded in the roster participate; ungrounded
//! surface mentions carry no identity to aggregate. Counts are smoothed
//! with `log1p` by default so a protagonist with hundreds of quotations
//! does not visually drown everyone else.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Stance};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("smoothing input {value} at index {index} is negative")]
    NegativeValue { index: usize, value: f64 },

    #[error("network JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Transformation applied to raw counts before they become display sizes
/// and edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothing {
    None,
    #[default]
    Log1p,
}

impl Smoothing {
    fn apply(self, count: usize) -> f64 {
        match self {
            Smoothing::None => count as f64,
            Smoothing::Log1p => (count as f64).ln_1p(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkOptions {
    /// Number of characters retained, ranked by quotations spoken.
    pub top_k: usize,
    pub smoothing: Smoothing,
}

impl Default for NetworkOptions {
    fn default() -> Self {
        NetworkOptions {
            top_k: 10,
            smoothing: Smoothing::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub label: String,
    pub stance: Stance,
    pub quotations_spoken: usize,
    /// Smoothed `quotations_spoken`, rounded to four decimals.
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub count: usize,
    /// Smoothed `count`, rounded to four decimals.
    pub weight: f64,
}

/// Nodes are sorted by character id, edges by (from, to), so every export
/// of the same corpus is byte-identical.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DialogueNetwork {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

/// Node fill color for a stance.
pub fn stance_color(stance: Stance) -> &'static str {
    match stance {
        Stance::Protagonist => "darksalmon",
        Stance::Villain => "aquamarine",
        Stance::Unknown => "lightgray",
    }
}

/// Apply `log1p` to every value. Negative inputs have no meaningful
/// smoothed counterpart and are rejected.
pub fn smooth(values: &[f64]) -> Result<Vec<f64>, NetworkError> {
    values
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if value >= 0.0 {
                Ok(value.ln_1p())
            } else {
                Err(NetworkError::NegativeValue { index, value })
            }
        })
        .collect()
}

fn round4(value: f64) -> f64 {
    (value * 10_000.0).round() / 10_000.0
}

/// Build the dialogue network over every quotation in the corpus. To chart
/// a single novel, filter the corpus to that novel's records first.
pub fn build_network(corpus: &Corpus, options: &NetworkOptions) -> DialogueNetwork {
    let mut spoken: BTreeMap<&str, usize> = BTreeMap::new();
    let mut eligible: BTreeSet<&str> = BTreeSet::new();
    for record in corpus.quotations() {
        if let Some(id) = record.speaker.character_id.as_deref() {
            eligible.insert(id);
            *spoken.entry(id).or_default() += 1;
        }
        for addressee in &record.addressees {
            if let Some(id) = addressee.character_id.as_deref() {
                eligible.insert(id);
            }
        }
    }

    let mut ranked: Vec<&str> = eligible.into_iter().collect();
    ranked.sort_by(|a, b| {
        let count_a = spoken.get(a).copied().unwrap_or(0);
        let count_b = spoken.get(b).copied().unwrap_or(0);
        count_b.cmp(&count_a).then_with(|| a.cmp(b))
    });
    ranked.truncate(options.top_k);
    let retained: BTreeSet<&str> = ranked.into_iter().collect();

    let mut edge_counts: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for record in corpus.quotations() {
        let Some(from) = record.speaker.character_id.as_deref() else {
            continue;
        };
        if !retained.contains(from) {
            continue;
        }
        // A record naming the same addressee twice contributes one edge.
        let mut seen = BTreeSet::new();
        for addressee in &record.addressees {
            let Some(to) = addressee.character_id.as_deref() else {
                continue;
            };
            if retained.contains(to) && seen.insert(to) {
                *edge_counts.entry((from, to)).or_default() += 1;
            }
        }
    }

    let nodes = retained
        .iter()
        .map(|id| {
            let entity = corpus
                .character(id)
                .expect("speaker and addressee ids are roster-checked");
            let count = spoken.get(id).copied().unwrap_or(0);
            Node {
                id: (*id).to_string(),
                label: entity.canonical_name.clone(),
                stance: entity.stance,
                quotations_spoken: count,
                size: round4(options.smoothing.apply(count)),
            }
        })
        .collect();
    let edges = edge_counts
        .into_iter()
        .map(|((from, to), count)| Edge {
            from: from.to_string(),
            to: to.to_string(),
            count,
            weight: round4(options.smoothing.apply(count)),
        })
        .collect();
    DialogueNetwork { nodes, edges }
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            other => out.push(other),
        }
    }
    out
}

impl DialogueNetwork {
    /// Graphviz DOT, nodes filled with their stance color.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dialogue {\n");
        for node in &self.nodes {
            out.push_str(&format!(
                "    \"{}\" [label=\"{}\", style=filled, fillcolor=\"{}\", width={:.4}];\n",
                node.id,
                node.label.replace('"', "\\\""),
                stance_color(node.stance),
                node.size,
            ));
        }
        for edge in &self.edges {
            out.push_str(&format!(
                "    \"{}\" -> \"{}\" [penwidth={:.4}];\n",
                edge.from, edge.to, edge.weight,
            ));
        }
        out.push_str("}\n");
        out
    }

    /// GraphML with label, stance, color, and size/weight attributes.
    pub fn to_graphml(&self) -> String {
        let mut out = String::from(concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
            "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n",
            "  <key id=\"stance\" for=\"node\" attr.name=\"stance\" attr.type=\"string\"/>\n",
            "  <key id=\"color\" for=\"node\" attr.name=\"color\" attr.type=\"string\"/>\n",
            "  <key id=\"size\" for=\"node\" attr.name=\"size\" attr.type=\"double\"/>\n",
            "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n",
            "  <graph id=\"dialogue\" edgedefault=\"directed\">\n",
        ));
        for node in &self.nodes {
            let stance = match node.stance {
                Stance::Protagonist => "protagonist",
                Stance::Villain => "villain",
                Stance::Unknown => "unknown",
            };
            out.push_str(&format!(
                concat!(
                    "    <node id=\"{id}\">\n",
                    "      <data key=\"label\">{label}</data>\n",
                    "      <data key=\"stance\">{stance}</data>\n",
                    "      <data key=\"color\">{color}</data>\n",
                    "      <data key=\"size\">{size:.4}</data>\n",
                    "    </node>\n",
                ),
                id = xml_escape(&node.id),
                label = xml_escape(&node.label),
                stance = stance,
                color = stance_color(node.stance),
                size = node.size,
            ));
        }
        for edge in &self.edges {
            out.push_str(&format!(
                concat!(
                    "    <edge source=\"{from}\" target=\"{to}\">\n",
                    "      <data key=\"weight\">{weight:.4}</data>\n",
                    "    </edge>\n",
                ),
                from = xml_escape(&edge.from),
                to = xml_escape(&edge.to),
                weight = edge.weight,
            ));
        }
        out.push_str("  </graph>\n</graphml>\n");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, NetworkError> {
        Ok(serde_json::from_str(json)?)
    }
}
