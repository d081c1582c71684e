//! Game-tree data model, validation, and the indexed view used by every
//! analysis routine.
//!
//! [`GameTree`] is the raw tree exactly as read from a document; it may be
//! malformed (chance rows that do not sum to one, imperfect recall, ...).
//! [`GameTree::validate`] reports every problem as data. [`Game`] wraps a tree
//! that validated cleanly and precomputes sequences, terminal indices and the
//! infoset forest of each player.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type NodeId = usize;
pub type InfosetId = usize;
/// Index of a sequence within one player's sequence table; `0` is the empty sequence.
pub type SeqId = usize;
/// Index into [`Game::terminals`].
pub type TerminalId = usize;

pub const EMPTY_SEQ: SeqId = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub label: String,
    pub child: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Chance { actions: Vec<Edge>, probs: Vec<Rational> },
    Decision { player: usize, infoset: String, actions: Vec<Edge> },
    Terminal { payoffs: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub parent: Option<NodeId>,
    pub kind: NodeKind,
}

impl Node {
    pub fn edges(&self) -> &[Edge] {
        match &self.kind {
            NodeKind::Chance { actions, .. } | NodeKind::Decision { actions, .. } => actions,
            NodeKind::Terminal { .. } => &[],
        }
    }
}

/// A finite game tree stored as an arena in preorder; `nodes[0]` is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTree {
    pub players: Vec<String>,
    pub nodes: Vec<Node>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    PerfectRecall,
    ChanceSum,
    InfosetActionMismatch,
    TreeShape,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport { ok: violations.is_empty(), violations }
    }
}

impl GameTree {
    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    /// Action labels from the root to `node`, e.g. `(¬U,X1)`.
    pub fn path_label(&self, node: NodeId) -> String {
        let mut labels = Vec::new();
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            let e = self.nodes[p].edges().iter().find(|e| e.child == cur);
            labels.push(e.map(|e| e.label.as_str()).unwrap_or("?"));
            cur = p;
        }
        labels.reverse();
        format!("({})", labels.join(","))
    }

    /// Own (infoset, action) history of `player` on the path to `node`,
    /// excluding the infoset at `node` itself.
    fn own_history(&self, node: NodeId, player: usize) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            if let NodeKind::Decision { player: q, infoset, actions } = &self.nodes[p].kind {
                if *q == player {
                    if let Some(e) = actions.iter().find(|e| e.child == cur) {
                        out.push((infoset.clone(), e.label.clone()));
                    }
                }
            }
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let n = self.num_players();
        let shape = |loc: String, msg: String| Violation {
            kind: ViolationKind::TreeShape,
            location: loc,
            message: msg,
        };
        if n == 0 {
            v.push(shape("players".into(), "at least one player is required".into()));
        }
        if self.nodes.is_empty() {
            v.push(shape("root".into(), "empty tree".into()));
            return ValidationReport::from_violations(v);
        }
        if self.nodes[0].parent.is_some() {
            v.push(shape("root".into(), "root has a parent".into()));
        }
        // Parent/child consistency: each non-root node is the child of exactly its parent.
        let mut seen_as_child = vec![0usize; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            for e in node.edges() {
                if e.child >= self.nodes.len() {
                    v.push(shape(self.path_label(id), format!("dangling child {}", e.child)));
                    continue;
                }
                seen_as_child[e.child] += 1;
                if self.nodes[e.child].parent != Some(id) {
                    v.push(shape(self.path_label(id), "child/parent link mismatch".into()));
                }
            }
        }
        for (id, count) in seen_as_child.iter().enumerate().skip(1) {
            if *count != 1 {
                v.push(shape(format!("node {id}"), format!("node has {count} parents")));
            }
        }
        if !v.is_empty() {
            return ValidationReport::from_violations(v);
        }

        let mut infoset_first: HashMap<&str, NodeId> = HashMap::new();
        let mut infoset_order: Vec<&str> = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            let loc = self.path_label(id);
            match &node.kind {
                NodeKind::Terminal { payoffs } => {
                    if payoffs.len() != n {
                        v.push(shape(loc, format!("{} payoffs for {} players", payoffs.len(), n)));
                    }
                }
                NodeKind::Chance { actions, probs } => {
                    if actions.is_empty() {
                        v.push(shape(loc.clone(), "chance node without actions".into()));
                    }
                    if probs.len() != actions.len() {
                        v.push(shape(loc.clone(), "probability count differs from action count".into()));
                    }
                    check_unique_labels(actions, &loc, &mut v);
                    let total: Rational = probs.iter().sum();
                    if probs.iter().any(|p| p.is_negative()) || !total.is_one() {
                        v.push(Violation {
                            kind: ViolationKind::ChanceSum,
                            location: loc,
                            message: format!("chance probabilities sum to {total}"),
                        });
                    }
                }
                NodeKind::Decision { player, infoset, actions } => {
                    if *player >= n {
                        v.push(shape(loc.clone(), format!("player index {player} out of range")));
                    }
                    if actions.is_empty() {
                        v.push(shape(loc.clone(), "decision node without actions".into()));
                    }
                    check_unique_labels(actions, &loc, &mut v);
                    match infoset_first.get(infoset.as_str()) {
                        None => {
                            infoset_first.insert(infoset, id);
                            infoset_order.push(infoset);
                        }
                        Some(&first) => {
                            let NodeKind::Decision { player: p0, actions: a0, .. } = &self.nodes[first].kind else {
                                unreachable!()
                            };
                            if p0 != player {
                                v.push(shape(
                                    loc.clone(),
                                    format!("infoset {infoset:?} is shared by players {p0} and {player}"),
                                ));
                            }
                            let l0: Vec<&str> = a0.iter().map(|e| e.label.as_str()).collect();
                            let l1: Vec<&str> = actions.iter().map(|e| e.label.as_str()).collect();
                            if l0 != l1 {
                                v.push(Violation {
                                    kind: ViolationKind::InfosetActionMismatch,
                                    location: loc.clone(),
                                    message: format!(
                                        "infoset {infoset:?} has actions {l0:?} at {} but {l1:?} here",
                                        self.path_label(first)
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }

        // Perfect recall: every member of an infoset shares the owner's own history.
        for name in infoset_order {
            let first = infoset_first[name];
            let NodeKind::Decision { player, .. } = &self.nodes[first].kind else { unreachable!() };
            let reference = self.own_history(first, *player);
            for (id, node) in self.nodes.iter().enumerate().skip(first + 1) {
                if let NodeKind::Decision { infoset, player: q, .. } = &node.kind {
                    if infoset == name && q == player {
                        let h = self.own_history(id, *player);
                        if h != reference {
                            v.push(Violation {
                                kind: ViolationKind::PerfectRecall,
                                location: self.path_label(id),
                                message: format!(
                                    "infoset {name:?}: own history {} differs from {}",
                                    fmt_history(&h),
                                    fmt_history(&reference)
                                ),
                            });
                        }
                    }
                }
            }
        }
        ValidationReport::from_violations(v)
    }
}

fn fmt_history(h: &[(String, String)]) -> String {
    let parts: Vec<String> = h.iter().map(|(i, a)| format!("{i}:{a}")).collect();
    format!("[{}]", parts.join(", "))
}

fn check_unique_labels(actions: &[Edge], loc: &str, v: &mut Vec<Violation>) {
    for (k, e) in actions.iter().enumerate() {
        if actions[..k].iter().any(|f| f.label == e.label) {
            v.push(Violation {
                kind: ViolationKind::TreeShape,
                location: loc.to_string(),
                message: format!("duplicate action label {:?}", e.label),
            });
        }
    }
}

/// A player's information set in a validated game.
#[derive(Clone, Debug)]
pub struct Infoset {
    pub name: String,
    pub player: usize,
    pub actions: Vec<String>,
    pub nodes: Vec<NodeId>,
    /// Position among the owner's infosets (document order).
    pub local: usize,
    /// The owner's sequence leading to this infoset.
    pub parent_seq: SeqId,
    /// Sequence id of `(this, action 0)`; action `a` is `seq_offset + a`.
    pub seq_offset: SeqId,
    /// Action indices sorted by label bytes; `lex[0]` is the lexicographically first action.
    pub lex: Vec<usize>,
    /// Terminals below some member node.
    pub terminals: Vec<TerminalId>,
}

impl Infoset {
    pub fn seq(&self, action: usize) -> SeqId {
        self.seq_offset + action
    }

    pub fn first_action(&self) -> usize {
        self.lex[0]
    }

    pub fn action_index(&self, label: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == label)
    }
}

/// One player's sequences: `∅` plus one per (infoset, action).
#[derive(Clone, Debug, Default)]
pub struct SequenceTable {
    /// `None` for `∅`.
    pub last: Vec<Option<(InfosetId, usize)>>,
    /// Parent sequence (the sequence leading to the infoset of this one).
    pub parent: Vec<Option<SeqId>>,
    pub depth: Vec<usize>,
    /// Infosets whose parent sequence is this one.
    pub child_infosets: Vec<Vec<InfosetId>>,
    /// Terminals whose last own sequence is this one.
    pub terminals: Vec<Vec<TerminalId>>,
}

impl SequenceTable {
    pub fn len(&self) -> usize {
        self.last.len()
    }

    pub fn is_empty(&self) -> bool {
        self.last.is_empty()
    }
}

/// A player's sequence, identified by its last (infoset, action) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    pub player: usize,
    pub id: SeqId,
}

/// A validated, indexed game.
#[derive(Clone, Debug)]
pub struct Game {
    tree: GameTree,
    infosets: Vec<Infoset>,
    player_infosets: Vec<Vec<InfosetId>>,
    node_infoset: Vec<Option<InfosetId>>,
    terminals: Vec<NodeId>,
    terminal_of_node: Vec<Option<TerminalId>>,
    terminal_labels: Vec<String>,
    chance_reach: Vec<Rational>,
    terminal_seq: Vec<Vec<SeqId>>,
    seqs: Vec<SequenceTable>,
    node_depth: Vec<usize>,
}

impl Game {
    /// Index a tree, refusing trees with any validation violation.
    pub fn new(tree: GameTree) -> Result<Game> {
        let report = tree.validate();
        if !report.ok {
            let msgs: Vec<String> = report
                .violations
                .iter()
                .map(|v| format!("{} at {}", v.message, v.location))
                .collect();
            return Err(Error::InvalidGame(msgs.join("; ")));
        }
        let n = tree.num_players();
        let mut infosets: Vec<Infoset> = Vec::new();
        let mut by_name: HashMap<String, InfosetId> = HashMap::new();
        let mut player_infosets = vec![Vec::new(); n];
        let mut node_infoset = vec![None; tree.nodes.len()];
        let mut seqs: Vec<SequenceTable> = (0..n)
            .map(|_| SequenceTable {
                last: vec![None],
                parent: vec![None],
                depth: vec![0],
                child_infosets: vec![Vec::new()],
                terminals: vec![Vec::new()],
            })
            .collect();

        // Preorder traversal carrying each player's current sequence.
        let mut terminals = Vec::new();
        let mut terminal_of_node = vec![None; tree.nodes.len()];
        let mut chance_reach = Vec::new();
        let mut terminal_seq = Vec::new();
        let mut node_depth = vec![0; tree.nodes.len()];
        let mut stack: Vec<(NodeId, Vec<SeqId>, Rational, usize)> =
            vec![(0, vec![EMPTY_SEQ; n], Rational::one(), 0)];
        while let Some((id, cur, reach, depth)) = stack.pop() {
            node_depth[id] = depth;
            match &tree.nodes[id].kind {
                NodeKind::Terminal { .. } => {
                    let z = terminals.len();
                    terminals.push(id);
                    terminal_of_node[id] = Some(z);
                    chance_reach.push(reach);
                    for (p, s) in cur.iter().enumerate() {
                        seqs[p].terminals[*s].push(z);
                    }
                    terminal_seq.push(cur);
                }
                NodeKind::Chance { actions, probs } => {
                    for (e, pr) in actions.iter().zip(probs).rev() {
                        stack.push((e.child, cur.clone(), &reach * pr, depth + 1));
                    }
                }
                NodeKind::Decision { player, infoset, actions } => {
                    let iid = match by_name.get(infoset) {
                        Some(&iid) => iid,
                        None => {
                            let iid = infosets.len();
                            let table = &mut seqs[*player];
                            let offset = table.len();
                            let parent_seq = cur[*player];
                            for a in 0..actions.len() {
                                table.last.push(Some((iid, a)));
                                table.parent.push(Some(parent_seq));
                                table.depth.push(table.depth[parent_seq] + 1);
                                table.child_infosets.push(Vec::new());
                                table.terminals.push(Vec::new());
                            }
                            table.child_infosets[parent_seq].push(iid);
                            let labels: Vec<String> = actions.iter().map(|e| e.label.clone()).collect();
                            let mut lex: Vec<usize> = (0..labels.len()).collect();
                            lex.sort_by(|&a, &b| labels[a].as_bytes().cmp(labels[b].as_bytes()));
                            infosets.push(Infoset {
                                name: infoset.clone(),
                                player: *player,
                                actions: labels,
                                nodes: Vec::new(),
                                local: player_infosets[*player].len(),
                                parent_seq,
                                seq_offset: offset,
                                lex,
                                terminals: Vec::new(),
                            });
                            player_infosets[*player].push(iid);
                            by_name.insert(infoset.clone(), iid);
                            iid
                        }
                    };
                    infosets[iid].nodes.push(id);
                    node_infoset[id] = Some(iid);
                    let offset = infosets[iid].seq_offset;
                    for (a, e) in actions.iter().enumerate().rev() {
                        let mut next = cur.clone();
                        next[*player] = offset + a;
                        stack.push((e.child, next, reach.clone(), depth + 1));
                    }
                }
            }
        }

        let mut game = Game {
            terminal_labels: terminals.iter().map(|&t| tree.path_label(t)).collect(),
            tree,
            infosets,
            player_infosets,
            node_infoset,
            terminals,
            terminal_of_node,
            chance_reach,
            terminal_seq,
            seqs,
            node_depth,
        };
        for iid in 0..game.infosets.len() {
            let mut below = Vec::new();
            for &h in &game.infosets[iid].nodes {
                game.collect_terminals(h, &mut below);
            }
            below.sort_unstable();
            game.infosets[iid].terminals = below;
        }
        Ok(game)
    }

    fn collect_terminals(&self, node: NodeId, out: &mut Vec<TerminalId>) {
        let mut stack = vec![node];
        while let Some(h) = stack.pop() {
            if let Some(z) = self.terminal_of_node[h] {
                out.push(z);
            }
            for e in self.tree.nodes[h].edges() {
                stack.push(e.child);
            }
        }
    }

    pub fn tree(&self) -> &GameTree {
        &self.tree
    }

    pub fn num_players(&self) -> usize {
        self.tree.num_players()
    }

    pub fn player_name(&self, p: usize) -> &str {
        &self.tree.players[p]
    }

    pub fn check_player(&self, p: usize) -> Result<()> {
        if p < self.num_players() {
            Ok(())
        } else {
            Err(Error::UnknownPlayer(p))
        }
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id]
    }

    pub fn infoset_by_name(&self, name: &str) -> Option<InfosetId> {
        self.infosets.iter().position(|i| i.name == name)
    }

    /// The player's infosets in document order (parents before children).
    pub fn player_infosets(&self, p: usize) -> &[InfosetId] {
        &self.player_infosets[p]
    }

    pub fn node_infoset(&self, node: NodeId) -> Option<InfosetId> {
        self.node_infoset[node]
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn num_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn terminal_of_node(&self, node: NodeId) -> Option<TerminalId> {
        self.terminal_of_node[node]
    }

    pub fn terminal_label(&self, z: TerminalId) -> &str {
        &self.terminal_labels[z]
    }

    pub fn terminal_by_label(&self, label: &str) -> Option<TerminalId> {
        self.terminal_labels.iter().position(|l| l == label)
    }

    pub fn payoff(&self, z: TerminalId, p: usize) -> &Rational {
        match &self.tree.nodes[self.terminals[z]].kind {
            NodeKind::Terminal { payoffs } => &payoffs[p],
            _ => unreachable!("terminal index points at a non-terminal"),
        }
    }

    /// Product of chance probabilities on the root→z path.
    pub fn chance_reach(&self, z: TerminalId) -> &Rational {
        &self.chance_reach[z]
    }

    /// Last sequence of player `p` on the path to terminal `z`.
    pub fn terminal_seq(&self, z: TerminalId, p: usize) -> SeqId {
        self.terminal_seq[z][p]
    }

    pub fn seq_table(&self, p: usize) -> &SequenceTable {
        &self.seqs[p]
    }

    pub fn num_sequences(&self, p: usize) -> usize {
        self.seqs[p].len()
    }

    /// The player's sequences, `∅` first.
    pub fn sequences(&self, p: usize) -> Result<Vec<Sequence>> {
        self.check_player(p)?;
        Ok((0..self.seqs[p].len()).map(|id| Sequence { player: p, id }).collect())
    }

    /// `a ⪯ b` for two sequences of the same player.
    pub fn seq_precedes(&self, p: usize, a: SeqId, b: SeqId) -> bool {
        let t = &self.seqs[p];
        let mut cur = b;
        while t.depth[cur] > t.depth[a] {
            cur = t.parent[cur].expect("non-root sequence has a parent");
        }
        cur == a
    }

    /// `I ⪯ J` for two infosets of the same player: some member of `J`
    /// descends from some member of `I` (reflexive).
    pub fn infoset_precedes(&self, i: InfosetId, j: InfosetId) -> bool {
        let (a, b) = (&self.infosets[i], &self.infosets[j]);
        if a.player != b.player {
            return false;
        }
        if i == j {
            return true;
        }
        let p = a.player;
        let pj = b.parent_seq;
        pj != EMPTY_SEQ
            && (a.seq_offset..a.seq_offset + a.actions.len()).any(|s| self.seq_precedes(p, s, pj))
    }

    /// `Ia ⪯ J`: infoset `J` lies below sequence `s`.
    pub fn seq_precedes_infoset(&self, p: usize, s: SeqId, j: InfosetId) -> bool {
        self.infosets[j].player == p && self.seq_precedes(p, s, self.infosets[j].parent_seq)
    }

    /// `h ⪯ k` on nodes (ancestor-or-self).
    pub fn node_precedes(&self, h: NodeId, k: NodeId) -> bool {
        let mut cur = k;
        while self.node_depth[cur] > self.node_depth[h] {
            cur = self.tree.nodes[cur].parent.expect("non-root node has a parent");
        }
        cur == h
    }

    pub fn seq_infoset_action(&self, p: usize, s: SeqId) -> Option<(InfosetId, usize)> {
        self.seqs[p].last[s]
    }

    /// The chain of (infoset, action) pairs from the root down to `s`.
    pub fn seq_path(&self, p: usize, s: SeqId) -> Vec<(InfosetId, usize)> {
        let mut out = Vec::new();
        let mut cur = s;
        while let Some((iid, a)) = self.seqs[p].last[cur] {
            out.push((iid, a));
            cur = self.infosets[iid].parent_seq;
        }
        out.reverse();
        out
    }

    /// Own infosets `J ⪯ I` along the path to `I`, root-most first, ending with `I`.
    pub fn infoset_chain(&self, i: InfosetId) -> Vec<InfosetId> {
        let p = self.infosets[i].player;
        let mut chain: Vec<InfosetId> =
            self.seq_path(p, self.infosets[i].parent_seq).into_iter().map(|(j, _)| j).collect();
        chain.push(i);
        chain
    }

    /// `"I:a"` rendering of a sequence, `"∅"` for the empty one.
    pub fn seq_name(&self, p: usize, s: SeqId) -> String {
        match self.seqs[p].last[s] {
            None => "∅".to_string(),
            Some((iid, a)) => format!("{}:{}", self.infosets[iid].name, self.infosets[iid].actions[a]),
        }
    }

    /// Parse `"I:a"` (or `"∅"` / empty) into a sequence of player `p`.
    pub fn parse_seq(&self, p: usize, text: &str) -> Result<SeqId> {
        self.check_player(p)?;
        let t = text.trim();
        if t.is_empty() || t == "∅" || t == "empty" {
            return Ok(EMPTY_SEQ);
        }
        let (iname, label) = t
            .rsplit_once(':')
            .ok_or_else(|| Error::Semantic(format!("sequence {t:?} is not of the form infoset:action")))?;
        let iid = self
            .infoset_by_name(iname)
            .ok_or_else(|| Error::Semantic(format!("unknown infoset {iname:?}")))?;
        let info = &self.infosets[iid];
        if info.player != p {
            return Err(Error::Semantic(format!("infoset {iname:?} belongs to player {}", info.player)));
        }
        let a = info
            .action_index(label)
            .ok_or_else(|| Error::Semantic(format!("infoset {iname:?} has no action {label:?}")))?;
        Ok(info.seq(a))
    }

    pub fn num_nodes(&self) -> usize {
        self.tree.nodes.len()
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} players, {} nodes, {} terminals, {} infosets",
            self.num_players(),
            self.num_nodes(),
            self.num_terminals(),
            self.infosets.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::format::parse_game;
    use crate::rational::q;

    fn seq_names(g: &Game, p: usize) -> Vec<String> {
        g.sequences(p).unwrap().iter().map(|s| g.seq_name(p, s.id)).collect()
    }

    #[test]
    fn lrr_sequences_and_order() {
        let g = fixtures::lrr();
        assert_eq!(seq_names(&g, 0), ["∅", "R0:L", "R0:R", "B:L'", "B:R'"]);
        let r = g.parse_seq(0, "R0:R").unwrap();
        let bl = g.parse_seq(0, "B:L'").unwrap();
        let l = g.parse_seq(0, "R0:L").unwrap();
        assert!(g.seq_precedes(0, r, bl));
        assert!(!g.seq_precedes(0, l, bl));
        assert!(!g.seq_precedes(0, bl, r));
        for s in 0..g.num_sequences(0) {
            assert!(g.seq_precedes(0, EMPTY_SEQ, s));
        }
        assert!(matches!(g.parse_seq(3, "R0:L"), Err(Error::UnknownPlayer(3))));
    }

    #[test]
    fn ebos_player_two_has_one_infoset() {
        let g = fixtures::ebos();
        assert_eq!(seq_names(&g, 1), ["∅", "I2:X2", "I2:Y2"]);
        assert_eq!(g.player_infosets(0).len(), 3);
        assert_eq!(g.num_terminals(), 8);
    }

    #[test]
    fn precedence_is_a_partial_order() {
        for g in [fixtures::ebos(), fixtures::lrr(), fixtures::surj()] {
            for p in 0..g.num_players() {
                let n = g.num_sequences(p);
                for a in 0..n {
                    assert!(g.seq_precedes(p, a, a));
                    for b in 0..n {
                        if a != b && g.seq_precedes(p, a, b) {
                            assert!(!g.seq_precedes(p, b, a));
                        }
                        for c in 0..n {
                            if g.seq_precedes(p, a, b) && g.seq_precedes(p, b, c) {
                                assert!(g.seq_precedes(p, a, c));
                            }
                        }
                    }
                }
            }
            for i in 0..g.infosets().len() {
                for j in 0..g.infosets().len() {
                    if i != j && g.infoset_precedes(i, j) {
                        assert!(!g.infoset_precedes(j, i));
                    }
                }
            }
        }
    }

    #[test]
    fn chance_reach_values() {
        let g = fixtures::surj();
        let mp = g
            .terminals()
            .iter()
            .enumerate()
            .filter(|(z, _)| g.terminal_label(*z).starts_with("(MP,"))
            .map(|(z, _)| z)
            .collect::<Vec<_>>();
        assert_eq!(mp.len(), 4);
        for z in mp {
            assert_eq!(g.chance_reach(z), &q("1/2"));
        }
        let lrr = fixtures::lrr();
        let zl = lrr.terminal_by_label("(L)").unwrap();
        assert_eq!(lrr.chance_reach(zl), &q("1"));

        let stacked = parse_game(
            r#"{"players":["A"],"root":{"kind":"chance","actions":[
                {"label":"h","prob":"1/2","child":{"kind":"chance","actions":[
                    {"label":"h","prob":"1/2","child":{"kind":"terminal","payoffs":["1"]}},
                    {"label":"t","prob":"1/2","child":{"kind":"terminal","payoffs":["0"]}}]}},
                {"label":"t","prob":"1/2","child":{"kind":"terminal","payoffs":["0"]}}]}}"#,
        )
        .unwrap();
        let g = Game::new(stacked).unwrap();
        let deep = g.terminal_by_label("(h,h)").unwrap();
        assert_eq!(g.chance_reach(deep), &q("1/4"));
    }

    #[test]
    fn validate_reports_violations() {
        assert!(fixtures::ebos().tree().validate().ok);

        let bad_sum = parse_game(
            r#"{"players":["A"],"root":{"kind":"chance","actions":[
                {"label":"h","prob":"1/2","child":{"kind":"terminal","payoffs":["1"]}},
                {"label":"t","prob":"1/3","child":{"kind":"terminal","payoffs":["0"]}}]}}"#,
        )
        .unwrap();
        let r = bad_sum.validate();
        assert!(!r.ok);
        assert_eq!(r.violations[0].kind, ViolationKind::ChanceSum);

        // Player A forgets whether it played l or r.
        let forgetful = parse_game(
            r#"{"players":["A"],"root":{"kind":"decision","player":0,"infoset":"r","actions":[
                {"label":"l","child":{"kind":"decision","player":0,"infoset":"x","actions":[
                    {"label":"a","child":{"kind":"terminal","payoffs":["1"]}},
                    {"label":"b","child":{"kind":"terminal","payoffs":["0"]}}]}},
                {"label":"r","child":{"kind":"decision","player":0,"infoset":"x","actions":[
                    {"label":"a","child":{"kind":"terminal","payoffs":["0"]}},
                    {"label":"b","child":{"kind":"terminal","payoffs":["1"]}}]}}]}}"#,
        )
        .unwrap();
        let r = forgetful.validate();
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::PerfectRecall));
        assert!(Game::new(forgetful).is_err());

        let mismatch = parse_game(
            r#"{"players":["A","B"],"root":{"kind":"decision","player":0,"infoset":"r","actions":[
                {"label":"l","child":{"kind":"decision","player":1,"infoset":"x","actions":[
                    {"label":"a","child":{"kind":"terminal","payoffs":["1","0"]}},
                    {"label":"b","child":{"kind":"terminal","payoffs":["0","0"]}}]}},
                {"label":"r","child":{"kind":"decision","player":1,"infoset":"x","actions":[
                    {"label":"b","child":{"kind":"terminal","payoffs":["0","0"]}},
                    {"label":"a","child":{"kind":"terminal","payoffs":["1","0"]}}]}}]}}"#,
        )
        .unwrap();
        let r = mismatch.validate();
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::InfosetActionMismatch));
    }
}
