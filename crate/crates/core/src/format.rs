//! The game JSON document.
//!
//! ```json
//! {"players": ["P1", "P2"],
//!  "root": {"kind": "decision", "player": 0, "infoset": "root",
//!           "actions": [{"label": "L", "child": {"kind": "terminal", "payoffs": ["1", "0"]}}]}}
//! ```
//!
//! Chance nodes use `{"kind": "chance", "actions": [{"label", "prob", "child"}]}`.
//! Rationals are written as `"p/q"` or `"p"` strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Edge, GameTree, Node, NodeId, NodeKind};
use crate::rational::Rational;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDoc {
    players: Vec<String>,
    root: NodeDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum NodeDoc {
    Chance { actions: Vec<ChanceEdgeDoc> },
    Decision { player: usize, infoset: String, actions: Vec<EdgeDoc> },
    Terminal { payoffs: Vec<String> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChanceEdgeDoc {
    label: String,
    prob: String,
    child: Box<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    label: String,
    child: Box<NodeDoc>,
}

fn parse_rational(s: &str, path: &str) -> Result<Rational> {
    s.parse().map_err(|_| Error::Parse(format!("{path}: invalid rational {s:?}")))
}

struct Builder {
    n: usize,
    nodes: Vec<Node>,
}

impl Builder {
    fn add(&mut self, doc: &NodeDoc, parent: Option<NodeId>, path: &str) -> Result<NodeId> {
        let id = self.nodes.len();
        self.nodes.push(Node { parent, kind: NodeKind::Terminal { payoffs: Vec::new() } });
        let kind = match doc {
            NodeDoc::Terminal { payoffs } => {
                if payoffs.len() != self.n {
                    return Err(Error::Semantic(format!(
                        "{path}: {} payoffs for {} players",
                        payoffs.len(),
                        self.n
                    )));
                }
                let payoffs = payoffs
                    .iter()
                    .enumerate()
                    .map(|(k, s)| parse_rational(s, &format!("{path}.payoffs[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                NodeKind::Terminal { payoffs }
            }
            NodeDoc::Chance { actions } => {
                let mut edges = Vec::with_capacity(actions.len());
                let mut probs = Vec::with_capacity(actions.len());
                for (k, a) in actions.iter().enumerate() {
                    let p = format!("{path}.actions[{k}]");
                    probs.push(parse_rational(&a.prob, &format!("{p}.prob"))?);
                    let child = self.add(&a.child, Some(id), &format!("{p}.child"))?;
                    edges.push(Edge { label: a.label.clone(), child });
                }
                NodeKind::Chance { actions: edges, probs }
            }
            NodeDoc::Decision { player, infoset, actions } => {
                if *player >= self.n {
                    return Err(Error::Semantic(format!(
                        "{path}: player index {player} but only {} players",
                        self.n
                    )));
                }
                let mut edges = Vec::with_capacity(actions.len());
                for (k, a) in actions.iter().enumerate() {
                    let child = self.add(&a.child, Some(id), &format!("{path}.actions[{k}].child"))?;
                    edges.push(Edge { label: a.label.clone(), child });
                }
                NodeKind::Decision { player: *player, infoset: infoset.clone(), actions: edges }
            }
        };
        self.nodes[id].kind = kind;
        Ok(id)
    }
}

/// Parse a game document. The result is not validated; see [`GameTree::validate`].
pub fn parse_game(text: &str) -> Result<GameTree> {
    let doc: GameDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut b = Builder { n: doc.players.len(), nodes: Vec::new() };
    b.add(&doc.root, None, "root")?;
    Ok(GameTree { players: doc.players, nodes: b.nodes })
}

fn node_doc(tree: &GameTree, id: NodeId) -> NodeDoc {
    match &tree.nodes[id].kind {
        NodeKind::Terminal { payoffs } => {
            NodeDoc::Terminal { payoffs: payoffs.iter().map(|r| r.to_string()).collect() }
        }
        NodeKind::Chance { actions, probs } => NodeDoc::Chance {
            actions: actions
                .iter()
                .zip(probs)
                .map(|(e, p)| ChanceEdgeDoc {
                    label: e.label.clone(),
                    prob: p.to_string(),
                    child: Box::new(node_doc(tree, e.child)),
                })
                .collect(),
        },
        NodeKind::Decision { player, infoset, actions } => NodeDoc::Decision {
            player: *player,
            infoset: infoset.clone(),
            actions: actions
                .iter()
                .map(|e| EdgeDoc { label: e.label.clone(), child: Box::new(node_doc(tree, e.child)) })
                .collect(),
        },
    }
}

/// Canonical serialization: pretty JSON, rationals in lowest terms.
pub fn serialize_game(tree: &GameTree) -> String {
    let doc = GameDoc { players: tree.players.clone(), root: node_doc(tree, 0) };
    let mut s = serde_json::to_string_pretty(&doc).expect("game documents always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::Game;

    #[test]
    fn fixtures_parse_with_expected_shape() {
        let ebos = fixtures::ebos();
        assert_eq!(ebos.num_players(), 2);
        assert_eq!(ebos.infosets().len(), 4);
        assert_eq!(ebos.player_infosets(0).len(), 3);
        assert_eq!(ebos.player_infosets(1).len(), 1);
        assert_eq!(ebos.num_terminals(), 8);

        let lrr = fixtures::lrr();
        assert_eq!(lrr.num_players(), 1);
        assert_eq!(lrr.infosets().len(), 2);
        assert_eq!(lrr.num_terminals(), 3);
    }

    #[test]
    fn smallest_game() {
        let t = parse_game(r#"{"players":["A"],"root":{"kind":"terminal","payoffs":["0"]}}"#).unwrap();
        let g = Game::new(t).unwrap();
        assert_eq!(g.num_terminals(), 1);
        assert_eq!(g.num_players(), 1);
    }

    #[test]
    fn canonical_fixpoint() {
        for text in [fixtures::EBOS_JSON, fixtures::LRR_JSON, fixtures::SURJ_JSON] {
            let a = parse_game(text).unwrap();
            let s1 = serialize_game(&a);
            let b = parse_game(&s1).unwrap();
            assert_eq!(a, b);
            assert_eq!(s1, serialize_game(&b));
        }
        // Non-canonical rationals are normalized on the way through.
        let t = parse_game(r#"{"players":["A"],"root":{"kind":"terminal","payoffs":["2/4"]}}"#).unwrap();
        assert!(serialize_game(&t).contains("\"1/2\""));
    }

    #[test]
    fn errors_carry_context() {
        let truncated = &fixtures::EBOS_JSON[..fixtures::EBOS_JSON.len() / 2];
        match parse_game(truncated) {
            Err(Error::Parse(msg)) => assert!(msg.contains("line")),
            other => panic!("expected parse error, got {other:?}"),
        }
        let wrong_len = r#"{"players":["A","B"],"root":{"kind":"terminal","payoffs":["0"]}}"#;
        assert!(matches!(parse_game(wrong_len), Err(Error::Semantic(_))));
        let bad_player = r#"{"players":["A"],"root":{"kind":"decision","player":1,"infoset":"x",
            "actions":[{"label":"a","child":{"kind":"terminal","payoffs":["0"]}}]}}"#;
        assert!(matches!(parse_game(bad_player), Err(Error::Semantic(_))));
        let bad_rat = r#"{"players":["A"],"root":{"kind":"terminal","payoffs":["x/2"]}}"#;
        match parse_game(bad_rat) {
            Err(Error::Parse(msg)) => assert!(msg.contains("root.payoffs[0]")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
