//! Text grammar for decomposition trees:
//!
//! ```text
//! tree := "e" | "P(" tree ("," tree)+ ")" | "S(" tree ("," tree)+ ")"
//! ```
//!
//! Whitespace is ignored. Leaves receive edge-ids in reading order. Error
//! positions are character offsets into the original input.

use super::tree::{NodeKind, SpTree};
use crate::error::{Error, Result};

pub fn parse_tree(input: &str) -> Result<SpTree> {
    let tokens: Vec<(usize, char)> = input
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let mut p = Parser {
        tokens,
        at: 0,
        next_edge: 0,
        end: input.chars().count(),
    };
    let tree = p.tree(None)?;
    if let Some(&(pos, c)) = p.tokens.get(p.at) {
        return Err(parse_err(pos, format!("unexpected trailing '{c}'")));
    }
    Ok(tree)
}

struct Parser {
    tokens: Vec<(usize, char)>,
    at: usize,
    next_edge: usize,
    end: usize,
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

impl Parser {
    fn peek(&self) -> Option<(usize, char)> {
        self.tokens.get(self.at).copied()
    }

    fn pos(&self) -> usize {
        self.peek().map_or(self.end, |(p, _)| p)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some((_, c)) if c == want => {
                self.at += 1;
                Ok(())
            }
            Some((pos, c)) => Err(parse_err(pos, format!("expected '{want}', found '{c}'"))),
            None => Err(parse_err(self.end, format!("expected '{want}', found end of input"))),
        }
    }

    fn tree(&mut self, parent: Option<NodeKind>) -> Result<SpTree> {
        let (pos, c) = self
            .peek()
            .ok_or_else(|| parse_err(self.end, "expected tree, found end of input"))?;
        let kind = match c {
            'e' => {
                self.at += 1;
                self.next_edge += 1;
                return Ok(SpTree::Leaf(self.next_edge - 1));
            }
            'P' => NodeKind::Parallel,
            'S' => NodeKind::Series,
            other => return Err(parse_err(pos, format!("expected 'e', 'P' or 'S', found '{other}'"))),
        };
        if parent == Some(kind) {
            let name = if kind == NodeKind::Parallel { "parallel" } else { "serial" };
            return Err(parse_err(
                pos,
                format!("{name} composition directly inside a {name} composition"),
            ));
        }
        self.at += 1;
        self.expect('(')?;
        let mut children = vec![self.tree(Some(kind))?];
        while let Some((_, ',')) = self.peek() {
            self.at += 1;
            children.push(self.tree(Some(kind))?);
        }
        if children.len() < 2 {
            return Err(parse_err(self.pos(), "composition needs at least two children"));
        }
        self.expect(')')?;
        Ok(match kind {
            NodeKind::Parallel => SpTree::Parallel(children),
            _ => SpTree::Series(children),
        })
    }
}
