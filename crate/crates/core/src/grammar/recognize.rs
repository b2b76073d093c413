//! Membership test by bottom-up chart parsing.
//!
//! Spans are filled in order of increasing length. Because alternatives are
//! never empty, a multi-symbol alternative only consults strictly shorter
//! spans; single-symbol (unit) alternatives may refer to the span being
//! filled, so each span is iterated to a fixed point. A chart entry keeps the
//! first witness found, which only depends on entries that existed before
//! it, so witness trees are always finite.

use super::{Compiled, Grammar, ParseTree, Sym};
use crate::element::Element;

#[derive(Clone, Debug)]
struct Witness {
    alt: usize,
    /// Boundaries p0 = i < p1 < ... < pk = j, one span per symbol.
    splits: Vec<usize>,
}

struct Chart<'a> {
    c: &'a Compiled,
    seq: &'a [Element],
    width: usize,
    cells: Vec<Vec<Option<Witness>>>,
}

impl<'a> Chart<'a> {
    fn cell(&self, i: usize, j: usize) -> &[Option<Witness>] {
        &self.cells[i * self.width + j]
    }

    fn derives(&self, s: Sym, i: usize, j: usize) -> bool {
        match s {
            Sym::T(e) => j == i + 1 && self.seq[i] == e,
            Sym::N(n) => self.cell(i, j)[n].is_some(),
        }
    }

    /// Finds span boundaries for `alt` over `i..j`, if any.
    fn split(&self, alt: &[Sym], i: usize, j: usize) -> Option<Vec<usize>> {
        let k = alt.len();
        if k == 0 || k > j - i {
            return None;
        }
        let mut dead = vec![false; k * (j - i + 1)];
        let mut path = vec![i];
        if self.search(alt, 0, i, j, &mut dead, &mut path) {
            Some(path)
        } else {
            None
        }
    }

    fn search(&self, alt: &[Sym], t: usize, p: usize, j: usize, dead: &mut [bool], path: &mut Vec<usize>) -> bool {
        let k = alt.len();
        let base = path[0];
        if t == k {
            return p == j;
        }
        let slot = t * (j - base + 1) + (p - base);
        if dead[slot] {
            return false;
        }
        // leave at least one element for each remaining symbol
        let last = j - (k - t - 1);
        for q in (p + 1)..=last {
            if self.derives(alt[t], p, q) {
                path.push(q);
                if self.search(alt, t + 1, q, j, dead, path) {
                    return true;
                }
                path.pop();
            }
        }
        dead[slot] = true;
        false
    }

    fn tree(&self, nt: usize, i: usize, j: usize) -> ParseTree {
        let w = self.cell(i, j)[nt].as_ref().expect("witness present");
        let alt = &self.c.alts[nt][w.alt];
        let children = alt
            .iter()
            .enumerate()
            .map(|(t, &s)| match s {
                Sym::T(e) => ParseTree::leaf(e),
                Sym::N(m) => self.tree(m, w.splits[t], w.splits[t + 1]),
            })
            .collect();
        ParseTree::node(&self.c.names[nt], w.alt, children)
    }
}

/// Returns a parse tree for `seq` if the grammar's start symbol derives it.
/// Ambiguous inputs get one witness tree. Grammars with dangling
/// non-terminals recognize nothing.
pub fn recognize(g: &Grammar, seq: &[Element]) -> Option<ParseTree> {
    let c = g.compile().ok()?;
    recognize_compiled(&c, seq)
}

pub(crate) fn recognize_compiled(c: &Compiled, seq: &[Element]) -> Option<ParseTree> {
    let n = seq.len();
    if n == 0 {
        return None;
    }
    let nts = c.alts.len();
    let width = n + 1;
    let mut chart = Chart {
        c,
        seq,
        width,
        cells: vec![vec![None; nts]; width * width],
    };

    for len in 1..=n {
        for i in 0..=(n - len) {
            let j = i + len;
            loop {
                let mut changed = false;
                for nt in 0..nts {
                    if chart.cell(i, j)[nt].is_some() {
                        continue;
                    }
                    let found = c.alts[nt]
                        .iter()
                        .enumerate()
                        .find_map(|(ai, alt)| chart.split(alt, i, j).map(|splits| Witness { alt: ai, splits }));
                    if let Some(w) = found {
                        chart.cells[i * width + j][nt] = Some(w);
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
    }

    chart.cell(0, n)[c.start].as_ref()?;
    Some(chart.tree(c.start, 0, n))
}
