//! Affine type checking by usage inference.

mod check;
mod dup;
mod typed;

pub use check::{check, check_closed, infer_usage, synth, Ctx, TypeError, TypeErrorKind};
pub use dup::gen_dup;
pub use typed::{Premise, TNode, TypedTerm, Uses, TT};

use crate::syntax::Name;

/// Replays the usage annotations of a checked term as a derivation: at every
/// node the premise shares must cover the node's uses exactly, be pairwise
/// disjoint outside sharing groups, and recursor bodies may only use their
/// own binders.
pub fn replay(t: &TypedTerm) -> Result<(), String> {
    if let TNode::Var(x) = &t.node {
        return if t.uses[..] == [x.clone()] {
            Ok(())
        } else {
            Err(format!("{}: variable node with uses {:?}", t.span, t.uses))
        };
    }
    let parts = t.partitions();
    let mut all: Vec<Name> = parts.iter().flatten().cloned().collect();
    all.sort();
    all.dedup();
    if all[..] != t.uses[..] {
        return Err(format!(
            "{}: uses {:?} differ from the union of premise shares {:?}",
            t.span, t.uses, all
        ));
    }
    let groups = t.sharing_groups();
    let shared = |i: usize, j: usize| groups.iter().any(|g| g.contains(&i) && g.contains(&j));
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if shared(i, j) {
                continue;
            }
            if let Some(x) = parts[i].iter().find(|x| parts[j].contains(x)) {
                return Err(format!("{}: `{x}` appears in two premises", t.span));
            }
        }
    }
    for p in t.premises() {
        if p.closed {
            if let Some(x) = p.term.uses.iter().find(|u| !p.binders.contains(u)) {
                return Err(format!("{}: recursor body uses outer `{x}`", t.span));
            }
        }
        replay(p.term)?;
    }
    Ok(())
}
