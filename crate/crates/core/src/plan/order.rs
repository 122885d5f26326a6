//! Ordering of action nodes. Action `A` must precede action `B` when
//! `A`'s effect node lies in the justification of one of `B`'s
//! precondition nodes.

use std::collections::BTreeSet;

use super::{PlanError, PlanGraph};
use crate::fol::Atom;

/// Premise → conclusion edges must not form a cycle.
pub(crate) fn check_acyclic(g: &PlanGraph) -> Result<(), PlanError> {
    let n = g.nodes.len();
    let mut succ = vec![Vec::new(); n];
    for h in &g.hyperedges {
        for &p in &h.premises {
            succ[p].push(h.conclusion);
        }
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut mark = vec![0u8; n];
    fn visit(v: usize, succ: &[Vec<usize>], mark: &mut [u8]) -> Result<(), usize> {
        match mark[v] {
            1 => return Err(v),
            2 => return Ok(()),
            _ => {}
        }
        mark[v] = 1;
        for &w in &succ[v] {
            visit(w, succ, mark)?;
        }
        mark[v] = 2;
        Ok(())
    }
    for v in 0..n {
        visit(v, &succ, &mut mark).map_err(PlanError::CycleDetected)?;
    }
    Ok(())
}

/// Action node ids and, per action, the set of actions that must come
/// before it.
fn precedence(g: &PlanGraph) -> Result<(Vec<usize>, Vec<BTreeSet<usize>>), PlanError> {
    check_acyclic(g)?;
    let n = g.nodes.len();
    let mut below: Vec<Option<BTreeSet<usize>>> = vec![None; n];
    fn closure(v: usize, g: &PlanGraph, below: &mut Vec<Option<BTreeSet<usize>>>) -> BTreeSet<usize> {
        if let Some(b) = &below[v] {
            return b.clone();
        }
        let mut set = BTreeSet::from([v]);
        for h in g.hyperedges.iter().filter(|h| h.conclusion == v) {
            for &p in &h.premises {
                set.extend(closure(p, g, below));
            }
        }
        below[v] = Some(set.clone());
        set
    }

    let actions: Vec<usize> = g.action_nodes().map(|a| a.id).collect();
    let owner = |a: usize| g.hyperedges.iter().find(|h| h.premises.contains(&a));
    let mut before = vec![BTreeSet::new(); actions.len()];
    for (bi, &b) in actions.iter().enumerate() {
        let Some(hb) = owner(b) else { continue };
        let mut support = BTreeSet::new();
        for &pre in hb.premises.iter().filter(|&&p| p != b) {
            support.extend(closure(pre, g, &mut below));
        }
        for (ai, &a) in actions.iter().enumerate() {
            if ai == bi {
                continue;
            }
            if let Some(ha) = owner(a) {
                if support.contains(&ha.conclusion) {
                    before[bi].insert(ai);
                }
            }
        }
    }
    Ok((actions, before))
}

fn sort_key(g: &PlanGraph, id: usize) -> (String, usize) {
    (g.nodes[id].atom.to_string(), id)
}

/// The canonical linearization: topological, ties broken by the action
/// atom's text.
pub fn extract_action_sequence(g: &PlanGraph) -> Result<Vec<Atom>, PlanError> {
    let (actions, before) = precedence(g)?;
    let mut done = vec![false; actions.len()];
    let mut out = Vec::with_capacity(actions.len());
    for _ in 0..actions.len() {
        let next = (0..actions.len())
            .filter(|&i| !done[i] && before[i].iter().all(|&j| done[j]))
            .min_by_key(|&i| sort_key(g, actions[i]))
            .ok_or(PlanError::CycleDetected(actions[0]))?;
        done[next] = true;
        out.push(g.nodes[actions[next]].atom.clone());
    }
    Ok(out)
}

/// Every topological order of the action nodes, in lexicographic order of
/// choices; the first is [`extract_action_sequence`]'s.
pub fn linearizations(g: &PlanGraph) -> Result<Vec<Vec<Atom>>, PlanError> {
    let (actions, before) = precedence(g)?;
    let mut ranked: Vec<usize> = (0..actions.len()).collect();
    ranked.sort_by_key(|&i| sort_key(g, actions[i]));

    fn go(
        ranked: &[usize],
        before: &[BTreeSet<usize>],
        done: &mut Vec<bool>,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if prefix.len() == ranked.len() {
            out.push(prefix.clone());
            return;
        }
        for &i in ranked {
            if done[i] || !before[i].iter().all(|&j| done[j]) {
                continue;
            }
            done[i] = true;
            prefix.push(i);
            go(ranked, before, done, prefix, out);
            prefix.pop();
            done[i] = false;
        }
    }
    let mut out = Vec::new();
    go(
        &ranked,
        &before,
        &mut vec![false; actions.len()],
        &mut Vec::new(),
        &mut out,
    );
    let mut seqs: Vec<Vec<Atom>> = out
        .into_iter()
        .map(|ix| ix.into_iter().map(|i| g.nodes[actions[i]].atom.clone()).collect())
        .collect();
    // identical atoms at different nodes give duplicate sequences
    let mut seen = BTreeSet::new();
    seqs.retain(|s| seen.insert(s.clone()));
    Ok(seqs)
}
