//! Simple undirected graph over agents with a per-agent power ledger.

use std::fmt;

use thiserror::Error;

use crate::geometry::{pair_power, Position};

/// Identity of a living agent. Ids are slot indices: when an agent leaves,
/// its id becomes free and the next newcomer takes the lowest free id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub u32);

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Attachment strategy. Tags both an agent's fixed kind and the strategy
/// that created a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attachment {
    Local,
    Random,
}

impl Attachment {
    pub fn as_str(self) -> &'static str {
        match self {
            Attachment::Local => "local",
            Attachment::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "local" => Some(Attachment::Local),
            "random" => Some(Attachment::Random),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub id: AgentId,
    pub pos: Position,
    pub kind: Attachment,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub to: AgentId,
    pub power: f64,
    pub origin: Attachment,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum NetworkError {
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("agent {0} cannot link to itself")]
    SelfLink(AgentId),
    #[error("link already present")]
    AlreadyLinked,
    #[error("link would push an endpoint above the power budget")]
    BudgetExceeded,
    #[error("agent id {0} is already in use")]
    IdInUse(AgentId),
}

impl NetworkError {
    /// `AlreadyLinked` and `BudgetExceeded` are ordinary outcomes of an
    /// attachment attempt; everything else indicates a caller bug.
    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            NetworkError::AlreadyLinked | NetworkError::BudgetExceeded
        )
    }
}

/// A broken structural invariant, found by [`Network::check_invariants`] or
/// [`Network::verify_ledger`].
#[derive(Debug, Error, Clone, PartialEq)]
#[error("invariant violated: {0}")]
pub struct InvariantViolation(pub String);

#[derive(Debug, Clone)]
struct Slot {
    agent: Agent,
    links: Vec<Link>,
    /// Left fold of `links[..].power` in list order.
    power: f64,
}

/// Relative ledger tolerance, in units of machine epsilon.
pub const LEDGER_TOLERANCE_EPS: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct Network {
    delta: f64,
    p_max: f64,
    slots: Vec<Option<Slot>>,
    live: usize,
    edges: usize,
}

impl Network {
    pub fn new(delta: f64, p_max: f64) -> Self {
        Self {
            delta,
            p_max,
            slots: Vec::new(),
            live: 0,
            edges: 0,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    /// Number of living agents.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// One past the largest id ever handed out; dense per-agent arrays can be
    /// sized with this.
    pub fn id_bound(&self) -> usize {
        self.slots.len()
    }

    pub fn contains(&self, id: AgentId) -> bool {
        self.slot(id).is_some()
    }

    /// Living agent ids in ascending order.
    pub fn ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(i, _)| AgentId(i as u32))
    }

    pub fn agents(&self) -> impl Iterator<Item = &Agent> + '_ {
        self.slots.iter().flatten().map(|s| &s.agent)
    }

    pub fn agent(&self, id: AgentId) -> Option<&Agent> {
        self.slot(id).map(|s| &s.agent)
    }

    /// Ledger value `P(id)`.
    pub fn power(&self, id: AgentId) -> Option<f64> {
        self.slot(id).map(|s| s.power)
    }

    pub fn links(&self, id: AgentId) -> Option<&[Link]> {
        self.slot(id).map(|s| s.links.as_slice())
    }

    pub fn degree(&self, id: AgentId) -> Option<usize> {
        self.slot(id).map(|s| s.links.len())
    }

    pub fn has_link(&self, i: AgentId, j: AgentId) -> bool {
        match (self.slot(i), self.slot(j)) {
            (Some(a), Some(b)) => {
                // scan the shorter list
                let (list, other) = if a.links.len() <= b.links.len() {
                    (&a.links, j)
                } else {
                    (&b.links, i)
                };
                list.iter().any(|l| l.to == other)
            }
            _ => false,
        }
    }

    /// Undirected edges `(i, j, power, origin)` with `i < j`, sorted by `(i, j)`.
    pub fn edges(&self) -> Vec<(AgentId, AgentId, f64, Attachment)> {
        let mut out = Vec::with_capacity(self.edges);
        for (idx, slot) in self.slots.iter().enumerate() {
            let Some(slot) = slot else { continue };
            let i = AgentId(idx as u32);
            let start = out.len();
            out.extend(
                slot.links
                    .iter()
                    .filter(|l| l.to > i)
                    .map(|l| (i, l.to, l.power, l.origin)),
            );
            out[start..].sort_by_key(|e| e.1);
        }
        out
    }

    /// Adds an agent under the lowest free id.
    pub fn add_agent(&mut self, pos: Position, kind: Attachment) -> AgentId {
        let idx = self
            .slots
            .iter()
            .position(Option::is_none)
            .unwrap_or(self.slots.len());
        let id = AgentId(idx as u32);
        self.insert_agent(id, pos, kind)
            .expect("free slot cannot be occupied");
        id
    }

    /// Adds an agent under an explicit id.
    pub fn insert_agent(
        &mut self,
        id: AgentId,
        pos: Position,
        kind: Attachment,
    ) -> Result<(), NetworkError> {
        let idx = id.index();
        if idx >= self.slots.len() {
            self.slots.resize_with(idx + 1, || None);
        }
        if self.slots[idx].is_some() {
            return Err(NetworkError::IdInUse(id));
        }
        self.slots[idx] = Some(Slot {
            agent: Agent { id, pos, kind },
            links: Vec::new(),
            power: 0.0,
        });
        self.live += 1;
        Ok(())
    }

    /// Link power `p(i, j)` for two living agents, linked or not.
    pub fn pair_power(&self, i: AgentId, j: AgentId) -> Result<f64, NetworkError> {
        let a = self.slot(i).ok_or(NetworkError::UnknownAgent(i))?;
        let b = self.slot(j).ok_or(NetworkError::UnknownAgent(j))?;
        Ok(pair_power(a.agent.pos, b.agent.pos, self.delta))
    }

    /// Inserts the edge `(i, j)` if it is new and both ledgers stay within
    /// `p_max`. Returns the edge power.
    pub fn add_link(
        &mut self,
        i: AgentId,
        j: AgentId,
        origin: Attachment,
    ) -> Result<f64, NetworkError> {
        if i == j {
            return Err(NetworkError::SelfLink(i));
        }
        let p = self.pair_power(i, j)?;
        if self.has_link(i, j) {
            return Err(NetworkError::AlreadyLinked);
        }
        let (pi, pj) = (
            self.slots[i.index()].as_ref().unwrap().power,
            self.slots[j.index()].as_ref().unwrap().power,
        );
        if pi + p > self.p_max || pj + p > self.p_max {
            return Err(NetworkError::BudgetExceeded);
        }
        for (from, to) in [(i, j), (j, i)] {
            let slot = self.slots[from.index()].as_mut().unwrap();
            slot.links.push(Link {
                to,
                power: p,
                origin,
            });
            slot.power += p;
        }
        self.edges += 1;
        Ok(p)
    }

    /// Removes `id` and its incident links. Returns the former neighbours in
    /// the order their links were created.
    pub fn remove_agent(&mut self, id: AgentId) -> Result<Vec<AgentId>, NetworkError> {
        let slot = self
            .slots
            .get_mut(id.index())
            .and_then(Option::take)
            .ok_or(NetworkError::UnknownAgent(id))?;
        self.live -= 1;
        self.edges -= slot.links.len();
        let mut former = Vec::with_capacity(slot.links.len());
        for link in &slot.links {
            let nb = self.slots[link.to.index()].as_mut().unwrap();
            nb.links.retain(|l| l.to != id);
            // re-summing the survivors instead of subtracting avoids
            // cancellation drift in the ledger
            nb.power = nb.links.iter().fold(0.0, |acc, l| acc + l.power);
            former.push(link.to);
        }
        Ok(former)
    }

    /// `P(id)` summed from scratch in ascending neighbour-id order, which is
    /// independent of the ledger's insertion-order sum.
    pub fn recompute_power(&self, id: AgentId) -> Option<f64> {
        let slot = self.slot(id)?;
        let mut links: Vec<&Link> = slot.links.iter().collect();
        links.sort_by_key(|l| l.to);
        Some(links.iter().fold(0.0, |acc, l| acc + l.power))
    }

    /// Compares every ledger entry with a from-scratch recompute. Returns the
    /// largest relative deviation seen.
    pub fn verify_ledger(&self) -> Result<f64, InvariantViolation> {
        let mut worst = 0.0f64;
        for id in self.ids() {
            let ledger = self.power(id).unwrap();
            let fresh = self.recompute_power(id).unwrap();
            let dev = (ledger - fresh).abs();
            let tol = LEDGER_TOLERANCE_EPS * f64::EPSILON * ledger.abs().max(fresh.abs());
            if dev > tol {
                return Err(InvariantViolation(format!(
                    "ledger of agent {id} is {ledger}, recomputed {fresh}"
                )));
            }
            if fresh > 0.0 {
                worst = worst.max(dev / fresh);
            }
        }
        Ok(worst)
    }

    /// Symmetry, simplicity, budget, edge-power and ledger checks.
    pub fn check_invariants(&self) -> Result<(), InvariantViolation> {
        let fail = |msg: String| Err(InvariantViolation(msg));
        let mut half_edges = 0usize;
        for id in self.ids() {
            let slot = self.slot(id).unwrap();
            let mut seen: Vec<AgentId> = slot.links.iter().map(|l| l.to).collect();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return fail(format!("agent {id} has a parallel edge"));
            }
            for link in &slot.links {
                if link.to == id {
                    return fail(format!("agent {id} has a self-loop"));
                }
                let Some(other) = self.slot(link.to) else {
                    return fail(format!("agent {id} links to dead agent {}", link.to));
                };
                let Some(back) = other.links.iter().find(|l| l.to == id) else {
                    return fail(format!("edge {id}-{} is not symmetric", link.to));
                };
                if back.power.to_bits() != link.power.to_bits() || back.origin != link.origin {
                    return fail(format!("edge {id}-{} differs between endpoints", link.to));
                }
                let expected = pair_power(slot.agent.pos, other.agent.pos, self.delta);
                if expected.to_bits() != link.power.to_bits() {
                    return fail(format!("edge {id}-{} stores a stale power", link.to));
                }
            }
            if slot.power > self.p_max {
                return fail(format!("agent {id} exceeds p_max with {}", slot.power));
            }
            half_edges += slot.links.len();
        }
        if half_edges != 2 * self.edges {
            return fail(format!(
                "edge count {} disagrees with adjacency ({half_edges} half-edges)",
                self.edges
            ));
        }
        self.verify_ledger().map(|_| ())
    }

    #[inline]
    fn slot(&self, id: AgentId) -> Option<&Slot> {
        self.slots.get(id.index()).and_then(Option::as_ref)
    }
}
