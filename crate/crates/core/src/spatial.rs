//! Uniform grid over the unit square for feasible-partner queries.
//!
//! A partner `j` is feasible for `i` when `j != i`, `(i, j)` is not already
//! a link, and adding the link keeps both `P(i)` and `P(j)` within `p_max`.

use rand::Rng;

use crate::geometry::{power_from_dist_sq, Position};
use crate::network::{AgentId, Network, NetworkError};

/// Multiplicative slack on ring-termination bounds so rounding in the
/// bound itself can only cause one extra ring scan, never a missed agent.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GridIndex {
    side: usize,
    cell_size: f64,
    /// Row-major `side * side` cells, each sorted by id.
    cells: Vec<Vec<AgentId>>,
    positions: Vec<Option<Position>>,
}

impl GridIndex {
    /// Empty index sized for `n_agents`: `ceil(sqrt(n))` cells per side.
    pub fn new(n_agents: usize) -> Self {
        let side = ((n_agents.max(1) as f64).sqrt().ceil() as usize).max(1);
        Self {
            side,
            cell_size: 1.0 / side as f64,
            cells: vec![Vec::new(); side * side],
            positions: Vec::new(),
        }
    }

    /// Fresh index over every living agent of `net`.
    pub fn build(net: &Network) -> Self {
        let mut index = Self::new(net.len());
        for agent in net.agents() {
            index.insert(agent.id, agent.pos);
        }
        index
    }

    pub fn rebuild(&mut self, net: &Network) {
        *self = Self::build(net);
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(Vec::is_empty)
    }

    /// Cell coordinates of `pos`; the right and top edges fold into the last cell.
    pub fn cell_of(&self, pos: Position) -> (usize, usize) {
        let clamp = |v: f64| ((v / self.cell_size) as usize).min(self.side - 1);
        (clamp(pos.x), clamp(pos.y))
    }

    pub fn cell(&self, cx: usize, cy: usize) -> &[AgentId] {
        &self.cells[cy * self.side + cx]
    }

    pub fn position(&self, id: AgentId) -> Option<Position> {
        self.positions.get(id.index()).copied().flatten()
    }

    pub fn insert(&mut self, id: AgentId, pos: Position) {
        if id.index() >= self.positions.len() {
            self.positions.resize(id.index() + 1, None);
        }
        if let Some(old) = self.positions[id.index()] {
            self.detach(id, old);
        }
        self.positions[id.index()] = Some(pos);
        let (cx, cy) = self.cell_of(pos);
        let cell = &mut self.cells[cy * self.side + cx];
        let at = cell.binary_search(&id).unwrap_err();
        cell.insert(at, id);
    }

    pub fn remove(&mut self, id: AgentId) -> Option<Position> {
        let pos = self.positions.get_mut(id.index())?.take()?;
        self.detach(id, pos);
        while matches!(self.positions.last(), Some(None)) {
            self.positions.pop();
        }
        Some(pos)
    }

    fn detach(&mut self, id: AgentId, pos: Position) {
        let (cx, cy) = self.cell_of(pos);
        let cell = &mut self.cells[cy * self.side + cx];
        if let Ok(at) = cell.binary_search(&id) {
            cell.remove(at);
        }
    }

    /// Closest feasible partner for `i`; exact distance ties go to the
    /// smaller id.
    pub fn nearest_feasible(
        &self,
        net: &Network,
        i: AgentId,
    ) -> Result<Option<AgentId>, NetworkError> {
        let query = Query::new(self, net, i)?;
        let Some(reach) = query.reach() else {
            return Ok(None);
        };
        let (cx, cy) = self.cell_of(query.pos);
        let mut best: Option<(f64, AgentId)> = None;
        for ring in 0..=self.side {
            for (x, y) in ring_cells(cx, cy, ring, self.side) {
                for &j in self.cell(x, y) {
                    if let Some(d2) = query.feasible(j) {
                        if best.is_none_or(|b| (d2, j) < b) {
                            best = Some((d2, j));
                        }
                    }
                }
            }
            // everything not yet scanned lies at distance > ring * cell_size
            let bound = ring as f64 * self.cell_size * (1.0 - BOUND_SLACK);
            if best.is_some_and(|(d2, _)| d2 < bound * bound) || bound > reach {
                break;
            }
        }
        Ok(best.map(|(_, j)| j))
    }

    /// Every feasible partner for `i`, in a deterministic order fixed by the
    /// current contents of the index.
    pub fn feasible_set(&self, net: &Network, i: AgentId) -> Result<Vec<AgentId>, NetworkError> {
        let query = Query::new(self, net, i)?;
        let Some(reach) = query.reach() else {
            return Ok(Vec::new());
        };
        let (cx, cy) = self.cell_of(query.pos);
        let span = ((reach / self.cell_size).ceil() as usize).saturating_add(1);
        let (x0, x1) = (
            cx.saturating_sub(span),
            (cx.saturating_add(span)).min(self.side - 1),
        );
        let (y0, y1) = (
            cy.saturating_sub(span),
            (cy.saturating_add(span)).min(self.side - 1),
        );
        let mut out = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                out.extend(
                    self.cell(x, y)
                        .iter()
                        .copied()
                        .filter(|&j| query.feasible(j).is_some()),
                );
            }
        }
        Ok(out)
    }

    /// Uniform draw from the feasible set. Consumes one draw from `rng` only
    /// when the set is non-empty.
    pub fn random_feasible<R: Rng + ?Sized>(
        &self,
        net: &Network,
        i: AgentId,
        rng: &mut R,
    ) -> Result<Option<AgentId>, NetworkError> {
        let set = self.feasible_set(net, i)?;
        if set.is_empty() {
            return Ok(None);
        }
        Ok(Some(set[rng.gen_range(0..set.len())]))
    }
}

/// Cells at Chebyshev distance exactly `ring` from `(cx, cy)`, clipped to the grid.
fn ring_cells(
    cx: usize,
    cy: usize,
    ring: usize,
    side: usize,
) -> impl Iterator<Item = (usize, usize)> {
    let (cx, cy, r, side) = (cx as isize, cy as isize, ring as isize, side as isize);
    let inside = move |x: isize, y: isize| x >= 0 && y >= 0 && x < side && y < side;
    let rows = (cy - r..=cy + r).flat_map(move |y| {
        let edge_row = y == cy - r || y == cy + r;
        let xs: Box<dyn Iterator<Item = isize>> = if edge_row || r == 0 {
            Box::new(cx - r..=cx + r)
        } else {
            Box::new([cx - r, cx + r].into_iter())
        };
        xs.map(move |x| (x, y))
    });
    rows.filter(move |&(x, y)| inside(x, y))
        .map(|(x, y)| (x as usize, y as usize))
}

struct Query<'a> {
    index: &'a GridIndex,
    net: &'a Network,
    i: AgentId,
    pos: Position,
    power: f64,
    /// Neighbours of `i`, sorted.
    neighbors: Vec<AgentId>,
}

impl<'a> Query<'a> {
    fn new(index: &'a GridIndex, net: &'a Network, i: AgentId) -> Result<Self, NetworkError> {
        let agent = net.agent(i).ok_or(NetworkError::UnknownAgent(i))?;
        let mut neighbors: Vec<AgentId> = net.links(i).unwrap().iter().map(|l| l.to).collect();
        neighbors.sort_unstable();
        Ok(Self {
            index,
            net,
            i,
            pos: agent.pos,
            power: net.power(i).unwrap(),
            neighbors,
        })
    }

    /// Largest distance `i` can still afford, or `None` if it has no headroom.
    fn reach(&self) -> Option<f64> {
        let headroom = self.net.p_max() - self.power;
        if headroom < 0.0 {
            return None;
        }
        let delta = self.net.delta();
        let reach = if delta == 0.0 {
            f64::INFINITY
        } else {
            headroom.powf(1.0 / delta)
        };
        Some(reach * (1.0 + BOUND_SLACK))
    }

    /// Squared distance to `j` if `j` is a feasible partner.
    #[inline]
    fn feasible(&self, j: AgentId) -> Option<f64> {
        if j == self.i {
            return None;
        }
        let pj = self.index.position(j)?;
        let d2 = self.pos.dist_sq(&pj);
        let p = power_from_dist_sq(d2, self.net.delta());
        let p_max = self.net.p_max();
        if self.power + p > p_max || self.net.power(j)? + p > p_max {
            return None;
        }
        if self.neighbors.binary_search(&j).is_ok() {
            return None;
        }
        Some(d2)
    }
}
