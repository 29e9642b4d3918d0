//! Bootstrap, one-in-one-out churn, and deficit-driven attachment.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Position;
use crate::network::{AgentId, Attachment, Network, NetworkError};
use crate::params::{ModelKind, Params, ParamsError};
use crate::spatial::GridIndex;

/// Bernoulli(q) that leaves the stream untouched when the outcome is
/// certain. Keeps models A and B on the same random stream at q = 0 and 1.
fn coin<R: Rng + ?Sized>(rng: &mut R, q: f64) -> bool {
    if q <= 0.0 {
        false
    } else if q >= 1.0 {
        true
    } else {
        rng.gen::<f64>() < q
    }
}

/// Draws a newcomer's fixed kind. Always consumes one draw, so positions
/// drawn afterwards do not depend on `q`.
fn draw_kind<R: Rng + ?Sized>(rng: &mut R, q: f64) -> Attachment {
    if rng.gen::<f64>() < q {
        Attachment::Random
    } else {
        Attachment::Local
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepReport {
    pub removed: AgentId,
    pub added: AgentId,
    pub links_added: usize,
}

/// One replicate's full mutable state.
#[derive(Debug, Clone)]
pub struct SimState {
    pub net: Network,
    pub index: GridIndex,
    pub params: Params,
    rng: ChaCha8Rng,
    step: u64,
}

impl SimState {
    /// `params.n_agents` uniform agents, no links, then one deficit pass.
    pub fn bootstrap(params: Params) -> Result<Self, ParamsError> {
        let rng = ChaCha8Rng::seed_from_u64(params.seed);
        Self::bootstrap_with_rng(params, rng)
    }

    pub fn bootstrap_with_rng(params: Params, mut rng: ChaCha8Rng) -> Result<Self, ParamsError> {
        params.validate()?;
        let n = params.n_agents;
        let positions: Vec<Position> = (0..n).map(|_| Position::random(&mut rng)).collect();
        let kinds: Vec<Attachment> = (0..n).map(|_| draw_kind(&mut rng, params.q)).collect();
        let mut net = Network::new(params.delta, params.p_max);
        for (pos, kind) in positions.into_iter().zip(kinds) {
            net.add_agent(pos, kind);
        }
        let index = GridIndex::build(&net);
        let mut state = Self {
            net,
            index,
            params,
            rng,
            step: 0,
        };
        state
            .satisfy_deficits()
            .expect("bootstrap attaches only known agents");
        Ok(state)
    }

    /// Assembles a state from an existing network, e.g. one read from a snapshot.
    pub fn from_network(net: Network, params: Params) -> Result<Self, ParamsError> {
        params.validate()?;
        let index = GridIndex::build(&net);
        let rng = ChaCha8Rng::seed_from_u64(params.seed);
        Ok(Self {
            net,
            index,
            params,
            rng,
            step: 0,
        })
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// One uniformly random agent leaves, one newcomer arrives at a uniform
    /// position, then every deficit agent tries to attach.
    pub fn churn_step(&mut self) -> Result<StepReport, NetworkError> {
        let live: Vec<AgentId> = self.net.ids().collect();
        let removed = live[self.rng.gen_range(0..live.len())];
        self.net.remove_agent(removed)?;
        self.index.remove(removed);

        let pos = Position::random(&mut self.rng);
        let kind = draw_kind(&mut self.rng, self.params.q);
        let added = self.net.add_agent(pos, kind);
        self.index.insert(added, pos);

        let links_added = self.satisfy_deficits()?;
        self.step += 1;
        debug_assert_eq!(self.net.len(), self.params.n_agents);
        Ok(StepReport {
            removed,
            added,
            links_added,
        })
    }

    /// Visits every agent below `p_min` in a fresh random order; each keeps
    /// attaching until it reaches `p_min` or its chosen strategy finds no
    /// feasible partner. Returns the number of links added.
    pub fn satisfy_deficits(&mut self) -> Result<usize, NetworkError> {
        let p_min = self.params.p_min;
        let mut queue: Vec<AgentId> = self
            .net
            .ids()
            .filter(|&i| self.net.power(i).unwrap() < p_min)
            .collect();
        queue.shuffle(&mut self.rng);
        let mut added = 0;
        for i in queue {
            while self.net.power(i).unwrap() < p_min {
                let Some((j, origin)) = self.pick_candidate(i)? else {
                    break;
                };
                self.net.add_link(i, j, origin)?;
                added += 1;
            }
        }
        Ok(added)
    }

    /// Chooses a partner for `i` under the configured model, together with
    /// the strategy that produced it. No fallback to the other strategy.
    pub fn pick_candidate(
        &mut self,
        i: AgentId,
    ) -> Result<Option<(AgentId, Attachment)>, NetworkError> {
        let strategy = match self.params.model {
            ModelKind::A => {
                if coin(&mut self.rng, self.params.q) {
                    Attachment::Random
                } else {
                    Attachment::Local
                }
            }
            ModelKind::B => self.net.agent(i).ok_or(NetworkError::UnknownAgent(i))?.kind,
        };
        let pick = match strategy {
            Attachment::Local => self.index.nearest_feasible(&self.net, i)?,
            Attachment::Random => self.index.random_feasible(&self.net, i, &mut self.rng)?,
        };
        Ok(pick.map(|j| (j, strategy)))
    }
}
