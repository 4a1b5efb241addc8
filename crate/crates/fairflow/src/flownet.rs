//! Exact-rational flow networks shaped source → voters → candidates → sink.
//!
//! The network of an instance connects the source to each voter with the
//! voter's entitlement as capacity, each voter to every candidate they
//! approve (effectively unbounded), and each candidate to the sink with unit
//! capacity. An optional dummy voter connects the source to every candidate,
//! and optional sink-distinct costs turn max-flow into min-cost max-flow.
//!
//! All capacities and flows are exact rationals; two flow values are equal
//! exactly or not at all. Arc iteration order is fixed (voters, then
//! candidates, by ascending index) so runs are bit-reproducible;
//! [`EntitlementNetwork::with_arc_shuffle`] exists to demonstrate that
//! min-cost sink flows do not depend on that order.

use crate::rational::{sum, Rational};
use crate::{Error, Instance, Result};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Node of an entitlement network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Node {
    Source,
    Voter(usize),
    Dummy,
    Candidate(usize),
    Sink,
}

/// A flow network with the fixed source → voters → candidates → sink shape.
///
/// Voter→candidate arcs exist exactly for approved pairs. Candidates can be
/// deactivated by [`restrict`](Self::restrict), which removes them and all
/// their arcs while preserving the index space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitlementNetwork {
    entitlement: Vec<Rational>,
    approvals: Vec<Vec<usize>>,
    sink_cap: Vec<Rational>,
    active: Vec<bool>,
    dummy_cap: Option<Rational>,
    costs: Option<Vec<u64>>,
    arc_shuffle: Option<u64>,
}

/// The network representation of an instance: entitlements `k/n`, unit sink
/// capacities, no dummy, no costs.
pub fn network_representation(instance: &Instance) -> EntitlementNetwork {
    let ent = instance.entitlement();
    EntitlementNetwork {
        entitlement: vec![ent; instance.n()],
        approvals: instance
            .approvals()
            .iter()
            .map(|b| b.iter().copied().collect())
            .collect(),
        sink_cap: vec![Rational::from_integer(1.into()); instance.m()],
        active: vec![true; instance.m()],
        dummy_cap: None,
        costs: None,
        arc_shuffle: None,
    }
}

impl EntitlementNetwork {
    /// General constructor for auxiliary networks (axiom checkers).
    pub fn new(
        entitlement: Vec<Rational>,
        approvals: Vec<Vec<usize>>,
        sink_cap: Vec<Rational>,
    ) -> Result<Self> {
        if entitlement.len() != approvals.len() {
            return Err(Error::DimensionMismatch(
                "one entitlement per voter required".into(),
            ));
        }
        let m = sink_cap.len();
        for e in &entitlement {
            if e < &Rational::zero() {
                return Err(Error::InvalidParameters("negative entitlement".into()));
            }
        }
        for c in &sink_cap {
            if c < &Rational::zero() {
                return Err(Error::InvalidParameters("negative sink capacity".into()));
            }
        }
        let mut approvals = approvals;
        for ballot in &mut approvals {
            ballot.sort_unstable();
            ballot.dedup();
            if ballot.iter().any(|&c| c >= m) {
                return Err(Error::IndexOutOfRange(
                    "approval arc to nonexistent candidate".into(),
                ));
            }
        }
        Ok(Self {
            entitlement,
            approvals,
            sink_cap,
            active: vec![true; m],
            dummy_cap: None,
            costs: None,
            arc_shuffle: None,
        })
    }

    pub fn n(&self) -> usize {
        self.entitlement.len()
    }

    pub fn m(&self) -> usize {
        self.sink_cap.len()
    }

    pub fn entitlement(&self, voter: usize) -> &Rational {
        &self.entitlement[voter]
    }

    pub fn entitlements(&self) -> &[Rational] {
        &self.entitlement
    }

    pub fn approval_arcs(&self, voter: usize) -> &[usize] {
        &self.approvals[voter]
    }

    pub fn sink_cap(&self, c: usize) -> &Rational {
        &self.sink_cap[c]
    }

    pub fn is_active(&self, c: usize) -> bool {
        self.active[c]
    }

    pub fn active_candidates(&self) -> BTreeSet<usize> {
        (0..self.m()).filter(|&c| self.active[c]).collect()
    }

    pub fn dummy_cap(&self) -> Option<&Rational> {
        self.dummy_cap.as_ref()
    }

    pub fn costs(&self) -> Option<&[u64]> {
        self.costs.as_deref()
    }

    /// Total source-side capacity; an upper bound on any flow value and the
    /// finite stand-in capacity for the unbounded voter→candidate arcs.
    pub fn total_supply(&self) -> Rational {
        let mut total = sum(&self.entitlement);
        if let Some(d) = &self.dummy_cap {
            total += d;
        }
        total
    }

    /// Replaces the candidate→sink capacities.
    pub fn with_sink_caps(mut self, sink_cap: Vec<Rational>) -> Result<Self> {
        if sink_cap.len() != self.m() {
            return Err(Error::DimensionMismatch(
                "one sink capacity per candidate required".into(),
            ));
        }
        if sink_cap.iter().any(|c| c < &Rational::zero()) {
            return Err(Error::InvalidParameters("negative sink capacity".into()));
        }
        self.sink_cap = sink_cap;
        Ok(self)
    }

    /// Adds a dummy voter connected to every active candidate.
    pub fn with_dummy(mut self, cap: Rational) -> Result<Self> {
        if cap < Rational::zero() {
            return Err(Error::InvalidParameters("negative dummy capacity".into()));
        }
        self.dummy_cap = Some(cap);
        Ok(self)
    }

    /// Attaches sink-distinct costs: positive, pairwise distinct among active
    /// candidates, zero implicitly everywhere else.
    pub fn with_costs(mut self, costs: Vec<u64>) -> Result<Self> {
        if costs.len() != self.m() {
            return Err(Error::DimensionMismatch(
                "one cost per candidate required".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for (c, &cost) in costs.iter().enumerate() {
            if !self.active[c] {
                continue;
            }
            if cost == 0 {
                return Err(Error::InvalidParameters(
                    "candidate costs must be positive".into(),
                ));
            }
            if !seen.insert(cost) {
                return Err(Error::InvalidParameters(
                    "candidate costs must be pairwise distinct".into(),
                ));
            }
        }
        self.costs = Some(costs);
        Ok(self)
    }

    /// Testing support: permutes internal adjacency-list order with the given
    /// seed. Min-cost sink flows must not depend on this.
    pub fn with_arc_shuffle(mut self, seed: u64) -> Self {
        self.arc_shuffle = Some(seed);
        self
    }

    /// Removes candidates outside `keep` and all their arcs. Indices are
    /// preserved; removed candidates become inactive isolated slots.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> Self {
        let mut net = self.clone();
        for c in 0..net.m() {
            if !keep.contains(&c) {
                net.active[c] = false;
                net.sink_cap[c] = Rational::zero();
            }
        }
        for ballot in &mut net.approvals {
            ballot.retain(|c| net.active[*c]);
        }
        net
    }

    /// Keeps only the given voters' source arcs and approval arcs; the
    /// subnetwork used to evaluate a group's own attainable flow.
    pub fn restrict_voters(&self, keep: &BTreeSet<usize>) -> Self {
        let mut net = self.clone();
        for i in 0..net.n() {
            if !keep.contains(&i) {
                net.entitlement[i] = Rational::zero();
                net.approvals[i].clear();
            }
        }
        net
    }

    /// Validates a flow against this network's capacities and conservation
    /// constraints.
    pub fn check_feasible(&self, flow: &Flow) -> Result<()> {
        let fail = |msg: String| Err(Error::InfeasibleWarmStart(msg));
        if flow.source.len() != self.n()
            || flow.sink.len() != self.m()
            || flow.dummy_cand.len() != self.m()
        {
            return fail("flow dimensions do not match network".into());
        }
        if self.dummy_cap.is_none()
            && (!flow.dummy_source.is_zero() || flow.dummy_cand.iter().any(|f| !f.is_zero()))
        {
            return fail("flow uses a dummy voter the network does not have".into());
        }
        for (i, f) in flow.source.iter().enumerate() {
            if f < &Rational::zero() || f > &self.entitlement[i] {
                return fail(format!("source arc of voter {i} violates capacity"));
            }
        }
        if let Some(cap) = &self.dummy_cap {
            if flow.dummy_source < Rational::zero() || &flow.dummy_source > cap {
                return fail("dummy source arc violates capacity".into());
            }
        }
        for (c, f) in flow.sink.iter().enumerate() {
            if f < &Rational::zero() || f > &self.sink_cap[c] {
                return fail(format!("sink arc of candidate {c} violates capacity"));
            }
        }
        let mut into_candidate = vec![Rational::zero(); self.m()];
        let mut out_of_voter = vec![Rational::zero(); self.n()];
        for ((i, c), f) in &flow.voter_cand {
            if *i >= self.n() || !self.approvals[*i].contains(c) {
                if f.is_zero() {
                    continue;
                }
                return fail(format!("flow on nonexistent arc ({i}, {c})"));
            }
            if f < &Rational::zero() {
                return fail(format!("negative flow on arc ({i}, {c})"));
            }
            into_candidate[*c] += f;
            out_of_voter[*i] += f;
        }
        for (c, f) in flow.dummy_cand.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            if f < &Rational::zero() || !self.active[c] {
                return fail(format!("bad dummy flow into candidate {c}"));
            }
            into_candidate[c] += f;
        }
        for (i, total) in out_of_voter.iter().enumerate() {
            if total != &flow.source[i] {
                return fail(format!("conservation violated at voter {i}"));
            }
        }
        if sum(&flow.dummy_cand) != flow.dummy_source {
            return fail("conservation violated at dummy voter".into());
        }
        for (c, total) in into_candidate.iter().enumerate() {
            if total != &flow.sink[c] {
                return fail(format!("conservation violated at candidate {c}"));
            }
        }
        Ok(())
    }
}

/// A feasible flow over an [`EntitlementNetwork`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    source: Vec<Rational>,
    voter_cand: BTreeMap<(usize, usize), Rational>,
    dummy_source: Rational,
    dummy_cand: Vec<Rational>,
    sink: Vec<Rational>,
}

impl Flow {
    pub fn zero(net: &EntitlementNetwork) -> Self {
        Self {
            source: vec![Rational::zero(); net.n()],
            voter_cand: BTreeMap::new(),
            dummy_source: Rational::zero(),
            dummy_cand: vec![Rational::zero(); net.m()],
            sink: vec![Rational::zero(); net.m()],
        }
    }

    /// Builds a flow from explicit voter→candidate values, deriving source and
    /// sink flows by conservation.
    pub fn from_voter_candidate(
        n: usize,
        m: usize,
        voter_cand: BTreeMap<(usize, usize), Rational>,
    ) -> Self {
        let mut source = vec![Rational::zero(); n];
        let mut sink = vec![Rational::zero(); m];
        for ((i, c), f) in &voter_cand {
            source[*i] += f;
            sink[*c] += f;
        }
        Self {
            source,
            voter_cand,
            dummy_source: Rational::zero(),
            dummy_cand: vec![Rational::zero(); m],
            sink,
        }
    }

    pub fn value(&self) -> Rational {
        sum(&self.sink)
    }

    pub fn source_flow(&self, voter: usize) -> &Rational {
        &self.source[voter]
    }

    pub fn voter_cand_flow(&self, voter: usize, c: usize) -> Rational {
        self.voter_cand
            .get(&(voter, c))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn dummy_source_flow(&self) -> &Rational {
        &self.dummy_source
    }

    pub fn dummy_cand_flow(&self, c: usize) -> &Rational {
        &self.dummy_cand[c]
    }

    pub fn sink_flow(&self, c: usize) -> &Rational {
        &self.sink[c]
    }

    pub fn sink_flows(&self) -> &[Rational] {
        &self.sink
    }

    /// Applies `delta` units along one residual arc: forward arcs gain flow,
    /// backward arcs shed it from their underlying arc. Low-level primitive
    /// for pushing flow around residual cycles; the caller is responsible for
    /// keeping the result feasible.
    pub fn apply_residual_arc(&mut self, from: Node, to: Node, delta: &Rational) {
        match (from, to) {
            (Node::Source, Node::Voter(i)) => self.source[i] += delta,
            (Node::Voter(i), Node::Source) => self.source[i] -= delta,
            (Node::Voter(i), Node::Candidate(c)) => {
                *self.voter_cand.entry((i, c)).or_insert_with(Rational::zero) += delta;
            }
            (Node::Candidate(c), Node::Voter(i)) => {
                *self.voter_cand.entry((i, c)).or_insert_with(Rational::zero) -= delta;
            }
            (Node::Source, Node::Dummy) => self.dummy_source += delta,
            (Node::Dummy, Node::Source) => self.dummy_source -= delta,
            (Node::Dummy, Node::Candidate(c)) => self.dummy_cand[c] += delta,
            (Node::Candidate(c), Node::Dummy) => self.dummy_cand[c] -= delta,
            (Node::Candidate(c), Node::Sink) => self.sink[c] += delta,
            (Node::Sink, Node::Candidate(c)) => self.sink[c] -= delta,
            (from, to) => panic!("({from:?}, {to:?}) is not an arc of an entitlement network"),
        }
    }

    /// Restriction of this flow to the candidates in `keep`: voter→candidate
    /// flows into other candidates are dropped and source/sink flows are
    /// recomputed by conservation.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> Self {
        let voter_cand: BTreeMap<_, _> = self
            .voter_cand
            .iter()
            .filter(|((_, c), _)| keep.contains(c))
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        let m = self.sink.len();
        let mut out = Self::from_voter_candidate(self.source.len(), m, voter_cand);
        for c in 0..m {
            if keep.contains(&c) {
                out.dummy_cand[c] = self.dummy_cand[c].clone();
                out.sink[c] += &self.dummy_cand[c];
            }
        }
        out.dummy_source = sum(&out.dummy_cand);
        out
    }
}

/// One arc of a residual graph, with its residual capacity and signed cost
/// (positive on forward arcs, negative on backward arcs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualArc {
    pub from: Node,
    pub to: Node,
    pub residual: Rational,
    pub cost: i64,
}

/// The residual graph of a flow: arcs with strictly positive residual
/// capacity only.
#[derive(Debug, Clone)]
pub struct ResidualGraph {
    arcs: Vec<ResidualArc>,
}

impl ResidualGraph {
    pub fn arcs(&self) -> &[ResidualArc] {
        &self.arcs
    }

    fn adjacency(&self) -> BTreeMap<Node, Vec<usize>> {
        let mut adj: BTreeMap<Node, Vec<usize>> = BTreeMap::new();
        for (idx, arc) in self.arcs.iter().enumerate() {
            adj.entry(arc.from).or_default().push(idx);
        }
        adj
    }

    /// Shortest path (by arc count) from `from` to any node accepted by
    /// `targets`, avoiding `avoid` entirely. Returns the arcs along the path.
    pub fn find_path(
        &self,
        from: Node,
        targets: &BTreeSet<Node>,
        avoid: &BTreeSet<Node>,
    ) -> Option<Vec<ResidualArc>> {
        let adj = self.adjacency();
        let mut parent: BTreeMap<Node, usize> = BTreeMap::new();
        let mut seen: BTreeSet<Node> = BTreeSet::new();
        let mut queue = VecDeque::from([from]);
        seen.insert(from);
        while let Some(u) = queue.pop_front() {
            for &idx in adj.get(&u).map(|v| v.as_slice()).unwrap_or(&[]) {
                let v = self.arcs[idx].to;
                if seen.contains(&v) || avoid.contains(&v) {
                    continue;
                }
                seen.insert(v);
                parent.insert(v, idx);
                if targets.contains(&v) {
                    let mut path = Vec::new();
                    let mut node = v;
                    while node != from {
                        let arc_idx = parent[&node];
                        path.push(self.arcs[arc_idx].clone());
                        node = self.arcs[arc_idx].from;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(v);
            }
        }
        None
    }

    /// Length in arcs of the shortest source→sink augmenting path, if any.
    pub fn shortest_augmenting_path_len(&self) -> Option<usize> {
        self.find_path(
            Node::Source,
            &BTreeSet::from([Node::Sink]),
            &BTreeSet::new(),
        )
        .map(|path| path.len())
    }
}

// ---------------------------------------------------------------------------
// Internal solver over twin-paired residual arcs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum ArcRole {
    Source(usize),
    DummySource,
    VoterCand(usize, usize),
    DummyCand(usize),
    Sink(usize),
}

struct Solver<'n> {
    net: &'n EntitlementNetwork,
    node_count: usize,
    sink_node: usize,
    // twin-paired arc arrays: arc 2j is forward, 2j+1 its reverse
    from: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<Rational>,
    flow: Vec<Rational>,
    cost: Vec<i64>,
    role: Vec<(usize, ArcRole)>,
    adj: Vec<Vec<usize>>,
}

impl<'n> Solver<'n> {
    fn new(net: &'n EntitlementNetwork) -> Self {
        let n = net.n();
        let m = net.m();
        let has_dummy = net.dummy_cap.is_some();
        let dummy_node = 1 + n;
        let cand_base = 1 + n + usize::from(has_dummy);
        let sink_node = cand_base + m;
        let node_count = sink_node + 1;
        let mut solver = Solver {
            net,
            node_count,
            sink_node,
            from: Vec::new(),
            to: Vec::new(),
            cap: Vec::new(),
            flow: Vec::new(),
            cost: Vec::new(),
            role: Vec::new(),
            adj: vec![Vec::new(); node_count],
        };
        let inner_cap = net.total_supply();
        for i in 0..n {
            solver.add_arc(0, 1 + i, net.entitlement[i].clone(), 0, ArcRole::Source(i));
        }
        if let Some(cap) = &net.dummy_cap {
            solver.add_arc(0, dummy_node, cap.clone(), 0, ArcRole::DummySource);
        }
        for i in 0..n {
            for &c in &net.approvals[i] {
                solver.add_arc(
                    1 + i,
                    cand_base + c,
                    inner_cap.clone(),
                    0,
                    ArcRole::VoterCand(i, c),
                );
            }
        }
        if has_dummy {
            for c in 0..m {
                if net.active[c] {
                    solver.add_arc(
                        dummy_node,
                        cand_base + c,
                        inner_cap.clone(),
                        0,
                        ArcRole::DummyCand(c),
                    );
                }
            }
        }
        for c in 0..m {
            if net.active[c] {
                let cost = net.costs.as_ref().map_or(0, |cs| cs[c] as i64);
                solver.add_arc(
                    cand_base + c,
                    sink_node,
                    net.sink_cap[c].clone(),
                    cost,
                    ArcRole::Sink(c),
                );
            }
        }
        if let Some(seed) = net.arc_shuffle {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for list in &mut solver.adj {
                list.shuffle(&mut rng);
            }
        }
        solver
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: Rational, cost: i64, role: ArcRole) {
        let id = self.from.len();
        self.from.push(from);
        self.to.push(to);
        self.cap.push(cap);
        self.flow.push(Rational::zero());
        self.cost.push(cost);
        self.adj[from].push(id);
        self.role.push((id, role));

        self.from.push(to);
        self.to.push(from);
        self.cap.push(Rational::zero());
        self.flow.push(Rational::zero());
        self.cost.push(-cost);
        self.adj[to].push(id + 1);
    }

    fn residual(&self, arc: usize) -> Rational {
        &self.cap[arc] - &self.flow[arc]
    }

    fn push(&mut self, arc: usize, delta: &Rational) {
        self.flow[arc] += delta;
        let twin = arc ^ 1;
        self.flow[twin] -= delta;
    }

    fn load(&mut self, flow: &Flow) {
        for (id, role) in self.role.clone() {
            let value = match role {
                ArcRole::Source(i) => flow.source[i].clone(),
                ArcRole::DummySource => flow.dummy_source.clone(),
                ArcRole::VoterCand(i, c) => flow.voter_cand_flow(i, c),
                ArcRole::DummyCand(c) => flow.dummy_cand[c].clone(),
                ArcRole::Sink(c) => flow.sink[c].clone(),
            };
            self.flow[id] = value.clone();
            self.flow[id ^ 1] = -value;
        }
    }

    fn extract(&self) -> Flow {
        let mut out = Flow::zero(self.net);
        for &(id, role) in &self.role {
            let value = self.flow[id].clone();
            if value.is_zero() {
                continue;
            }
            match role {
                ArcRole::Source(i) => out.source[i] = value,
                ArcRole::DummySource => out.dummy_source = value,
                ArcRole::VoterCand(i, c) => {
                    out.voter_cand.insert((i, c), value);
                }
                ArcRole::DummyCand(c) => out.dummy_cand[c] = value,
                ArcRole::Sink(c) => out.sink[c] = value,
            }
        }
        out
    }

    /// Edmonds-Karp: augment along shortest (fewest-arc) paths until none.
    fn run_max_flow(&mut self) {
        loop {
            let mut parent: Vec<Option<usize>> = vec![None; self.node_count];
            let mut seen = vec![false; self.node_count];
            seen[0] = true;
            let mut queue = VecDeque::from([0usize]);
            'bfs: while let Some(u) = queue.pop_front() {
                for idx in 0..self.adj[u].len() {
                    let arc = self.adj[u][idx];
                    let v = self.to[arc];
                    if seen[v] || self.residual(arc).is_zero() {
                        continue;
                    }
                    seen[v] = true;
                    parent[v] = Some(arc);
                    if v == self.sink_node {
                        break 'bfs;
                    }
                    queue.push_back(v);
                }
            }
            if parent[self.sink_node].is_none() {
                break;
            }
            let mut bottleneck: Option<Rational> = None;
            let mut v = self.sink_node;
            while v != 0 {
                let arc = parent[v].unwrap();
                let r = self.residual(arc);
                bottleneck = Some(match bottleneck {
                    Some(b) if b <= r => b,
                    _ => r,
                });
                v = self.from[arc];
            }
            let delta = bottleneck.unwrap();
            let mut v = self.sink_node;
            while v != 0 {
                let arc = parent[v].unwrap();
                self.push(arc, &delta);
                v = self.from[arc];
            }
        }
    }

    /// Successive shortest paths: repeatedly augment along a minimum-cost
    /// (then fewest-arc) path found by label-correcting relaxation over the
    /// signed residual costs. Starting from the zero flow this maintains the
    /// invariant that the current flow is cheapest among flows of its value,
    /// so the residual graph never contains a negative cycle; the relaxation
    /// depth assertion below enforces that.
    fn run_min_cost_max_flow(&mut self) {
        loop {
            let mut dist: Vec<Option<(i64, usize)>> = vec![None; self.node_count];
            let mut parent: Vec<Option<usize>> = vec![None; self.node_count];
            dist[0] = Some((0, 0));
            let mut changed = true;
            let mut rounds = 0usize;
            while changed {
                changed = false;
                rounds += 1;
                assert!(
                    rounds <= self.node_count + 1,
                    "negative-cost cycle in residual graph"
                );
                for arc in 0..self.from.len() {
                    if self.residual(arc).is_zero() {
                        continue;
                    }
                    let u = self.from[arc];
                    let Some((du, hu)) = dist[u] else { continue };
                    let cand = (du + self.cost[arc], hu + 1);
                    let v = self.to[arc];
                    if dist[v].is_none_or(|dv| cand < dv) {
                        dist[v] = Some(cand);
                        parent[v] = Some(arc);
                        changed = true;
                    }
                }
            }
            if dist[self.sink_node].is_none() {
                break;
            }
            let mut bottleneck: Option<Rational> = None;
            let mut v = self.sink_node;
            while v != 0 {
                let arc = parent[v].unwrap();
                let r = self.residual(arc);
                bottleneck = Some(match bottleneck {
                    Some(b) if b <= r => b,
                    _ => r,
                });
                v = self.from[arc];
            }
            let delta = bottleneck.unwrap();
            let mut v = self.sink_node;
            while v != 0 {
                let arc = parent[v].unwrap();
                self.push(arc, &delta);
                v = self.from[arc];
            }
        }
    }

    fn node_label(&self, node: usize) -> Node {
        let n = self.net.n();
        let has_dummy = self.net.dummy_cap.is_some();
        let cand_base = 1 + n + usize::from(has_dummy);
        if node == 0 {
            Node::Source
        } else if node <= n {
            Node::Voter(node - 1)
        } else if has_dummy && node == n + 1 {
            Node::Dummy
        } else if node < self.sink_node {
            Node::Candidate(node - cand_base)
        } else {
            Node::Sink
        }
    }

    fn residual_graph(&self) -> ResidualGraph {
        let mut arcs = Vec::new();
        for arc in 0..self.from.len() {
            let r = self.residual(arc);
            if r.is_zero() {
                continue;
            }
            arcs.push(ResidualArc {
                from: self.node_label(self.from[arc]),
                to: self.node_label(self.to[arc]),
                residual: r,
                cost: self.cost[arc],
            });
        }
        ResidualGraph { arcs }
    }

    /// Voters reachable from the source in the residual graph; for a max
    /// flow this is the source side of a minimum cut.
    fn reachable_voters(&self) -> BTreeSet<usize> {
        let mut seen = vec![false; self.node_count];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &arc in &self.adj[u] {
                let v = self.to[arc];
                if !seen[v] && !self.residual(arc).is_zero() {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        (0..self.net.n()).filter(|&i| seen[1 + i]).collect()
    }
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Maximum flow by shortest augmenting paths, optionally warm-started.
///
/// A warm start is validated for feasibility first; augmentation only ever
/// raises flows on source and sink arcs, so the result dominates the warm
/// start on every candidate→sink arc.
pub fn max_flow(net: &EntitlementNetwork, warm_start: Option<&Flow>) -> Result<Flow> {
    let mut solver = Solver::new(net);
    if let Some(warm) = warm_start {
        net.check_feasible(warm)?;
        solver.load(warm);
    }
    solver.run_max_flow();
    Ok(solver.extract())
}

/// Minimum-cost maximum flow under a sink-distinct cost function.
///
/// Among all maximum flows, the returned one minimizes the total cost
/// `Σ cost(u,v)·f(u,v)`; with sink-distinct costs its candidate→sink flow
/// vector is unique, so the result does not depend on arc order.
pub fn min_cost_max_flow(net: &EntitlementNetwork) -> Result<Flow> {
    if net.costs.is_none() {
        return Err(Error::MissingCosts(
            "min-cost max-flow requires candidate costs".into(),
        ));
    }
    let mut solver = Solver::new(net);
    solver.run_min_cost_max_flow();
    Ok(solver.extract())
}

/// The residual graph of a feasible flow: forward arcs with their unused
/// capacity and cost, backward arcs with the flow they can undo and the
/// negated cost.
pub fn residual(net: &EntitlementNetwork, flow: &Flow) -> Result<ResidualGraph> {
    net.check_feasible(flow)?;
    let mut solver = Solver::new(net);
    solver.load(flow);
    Ok(solver.residual_graph())
}

/// Source-side voters of a minimum cut of `net` under a maximum flow.
pub fn min_cut_voter_side(net: &EntitlementNetwork, flow: &Flow) -> Result<BTreeSet<usize>> {
    net.check_feasible(flow)?;
    let mut solver = Solver::new(net);
    solver.load(flow);
    Ok(solver.reachable_voters())
}

/// The fractional committee given by a flow: `p_c = f(c, t)`.
pub fn committee_of_flow(net: &EntitlementNetwork, flow: &Flow) -> Result<Vec<Rational>> {
    net.check_feasible(flow)?;
    Ok(flow.sink.clone())
}

/// Brute-force minimum-cut value: enumerates every voter subset `T` (and the
/// dummy, when present) and takes the minimum of
/// `Σ_{i∉T} entitlement_i + Σ_{c ∈ ∪_{i∈T} A_i} cap(c,t)`.
///
/// Exponential in the number of voters; refuses more than 20.
pub fn min_cut_value_oracle(net: &EntitlementNetwork) -> Result<Rational> {
    let n = net.n();
    if n > 20 {
        return Err(Error::TooLarge(format!(
            "min-cut enumeration limited to 20 voters, got {n}"
        )));
    }
    let total_ent = sum(&net.entitlement);
    let all_active_cap: Rational = sum((0..net.m())
        .filter(|&c| net.active[c])
        .map(|c| &net.sink_cap[c]));
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1u32 << n) {
        let mut union: BTreeSet<usize> = BTreeSet::new();
        let mut source_side_ent = Rational::zero();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                source_side_ent += &net.entitlement[i];
                union.extend(net.approvals[i].iter().copied());
            }
        }
        let base = &total_ent - &source_side_ent + sum(union.iter().map(|&c| &net.sink_cap[c]));
        for dummy_in in [false, true] {
            let value = match (&net.dummy_cap, dummy_in) {
                (None, true) => continue,
                (None, false) => base.clone(),
                // dummy on the sink side: its source arc is cut
                (Some(cap), false) => &base + cap,
                // dummy on the source side: every active sink arc is cut
                (Some(_), true) => &total_ent - &source_side_ent + &all_active_cap,
            };
            best = Some(match best {
                Some(b) if b <= value => b,
                _ => value,
            });
        }
    }
    Ok(best.expect("at least the empty subset"))
}
