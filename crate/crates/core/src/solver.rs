//! Exact solvers for transportation instances with integer masses.
//!
//! Diagrams are kept multiplicity-compressed, so the assignment problems
//! behind the Wasserstein distances are solved as transportation problems:
//! min-cost flow by successive shortest paths for summed costs, and
//! threshold feasibility by augmenting-path max-flow for the bottleneck case.
//! On unit multiplicities the former specializes to the Hungarian method's
//! O(n^3) behavior.
//!
//! Forbidden (infinite-cost) arcs are simply absent; a routing shortfall is
//! reported, not an error.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Arc-level flow between a supply row and a demand column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Shipment {
    pub row: usize,
    pub col: usize,
    pub amount: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct TransportOutcome {
    pub shipments: Vec<Shipment>,
    /// Mass actually routed; less than the total supply when finite-cost
    /// arcs cannot carry everything.
    pub routed: u64,
}

struct FlowGraph {
    n: usize,
    // flat arc storage; arc i and its reverse i^1 are adjacent
    to: Vec<usize>,
    cap: Vec<u64>,
    cost: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

impl FlowGraph {
    fn new(n: usize) -> FlowGraph {
        FlowGraph {
            n,
            to: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u64, cost: f64) -> usize {
        let id = self.to.len();
        self.to.push(to);
        self.cap.push(cap);
        self.cost.push(cost);
        self.adj[from].push(id);
        self.to.push(from);
        self.cap.push(0);
        self.cost.push(-cost);
        self.adj[to].push(id + 1);
        id
    }
}

/// Node layout shared by both solvers: source, rows, cols, sink.
struct Layout {
    rows: usize,
    cols: usize,
}

impl Layout {
    fn source(&self) -> usize {
        0
    }
    fn row(&self, i: usize) -> usize {
        1 + i
    }
    fn col(&self, j: usize) -> usize {
        1 + self.rows + j
    }
    fn sink(&self) -> usize {
        1 + self.rows + self.cols
    }
    fn nodes(&self) -> usize {
        self.rows + self.cols + 2
    }
}

fn build_graph(
    supply: &[u64],
    demand: &[u64],
    arc_cost: &mut dyn FnMut(usize, usize) -> Option<f64>,
) -> (FlowGraph, Layout, Vec<Vec<Option<usize>>>) {
    let layout = Layout {
        rows: supply.len(),
        cols: demand.len(),
    };
    let mut g = FlowGraph::new(layout.nodes());
    for (i, &s) in supply.iter().enumerate() {
        if s > 0 {
            g.add_arc(layout.source(), layout.row(i), s, 0.0);
        }
    }
    let mut arc_ids = vec![vec![None; demand.len()]; supply.len()];
    for i in 0..supply.len() {
        for j in 0..demand.len() {
            if supply[i] == 0 || demand[j] == 0 {
                continue;
            }
            if let Some(c) = arc_cost(i, j) {
                debug_assert!(c >= 0.0 && c.is_finite());
                arc_ids[i][j] = Some(g.add_arc(
                    layout.row(i),
                    layout.col(j),
                    supply[i].min(demand[j]),
                    c,
                ));
            }
        }
    }
    for (j, &d) in demand.iter().enumerate() {
        if d > 0 {
            g.add_arc(layout.col(j), layout.sink(), d, 0.0);
        }
    }
    (g, layout, arc_ids)
}

fn collect_shipments(g: &FlowGraph, arc_ids: &[Vec<Option<usize>>]) -> Vec<Shipment> {
    let mut out = Vec::new();
    for (i, row) in arc_ids.iter().enumerate() {
        for (j, id) in row.iter().enumerate() {
            if let Some(id) = id {
                // flow on a forward arc equals the reverse residual
                let amount = g.cap[id + 1];
                if amount > 0 {
                    out.push(Shipment { row: i, col: j, amount });
                }
            }
        }
    }
    out
}

/// Minimum-cost routing of `supply` into `demand` over the arcs where
/// `arc_cost` returns a finite cost. Totals need not match; the solver routes
/// as much as finite arcs allow and reports it.
pub(crate) fn min_cost_transport(
    supply: &[u64],
    demand: &[u64],
    mut arc_cost: impl FnMut(usize, usize) -> Option<f64>,
) -> TransportOutcome {
    let (mut g, layout, arc_ids) = build_graph(supply, demand, &mut arc_cost);
    let total: u64 = supply.iter().sum::<u64>().min(demand.iter().sum());
    let (src, snk, n) = (layout.source(), layout.sink(), layout.nodes());

    let mut potential = vec![0.0f64; n];
    let mut dist = vec![f64::INFINITY; n];
    let mut prev_arc = vec![usize::MAX; n];
    let mut routed = 0u64;

    while routed < total {
        // Dijkstra over reduced costs; ties break on node index so the
        // search order, and hence the reported matching, is deterministic
        dist.fill(f64::INFINITY);
        prev_arc.fill(usize::MAX);
        dist[src] = 0.0;
        let mut heap: BinaryHeap<Reverse<(OrdF64, usize)>> = BinaryHeap::new();
        heap.push(Reverse((OrdF64(0.0), src)));
        while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &id in &g.adj[u] {
                if g.cap[id] == 0 {
                    continue;
                }
                let v = g.to[id];
                // clamp float noise in the reduced cost
                let rc = (g.cost[id] + potential[u] - potential[v]).max(0.0);
                let nd = d + rc;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev_arc[v] = id;
                    heap.push(Reverse((OrdF64(nd), v)));
                }
            }
        }
        if !dist[snk].is_finite() {
            break;
        }
        for v in 0..n {
            if dist[v].is_finite() {
                potential[v] += dist[v];
            }
        }
        // push the full bottleneck of the shortest path
        let mut bottleneck = total - routed;
        let mut v = snk;
        while v != src {
            let id = prev_arc[v];
            bottleneck = bottleneck.min(g.cap[id]);
            v = g.to[id ^ 1];
        }
        let mut v = snk;
        while v != src {
            let id = prev_arc[v];
            g.cap[id] -= bottleneck;
            g.cap[id ^ 1] += bottleneck;
            v = g.to[id ^ 1];
        }
        routed += bottleneck;
    }

    TransportOutcome {
        shipments: collect_shipments(&g, &arc_ids),
        routed,
    }
}

/// Max-flow by BFS augmenting paths (capacities pushed in bulk).
fn max_flow(g: &mut FlowGraph, src: usize, snk: usize, want: u64) -> u64 {
    let mut routed = 0u64;
    let mut prev = vec![usize::MAX; g.n];
    while routed < want {
        prev.fill(usize::MAX);
        prev[src] = usize::MAX - 1;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(src);
        'bfs: while let Some(u) = queue.pop_front() {
            for &id in &g.adj[u] {
                let v = g.to[id];
                if g.cap[id] > 0 && prev[v] == usize::MAX {
                    prev[v] = id;
                    if v == snk {
                        break 'bfs;
                    }
                    queue.push_back(v);
                }
            }
        }
        if prev[snk] == usize::MAX {
            break;
        }
        let mut bottleneck = want - routed;
        let mut v = snk;
        while v != src {
            let id = prev[v];
            bottleneck = bottleneck.min(g.cap[id]);
            v = g.to[id ^ 1];
        }
        let mut v = snk;
        while v != src {
            let id = prev[v];
            g.cap[id] -= bottleneck;
            g.cap[id ^ 1] += bottleneck;
            v = g.to[id ^ 1];
        }
        routed += bottleneck;
    }
    routed
}

/// Bottleneck transportation: the least threshold `t` such that all mass can
/// be routed using arcs of cost `<= t`, found by binary search over the
/// distinct arc costs with a max-flow feasibility test at each probe.
pub(crate) fn bottleneck_transport(
    supply: &[u64],
    demand: &[u64],
    mut arc_cost: impl FnMut(usize, usize) -> Option<f64>,
) -> Option<TransportOutcome> {
    let total: u64 = supply.iter().sum::<u64>().min(demand.iter().sum());
    if total == 0 {
        return Some(TransportOutcome { shipments: Vec::new(), routed: 0 });
    }
    let mut costs: Vec<Vec<Option<f64>>> = vec![vec![None; demand.len()]; supply.len()];
    let mut candidates: Vec<f64> = vec![0.0];
    for (i, row) in costs.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = arc_cost(i, j);
            if let Some(c) = *slot {
                candidates.push(c);
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let feasible = |threshold: f64| -> Option<TransportOutcome> {
        let (mut g, layout, arc_ids) = build_graph(supply, demand, &mut |i, j| {
            costs[i][j].filter(|&c| c <= threshold)
        });
        if max_flow(&mut g, layout.source(), layout.sink(), total) < total {
            None
        } else {
            Some(TransportOutcome {
                shipments: collect_shipments(&g, &arc_ids),
                routed: total,
            })
        }
    };

    feasible(*candidates.last().unwrap())?;
    let mut lo = 0usize; // known infeasible below, unless candidate 0 works
    let mut hi = candidates.len() - 1; // known feasible
    if feasible(candidates[0]).is_some() {
        hi = 0;
    }
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    feasible(candidates[hi])
}

/// f64 wrapper ordered by `total_cmp` for use in the heap.
#[derive(PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
