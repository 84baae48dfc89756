//! Traveling salesman with time windows.
//!
//! A tour starts at the depot (node 0), visits every customer once and
//! returns to the depot. Arriving before a node's ready time means waiting;
//! arriving after its due time is allowed but counts as one violation. The
//! score is `-(length + 1e6 * violations)`.

use crate::error::{Error, Result};
use crate::problem::{IllegalMove, MoveDescriptor, Problem};

/// Penalty per violated time window.
pub const VIOLATION_PENALTY: f64 = 1e6;

/// Scale of the distance bias.
pub const BIAS_SCALE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: i64,
    pub x: f64,
    pub y: f64,
    pub ready: f64,
    pub due: f64,
    pub service: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsptwInstance {
    nodes: Vec<Node>,
    distances: Vec<f64>,
    dmin: f64,
    dmax: f64,
}

impl TsptwInstance {
    /// Builds an instance from nodes, the first being the depot.
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Config(format!(
                "an instance needs at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        let n = nodes.len();
        let mut distances = vec![0.0; n * n];
        let (mut dmin, mut dmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (dx, dy) = (nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y);
                let d = (dx * dx + dy * dy).sqrt();
                distances[i * n + j] = d;
                dmin = dmin.min(d);
                dmax = dmax.max(d);
            }
        }
        Ok(Self {
            nodes,
            distances,
            dmin,
            dmax,
        })
    }

    /// Parses whitespace-separated node lines:
    /// `id x y demand ready due service`, the depot first.
    ///
    /// Blank lines, lines starting with `#` or `!`, and column-title lines
    /// with no numeric field are skipped. A line whose id is 999 ends the
    /// node list.
    pub fn parse(text: &str) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('!') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let numbers: Vec<Option<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
            if numbers.iter().all(Option::is_none) {
                continue;
            }
            if fields.len() != 7 {
                return Err(Error::parse(
                    line_no,
                    format!("expected 7 fields, found {}", fields.len()),
                ));
            }
            let values: Vec<f64> = numbers
                .iter()
                .zip(&fields)
                .map(|(v, f)| {
                    v.filter(|v| v.is_finite())
                        .ok_or_else(|| Error::parse(line_no, format!("invalid number {f:?}")))
                })
                .collect::<Result<_>>()?;
            if values[0].fract() != 0.0 {
                return Err(Error::parse(line_no, "node id must be an integer"));
            }
            let id = values[0] as i64;
            if id == 999 && nodes.len() >= 2 {
                break;
            }
            let (ready, due) = (values[4], values[5]);
            if ready > due {
                return Err(Error::parse(
                    line_no,
                    format!("ready time {ready} exceeds due time {due}"),
                ));
            }
            if values[6] < 0.0 {
                return Err(Error::parse(line_no, "negative service time"));
            }
            nodes.push(Node {
                id,
                x: values[1],
                y: values[2],
                ready,
                due,
                service: values[6],
            });
        }
        if nodes.len() < 2 {
            return Err(Error::parse(
                last_line.max(1),
                format!("need at least 2 nodes, found {}", nodes.len()),
            ));
        }
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.nodes.len() + j]
    }

    /// Smallest distance between two distinct nodes.
    pub fn dmin(&self) -> f64 {
        self.dmin
    }

    /// Largest distance between two distinct nodes.
    pub fn dmax(&self) -> f64 {
        self.dmax
    }

    pub fn initial_state(&self) -> TsptwState {
        let mut visited = vec![false; self.nodes.len()];
        visited[0] = true;
        TsptwState {
            current: 0,
            visited,
            visited_count: 1,
            time: self.nodes[0].ready.max(0.0),
            violations: 0,
            distance: 0.0,
            finished: false,
        }
    }

    /// Travels from the current node to `next`, waiting for its ready time
    /// and counting a violation when the arrival is past its due time.
    /// The depot may only be entered once every customer has been visited.
    pub fn step(&self, state: &mut TsptwState, next: usize) -> Result<(), IllegalMove> {
        if state.finished {
            return Err(IllegalMove("tour already finished".into()));
        }
        if next >= self.nodes.len() {
            return Err(IllegalMove(format!("node index {next} out of range")));
        }
        if next == 0 {
            if state.visited_count < self.nodes.len() {
                return Err(IllegalMove(format!(
                    "depot entered with {} customers unvisited",
                    self.nodes.len() - state.visited_count
                )));
            }
        } else if state.visited[next] {
            return Err(IllegalMove(format!("node {next} visited twice")));
        }
        let leg = self.distance(state.current, next);
        let node = &self.nodes[next];
        let arrival = state.time + leg;
        if arrival > node.due {
            state.violations += 1;
        }
        state.time = arrival.max(node.ready) + node.service;
        state.distance += leg;
        state.current = next;
        if next == 0 {
            state.finished = true;
        } else {
            state.visited[next] = true;
            state.visited_count += 1;
        }
        Ok(())
    }

    /// `-(length + 1e6 * violations)` of a finished tour.
    pub fn score(&self, state: &TsptwState) -> Result<f64> {
        if !state.finished {
            return Err(Error::NotTerminal);
        }
        Ok(tcost_score(state.distance, state.violations))
    }
}

/// Negated penalized cost.
pub fn tcost_score(distance: f64, violations: u32) -> f64 {
    -(distance + VIOLATION_PENALTY * violations as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsptwState {
    pub current: usize,
    pub visited: Vec<bool>,
    /// Visited nodes, the depot included.
    pub visited_count: usize,
    pub time: f64,
    pub violations: u32,
    pub distance: f64,
    /// Back at the depot after visiting every customer.
    pub finished: bool,
}

/// Sign of the distance bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BiasSign {
    /// `-10 (d - dmin) / (dmax - dmin)`: near cities are favored.
    #[default]
    Negated,
    /// `+10 (d - dmin) / (dmax - dmin)`: far cities are favored.
    Literal,
}

/// Normalized distance bias for travelling from `i` to `j`, in `[-10, 0]`
/// (negated) or `[0, 10]` (literal). Zero when all distances are equal.
pub fn tsptw_bias(instance: &TsptwInstance, i: usize, j: usize, sign: BiasSign) -> f64 {
    debug_assert_ne!(i, j);
    let span = instance.dmax - instance.dmin;
    if span <= 0.0 {
        return 0.0;
    }
    let magnitude = BIAS_SCALE * (instance.distance(i, j) - instance.dmin) / span;
    match sign {
        BiasSign::Negated => -magnitude,
        BiasSign::Literal => magnitude,
    }
}

/// Search problem over one instance. Move `j` means "travel to node `j`";
/// its code is `current * n + j`.
#[derive(Debug, Clone)]
pub struct Tsptw {
    instance: TsptwInstance,
    bias: Option<BiasSign>,
    bias_table: Vec<f64>,
}

impl Tsptw {
    /// Unbiased problem.
    pub fn new(instance: TsptwInstance) -> Self {
        Self::with_bias(instance, None)
    }

    pub fn with_bias(instance: TsptwInstance, bias: Option<BiasSign>) -> Self {
        let n = instance.len();
        let bias_table = (0..n * n)
            .map(|k| match bias {
                Some(sign) if k / n != k % n => tsptw_bias(&instance, k / n, k % n, sign),
                _ => 0.0,
            })
            .collect();
        Self {
            instance,
            bias,
            bias_table,
        }
    }

    pub fn instance(&self) -> &TsptwInstance {
        &self.instance
    }

    pub fn bias_sign(&self) -> Option<BiasSign> {
        self.bias
    }

    /// Code of the move from `i` to `j`.
    pub fn code(&self, i: usize, j: usize) -> u64 {
        (i * self.instance.len() + j) as u64
    }

    /// Bias of the move from `i` to `j` under this problem's configuration.
    pub fn bias(&self, i: usize, j: usize) -> f64 {
        self.bias_table[i * self.instance.len() + j]
    }
}

impl Problem for Tsptw {
    type State = TsptwState;
    type Move = usize;

    fn initial_state(&self) -> TsptwState {
        self.instance.initial_state()
    }

    fn is_terminal(&self, state: &TsptwState) -> bool {
        state.finished
    }

    fn legal_moves(&self, state: &TsptwState, out: &mut Vec<MoveDescriptor<usize>>) {
        if state.finished {
            return;
        }
        let n = self.instance.len();
        let from = state.current;
        let row = &self.bias_table[from * n..(from + 1) * n];
        if state.visited_count == n {
            out.push(MoveDescriptor::new(0, self.code(from, 0), row[0]));
            return;
        }
        for (j, &seen) in state.visited.iter().enumerate().skip(1) {
            if !seen {
                out.push(MoveDescriptor::new(j, self.code(from, j), row[j]));
            }
        }
    }

    fn play(&self, state: &mut TsptwState, mv: &usize) -> Result<(), IllegalMove> {
        self.instance.step(state, *mv)
    }

    fn score(&self, state: &TsptwState) -> Result<f64> {
        self.instance.score(state)
    }
}
