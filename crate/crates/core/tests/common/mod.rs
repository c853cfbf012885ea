#![allow(dead_code)]

use hensched::hen::{HotAssignment, HotInlet};
use hensched::{ExchangerResult, NetworkTopology, StreamState};
use rand::Rng;

/// Counterflow exchanger integrated over `slices` trapezoidal slices.
///
/// Cold enters at node 0, hot at node `slices`. Each slice exchanges
/// `g·(mean hot − mean cold)` with `g = UA·F/slices`. The hot outlet is found
/// by shooting: the march is affine in the guessed hot outlet, so two shots
/// determine it.
pub fn slice_counterflow(
    cold_in: &StreamState,
    hot_in: &StreamState,
    ua: f64,
    f: f64,
    slices: usize,
) -> (f64, f64) {
    let cc = cold_in.capacity_rate();
    let ch = hot_in.capacity_rate();
    let g = ua * f / slices as f64;
    let half = 0.5 * g;

    let march = |hot_out: f64| -> (f64, f64) {
        let (mut tc, mut th) = (cold_in.temperature, hot_out);
        for _ in 0..slices {
            // (cc + g/2)·a − (g/2)·b = cc·tc + (g/2)(th − tc)
            // (g/2)·a + (ch − g/2)·b = ch·th + (g/2)(th − tc)
            let (a11, a12, a21, a22) = (cc + half, -half, half, ch - half);
            let r1 = cc * tc + half * (th - tc);
            let r2 = ch * th + half * (th - tc);
            let det = a11 * a22 - a12 * a21;
            let a = (r1 * a22 - a12 * r2) / det;
            let b = (a11 * r2 - a21 * r1) / det;
            tc = a;
            th = b;
        }
        (tc, th)
    };

    let s0 = cold_in.temperature;
    let s1 = hot_in.temperature;
    let (_, h0) = march(s0);
    let (_, h1) = march(s1);
    let hot_out = s0 + (hot_in.temperature - h0) * (s1 - s0) / (h1 - h0);
    let (cold_out, _) = march(hot_out);
    (cold_out, hot_out)
}

/// Random exchanger operating point: inlets, UA and F. With `near_balanced`
/// the capacity ratio is within 1e-6 of one.
pub fn random_case(rng: &mut impl Rng, near_balanced: bool) -> (StreamState, StreamState, f64, f64) {
    let t_cold = rng.random_range(280.0..450.0);
    let t_hot = t_cold + rng.random_range(5.0..250.0);
    let cc = rng.random_range(1e3..5e5);
    let ratio = if near_balanced {
        1.0 + rng.random_range(-1e-6..1e-6)
    } else {
        rng.random_range(0.2..5.0)
    };
    let cp_cold = rng.random_range(1800.0..2600.0);
    let cp_hot = rng.random_range(1800.0..3000.0);
    let cold = StreamState::new(t_cold, cc / cp_cold, cp_cold);
    let hot = StreamState::new(t_hot, ratio * cc / cp_hot, cp_hot);
    let ntu = rng.random_range(0.05..5.0);
    let ua = ntu * hot.capacity_rate();
    let f = rng.random_range(0.7..=1.0);
    (cold, hot, ua, f)
}

/// Random wiring: `n` exchangers on the cold path, `1..=n` hot streams with
/// random visit sequences.
pub fn random_topology(rng: &mut impl Rng, n: usize) -> NetworkTopology {
    let streams = rng.random_range(1..=n);
    let ids: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
    let mut per_stream: Vec<Vec<usize>> = vec![Vec::new(); streams];
    for (i, slot) in (0..n).map(|i| (i, i % streams)) {
        per_stream[slot].push(i);
    }
    let mut hot_assignments = Vec::new();
    for (s, members) in per_stream.iter_mut().enumerate() {
        // shuffle visit order
        for i in (1..members.len()).rev() {
            let j = rng.random_range(0..=i);
            members.swap(i, j);
        }
        for (k, &e) in members.iter().enumerate() {
            hot_assignments.push(HotAssignment {
                exchanger: ids[e].clone(),
                stream: format!("S{s}"),
                order: k as u32 + 1,
            });
        }
    }
    NetworkTopology {
        cold_path: ids,
        hot_assignments,
        cold_inlet: StreamState::new(
            rng.random_range(290.0..320.0),
            rng.random_range(50.0..150.0),
            rng.random_range(1900.0..2300.0),
        ),
        hot_inlets: (0..streams)
            .map(|s| HotInlet {
                id: format!("S{s}"),
                state: StreamState::new(
                    rng.random_range(520.0..650.0),
                    rng.random_range(10.0..80.0),
                    rng.random_range(2300.0..2900.0),
                ),
            })
            .collect(),
    }
}

/// Inlet temperatures seen by each exchanger of a solved network, in path
/// order: (cold inlet, hot inlet).
pub fn network_inlets(topo: &NetworkTopology, results: &[ExchangerResult]) -> Vec<(f64, f64)> {
    let pos = |id: &str| topo.cold_path.iter().position(|p| p == id).unwrap();
    let mut hot_in = vec![0.0; topo.cold_path.len()];
    for a in &topo.hot_assignments {
        let me = pos(&a.exchanger);
        hot_in[me] = if a.order == 1 {
            topo.hot_inlets.iter().find(|h| h.id == a.stream).unwrap().state.temperature
        } else {
            let prev = topo
                .hot_assignments
                .iter()
                .find(|b| b.stream == a.stream && b.order == a.order - 1)
                .unwrap();
            results[pos(&prev.exchanger)].t_hot_out
        };
    }
    let mut cold = topo.cold_inlet.temperature;
    hot_in
        .into_iter()
        .zip(results)
        .map(|(h, r)| {
            let c = cold;
            cold = r.t_cold_out;
            (c, h)
        })
        .collect()
}

/// Capacity rate of the hot stream feeding each path position.
pub fn hot_capacity(topo: &NetworkTopology) -> Vec<f64> {
    topo.cold_path
        .iter()
        .map(|id| {
            let a = topo.hot_assignments.iter().find(|a| &a.exchanger == id).unwrap();
            topo.hot_inlets
                .iter()
                .find(|h| h.id == a.stream)
                .unwrap()
                .state
                .capacity_rate()
        })
        .collect()
}

pub fn sphere(x: &[f64]) -> Result<f64, std::convert::Infallible> {
    Ok(x.iter().map(|v| v * v).sum())
}
