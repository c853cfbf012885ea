//! Steady-state thermal model of counterflow shell-and-tube exchangers and of
//! networks built from them.
//!
//! A single exchanger is solved in closed form from its inlet streams, its
//! conductance `UA` and the LMTD correction factor `F`. A network threads one
//! cold (crude) stream through every exchanger in path order and each hot
//! stream through the exchangers assigned to it, iterating on the
//! inter-exchanger temperatures until they settle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::HenError;

/// Below this capacity-ratio offset the balanced-counterflow limit is used.
pub const BALANCED_RATIO_TOLERANCE: f64 = 1e-9;
/// Fixed-point tolerance on inter-exchanger temperatures, kelvin.
pub const NETWORK_TOLERANCE_K: f64 = 1e-6;
/// Sweep cap for [`solve_network`].
pub const MAX_NETWORK_SWEEPS: usize = 500;
const POLISH_SWEEPS: usize = 200;

/// Temperature, flow and heat capacity of a stream at a network node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamState {
    #[serde(rename = "temperature_k")]
    pub temperature: f64,
    #[serde(rename = "mass_flow_kg_per_s")]
    pub mass_flow: f64,
    #[serde(rename = "specific_heat_j_per_kg_k")]
    pub specific_heat: f64,
}

impl StreamState {
    pub fn new(temperature: f64, mass_flow: f64, specific_heat: f64) -> Self {
        Self {
            temperature,
            mass_flow,
            specific_heat,
        }
    }

    /// Heat capacity rate `m·c_p`, W/K.
    pub fn capacity_rate(&self) -> f64 {
        self.mass_flow * self.specific_heat
    }

    /// Same stream at a different temperature.
    pub fn at(&self, temperature: f64) -> Self {
        Self {
            temperature,
            ..*self
        }
    }

    /// Returns the name of the first violated field, if any.
    pub fn invalid_field(&self) -> Option<&'static str> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            Some("temperature_k")
        } else if !(self.mass_flow > 0.0 && self.mass_flow.is_finite()) {
            Some("mass_flow_kg_per_s")
        } else if !(self.specific_heat > 0.0 && self.specific_heat.is_finite()) {
            Some("specific_heat_j_per_kg_k")
        } else {
            None
        }
    }
}

/// Tube bundle geometry and film coefficients of one exchanger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangerGeometry {
    #[serde(rename = "area_m2")]
    pub area: f64,
    #[serde(rename = "outer_diameter_m")]
    pub d_outer: f64,
    #[serde(rename = "inner_diameter_m")]
    pub d_inner: f64,
    #[serde(rename = "wall_conductivity_w_per_m_k")]
    pub wall_conductivity: f64,
    #[serde(rename = "tube_film_coefficient_w_per_m2_k")]
    pub h_tube: f64,
    #[serde(rename = "shell_film_coefficient_w_per_m2_k")]
    pub h_shell: f64,
    #[serde(rename = "lmtd_correction", default = "default_lmtd_correction")]
    pub lmtd_correction: f64,
}

fn default_lmtd_correction() -> f64 {
    1.0
}

impl ExchangerGeometry {
    /// Returns the serialized name of the first violated field, if any.
    pub fn invalid_field(&self) -> Option<&'static str> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.area) {
            Some("area_m2")
        } else if !positive(self.d_inner) {
            Some("inner_diameter_m")
        } else if !positive(self.d_outer) {
            Some("outer_diameter_m")
        } else if self.d_inner >= self.d_outer {
            Some("inner_diameter_m")
        } else if !positive(self.wall_conductivity) {
            Some("wall_conductivity_w_per_m_k")
        } else if !positive(self.h_tube) {
            Some("tube_film_coefficient_w_per_m2_k")
        } else if !positive(self.h_shell) {
            Some("shell_film_coefficient_w_per_m2_k")
        } else if !(self.lmtd_correction > 0.0 && self.lmtd_correction <= 1.0) {
            Some("lmtd_correction")
        } else {
            None
        }
    }
}

/// Outlet state of one solved exchanger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangerResult {
    pub t_cold_out: f64,
    pub t_hot_out: f64,
    /// Heat duty, W.
    pub duty: f64,
    /// Conductance the exchanger was solved with, W/K (0 when bypassed).
    pub ua: f64,
}

impl ExchangerResult {
    fn passthrough(cold_in: &StreamState, hot_in: &StreamState) -> Self {
        Self {
            t_cold_out: cold_in.temperature,
            t_hot_out: hot_in.temperature,
            duty: 0.0,
            ua: 0.0,
        }
    }
}

/// Log-mean temperature difference of a counterflow exchanger.
pub fn lmtd(dt_hot_end: f64, dt_cold_end: f64) -> Result<f64, HenError> {
    if !(dt_hot_end > 0.0 && dt_cold_end > 0.0) {
        return Err(HenError::TemperatureCross {
            dt_hot_end,
            dt_cold_end,
        });
    }
    if (dt_hot_end - dt_cold_end).abs() <= 1e-9 * dt_hot_end {
        return Ok(dt_hot_end);
    }
    Ok((dt_hot_end - dt_cold_end) / (dt_hot_end / dt_cold_end).ln())
}

/// Overall heat-transfer coefficient referenced to the outer tube area,
/// W/(m²·K), with tube-side and shell-side fouling resistances in m²K/W.
pub fn overall_u(geom: &ExchangerGeometry, r_f_inner: f64, r_f_outer: f64) -> f64 {
    let ratio = geom.d_outer / geom.d_inner;
    let resistance = ratio / geom.h_tube
        + ratio * r_f_inner
        + geom.d_outer * ratio.ln() / (2.0 * geom.wall_conductivity)
        + r_f_outer
        + 1.0 / geom.h_shell;
    1.0 / resistance
}

/// Hot-side effectiveness `(T_h,i − T_h,o)/(T_h,i − T_c,i)` of a counterflow
/// exchanger with capacity ratio `k1 = C_h/C_c` and `ntu = UA·F/C_h`.
fn hot_side_effectiveness(k1: f64, ntu: f64) -> f64 {
    if (k1 - 1.0).abs() < BALANCED_RATIO_TOLERANCE {
        return ntu / (1.0 + ntu);
    }
    // exponent of exp(−k₂F(k₁−1))
    let x = ntu * (1.0 - k1);
    if x > 0.0 {
        let decay = (-x).exp();
        -(-x).exp_m1() / (1.0 - k1 * decay)
    } else {
        let em1 = x.exp_m1();
        em1 / (em1 + (1.0 - k1))
    }
}

/// Closed-form outlets of a counterflow exchanger with conductance `ua` (W/K)
/// and LMTD correction `f`. `ua = 0` is a bypass.
pub fn exchanger_outlets(
    cold_in: &StreamState,
    hot_in: &StreamState,
    ua: f64,
    f: f64,
) -> ExchangerResult {
    if ua <= 0.0 {
        return ExchangerResult::passthrough(cold_in, hot_in);
    }
    let c_hot = hot_in.capacity_rate();
    let c_cold = cold_in.capacity_rate();
    let k1 = c_hot / c_cold;
    let k2 = ua / c_hot;
    let eps_hot = hot_side_effectiveness(k1, k2 * f);

    let span = hot_in.temperature - cold_in.temperature;
    let hot_drop = eps_hot * span;
    let t_hot_out = hot_in.temperature - hot_drop;
    let t_cold_out = cold_in.temperature + k1 * hot_drop;
    let duty = c_cold * (t_cold_out - cold_in.temperature);
    debug_assert!(
        (duty - c_hot * hot_drop).abs() <= 1e-9 * duty.abs().max(1.0),
        "energy balance broken: {duty} vs {}",
        c_hot * hot_drop
    );
    ExchangerResult {
        t_cold_out,
        t_hot_out,
        duty,
        ua,
    }
}

/// Position of one exchanger on a hot stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HotAssignment {
    pub exchanger: String,
    pub stream: String,
    /// 1-based visit order along the hot stream.
    pub order: u32,
}

/// Hot stream inlet condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotInlet {
    pub id: String,
    #[serde(flatten)]
    pub state: StreamState,
}

/// Wiring of a network: the cold path, the hot-stream visits and the
/// boundary inlets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    /// Exchanger identifiers in the order the cold stream visits them.
    pub cold_path: Vec<String>,
    pub hot_assignments: Vec<HotAssignment>,
    pub cold_inlet: StreamState,
    pub hot_inlets: Vec<HotInlet>,
}

/// Precomputed index form of a topology.
#[derive(Debug, Clone)]
struct Wiring {
    /// Per path position: index into `hot_inlets`.
    stream: Vec<usize>,
    /// Per path position: path position of the previous exchanger on the same
    /// hot stream.
    upstream_hot: Vec<Option<usize>>,
}

impl NetworkTopology {
    /// Series default: every exchanger on the cold path, one independent hot
    /// stream per exchanger.
    pub fn series(
        ids: &[String],
        cold_inlet: StreamState,
        hot_inlets: &[StreamState],
    ) -> Result<Self, HenError> {
        if ids.len() != hot_inlets.len() {
            return Err(HenError::InvalidTopology(format!(
                "{} exchangers but {} hot inlets",
                ids.len(),
                hot_inlets.len()
            )));
        }
        let topo = Self {
            cold_path: ids.to_vec(),
            hot_assignments: ids
                .iter()
                .map(|id| HotAssignment {
                    exchanger: id.clone(),
                    stream: format!("H:{id}"),
                    order: 1,
                })
                .collect(),
            cold_inlet,
            hot_inlets: ids
                .iter()
                .zip(hot_inlets)
                .map(|(id, s)| HotInlet {
                    id: format!("H:{id}"),
                    state: *s,
                })
                .collect(),
        };
        topo.validate()?;
        Ok(topo)
    }

    pub fn len(&self) -> usize {
        self.cold_path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cold_path.is_empty()
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), HenError> {
        self.wiring().map(|_| ())
    }

    fn wiring(&self) -> Result<Wiring, HenError> {
        let bad = |msg: String| Err(HenError::InvalidTopology(msg));
        let mut path_pos = BTreeMap::new();
        for (i, id) in self.cold_path.iter().enumerate() {
            if path_pos.insert(id.as_str(), i).is_some() {
                return bad(format!("exchanger {id} appears twice on the cold path"));
            }
        }
        let mut stream_idx = BTreeMap::new();
        for (i, inlet) in self.hot_inlets.iter().enumerate() {
            if stream_idx.insert(inlet.id.as_str(), i).is_some() {
                return bad(format!("hot stream {} declared twice", inlet.id));
            }
        }

        let n = self.cold_path.len();
        let mut stream = vec![usize::MAX; n];
        let mut visits: BTreeMap<usize, Vec<(u32, usize)>> = BTreeMap::new();
        for a in &self.hot_assignments {
            let Some(&pos) = path_pos.get(a.exchanger.as_str()) else {
                return bad(format!("hot assignment for unknown exchanger {}", a.exchanger));
            };
            let Some(&s) = stream_idx.get(a.stream.as_str()) else {
                return bad(format!("exchanger {} assigned to unknown hot stream {}", a.exchanger, a.stream));
            };
            if stream[pos] != usize::MAX {
                return bad(format!("exchanger {} has more than one hot assignment", a.exchanger));
            }
            stream[pos] = s;
            visits.entry(s).or_default().push((a.order, pos));
        }
        if let Some(pos) = stream.iter().position(|&s| s == usize::MAX) {
            return bad(format!("exchanger {} has no hot assignment", self.cold_path[pos]));
        }

        let mut upstream_hot = vec![None; n];
        for (s, mut list) in visits {
            list.sort_unstable();
            for (k, &(order, pos)) in list.iter().enumerate() {
                if order as usize != k + 1 {
                    return bad(format!(
                        "visit orders on hot stream {} are not 1..{}",
                        self.hot_inlets[s].id,
                        list.len()
                    ));
                }
                if k > 0 {
                    upstream_hot[pos] = Some(list[k - 1].1);
                }
            }
        }
        Ok(Wiring {
            stream,
            upstream_hot,
        })
    }
}

/// Per-exchanger operating inputs for a network solve, indexed like
/// `NetworkTopology::cold_path`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangerDrive {
    pub ua: f64,
    pub lmtd_correction: f64,
    pub bypassed: bool,
}

/// Solves every exchanger of the network simultaneously.
///
/// Repeated forward sweeps along the cold path; each exchanger takes its hot
/// inlet from the latest outlet of its upstream exchanger on the same hot
/// stream. Results are indexed like `topo.cold_path`.
pub fn solve_network(
    topo: &NetworkTopology,
    drives: &[ExchangerDrive],
) -> Result<Vec<ExchangerResult>, HenError> {
    let wiring = topo.wiring()?;
    let n = topo.len();
    if drives.len() != n {
        return Err(HenError::InvalidTopology(format!(
            "{} drives for {} exchangers",
            drives.len(),
            n
        )));
    }

    let hot_inlet = |pos: usize| &topo.hot_inlets[wiring.stream[pos]].state;
    let mut results: Vec<ExchangerResult> = (0..n)
        .map(|pos| ExchangerResult::passthrough(&topo.cold_inlet, hot_inlet(pos)))
        .collect();

    let sweep = |results: &mut Vec<ExchangerResult>| -> f64 {
        let mut max_change: f64 = 0.0;
        let mut cold = topo.cold_inlet;
        for pos in 0..n {
            let hot = match wiring.upstream_hot[pos] {
                None => *hot_inlet(pos),
                Some(up) => hot_inlet(pos).at(results[up].t_hot_out),
            };
            let drive = &drives[pos];
            let next = if drive.bypassed {
                ExchangerResult::passthrough(&cold, &hot)
            } else {
                exchanger_outlets(&cold, &hot, drive.ua, drive.lmtd_correction)
            };
            max_change = max_change
                .max((next.t_cold_out - results[pos].t_cold_out).abs())
                .max((next.t_hot_out - results[pos].t_hot_out).abs());
            results[pos] = next;
            cold = cold.at(next.t_cold_out);
        }
        max_change
    };

    let mut change = f64::INFINITY;
    for _ in 0..MAX_NETWORK_SWEEPS {
        change = sweep(&mut results);
        if change <= NETWORK_TOLERANCE_K {
            break;
        }
    }
    if change > NETWORK_TOLERANCE_K {
        return Err(HenError::NoConvergence {
            sweeps: MAX_NETWORK_SWEEPS,
        });
    }
    // Hot streams running against the cold path leave each exchanger a sweep
    // behind its upstream neighbour; settle to round-off so every exchanger
    // balances against the inlets it actually sees.
    for _ in 0..POLISH_SWEEPS {
        if change == 0.0 {
            break;
        }
        let next = sweep(&mut results);
        if next >= change {
            break;
        }
        change = next;
    }

    // Driving-force check on the settled state.
    let mut t_cold_in = topo.cold_inlet.temperature;
    for pos in 0..n {
        let t_hot_in = match wiring.upstream_hot[pos] {
            None => hot_inlet(pos).temperature,
            Some(up) => results[up].t_hot_out,
        };
        let r = &results[pos];
        if r.ua > 0.0 && t_hot_in != t_cold_in {
            lmtd(t_hot_in - r.t_cold_out, r.t_hot_out - t_cold_in)?;
        }
        t_cold_in = r.t_cold_out;
    }
    Ok(results)
}
