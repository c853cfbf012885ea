//! Asymptotic (Kern–Seaton) fouling with cleaning resets.

use serde::{Deserialize, Serialize};

use crate::hen::{overall_u, ExchangerGeometry};

/// Asymptotic fouling law `R_f(t) = a·(1 − e^{−b·t})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoulingParams {
    /// Asymptotic resistance `a`, m²K/W.
    #[serde(rename = "asymptote_m2k_per_w")]
    pub asymptote: f64,
    /// Approach rate `b`, 1/month.
    #[serde(rename = "rate_per_month")]
    pub rate: f64,
}

impl FoulingParams {
    pub fn new(asymptote: f64, rate: f64) -> Self {
        Self { asymptote, rate }
    }

    pub fn invalid_field(&self) -> Option<&'static str> {
        if !(self.asymptote >= 0.0 && self.asymptote.is_finite()) {
            Some("asymptote_m2k_per_w")
        } else if !(self.rate > 0.0 && self.rate.is_finite()) {
            Some("rate_per_month")
        } else {
            None
        }
    }
}

/// Fouling resistance after `elapsed` months on a fresh surface.
pub fn fouling_resistance(params: &FoulingParams, elapsed: f64) -> f64 {
    -params.asymptote * (-params.rate * elapsed).exp_m1()
}

/// Monthly fouling resistance of one exchanger over the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceTimeline {
    values: Vec<f64>,
    clean_steps: Vec<usize>,
}

impl ResistanceTimeline {
    /// Resistance at 1-based month `t`.
    pub fn at(&self, t: usize) -> f64 {
        self.values[t - 1]
    }

    /// Values for months `1..=horizon`, in order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn clean_steps(&self) -> &[usize] {
        &self.clean_steps
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }
}

/// Samples the fouling law on the monthly grid `1..=horizon`.
///
/// A clean month records 0 (the exchanger is offline) and the fouling clock
/// restarts from the next month, so month `t` sees `t − t_last_clean` months
/// of deposit growth. Clean steps outside `1..=horizon` are ignored.
pub fn resistance_timeline(
    params: &FoulingParams,
    clean_steps: &[usize],
    horizon: usize,
) -> ResistanceTimeline {
    let mut steps: Vec<usize> = clean_steps
        .iter()
        .copied()
        .filter(|&t| (1..=horizon).contains(&t))
        .collect();
    steps.sort_unstable();
    steps.dedup();

    let mut values = Vec::with_capacity(horizon);
    let mut last_clean = 0usize;
    let mut next = steps.iter().peekable();
    for t in 1..=horizon {
        if next.peek() == Some(&&t) {
            next.next();
            last_clean = t;
            values.push(0.0);
        } else {
            values.push(fouling_resistance(params, (t - last_clean) as f64));
        }
    }
    ResistanceTimeline {
        values,
        clean_steps: steps,
    }
}

/// Conductance `UA` (W/K) with the given tube-side and shell-side
/// resistances.
pub fn fouled_ua(geom: &ExchangerGeometry, r_f_tube: f64, r_f_shell: f64) -> f64 {
    geom.area * overall_u(geom, r_f_tube, r_f_shell)
}

/// Conductance with the dynamic deposit lumped on the tube (crude) side.
pub fn effective_ua(geom: &ExchangerGeometry, r_f: f64) -> f64 {
    fouled_ua(geom, r_f, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: FoulingParams = FoulingParams {
        asymptote: 0.002,
        rate: 0.1,
    };

    fn geom() -> ExchangerGeometry {
        ExchangerGeometry {
            area: 300.0,
            d_outer: 0.0254,
            d_inner: 0.0198,
            wall_conductivity: 45.0,
            h_tube: 800.0,
            h_shell: 1100.0,
            lmtd_correction: 1.0,
        }
    }

    #[test]
    fn fresh_surface_is_clean() {
        assert_eq!(fouling_resistance(&P, 0.0), 0.0);
    }

    #[test]
    fn half_asymptote_time() {
        let t = 2f64.ln() / 0.1;
        assert!((t - 6.9315).abs() < 1e-4);
        assert!((fouling_resistance(&P, t) - 0.001).abs() < 1e-15);
    }

    #[test]
    fn long_run_reaches_asymptote() {
        assert!((fouling_resistance(&P, 1e6) - 0.002).abs() < 1e-12);
    }

    #[test]
    fn uncleaned_timeline() {
        let tl = resistance_timeline(&P, &[], 44);
        for t in 1..=44 {
            let expected = 0.002 * (1.0 - (-0.1 * t as f64).exp());
            assert!((tl.at(t) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn clean_resets_clock() {
        let tl = resistance_timeline(&P, &[5], 10);
        assert_eq!(tl.at(5), 0.0);
        assert_eq!(tl.at(6), tl.at(1));
        assert_eq!(tl.at(10), fouling_resistance(&P, 5.0));
    }

    #[test]
    fn two_cleanings() {
        let tl = resistance_timeline(&P, &[5, 10], 12);
        assert!((tl.at(9) - 0.002 * (1.0 - (-0.4f64).exp())).abs() < 1e-15);
        assert_eq!(tl.at(10), 0.0);
        assert_eq!(tl.clean_steps(), &[5, 10]);
    }

    #[test]
    fn out_of_range_steps_ignored() {
        let tl = resistance_timeline(&P, &[0, 3, 99], 4);
        assert_eq!(tl.clean_steps(), &[3]);
        assert_eq!(tl.horizon(), 4);
    }

    #[test]
    fn ua_clean_and_composed() {
        let g = geom();
        assert_eq!(effective_ua(&g, 0.0), g.area * overall_u(&g, 0.0, 0.0));
        assert_eq!(effective_ua(&g, 0.002), g.area * overall_u(&g, 0.002, 0.0));
    }

    #[test]
    fn ua_vanishes_under_blockage() {
        let g = geom();
        let mut prev = effective_ua(&g, 0.0);
        for e in [1e-4, 1e-2, 1.0, 1e2, 1e6] {
            let ua = effective_ua(&g, e);
            assert!(ua < prev);
            prev = ua;
        }
        assert!(prev < 1e-3);
    }

    proptest! {
        #[test]
        fn resistance_monotone_and_bounded(
            a in 1e-5f64..1e-2,
            b in 1e-3f64..2.0,
            t1 in 0.0f64..200.0,
            dt in 0.0f64..50.0,
        ) {
            let p = FoulingParams::new(a, b);
            let r1 = fouling_resistance(&p, t1);
            let r2 = fouling_resistance(&p, t1 + dt);
            prop_assert!(r1 <= r2);
            prop_assert!(r2 <= a);
            prop_assert!(r1 >= 0.0);
        }

        #[test]
        fn periodic_cleaning_is_periodic(d in 2usize..12, horizon in 12usize..80) {
            let steps: Vec<usize> = (1..=horizon / d).map(|k| k * d).collect();
            let tl = resistance_timeline(&P, &steps, horizon);
            for t in 1..=horizon {
                if t % d == 0 {
                    prop_assert_eq!(tl.at(t), 0.0);
                } else {
                    prop_assert_eq!(tl.at(t), tl.at(t % d));
                }
            }
        }

        #[test]
        fn ua_strictly_decreasing(r in 0.0f64..0.01, dr in 1e-6f64..0.01) {
            let g = geom();
            prop_assert!(effective_ua(&g, r + dr) < effective_ua(&g, r));
        }
    }
}
