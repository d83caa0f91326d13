//! Rotation-map specialization: continued fractions and convergents, the
//! closed-form chaos degree of the rotation map at a given partition size,
//! and the convergent-denominator decay study.

use std::io::Write;

use crate::dynamics::{builtin_map, InitialEnsemble};
use crate::error::{Error, Result};
use crate::infodyn::{ecd_of_system, ObservationSpec};

/// A reduced continued-fraction convergent `numerator / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Convergent {
    pub numerator: u64,
    pub denominator: u64,
}

/// Why the expansion stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStop {
    /// The remainder vanished: the input is (floating-point) rational.
    Rational,
    /// The requested depth was reached.
    Depth,
    /// Further convergents would outrun the resolution of the input.
    Precision,
}

/// Simple continued-fraction expansion `[0; a_1, a_2, ...]` of `v` in (0,1),
/// with the convergents whose denominators are at least 2 (usable as
/// partition sizes). Denominators are strictly increasing.
#[derive(Debug, Clone)]
pub struct ContinuedFraction {
    pub coefficients: Vec<u64>,
    pub convergents: Vec<Convergent>,
    pub stop: CfStop,
}

impl ContinuedFraction {
    /// The `j`-th emitted convergent (1-based, matching the decay table).
    /// Asking past what the input's precision supports is an error.
    pub fn convergent(&self, j: usize) -> Result<Convergent> {
        if j == 0 {
            return Err(Error::InvalidArgument("convergent index is 1-based".into()));
        }
        self.convergents.get(j - 1).copied().ok_or(Error::PrecisionExhausted {
            available: self.convergents.len(),
        })
    }

    pub fn is_rational(&self) -> bool {
        self.stop == CfStop::Rational
    }
}

/// Expand `v` by the Gauss map, stopping at `depth` emitted convergents, at
/// rational termination, or when denominators pass the floating-point
/// resolution of `v` (about `1/sqrt(eps)`).
pub fn continued_fraction(v: f64, depth: usize) -> Result<ContinuedFraction> {
    if !(v > 0.0 && v < 1.0) || !v.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "rotation number must lie in (0,1), got {v}"
        )));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be >= 1".into()));
    }
    // beyond c_j ~ 1/sqrt(eps) the bound |v - b/c| <= 1/c^2 is below the
    // resolution of v itself
    let c_limit = (1.0 / f64::EPSILON).sqrt() as u64;
    let mut coefficients = vec![0u64];
    let mut convergents = Vec::new();
    // recurrence seeds: p_{-1}/q_{-1} = 1/0, p_0/q_0 = 0/1
    let (mut p_prev, mut q_prev) = (0u64, 1u64);
    let (mut p_prev2, mut q_prev2) = (1u64, 0u64);
    let mut x = v;
    let stop;
    loop {
        if x < f64::EPSILON {
            stop = CfStop::Rational;
            break;
        }
        let recip = 1.0 / x;
        let a = recip.floor() as u64;
        let q_next = match a.checked_mul(q_prev).and_then(|t| t.checked_add(q_prev2)) {
            Some(q) if q <= c_limit => q,
            _ => {
                stop = CfStop::Precision;
                break;
            }
        };
        let p_next = a * p_prev + p_prev2;
        coefficients.push(a);
        (p_prev2, q_prev2) = (p_prev, q_prev);
        (p_prev, q_prev) = (p_next, q_next);
        if q_next >= 2 {
            convergents.push(Convergent {
                numerator: p_next,
                denominator: q_next,
            });
        }
        x = recip - a as f64;
        if convergents.len() >= depth {
            stop = CfStop::Depth;
            break;
        }
    }
    if convergents.is_empty() {
        return Err(Error::PrecisionExhausted { available: 0 });
    }
    Ok(ContinuedFraction {
        coefficients,
        convergents,
        stop,
    })
}

/// Binary entropy `h(s) = -s log s - (1-s) log(1-s)` in nats, `h(0)=h(1)=0`.
pub fn binary_entropy(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        -s * s.ln() - (1.0 - s) * (1.0 - s).ln()
    }
}

/// Closed-form chaos degree of the rotation by `v` observed through the
/// `l`-cell equi-partition: `h(s)` with `s = l v - floor(l v)`. The product
/// `l v` is corrected with a fused multiply-add so large `l` keep full
/// fractional precision.
pub fn theoretical_dp(v: f64, l: u64) -> f64 {
    let lf = l as f64;
    let prod = lf * v;
    let residual = lf.mul_add(v, -prod);
    let mut s = prod.fract() + residual;
    if s < 0.0 {
        s += 1.0;
    } else if s >= 1.0 {
        s -= 1.0;
    }
    binary_entropy(s)
}

/// One row of the decay study at partition size `l = c_j`.
#[derive(Debug, Clone)]
pub struct DecayRow {
    /// 1-based convergent index.
    pub j: usize,
    pub denominator: u64,
    pub d_empirical: f64,
    pub d_theoretical: f64,
    /// The asymptotic scale `log(c_j) / c_j`.
    pub bound: f64,
}

/// The decay study: empirical and closed-form chaos degrees at the
/// convergent-denominator partition sizes.
#[derive(Debug, Clone)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    /// True when fewer rows than requested exist because the expansion ran
    /// out of floating-point precision (not because `v` is rational).
    pub truncated: bool,
}

impl DecayTable {
    /// CSV with header `j,c_j,D_emp,D_theo,bound`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "j,c_j,D_emp,D_theo,bound")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.j, r.denominator, r.d_empirical, r.d_theoretical, r.bound
            )?;
        }
        Ok(())
    }
}

/// Run the empirical pipeline and the closed form at each convergent
/// denominator of `v`, up to `max_rows` rows.
pub fn convergent_decay(
    v: f64,
    max_rows: usize,
    theta0: f64,
    skip: usize,
    length: usize,
) -> Result<DecayTable> {
    let cf = continued_fraction(v, max_rows)?;
    let system = builtin_map("circle", &[v])?;
    let ensemble = InitialEnsemble::point(&[theta0]);
    let mut rows = Vec::with_capacity(cf.convergents.len());
    for (idx, conv) in cf.convergents.iter().enumerate() {
        let l = conv.denominator;
        let obs = ObservationSpec::partition(vec![l as usize]);
        let ecd = ecd_of_system(&system, &ensemble, &obs, skip, length)?;
        rows.push(DecayRow {
            j: idx + 1,
            denominator: l,
            d_empirical: ecd.value,
            d_theoretical: theoretical_dp(v, l),
            bound: (l as f64).ln() / l as f64,
        });
    }
    Ok(DecayTable {
        rows,
        truncated: cf.stop == CfStop::Precision,
    })
}

/// The preset observation family for the rotation map: one equi-partition
/// per convergent denominator. Feeding this to the infimum evaluation
/// realizes the vanishing-infimum statement for irrational rotations.
pub fn convergent_partition_family(v: f64, max_rows: usize) -> Result<Vec<ObservationSpec>> {
    let cf = continued_fraction(v, max_rows)?;
    Ok(cf
        .convergents
        .iter()
        .map(|c| ObservationSpec::partition(vec![c.denominator as usize]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn golden_expansion_is_all_ones_with_fibonacci_convergents() {
        let cf = continued_fraction(golden(), 9).unwrap();
        assert_eq!(cf.coefficients[0], 0);
        assert!(cf.coefficients[1..].iter().all(|&a| a == 1));
        let denoms: Vec<u64> = cf.convergents.iter().map(|c| c.denominator).collect();
        assert_eq!(denoms, vec![2, 3, 5, 8, 13, 21, 34, 55, 89]);
        let numers: Vec<u64> = cf.convergents.iter().map(|c| c.numerator).collect();
        assert_eq!(numers, vec![1, 2, 3, 5, 8, 13, 21, 34, 55]);
    }

    #[test]
    fn quarter_terminates_with_single_convergent() {
        let cf = continued_fraction(0.25, 10).unwrap();
        assert!(cf.is_rational());
        assert_eq!(cf.convergents.len(), 1);
        assert_eq!(
            cf.convergents[0],
            Convergent {
                numerator: 1,
                denominator: 4
            }
        );
    }

    #[test]
    fn pi_minus_3_denominators_match_extended_precision_oracle() {
        // oracle: Gauss map at 60 digits on the exact f64 input gives
        // denominators 7, 106, 113, 33102, ...
        let cf = continued_fraction(std::f64::consts::PI - 3.0, 4).unwrap();
        let denoms: Vec<u64> = cf.convergents.iter().map(|c| c.denominator).collect();
        assert_eq!(denoms, vec![7, 106, 113, 33102]);
    }

    #[test]
    fn convergent_bound_holds_for_every_emitted_convergent() {
        for v in [golden(), std::f64::consts::PI - 3.0, 0.123456789, 0.7548776662] {
            let cf = continued_fraction(v, 12).unwrap();
            for c in &cf.convergents {
                let err = (v - c.numerator as f64 / c.denominator as f64).abs();
                let bound = 1.0 / (c.denominator as f64 * c.denominator as f64);
                assert!(
                    err <= bound,
                    "v={v}: |v - {}/{}| = {err} > {bound}",
                    c.numerator,
                    c.denominator
                );
                let g = gcd(c.numerator, c.denominator);
                assert_eq!(g, 1, "convergent {}/{} not reduced", c.numerator, c.denominator);
            }
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn precision_stop_reports_exhaustion() {
        let cf = continued_fraction(golden(), 60).unwrap();
        assert_eq!(cf.stop, CfStop::Precision);
        let last = cf.convergents.len();
        assert!(cf.convergent(last).is_ok());
        assert!(matches!(
            cf.convergent(last + 1),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn theoretical_dp_rational_and_half() {
        assert_eq!(theoretical_dp(0.25, 4), 0.0);
        assert_eq!(theoretical_dp(0.5, 2), 0.0);
        // s = 1/2 at l=2, v=1/4: s = frac(0.5) = 1/2 -> log 2
        assert!((theoretical_dp(0.25, 2) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn theoretical_dp_golden_l10_matches_precomputed_value() {
        // h(10 v - 6) evaluated independently at 60 digits
        let d = theoretical_dp(golden(), 10);
        assert!((d - 0.4719084832180384).abs() < 1e-14, "{d}");
    }

    #[test]
    fn binary_entropy_maximum() {
        assert!((binary_entropy(0.5) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
    }

    #[test]
    fn decay_table_rational_v() {
        let t = convergent_decay(0.25, 7, 0.5, 100, 20_000).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!(!t.truncated);
        assert_eq!(t.rows[0].d_empirical, 0.0);
        assert_eq!(t.rows[0].d_theoretical, 0.0);
    }

    #[test]
    fn decay_table_golden_tracks_theory_and_decays() {
        let t = convergent_decay(golden(), 9, 0.5, 1000, 400_000).unwrap();
        assert_eq!(t.rows.len(), 9);
        for r in &t.rows {
            assert!(
                (r.d_empirical - r.d_theoretical).abs() < 5e-3,
                "c={}: emp {} vs theo {}",
                r.denominator,
                r.d_empirical,
                r.d_theoretical
            );
        }
        assert!(t.rows.last().unwrap().d_theoretical < t.rows[0].d_theoretical);
    }

    #[test]
    fn generic_partition_stays_positive_for_irrational_v() {
        let sys = builtin_map("circle", &[golden()]).unwrap();
        let r = ecd_of_system(
            &sys,
            &InitialEnsemble::point(&[0.5]),
            &ObservationSpec::partition(vec![10]),
            1000,
            200_000,
        )
        .unwrap();
        assert!(r.value > 0.01, "D = {}", r.value);
    }

    #[test]
    fn infimum_over_convergent_family_shrinks() {
        let family = convergent_partition_family(golden(), 9).unwrap();
        let sys = builtin_map("circle", &[golden()]).unwrap();
        let ens = InitialEnsemble::point(&[0.5]);
        let (idx, best) = crate::infodyn::total_ecd(&sys, &ens, &family, 500, 200_000).unwrap();
        assert_eq!(idx, family.len() - 1, "largest denominator should minimize");
        assert!(best.value < 0.06, "infimum {}", best.value);
    }
}
