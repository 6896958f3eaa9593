//! Closed-form computational load per code symbol per iteration for the
//! M-PSK receivers, counting multiplications and table lookups.

/// Operation counts for the discrete-phase receiver at `Q` levels per
/// constellation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpCost {
    pub muls: u64,
    pub luts: u64,
}

/// Operation counts for the single-component canonical-model receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BarbCost {
    pub muls: u64,
    pub luts: u64,
}

/// Operation counts for the limited-order mixture receiver at a given mean
/// mixture order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitedCost {
    pub gamma: f64,
    pub muls: f64,
    pub luts: f64,
}

/// The full comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityTable {
    pub m: usize,
    pub q: usize,
    pub dp: DpCost,
    pub barb: BarbCost,
    pub limited: Vec<LimitedCost>,
}

/// Evaluate the closed forms:
///
/// ```text
/// DP:      MULS = 4 Q^2 M^2 + 2 M^2 Q + 6 M Q + M      LUT = Q M
/// BARB:    MULS = 7 M + 5                              LUT = 3 M
/// limited: MULS = 4 M g^2 + 2 M (g + 1)                LUT = 3 M g^2 - g (2 M - 1)
/// ```
///
/// with one `limited` row per supplied mean mixture order `g`.
pub fn complexity_table(m: usize, q: usize, gammas: &[f64]) -> ComplexityTable {
    assert!(m >= 2 && q >= 1, "degenerate table parameters");
    let (mu, qu) = (m as u64, q as u64);
    let dp = DpCost {
        muls: 4 * qu * qu * mu * mu + 2 * mu * mu * qu + 6 * mu * qu + mu,
        luts: qu * mu,
    };
    let barb = BarbCost {
        muls: 7 * mu + 5,
        luts: 3 * mu,
    };
    let mf = m as f64;
    let limited = gammas
        .iter()
        .map(|&g| {
            assert!(g >= 1.0, "mean mixture order below one: {g}");
            LimitedCost {
                gamma: g,
                muls: 4.0 * mf * g * g + 2.0 * mf * (g + 1.0),
                luts: 3.0 * mf * g * g - g * (2.0 * mf - 1.0),
            }
        })
        .collect();
    ComplexityTable { m, q, dp, barb, limited }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_psk_reference_values() {
        let t = complexity_table(8, 16, &[2.80]);
        assert_eq!(t.dp.muls, 68_360);
        assert_eq!(t.dp.luts, 128);
        assert_eq!(t.barb.muls, 61);
        assert_eq!(t.barb.luts, 24);
        // 4*8*2.8^2 + 2*8*3.8 = 250.88 + 60.8
        assert!((t.limited[0].muls - 311.68).abs() < 1e-9);
        // 3*8*2.8^2 - 2.8*15 = 188.16 - 42
        assert!((t.limited[0].luts - 146.16).abs() < 1e-9);
    }

    #[test]
    fn limited_at_order_one_is_near_single_component() {
        let t = complexity_table(8, 16, &[1.0]);
        assert!((t.limited[0].muls - 64.0).abs() < 1e-12);
        assert!((t.limited[0].luts - 9.0).abs() < 1e-12);
    }
}
