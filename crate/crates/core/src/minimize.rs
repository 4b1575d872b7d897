//! Bounded scalar minimization: uniform grid scan followed by golden-section
//! refinement on the bracketing cell.

/// Number of points in the coarse grid scan.
pub const GRID_POINTS: usize = 1025;

/// Relative tolerance on the refined abscissa.
pub const X_REL_TOL: f64 = 1e-10;

/// Grid values within this distance of the minimum count as ties.
const TIE_TOL: f64 = 1e-14;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Minimizes `f` over `[lo, hi]`.
///
/// The grid minimum is kept whenever the golden-section refinement does not
/// improve on it, so the returned value never exceeds the best grid value.
/// Among tied grid points the smallest abscissa wins.
pub fn grid_golden<F>(f: F, lo: f64, hi: f64) -> Minimum
where
    F: Fn(f64) -> f64,
{
    debug_assert!(lo <= hi);
    if hi - lo <= 0.0 {
        return Minimum {
            x: lo,
            value: f(lo),
        };
    }
    let n = GRID_POINTS - 1;
    let step = (hi - lo) / n as f64;
    let at = |i: usize| if i == n { hi } else { lo + step * i as f64 };

    let values: Vec<f64> = (0..=n).map(|i| f(at(i))).collect();
    let min_val = values.iter().copied().fold(f64::INFINITY, f64::min);
    let best = values
        .iter()
        .position(|&v| v <= min_val + TIE_TOL)
        .unwrap_or(0);

    let grid_min = Minimum {
        x: at(best),
        value: values[best],
    };
    let a = at(best.saturating_sub(1));
    let b = at((best + 1).min(n));
    let refined = golden_section(&f, a, b);

    if refined.value < grid_min.value - TIE_TOL {
        refined
    } else {
        grid_min
    }
}

/// Golden-section search on `[a, b]`, assuming `f` is unimodal there.
pub fn golden_section<F>(f: &F, mut a: f64, mut b: f64) -> Minimum
where
    F: Fn(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        let scale = 0.5 * (a.abs() + b.abs());
        if b - a <= X_REL_TOL * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        Minimum { x: c, value: fc }
    } else {
        Minimum { x: d, value: fd }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let m = grid_golden(|x| (x - 0.3137).powi(2) + 2.0, 0.0, 1.0);
        assert!((m.x - 0.3137).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_minimum() {
        let m = grid_golden(|x| x, 0.0, 1.0);
        assert_eq!(m.x, 0.0);
        assert_eq!(m.value, 0.0);
        let m = grid_golden(|x| -x, 0.0, 2.0);
        assert!((m.x - 2.0).abs() < 1e-9);
    }

    #[test]
    fn constant_function_reports_smallest_x() {
        let m = grid_golden(|_| 1.0, 0.0, 1.0);
        assert_eq!(m.x, 0.0);
        assert_eq!(m.value, 1.0);
    }

    #[test]
    fn degenerate_interval() {
        let m = grid_golden(|x| x * x, 0.5, 0.5);
        assert_eq!(
            m,
            Minimum {
                x: 0.5,
                value: 0.25
            }
        );
    }
}
