//! Shared inputs for the benchmarks.

use cusp_core::surgery::{fan_from_toric_cycle, solve_lengths};
use cusp_core::{AlmostToricBase, BlowupPlacement, Cycle};

/// A 16 by 17 rectangle with 4, 2, 6 and 5 blow-ups on its sides, then one
/// corner smoothing. Boundary cycle (4,6,5).
pub fn four_six_five() -> AlmostToricBase {
    let rays = fan_from_toric_cycle(&Cycle::new(vec![0, 0, 0, 0]).unwrap()).unwrap();
    let mut b = AlmostToricBase::moment_polygon(&rays, &[16, 17, 16, 17]).unwrap();
    let offsets: [&[i128]; 4] = [&[2, 3, 4, 5], &[3, 4], &[2, 3, 4, 5, 6, 7], &[2, 3, 4, 5, 6]];
    for (edge, offs) in offsets.iter().enumerate() {
        for &o in offs.iter() {
            b = b.internal_blowup(edge, 1, o).unwrap();
        }
    }
    b.node_smoothing(0, 1).unwrap()
}

/// Toric model with full-length blow-ups on the supported edges, so that
/// the boundary shrinks to a point.
pub fn collapsed(toric: &[i64], support: &[usize]) -> AlmostToricBase {
    let rays = fan_from_toric_cycle(&Cycle::new(toric.to_vec()).unwrap()).unwrap();
    let lengths = solve_lengths(&rays, support).unwrap();
    let mut b = AlmostToricBase::moment_polygon(&rays, &lengths).unwrap().with_relaxed_cuts(true);
    for &edge in support {
        let size = b.boundary.iter().find(|e| e.label == edge).unwrap().length;
        b = b.internal_blowup_with(&BlowupPlacement { edge, size, offset: None, shear: None }).unwrap();
    }
    b
}

/// The second charge-3 model; 50 faces.
pub fn charge_three() -> AlmostToricBase {
    collapsed(&[3, 2, 2, 1, 3, 2, 1, 2, 2, 2, 1], &[3, 6, 10])
}

#[cfg(test)]
mod tests {
    use super::*;
    use cusp_core::cycles::cycles_equal;

    #[test]
    fn inputs_have_the_expected_boundaries() {
        let f = four_six_five().bookkeeping_cycle();
        assert!(cycles_equal(&f, &Cycle::new(vec![4, 6, 5]).unwrap()));
        assert_eq!(charge_three().total_boundary_length(), 0);
    }
}
