//! Exact integer bookkeeping of the local Hamiltonians
//! `H_x = -Σ_{y∈N(x)} σ_x σ_y` and
//! `H_Λ = -Σ_{pairs in Λ} σ_x σ_y - Σ_{z∈∂Λ} Σ_{x∈Λ∩N(z)} σ_x σ_z`.

use std::collections::BTreeSet;

use super::{DynamicsError, SpinConfig};
use crate::lattice::{neighbors_t, Cell, NO_NEIGHBOR};

pub fn site_energy(c: &SpinConfig, x: Cell) -> Result<i64, DynamicsError> {
    let s = c.spin(x)? as i64;
    neighbors_t(x).iter().try_fold(0i64, |acc, &y| Ok(acc - s * c.spin(y)? as i64))
}

/// Cells outside `region` with a neighbour inside, in canonical order.
pub fn outer_boundary(region: &[Cell]) -> Vec<Cell> {
    let inside: BTreeSet<Cell> = region.iter().copied().collect();
    let out: BTreeSet<(i32, i32)> = region
        .iter()
        .flat_map(|&x| neighbors_t(x))
        .filter(|y| !inside.contains(y))
        .map(|y| y.row_key())
        .collect();
    out.into_iter().map(|(r, q)| Cell::new(q, r)).collect()
}

/// Membership mask of `region` over the window of `c`; every neighbour of the
/// region must be in the window too.
fn region_mask(c: &SpinConfig, region: &[Cell]) -> Result<(Vec<bool>, Vec<usize>), DynamicsError> {
    let layout = c.layout();
    let mut mask = vec![false; layout.len()];
    let mut members = Vec::with_capacity(region.len());
    for &x in region {
        let i = layout.index_of(x).ok_or(DynamicsError::OutOfWindow(x))?;
        if let Some(k) = layout.neighbors(i).iter().position(|&n| n == NO_NEIGHBOR) {
            return Err(DynamicsError::OutOfWindow(x.step(crate::lattice::Direction::from_index(k))));
        }
        if !mask[i] {
            mask[i] = true;
            members.push(i);
        }
    }
    Ok((mask, members))
}

/// `H_Λ`, counting each pair inside `Λ` once and each `Λ`–`∂Λ` pair once.
pub fn local_energy(c: &SpinConfig, region: &[Cell]) -> Result<i64, DynamicsError> {
    let (mask, members) = region_mask(c, region)?;
    let layout = c.layout();
    let mut sum = 0i64;
    for &i in &members {
        let s = c.spin_at(i) as i64;
        for &j in layout.neighbors(i) {
            let j = j as usize;
            if !mask[j] || i < j {
                sum += s * c.spin_at(j) as i64;
            }
        }
    }
    Ok(-sum)
}

/// The two ways of computing `H_Λ(σ^{n+1}) - H_Λ(σ^n)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct EnergyDelta {
    /// Difference of the two directly evaluated energies.
    pub direct: i64,
    /// Sum over flipped sites of `Λ` of `Σ_y (σ_xσ_y - σ'_xσ'_y)`.
    pub flip_sum: i64,
    /// Pairs between a flipped site of `∂Λ` and an unflipped site of `Λ`,
    /// which the flip sum misses. Zero whenever `∂Λ` does not flip.
    pub boundary_correction: i64,
}

/// Energy change of `Λ` between consecutive configurations, checked against
/// the flip-sum form.
pub fn energy_delta(c_n: &SpinConfig, c_n1: &SpinConfig, region: &[Cell]) -> Result<EnergyDelta, DynamicsError> {
    let direct = local_energy(c_n1, region)? - local_energy(c_n, region)?;
    let (mask, members) = region_mask(c_n, region)?;
    let (l0, l1) = (c_n.layout(), c_n1.layout());
    let after = |i: usize| -> i64 { c_n1.spin_at(l1.index_of(l0.cell(i)).expect("checked by local_energy")) as i64 };
    let before = |i: usize| -> i64 { c_n.spin_at(i) as i64 };

    let mut flip_sum = 0i64;
    let mut boundary_correction = 0i64;
    for &i in &members {
        let flipped = before(i) != after(i);
        for &j in l0.neighbors(i) {
            let j = j as usize;
            let pair = before(i) * before(j) - after(i) * after(j);
            if flipped {
                flip_sum += pair;
            } else if !mask[j] && before(j) != after(j) {
                boundary_correction += pair;
            }
        }
    }
    if direct != flip_sum + boundary_correction {
        return Err(DynamicsError::InconsistentEnergy { direct, flip_sum: flip_sum + boundary_correction });
    }
    Ok(EnergyDelta { direct, flip_sum, boundary_correction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{step_t, BoundaryMode};
    use crate::lattice::Window;

    fn flower() -> Vec<Cell> {
        let mut v = vec![Cell::ORIGIN];
        v.extend(neighbors_t(Cell::ORIGIN));
        v
    }

    /// Satisfied minus unsatisfied edges with at least one end in `region`,
    /// enumerated from an explicit edge list.
    fn energy_by_edge_list(c: &SpinConfig, region: &[Cell]) -> i64 {
        let mut edges = BTreeSet::new();
        for &x in region {
            for y in neighbors_t(x) {
                edges.insert(if x < y { (x, y) } else { (y, x) });
            }
        }
        -edges.iter().map(|&(a, b)| (c.spin(a).unwrap() * c.spin(b).unwrap()) as i64).sum::<i64>()
    }

    #[test]
    fn flower_edge_count() {
        let f = flower();
        let c = SpinConfig::uniform(Window::new(4), 1);
        // 12 edges inside the flower, 18 from its ring to the outer boundary.
        assert_eq!(outer_boundary(&f).len(), 12);
        assert_eq!(local_energy(&c, &f).unwrap(), -30);
        assert_eq!(energy_by_edge_list(&c, &f), -30);
    }

    #[test]
    fn single_cell_region_is_site_energy() {
        let c = SpinConfig::sample(Window::new(6), 0.5, 17).unwrap();
        for &x in &c.layout().cells()[..50] {
            if c.layout().index_of(x).is_some_and(|i| !c.layout().on_ring(i)) {
                assert_eq!(local_energy(&c, &[x]).unwrap(), site_energy(&c, x).unwrap());
            }
        }
    }

    #[test]
    fn global_flip_is_symmetric() {
        let c = SpinConfig::sample(Window::new(8), 0.5, 3).unwrap();
        let region: Vec<Cell> = c.layout().cells().iter().copied().filter(|x| x.distance(Cell::ORIGIN) <= 5).collect();
        assert_eq!(local_energy(&c, &region).unwrap(), local_energy(&c.flipped(), &region).unwrap());
        assert_eq!(local_energy(&c, &region).unwrap(), energy_by_edge_list(&c, &region));
    }

    #[test]
    fn isolated_minus_delta() {
        let mut c = SpinConfig::uniform(Window::new(5).with_margin(1), 1);
        c.set(Cell::ORIGIN, -1).unwrap();
        let n = step_t(&c, BoundaryMode::Shrinking).unwrap();
        let d = energy_delta(&c, &n, &flower()).unwrap();
        // six unsatisfied edges become satisfied: each moves -σσ from +1 to -1
        assert_eq!(d.direct, -12);
        assert_eq!(d.flip_sum, -12);
        assert_eq!(d.boundary_correction, 0);
    }

    #[test]
    fn no_flips_means_zero_delta() {
        let c = SpinConfig::uniform(Window::new(5).with_margin(1), -1);
        let n = step_t(&c, BoundaryMode::Shrinking).unwrap();
        assert_eq!(energy_delta(&c, &n, &flower()).unwrap().direct, 0);
    }

    #[test]
    fn out_of_window_region_is_rejected() {
        let c = SpinConfig::uniform(Window::new(3), 1);
        assert!(local_energy(&c, &[Cell::new(3, 0)]).is_err());
        assert!(site_energy(&c, Cell::new(4, 0)).is_err());
    }

    #[test]
    fn delta_matches_for_random_regions_with_flipping_boundary() {
        for seed in 0..20 {
            let c = SpinConfig::sample(Window::new(12).with_margin(1), 0.5, seed).unwrap();
            let n = step_t(&c, BoundaryMode::Shrinking).unwrap();
            let region: Vec<Cell> = c.layout().cells().iter().copied().filter(|x| x.distance(Cell::new(1, -1)) <= 4).collect();
            let d = energy_delta(&c, &n, &region).unwrap();
            assert_eq!(d.direct, d.flip_sum + d.boundary_correction);
        }
    }
}
