use rayon::prelude::*;

use super::kernel::Kernel;
use crate::grid::Grid;

/// Weighted count of firing neighbors: the 2D cross-correlation of the
/// previous spike map with `weights`, zero outside the lattice.
///
/// Each output pixel accumulates its taps in kernel row-major order, so the
/// result does not depend on how rows are split across threads. Only firing
/// neurons are visited: for a fixed output pixel, walking source rows and
/// then source columns in ascending order meets the taps in that same order.
pub fn link_field(spikes: &Grid<u8>, weights: &Kernel) -> Grid<f64> {
    let (width, height) = spikes.dims();
    let r = weights.radius() as isize;
    let size = weights.size();
    // Zero taps, and taps that cannot reach inside the lattice, contribute
    // nothing; dropping them is exact.
    let mut rows: Vec<(isize, Vec<(isize, f64)>)> = Vec::new();
    for a in 0..size {
        let da = a as isize - r;
        if da.unsigned_abs() >= height {
            continue;
        }
        let taps: Vec<(isize, f64)> = (0..size)
            .filter_map(|b| {
                let w = weights.at(a, b);
                let db = b as isize - r;
                (w != 0.0 && db.unsigned_abs() < width).then_some((db, w))
            })
            .collect();
        if !taps.is_empty() {
            rows.push((da, taps));
        }
    }

    let y = spikes.as_slice();
    let mut out = Grid::filled(width, height, 0.0);
    if rows.is_empty() {
        return out;
    }
    let fill_row = |row: usize, out_row: &mut [f64]| {
        for (da, taps) in &rows {
            let src = row as isize + da;
            if src < 0 || src >= height as isize {
                continue;
            }
            let src_row = &y[src as usize * width..(src as usize + 1) * width];
            for (src_col, _) in src_row.iter().enumerate().filter(|(_, &v)| v != 0) {
                for &(db, w) in taps {
                    let col = src_col as isize - db;
                    if col >= 0 && (col as usize) < width {
                        out_row[col as usize] += w;
                    }
                }
            }
        }
    };
    if height == 1 {
        fill_row(0, out.as_mut_slice());
    } else {
        out.as_mut_slice()
            .par_chunks_mut(width)
            .enumerate()
            .for_each(|(row, out_row)| fill_row(row, out_row));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silent_lattice_has_no_link_input() {
        let y = Grid::filled(7, 5, 0u8);
        let k = Kernel::gaussian(2, 4.0).unwrap();
        assert!(link_field(&y, &k).as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn impulse_stamps_the_kernel() {
        let mut y = Grid::filled(11, 9, 0u8);
        y.set(4, 5, 1);
        let k = Kernel::gaussian(3, 2.0).unwrap();
        let out = link_field(&y, &k);
        for row in 0..9 {
            for col in 0..11 {
                let da = row as isize - 4 + 3;
                let db = col as isize - 5 + 3;
                let expect = if (0..7).contains(&da) && (0..7).contains(&db) {
                    k.at(da as usize, db as usize)
                } else {
                    0.0
                };
                assert_eq!(*out.get(row, col), expect);
            }
        }
    }

    #[test]
    fn boundary_neurons_receive_less() {
        let y = Grid::filled(9, 9, 1u8);
        let out = link_field(&y, &Kernel::spcnn());
        assert_eq!(*out.get(4, 4), 6.0);
        assert_eq!(*out.get(0, 0), 2.5);
        assert_eq!(*out.get(0, 4), 4.0);
    }
}
