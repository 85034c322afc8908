//! Uniform bucket grid over a square window for radius queries.

use super::Point;

pub struct BucketGrid {
    min: f64,
    cell: f64,
    dim: usize,
    starts: Vec<u32>,
    points: Vec<Point>,
}

impl BucketGrid {
    /// Buckets `points`, all of which lie in `[-half_width, half_width]²`.
    pub fn new(points: &[Point], half_width: f64, cell: f64) -> Self {
        let dim = ((2.0 * half_width / cell).ceil() as usize).max(1);
        let min = -half_width;
        let mut grid = Self {
            min,
            cell,
            dim,
            starts: vec![0; dim * dim + 1],
            points: vec![[0.0; 2]; points.len()],
        };
        let cells: Vec<usize> = points.iter().map(|p| grid.cell_index(p)).collect();
        for &c in &cells {
            grid.starts[c + 1] += 1;
        }
        for i in 0..dim * dim {
            grid.starts[i + 1] += grid.starts[i];
        }
        let mut fill = grid.starts.clone();
        for (p, &c) in points.iter().zip(&cells) {
            grid.points[fill[c] as usize] = *p;
            fill[c] += 1;
        }
        grid
    }

    fn coord(&self, v: f64) -> usize {
        (((v - self.min) / self.cell).floor().max(0.0) as usize).min(self.dim - 1)
    }

    fn cell_index(&self, p: &Point) -> usize {
        self.coord(p[1]) * self.dim + self.coord(p[0])
    }

    /// Calls `f` for every point within `radius` of `center` (inclusive).
    pub fn for_each_within<F: FnMut(&Point)>(&self, center: &Point, radius: f64, mut f: F) {
        let r2 = radius * radius;
        let (x0, x1) = (self.coord(center[0] - radius), self.coord(center[0] + radius));
        let (y0, y1) = (self.coord(center[1] - radius), self.coord(center[1] + radius));
        for cy in y0..=y1 {
            let row = cy * self.dim;
            let lo = self.starts[row + x0] as usize;
            let hi = self.starts[row + x1 + 1] as usize;
            for p in &self.points[lo..hi] {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                if dx * dx + dy * dy <= r2 {
                    f(p);
                }
            }
        }
    }
}
