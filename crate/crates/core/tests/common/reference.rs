//! Straightforward reference implementations of the engine's arithmetic,
//! written against plain nested vectors rather than the library types.

use policy_lab::projection::{ProjectionSeries, EOL_FATES};

/// `[region][year offset][attribute]` copy of a series, plus names.
#[derive(Debug, Clone)]
pub struct Grid {
    pub regions: Vec<String>,
    pub attributes: Vec<String>,
    pub first_year: i32,
    pub cells: Vec<Vec<Vec<f64>>>,
    /// `(attribute index, mean lifetime)` for every consumption sector.
    pub sectors: Vec<(usize, f64)>,
}

impl Grid {
    pub fn from_series(s: &ProjectionSeries) -> Grid {
        let vocab = s.vocabulary();
        let regions: Vec<String> = vocab.regions().iter().map(|r| r.id.clone()).collect();
        let attributes: Vec<String> = vocab.attributes().iter().map(|a| a.id.clone()).collect();
        let mut cells = vec![vec![vec![0.0; attributes.len()]; s.years().len()]; regions.len()];
        for (region, year, attr, value) in s.cells() {
            let r = regions.iter().position(|x| x == region).unwrap();
            let a = attributes.iter().position(|x| x == attr).unwrap();
            cells[r][(year - s.years().first()) as usize][a] = value;
        }
        let sectors = vocab
            .lifetimes()
            .iter()
            .map(|(attr, life)| (attributes.iter().position(|x| x == attr).unwrap(), life))
            .collect();
        Grid { regions, attributes, first_year: s.years().first(), cells, sectors }
    }

    pub fn attr(&self, name: &str) -> usize {
        self.attributes.iter().position(|x| x == name).unwrap()
    }

    pub fn region(&self, name: &str) -> usize {
        self.regions.iter().position(|x| x == name).unwrap()
    }

    pub fn get(&self, r: usize, year: i32, a: usize) -> f64 {
        self.cells[r][(year - self.first_year) as usize][a]
    }

    pub fn set(&mut self, r: usize, year: i32, a: usize, v: f64) {
        self.cells[r][(year - self.first_year) as usize][a] = v;
    }

    /// Consumption in any year; before the first year, the first year's value.
    fn consumption(&self, r: usize, year: i32, a: usize) -> f64 {
        self.get(r, year.max(self.first_year), a)
    }

    /// Waste by brute force: every past year `t` contributes its consumption
    /// weighted by a unit triangle centred on the mean lifetime.
    pub fn waste(&self, r: usize, year: i32) -> f64 {
        let mut total = 0.0;
        for &(a, life) in &self.sectors {
            for t in (year - 200)..=year {
                let age = (year - t) as f64;
                let w = (1.0 - (age - life).abs()).max(0.0);
                total += w * self.consumption(r, t, a);
            }
        }
        total
    }

    /// Rescales the four fates of one region-year to sum to `waste`.
    pub fn rescale_fates(&mut self, r: usize, year: i32, waste: f64) {
        let idx: Vec<usize> = EOL_FATES.iter().map(|f| self.attr(f)).collect();
        let sum: f64 = idx.iter().map(|&a| self.get(r, year, a)).sum();
        if sum > 0.0 {
            for &a in &idx {
                let v = self.get(r, year, a) * waste / sum;
                self.set(r, year, a, v);
            }
        } else {
            for &a in &idx {
                self.set(r, year, a, 0.0);
            }
            self.set(r, year, self.attr("eolMismanagedMT"), waste);
        }
    }
}

/// Year loop for a single lever that moves `share` of one region's
/// mismanaged waste onto recycling, every year of `years`.
pub fn recycling_push(baseline: &ProjectionSeries, region: &str, share: f64, years: (i32, i32)) -> Grid {
    let mut g = Grid::from_series(baseline);
    let (rec, mis) = (g.attr("eolRecyclingMT"), g.attr("eolMismanagedMT"));
    let target = g.region(region);
    for year in years.0..=years.1 {
        let moved = share * g.get(target, year, mis);
        let left = g.get(target, year, mis) - moved;
        g.set(target, year, mis, left);
        let gained = g.get(target, year, rec) + moved;
        g.set(target, year, rec, gained);
        for r in 0..g.regions.len() {
            let w = g.waste(r, year);
            g.rescale_fates(r, year, w);
        }
    }
    g
}
