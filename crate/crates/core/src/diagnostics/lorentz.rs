use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Nonincreasing rearrangement of grid data: `f*` equals `values[j]` on the
/// interval `(j h³, (j+1) h³]`.
#[derive(Clone, Debug)]
pub struct Rearrangement {
    values: Vec<f64>,
    cell: f64,
}

impl Rearrangement {
    pub fn new(values: impl IntoIterator<Item = f64>, cell: f64) -> Self {
        let mut values: Vec<f64> = values.into_iter().map(f64::abs).collect();
        values.sort_unstable_by(|a, b| b.total_cmp(a));
        Self { values, cell }
    }

    pub fn of_field(f: &SpectralField) -> Self {
        Self::new(f.values().iter().copied(), f.grid().cell_volume())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn measure(&self) -> f64 {
        self.values.len() as f64 * self.cell
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.first().copied().unwrap_or(0.0);
        }
        (self.values.iter().map(|v| v.powf(p)).sum::<f64>() * self.cell).powf(1.0 / p)
    }

    /// `((q/p) ∫ (t^{1/p} f*(t))^q dt/t)^{1/q}`, integrated exactly over the
    /// step function; `q = ∞` gives `sup_t t^{1/p} f*(t)`.
    ///
    /// The factor `q/p` makes indicators of measure `m` have norm `m^{1/p}`
    /// for every `q` and the norm nonincreasing in `q`; at `q = p` it is the
    /// `L^p` norm.
    pub fn lorentz_norm(&self, p: f64, q: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!(
                "Lorentz index p = {p} must be positive"
            )));
        }
        if !(q > 0.0) {
            return Err(Error::Domain(format!(
                "Lorentz index q = {q} must be positive"
            )));
        }
        if p < 1.0 {
            log::warn!("Lorentz norm with p = {p} < 1 is only a quasi-norm");
        }
        if q.is_infinite() {
            return Ok(self
                .values
                .iter()
                .enumerate()
                .map(|(j, v)| ((j + 1) as f64 * self.cell).powf(1.0 / p) * v)
                .fold(0.0, f64::max));
        }
        let a = q / p;
        let mut acc = 0.0;
        for (j, v) in self.values.iter().enumerate() {
            if *v == 0.0 {
                break;
            }
            let j1 = (j + 1) as f64;
            // t_{j+1}^a - t_j^a = t_{j+1}^a (1 - (j/(j+1))^a)
            let weight = (j1 * self.cell).powf(a) * -((-1.0 / j1).ln_1p() * a).exp_m1();
            acc += v.powf(q) * weight;
        }
        Ok(acc.powf(1.0 / q))
    }
}

pub fn lorentz_norm(f: &SpectralField, p: f64, q: f64) -> Result<f64> {
    Rearrangement::of_field(f).lorentz_norm(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn indicator_norms() {
        // 40 cells of height 1 in a set of 1000 cells of volume 0.01
        let vals = (0..1000).map(|i| if i % 25 == 0 { 1.0 } else { 0.0 });
        let r = Rearrangement::new(vals, 0.01);
        let m: f64 = 0.4;
        for p in [1.5, 2.0, 4.0] {
            for q in [1.0, 2.0, 7.0, f64::INFINITY] {
                let got = r.lorentz_norm(p, q).unwrap();
                assert!((got - m.powf(1.0 / p)).abs() < 1e-13, "p={p} q={q} {got}");
            }
        }
    }

    #[test]
    fn diagonal_index_is_lebesgue() {
        let g = Grid::new(16).unwrap();
        let f = SpectralField::from_fn(&g, |x| x[0].sin() * (2.0 * x[1]).cos() + 0.3);
        let r = Rearrangement::of_field(&f);
        for p in [1.0, 2.0, 3.5] {
            let a = r.lorentz_norm(p, p).unwrap();
            let b = f.lp_norm(p);
            assert!((a - b).abs() <= 1e-12 * b, "{a} {b}");
            assert!((r.lp_norm(p) - b).abs() <= 1e-12 * b);
        }
        assert!((r.measure() - g.volume()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_index() {
        let r = Rearrangement::new([1.0, 2.0], 1.0);
        assert!(matches!(r.lorentz_norm(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(r.lorentz_norm(-1.0, 1.0), Err(Error::Domain(_))));
    }
}
