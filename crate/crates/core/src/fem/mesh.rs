use crate::error::{Error, Result};
use crate::Real;

/// Rectangular grid of congruent square elements.
///
/// Nodes and elements are both numbered column-major from the bottom-left
/// corner: node `(ix, iy)` is `ix·(nely+1) + iy`, element `(ex, ey)` is
/// `ex·nely + ey`. Node `n` owns degrees of freedom `2n` (x) and `2n+1` (y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuredMesh<T> {
    pub nelx: usize,
    pub nely: usize,
    pub element_size: T,
}

impl<T: Real> StructuredMesh<T> {
    pub fn new(nelx: usize, nely: usize, element_size: T) -> Result<Self> {
        if nelx == 0 || nely == 0 {
            return Err(Error::DomainFault(format!("mesh {nelx}x{nely} has no elements")));
        }
        if !(element_size > T::zero()) {
            return Err(Error::DomainFault("element size must be positive".into()));
        }
        Ok(Self {
            nelx,
            nely,
            element_size,
        })
    }

    /// Unit-square elements.
    pub fn unit(nelx: usize, nely: usize) -> Result<Self> {
        Self::new(nelx, nely, T::one())
    }

    pub fn n_elements(&self) -> usize {
        self.nelx * self.nely
    }

    pub fn n_nodes(&self) -> usize {
        (self.nelx + 1) * (self.nely + 1)
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.n_nodes()
    }

    #[inline]
    pub fn node(&self, ix: usize, iy: usize) -> usize {
        ix * (self.nely + 1) + iy
    }

    #[inline]
    pub fn element(&self, ex: usize, ey: usize) -> usize {
        ex * self.nely + ey
    }

    #[inline]
    pub fn element_coords(&self, e: usize) -> (usize, usize) {
        (e / self.nely, e % self.nely)
    }

    /// Degrees of freedom of element `e` in local order: lower-left,
    /// lower-right, upper-right, upper-left node, x before y.
    pub fn element_dofs(&self, e: usize) -> [usize; 8] {
        let (ex, ey) = self.element_coords(e);
        let n = [
            self.node(ex, ey),
            self.node(ex + 1, ey),
            self.node(ex + 1, ey + 1),
            self.node(ex, ey + 1),
        ];
        [
            2 * n[0],
            2 * n[0] + 1,
            2 * n[1],
            2 * n[1] + 1,
            2 * n[2],
            2 * n[2] + 1,
            2 * n[3],
            2 * n[3] + 1,
        ]
    }

    /// Half-bandwidth of the assembled stiffness matrix.
    pub fn bandwidth(&self) -> usize {
        2 * (self.nely + 1) + 3
    }

    pub fn centroid(&self, e: usize) -> (T, T) {
        let (ex, ey) = self.element_coords(e);
        let h = self.element_size;
        let half = T::lit(0.5);
        ((T::from_count(ex) + half) * h, (T::from_count(ey) + half) * h)
    }

    pub fn centroids(&self) -> Vec<(T, T)> {
        (0..self.n_elements()).map(|e| self.centroid(e)).collect()
    }

    pub fn element_volume(&self) -> T {
        self.element_size * self.element_size
    }

    pub fn volumes(&self) -> Vec<T> {
        vec![self.element_volume(); self.n_elements()]
    }

    /// Same domain with elements twice as wide.
    pub fn coarsened(&self) -> Result<Self> {
        if self.nelx % 2 != 0 || self.nely % 2 != 0 {
            return Err(Error::DimensionFault {
                expected: 2 * (self.nelx / 2).max(1),
                found: self.nelx,
            });
        }
        Self::new(self.nelx / 2, self.nely / 2, self.element_size * T::lit(2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbering() {
        let m = StructuredMesh::<f64>::unit(3, 2).unwrap();
        assert_eq!(m.n_nodes(), 12);
        assert_eq!(m.element_dofs(0), [0, 1, 6, 7, 8, 9, 2, 3]);
        assert_eq!(m.element_coords(m.element(2, 1)), (2, 1));
        assert_eq!(m.centroid(m.element(2, 1)), (2.5, 1.5));
        let bw = (0..m.n_elements())
            .map(|e| {
                let d = m.element_dofs(e);
                d.iter().max().unwrap() - d.iter().min().unwrap()
            })
            .max()
            .unwrap();
        assert_eq!(bw, m.bandwidth());
    }

    #[test]
    fn rejects_empty_and_odd_coarsening() {
        assert!(StructuredMesh::<f64>::unit(0, 2).is_err());
        assert!(StructuredMesh::<f64>::unit(3, 2).unwrap().coarsened().is_err());
        let c = StructuredMesh::<f64>::unit(4, 2).unwrap().coarsened().unwrap();
        assert_eq!((c.nelx, c.nely, c.element_size), (2, 1, 2.0));
    }
}
