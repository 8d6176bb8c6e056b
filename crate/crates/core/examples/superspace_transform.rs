//! A random spline density evaluated directly and through the sparse map
//! into the elementwise Bernstein superspace.

use std::sync::Arc;

use iga_bem::geometry::Builtin;
use iga_bem::mesh::Mesh;
use iga_bem::space::{SplineSpace, SuperSpace};
use rand::{Rng, SeedableRng};

fn main() -> iga_bem::Result<()> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let mesh = Arc::new(Mesh::new(Arc::new(Builtin::Torus.surface()), 2)?);
    for p in 0..=4 {
        let spline = SplineSpace::new(mesh.clone(), p);
        let superspace = SuperSpace::new(mesh.clone(), p);
        let t = spline.transform(&superspace)?;
        let c: Vec<f64> = (0..spline.dim())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let cs = t.apply_transpose(&c)?;
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let patch = rng.gen_range(0..16);
            let (x, y) = (rng.gen(), rng.gen());
            worst =
                worst.max((spline.eval(&c, patch, x, y) - superspace.eval(&cs, patch, x, y)).abs());
        }
        println!(
            "p={p}: T is {} x {} with {} nonzeros, deviation {worst:.1e}",
            t.rows(),
            t.cols(),
            t.nnz()
        );
    }
    Ok(())
}
