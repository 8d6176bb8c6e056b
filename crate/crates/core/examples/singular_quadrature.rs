//! Convergence of the regularized singular rules on touching sphere
//! elements as the number of points grows.

use std::sync::Arc;

use iga_bem::geometry::Builtin;
use iga_bem::kernel::Laplace;
use iga_bem::mesh::Mesh;
use iga_bem::quadrature::{PairIntegrator, QuadConfig};

fn main() -> iga_bem::Result<()> {
    let mesh = Arc::new(Mesh::new(Arc::new(Builtin::Sphere.surface()), 2)?);
    let integ = PairIntegrator::new(mesh.clone(), 0, QuadConfig::for_degree(0))?;
    // Element 0 against itself, a neighbour across an edge and one across a
    // corner.
    let mut pairs = vec![(0, 0)];
    for class_wanted in 1..=2 {
        let b = (1..mesh.num_elements())
            .find(|&b| mesh.shared_vertices(0, b).len() == 3 - class_wanted)
            .expect("neighbour exists");
        pairs.push((0, b));
    }
    for (a, b) in pairs {
        let geom = integ.classify(a, b)?;
        let mut reference = [0.0];
        integ.singular_block(&Laplace, &geom, a, b, 16, &mut reference)?;
        print!("{:?} ({a},{b}):", geom.class);
        for q in [2, 4, 6, 8] {
            let mut v = [0.0];
            integ.singular_block(&Laplace, &geom, a, b, q, &mut v)?;
            print!(
                " q={q} {:.1e}",
                ((v[0] - reference[0]) / reference[0]).abs()
            );
        }
        println!();
    }
    Ok(())
}
