//! Dimensions of the spline space and its discontinuous superspace for the
//! built-in geometries.

use iga_bem::geometry::Builtin;
use iga_bem::space::{dim_splinespace, dim_superspace};

fn main() {
    for b in [Builtin::Sphere, Builtin::Torus, Builtin::Fichera] {
        println!("{} ({} patches)", b.name(), b.num_patches());
        println!(
            "{:>3} {:>10} {:>10} {:>10} {:>10}",
            "p", "m=1", "m=2", "m=3", "m=4"
        );
        for p in 0..=4 {
            let row: Vec<String> = (1..=4)
                .map(|m| format!("{:>10}", dim_splinespace(b.num_patches(), p, m)))
                .collect();
            println!("{p:>3} {}", row.join(" "));
        }
        println!(
            "superspace at p=2, m=4: {}\n",
            dim_superspace(b.num_patches(), 2, 4)
        );
    }
}
