//! Built-in NURBS surfaces: areas, implicit residuals, interface checks, the
//! perturbed sphere and a text round trip.

use iga_bem::geometry::{check_interfaces, parse_surface, write_surface, Builtin};
use iga_bem::vec3::norm;

fn main() -> iga_bem::Result<()> {
    for b in [Builtin::Sphere, Builtin::Torus, Builtin::Fichera] {
        let s = b.surface();
        let report = check_interfaces(&s, 16)?;
        println!(
            "{:8} patches {:2}  area {:.12}  volume {:.6}  interface mismatch {:.1e}",
            b.name(),
            s.num_patches(),
            s.area(),
            s.signed_volume(),
            report.max_mismatch
        );
    }

    let sphere = Builtin::Sphere.surface();
    let perturbed = sphere.perturb();
    let mut worst: f64 = 0.0;
    for k in 0..=20 {
        let x = k as f64 / 20.0;
        let p = perturbed.eval_point(k % 6, x, 1.0 - x);
        worst = worst.max((norm(p) - 1.0).abs());
    }
    println!(
        "perturbed sphere: |x| - 1 up to {worst:.1e}, area {:.12}",
        perturbed.area()
    );

    let text = write_surface(&Builtin::Torus.surface());
    let back = parse_surface(&text)?;
    println!(
        "torus round trip: {} bytes, area {:.12}",
        text.len(),
        back.area()
    );
    Ok(())
}
