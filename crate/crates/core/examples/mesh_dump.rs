//! Builds the reduced triangle for the heptagon, refines it twice and
//! prints the tagged mesh dump.
//!
//! cargo run --release --example mesh_dump

use polygon_spectra::dump::{read_mesh, write_mesh};
use polygon_spectra::geometry::TriangleSpec;
use polygon_spectra::mesh::{mesh_triangle, BoundaryTag};

fn main() -> polygon_spectra::Result<()> {
    let m = mesh_triangle(&TriangleSpec::for_polygon(7, 1.0), 2)?;
    let text = write_mesh(&m);
    print!("{text}");
    let back = read_mesh(&text)?;
    let dirichlet = back
        .tagged_nodes(BoundaryTag::Dirichlet)
        .iter()
        .filter(|&&b| b)
        .count();
    eprintln!(
        "{} nodes, {} elements, {} Dirichlet nodes, area {:.12}",
        back.nodes.len(),
        back.elements.len(),
        dirichlet,
        back.area()
    );
    Ok(())
}
