//! The on-disk directory format: manifest plus raw little-endian arrays,
//! bit-exact on round trips.
//!
//! Run with `cargo run --example file_roundtrip`.

use kblock::hamiltonian::generate_synthetic;
use kblock::io::{read_hamiltonian, read_manifest, write_hamiltonian};
use kblock::kmesh::Mesh;

fn main() {
    let dir = std::env::temp_dir().join("kblock_roundtrip_demo");
    let _ = std::fs::remove_dir_all(&dir);

    let mesh = Mesh::new(1, 1, 2).unwrap();
    let ham = generate_synthetic(mesh, 2, 7, 0.2);
    write_hamiltonian(&dir, &ham, Some(7), None).unwrap();

    let manifest = read_manifest(&dir).unwrap();
    println!("manifest kind = {}, dtype = {}", manifest.kind, manifest.dtype);
    for (name, shape) in &manifest.arrays {
        println!("  array {name}: shape {shape:?}");
    }

    let back = read_hamiltonian(&dir).unwrap();
    assert_eq!(ham.h, back.h);
    assert_eq!(ham.v, back.v);
    println!("round trip matched bit for bit at {}", dir.display());
}
