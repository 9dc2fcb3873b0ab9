//! Regenerates the JSON fixtures under `fixtures/`. The outputs are
//! deterministic, so rerunning after a format change yields a clean diff.
//!
//!     cargo run -p sd-cli --example gen_fixtures [target-dir]

use std::path::PathBuf;

use sd_cli::formats;
use sd_core::cosimplicial::{denormalize_algebra, presentation_to_cosimplicial, standard_dga_corpus};
use sd_core::dold_kan::ChainComplex;
use sd_core::matrix::Matrix;
use sd_core::oracle::{
    abelian_constants, bch_order2, commutator_constants, heisenberg_matrix_basis,
    nerve_from_group_law, so3_constants, tower_from_complex,
};
use sd_core::{q, Q};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    std::fs::create_dir_all(&dir).expect("fixture directory");
    let save = |name: &str, f: &formats::PresentationFile| {
        let path = dir.join(name);
        formats::save_json(&path, &formats::presentation_to_json(f)).expect("write fixture");
        println!("wrote {}", path.display());
    };

    // Additive nerves, stored as framed presentations with linear faces.
    for (name, m) in [("abelian_line.json", 1usize), ("abelian_plane.json", 2)] {
        let law = bch_order2(&abelian_constants(m), 4).unwrap();
        let p = nerve_from_group_law(&law, 3).unwrap();
        save(name, &formats::framed_file(&p).unwrap());
    }

    // Nonabelian laws, stored as the laws themselves.
    let heis = commutator_constants(&heisenberg_matrix_basis()).unwrap();
    save(
        "heisenberg.json",
        &formats::group_law_file(&bch_order2(&heis, 4).unwrap()).unwrap(),
    );
    // The rotation algebra is not two-step nilpotent, so its second-order
    // law only closes at truncation two.
    save(
        "so3.json",
        &formats::group_law_file(&bch_order2(&so3_constants(), 2).unwrap()).unwrap(),
    );

    // A two-level tower with a nonzero connecting map.
    let mut b = Matrix::zero(2, 1);
    b[(0, 0)] = q(1, 1);
    b[(1, 0)] = q(1, 1);
    let e = ChainComplex::new(vec![0, 2, 1], vec![Matrix::zero(0, 2), b]).unwrap();
    let tower = tower_from_complex(&e, 4, 3).unwrap();
    save("two_step_tower.json", &formats::framed_file(&tower).unwrap());

    // Cosimplicial level rings: the odd line, the levelwise model of the
    // one-generator exterior algebra, and truncated functions on the
    // additive line (the latter is not infinitesimal).
    save(
        "odd_line.json",
        &formats::cosimplicial_file(&sd_core::cosimplicial::odd_line_model::<Q>(3)),
    );
    let corpus = standard_dga_corpus::<Q>();
    let (_, exterior) = corpus
        .iter()
        .find(|(n, _)| *n == "exterior line")
        .expect("corpus member");
    save(
        "exterior_line_levels.json",
        &formats::cosimplicial_file(&denormalize_algebra(exterior, 3).unwrap()),
    );
    let line = nerve_from_group_law(&bch_order2(&abelian_constants(1), 2).unwrap(), 2).unwrap();
    save(
        "line_functions.json",
        &formats::cosimplicial_file(&presentation_to_cosimplicial(&line, 2).unwrap()),
    );
}
