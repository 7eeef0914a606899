mod common;

#[test]
fn eq_cr_on_generated_configurations() {
    common::prop_cr_relations(200).unwrap();
}

#[test]
fn similarity_table_closure() {
    common::prop_similarity(200).unwrap();
}

#[test]
fn symmetry_criterion_matches_norm_condition() {
    common::prop_symmetry(200).unwrap();
}

#[test]
fn five_term_d_vanishes() {
    common::prop_five_term_d(200).unwrap();
}

#[test]
fn cartan_cocycle() {
    common::prop_cartan_cocycle(200).unwrap();
}

#[test]
fn face_identity() {
    common::prop_face_identity(200).unwrap();
}

#[test]
fn pachner_moves_preserve_d() {
    common::prop_pachner(200).unwrap();
}

#[test]
fn wedge_reduction_matches_oracle() {
    let (agree, total) = common::wedge_oracle_agreement(500, 7);
    assert_eq!(agree, total);
}
