use gsp4::roots::{weyl_group, ParabolicType};
use gsp4::tables::{build_tables, emit_tables};

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn borel_tables_match_golden() {
    assert_eq!(emit_tables(ParabolicType::Borel).unwrap(), golden("tables_B.tsv"));
}

#[test]
fn siegel_tables_match_golden() {
    assert_eq!(emit_tables(ParabolicType::Siegel).unwrap(), golden("tables_P.tsv"));
}

#[test]
fn klingen_tables_match_golden() {
    assert_eq!(emit_tables(ParabolicType::Klingen).unwrap(), golden("tables_Pstar.tsv"));
}

#[test]
fn output_is_byte_stable() {
    for q in ParabolicType::MAXIMAL_AND_BOREL {
        assert_eq!(emit_tables(q).unwrap(), emit_tables(q).unwrap());
    }
}

#[test]
fn borel_borel_degrees_are_codimensions() {
    let t = build_tables(ParabolicType::Borel).unwrap();
    let table = t.degrees.iter().find(|d| d.sigma == "B").unwrap();
    assert_eq!(table.rows.len(), 8);
    for w in weyl_group() {
        let row = table.rows.iter().find(|r| r.w == w.name()).unwrap();
        assert_eq!(row.q, 4 - w.length());
        assert_eq!(row.q_prime, row.q);
    }
}
