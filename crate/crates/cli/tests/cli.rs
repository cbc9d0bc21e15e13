use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use planecode::mesh_io::emit_obj;
use planecode::primitives::{pocketed_block, regular_prism, unit_cube};
use planecode::{read_code, TriangleMesh};

const CUBE_OBJ: &str = "\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 2 3 7 6
f 3 4 8 7
f 4 1 5 8
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planecode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn save(dir: &Path, name: &str, mesh: &TriangleMesh) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, emit_obj(mesh)).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn cube_stats_match_the_byte_model() {
    let dir = tempfile::tempdir().unwrap();
    let obj = path(dir.path(), "cube.obj");
    std::fs::write(&obj, CUBE_OBJ).unwrap();
    let plnc = path(dir.path(), "cube.plnc");
    assert!(run(&["encode", &obj, &plnc]).status.success());
    assert_eq!(std::fs::read(&plnc).unwrap().len(), 10 + 72);
    let o = run(&["stats", &obj, &plnc, "--machine"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("plane_bytes=72\n"));
    assert!(out.contains("indexed_bytes=240\n"));
    assert!(!out.contains("quad"));
    let o = run(&["stats", &obj, "--machine", "--quad-accounting"]);
    assert!(stdout(&o).contains("quads=6\n"));
}

#[test]
fn degrees_listing_shows_the_cube_planes() {
    let dir = tempfile::tempdir().unwrap();
    let obj = save(dir.path(), "cube.obj", &unit_cube());
    let rad = path(dir.path(), "a.plnc");
    let deg = path(dir.path(), "b.plnc");
    let o = run(&["encode", &obj, &deg, "-v", "--degrees"]);
    let out = stdout(&o);
    for line in [
        "(90.000000, 0.000000, 1)",
        "(90.000000, 270.000000, 0)",
        "(180.000000, 0.000000, 0)",
    ] {
        assert!(out.contains(line), "{out}");
    }
    run(&["encode", &obj, &rad]);
    assert_eq!(std::fs::read(rad).unwrap(), std::fs::read(deg).unwrap());
}

#[test]
fn convex_re_encode_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let meshes = [
        ("cube", unit_cube()),
        ("prism", regular_prism(32, 1.0, 1.0)),
        (
            "box",
            planecode::primitives::box_mesh(
                planecode::Vec3::new(-3.0, 0.5, 2.0),
                planecode::Vec3::new(4.0, 1.5, 9.0),
            ),
        ),
    ];
    for (name, mesh) in meshes {
        let obj = save(dir.path(), &format!("{name}.obj"), &mesh);
        let first = path(dir.path(), &format!("{name}.plnc"));
        let back = path(dir.path(), &format!("{name}.back.obj"));
        let second = path(dir.path(), &format!("{name}.2.plnc"));
        assert!(run(&["encode", &obj, &first]).status.success());
        assert!(run(&["decode", &first, &back]).status.success());
        assert!(run(&["encode", &back, &second]).status.success());
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn decode_writes_watertight_stl() {
    let dir = tempfile::tempdir().unwrap();
    let obj = save(dir.path(), "cube.obj", &unit_cube());
    let plnc = path(dir.path(), "cube.plnc");
    let stl = path(dir.path(), "cube.stl");
    run(&["encode", &obj, &plnc]);
    assert!(run(&["decode", &plnc, &stl]).status.success());
    let bytes = std::fs::read(&stl).unwrap();
    assert_eq!(bytes.len(), 84 + 50 * 12);
    let mesh = planecode::mesh_io::parse_stl_binary(&bytes).unwrap();
    assert!(mesh.topology().is_closed_manifold());
    assert!((mesh.signed_volume() - 1.0).abs() < 1e-6);
}

#[test]
fn prism_simplify_reduces_planes() {
    let dir = tempfile::tempdir().unwrap();
    let obj = save(dir.path(), "prism.obj", &regular_prism(32, 1.0, 1.0));
    let plnc = path(dir.path(), "prism.plnc");
    let out = path(dir.path(), "small.plnc");
    run(&["encode", &obj, &plnc]);
    let o = run(&["simplify", &plnc, &out, "--tau", "15"]);
    assert!(o.status.success());
    let before = read_code(&std::fs::read(&plnc).unwrap())
        .unwrap()
        .plane_count();
    let after = read_code(&std::fs::read(&out).unwrap())
        .unwrap()
        .plane_count();
    assert_eq!(before, 34);
    assert!(after < before);
    assert!(stdout(&o).contains(&format!("planes: 34 -> {after}")));
}

#[test]
fn non_convex_mesh_gets_a_segmented_code() {
    let dir = tempfile::tempdir().unwrap();
    let obj = save(dir.path(), "block.obj", &pocketed_block());
    let plnc = path(dir.path(), "block.plnc");
    let o = run(&["encode", &obj, &plnc]);
    assert!(stdout(&o).starts_with("segmented code, 2 parts, 22 planes"));
    let o = run(&["stats", &obj, &plnc, "--machine", "--quad-accounting"]);
    let out = stdout(&o);
    assert!(
        out.contains("plane_bytes=264\n") && out.contains("indexed_bytes=528\n"),
        "{out}"
    );
    let o = run(&["segment", &obj]);
    let out = stdout(&o);
    assert!(out.contains("pseudo-convex") && out.contains("pseudo-concave"));
    let back = path(dir.path(), "back.obj");
    assert!(run(&["decode", &plnc, &back]).status.success());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = path(dir.path(), "missing.obj");
    let out = path(dir.path(), "out.plnc");
    let o = run(&["encode", &missing, &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("IoError"));

    let bad = path(dir.path(), "bad.obj");
    std::fs::write(&bad, "v 0 0\n").unwrap();
    assert_eq!(run(&["encode", &bad, &out]).status.code(), Some(2));

    let junk = path(dir.path(), "junk.plnc");
    std::fs::write(&junk, b"NOPE\x01\x00").unwrap();
    let o = run(&["decode", &junk, &path(dir.path(), "x.obj")]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("BadMagic"));

    let obj = save(dir.path(), "cube.obj", &unit_cube());
    let plnc = path(dir.path(), "cube.plnc");
    run(&["encode", &obj, &plnc]);
    let o = run(&["simplify", &plnc, &out, "--delta", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("OverSimplified"));

    assert_eq!(
        run(&["simplify", &plnc, &out, "--tau", "90"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}
