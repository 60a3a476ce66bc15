use std::path::Path;
use std::process::{Command, Output};

use planestar::algebra::rat;
use planestar::diffop::{BiDiffOp, KTable};
use planestar::io::{read_documents, Document, StarProductDoc};
use planestar::starprod::{moyal_fixture, StarProduct};

fn planestar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planestar"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_product(dir: &Path, name: &str, m: &StarProduct) {
    let text = Document::StarProduct(StarProductDoc::from_product(m)).to_text();
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn quantize_then_check_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let q = planestar(dir.path(), &["quantize", "--phi", "1", "--order", "3"]);
    assert_eq!(q.status.code(), Some(0));
    let docs = read_documents(&stdout(&q)).unwrap();
    let Document::StarProduct(doc) = &docs[0] else {
        panic!("{docs:?}")
    };
    let k3 = &doc.terms[2];
    assert_eq!((k3.k, k3.ops.len()), (3, 1));
    assert_eq!(
        (k3.ops[0].df, k3.ops[0].dg, k3.ops[0].coeff.as_str()),
        ([3, 0], [0, 3], "1/6")
    );
    std::fs::write(dir.path().join("q.json"), q.stdout).unwrap();

    let a = planestar(dir.path(), &["assoc-check", "--product", "q.json"]);
    assert_eq!(a.status.code(), Some(0));
    assert!(stdout(&a).contains("\"defects\": []"));

    let c = planestar(dir.path(), &["classify", "--product", "q.json"]);
    assert_eq!(c.status.code(), Some(0));
    let Document::PoissonSeries(p) = &read_documents(&stdout(&c)).unwrap()[0] else {
        panic!()
    };
    assert_eq!(p.terms.len(), 1);
    assert_eq!((p.terms[0].i, p.terms[0].phi.as_str()), (0, "1"));

    let s = planestar(
        dir.path(),
        &["star-mul", "--product", "q.json", "--f", "x", "--g", "y"],
    );
    let Document::HSeries(h) = &read_documents(&stdout(&s)).unwrap()[0] else {
        panic!()
    };
    assert_eq!(h.coeffs, vec!["x*y", "1", "0", "0"]);
}

#[test]
fn property_violations_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let broken = StarProduct::new(vec![KTable::dx_dy().to_bidiff(), BiDiffOp::zero()]);
    write_product(dir.path(), "broken.json", &broken);
    let a = planestar(dir.path(), &["assoc-check", "--product", "broken.json"]);
    assert_eq!(a.status.code(), Some(1));
    let Document::DefectReport(d) = &read_documents(&stdout(&a)).unwrap()[0] else {
        panic!()
    };
    assert_eq!(d.defects[0].k, 2);

    let c = planestar(dir.path(), &["classify", "--product", "broken.json"]);
    assert_eq!(c.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&c.stderr).contains("not the quantization"));

    write_product(dir.path(), "moyal.json", &moyal_fixture(&rat(1, 1), 2));
    let c = planestar(dir.path(), &["classify", "--product", "moyal.json"]);
    assert_eq!(c.status.code(), Some(1));
    let n = planestar(dir.path(), &["normalize", "--product", "broken.json"]);
    assert_eq!(n.status.code(), Some(1));
}

#[test]
fn normalize_emits_gauge_then_product() {
    let dir = tempfile::tempdir().unwrap();
    write_product(dir.path(), "moyal.json", &moyal_fixture(&rat(1, 1), 3));
    let n = planestar(dir.path(), &["normalize", "--product", "moyal.json"]);
    assert_eq!(n.status.code(), Some(0));
    let docs = read_documents(&stdout(&n)).unwrap();
    assert_eq!(
        docs.iter().map(Document::kind).collect::<Vec<_>>(),
        vec!["gauge_op", "star_product"]
    );
    // the output file can be fed back: readers take the star_product document
    std::fs::write(dir.path().join("n.json"), &n.stdout).unwrap();
    let c = planestar(dir.path(), &["classify", "--product", "n.json"]);
    assert_eq!(c.status.code(), Some(0));
    assert!(stdout(&c).contains("\"phi\": \"1\""));
}

#[test]
fn caps_exhausted_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "quantize",
        "--phi",
        "x^2*y",
        "--order",
        "3",
        "--max-op-order",
        "1",
        "--max-deg",
        "0",
        "--escalation-steps",
        "0",
    ];
    let q = planestar(dir.path(), &args);
    assert_eq!(q.status.code(), Some(2));
    assert!(q.stdout.is_empty());
    write_product(dir.path(), "moyal.json", &moyal_fixture(&rat(1, 1), 2));
    let n = planestar(
        dir.path(),
        &[
            "normalize",
            "--product",
            "moyal.json",
            "--max-op-order",
            "1",
            "--escalation-steps",
            "0",
        ],
    );
    assert_eq!(n.status.code(), Some(2));
}

#[test]
fn bad_input_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 7] = [
        &["quantize", "--phi", "x y", "--order", "2"],
        &["quantize", "--phi", "x"],
        &["quantize", "--phi", "x", "--order", "two"],
        &[
            "star-mul",
            "--product",
            "missing.json",
            "--f",
            "x",
            "--g",
            "y",
        ],
        &["berezin", "--phi", "0", "--order", "2"],
        &["fit-lie", "--k", "0", "--samples", "x*y"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = planestar(dir.path(), args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    let e = planestar(
        dir.path(),
        &["quantize", "--phi", "x +\n* y", "--order", "2"],
    );
    assert!(String::from_utf8_lossy(&e.stderr).contains("2:1"));
    std::fs::write(
        dir.path().join("junk.json"),
        "{\"kind\": \"gauge_op\", \"h_order\": 0, \"terms\": []}",
    )
    .unwrap();
    let o = planestar(dir.path(), &["classify", "--product", "junk.json"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["--help"][..], &["--version"], &["quantize", "--help"]] {
        let o = planestar(dir.path(), args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn berezin_and_fit_lie_documents() {
    let dir = tempfile::tempdir().unwrap();
    let b = planestar(dir.path(), &["berezin", "--phi", "x*y", "--order", "1"]);
    assert_eq!(b.status.code(), Some(0));
    let Document::BerezinData(d) = &read_documents(&stdout(&b)).unwrap()[0] else {
        panic!()
    };
    assert_eq!(d.h_order, 1);
    assert_eq!((d.f[0].value.num.as_str(), d.f[0].value.phi_pow), ("1", 1));
    assert_eq!(
        (d.tau[1].value.num.as_str(), d.tau[1].value.phi_pow),
        ("-1/2*y", 1)
    );
    assert_eq!(d.s[1].ops[0].dy, 0);

    let f = planestar(
        dir.path(),
        &["fit-lie", "--k", "1", "--samples", "x*y,x^2*y"],
    );
    assert_eq!(f.status.code(), Some(0));
    let Document::FitReport(r) = &read_documents(&stdout(&f)).unwrap()[0] else {
        panic!()
    };
    assert_eq!(
        (r.status.as_str(), r.words[0].coeff.as_str()),
        ("unique", "1/2")
    );
}
