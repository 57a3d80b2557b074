//! The tooling check appended to the verification suite: expression
//! round-trips, bit-exact operator persistence, and hash-guarded loads.

use std::collections::BTreeMap;
use std::fs;
use std::sync::atomic::{AtomicU64, Ordering};

use regionops::fock::displacement_operator;
use regionops::verify::CheckReport;
use regionops::TruncationConfig64;

use crate::opio::{load_operator, save_operator, OperatorMeta};
use crate::parser::parse_region_expression;

/// Twenty expressions covering every grammar production, used for the
/// parse → print → parse round-trip gate.
pub const EXPRESSION_CORPUS: [&str; 20] = [
    "point",
    "seg(1.5,0)",
    "seg(1.5,0.6283185307179586)",
    "line(0,0)",
    "line(0.4,0.25)",
    "rect(0,0,1,1)",
    "rect(-6,-6,12,12)",
    "disk(0,0,2)",
    "disk(1.25,-0.5,0.75)",
    "tri(0.8660254037844386,6)",
    "poly(0.8660254037844386,6)",
    "rot(1.0471975511965976,tri(0.8660254037844386,6))",
    "refl(rect(0,0,0.5,0.5))",
    "disp(0.5,0.3,rect(0,0,1,1))",
    "union(rect(0,0,1,1),disp(1,0,rect(0,0,1,1)))",
    "refl(union(tri(0.866,6),rot(1.0471976,tri(0.866,6)),rot(-1.0471976,tri(0.866,6))))",
    "union(point,disp(1,1,point))",
    "disp(-0.7,0.6,disk(0,0,1))",
    "rot(0.5,union(seg(1,0),seg(1,1.5707963267948966)))",
    " union( rect(0,0,1,1) , rot(0.7853981633974483, rect(0,0,1,1)) )",
];

static TOOLCHECK_RUN: AtomicU64 = AtomicU64::new(0);

/// Parse/print round-trip over the corpus, a bit-exact save/load round trip,
/// content-hash reuse, and rejection of a tampered header.
pub fn tooling_check() -> CheckReport {
    const NAME: &str = "tooling-roundtrip";
    let fail = |details: String| CheckReport {
        name: NAME,
        passed: false,
        details,
    };
    for src in EXPRESSION_CORPUS {
        let first = match parse_region_expression(src) {
            Ok(e) => e,
            Err(e) => return fail(format!("corpus entry `{src}` failed to parse: {e}")),
        };
        let printed = first.canonical();
        let second = match parse_region_expression(&printed) {
            Ok(e) => e,
            Err(e) => return fail(format!("canonical form `{printed}` failed to reparse: {e}")),
        };
        if first != second || second.canonical() != printed {
            return fail(format!("round trip drifted for `{src}` -> `{printed}`"));
        }
    }
    let run = TOOLCHECK_RUN.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!(
        "regionops-toolcheck-{}-{run}",
        std::process::id()
    ));
    if let Err(e) = fs::create_dir_all(&dir) {
        return fail(format!("could not create scratch directory: {e}"));
    }
    let result = persistence_round_trip(&dir);
    fs::remove_dir_all(&dir).ok();
    match result {
        Ok(()) => CheckReport {
            name: NAME,
            passed: true,
            details: format!(
                "{} expressions round-trip through the printer; save/load reproduces every \
                 entry bit for bit; repeated saves share one content hash; a tampered header \
                 is rejected",
                EXPRESSION_CORPUS.len()
            ),
        },
        Err(details) => fail(details),
    }
}

fn persistence_round_trip(dir: &std::path::Path) -> Result<(), String> {
    let cfg = TruncationConfig64::new(8).map_err(|e| e.to_string())?;
    let op = displacement_operator(0.3, -0.2, &cfg).map_err(|e| e.to_string())?;
    let meta = OperatorMeta {
        normalization: "displacement".into(),
        params: BTreeMap::from([("shift".into(), "0.3,-0.2".into())]),
    };
    let base = dir.join("op");
    let saved = save_operator(&op, &meta, &base).map_err(|e| e.to_string())?;
    let (loaded, meta2, hash) =
        load_operator(&base).map_err(|e| format!("reload failed: {e}"))?;
    if hash != saved.hash || meta2 != meta {
        return Err("reload changed the hash or metadata".into());
    }
    for r in 0..8 {
        for c in 0..8 {
            let a = op.entries()[(r, c)];
            let b = loaded.entries()[(r, c)];
            if a.re.to_bits() != b.re.to_bits() || a.im.to_bits() != b.im.to_bits() {
                return Err(format!("entry ({r},{c}) changed bits across save/load"));
            }
        }
    }
    let resaved = save_operator(&op, &meta, &base).map_err(|e| e.to_string())?;
    if resaved.hash != saved.hash {
        return Err("identical operator produced a different content hash".into());
    }
    let hdr = base.with_extension("hdr");
    let tampered = fs::read_to_string(&hdr)
        .map_err(|e| e.to_string())?
        .replace("content_hash=sha256:", "content_hash=sha256:00");
    fs::write(&hdr, tampered).map_err(|e| e.to_string())?;
    if load_operator(&base).is_ok() {
        return Err("a tampered header hash was accepted".into());
    }
    Ok(())
}
