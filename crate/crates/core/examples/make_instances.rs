//! Writes the bundled sample instances under `instances/`.

use std::path::Path;

use missing_sums::container::{iterated_container, robust_pair_container};
use missing_sums::instances::{iterated_instance, regular_guarantee_instance, robust_instance};
use missing_sums::ratio::display;
use missing_sums::sets::{sample, Interval, NatSet, RandomSpec};
use serde_json::{json, Value};

fn write(dir: &Path, name: &str, v: &Value) {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap() + "\n").unwrap();
    println!("wrote {}", path.display());
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("instances");
    std::fs::create_dir_all(&dir).unwrap();

    let r = (0..).map(robust_instance).find(|i| robust_pair_container(&i.a, &i.x, &i.y, &i.beta).is_ok()).unwrap();
    write(&dir, "robust.json", &json!({ "a": r.a, "x": r.x, "y": r.y, "beta": display(&r.beta) }));

    let it = (0..).map(iterated_instance).find(|i| iterated_container(&i.a, i.x, i.d, &i.eps, &i.l).is_ok()).unwrap();
    write(
        &dir,
        "iterated.json",
        &json!({ "a": it.a, "x": NatSet::full(it.x), "d": it.d, "eps": display(&it.eps), "l": display(&it.l) }),
    );

    let g = regular_guarantee_instance(0);
    write(
        &dir,
        "regular.json",
        &json!({ "a": g.a, "x": g.x, "y": g.y, "d": g.d, "kappa": display(&g.kappa), "l": display(&g.l) }),
    );

    let u = Interval::first(60).unwrap();
    let x = sample(&RandomSpec::new("1/2".parse().unwrap(), 11, u));
    let y = NatSet::from_members(u.doubled(), 40..=80).unwrap();
    write(&dir, "pollard.json", &json!({ "x": x, "y": y, "eps": "1/4" }));

    let small = NatSet::full(Interval::first(10).unwrap());
    let window = NatSet::from_members(small.universe().doubled(), 11..=15).unwrap();
    write(&dir, "robust_trivial.json", &json!({ "x": small, "y": window, "beta": "1/12" }));

    write(&dir, "dyadic.json", &json!({ "n": 2000, "m": 20, "p": "1/10", "d": 20 }));
}
