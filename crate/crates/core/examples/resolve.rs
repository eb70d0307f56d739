use tate::group::GroupSpec;

fn main() {
    let group = GroupSpec::parse("C4xC2").unwrap();
    let res = group.resolution(&group.default_field().unwrap()).unwrap();
    for n in -4..=4 {
        println!("rank P_{n} = {}", res.rank(n));
    }
    let exact = res.verify_exact((-4, 4));
    let minimal = res.verify_minimal((-4, 4));
    println!("exact: {}, minimal: {}", exact.passed, minimal.passed);
}
