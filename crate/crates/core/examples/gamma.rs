use tate::group::GroupSpec;
use tate::verdict::{gamma_verdict, VerdictOptions};

fn main() {
    let opts = VerdictOptions { window: (-8, 8), bound: 3 };
    for g in ["C2", "C3", "C4", "C2xC2", "C3xC9", "C2xC2xC2", "Q8"] {
        let v = gamma_verdict(&GroupSpec::parse(g).unwrap(), None, &opts).unwrap();
        println!("{g}: gamma {}, certified {}", if v.trivial { "vanishes" } else { "is nonzero" }, v.certified());
    }
}
