use tate::group::GroupSpec;
use tate::scalars::Field;

fn main() {
    let ring = GroupSpec::Q8.ring(&Field::prime(2).unwrap()).unwrap();
    for (a, b) in [("x", "x"), ("x", "y"), ("x^2", "y"), ("x*y", "x"), ("s", "x^2*y")] {
        let p = ring.multiply(&ring.parse(a).unwrap(), &ring.parse(b).unwrap()).unwrap();
        println!("{a} * {b} = {}", ring.render(&p));
    }
}
