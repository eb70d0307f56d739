use tate::group::GroupSpec;
use tate::scalars::Field;
use tate::secondary::Secondary;

fn main() {
    let ring = GroupSpec::Q8.ring(&Field::prime(2).unwrap()).unwrap();
    let table = Secondary::new(ring.clone(), (-8, 8)).unwrap().q8_table().unwrap();
    for ((a, b, c), v) in table.nonzero() {
        println!("m({a}, {b}, {c}) = {}", ring.render(v));
    }
    println!("{} of {} triples are nonzero", table.nonzero().count(), table.entries.len());
}
