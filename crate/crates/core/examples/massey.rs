use tate::group::GroupSpec;
use tate::massey::{GradedMatrix, Massey};
use tate::scalars::Field;

fn main() {
    let c3 = GroupSpec::parse("C3").unwrap().ring(&Field::prime(3).unwrap()).unwrap();
    let x = c3.parse("x").unwrap();
    let r = Massey::new(c3.clone(), (-8, 8)).triple(&x, &x, &x).unwrap();
    println!("<x, x, x> = {:?}, indeterminacy {}", r.representative.render(&c3), r.indeterminacy_dim);

    let q8 = GroupSpec::Q8.ring(&Field::prime(2).unwrap()).unwrap();
    let w = GradedMatrix::parse(&q8, &[vec!["y", "x + y"], vec!["x", "y"]]).unwrap();
    let r = Massey::new(q8.clone(), (-8, 8)).matric(&w, &w, &w).unwrap();
    println!("<X, X, X> = {:?}, contains zero: {}", r.representative.render(&q8), r.contains_zero);
}
