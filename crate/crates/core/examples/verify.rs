use tate::suite::run_criterion;

fn main() {
    let seed = std::env::var("TATE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    for id in [1, 2, 3, 5] {
        println!("{}", run_criterion(id, seed).unwrap().line());
    }
}
