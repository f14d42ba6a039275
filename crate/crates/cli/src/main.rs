fn main() {
    println!("nlsregime");
}
