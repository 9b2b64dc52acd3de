fn main() {
    println!("rcpos");
}
