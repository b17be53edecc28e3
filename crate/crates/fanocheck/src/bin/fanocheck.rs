fn main() {
    std::process::exit(fanocheck::run());
}
