fn main() {
    ndsthermo::cli::main()
}
