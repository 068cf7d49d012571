use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (code, output) = garlands::cli::run(&args);
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(output.as_bytes()).expect("stdout");
    stdout.flush().expect("stdout");
    std::process::exit(code);
}
