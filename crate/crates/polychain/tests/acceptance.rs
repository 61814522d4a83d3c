use polychain::suite::{run_suite, summary_line};

const SEED: u64 = 20240607;

fn main() {
    let reports = run_suite(SEED, &[], true);
    let mut failed = 0;
    for r in &reports {
        println!("{}", summary_line(r));
        for f in r.failures.iter().skip(1).take(4) {
            println!("       {}", f);
        }
        for n in &r.notes {
            println!("       note: {}", n);
        }
        if !r.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", reports.len() - failed, reports.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
