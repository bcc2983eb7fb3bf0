fn main() {
    let report = fracext::acceptance::run_all(|r| println!("{}", r.line()));
    println!("acceptance: {} of {} criteria pass", report.passed, report.total);
    if !report.all_pass() {
        let failed: Vec<usize> = report.criteria.iter().filter(|c| !c.pass).map(|c| c.id).collect();
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
