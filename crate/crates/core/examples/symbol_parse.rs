// Parsing and evaluating perturbation symbols sigma(x, p).

use hamframe::symbol::{check_growth, parse, DEFAULT_GRAD_STEP};

pub fn run_example() -> hamframe::Result<()> {
    let sigma = parse("0.1*cos(x) + 0.05*sin(2*p)^2")?;
    let (x, p) = (0.7, -1.2);
    println!("sigma({x}, {p}) = {:.12}", sigma.eval(x, p)?);
    let (gx, gp) = sigma.grad(x, p, DEFAULT_GRAD_STEP)?;
    println!("grad = ({gx:.8}, {gp:.8})");
    println!("depends on x: {}, on p: {}", sigma.depends_on_x(), sigma.depends_on_p());

    match parse("cos(x") {
        Ok(_) => unreachable!("unbalanced parenthesis"),
        Err(e) => println!("parse error at offset {:?}: {e}", e.offset()),
    }

    let quartic = parse("x^4")?;
    if let Some(w) = check_growth(&quartic, [-4.0, 4.0, -4.0, 4.0], 21)? {
        println!("x^4: {w}");
    }
    let bounded = parse("exp(-x^2)*cos(p)")?;
    println!("exp(-x^2)cos(p) growth warning: {}", check_growth(&bounded, [-4.0, 4.0, -4.0, 4.0], 21)?.is_some());
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
