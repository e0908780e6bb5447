//! Fixed-precision arithmetic in Q_p: construction, digits, norms,
//! inversion, truncation and the exponential.

use padic_sde::padic::{exp_p, mahler, PAdic};

fn main() -> padic_sde::Result<()> {
    let (p, n) = (5, 8);
    let x = PAdic::from_rational(p, n, 7, 25)?;
    let y = PAdic::from_int(p, n, -3);
    println!("x = 7/25    -> {x}  |x| = {}", x.norm());
    println!("y = -3      -> {y}  digits {:?}", y.digits());
    println!("x + y       -> {}", &x + &y);
    println!("x * y       -> {}", &x * &y);
    println!("x / y       -> {}", x.checked_div(&y)?);
    println!("1/x * x = 1 -> {}", (&x.inv()? * &x).agrees_with(&PAdic::one(p, n)));

    // sigma_j keeps the digits of exponent < j.
    let z = PAdic::from_int(p, n, 1 + 2 * 5 + 3 * 25 + 4 * 125);
    for j in 0..4 {
        println!("sigma_{j}(z)  -> {}", z.sigma(j)?);
    }

    let five = PAdic::from_int(p, n, 5);
    println!("exp(5)      -> {}", exp_p(&five)?);
    println!("exp(1)      -> {:?}", exp_p(&PAdic::one(p, n)).err());
    println!("C(12, 3)    -> {}", mahler(3, &PAdic::from_int(p, n, 12))?);

    let parsed: PAdic = x.to_string().parse()?;
    println!("round trip  -> {}", parsed == x);
    Ok(())
}
