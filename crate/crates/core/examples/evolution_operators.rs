//! Evolution operators of a matrix generator: the antiderivational
//! equation, the semigroup law, comparison with EXP((t - s) A),
//! perturbation bounds and the recovered generator.

use padic_sde::evolution::{
    exp_operator, generating_operator, perturbation_check, solve_dual, solve_evolution, GeneratorSpec, Matrix,
};
use padic_sde::padic::{BallSpec, PAdic};

fn mat(p: u32, n: u32, v: &[i128]) -> Matrix {
    Matrix::new(2, v.iter().map(|&x| PAdic::from_int(p, n, x)).collect()).unwrap()
}

fn main() -> padic_sde::Result<()> {
    let (p, n) = (3, 8);
    let d = BallSpec::unit_ball(p, n, 5);
    let a = mat(p, n, &[3, 9, 0, 6]);
    let spec = GeneratorSpec::Constant(a.clone());

    let u = solve_evolution(&spec, &d)?;
    let v = solve_dual(&spec, &d)?;
    let e = exp_operator(&a, &d)?;
    let (t, s, r) = (17, 200, 5);
    println!("U(t,s) U(s,r) = U(t,r): {}", u.at(t, s)?.mul(&u.at(s, r)?).agrees_with(&u.at(t, r)?));
    println!("U = V (dual equation):  {}", u.at(t, s)?.agrees_with(&v.at(t, s)?));
    println!("U = EXP mod 3^{}:        {}", n - 1, u.at(t, s)?.agrees_mod(&e.at(t, s)?, n as i64 - 1));

    let b = GeneratorSpec::Constant(mat(p, n, &[9, 0, 27, 9]));
    let rep = perturbation_check(&spec, &b, &d, &[(t, s), (s, t), (r, 0)])?;
    println!(
        "perturbation: identity residual {}, |U~ - U| = {} <= bound {}",
        rep.identity_residual, rep.difference, rep.bound
    );

    let g = generating_operator(&u, 4)?;
    println!("generator at level {} agrees with A mod 3^{}: {}", g.level, g.accuracy_exp, g.matrix.agrees_mod(&a, g.accuracy_exp));
    Ok(())
}
