//! The discretized operators: pointwise transforms, quadrature Gram matrices and the
//! two routes to ‖Tf‖².

use illposed::grid::make_grid;
use illposed::integral::{fourier_transform, gram_matrix, laplace_forward, quadratic_form, transform_norm_sq, OperatorKind};
use illposed::{FunctionRep, Interval};

fn main() -> illposed::Result<()> {
    let ab = Interval::new(1.0, 2.0)?;

    // Laplace transform of the constant 1 on [1,2]: (e^{-s} − e^{-2s}) / s.
    let one = FunctionRep::constant(ab, 1.0);
    let s = [0.5, 1.0, 4.0];
    for (s, v) in s.iter().zip(laplace_forward(&one, ab, &s)?) {
        println!("L[1]({s}) = {v:.15}  exact {:.15}", ((-s).exp() - (-2.0 * s).exp()) / s);
    }

    // Fourier transform of the indicator of [-1,1]: 2 sin ξ / ξ.
    let box1 = FunctionRep::constant(Interval::symmetric(), 1.0);
    for xi in [0.5, 3.0, 10.0] {
        let (re, im) = fourier_transform(&box1, xi, 64)?;
        println!("F[1]({xi}) = {re:.15} + {im:.1e}i  exact {:.15}", 2.0 * f64::sin(xi) / xi);
    }

    // ‖Tf‖² via the kernel matrix and via transform-then-integrate.
    for kind in [OperatorKind::laplace(ab)?, OperatorKind::fourier()] {
        let d = kind.input_domain().span();
        let m = gram_matrix(&kind, &make_grid(kind.input_domain(), 128)?)?;
        let f = FunctionRep::sine(d, vec![0.3, -1.0, 0.5]);
        println!(
            "{kind}: matrix {:.12e}, transform {:.12e}",
            quadratic_form(&m, &f)?,
            transform_norm_sq(&kind, &f, 256)?
        );
    }
    Ok(())
}
