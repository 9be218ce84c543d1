//! The hand-rolled QR eigensolver on a non-normal complex matrix.

use coordinate_bethe::dense::DenseMatrix;
use coordinate_bethe::oracle::dense_eigenpairs;
use coordinate_bethe::c64;

fn main() -> coordinate_bethe::Result<()> {
    let a = DenseMatrix::from_fn(6, 6, |i, j| {
        let x = (i * 7 + j * 3) as f64;
        c64(x.sin(), (x * 0.37).cos() * if i > j { 0.5 } else { 1.0 })
    });
    let (report, vectors) = dense_eigenpairs(&a)?;
    println!("trace {:.6}", a.trace());
    for (lambda, v) in report.eigenvalues.iter().zip(&vectors) {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        println!("{:+.6} {:+.6}i  |v|={norm:.3}", lambda.re, lambda.im);
    }
    println!("backward errors {:?}", report.backward_errors);
    Ok(())
}
