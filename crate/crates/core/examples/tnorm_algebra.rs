//! The three t-norms, their residua and negations on a few exact degrees.

use fuzzy_dllite::{deg, TNorm};

fn main() {
    let pairs = [("0.6", "0.7"), ("0.7", "0.6"), ("0.5", "0.5"), ("1/3", "2/3")];
    for k in TNorm::ALL {
        println!("{k}");
        for (a, b) in pairs {
            let (d, e) = (deg(a), deg(b));
            println!(
                "  {d} * {e} = {:<6} {d} => {e} = {:<6} ~{d} = {}",
                k.conj(&d, &e).to_string(),
                k.resid(&d, &e).to_string(),
                k.neg(&d)
            );
        }
    }
    let luk = TNorm::Lukasiewicz;
    let x = deg("0.8");
    let power = (1..5).fold(x.clone(), |acc, _| luk.conj(&acc, &x));
    println!("Lukasiewicz 0.8 to the 5th: {power}");
}
