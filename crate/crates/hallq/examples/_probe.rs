use hallq::qa::{theta_evaluate, verify_theta_relation, QAElem, QAGen};
use hallq::scalar::PrimePower;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn main() {
    let s11 = (1i64, 1i64);
    for q in [2u64, 3] {
        let ctx = PrimePower::from_q(q).unwrap();
        let mut bad = 0;
        for key in [
            "sela1", "sela3.6", "sela2", "sela3", "sela3.5", "sela4", "sela5", "sela6",
            "sela7", "sela8", "sela9",
        ] {
            for k in -2i64..=2 {
                for l in -2i64..=2 {
                    let needs_nonzero = matches!(key, "sela7" | "sela8" | "sela9");
                    let (k, l) = if needs_nonzero {
                        (if k == 0 { 1 } else { k }, if l == 0 { 1 } else { l })
                    } else {
                        (k, l)
                    };
                    let r = verify_theta_relation(ctx, key, k, l).unwrap();
                    if !r.holds {
                        eprintln!("q={q} {key} k={k} l={l}: FAIL");
                        bad += 1;
                    }
                }
            }
        }
        eprintln!("q={q}: relation failures {bad}");
    }
    // Random multiplicativity pairs at q=2.
    let ctx = PrimePower::new(2, 1);
    let mut rng = StdRng::seed_from_u64(7);
    let mut bad = 0;
    for _ in 0..100 {
        let pick = |rng: &mut StdRng| -> QAGen {
            let idx = rng.gen_range(-2i64..=2);
            match rng.gen_range(0u8..5) {
                0 => QAGen::E(idx),
                1 => QAGen::F(idx),
                2 => QAGen::H(if idx == 0 { 1 } else { idx }),
                3 => QAGen::S(if rng.gen() { 1 } else { -1 }),
                _ => QAGen::CHalf(if rng.gen() { 1 } else { -1 }),
            }
        };
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let xa = QAElem::generator(s11, a.clone());
        let xb = QAElem::generator(s11, b.clone());
        let lhs = theta_evaluate(&xa.mul(&xb), ctx);
        let rhs = theta_evaluate(&xa, ctx).twisted_product(&theta_evaluate(&xb, ctx));
        if !lhs.sub(&rhs).is_zero() {
            eprintln!("mult FAIL {a:?} {b:?}");
            bad += 1;
        }
    }
    eprintln!("multiplicativity failures: {bad}");
}
