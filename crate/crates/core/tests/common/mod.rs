//! Random valid bench documents, shared by the parser property tests and
//! the acceptance harness.

use proptest::prelude::*;

use xpcomm::bench::BenchDocument;
use xpcomm::elements::{ElementPipeline, OpticalElement};
use xpcomm::{BenchParams, GridSpec};

fn positive() -> impl Strategy<Value = f64> {
    // log-uniform over a wide range so the rendered text exercises exponents
    (-12.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

fn grid() -> impl Strategy<Value = GridSpec> {
    (4u32..14, 1e-4f64..1.0).prop_map(|(p, h)| GridSpec::new(1 << p, h).unwrap())
}

fn element(h: f64) -> BoxedStrategy<OpticalElement> {
    let inside = 0.0..=h;
    prop_oneof![
        (1e-9..=h).prop_map(|l| OpticalElement::PositionBench { l }),
        positive().prop_map(|l| OpticalElement::LinearAttenuator { l }),
        positive().prop_map(|l| OpticalElement::HardAperture { l }),
        (positive(), positive()).prop_map(|(lambda, f)| OpticalElement::LensFt { lambda, f }),
        Just(OpticalElement::AxisFlip),
        (-h..=h, inside, -20.0f64..20.0).prop_map(move |(a, b, s)| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            OpticalElement::phase_shifter(lo, hi, s)
        }),
    ]
    .boxed()
}

fn momentum_bench(lambda: f64) -> impl Strategy<Value = OpticalElement> {
    // lambda either inherited from the document or given explicitly
    (prop::option::of(positive()), positive(), positive()).prop_map(move |(own, f, l)| {
        OpticalElement::MomentumBench {
            lambda: own.unwrap_or(lambda),
            f,
            l,
        }
    })
}

fn arm(h: f64, lambda: f64) -> impl Strategy<Value = ElementPipeline> {
    (
        prop::collection::vec(element(h), 0..4),
        momentum_bench(lambda),
        prop::collection::vec(element(h), 0..4),
    )
        .prop_map(|(mut before, p, after)| {
            before.push(p);
            before.extend(after);
            ElementPipeline::new(before)
        })
}

pub fn document() -> impl Strategy<Value = BenchDocument> {
    (grid(), positive(), positive(), positive(), -50.0f64..50.0)
        .prop_flat_map(|(grid, lambda, f, hbar, phase)| {
            let h = grid.half_extent();
            (
                Just(grid),
                Just((lambda, f, hbar, phase)),
                1e-9..=h,
                1e-9..=h / 4.0,
                arm(h, lambda),
                arm(h, lambda),
            )
        })
        .prop_map(|(grid, (lambda, f, hbar, phase), l, w, upper, lower)| BenchDocument {
            params: BenchParams { lambda, f, l, w, hbar },
            phase,
            grid,
            upper,
            lower,
        })
}
