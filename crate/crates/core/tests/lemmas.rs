use plankton_qso::dynamics::{iterate, IterateOptions};
use plankton_qso::harness::{sample_face_point, sample_parameters, stream_rng, SamplingConstraint};
use plankton_qso::simplex::distance_to_matter_segment;
use plankton_qso::Qso;

/// With bacteria dying out and two of the three plankton groups absent, the
/// third dies out too and the run ends on the matter-only segment.
#[test]
fn last_plankton_group_dies_out() {
    let bacteria_die =
        SamplingConstraint::at_most("a10+a11≤a12", |p| (p.a(10) + p.a(11), p.a(12)));
    let opts = IterateOptions::default().without_history();
    let mut rng = stream_rng(54, 0, 0);
    for survivor in 0..3 {
        for _ in 0..30 {
            let qso =
                Qso::new(sample_parameters(std::slice::from_ref(&bacteria_die), &mut rng).unwrap())
                    .unwrap();
            let x0 = sample_face_point(&[survivor, 3, 4, 5], &mut rng);
            let run = iterate(&qso, &x0, &opts).unwrap();
            assert!(run.verdict.converged);
            let limit = run.verdict.limit;
            assert!(
                limit[survivor] <= 1e-8,
                "x{} → {}",
                survivor + 1,
                limit[survivor]
            );
            assert!(distance_to_matter_segment(limit.coords()).0 <= 1e-8);
        }
    }
}
