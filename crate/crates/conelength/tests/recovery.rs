//! End-to-end coordinate recovery: forward spectra are inverted back to
//! the coordinates that produced them, across every supported surface type.

mod support;

use conelength::error::Error;
use conelength::inversion::{curve_budget, recover_surface, LengthSpectrum};
use conelength::manifest::{family_name, gamma_id};
use conelength::teich::{forward_spectrum, spectrum_deviation};

use support::{rng, sample_surface, surface_deviation, surface_types};

#[test]
fn coordinates_round_trip_through_the_spectrum() {
    let mut rng = rng(0x31a1);
    let types = surface_types(3, 4);
    for i in 0..200 {
        let (g, n) = types[i % types.len()];
        let x = sample_surface(&mut rng, g, n);
        let spectrum = forward_spectrum(&x).unwrap();
        let y = recover_surface(&x.decomposition, &spectrum).unwrap();
        let (coords, twists) = surface_deviation(&x, &y);
        assert!(
            coords <= 1e-6,
            "({g},{n}) coordinate deviation {coords:.3e}"
        );
        assert!(twists <= 1e-9, "({g},{n}) twist deviation {twists:.3e}");
        if i % 10 == 0 {
            // The recovered surface replays the observed lengths.
            let replay = spectrum_deviation(&y, &spectrum).unwrap();
            assert!(replay <= 1e-6, "({g},{n}) replay residual {replay:.3e}");
        }
    }
}

#[test]
fn missing_entries_are_reported_by_name() {
    let mut rng = rng(0x31a2);
    let x = sample_surface(&mut rng, 2, 1);
    let full = forward_spectrum(&x).unwrap();

    let strip = |keep: &dyn Fn(&conelength::error::CurveId) -> bool| {
        let mut out = LengthSpectrum::default();
        for (id, l) in full.iter() {
            if keep(id) {
                out.insert(id.clone(), l).unwrap();
            }
        }
        out
    };

    // Dropping an internal curve is reported by its exact id.
    let no_gamma = strip(&|id| *id != gamma_id(0));
    match recover_surface(&x.decomposition, &no_gamma) {
        Err(Error::MissingCurves(ids)) => {
            assert!(ids.contains(&gamma_id(0)), "gamma[0] not named in {ids:?}")
        }
        other => panic!("expected a missing-curve report, got {other:?}"),
    }

    // Dropping a whole twist family is reported with the ids of the
    // window the solver wanted to use.
    let fam = family_name(1);
    let no_family = strip(&|id| id.family != fam);
    match recover_surface(&x.decomposition, &no_family) {
        Err(Error::MissingCurves(ids)) => {
            assert!(
                ids.iter().any(|id| id.family == fam),
                "family {fam} not named in {ids:?}"
            );
        }
        other => panic!("expected a missing-curve report, got {other:?}"),
    }
}

#[test]
fn published_spectra_respect_the_curve_budget() {
    let mut rng = rng(0x31a3);
    for (g, n) in surface_types(3, 4) {
        let x = sample_surface(&mut rng, g, n);
        let spectrum = forward_spectrum(&x).unwrap();
        let budget = curve_budget(g, n).unwrap();
        assert!(
            spectrum.len() <= budget,
            "({g},{n}) publishes {} of at most {budget} curves",
            spectrum.len()
        );
    }
}

#[test]
fn the_model_reproduces_its_own_spectrum_exactly() {
    let mut rng = rng(0x31a4);
    for (g, n) in surface_types(3, 4) {
        let x = sample_surface(&mut rng, g, n);
        let spectrum = forward_spectrum(&x).unwrap();
        assert_eq!(spectrum_deviation(&x, &spectrum).unwrap(), 0.0);
    }
}
