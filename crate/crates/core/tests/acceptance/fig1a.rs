//! Measured phase-error curves of two phones (56 subcarriers, -28..28
//! without DC) used as fixed inputs. Expected values were computed
//! independently (numpy least squares) and are frozen here.

use rfveil::fingerprint::{
    classify, extract_from_phases, mae, Classification, DeviceId, Fingerprint, Metric,
};
use rfveil::phy::num_complex::Complex;
use rfveil::phy::{CsiVector, SubcarrierLayout};

fn load(name: &str) -> Fingerprint {
    let path = format!("{}/tests/fixtures/{name}.csv", env!("CARGO_MANIFEST_DIR"));
    Fingerprint::read_csv(std::fs::File::open(path).unwrap()).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn fixtures_have_one_value_per_subcarrier() {
    let layout = SubcarrierLayout::ieee80211ac();
    for name in ["phone1", "phone2"] {
        let fp = load(name);
        assert_eq!(fp.len(), layout.count());
        let mut raw = Vec::new();
        fp.write_csv(&layout, &mut raw).unwrap();
        let text = String::from_utf8(raw).unwrap();
        let original = std::fs::read_to_string(format!(
            "{}/tests/fixtures/{name}.csv",
            env!("CARGO_MANIFEST_DIR")
        ))
        .unwrap();
        assert_eq!(text, original, "csv round trip of {name}");
    }
    let p1 = load("phone1");
    let mean = p1.values().iter().sum::<f64>() / 56.0;
    assert!(close(mean, -7.889957570719315, 1e-12));
}

#[test]
fn extraction_removes_slope_and_mean() {
    let layout = SubcarrierLayout::ieee80211ac();
    let expected = [
        ("phone1", [5.652832193289494, -4.044840576473457, 19.824755717912083, -53.28455077549655]),
        ("phone2", [11.076122103336406, 0.9109489399804467, 22.56397967693545, -60.475090051583535]),
    ];
    for (name, values) in expected {
        let raw = load(name);
        let phases: Vec<f64> = raw.values().iter().map(|d| d.to_radians()).collect();
        let fp = extract_from_phases(&phases, &layout);
        for (pos, want) in [0usize, 27, 28, 55].into_iter().zip(values) {
            assert!(close(fp.values()[pos], want, 1e-9), "{name}[{pos}] = {}", fp.values()[pos]);
        }
        let mean = fp.values().iter().sum::<f64>() / 56.0;
        assert!(mean.abs() < 1e-9);
    }
}

#[test]
fn extraction_through_csi_matches_phase_path() {
    let layout = SubcarrierLayout::ieee80211ac();
    let raw = load("phone1");
    let csi = CsiVector::new(
        raw.values()
            .iter()
            .map(|d| Complex::from_polar(0.7, d.to_radians()))
            .collect(),
    )
    .unwrap();
    let via_csi = rfveil::fingerprint::extract_fingerprint(&csi, &layout).unwrap();
    let phases: Vec<f64> = raw.values().iter().map(|d| d.to_radians()).collect();
    let direct = extract_from_phases(&phases, &layout);
    for (a, b) in via_csi.values().iter().zip(direct.values()) {
        assert!(close(*a, *b, 1e-9));
    }
}

#[test]
fn the_two_phones_are_told_apart() {
    let layout = SubcarrierLayout::ieee80211ac();
    let (p1, p2) = (load("phone1"), load("phone2"));
    assert!(close(mae(&p1, &p2).unwrap(), 6.4845946382929105, 1e-9));
    let extract = |fp: &Fingerprint| {
        let phases: Vec<f64> = fp.values().iter().map(|d| d.to_radians()).collect();
        extract_from_phases(&phases, &layout)
    };
    let (e1, e2) = (extract(&p1), extract(&p2));
    let d = mae(&e1, &e2).unwrap();
    assert!(close(d, 4.792514121625367, 1e-9), "{d}");
    let refs = vec![(DeviceId(1), e1.clone()), (DeviceId(2), e2.clone())];
    assert_eq!(classify(&e1, &refs, 4.5, Metric::Mae).unwrap(), Classification::Match(DeviceId(1)));
    assert_eq!(classify(&e2, &refs, 4.5, Metric::Mae).unwrap(), Classification::Match(DeviceId(2)));
}
