//! Scenario catalog. Each entry maps a parameter schema onto library calls
//! and returns the artifacts to write.

use std::f64::consts::PI;

use num_complex::Complex;
use serde_json::{json, Value};
use squeezed::devices::{
    cavity_figures, opa_variances, pump_field_amplitude, single_pass_r, CavityConfig, CrystalConfig, PumpConfig,
};
use squeezed::fock::wigner_fock;
use squeezed::gaussian::squeezing_db;
use squeezed::homodyne::{
    photocurrent_with_drift, principal_axis_ratio, reconstruct_wigner, sample_quadratures, spectrum, square_grid,
    uniform_phases, DriftConfig, DriftModel, QuadratureSource,
};
use squeezed::protocols::{
    engineer_kitten_superposition, gw_phase_readout, make_heralded_photon, make_kitten, readout_improvement_db,
    teleport_gaussian, Heralded,
};
use squeezed::{Error, FockState, GaussianState, Result};

use crate::config::{Default as D, Kind as K, ParamSpec as P, Params};
use crate::output::{Artifact, Cell, Table};

pub struct Scenario {
    pub name: &'static str,
    pub summary: &'static str,
    pub schema: &'static [P],
    pub run: fn(&Params, u64) -> Result<Vec<Artifact>>,
}

pub const CATALOG: &[Scenario] = &[
    Scenario {
        name: "loss-sweep",
        summary: "squeezed-vacuum quadrature variances after a loss channel of transmission T",
        schema: &[
            P::new("r", K::Number, D::Required, "squeezing parameter"),
            P::new("t_min", K::Number, D::Number(0.1), "lowest transmission"),
            P::new("t_max", K::Number, D::Number(1.0), "highest transmission"),
            P::new("steps", K::Count, D::Number(10.0), "number of transmissions"),
        ],
        run: loss_sweep,
    },
    Scenario {
        name: "opa-spectrum",
        summary: "below-threshold OPA output variances against sideband frequency",
        schema: &[
            P::new("gamma", K::Number, D::Number(6e6), "cavity half-linewidth, Hz"),
            P::new("eta", K::Number, D::Number(0.75), "escape times detection efficiency"),
            P::new("pump_ratio", K::Number, D::Number(1.0), "P/P_th in [0, 1]"),
            P::new("f_max", K::Number, D::Number(3e7), "highest sideband frequency, Hz"),
            P::new("points", K::Count, D::Number(301.0), "frequencies from 0 to f_max"),
        ],
        run: opa_spectrum,
    },
    Scenario {
        name: "ppktp-estimate",
        summary: "single-pass squeezing of a pumped nonlinear crystal",
        schema: &[
            P::new("chi_eff", K::Number, D::Number(14e-12), "effective nonlinearity, m/V"),
            P::new("refractive_index", K::Number, D::Number(1.8), "crystal index"),
            P::new("length", K::Number, D::Number(5e-3), "crystal length, m"),
            P::new("signal_wavelength", K::Number, D::Number(780e-9), "m"),
            P::new("power", K::Number, D::Number(0.1), "pump power, W"),
            P::new("waist_radius", K::Number, D::Number(50e-6), "pump waist, m"),
        ],
        run: ppktp_estimate,
    },
    Scenario {
        name: "cavity-figures",
        summary: "free spectral range, finesse, linewidth and escape efficiency",
        schema: &[
            P::new("roundtrip_length", K::Number, D::Number(0.3), "m"),
            P::new("roundtrip_loss", K::Number, D::Number(0.005), "intracavity loss excluding the coupler"),
            P::new("output_coupler_t", K::Number, D::Number(0.015), "output coupler transmission"),
        ],
        run: cavity,
    },
    Scenario {
        name: "tomography-demo",
        summary: "simulated homodyne data and its filtered-backprojection Wigner estimate",
        schema: &[
            P::new("state", K::Choice(&["vacuum", "squeezed", "coherent", "photon"]), D::Text("squeezed"), "input state"),
            P::new("r", K::Number, D::Number(0.69), "squeezing parameter for `squeezed`"),
            P::new("alpha", K::Number, D::Number(1.0), "real amplitude for `coherent`"),
            P::new("phases", K::Count, D::Number(24.0), "evenly spaced phases in [0, pi)"),
            P::new("samples", K::Count, D::Number(2000.0), "samples per phase"),
            P::new("grid_points", K::Count, D::Number(41.0), "grid points per axis"),
            P::new("grid_half_width", K::Number, D::Number(4.0), "grid spans [-w, w] in x and p"),
            P::new("filter_cutoff", K::Number, D::Optional, "ramp-filter cutoff; data-driven when absent"),
        ],
        run: tomography_demo,
    },
    Scenario {
        name: "spectrum-drift-demo",
        summary: "Welch spectrum of a photocurrent with slow drift",
        schema: &[
            P::new("quad_variance", K::Number, D::Number(0.5), "white quadrature variance"),
            P::new("drift_amplitude", K::Number, D::Number(1.5), "drift rms in shot-noise sample units"),
            P::new("drift_timescale", K::Number, D::Number(2e-6), "s"),
            P::new("drift_model", K::Choice(&["cascaded", "ou"]), D::Text("cascaded"), "drift filter"),
            P::new("fs", K::Number, D::Number(20e6), "sample rate, Hz"),
            P::new("segment_length", K::Count, D::Number(512.0), "samples per Welch segment"),
            P::new("segments", K::Count, D::Number(4096.0), "Welch segments"),
        ],
        run: spectrum_drift_demo,
    },
    Scenario {
        name: "teleport-sweep",
        summary: "coherent-state teleportation fidelity and added noise against resource squeezing",
        schema: &[
            P::new("r_max", K::Number, D::Required, "largest resource squeezing"),
            P::new("steps", K::Count, D::Number(41.0), "points from 0 to r_max"),
            P::new("gain", K::Number, D::Number(1.0), "classical feed-forward gain"),
            P::new("alpha", K::Number, D::Number(0.0), "real amplitude of the coherent input"),
        ],
        run: teleport_sweep,
    },
    Scenario {
        name: "gw-snr-sweep",
        summary: "interferometer readout SNR with a squeezed dark port",
        schema: &[
            P::new("phi", K::Number, D::Number(1e-5), "differential phase, rad"),
            P::new("alpha", K::Number, D::Number(1e4), "carrier amplitude"),
            P::new("r_max", K::Number, D::Number(1.5), "largest dark-port squeezing"),
            P::new("r_steps", K::Count, D::Number(16.0), "points from 0 to r_max"),
            P::new("eta_min", K::Number, D::Number(0.5), "lowest detection efficiency"),
            P::new("eta_max", K::Number, D::Number(1.0), "highest detection efficiency"),
            P::new("eta_steps", K::Count, D::Number(6.0), "efficiencies from eta_min to eta_max"),
        ],
        run: gw_snr_sweep,
    },
    Scenario {
        name: "herald-photon",
        summary: "single photon heralded by a click on one arm of a two-mode squeezed vacuum",
        schema: &[
            P::new("r", K::Number, D::Number(0.05), "two-mode squeezing"),
            P::new("cutoff", K::Count, D::Number(20.0), "Fock cutoff"),
        ],
        run: herald_photon,
    },
    Scenario {
        name: "kitten",
        summary: "photon-subtracted squeezed vacuum compared with an odd cat",
        schema: &[
            P::new("r", K::Number, D::Number(0.2), "squeezing parameter"),
            P::new("rho", K::Number, D::Number(0.05), "tap reflectivity"),
            P::new("cutoff", K::Count, D::Number(20.0), "Fock cutoff"),
        ],
        run: kitten,
    },
    Scenario {
        name: "kitten-superposition",
        summary: "even/odd kitten superposition from a tap mixed with a coherent ancilla",
        schema: &[
            P::new("r", K::Number, D::Number(0.2), "squeezing parameter"),
            P::new("ancilla_re", K::Number, D::Number(0.05), "ancilla amplitude, real part"),
            P::new("ancilla_im", K::Number, D::Number(0.0), "ancilla amplitude, imaginary part"),
            P::new("rho_tap", K::Number, D::Number(0.1), "tap reflectivity"),
            P::new("rho_mix", K::Number, D::Number(0.5), "ancilla mixing reflectivity"),
            P::new("cutoff", K::Count, D::Number(16.0), "Fock cutoff"),
        ],
        run: kitten_superposition,
    },
];

pub fn find(name: &str) -> Option<&'static Scenario> {
    CATALOG.iter().find(|s| s.name == name)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive; `[lo]` when `n == 1`.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                let s = k as f64 / (n - 1) as f64;
                lo * (1.0 - s) + hi * s
            })
            .collect(),
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<()> {
    if v < min {
        return Err(Error::InvalidParameter(format!("{name} must be at least {min}, got {v}")));
    }
    Ok(())
}

fn summary_table(rows: &[(&str, f64, &str)]) -> Table {
    let mut t = Table::new(&["quantity", "value", "unit"]);
    for (q, v, u) in rows {
        t.push(vec![Cell::from(*q), Cell::from(*v), Cell::from(*u)]);
    }
    t
}

fn loss_sweep(p: &Params, _seed: u64) -> Result<Vec<Artifact>> {
    let r = p.num("r");
    at_least("steps", p.count("steps"), 1)?;
    let sq = GaussianState::vacuum(1).squeeze(0, r, 0.0)?;
    let mut t = Table::new(&["t", "var_x", "var_p", "squeezing_db"]);
    for tr in linspace(p.num("t_min"), p.num("t_max"), p.count("steps")) {
        let out = sq.loss_channel(0, tr)?;
        let vx = out.quadrature_variance(0, 0.0)?;
        t.push_nums(&[tr, vx, out.quadrature_variance(0, PI / 2.0)?, squeezing_db(vx)?]);
    }
    Ok(vec![Artifact::table("loss_sweep", t)])
}

fn opa_spectrum(p: &Params, _seed: u64) -> Result<Vec<Artifact>> {
    let (gamma, eta, x) = (p.num("gamma"), p.num("eta"), p.num("pump_ratio"));
    if !(gamma > 0.0) || !(0.0..=1.0).contains(&eta) || !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter("need gamma > 0, eta and pump_ratio in [0, 1]".into()));
    }
    at_least("points", p.count("points"), 1)?;
    // at threshold the anti-squeezed variance diverges at zero frequency
    let db = |v: f64| 10.0 * (2.0 * v).log10();
    let mut t = Table::new(&["freq_hz", "v_plus", "v_minus", "v_plus_db", "v_minus_db"]);
    for nu in linspace(0.0, p.num("f_max"), p.count("points")) {
        let (vp, vm) = opa_variances(gamma, eta, x, nu);
        t.push_nums(&[nu, vp, vm, db(vp), db(vm)]);
    }
    Ok(vec![Artifact::table("opa_spectrum", t)])
}

fn ppktp_estimate(p: &Params, _seed: u64) -> Result<Vec<Artifact>> {
    let crystal = CrystalConfig {
        chi_eff: p.num("chi_eff"),
        refractive_index: p.num("refractive_index"),
        length: p.num("length"),
        signal_wavelength: p.num("signal_wavelength"),
    };
    let pump = PumpConfig { power: p.num("power"), waist_radius: p.num("waist_radius") };
    let field = pump_field_amplitude(&pump, &crystal)?;
    let r = single_pass_r(&crystal, &pump)?;
    let t = summary_table(&[
        ("pump_intensity", field.intensity, "W/m^2"),
        ("pump_field_amplitude", field.amplitude, "V/m"),
        ("r", r, ""),
        ("squeezing_db", squeezing_db((-2.0 * r).exp() / 2.0)?, "dB"),
    ]);
    Ok(vec![Artifact::table("ppktp_estimate", t)])
}

fn cavity(p: &Params, _seed: u64) -> Result<Vec<Artifact>> {
    let f = cavity_figures(&CavityConfig {
        roundtrip_length: p.num("roundtrip_length"),
        roundtrip_loss_excl_coupler: p.num("roundtrip_loss"),
        output_coupler_t: p.num("output_coupler_t"),
    })?;
    let t = summary_table(&[
        ("fsr", f.fsr, "Hz"),
        ("finesse", f.finesse, ""),
        ("gamma", f.gamma, "Hz"),
        ("fwhm", f.fwhm(), "Hz"),
        ("escape_efficiency", f.escape_efficiency, ""),
    ]);
    Ok(vec![Artifact::table("cavity_figures", t)])
}

fn tomography_demo(p: &Params, seed: u64) -> Result<Vec<Artifact>> {
    let (phases, n, points) = (p.count("phases"), p.count("samples"), p.count("grid_points"));
    at_least("samples", n, 1)?;
    at_least("grid_points", points, 2)?;
    let grid = square_grid(p.num("grid_half_width"), points);
    let thetas = uniform_phases(phases);

    let (data, exact) = match p.text("state") {
        "photon" => {
            let one = FockState::basis(8, &[1])?;
            (sample_quadratures(QuadratureSource::from(&one), 0, &thetas, n, seed)?, wigner_fock(&one, &grid, 0)?)
        }
        name => {
            let g = match name {
                "vacuum" => GaussianState::vacuum(1),
                "coherent" => GaussianState::coherent(Complex::new(p.num("alpha"), 0.0)),
                _ => GaussianState::vacuum(1).squeeze(0, p.num("r"), 0.0)?,
            };
            let exact = grid.iter().map(|q| g.wigner_at(q)).collect::<Result<Vec<_>>>()?;
            (sample_quadratures(&g, 0, &thetas, n, seed)?, exact)
        }
    };
    let est = reconstruct_wigner(&data, &grid, p.opt_num("filter_cutoff"))?;

    let mut samples = Table::new(&["theta", "x"]);
    for (th, x) in &data.samples {
        samples.push_nums(&[*th, *x]);
    }
    let mut wigner = Table::new(&["x", "p", "w", "w_exact"]);
    for ((q, w), e) in grid.iter().zip(&est.values).zip(&exact) {
        wigner.push_nums(&[q[0], q[1], *w, *e]);
    }
    let peak = exact.iter().fold(0.0f64, |a, w| a.max(w.abs()));
    let rms = (est.values.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / grid.len() as f64).sqrt();
    let mut rows = vec![
        ("filter_cutoff", est.filter_cutoff, ""),
        ("phases", est.n_phases as f64, ""),
        ("rms_error_over_peak", rms / peak, ""),
    ];
    if p.text("state") == "squeezed" {
        // the half-maximum region needs a finer grid than the output table
        let fine = square_grid(p.num("grid_half_width"), 81);
        let fine_est = reconstruct_wigner(&data, &fine, Some(est.filter_cutoff))?;
        rows.push(("principal_axis_ratio", principal_axis_ratio(&fine, &fine_est.values)?, ""));
    }
    Ok(vec![
        Artifact::table("samples", samples),
        Artifact::table("wigner", wigner),
        Artifact::table("summary", summary_table(&rows)),
    ])
}

fn spectrum_drift_demo(p: &Params, seed: u64) -> Result<Vec<Artifact>> {
    let fs = p.num("fs");
    let (seg, segs) = (p.count("segment_length"), p.count("segments"));
    let sql = 0.5;
    let mut cfg =
        DriftConfig::new(p.num("quad_variance"), p.num("drift_amplitude"), p.num("drift_timescale"), fs, (seg * segs) as f64 / fs, seed);
    if p.text("drift_model") == "ou" {
        cfg.model = DriftModel::OrnsteinUhlenbeck;
    }
    let trace = photocurrent_with_drift(&cfg)?;
    let sp = spectrum(&trace, segs)?;
    let mut t = Table::new(&["freq_hz", "power", "power_db"]);
    for (f, pw) in sp.freqs.iter().zip(&sp.power) {
        t.push_nums(&[*f, *pw, 10.0 * (pw / sql).log10()]);
    }
    let above = sp.band_mean(1e6, fs / 2.0).map(|v| 10.0 * (v / sql).log10()).unwrap_or(f64::NAN);
    let summary = summary_table(&[
        ("total_variance_db", trace.variance_db(), "dB"),
        ("mean_power_above_1mhz_db", above, "dB"),
        ("segments", sp.n_segments as f64, ""),
    ]);
    Ok(vec![Artifact::table("spectrum", t), Artifact::table("summary", summary)])
}

fn teleport_sweep(p: &Params, _seed: u64) -> Result<Vec<Artifact>> {
    at_least("steps", p.count("steps"), 1)?;
    let input = GaussianState::coherent(Complex::new(p.num("alpha"), 0.0));
    let gain = p.num("gain");
    let mut t = Table::new(&["r", "fidelity", "added_noise"]);
    for r in linspace(0.0, p.num("r_max"), p.count("steps")) {
        let out = teleport_gaussian(&input, r, gain)?;
        t.push_nums(&[r, out.coherent_fidelity, out.added_noise_per_quadrature]);
    }
    Ok(vec![Artifact::table("teleport_sweep", t)])
}

fn gw_snr_sweep(p: &Params, _seed: u64) -> Result<Vec<Artifact>> {
    at_least("r_steps", p.count("r_steps"), 1)?;
    at_least("eta_steps", p.count("eta_steps"), 1)?;
    let (phi, alpha) = (p.num("phi"), p.num("alpha"));
    let mut t = Table::new(&["r", "eta", "snr", "phi_min", "improvement_db"]);
    for eta in linspace(p.num("eta_min"), p.num("eta_max"), p.count("eta_steps")) {
        for r in linspace(0.0, p.num("r_max"), p.count("r_steps")) {
            let est = gw_phase_readout(phi, alpha, r, eta)?;
            t.push_nums(&[r, eta, est.snr, est.phi_min_detectable, readout_improvement_db(r, eta)?]);
        }
    }
    Ok(vec![Artifact::table("gw_snr_sweep", t)])
}

fn state_json(state: &FockState) -> Result<Value> {
    Ok(serde_json::from_str(&state.to_json()?)?)
}

fn heralded_record(h: &Heralded) -> Value {
    let rho = &h.density;
    json!({
        "herald_probability": h.probability,
        "purity": rho.purity(),
        "photon_distribution": rho.photon_distribution(0).unwrap_or_default(),
    })
}

fn herald_photon(p: &Params, _seed: u64) -> Result<Vec<Artifact>> {
    let (r, cutoff) = (p.num("r"), p.count("cutoff"));
    let h = make_heralded_photon(r, cutoff)?;
    let fidelity = h.density.fidelity_with(&FockState::basis(cutoff, &[1])?)?;
    let provenance = json!({
        "pipeline": "two-mode squeezed vacuum, click detector on mode 1",
        "parameters": {"r": r, "cutoff": cutoff},
        "results": {"fidelity_single_photon": fidelity, "heralded": heralded_record(&h)},
    });
    Ok(vec![Artifact::json("state", state_json(&h.state)?), Artifact::json("provenance", provenance)])
}

fn kitten(p: &Params, _seed: u64) -> Result<Vec<Artifact>> {
    let (r, rho, cutoff) = (p.num("r"), p.num("rho"), p.count("cutoff"));
    let k = make_kitten(r, cutoff, rho)?;
    let provenance = json!({
        "pipeline": "squeezed vacuum, tap beam splitter, click detector on the tap",
        "parameters": {"r": r, "rho": rho, "cutoff": cutoff},
        "results": {"fidelity_odd_cat": k.fidelity, "heralded": heralded_record(&k.heralded)},
    });
    Ok(vec![Artifact::json("state", state_json(&k.heralded.state)?), Artifact::json("provenance", provenance)])
}

fn kitten_superposition(p: &Params, _seed: u64) -> Result<Vec<Artifact>> {
    let (r, cutoff) = (p.num("r"), p.count("cutoff"));
    let ancilla = Complex::new(p.num("ancilla_re"), p.num("ancilla_im"));
    let (rho_tap, rho_mix) = (p.num("rho_tap"), p.num("rho_mix"));
    let k = engineer_kitten_superposition(r, ancilla, rho_tap, rho_mix, cutoff)?;
    let provenance = json!({
        "pipeline": "squeezed vacuum, tap beam splitter, tap mixed with coherent ancilla, click on the tap output",
        "parameters": {
            "r": r, "ancilla_re": ancilla.re, "ancilla_im": ancilla.im,
            "rho_tap": rho_tap, "rho_mix": rho_mix, "cutoff": cutoff,
        },
        "results": {
            "even_overlap": [k.even_overlap.re, k.even_overlap.im],
            "odd_overlap": [k.odd_overlap.re, k.odd_overlap.im],
            "heralded": heralded_record(&k.heralded),
        },
    });
    Ok(vec![Artifact::json("state", state_json(&k.heralded.state)?), Artifact::json("provenance", provenance)])
}
