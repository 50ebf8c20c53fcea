//! End-to-end flows through the command line surface: every subcommand, the
//! exit-code contract, and byte-exact reproducibility of output files.

use std::fs;
use std::path::{Path, PathBuf};

use fnc::cli::run_from;
use fnc::container::{Container, Method};
use fnc::ifs::{chaos_game, hamming_distance, IfsSystem};
use fnc::image::Viewport;
use fnc::pbm::{parse_pbm, write_pbm, PbmMode};

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["fnc"];
    argv.extend_from_slice(args);
    run_from(argv)
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fnc-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn sierpinski_pbm(path: &Path, size: usize) {
    let img = chaos_game(&IfsSystem::sierpinski(), 60_000, 20, &Viewport::UNIT, size, size, 1)
        .unwrap();
    fs::write(path, write_pbm(&img, PbmMode::Packed)).unwrap();
}

#[test]
fn missing_input_file_exits_2() {
    let dir = workdir("missing");
    let out = dir.join("out.fnc");
    let code = run(&[
        "ifs",
        "encode",
        "--input",
        dir.join("nope.pbm").to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_1() {
    // unknown flag
    assert_eq!(run(&["ifs", "render", "--no-such-flag"]), 1);
    // missing --output on a writing command
    let dir = workdir("usage");
    let input = dir.join("t.pbm");
    sierpinski_pbm(&input, 16);
    assert_eq!(run(&["ifs", "render", "--builtin", "sierpinski"]), 1);
    // bad size spec
    assert_eq!(
        run(&[
            "ifs",
            "render",
            "--builtin",
            "sierpinski",
            "--size",
            "12by12",
            "--output",
            dir.join("x.pbm").to_str().unwrap(),
        ]),
        1
    );
}

#[test]
fn help_exits_0() {
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["ifs", "--help"]), 0);
}

#[test]
fn render_builtin_and_decode_roundtrip() {
    let dir = workdir("render");
    let rendered = dir.join("sier.pbm");
    assert_eq!(
        run(&[
            "ifs",
            "render",
            "--builtin",
            "sierpinski",
            "--size",
            "64x64",
            "--iterations",
            "60000",
            "--seed",
            "3",
            "--output",
            rendered.to_str().unwrap(),
        ]),
        0
    );
    let img = parse_pbm(&fs::read(&rendered).unwrap()).unwrap();
    assert_eq!((img.width(), img.height()), (64, 64));
    assert!(img.ones() > 200);
}

#[test]
fn ifs_encode_decode_pipeline() {
    let dir = workdir("ifs");
    let input = dir.join("target.pbm");
    sierpinski_pbm(&input, 32);
    let model = dir.join("target.ifs.fnc");
    let code = run(&[
        "ifs",
        "encode",
        "--input",
        input.to_str().unwrap(),
        "--maps",
        "3",
        "--sweeps",
        "120",
        "--seed",
        "5",
        "--output",
        model.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let container = Container::from_bytes(&fs::read(&model).unwrap()).unwrap();
    assert_eq!(container.method, Method::Ifs);
    assert_eq!(container.width, 32);

    let recon = dir.join("recon.pbm");
    assert_eq!(
        run(&[
            "ifs",
            "decode",
            "--input",
            model.to_str().unwrap(),
            "--iterations",
            "50000",
            "--output",
            recon.to_str().unwrap(),
        ]),
        0
    );
    let img = parse_pbm(&fs::read(&recon).unwrap()).unwrap();
    assert_eq!((img.width(), img.height()), (32, 32));
}

#[test]
fn ae_pipeline_train_encode_decode_report() {
    let dir = workdir("ae");
    let input = dir.join("img.pbm");
    sierpinski_pbm(&input, 32);
    let model = dir.join("ae-model.fnc");
    assert_eq!(
        run(&[
            "ae",
            "train",
            "--input",
            input.to_str().unwrap(),
            "--block-side",
            "8",
            "--iters",
            "150",
            "--eta0",
            "0.1",
            "--seed",
            "2",
            "--output",
            model.to_str().unwrap(),
        ]),
        0
    );
    let encoded = dir.join("img.ae.fnc");
    assert_eq!(
        run(&[
            "ae",
            "encode",
            "--input",
            input.to_str().unwrap(),
            "--model",
            model.to_str().unwrap(),
            "--output",
            encoded.to_str().unwrap(),
        ]),
        0
    );
    let decoded = dir.join("img.ae.pbm");
    assert_eq!(
        run(&["ae", "decode", "--input", encoded.to_str().unwrap(), "--output", decoded.to_str().unwrap()]),
        0
    );
    let recon = parse_pbm(&fs::read(&decoded).unwrap()).unwrap();
    assert_eq!((recon.width(), recon.height()), (32, 32));

    let report = dir.join("ae-report.tsv");
    assert_eq!(
        run(&[
            "ae",
            "report",
            "--input",
            encoded.to_str().unwrap(),
            "--original",
            input.to_str().unwrap(),
            "--format",
            "records",
            "--output",
            report.to_str().unwrap(),
        ]),
        0
    );
    let body = fs::read_to_string(&report).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next().unwrap(), fnc::report::RunReport::record_header());
    let fields: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(fields[0], "ae");
    // byte counts reconcile with the on-disk container exactly
    assert_eq!(fields[2].parse::<u64>().unwrap(), fs::metadata(&encoded).unwrap().len());
    // ratio field reconciles with the byte columns to 1e-9
    let ratio: f64 = fields[3].parse().unwrap();
    let expect = fields[1].parse::<f64>().unwrap() / fields[2].parse::<f64>().unwrap();
    assert!((ratio - expect).abs() < 1e-9);
}

#[test]
fn vq_pipeline_train_encode_decode_report() {
    let dir = workdir("vq");
    let input = dir.join("img.pbm");
    sierpinski_pbm(&input, 32);
    let model = dir.join("vq-model.fnc");
    assert_eq!(
        run(&[
            "vq",
            "train",
            "--input",
            input.to_str().unwrap(),
            "--block-side",
            "4",
            "--m",
            "8",
            "--steps",
            "10000",
            "--seed",
            "6",
            "--output",
            model.to_str().unwrap(),
        ]),
        0
    );
    let encoded = dir.join("img.vq.fnc");
    assert_eq!(
        run(&[
            "vq",
            "encode",
            "--input",
            input.to_str().unwrap(),
            "--model",
            model.to_str().unwrap(),
            "--seed",
            "6",
            "--output",
            encoded.to_str().unwrap(),
        ]),
        0
    );
    let decoded = dir.join("img.vq.pbm");
    assert_eq!(
        run(&["vq", "decode", "--input", encoded.to_str().unwrap(), "--output", decoded.to_str().unwrap()]),
        0
    );
    let recon = parse_pbm(&fs::read(&decoded).unwrap()).unwrap();
    let original = parse_pbm(&fs::read(&input).unwrap()).unwrap();
    // a fair codebook keeps the reconstruction in the same ballpark
    assert!(hamming_distance(&recon, &original).unwrap() < 0.5);

    let report = dir.join("vq-report.txt");
    assert_eq!(
        run(&[
            "vq",
            "report",
            "--input",
            encoded.to_str().unwrap(),
            "--original",
            input.to_str().unwrap(),
            "--output",
            report.to_str().unwrap(),
        ]),
        0
    );
    assert!(fs::read_to_string(&report).unwrap().contains("vq"));
}

#[test]
fn ts_fit_predict_pipeline() {
    let dir = workdir("ts");
    let csv = dir.join("orbit.csv");
    fnc::cli::write_logistic_csv(&csv, 3000, 0.35).unwrap();
    let model = dir.join("orbit-model.fnc");
    assert_eq!(
        run(&[
            "ts",
            "fit",
            "--input",
            csv.to_str().unwrap(),
            "--min-count",
            "32",
            "--mode",
            "linear",
            "--iters",
            "60",
            "--output",
            model.to_str().unwrap(),
        ]),
        0
    );
    let container = Container::from_bytes(&fs::read(&model).unwrap()).unwrap();
    assert_eq!(container.method, Method::Net);
    let (pw_model, rescale, reported_err) =
        fnc::container::decode_series_payload(&container.payload).unwrap();

    let preds = dir.join("preds.csv");
    assert_eq!(
        run(&[
            "ts",
            "predict",
            "--model",
            model.to_str().unwrap(),
            "--input",
            csv.to_str().unwrap(),
            "--output",
            preds.to_str().unwrap(),
        ]),
        0
    );
    let pred_vals: Vec<f64> = fs::read_to_string(&preds)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    let orbit: Vec<f64> = fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .map(|l| l.parse::<f64>().unwrap())
        .collect();
    assert_eq!(pred_vals.len(), orbit.len());
    // predictions recompute the model's own training error
    let sse: f64 = (0..orbit.len() - 1)
        .map(|i| {
            let pu = rescale.to_unit(pred_vals[i]);
            let tu = rescale.to_unit(orbit[i + 1]);
            (tu - pu) * (tu - pu)
        })
        .sum();
    assert!(
        sse <= reported_err * (1.0 + 1e-6) + 1e-9,
        "prediction error {sse} exceeds reported {reported_err}"
    );
    let _ = pw_model;
}

#[test]
fn bench_compare_records_and_ifs_wins_bytes() {
    let dir = workdir("bench");
    let input = dir.join("sier.pbm");
    sierpinski_pbm(&input, 64);
    let report = dir.join("bench.tsv");
    assert_eq!(
        run(&[
            "bench",
            "compare",
            "--input",
            input.to_str().unwrap(),
            "--sweeps",
            "60",
            "--ae-block-side",
            "8",
            "--ae-iters",
            "40",
            "--vq-steps",
            "4000",
            "--seed",
            "9",
            "--format",
            "records",
            "--output",
            report.to_str().unwrap(),
        ]),
        0
    );
    let body = fs::read_to_string(&report).unwrap();
    let rows: Vec<Vec<&str>> = body
        .lines()
        .skip(1)
        .map(|l| l.split('\t').collect())
        .collect();
    assert_eq!(rows.len(), 3);
    let by_method = |m: &str| rows.iter().find(|r| r[0] == m).unwrap()[2].parse::<u64>().unwrap();
    let (ifs_b, ae_b, vq_b) = (by_method("ifs"), by_method("ae"), by_method("vq"));
    assert!(ifs_b < ae_b && ifs_b < vq_b, "ifs {ifs_b} vs ae {ae_b} vs vq {vq_b}");
}

#[test]
fn pipelines_are_bit_reproducible() {
    let dir = workdir("repro");
    let input = dir.join("img.pbm");
    sierpinski_pbm(&input, 32);
    let run_all = |tag: &str| -> Vec<Vec<u8>> {
        let model = dir.join(format!("m-{tag}.fnc"));
        let recon = dir.join(format!("r-{tag}.pbm"));
        assert_eq!(
            run(&[
                "ifs", "encode", "--input", input.to_str().unwrap(), "--sweeps", "40",
                "--seed", "11", "--output", model.to_str().unwrap(),
            ]),
            0
        );
        assert_eq!(
            run(&[
                "ifs", "decode", "--input", model.to_str().unwrap(), "--iterations", "20000",
                "--seed", "11", "--output", recon.to_str().unwrap(),
            ]),
            0
        );
        vec![fs::read(&model).unwrap(), fs::read(&recon).unwrap()]
    };
    assert_eq!(run_all("a"), run_all("b"));
}
