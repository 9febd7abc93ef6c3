// Copyright 2026 Polywave Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: train / eval / gradcheck / equivalent / complexity /
// denoise / gen-data. Every artifact-writing run drops a manifest.json that
// echoes the fully resolved configuration, so a run is reproducible from its
// output directory alone.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "polywave/audio.hpp"
#include "polywave/complexity.hpp"
#include "polywave/datagen.hpp"
#include "polywave/dataset_io.hpp"
#include "polywave/equivalence.hpp"
#include "polywave/errors.hpp"
#include "polywave/network.hpp"
#include "polywave/pipeline.hpp"
#include "polywave/threading.hpp"
#include "polywave/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polywave;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGradcheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitTopologyError = 3;
constexpr int kExitNumericError = 4;
constexpr int kExitIoError = 5;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

void write_manifest(const fs::path& out_dir, const json& config) {
    fs::create_directories(out_dir);
    write_text(out_dir / "manifest.json", config.dump(2) + "\n");
}

Mat random_probe(const NetworkSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    Mat m(spec.in_channels, spec.in_samples);
    for (double& v : m.values()) v = rng.uniform(-1.0, 1.0);
    return m;
}

struct TrainArgs {
    std::string topology;
    std::string data;
    std::string test_data;
    std::string out = "out";
    std::uint64_t seed = 0;
    double lr = 1e-3;
    long epochs = 10;
    std::size_t batch = 32;
    std::size_t folds = 1;
    std::size_t window = 0;  // 0: rate / 10
    double overlap = 0.5;
    double clip = 0.0;
    std::string optimizer = "adam";
    double snr = 0.0;  // kept in the manifest for provenance
};

WindowSpec resolve_window(const TrainArgs& args, double rate, std::size_t model_len) {
    WindowSpec spec;
    spec.length = args.window != 0 ? args.window
                  : model_len != 0 ? model_len
                                   : static_cast<std::size_t>(rate / 10.0);
    spec.overlap = args.overlap;
    spec.fn = WindowFn::hamming;
    return spec;
}

std::vector<Sample> load_samples(const fs::path& dir, const NetworkSpec& net_spec,
                                 const WindowSpec& window, std::size_t class_count) {
    const bool unit_range = wants_unit_range(net_spec);
    if (is_denoise_dataset(dir)) {
        return denoise_windows(read_denoise_pairs(dir), window, unit_range);
    }
    return classification_windows(read_labeled_signals(dir), window, class_count, unit_range);
}

json train_manifest(const TrainArgs& args, const WindowSpec& window, const Loss& loss) {
    return json{{"subcommand", "train"},
                {"topology", args.topology},
                {"data", args.data},
                {"test_data", args.test_data},
                {"out", args.out},
                {"seed", args.seed},
                {"lr", args.lr},
                {"epochs", args.epochs},
                {"batch", args.batch},
                {"folds", args.folds},
                {"window", window.length},
                {"overlap", window.overlap},
                {"clip_norm", args.clip},
                {"optimizer", args.optimizer},
                {"loss", loss.name()},
                {"threads", default_thread_count()}};
}

int run_train(const TrainArgs& args) {
    const NetworkSpec spec = load_topology(args.topology);
    const auto shapes = shape_trace(spec);

    double rate = 16000.0;
    if (fs::exists(fs::path(args.data) / "rate.txt")) {
        std::ifstream in(fs::path(args.data) / "rate.txt");
        in >> rate;
    }
    const bool denoise_task = is_denoise_dataset(args.data);
    const WindowSpec window = resolve_window(args, rate, denoise_task ? spec.in_samples : 0);
    const std::size_t classes = shapes.back().samples;
    const Loss loss = denoise_task ? Loss{LossKind::mse}
                                   : Loss{LossKind::categorical_cross_entropy};

    std::vector<Sample> samples = load_samples(args.data, spec, window, classes);
    if (samples.empty()) throw std::invalid_argument("dataset produced no windows");
    if (samples.front().input.cols() != spec.in_samples) {
        throw TopologyError("window length does not match the topology input length");
    }

    TrainOptions opts;
    opts.lr = args.lr;
    opts.epochs = args.epochs;
    opts.batch = args.batch;
    opts.seed = args.seed;
    opts.clip_norm = args.clip;
    opts.threads = default_thread_count();
    opts.use_adam = args.optimizer != "sgd";

    const fs::path out_dir(args.out);
    write_manifest(out_dir, train_manifest(args, window, loss));

    std::vector<TraceRow> traces;
    std::ostringstream summary;
    summary.precision(6);

    if (args.folds >= 2) {
        const FoldPlan plan = make_fold_plan(samples.size(), args.folds, args.seed);
        const KfoldResult result = kfold_train(spec, samples, plan, loss, opts);
        traces = result.traces;
        summary << "folds " << args.folds << "\n"
                << "min " << result.summary.min_value << "\n"
                << "max " << result.summary.max_value << "\n"
                << "mean " << result.summary.mean_value << "\n";
    } else {
        // Deterministic holdout: every fifth sample validates.
        std::vector<Sample> train_set, val_set;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            (i % 5 == 4 ? val_set : train_set).push_back(samples[i]);
        }
        Network net(spec);
        net.init_params(args.seed);
        const EvalResult final_eval =
            train_network(net, train_set, val_set, loss, opts, &traces, 0);
        save_model(net, out_dir / "model.bin", args.seed, "trained by polywave train");
        summary << "val_loss " << final_eval.loss << "\n";
        if (final_eval.classification) {
            summary << "val_window_accuracy " << final_eval.window_accuracy << "\n"
                    << "val_signal_accuracy " << final_eval.signal_accuracy << "\n";
        } else {
            summary << "val_snr_db " << final_eval.snr_db << "\n";
        }
        if (!args.test_data.empty()) {
            const std::vector<Sample> test_set =
                load_samples(args.test_data, spec, window, classes);
            const EvalResult test_eval = evaluate(net, test_set, loss, opts.threads);
            if (test_eval.classification) {
                summary << "test_window_accuracy " << test_eval.window_accuracy << "\n"
                        << "test_signal_accuracy " << test_eval.signal_accuracy << "\n";
            } else {
                summary << "test_snr_db " << test_eval.snr_db << "\n";
            }
        }
    }
    write_text(out_dir / "traces.csv", trace_csv(traces));
    write_text(out_dir / "summary.txt", summary.str());
    std::cout << summary.str();
    return kExitOk;
}

int run_eval(const std::string& model_path, const std::string& data, std::size_t window_len,
             double overlap, const std::string& out) {
    const LoadedModel loaded = load_model(model_path);
    const NetworkSpec& spec = loaded.net.spec();
    WindowSpec window;
    window.length = window_len != 0 ? window_len : spec.in_samples;
    window.overlap = overlap;

    const std::size_t classes = shape_trace(spec).back().samples;
    const bool denoise_task = is_denoise_dataset(data);
    const Loss loss =
        denoise_task ? Loss{LossKind::mse} : Loss{LossKind::categorical_cross_entropy};
    const std::vector<Sample> samples = load_samples(data, spec, window, classes);
    const EvalResult result = evaluate(loaded.net, samples, loss, default_thread_count());

    std::ostringstream text;
    text.precision(6);
    text << "loss " << result.loss << "\n";
    if (result.classification) {
        text << "window_accuracy " << result.window_accuracy << "\n"
             << "signal_accuracy " << result.signal_accuracy << "\n";
    } else {
        text << "snr_db " << result.snr_db << "\n";
    }
    const fs::path out_dir(out);
    write_manifest(out_dir, json{{"subcommand", "eval"},
                                 {"model", model_path},
                                 {"data", data},
                                 {"window", window.length},
                                 {"overlap", window.overlap},
                                 {"out", out}});
    write_text(out_dir / "metrics.txt", text.str());
    std::cout << text.str();
    return kExitOk;
}

int run_gradcheck(const std::string& topology, std::uint64_t seed, double h,
                  const std::string& out) {
    const NetworkSpec spec = load_topology(topology);
    Network net(spec);
    net.init_params(seed);

    const auto shapes = shape_trace(spec);
    const Activation* last_act =
        net.layer_count() ? net.layer(net.layer_count() - 1).activation() : nullptr;
    const bool classify = last_act && last_act->is_softmax();
    const Loss loss =
        classify ? Loss{LossKind::categorical_cross_entropy} : Loss{LossKind::mse};

    Sample sample;
    sample.input = random_probe(spec, mix_seed(seed, 1));
    if (classify) {
        sample.target = Mat(1, shapes.back().samples, 0.0);
        sample.target(0, 0) = 1.0;
    } else {
        Rng rng(mix_seed(seed, 2));
        sample.target = Mat(shapes.back().channels, shapes.back().samples);
        for (double& v : sample.target.values()) v = rng.uniform(-0.8, 0.8);
    }

    const double worst = grad_check(net, sample, loss, h);
    std::cout << "worst_relative_error " << worst << "\n";
    if (!out.empty()) {
        const fs::path out_dir(out);
        write_manifest(out_dir, json{{"subcommand", "gradcheck"},
                                     {"topology", topology},
                                     {"seed", seed},
                                     {"step", h},
                                     {"out", out}});
        std::ostringstream text;
        text.precision(17);
        text << "worst_relative_error " << worst << "\n";
        write_text(out_dir / "gradcheck.txt", text.str());
    }
    return worst <= 1e-5 ? kExitOk : kExitGradcheckFailed;
}

int run_equivalent(const std::string& topology, const std::string& out) {
    const EquivalenceReport report = build_equivalent(load_topology(topology));
    const std::string text = report_text(report);
    std::cout << text;
    if (!out.empty()) {
        const fs::path out_dir(out);
        write_manifest(out_dir,
                       json{{"subcommand", "equivalent"}, {"topology", topology}, {"out", out}});
        write_text(out_dir / "equivalent.topo", emit_topology(report.constructed));
        write_text(out_dir / "report.txt", text);
    }
    return kExitOk;
}

int run_complexity(int dmax, int reps, std::uint64_t seed, const std::string& out) {
    const auto results = run_bench(dmax, reps, seed);
    const std::string csv = bench_csv(results);
    const fs::path out_dir(out);
    write_manifest(out_dir, json{{"subcommand", "complexity"},
                                 {"dmax", dmax},
                                 {"reps", reps},
                                 {"seed", seed},
                                 {"out", out}});
    write_text(out_dir / "complexity.csv", csv);
    std::cout << csv;
    return kExitOk;
}

int run_denoise(const std::string& model_path, const std::string& input,
                const std::string& clean_path, double overlap, const std::string& out) {
    const LoadedModel loaded = load_model(model_path);
    WindowSpec window;
    window.length = loaded.net.spec().in_samples;
    window.overlap = overlap;

    const Vec noisy = read_f64(input);
    const Vec denoised = denoise_end_to_end(window_model(loaded.net), noisy, window);

    const fs::path out_dir(out);
    write_manifest(out_dir, json{{"subcommand", "denoise"},
                                 {"model", model_path},
                                 {"input", input},
                                 {"clean", clean_path},
                                 {"window", window.length},
                                 {"overlap", window.overlap},
                                 {"out", out}});
    write_f64(out_dir / "denoised.f64", denoised);

    std::ostringstream text;
    text.precision(6);
    if (!clean_path.empty()) {
        const Vec clean = read_f64(clean_path);
        MetricReport before;
        before.mse = mse(clean, noisy);
        before.snr_db = snr_db(clean, noisy);
        before.snrseg_db = snrseg_db(clean, noisy);
        MetricReport after;
        after.mse = mse(clean, denoised);
        after.snr_db = snr_db(clean, denoised);
        after.snrseg_db = snrseg_db(clean, denoised);
        text << "input_snr_db " << before.snr_db << "\n"
             << "output_snr_db " << after.snr_db << "\n"
             << "input_snrseg_db " << before.snrseg_db << "\n"
             << "output_snrseg_db " << after.snrseg_db << "\n"
             << "input_mse " << before.mse << "\n"
             << "output_mse " << after.mse << "\n";
        write_text(out_dir / "metrics.txt", text.str());
    }
    std::cout << text.str();
    return kExitOk;
}

struct GenArgs {
    std::string task = "tones";
    std::string out = "dataset";
    std::size_t classes = 8;
    std::size_t per_class = 50;
    double duration = 0.25;
    double rate = 16000.0;
    std::size_t count = 200;
    std::size_t len = 256;
    double snr = 0.0;
    std::uint64_t seed = 0;
};

int run_gen_data(const GenArgs& args) {
    const fs::path out_dir(args.out);
    write_manifest(out_dir, json{{"subcommand", "gen-data"},
                                 {"task", args.task},
                                 {"out", args.out},
                                 {"classes", args.classes},
                                 {"per_class", args.per_class},
                                 {"duration", args.duration},
                                 {"rate", args.rate},
                                 {"count", args.count},
                                 {"len", args.len},
                                 {"snr_db", args.snr},
                                 {"seed", args.seed}});
    if (args.task == "tones") {
        ToneSpec spec = ToneSpec::defaults();
        spec.class_count = args.classes;
        spec.duration_s = args.duration;
        spec.sample_rate = args.rate;
        if (args.classes > spec.fundamentals_hz.size()) {
            spec.fundamentals_hz.clear();
            for (std::size_t c = 0; c < args.classes; ++c) {
                spec.fundamentals_hz.push_back(200.0 + 90.0 * static_cast<double>(c));
            }
        }
        write_labeled_signals(out_dir, gen_tones(spec, args.per_class, args.seed));
        return kExitOk;
    }
    if (args.task == "denoise") {
        write_denoise_pairs(out_dir, gen_denoise_pairs(args.count, args.len, args.seed, args.snr),
                            args.rate);
        return kExitOk;
    }
    throw std::invalid_argument("unknown task: " + args.task);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D polynomial neural network engine"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "train a network on a dataset directory");
    train->add_option("--topology", train_args.topology, "topology file")->required();
    train->add_option("--data", train_args.data, "dataset directory")->required();
    train->add_option("--test-data", train_args.test_data, "held-out dataset directory");
    train->add_option("--out", train_args.out, "output directory");
    train->add_option("--seed", train_args.seed, "rng seed");
    train->add_option("--lr", train_args.lr, "learning rate");
    train->add_option("--epochs", train_args.epochs, "epoch count");
    train->add_option("--batch", train_args.batch, "batch size");
    train->add_option("--folds", train_args.folds, "cross-validation folds (1 = holdout)");
    train->add_option("--window", train_args.window, "window length in samples");
    train->add_option("--overlap", train_args.overlap, "window overlap in [0,1)");
    train->add_option("--clip", train_args.clip, "global-norm gradient clip (0 = off)");
    train->add_option("--optimizer", train_args.optimizer, "adam or sgd");
    train->add_option("--snr-db", train_args.snr, "noise level echoed into the manifest");

    std::string eval_model, eval_data, eval_out = "out";
    std::size_t eval_window = 0;
    double eval_overlap = 0.5;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model");
    eval_cmd->add_option("--model", eval_model, "model file")->required();
    eval_cmd->add_option("--data", eval_data, "dataset directory")->required();
    eval_cmd->add_option("--window", eval_window, "window length in samples");
    eval_cmd->add_option("--overlap", eval_overlap, "window overlap");
    eval_cmd->add_option("--out", eval_out, "output directory");

    std::string gc_topology, gc_out;
    std::uint64_t gc_seed = 0;
    double gc_h = 1e-6;
    auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference gradient audit");
    gradcheck_cmd->add_option("--topology", gc_topology, "topology file")->required();
    gradcheck_cmd->add_option("--seed", gc_seed, "rng seed");
    gradcheck_cmd->add_option("--step", gc_h, "finite-difference step");
    gradcheck_cmd->add_option("--out", gc_out, "output directory");

    std::string eq_topology, eq_out;
    auto* equivalent_cmd =
        app.add_subcommand("equivalent", "construct the parameter-matched plain network");
    equivalent_cmd->add_option("--topology", eq_topology, "topology file")->required();
    equivalent_cmd->add_option("--out", eq_out, "output directory");

    int cx_dmax = 8, cx_reps = 200;
    std::uint64_t cx_seed = 0;
    std::string cx_out = "out";
    auto* complexity_cmd = app.add_subcommand("complexity", "micro-benchmark and theory curves");
    complexity_cmd->add_option("--dmax", cx_dmax, "largest polynomial degree");
    complexity_cmd->add_option("--reps", cx_reps, "repetitions per measurement");
    complexity_cmd->add_option("--seed", cx_seed, "rng seed");
    complexity_cmd->add_option("--out", cx_out, "output directory");

    std::string dn_model, dn_input, dn_clean, dn_out = "out";
    double dn_overlap = 0.5;
    auto* denoise_cmd = app.add_subcommand("denoise", "run the end-to-end denoiser on a signal");
    denoise_cmd->add_option("--model", dn_model, "model file")->required();
    denoise_cmd->add_option("--input", dn_input, "noisy signal (.f64)")->required();
    denoise_cmd->add_option("--clean", dn_clean, "clean reference signal (.f64)");
    denoise_cmd->add_option("--overlap", dn_overlap, "window overlap");
    denoise_cmd->add_option("--out", dn_out, "output directory");

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic dataset directory");
    gen_cmd->add_option("--task", gen_args.task, "tones or denoise");
    gen_cmd->add_option("--out", gen_args.out, "output directory");
    gen_cmd->add_option("--classes", gen_args.classes, "tone classes");
    gen_cmd->add_option("--per-class", gen_args.per_class, "signals per class");
    gen_cmd->add_option("--duration", gen_args.duration, "signal duration in seconds");
    gen_cmd->add_option("--rate", gen_args.rate, "sample rate");
    gen_cmd->add_option("--count", gen_args.count, "denoise pair count");
    gen_cmd->add_option("--len", gen_args.len, "denoise pair length in samples");
    gen_cmd->add_option("--snr-db", gen_args.snr, "denoise pair SNR in dB");
    gen_cmd->add_option("--seed", gen_args.seed, "rng seed");

    try {
        app.parse(argc, argv);
        if (*train) return run_train(train_args);
        if (*eval_cmd) return run_eval(eval_model, eval_data, eval_window, eval_overlap, eval_out);
        if (*gradcheck_cmd) return run_gradcheck(gc_topology, gc_seed, gc_h, gc_out);
        if (*equivalent_cmd) return run_equivalent(eq_topology, eq_out);
        if (*complexity_cmd) return run_complexity(cx_dmax, cx_reps, cx_seed, cx_out);
        if (*denoise_cmd) return run_denoise(dn_model, dn_input, dn_clean, dn_overlap, dn_out);
        if (*gen_cmd) return run_gen_data(gen_args);
        return kExitConfigError;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    } catch (const TopologyError& e) {
        std::cerr << "topology error: " << e.what() << "\n";
        return kExitTopologyError;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumericError;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}
