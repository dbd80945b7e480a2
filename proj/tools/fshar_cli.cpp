// Experiment runner for the few-shot activity-recognition benchmark.
//
//   fshar run --config experiment.json [--out results.csv] [--format csv|json]
//             [--seed N] [--reps N]
//   fshar gradcheck
//   fshar synth --classes 15 --per-class 60 --timesteps 20 --channels 3
//               --noise 0.3 --seed 7 --out data/synth.bin

#include <cstdint>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "fshar/fshar.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::string& format_override, std::int64_t seed_override,
            std::int64_t reps_override) {
    fshar::ExperimentConfig cfg = fshar::ExperimentConfig::from_file(config_path);
    if (!out_override.empty()) cfg.out_path = out_override;
    if (!format_override.empty()) cfg.format = format_override;
    if (seed_override >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed_override);
    if (reps_override > 0) cfg.repetitions = static_cast<std::size_t>(reps_override);
    cfg.validate();

    const fshar::ResultTable table = fshar::run_experiment(cfg, &std::cerr);
    fshar::emit_report(table, cfg.format, cfg.out_path);

    std::cout << fshar::to_csv(table);
    for (const std::string& f : table.failures) std::cerr << "failure: " << f << "\n";
    std::cerr << "report written to " << cfg.out_path << "\n";
    return table.failures.empty() ? 0 : 1;
}

int cmd_gradcheck() {
    const fshar::NetworkShape shapes[] = {{2, 4, 4, 3, 2}, {3, 6, 5, 4, 3}};
    bool all_passed = true;
    for (const fshar::NetworkShape& shape : shapes) {
        const fshar::NetworkParams params = fshar::init_params(shape, 12345);
        fshar::SequenceBatch batch(2, 3, shape.input_channels);
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (double& v : batch.values) v = dist(rng);
        batch.labels = {0, 1};

        const fshar::GradCheckReport report = fshar::check_gradients(params, batch);
        all_passed = all_passed && report.passed;
        std::cout << (report.passed ? "PASS" : "FAIL") << "  H=" << shape.lstm_hidden
                  << " C=" << shape.input_channels << "  entries=" << report.entries_checked
                  << "  max_rel_err=" << report.max_rel_err << "\n";
        const auto& names = fshar::NetworkParams::tensor_names();
        for (std::size_t k = 0; k < names.size(); ++k)
            std::cout << "  " << names[k] << ": " << report.per_tensor_max[k] << "\n";
        if (!report.passed)
            std::cout << "  worst: " << report.worst.tensor << "[" << report.worst.index
                      << "] analytic=" << report.worst.analytic
                      << " numeric=" << report.worst.numeric << "\n";
    }
    return all_passed ? 0 : 1;
}

int cmd_synth(std::size_t classes, std::size_t per_class, std::size_t timesteps,
              std::size_t channels, double noise, std::uint64_t seed, const std::string& out) {
    const fshar::SequenceBatch batch =
        fshar::synth_generate(classes, per_class, timesteps, channels, noise, seed);
    fshar::save_batch(batch, out);
    std::cerr << "wrote " << batch.n << " windows (" << classes << " classes x " << per_class
              << ") to " << out << " and " << out << ".json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Few-shot activity recognition benchmark"};
    app.require_subcommand(1);

    std::string config_path, out_override, format_override;
    std::int64_t seed_override = -1, reps_override = 0;
    CLI::App* run = app.add_subcommand("run", "Run a configured experiment");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_override, "Report path (overrides config)");
    run->add_option("--format", format_override, "csv or json (overrides config)")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--seed", seed_override, "Base seed (overrides config)");
    run->add_option("--reps", reps_override, "Repetitions (overrides config)");

    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "Finite-difference check of all gradients");

    std::size_t classes = 15, per_class = 60, timesteps = 20, channels = 3;
    double noise = 0.3;
    std::uint64_t synth_seed = 7;
    std::string synth_out = "synth.bin";
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--classes", classes, "Number of classes");
    synth->add_option("--per-class", per_class, "Samples per class");
    synth->add_option("--timesteps", timesteps, "Timesteps per window");
    synth->add_option("--channels", channels, "Channels per timestep");
    synth->add_option("--noise", noise, "Gaussian noise standard deviation");
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--out", synth_out, "Output path for the binary batch");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, out_override, format_override, seed_override,
                           reps_override);
        if (gradcheck->parsed()) return cmd_gradcheck();
        if (synth->parsed())
            return cmd_synth(classes, per_class, timesteps, channels, noise, synth_seed,
                             synth_out);
    } catch (const fshar::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
