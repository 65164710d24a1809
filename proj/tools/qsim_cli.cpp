#include "experiments.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <exception>

int main(int argc, char** argv) {
    CLI::App app{"qsim batch experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;

    std::string chosen;
    for (const auto& name : qsim::experiments::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "config file (key = value lines)");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads");
        sub->callback([&chosen, name] { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        std::map<std::string, std::string> raw;
        if (!config_path.empty()) raw = qsim::config::parse_config_file(config_path);
        auto cfg = qsim::experiments::make_config(chosen, raw, seed, out_dir, threads);
        auto res = qsim::experiments::run_experiment(cfg);
        std::printf("%s: %s (artifacts in %s)\n", chosen.c_str(),
                    res.ok ? "pass" : "FAIL", out_dir.c_str());
        return res.ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
