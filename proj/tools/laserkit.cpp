// laserkit: shape rollout logs, replay the adaptive controller, run the
// simulator, analyze outputs.
//
//   laserkit shape    --config c.json [--format jsonl] log.jsonl
//   laserkit adapt    --config c.json log.jsonl
//   laserkit simulate --config c.json --seed 3 --out traj.csv [--rollouts r.jsonl]
//   laserkit analyze  summary --config c.json shaped.jsonl

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "laserkit/commands.hpp"
#include "laserkit/config.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    std::string input;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON run configuration");
    cmd->add_option("--seed", f.seed, "override the configured seed");
    cmd->add_option("--out", f.out, "output path (default: stdout)");
    cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "jsonl"}));
}

laserkit::RunConfig resolve(const CommonFlags& f) {
    laserkit::RunConfig cfg =
        f.config.empty() ? laserkit::parse_run_config_text("{}") : laserkit::load_run_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (!f.format.empty()) cfg.format = laserkit::output_format_from_string(f.format);
    if (!f.out.empty()) cfg.io.out = f.out;
    if (!f.input.empty()) cfg.io.input = f.input;
    return cfg;
}

/// Opens io.out when set; otherwise stdout.
class Output {
public:
    explicit Output(const std::optional<std::string>& path) {
        if (path && *path != "-") {
            file_.open(*path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open '" + *path + "' for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

class Input {
public:
    explicit Input(const std::optional<std::string>& path) {
        if (path && *path != "-") {
            file_.open(*path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open '" + *path + "'");
        }
    }
    std::istream& stream() { return file_.is_open() ? file_ : std::cin; }

private:
    std::ifstream file_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Length-based reward shaping toolkit"};
    app.require_subcommand(1);

    CommonFlags shape_f, adapt_f, sim_f, analyze_f;
    std::string rollouts_path, mode;
    std::vector<std::size_t> budgets;

    auto* shape = app.add_subcommand("shape", "append shaped rewards to a rollout log");
    add_common(shape, shape_f);
    shape->add_option("input", shape_f.input, "rollout log (default: io.input or stdin)");

    auto* adapt = app.add_subcommand("adapt", "replay the adaptive target controller over a log");
    add_common(adapt, adapt_f);
    adapt->add_option("input", adapt_f.input, "rollout log (default: io.input or stdin)");

    auto* simulate = app.add_subcommand("simulate", "run the synthetic training loop");
    add_common(simulate, sim_f);
    simulate->add_option("--rollouts", rollouts_path, "also write every shaped response here");

    auto* analyze = app.add_subcommand("analyze", "keyword density, budget forcing, summaries");
    add_common(analyze, analyze_f);
    analyze->add_option("mode", mode, "keywords | budget | summary")->required();
    analyze->add_option("input", analyze_f.input, "input file (default: io.input or stdin)");
    analyze->add_option("--budget", budgets, "thinking budget, repeatable; overrides analyze.budgets")
        ->allow_extra_args(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return laserkit::kExitConfigError;
    }

    try {
        if (*shape) {
            const auto cfg = resolve(shape_f);
            Input in(cfg.io.input);
            Output out(cfg.io.out);
            return laserkit::cmd_shape(cfg, in.stream(), out.stream(), std::cerr);
        }
        if (*adapt) {
            const auto cfg = resolve(adapt_f);
            Input in(cfg.io.input);
            Output out(cfg.io.out);
            return laserkit::cmd_adapt(cfg, in.stream(), out.stream(), std::cerr);
        }
        if (*simulate) {
            auto cfg = resolve(sim_f);
            if (!rollouts_path.empty()) cfg.io.rollouts = rollouts_path;
            Output out(cfg.io.out);
            std::optional<Output> rollouts;
            if (cfg.io.rollouts) rollouts.emplace(cfg.io.rollouts);
            return laserkit::cmd_simulate(cfg, out.stream(),
                                          rollouts ? &rollouts->stream() : nullptr, std::cerr);
        }
        auto cfg = resolve(analyze_f);
        if (!budgets.empty()) {
            cfg.budgets = budgets;
            cfg.validate();
        }
        Input in(cfg.io.input);
        Output out(cfg.io.out);
        return laserkit::cmd_analyze(cfg, mode, in.stream(), out.stream(), std::cerr);
    } catch (const laserkit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return laserkit::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return laserkit::kExitDataError;
    }
}
