// Command-line front end for the imitation-learning pipeline:
// expert-train -> record-demo -> train-reward -> imitate -> evaluate,
// plus the beta ablation driver and the learning-curve plotter.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "iil/config.hpp"
#include "iil/harness.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file")->required();
    cmd->add_option("--seed", args.seed, "master seed for this stage");
    cmd->add_option("--out", args.out, "override the configured output directory");
}

iil::ExperimentConfig load(const CommonArgs& args) {
    iil::ExperimentConfig cfg = iil::load_config(args.config_path);
    if (!args.out.empty()) cfg.output_dir = args.out;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"intrinsic-reward imitation learning lab"};
    app.require_subcommand(1);

    CommonArgs expert_args, demo_args, reward_args, imitate_args, eval_args, ablate_args,
        plot_args;
    std::vector<std::string> plot_csvs;

    add_common(app.add_subcommand("expert-train", "train the expert on the true reward"),
               expert_args);
    add_common(app.add_subcommand("record-demo", "record a demonstration from the expert"),
               demo_args);
    add_common(app.add_subcommand("train-reward", "train the girl/cdil reward module"),
               reward_args);
    add_common(app.add_subcommand("imitate", "train the imitator on the learned reward"),
               imitate_args);
    add_common(app.add_subcommand("evaluate", "evaluate a trained imitation policy"),
               eval_args);
    add_common(app.add_subcommand("ablate-beta", "rerun imitation across the beta grid"),
               ablate_args);
    CLI::App* plot_cmd = app.add_subcommand("plot", "render learning-curve SVG from metrics");
    add_common(plot_cmd, plot_args);
    plot_cmd->add_option("csv", plot_csvs, "metrics CSV files (default: output dir)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("expert-train")) {
            iil::cmd_expert_train(load(expert_args), expert_args.seed);
        } else if (app.got_subcommand("record-demo")) {
            iil::cmd_record_demo(load(demo_args), demo_args.seed);
        } else if (app.got_subcommand("train-reward")) {
            iil::cmd_train_reward(load(reward_args), reward_args.seed);
        } else if (app.got_subcommand("imitate")) {
            iil::cmd_imitate(load(imitate_args), imitate_args.seed);
        } else if (app.got_subcommand("evaluate")) {
            iil::cmd_evaluate(load(eval_args), eval_args.seed);
        } else if (app.got_subcommand("ablate-beta")) {
            iil::cmd_ablate_beta(load(ablate_args), ablate_args.seed);
        } else if (app.got_subcommand("plot")) {
            iil::ExperimentConfig cfg = iil::load_config(plot_args.config_path);
            std::string out_path;
            if (!plot_args.out.empty()) out_path = plot_args.out;
            iil::cmd_plot(cfg, plot_csvs, out_path);
        }
    } catch (const iil::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const iil::NumericError& e) {
        std::cerr << "numeric abort: " << e.what() << "\n";
        return 3;
    } catch (const iil::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 4;
    } catch (const iil::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
