// Command-line front end: generate synthetic populations, train the pipeline
// stages, and evaluate the downstream tasks. Exit codes: 0 success,
// 2 configuration/usage, 3 file I/O or format, 4 numeric failure.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dce/errors.hpp"
#include "dce/fs_util.hpp"
#include "dce/pipeline.hpp"
#include "dce/run_config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dynamic customer embedding pipeline"};
    app.require_subcommand(1);

    std::string config_path, data_path, out_path, stage, task;
    std::string sae_path, dce_path, fused_path, ema_path;
    double rate = -1.0;
    std::uint64_t seed = 0;

    CLI::App* gen = app.add_subcommand("generate", "generate a synthetic population");
    gen->add_option("--out", out_path, "dataset output path (.jsonl)")->required();
    gen->add_option("--config", config_path, "run config file");
    gen->add_option("--seed", seed, "override gen.seed");

    CLI::App* train = app.add_subcommand("train", "train a pipeline stage");
    train->add_option("--stage", stage, "sae|dce|fused|ema")
        ->required()
        ->check(CLI::IsMember({"sae", "dce", "fused", "ema"}));
    train->add_option("--data", data_path, "dataset path")->required();
    train->add_option("--out", out_path, "checkpoint output path")->required();
    train->add_option("--config", config_path, "run config file");
    train->add_option("--sae", sae_path, "autoencoder checkpoint (dce/fused/ema stages)");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a downstream task");
    eval->add_option("--task", task, "next|intent|call|fraud")
        ->required()
        ->check(CLI::IsMember({"next", "intent", "call", "fraud"}));
    eval->add_option("--data", data_path, "dataset path")->required();
    eval->add_option("--sae", sae_path, "autoencoder checkpoint")->required();
    eval->add_option("--dce", dce_path, "customer model checkpoint")->required();
    eval->add_option("--fused", fused_path, "fused-ablation checkpoint (intent task)");
    eval->add_option("--ema", ema_path, "ema checkpoint (next task)");
    eval->add_option("--rate", rate, "challenge rate (fraud task)");
    eval->add_option("--out", out_path, "report output path (.json)")->required();
    eval->add_option("--config", config_path, "run config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const dce::RunConfig rc =
            config_path.empty() ? dce::RunConfig{} : dce::load_run_config(config_path);
        if (gen->parsed()) {
            dce::GenConfig gc = rc.gen;
            if (gen->count("--seed") > 0) gc.seed = seed;
            std::cout << dce::cmd_generate(gc, out_path).dump(2) << "\n";
        } else if (train->parsed()) {
            dce::cmd_train(stage, data_path, rc, sae_path, out_path);
        } else if (eval->parsed()) {
            if (task == "fraud" && rate < 0.0) rate = rc.challenge_rate;
            const nlohmann::json report = dce::cmd_eval(task, data_path, rc, sae_path, dce_path,
                                                        fused_path, ema_path, rate, out_path);
            std::cout << dce::read_file(out_path.size() > 5 &&
                                                out_path.substr(out_path.size() - 5) == ".json"
                                            ? out_path.substr(0, out_path.size() - 5) + ".txt"
                                            : out_path + ".txt");
        }
    } catch (const dce::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const dce::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
