#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "permfree/experiment.hpp"

namespace {

void add_common(CLI::App& cmd, permfree::ExperimentConfig& cfg) {
    cmd.add_option("--seed", cfg.seed, "Master seed for Monte Carlo sampling");
    cmd.add_option("--budget", cfg.budget, "Constraint checks allowed per exact evaluation");
    cmd.add_option("--threads", cfg.threads, "Worker threads (results do not depend on this)")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--format", cfg.format, "Output format: json, csv or text");
    cmd.add_option("-o,--output", cfg.output, "Write the report to this file");
}

} // namespace

int main(int argc, char** argv) {
    permfree::ExperimentConfig cfg;
    std::string grid;
    int side = 0;
    std::uint64_t samples = 0;

    CLI::App app{"Entry-permuted Gaussian matrices: freeness conditions, exact and sampled moments"};
    app.require_subcommand(1);

    auto* certify = app.add_subcommand("certify", "Check the freeness conditions of a family over a grid of sides");
    certify->add_option("--schemes", cfg.schemes, "Comma-separated label:kind list, kind = sym or jsmall")->required();
    certify->add_option("--grid", grid, "Comma-separated matrix sides (at least 3)")->required();
    add_common(*certify, cfg);

    auto* moment = app.add_subcommand("moment", "Exact and/or Monte Carlo moments of a word");
    moment->add_option("--word", cfg.word, "Comma-separated factors, '*' for adjoint, Z/T/I constants")->required();
    auto* grid_opt = moment->add_option("--grid", grid, "Comma-separated matrix sides");
    auto* n_opt = moment->add_option("--n", side, "A single matrix side");
    grid_opt->excludes(n_opt);
    moment->add_flag("--exact", cfg.exact, "Exact Wick evaluation");
    moment->add_flag("--mc", cfg.mc, "Monte Carlo estimate");
    moment->add_option("--samples", samples, "Monte Carlo samples (default 10000)");
    add_common(*moment, cfg);

    auto* predict = app.add_subcommand("predict", "Free-limit value of a word over semicircular/circular labels");
    predict->add_option("--word", cfg.word, "Comma-separated labels with optional '*'")->required();
    predict->add_option("--kinds", cfg.kinds, "label:semi or label:circ for every label")->required();
    add_common(*predict, cfg);

    auto* reproduce = app.add_subcommand("reproduce", "Run a pre-registered experiment bundle");
    reproduce->add_option("name", cfg.bundle, "trio, remark41, remark42 or transpose-tensor")->required();
    reproduce->add_option("--grid", grid, "Override the certification grid");
    reproduce->add_option("--n", side, "Override the sampling side");
    reproduce->add_option("--samples", samples, "Override the number of samples");
    add_common(*reproduce, cfg);

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? permfree::exit_pass : permfree::exit_usage;
    }

    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    try {
        if (!grid.empty()) cfg.grid = permfree::parse_int_list(grid);
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return permfree::exit_usage;
    }
    if (side != 0) cfg.side = side;
    if (samples != 0) cfg.samples = samples;
    return permfree::run_command(cfg, std::cout, std::cerr);
}
