#include "cvembem/harness/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace cvembem;
    CLI::App app{"Curved VEM / BEM coupling for exterior Poisson problems"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "thread cap (default: CVEMBEM_THREADS or all cores)");

    std::string config_path;
    auto* solve = app.add_subcommand("solve", "single solve; writes mesh, solution and matrix dumps");
    auto* convergence = app.add_subcommand("convergence", "levels x k_o study; writes convergence.csv and .dat files");
    auto* asymptotic = app.add_subcommand("asymptotic", "alpha recovery and axis profiles; writes alpha.txt, profile_*.dat");
    auto* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");
    for (auto* sub : {solve, convergence, asymptotic}) sub->add_option("--config", config_path, "key = value file")->required();
    CLI11_PARSE(app, argc, argv);

    configure_threads(threads);
    try {
        if (*selftest) return harness::run_selftest(std::cout) ? 0 : 1;
        const auto config = harness::load_config(config_path);
        if (*solve) harness::run_single(config, std::cout);
        if (*convergence) {
            const auto rows = harness::run_convergence(config, std::cout);
            for (const auto& r : rows)
                if (!r.ok) return 1;
        }
        if (*asymptotic) harness::run_asymptotic(config, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
