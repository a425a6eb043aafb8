#include "spinorsurf/pipelines.hpp"

#include <CLI11.hpp>
#include <fftw3.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

using namespace spinorsurf;
namespace fs = std::filesystem;

namespace {

std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

Scenario resolve_scenario(const std::string &arg)
{
    if (fs::exists(arg))
        return load_scenario(arg);
    for (const Scenario &s : builtin_scenarios())
        if (s.name == arg || family_name(s.family) == arg)
            return s;
    throw ConfigParseError("cannot open scenario " + arg);
}

std::string one_line(std::string s)
{
    for (char &c : s)
        if (c == '\n' || c == '\r')
            c = ' ';
    return s;
}

void print_report(const Report &r)
{
    for (const Check &c : r.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " ";
        if (c.relation == Relation::Within)
            std::cout << "in [" << c.threshold << ", " << c.threshold_hi << "]";
        else
            std::cout << (c.relation == Relation::AtMost ? "<= " : ">= ") << c.threshold;
        std::cout << "\n";
    }
    std::cout << r.command << " " << r.scenario.name << ": " << (r.passed() ? "all checks passed" : "checks failed")
              << "\n";
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"spinor surfaces: Weierstrass representation, inversions, Moutard transformations"};
    app.require_subcommand(1);

    std::string scenario_arg;
    int refine = 1;
    std::string out_dir;
    double tol_scale = 0;

    std::vector<CLI::App *> runs;
    for (const std::string &name : pipeline_names()) {
        CLI::App *sub = app.add_subcommand(name, "run the " + name + " pipeline");
        sub->add_option("--scenario", scenario_arg, "scenario JSON file or built-in name")->required();
        sub->add_option("--refine", refine, "number of resolutions (each halves h)")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory (default: scenario output_dir)");
        sub->add_option("--tolerance-scale", tol_scale, "multiplier on all tolerances")->check(CLI::PositiveNumber);
        runs.push_back(sub);
    }
    CLI::App *list = app.add_subcommand("list-scenarios", "print the built-in scenarios as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return 2;
    }

    if (list->parsed()) {
        std::cout << list_scenarios_json().dump(2) << "\n";
        return 0;
    }

    CLI::App *sub = nullptr;
    for (CLI::App *s : runs)
        if (s->parsed())
            sub = s;
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const Scenario sc = resolve_scenario(scenario_arg);
        RunOptions opt;
        opt.refine = refine;
        if (!out_dir.empty())
            opt.out = fs::path(out_dir);
        if (tol_scale > 0)
            opt.tolerance_scale = tol_scale;
        const Report rep = run_pipeline(sub->get_name(), sc, opt);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        nlohmann::json meta;
        meta["timestamp"] = utc_now();
        meta["runtime_seconds"] = secs;
        meta["command"] = sub->get_name();
        meta["argv"] = std::vector<std::string>(argv, argv + argc);
        meta["compiler"] = __VERSION__;
        meta["fftw"] = std::string(fftw_version);
        write_report(opt.out ? *opt.out : fs::path(sc.output_dir), rep, meta);
        print_report(rep);
        return exit_code_for(rep);
    } catch (const std::exception &e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return exit_code_for(e);
    }
}
