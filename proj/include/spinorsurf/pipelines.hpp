#pragma once

#include "spinorsurf/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace spinorsurf {

enum class Relation { AtMost, AtLeast, Within };

struct Check {
    std::string name;
    double value = 0;
    double threshold = 0;
    double threshold_hi = 0; // upper end for Within
    Relation relation = Relation::AtMost;
    bool pass = false;
    nlohmann::json to_json() const;
};

struct Report {
    std::string command;
    Scenario scenario;
    std::vector<Check> checks;
    nlohmann::json data = nlohmann::json::object();

    // names must be unique within a report
    void at_most(const std::string &name, double value, double threshold);
    void at_least(const std::string &name, double value, double threshold);
    void within(const std::string &name, double value, double lo, double hi);
    void add(Check c);
    const Check *find(const std::string &name) const;
    bool passed() const;
    nlohmann::json to_json() const;
};

struct RunOptions {
    int refine = 1;                             // number of resolutions, each halving h
    std::optional<std::filesystem::path> out;   // overrides scenario.output_dir
    std::optional<double> tolerance_scale;      // overrides scenario tolerances.scale
    bool write_artifacts = true;
};

const std::vector<std::string> &pipeline_names();

// runs surface | invert | moutard | mnv-check | mnv-evolve | floquet
Report run_pipeline(const std::string &command, const Scenario &sc, const RunOptions &opt = {});

// report.json (deterministic) and metadata.json (timestamps, timings)
void write_report(const std::filesystem::path &dir, const Report &r, const nlohmann::json &metadata);

nlohmann::json list_scenarios_json();

// 0 pass, 1 check failure, 2 parse, 3 validation, 4 singularity or instability
int exit_code_for(const Report &r);
int exit_code_for(const std::exception &e);

} // namespace spinorsurf
