#pragma once

#include "spinorsurf/weierstrass.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace spinorsurf {

enum class Family { Plane, SphereOffset, Enneper, Cylinder, TorusOfRevolution, CustomSpinorFile };

std::string family_name(Family f);
Family parse_family(const std::string &s);

// multipliers on the FD tolerances; spectral and algebraic are absolute
struct Tolerances {
    double fd = 5.0;
    double spectral = 1e-8;
    double algebraic = 1e-10;
    double floquet = 1e-6;
    double scale = 1.0; // --tolerance-scale, applied to all of the above
};

struct EvolveSettings {
    int steps = 20;
    double dt = 0; // 0: stable_dt
    int snapshot_every = 5;
};

struct Scenario {
    std::string name;
    Family family = Family::Plane;
    int nx = 128, ny = 128;
    double x_min = -1, x_max = 1, y_min = -1, y_max = 1;
    double radius = 1.0;
    Vec3 offset;
    double torus_a = 2.0;
    std::optional<Node> base;
    Tolerances tol;
    std::string output_dir = "out";
    std::string spinor_file; // custom_spinor_file only, relative to the config
    EvolveSettings evolve;
    std::string oracle;

    nlohmann::json to_json() const;
};

// syntax and shape problems throw ConfigParseError, range problems ValidationError
Scenario parse_scenario(const nlohmann::json &j, const std::filesystem::path &config_dir = {});
Scenario load_scenario(const std::filesystem::path &path);
void validate(const Scenario &sc);

// plane, sphere_offset, enneper, cylinder, torus_of_revolution
std::vector<Scenario> builtin_scenarios();
Scenario builtin_scenario(const std::string &name);

// sampled data of a scenario; the analytic pieces are empty for custom spinors
struct Realization {
    Grid2D grid;
    SpinorField psi;
    ScalarField U;
    Node base;
    Vec3 x0;
    std::function<Spinor(cplx)> psi_exact;
    std::function<Vec3(cplx)> r_exact;
    // a second solution of the same Dirac equation, not of the form Ψ₀q
    std::function<Spinor(cplx)> companion;
    std::array<cplx, 2> companion_wrap{1.0, 1.0};
};

Grid2D scenario_grid(const Scenario &sc);
Realization realize(const Scenario &sc);

// same scenario with spacing halved `level` times
Scenario refined(const Scenario &sc, int level);

// geometric minimum of |r| over the sampled immersion
double min_radius(const Vec3Field &r);

} // namespace spinorsurf
