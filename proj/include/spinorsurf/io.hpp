#pragma once

#include "spinorsurf/grid.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

namespace spinorsurf {

nlohmann::json grid_json(const Grid2D &g);

// CSV: x, y, then (re, im) per complex component; 17 significant digits
template <class T> void write_field_csv(std::ostream &os, const Field<T> &f, const std::string &component_prefix = "")
{
    const Grid2D &g = f.grid();
    constexpr int nc = ValueTraits<T>::n;
    os << "x,y";
    for (int c = 0; c < nc; ++c) {
        const std::string suffix = nc == 1 ? "" : std::to_string(c + 1);
        os << "," << component_prefix << "re" << suffix << "," << component_prefix << "im" << suffix;
    }
    os << "\n" << std::setprecision(17);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            os << g.x(i) << "," << g.y(j);
            for (int c = 0; c < nc; ++c) {
                const cplx v = ValueTraits<T>::get(f(i, j), c);
                os << "," << v.real() << "," << v.imag();
            }
            os << "\n";
        }
}

// writes <stem>.csv and <stem>.json (grid metadata header)
template <class T> void dump_field(const std::filesystem::path &stem, const Field<T> &f)
{
    std::filesystem::create_directories(stem.parent_path().empty() ? "." : stem.parent_path());
    std::ofstream csv(stem.string() + ".csv");
    write_field_csv(csv, f);
    nlohmann::json h = grid_json(f.grid());
    h["components"] = ValueTraits<T>::n;
    h["wrap"] = {{f.wrap()[0].real(), f.wrap()[0].imag()}, {f.wrap()[1].real(), f.wrap()[1].imag()}};
    std::ofstream js(stem.string() + ".json");
    js << h.dump(2) << "\n";
}

// vertices are grid nodes, quads split into two triangles; faces touching
// a skipped node are dropped
void write_obj(std::ostream &os, const Vec3Field &r, const std::vector<bool> &skip = {});
void write_obj(const std::filesystem::path &path, const Vec3Field &r, const std::vector<bool> &skip = {});

// parses the CSV layout written by write_field_csv
std::vector<std::vector<double>> read_csv_rows(std::istream &is);

} // namespace spinorsurf
