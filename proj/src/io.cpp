#include "spinorsurf/io.hpp"

namespace spinorsurf {

nlohmann::json grid_json(const Grid2D &g)
{
    nlohmann::json j;
    j["nx"] = g.nx();
    j["ny"] = g.ny();
    j["hx"] = g.hx();
    j["hy"] = g.hy();
    j["origin"] = {g.origin().real(), g.origin().imag()};
    j["periodic_x"] = g.periodic_x();
    j["periodic_y"] = g.periodic_y();
    j["lambda1"] = {g.lambda1().real(), g.lambda1().imag()};
    j["lambda2"] = {g.lambda2().real(), g.lambda2().imag()};
    j["layout"] = "row-major, index = j*nx + i";
    return j;
}

void write_obj(std::ostream &os, const Vec3Field &r, const std::vector<bool> &skip)
{
    const Grid2D &g = r.grid();
    os << std::setprecision(17);
    for (const auto &v : r.values())
        os << "v " << v.x1 << " " << v.x2 << " " << v.x3 << "\n";
    auto bad = [&](std::size_t k) { return !skip.empty() && skip[k]; };
    for (int j = 0; j + 1 < g.ny(); ++j)
        for (int i = 0; i + 1 < g.nx(); ++i) {
            const std::size_t a = g.index(i, j), b = g.index(i + 1, j), c = g.index(i + 1, j + 1),
                              d = g.index(i, j + 1);
            if (!(bad(a) || bad(b) || bad(c)))
                os << "f " << a + 1 << " " << b + 1 << " " << c + 1 << "\n";
            if (!(bad(a) || bad(c) || bad(d)))
                os << "f " << a + 1 << " " << c + 1 << " " << d + 1 << "\n";
        }
}

void write_obj(const std::filesystem::path &path, const Vec3Field &r, const std::vector<bool> &skip)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    write_obj(os, r, skip);
}

std::vector<std::vector<double>> read_csv_rows(std::istream &is)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace spinorsurf
