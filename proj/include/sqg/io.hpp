#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqg/grid.hpp"

namespace sqg {

/// 17 significant digits; round-trips any double.
inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Line-buffered CSV writer: every row is formatted in memory first and
/// flushed as a single write, so an interrupted run leaves whole lines only.
class CsvLineWriter {
  public:
    explicit CsvLineWriter(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
    }

    void line(const std::string& s) {
        out_ << s << '\n';
        out_.flush();
    }

  private:
    std::ofstream out_;
};

/// Grid snapshot: `# t=<t> h=<h> nx=<nx> ny=<ny> x1_min=<v> L=<L>` then
/// `i,j,x1,x2,theta` rows in row-major order (j outer), full precision.
inline void write_snapshot_csv(const std::filesystem::path& path, const ScalarField& f, double t) {
    CsvLineWriter w(path);
    const GridSpec& g = f.spec();
    std::ostringstream head;
    head << "# t=" << fmt_full(t) << " h=" << fmt_full(g.h) << " nx=" << g.nx << " ny=" << g.ny
         << " x1_min=" << fmt_full(g.x1_min) << " L=" << fmt_full(f.support_radius);
    w.line(head.str());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            std::ostringstream row;
            row << i << ',' << j << ',' << fmt_full(g.x1(i)) << ',' << fmt_full(g.x2(j)) << ','
                << fmt_full(f.data.at(i, j));
            w.line(row.str());
        }
}

struct Snapshot {
    ScalarField field;
    double t = 0.0;
};

inline Snapshot read_snapshot_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    Snapshot snap;
    GridSpec g;
    double L = 0.0;
    if (std::sscanf(header.c_str(), "# t=%lf h=%lf nx=%d ny=%d x1_min=%lf L=%lf", &snap.t, &g.h,
                    &g.nx, &g.ny, &g.x1_min, &L) != 6)
        throw std::runtime_error("snapshot header malformed: " + header);
    g.x2_min = 0.0;
    snap.field = ScalarField{Field2D(g), L};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int i, j;
        double x1, x2, v;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf", &i, &j, &x1, &x2, &v) != 5)
            throw std::runtime_error("snapshot row malformed: " + line);
        snap.field.data.at(i, j) = v;
    }
    return snap;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << content;
    out.flush();
}

}  // namespace sqg
