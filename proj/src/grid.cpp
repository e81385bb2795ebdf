#include "grid.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fpp {

static_assert(std::endian::native == std::endian::little,
              "binary field format assumes a little-endian host");

double Box::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= side(a);
    return v;
}

Box Box::padded(double m) const {
    Box b = *this;
    for (int a = 0; a < dim; ++a) {
        b.lo[a] -= m;
        b.hi[a] += m;
    }
    return b;
}

std::int64_t GridSpec::nearest_node(const std::array<double, 3>& x) const {
    std::array<std::int64_t, 3> m{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        m[a] = std::llround((x[a] - origin[a]) / h);
        if (m[a] < 0 || m[a] >= extent[a])
            throw std::invalid_argument("point outside grid");
    }
    return flat_index(m);
}

Box GridSpec::bounding_box() const {
    Box b;
    b.dim = dim;
    for (int a = 0; a < dim; ++a) {
        b.lo[a] = origin[a];
        b.hi[a] = origin[a] + h * static_cast<double>(extent[a] - 1);
    }
    return b;
}

bool GridSpec::same_geometry(const GridSpec& o) const {
    if (dim != o.dim || h != o.h) return false;
    for (int a = 0; a < dim; ++a)
        if (origin[a] != o.origin[a] || extent[a] != o.extent[a]) return false;
    return true;
}

void GridSpec::validate(std::int64_t node_budget) const {
    if (dim != 2 && dim != 3) throw std::invalid_argument("grid.dim must be 2 or 3");
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid.h must be > 0");
    for (int a = 0; a < dim; ++a)
        if (extent[a] < 1) throw std::invalid_argument("grid extents must be >= 1");
    if (node_count() > node_budget)
        throw std::length_error("grid node count " + std::to_string(node_count()) +
                                " exceeds node budget " + std::to_string(node_budget));
}

bool Colouring::two_valued() const {
    for (double v : density)
        if (v != 0.0 && v != 1.0) return false;
    return true;
}

bool TimeField::reached(std::int64_t node) const {
    return std::isfinite(time[static_cast<std::size_t>(node)]);
}

// ---- IO ------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'F', 'P', 'P', 'L', 'A', 'B', '0', '1'};

template <class T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void get(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void write_field_binary(const std::string& path, const GridSpec& g,
                        std::span<const double> values, PayloadKind kind) {
    if (static_cast<std::int64_t>(values.size()) != g.node_count())
        throw std::invalid_argument("value count does not match grid");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.write(kMagic, sizeof(kMagic));
    put(os, static_cast<std::uint32_t>(g.dim));
    put(os, static_cast<std::uint32_t>(kind));
    for (int a = 0; a < 3; ++a) put(os, g.extent[a]);
    for (int a = 0; a < 3; ++a) put(os, g.origin[a]);
    put(os, g.h);
    // Unreached-time sentinel: IEEE +inf, stated in the header so readers
    // never have to guess a magic large value.
    put(os, std::numeric_limits<double>::infinity());
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!os) throw std::runtime_error("short write to " + path);
}

ScalarField read_field_binary(const std::string& path, PayloadKind* kind_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw std::runtime_error(path + ": not a fpplab field file");
    std::uint32_t dim = 0, kind = 0;
    get(is, dim);
    get(is, kind);
    ScalarField f;
    f.grid.dim = static_cast<int>(dim);
    for (int a = 0; a < 3; ++a) get(is, f.grid.extent[a]);
    for (int a = 0; a < 3; ++a) get(is, f.grid.origin[a]);
    get(is, f.grid.h);
    double sentinel = 0;
    get(is, sentinel);
    f.grid.validate();
    f.values.resize(static_cast<std::size_t>(f.grid.node_count()));
    is.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!is) throw std::runtime_error(path + ": truncated field file");
    if (kind_out) *kind_out = static_cast<PayloadKind>(kind);
    return f;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_field_csv(const std::string& path, const GridSpec& g,
                     std::span<const double> values) {
    if (static_cast<std::int64_t>(values.size()) != g.node_count())
        throw std::invalid_argument("value count does not match grid");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << (g.dim == 2 ? "x,y,value\n" : "x,y,z,value\n");
    const std::int64_t n = g.node_count();
    for (std::int64_t k = 0; k < n; ++k) {
        auto x = g.coordinate(k);
        for (int a = 0; a < g.dim; ++a) os << format_double(x[a]) << ',';
        os << format_double(values[static_cast<std::size_t>(k)]) << '\n';
    }
}

void write_cloud_csv(const std::string& path, const PointCloud& cloud) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << (cloud.dim == 2 ? "x,y" : "x,y,z");
    if (!cloud.radii.empty()) os << ",radius";
    if (!cloud.marks.empty()) os << ",mark";
    os << '\n';
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        for (int a = 0; a < cloud.dim; ++a) {
            if (a) os << ',';
            os << format_double(cloud.points[i][a]);
        }
        if (!cloud.radii.empty()) os << ',' << format_double(cloud.radii[i]);
        if (!cloud.marks.empty()) os << ',' << format_double(cloud.marks[i]);
        os << '\n';
    }
}

}  // namespace fpp
