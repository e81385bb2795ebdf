#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fpp {

/// Axis-aligned box in R^d. Unused axes keep lo = hi = 0.
struct Box {
    int dim = 2;
    std::array<double, 3> lo{0, 0, 0};
    std::array<double, 3> hi{0, 0, 0};

    double side(int axis) const { return hi[axis] - lo[axis]; }
    double volume() const;
    /// Box grown by m on every side.
    Box padded(double m) const;
};

/// Regular node grid in dimension 2 or 3. Node k has coordinate
/// origin + h * multi_index(k), row-major with axis 0 fastest.
struct GridSpec {
    int dim = 2;
    std::array<double, 3> origin{0, 0, 0};
    double h = 1.0;
    std::array<std::int64_t, 3> extent{1, 1, 1};  // nodes per axis; 1 on unused axes

    std::int64_t node_count() const {
        std::int64_t n = 1;
        for (int a = 0; a < dim; ++a) n *= extent[a];
        return n;
    }

    std::array<std::int64_t, 3> multi_index(std::int64_t node) const {
        std::array<std::int64_t, 3> m{0, 0, 0};
        m[0] = node % extent[0];
        node /= extent[0];
        m[1] = node % extent[1];
        if (dim == 3) m[2] = node / extent[1];
        return m;
    }

    std::int64_t flat_index(std::span<const std::int64_t> m) const {
        std::int64_t k = m[0] + extent[0] * m[1];
        if (dim == 3) k += extent[0] * extent[1] * m[2];
        return k;
    }

    std::array<double, 3> coordinate(std::int64_t node) const {
        auto m = multi_index(node);
        std::array<double, 3> x{0, 0, 0};
        for (int a = 0; a < dim; ++a) x[a] = origin[a] + h * static_cast<double>(m[a]);
        return x;
    }

    bool in_bounds(std::span<const std::int64_t> m) const {
        for (int a = 0; a < dim; ++a)
            if (m[a] < 0 || m[a] >= extent[a]) return false;
        return true;
    }

    /// Nearest node to a continuum point; throws if outside the grid.
    std::int64_t nearest_node(const std::array<double, 3>& x) const;

    Box bounding_box() const;
    bool same_geometry(const GridSpec& o) const;

    /// Throws std::invalid_argument if the spec is malformed or exceeds the
    /// node budget.
    void validate(std::int64_t node_budget = kDefaultNodeBudget) const;

    static constexpr std::int64_t kDefaultNodeBudget = std::int64_t(1) << 25;
};

struct ScalarField {
    GridSpec grid;
    std::vector<double> values;
};

enum class ModelTag {
    kGaussianSign,
    kGaussianPsi,
    kVoronoi,
    kBoolean,
    kConformal,
    kConstant,
};

/// Nonnegative density sigma on a grid. Colouring-type models keep
/// density values in {0,1}.
struct Colouring {
    GridSpec grid;
    std::vector<double> density;
    ModelTag tag = ModelTag::kConstant;

    bool two_valued() const;
};

struct TimeField {
    GridSpec grid;
    std::vector<double> time;  // +inf marks unreached nodes
    std::vector<std::int64_t> sources;

    bool reached(std::int64_t node) const;
};

/// Poisson point process realization; marks are per-point uniforms used for
/// cell colours / thinning, radii are optional Boolean ball radii.
struct PointCloud {
    int dim = 2;
    Box region;
    double intensity = 0.0;
    std::vector<std::array<double, 3>> points;
    std::vector<double> marks;  // same length as points when nonempty
    std::vector<double> radii;  // same length as points when nonempty
};

// ---- binary / CSV export ----------------------------------------------
// Flat binary layout: 24-byte magic+version header, GridSpec fields, a
// payload-kind tag and the +inf sentinel for times, then node values as
// row-major little-endian 64-bit floats.

enum class PayloadKind : std::uint32_t { kField = 0, kColouring = 1, kTime = 2 };

void write_field_binary(const std::string& path, const GridSpec& g,
                        std::span<const double> values, PayloadKind kind);
ScalarField read_field_binary(const std::string& path, PayloadKind* kind_out = nullptr);

void write_field_csv(const std::string& path, const GridSpec& g,
                     std::span<const double> values);
void write_cloud_csv(const std::string& path, const PointCloud& cloud);

/// Round-trip-safe decimal formatting used by every CSV writer.
std::string format_double(double v);

}  // namespace fpp
