#include "model.hpp"

#include <cmath>
#include <stdexcept>

namespace fpp {

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::kBargmannFock: return "bargmann-fock";
        case ModelKind::kSpectralGaussian: return "spectral-gaussian";
        case ModelKind::kGaussianPsi: return "gaussian-psi";
        case ModelKind::kVoronoi: return "voronoi";
        case ModelKind::kBoolean: return "boolean";
        case ModelKind::kConformal: return "conformal";
        case ModelKind::kBernoulliLattice: return "bernoulli-lattice";
        case ModelKind::kConstant: return "constant";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(const std::string& s) {
    for (ModelKind k :
         {ModelKind::kBargmannFock, ModelKind::kSpectralGaussian, ModelKind::kGaussianPsi,
          ModelKind::kVoronoi, ModelKind::kBoolean, ModelKind::kConformal,
          ModelKind::kBernoulliLattice, ModelKind::kConstant})
        if (s == model_kind_name(k)) return k;
    return std::nullopt;
}

void ModelSpec::validate() const {
    if (dim != 2 && dim != 3) throw std::invalid_argument("model.dim must be 2 or 3");
    if (!is_lattice() && !(h > 0)) throw std::invalid_argument("grid.h must be > 0");
    switch (kind) {
        case ModelKind::kBargmannFock:
            if (dim != 2)
                throw std::invalid_argument("model.dim: the Bargmann-Fock series is 2D only");
            if (!(truncation_tol > 0))
                throw std::invalid_argument("model.truncation_tol must be > 0");
            break;
        case ModelKind::kSpectralGaussian:
        case ModelKind::kGaussianPsi:
            kernel.validate();
            if (kind == ModelKind::kGaussianPsi) validate_psi(psi);
            break;
        case ModelKind::kConformal:
            kernel.validate();
            validate_phi(phi);
            break;
        case ModelKind::kVoronoi:
            if (!(p >= 0 && p <= 1)) throw std::invalid_argument("model.p must lie in [0,1]");
            if (!(lambda > 0)) throw std::invalid_argument("model.lambda must be > 0");
            break;
        case ModelKind::kBoolean:
            if (!(lambda >= 0)) throw std::invalid_argument("model.lambda must be >= 0");
            radius.validate();
            break;
        case ModelKind::kBernoulliLattice:
            law.validate();
            break;
        case ModelKind::kConstant:
            if (!(constant_value >= 0))
                throw std::invalid_argument("model.value must be >= 0");
            break;
    }
}

GridSpec grid_for_box(const ModelSpec& m, const Box& domain) {
    GridSpec g;
    g.dim = m.dim;
    g.h = m.h;
    for (int a = 0; a < m.dim; ++a) {
        const auto lo = static_cast<std::int64_t>(std::floor(domain.lo[a] / m.h + 1e-9));
        const auto hi = static_cast<std::int64_t>(std::ceil(domain.hi[a] / m.h - 1e-9));
        g.origin[a] = m.h * static_cast<double>(lo);
        g.extent[a] = hi - lo + 1;
    }
    g.validate(m.node_budget);
    return g;
}

ScalarField realize_field(const ModelSpec& m, const Box& domain, std::uint64_t master,
                          std::uint32_t replica, const std::string& label) {
    const GridSpec g = grid_for_box(m, domain);
    const RngSeed seed{master, replica, label + "/field"};
    switch (m.kind) {
        case ModelKind::kBargmannFock: {
            int N = m.truncation;
            if (N < 0)
                N = required_truncation(worst_corner_radius(g), m.truncation_tol);
            return sample_bargmann_fock(g, N, seed, m.truncation_tol);
        }
        case ModelKind::kSpectralGaussian:
        case ModelKind::kGaussianPsi:
        case ModelKind::kConformal:
            return sample_stationary_spectral(g, m.kernel, seed);
        default:
            throw std::invalid_argument(std::string("model ") + model_kind_name(m.kind) +
                                        " has no underlying field");
    }
}

Colouring colouring_from_field(const ModelSpec& m, const ScalarField& f) {
    switch (m.kind) {
        case ModelKind::kBargmannFock:
        case ModelKind::kSpectralGaussian:
            return sign_colouring(f, m.level);
        case ModelKind::kGaussianPsi:
            return psi_density(f, m.level, m.psi);
        case ModelKind::kConformal:
            return conformal_density(f, m.phi);
        default:
            throw std::invalid_argument("not a field-based model");
    }
}

PointCloud realize_cloud(const ModelSpec& m, const Box& domain, std::uint64_t master,
                         std::uint32_t replica, const std::string& label) {
    const GridSpec g = grid_for_box(m, domain);
    double margin = 0;
    if (m.kind == ModelKind::kVoronoi)
        margin = voronoi_margin(m.dim, m.lambda);
    else if (m.kind == ModelKind::kBoolean)
        margin = m.radius.quantile(1.0 - 1e-9);
    else
        throw std::invalid_argument("not a point-based model");
    const Box region = g.bounding_box().padded(margin);
    return sample_poisson(region, m.lambda, RngSeed{master, replica, label + "/cloud"});
}

Colouring realize_colouring(const ModelSpec& m, const Box& domain, std::uint64_t master,
                            std::uint32_t replica, const std::string& label) {
    m.validate();
    switch (m.kind) {
        case ModelKind::kBargmannFock:
        case ModelKind::kSpectralGaussian:
        case ModelKind::kGaussianPsi:
        case ModelKind::kConformal:
            return colouring_from_field(m, realize_field(m, domain, master, replica, label));
        case ModelKind::kVoronoi: {
            const auto cloud = realize_cloud(m, domain, master, replica, label);
            if (cloud.points.empty())
                throw std::runtime_error("Voronoi cloud came out empty; raise lambda");
            return voronoi_colouring(cloud, m.p, grid_for_box(m, domain),
                                     RngSeed{master, replica, label});
        }
        case ModelKind::kBoolean: {
            const auto cloud = realize_cloud(m, domain, master, replica, label);
            return boolean_colouring(cloud, m.radius, grid_for_box(m, domain),
                                     RngSeed{master, replica, label});
        }
        case ModelKind::kConstant:
            return constant_colouring(grid_for_box(m, domain), m.constant_value);
        case ModelKind::kBernoulliLattice:
            throw std::invalid_argument(
                "bernoulli-lattice realizes edge weights, not a grid colouring");
    }
    throw std::logic_error("unreachable");
}

EdgeWeights realize_lattice(const ModelSpec& m, const std::array<std::int64_t, 3>& lo,
                            const std::array<std::int64_t, 3>& extent, std::uint64_t master,
                            std::uint32_t replica, const std::string& label) {
    m.validate();
    if (!m.is_lattice()) throw std::invalid_argument("not a lattice model");
    std::int64_t count = 1;
    for (int a = 0; a < m.dim; ++a) count *= extent[a];
    if (count > m.node_budget)
        throw std::length_error("lattice vertex count exceeds node budget");
    return bernoulli_edge_weights(m.dim, lo, extent, m.law,
                                  RngSeed{master, replica, label + "/weights"});
}

EdgeWeights realize_lattice_centered(const ModelSpec& m, std::int64_t L, std::uint64_t master,
                                     std::uint32_t replica, const std::string& label) {
    std::array<std::int64_t, 3> lo{-L, -L, m.dim == 3 ? -L : 0};
    std::array<std::int64_t, 3> ext{2 * L + 1, 2 * L + 1, m.dim == 3 ? 2 * L + 1 : 1};
    return realize_lattice(m, lo, ext, master, replica, label);
}

}  // namespace fpp
