#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "colourings.hpp"
#include "fields.hpp"
#include "grid.hpp"

namespace fpp {

enum class ModelKind {
    kBargmannFock,
    kSpectralGaussian,
    kGaussianPsi,
    kVoronoi,
    kBoolean,
    kConformal,
    kBernoulliLattice,
    kConstant,
};

const char* model_kind_name(ModelKind k);
std::optional<ModelKind> parse_model_kind(const std::string& s);

/// Everything needed to realize one replica of a model on a requested
/// domain. Continuum models rasterize at spacing h; the Bernoulli lattice
/// ignores h (spacing 1).
struct ModelSpec {
    ModelKind kind = ModelKind::kConstant;
    int dim = 2;
    double h = 0.25;

    double level = 0.0;           // Gaussian level p (sign/psi models)
    double p = 0.5;               // Voronoi white probability / Bernoulli zero probability
    double lambda = 1.0;          // Poisson intensity
    double constant_value = 1.0;  // constant model

    KernelSpec kernel;            // spectral-gaussian / gaussian-psi / conformal
    int truncation = -1;          // Bargmann-Fock; -1 = minimal admissible
    double truncation_tol = 1e-6;
    MonotoneMapSpec psi{MonotoneMapSpec::Kind::kIndicator};
    MonotoneMapSpec phi{MonotoneMapSpec::Kind::kExp};
    RadiusLaw radius;
    WeightLaw law;

    std::int64_t node_budget = GridSpec::kDefaultNodeBudget;

    bool is_lattice() const { return kind == ModelKind::kBernoulliLattice; }
    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Grid covering the box, nodes on multiples of h so a box symmetric about 0
/// carries a node exactly at the origin.
GridSpec grid_for_box(const ModelSpec& m, const Box& domain);

/// One replica of a continuum model rasterized over `domain`. The RNG stream
/// is (master, replica, label); monotone couplings across level/p/lambda come
/// from shared streams, so callers vary those parameters while keeping
/// (master, replica, label) fixed.
Colouring realize_colouring(const ModelSpec& m, const Box& domain, std::uint64_t master,
                            std::uint32_t replica, const std::string& label);

/// The Gaussian field behind a field-based model (useful for coupled-level
/// experiments and for the sample command). Throws for point/lattice models.
ScalarField realize_field(const ModelSpec& m, const Box& domain, std::uint64_t master,
                          std::uint32_t replica, const std::string& label);

/// Colouring derived from an already-sampled field (level/psi/phi applied).
Colouring colouring_from_field(const ModelSpec& m, const ScalarField& f);

/// The Poisson cloud behind a point-based model, margin already applied.
PointCloud realize_cloud(const ModelSpec& m, const Box& domain, std::uint64_t master,
                         std::uint32_t replica, const std::string& label);

/// One replica of the lattice model on vertices lo..lo+extent-1.
EdgeWeights realize_lattice(const ModelSpec& m, const std::array<std::int64_t, 3>& lo,
                            const std::array<std::int64_t, 3>& extent, std::uint64_t master,
                            std::uint32_t replica, const std::string& label);

/// Lattice box [-L, L]^d.
EdgeWeights realize_lattice_centered(const ModelSpec& m, std::int64_t L, std::uint64_t master,
                                     std::uint32_t replica, const std::string& label);

}  // namespace fpp
