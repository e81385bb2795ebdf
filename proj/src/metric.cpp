#include "metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace fpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double round_up_26bit(double v) {
    // v in [1,2): quantize the mantissa to 26 bits, away from zero.
    return std::ceil(v * 0x1.0p25) * 0x1.0p-25;
}

struct Step {
    std::int64_t node_delta;
    std::array<int, 3> d;
    double half_length;  // step length * h / 2, premultiplied for the trapezoid rule
};

/// Neighbourhood of the grid graph in a fixed deterministic order.
std::vector<Step> make_steps(const GridSpec& g) {
    const double s2 = diag_step_2d();
    const double s3 = diag_step_3d();
    std::vector<Step> steps;
    const int zlo = g.dim == 3 ? -1 : 0;
    const int zhi = g.dim == 3 ? 1 : 0;
    for (int dz = zlo; dz <= zhi; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int nz = std::abs(dx) + std::abs(dy) + std::abs(dz);
                if (nz == 0) continue;
                double f = nz == 1 ? 1.0 : (nz == 2 ? s2 : s3);
                Step s;
                s.d = {dx, dy, dz};
                s.node_delta = dx + g.extent[0] * (dy + (g.dim == 3 ? g.extent[1] * dz : 0));
                s.half_length = 0.5 * g.h * f;
                steps.push_back(s);
            }
    return steps;
}

struct QueueEntry {
    double dist;
    std::int64_t node;
    bool operator>(const QueueEntry& o) const {
        if (dist != o.dist) return dist > o.dist;
        return node > o.node;
    }
};

using MinQueue =
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>>;

TimeField run_dijkstra(const Colouring& sigma, std::span<const std::int64_t> sources,
                       double t_max, const std::vector<char>* stop_mask,
                       double* first_stop_time) {
    const GridSpec& g = sigma.grid;
    const std::int64_t n = g.node_count();
    if (sources.empty()) throw std::invalid_argument("source set is empty");
    for (auto s : sources)
        if (s < 0 || s >= n) throw std::invalid_argument("source node outside grid");

    TimeField out;
    out.grid = g;
    out.time.assign(static_cast<std::size_t>(n), kInf);
    out.sources.assign(sources.begin(), sources.end());

    const auto steps = make_steps(g);
    std::vector<char> settled(static_cast<std::size_t>(n), 0);
    MinQueue queue;
    for (auto s : sources) {
        out.time[static_cast<std::size_t>(s)] = 0.0;
        queue.push({0.0, s});
    }

    while (!queue.empty()) {
        const auto [dist, u] = queue.top();
        queue.pop();
        if (settled[static_cast<std::size_t>(u)]) continue;
        if (dist > t_max) break;
        settled[static_cast<std::size_t>(u)] = 1;
        if (stop_mask && (*stop_mask)[static_cast<std::size_t>(u)]) {
            if (first_stop_time) *first_stop_time = dist;
            return out;
        }
        const auto mu = g.multi_index(u);
        const double su = sigma.density[static_cast<std::size_t>(u)];
        for (const Step& st : steps) {
            const std::array<std::int64_t, 3> mv{mu[0] + st.d[0], mu[1] + st.d[1],
                                                 mu[2] + st.d[2]};
            if (!g.in_bounds(mv)) continue;
            const std::int64_t v = u + st.node_delta;
            if (settled[static_cast<std::size_t>(v)]) continue;
            const double w = st.half_length * (su + sigma.density[static_cast<std::size_t>(v)]);
            const double cand = dist + w;
            if (cand < out.time[static_cast<std::size_t>(v)]) {
                out.time[static_cast<std::size_t>(v)] = cand;
                queue.push({cand, v});
            }
        }
    }
    // Anything never settled stays at the +inf marker.
    for (std::int64_t k = 0; k < n; ++k)
        if (!settled[static_cast<std::size_t>(k)]) out.time[static_cast<std::size_t>(k)] = kInf;
    return out;
}

}  // namespace

double diag_step_2d() {
    static const double v = round_up_26bit(std::sqrt(2.0));
    return v;
}

double diag_step_3d() {
    static const double v = round_up_26bit(std::sqrt(3.0));
    return v;
}

std::vector<std::int64_t> shell_nodes(const GridSpec& g,
                                      const std::array<double, 3>& center,
                                      double radius) {
    if (!(radius > 0)) throw std::invalid_argument("shell radius must be > 0");
    const double tol = g.h * std::sqrt(static_cast<double>(g.dim)) / 2.0;
    std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        lo[a] = std::max<std::int64_t>(
            0, static_cast<std::int64_t>(std::floor((center[a] - radius - tol - g.origin[a]) / g.h)));
        hi[a] = std::min<std::int64_t>(
            g.extent[a] - 1,
            static_cast<std::int64_t>(std::ceil((center[a] + radius + tol - g.origin[a]) / g.h)));
    }
    std::vector<std::int64_t> shell;
    std::array<std::int64_t, 3> m{0, 0, 0};
    const std::int64_t zlo = g.dim == 3 ? lo[2] : 0;
    const std::int64_t zhi = g.dim == 3 ? hi[2] : 0;
    for (std::int64_t z = zlo; z <= zhi; ++z)
        for (std::int64_t y = lo[1]; y <= hi[1]; ++y)
            for (std::int64_t x = lo[0]; x <= hi[0]; ++x) {
                m = {x, y, z};
                double r2 = 0;
                for (int a = 0; a < g.dim; ++a) {
                    const double dx = g.origin[a] + g.h * static_cast<double>(m[a]) - center[a];
                    r2 += dx * dx;
                }
                if (std::abs(std::sqrt(r2) - radius) <= tol) shell.push_back(g.flat_index(m));
            }
    std::sort(shell.begin(), shell.end());
    return shell;
}

TimeField shortest_time(const Colouring& sigma, std::span<const std::int64_t> sources) {
    return run_dijkstra(sigma, sources, kInf, nullptr, nullptr);
}

TimeField shortest_time_truncated(const Colouring& sigma,
                                  std::span<const std::int64_t> sources, double t_max) {
    return run_dijkstra(sigma, sources, t_max, nullptr, nullptr);
}

double point_time(const Colouring& sigma, std::int64_t x, std::int64_t y) {
    const std::int64_t a = std::min(x, y), b = std::max(x, y);
    std::vector<char> stop(static_cast<std::size_t>(sigma.grid.node_count()), 0);
    stop[static_cast<std::size_t>(b)] = 1;
    double t = a == b ? 0.0 : kInf;
    const std::int64_t src[1] = {a};
    run_dijkstra(sigma, src, kInf, &stop, &t);
    if (a == b) return 0.0;
    return t;
}

namespace {

struct Shells {
    std::vector<std::int64_t> inner, outer;
};

Shells annulus_shells(const GridSpec& g, const AnnulusSpec& an) {
    if (!(0 < an.inner && an.inner < an.outer))
        throw std::invalid_argument("annulus requires 0 < inner < outer");
    Shells s;
    s.inner = shell_nodes(g, an.center, an.inner);
    s.outer = shell_nodes(g, an.center, an.outer);
    if (s.inner.empty() || s.outer.empty())
        throw std::invalid_argument("annulus shell discretization is empty");
    // Overlapping shells would make T(A) = 0 for free; the annulus is too
    // thin for this grid spacing.
    if (an.outer - an.inner <= g.h * std::sqrt(static_cast<double>(g.dim)))
        throw std::invalid_argument("annulus too thin for grid spacing");
    return s;
}

}  // namespace

double annulus_time(const Colouring& sigma, const AnnulusSpec& annulus) {
    const auto shells = annulus_shells(sigma.grid, annulus);
    std::vector<char> stop(static_cast<std::size_t>(sigma.grid.node_count()), 0);
    for (auto v : shells.outer) stop[static_cast<std::size_t>(v)] = 1;
    double t = kInf;
    run_dijkstra(sigma, shells.inner, kInf, &stop, &t);
    if (!std::isfinite(t)) throw std::runtime_error("outer shell unreachable");
    return t;
}

bool annulus_zero_crossing(const Colouring& sigma, const AnnulusSpec& annulus) {
    const GridSpec& g = sigma.grid;
    const auto shells = annulus_shells(g, annulus);
    std::vector<char> outer_mask(static_cast<std::size_t>(g.node_count()), 0);
    for (auto v : shells.outer) outer_mask[static_cast<std::size_t>(v)] = 1;

    const auto steps = make_steps(g);
    std::vector<char> visited(static_cast<std::size_t>(g.node_count()), 0);
    std::vector<std::int64_t> stack;
    for (auto v : shells.inner)
        if (sigma.density[static_cast<std::size_t>(v)] == 0.0) {
            stack.push_back(v);
            visited[static_cast<std::size_t>(v)] = 1;
        }
    while (!stack.empty()) {
        const std::int64_t u = stack.back();
        stack.pop_back();
        if (outer_mask[static_cast<std::size_t>(u)]) return true;
        const auto mu = g.multi_index(u);
        for (const Step& st : steps) {
            const std::array<std::int64_t, 3> mv{mu[0] + st.d[0], mu[1] + st.d[1],
                                                 mu[2] + st.d[2]};
            if (!g.in_bounds(mv)) continue;
            const std::int64_t v = u + st.node_delta;
            if (visited[static_cast<std::size_t>(v)]) continue;
            if (sigma.density[static_cast<std::size_t>(v)] != 0.0) continue;
            visited[static_cast<std::size_t>(v)] = 1;
            stack.push_back(v);
        }
    }
    return false;
}

bool rect_crossing(const Colouring& sigma, const RectSpec& rect, int colour) {
    const GridSpec& g = sigma.grid;
    if (colour != 0 && colour != 1) throw std::invalid_argument("colour must be 0 or 1");
    if (rect.axis < 0 || rect.axis >= g.dim)
        throw std::invalid_argument("crossing axis outside dimension");
    if (!sigma.two_valued())
        throw std::invalid_argument("rect_crossing requires a two-valued colouring");

    std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        lo[a] = static_cast<std::int64_t>(std::ceil((rect.box.lo[a] - g.origin[a]) / g.h - 1e-9));
        hi[a] = static_cast<std::int64_t>(std::floor((rect.box.hi[a] - g.origin[a]) / g.h + 1e-9));
        if (lo[a] < 0 || hi[a] >= g.extent[a] || lo[a] > hi[a])
            throw std::invalid_argument("rectangle does not fit the grid");
    }
    const double want = static_cast<double>(colour);
    const auto steps = make_steps(g);
    std::vector<char> visited(static_cast<std::size_t>(g.node_count()), 0);
    std::vector<std::int64_t> stack;

    auto for_face = [&](std::int64_t face_coord, auto&& fn) {
        std::array<std::int64_t, 3> m{0, 0, 0};
        m[rect.axis] = face_coord;
        const int a1 = rect.axis == 0 ? 1 : 0;
        const int a2 = g.dim == 3 ? (rect.axis == 2 ? 1 : 2) : a1;
        for (std::int64_t i = lo[a1]; i <= hi[a1]; ++i) {
            m[a1] = i;
            if (g.dim == 3) {
                for (std::int64_t j = lo[a2]; j <= hi[a2]; ++j) {
                    m[a2] = j;
                    fn(g.flat_index(m));
                }
            } else {
                fn(g.flat_index(m));
            }
        }
    };

    for_face(lo[rect.axis], [&](std::int64_t v) {
        if (sigma.density[static_cast<std::size_t>(v)] == want) {
            visited[static_cast<std::size_t>(v)] = 1;
            stack.push_back(v);
        }
    });
    std::vector<char> target(static_cast<std::size_t>(g.node_count()), 0);
    for_face(hi[rect.axis], [&](std::int64_t v) { target[static_cast<std::size_t>(v)] = 1; });

    while (!stack.empty()) {
        const std::int64_t u = stack.back();
        stack.pop_back();
        if (target[static_cast<std::size_t>(u)]) return true;
        const auto mu = g.multi_index(u);
        for (const Step& st : steps) {
            std::array<std::int64_t, 3> mv{mu[0] + st.d[0], mu[1] + st.d[1], mu[2] + st.d[2]};
            bool inside = true;
            for (int a = 0; a < g.dim; ++a)
                if (mv[a] < lo[a] || mv[a] > hi[a]) inside = false;
            if (!inside) continue;
            const std::int64_t v = u + st.node_delta;
            if (visited[static_cast<std::size_t>(v)]) continue;
            if (sigma.density[static_cast<std::size_t>(v)] != want) continue;
            visited[static_cast<std::size_t>(v)] = 1;
            stack.push_back(v);
        }
    }
    return false;
}

// ---- lattice -------------------------------------------------------------

std::array<std::int64_t, 3> EdgeWeights::coords(std::int64_t v) const {
    std::array<std::int64_t, 3> c{0, 0, 0};
    c[0] = lo[0] + v % extent[0];
    v /= extent[0];
    c[1] = lo[1] + v % extent[1];
    if (dim == 3) c[2] = lo[2] + v / extent[1];
    return c;
}

std::int64_t EdgeWeights::vertex_at(const std::array<std::int64_t, 3>& c) const {
    std::int64_t v = 0, stride = 1;
    for (int a = 0; a < dim; ++a) {
        const std::int64_t m = c[a] - lo[a];
        if (m < 0 || m >= extent[a]) return -1;
        v += m * stride;
        stride *= extent[a];
    }
    return v;
}

std::vector<double> lattice_shortest_time(const EdgeWeights& w, std::int64_t source) {
    const std::int64_t n = w.vertex_count();
    if (source < 0 || source >= n) throw std::invalid_argument("source outside lattice");
    if (static_cast<std::int64_t>(w.weights.size()) != n * w.dim)
        throw std::invalid_argument("edge weight array has wrong size");
    std::vector<double> dist(static_cast<std::size_t>(n), kInf);
    std::vector<char> settled(static_cast<std::size_t>(n), 0);
    MinQueue queue;
    dist[static_cast<std::size_t>(source)] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (settled[static_cast<std::size_t>(u)]) continue;
        settled[static_cast<std::size_t>(u)] = 1;
        const auto cu = w.coords(u);
        for (int a = 0; a < w.dim; ++a) {
            for (int sgn = 0; sgn < 2; ++sgn) {
                auto cv = cu;
                cv[a] += sgn == 0 ? 1 : -1;
                const std::int64_t v = w.vertex_at(cv);
                if (v < 0 || settled[static_cast<std::size_t>(v)]) continue;
                const std::int64_t owner = sgn == 0 ? u : v;
                const double we = w.weights[static_cast<std::size_t>(owner * w.dim + a)];
                const double cand = d + we;
                if (cand < dist[static_cast<std::size_t>(v)]) {
                    dist[static_cast<std::size_t>(v)] = cand;
                    queue.push({cand, v});
                }
            }
        }
    }
    return dist;
}

std::vector<std::int64_t> lattice_shell(const EdgeWeights& w,
                                        const std::array<double, 3>& center,
                                        double radius) {
    const double tol = std::sqrt(static_cast<double>(w.dim)) / 2.0;
    std::vector<std::int64_t> shell;
    const std::int64_t n = w.vertex_count();
    for (std::int64_t v = 0; v < n; ++v) {
        const auto c = w.coords(v);
        double r2 = 0;
        for (int a = 0; a < w.dim; ++a) {
            const double dx = static_cast<double>(c[a]) - center[a];
            r2 += dx * dx;
        }
        if (std::abs(std::sqrt(r2) - radius) <= tol) shell.push_back(v);
    }
    return shell;
}

namespace {

struct LatticeShells {
    std::vector<std::int64_t> inner, outer;
};

LatticeShells lattice_annulus_shells(const EdgeWeights& w, const AnnulusSpec& an) {
    if (!(0 < an.inner && an.inner < an.outer))
        throw std::invalid_argument("annulus requires 0 < inner < outer");
    LatticeShells s;
    s.inner = lattice_shell(w, an.center, an.inner);
    s.outer = lattice_shell(w, an.center, an.outer);
    if (s.inner.empty() || s.outer.empty())
        throw std::invalid_argument("lattice annulus shell is empty");
    if (an.outer - an.inner <= std::sqrt(static_cast<double>(w.dim)))
        throw std::invalid_argument("lattice annulus too thin");
    return s;
}

}  // namespace

double lattice_annulus_time(const EdgeWeights& w, const AnnulusSpec& annulus) {
    const auto shells = lattice_annulus_shells(w, annulus);
    const std::int64_t n = w.vertex_count();
    std::vector<double> dist(static_cast<std::size_t>(n), kInf);
    std::vector<char> settled(static_cast<std::size_t>(n), 0);
    std::vector<char> stop(static_cast<std::size_t>(n), 0);
    for (auto v : shells.outer) stop[static_cast<std::size_t>(v)] = 1;
    MinQueue queue;
    for (auto v : shells.inner) {
        dist[static_cast<std::size_t>(v)] = 0.0;
        queue.push({0.0, v});
    }
    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (settled[static_cast<std::size_t>(u)]) continue;
        settled[static_cast<std::size_t>(u)] = 1;
        if (stop[static_cast<std::size_t>(u)]) return d;
        const auto cu = w.coords(u);
        for (int a = 0; a < w.dim; ++a) {
            for (int sgn = 0; sgn < 2; ++sgn) {
                auto cv = cu;
                cv[a] += sgn == 0 ? 1 : -1;
                const std::int64_t v = w.vertex_at(cv);
                if (v < 0 || settled[static_cast<std::size_t>(v)]) continue;
                const std::int64_t owner = sgn == 0 ? u : v;
                const double we = w.weights[static_cast<std::size_t>(owner * w.dim + a)];
                const double cand = d + we;
                if (cand < dist[static_cast<std::size_t>(v)]) {
                    dist[static_cast<std::size_t>(v)] = cand;
                    queue.push({cand, v});
                }
            }
        }
    }
    throw std::runtime_error("outer lattice shell unreachable");
}

bool lattice_annulus_zero_crossing(const EdgeWeights& w, const AnnulusSpec& annulus) {
    const auto shells = lattice_annulus_shells(w, annulus);
    const std::int64_t n = w.vertex_count();
    std::vector<char> outer(static_cast<std::size_t>(n), 0);
    for (auto v : shells.outer) outer[static_cast<std::size_t>(v)] = 1;
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    std::vector<std::int64_t> stack;
    for (auto v : shells.inner) {
        visited[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
    }
    while (!stack.empty()) {
        const std::int64_t u = stack.back();
        stack.pop_back();
        if (outer[static_cast<std::size_t>(u)]) return true;
        const auto cu = w.coords(u);
        for (int a = 0; a < w.dim; ++a) {
            for (int sgn = 0; sgn < 2; ++sgn) {
                auto cv = cu;
                cv[a] += sgn == 0 ? 1 : -1;
                const std::int64_t v = w.vertex_at(cv);
                if (v < 0 || visited[static_cast<std::size_t>(v)]) continue;
                const std::int64_t owner = sgn == 0 ? u : v;
                if (w.weights[static_cast<std::size_t>(owner * w.dim + a)] != 0.0) continue;
                visited[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
        }
    }
    return false;
}

}  // namespace fpp
