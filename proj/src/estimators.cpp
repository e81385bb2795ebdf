#include "estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "metric.hpp"

namespace fpp {

void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int k = static_cast<int>(std::min<std::int64_t>(threads, n));
    pool.reserve(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

namespace {

std::array<double, 3> normalized(std::array<double, 3> v, int dim) {
    double n2 = 0;
    for (int a = 0; a < dim; ++a) n2 += v[a] * v[a];
    if (!(n2 > 0)) throw std::invalid_argument("direction must be nonzero");
    const double inv = 1.0 / std::sqrt(n2);
    for (int a = 0; a < dim; ++a) v[a] *= inv;
    for (int a = dim; a < 3; ++a) v[a] = 0;
    return v;
}

Box centered_box(int dim, double half_extent) {
    Box b;
    b.dim = dim;
    for (int a = 0; a < dim; ++a) {
        b.lo[a] = -half_extent;
        b.hi[a] = half_extent;
    }
    return b;
}

double binom_exact(std::int64_t N, std::int64_t n) {
    double r = 1;
    for (std::int64_t i = 1; i <= n; ++i)
        r *= static_cast<double>(N - n + i) / static_cast<double>(i);
    return r;
}

}  // namespace

// ---- estimate_mu -------------------------------------------------------------

MuCurve estimate_mu(const ModelSpec& m, std::array<double, 3> v,
                    const std::vector<double>& n_list, double half_extent,
                    const EstimatorOptions& opt) {
    m.validate();
    if (opt.replicas < 2) throw std::invalid_argument("mu needs at least 2 replicas");
    if (n_list.empty()) throw std::invalid_argument("mu.n list is empty");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (!(n_list[i] > n_list[i - 1]))
            throw std::invalid_argument("mu.n must be strictly increasing");
    v = normalized(v, m.dim);

    MuCurve curve;
    curve.direction = v;
    const std::string prefix = opt.stream_prefix.empty() ? "mu" : opt.stream_prefix;

    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const double n = n_list[ni];
        for (int a = 0; a < m.dim; ++a)
            if (std::abs(v[a]) * n / 2 > half_extent - std::max(1.0, m.is_lattice() ? 1.0 : m.h))
                throw std::invalid_argument(
                    "domain too small: target n=" + format_double(n) +
                    " leaves no safe margin inside half extent " + format_double(half_extent));

        const std::string label = prefix + "/n" + std::to_string(ni);
        std::vector<double> values(static_cast<std::size_t>(opt.replicas));
        if (m.is_lattice()) {
            const auto L = static_cast<std::int64_t>(std::ceil(half_extent));
            parallel_for(opt.replicas, opt.threads, [&](std::int64_t r) {
                const auto w = realize_lattice_centered(m, L, opt.seed,
                                                        static_cast<std::uint32_t>(r), label);
                // target = source + round(n v): the separation is exactly the
                // rounded displacement even when n/2 is fractional
                std::array<std::int64_t, 3> ca{0, 0, 0}, cb{0, 0, 0};
                for (int a = 0; a < m.dim; ++a) {
                    ca[a] = std::llround(-v[a] * n / 2);
                    cb[a] = ca[a] + std::llround(v[a] * n);
                }
                const auto src = w.vertex_at(ca);
                const auto dst = w.vertex_at(cb);
                const auto dist = lattice_shortest_time(w, src);
                values[static_cast<std::size_t>(r)] = dist[static_cast<std::size_t>(dst)] / n;
            });
        } else {
            const Box domain = centered_box(m.dim, half_extent);
            parallel_for(opt.replicas, opt.threads, [&](std::int64_t r) {
                const auto sigma =
                    realize_colouring(m, domain, opt.seed, static_cast<std::uint32_t>(r), label);
                std::array<double, 3> xa{0, 0, 0}, xb{0, 0, 0};
                for (int a = 0; a < m.dim; ++a) {
                    xa[a] = -v[a] * n / 2;
                    xb[a] = v[a] * n / 2;
                }
                const auto src = sigma.grid.nearest_node(xa);
                const auto dst = sigma.grid.nearest_node(xb);
                values[static_cast<std::size_t>(r)] = point_time(sigma, src, dst) / n;
            });
        }
        MuPoint pt;
        pt.n = n;
        pt.est = mean_estimate(values);
        pt.est.master_seed = opt.seed;
        pt.est.stream = label;
        curve.points.push_back(std::move(pt));
    }

    // Subadditive consistency on every (n, m, n+m) triple present in the list.
    for (std::size_t i = 0; i < n_list.size() && curve.subadditive_ok; ++i)
        for (std::size_t j = i; j < n_list.size() && curve.subadditive_ok; ++j) {
            const double sum = n_list[i] + n_list[j];
            for (std::size_t k = 0; k < n_list.size(); ++k) {
                if (n_list[k] != sum) continue;
                const auto &ei = curve.points[i].est, &ej = curve.points[j].est,
                           &ek = curve.points[k].est;
                const double wi = n_list[i] / sum, wj = n_list[j] / sum;
                const double bound = ei.mean * wi + ej.mean * wj;
                const double se = std::sqrt(ei.stderr_ * ei.stderr_ * wi * wi +
                                            ej.stderr_ * ej.stderr_ * wj * wj +
                                            ek.stderr_ * ek.stderr_);
                if (ek.mean > bound + 3 * se) {
                    curve.subadditive_ok = false;
                    curve.note = "subadditivity check failed at n=" + format_double(sum);
                }
            }
        }
    return curve;
}

// ---- estimate_one_arm ----------------------------------------------------------

OneArmCurve estimate_one_arm(const ModelSpec& m, const std::vector<double>& radii,
                             double half_extent, std::size_t fit_lo, std::size_t fit_hi,
                             const EstimatorOptions& opt) {
    m.validate();
    if (radii.empty()) throw std::invalid_argument("one_arm.radii is empty");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw std::invalid_argument("one_arm.radii must be strictly increasing");
    if (radii.front() <= 1.0)
        throw std::invalid_argument("one_arm.radii must exceed the unit inner sphere");
    const double need = radii.back() + 2 * (m.is_lattice() ? 1.0 : m.h);
    if (half_extent < need)
        throw std::invalid_argument("grid.half_extent too small for largest radius (need >= " +
                                    format_double(need) + ")");

    const std::string prefix = opt.stream_prefix.empty() ? "one-arm" : opt.stream_prefix;
    const std::size_t nr = radii.size();
    std::vector<std::uint64_t> hits(nr, 0);
    std::vector<std::vector<char>> per_replica(static_cast<std::size_t>(opt.replicas));

    if (m.is_lattice()) {
        const auto L = static_cast<std::int64_t>(std::ceil(half_extent));
        parallel_for(opt.replicas, opt.threads, [&](std::int64_t r) {
            const auto w =
                realize_lattice_centered(m, L, opt.seed, static_cast<std::uint32_t>(r), prefix);
            auto& row = per_replica[static_cast<std::size_t>(r)];
            row.resize(nr);
            for (std::size_t k = 0; k < nr; ++k) {
                AnnulusSpec an;
                an.inner = 1.0;
                an.outer = radii[k];
                row[k] = lattice_annulus_zero_crossing(w, an) ? 1 : 0;
            }
        });
    } else {
        const Box domain = centered_box(m.dim, half_extent);
        parallel_for(opt.replicas, opt.threads, [&](std::int64_t r) {
            const auto sigma =
                realize_colouring(m, domain, opt.seed, static_cast<std::uint32_t>(r), prefix);
            auto& row = per_replica[static_cast<std::size_t>(r)];
            row.resize(nr);
            for (std::size_t k = 0; k < nr; ++k) {
                AnnulusSpec an;
                an.inner = 1.0;
                an.outer = radii[k];
                row[k] = annulus_zero_crossing(sigma, an) ? 1 : 0;
            }
        });
    }
    for (const auto& row : per_replica)
        for (std::size_t k = 0; k < nr; ++k) hits[k] += row[k];

    OneArmCurve curve;
    for (std::size_t k = 0; k < nr; ++k)
        curve.points.push_back(
            {radii[k], Proportion{hits[k], static_cast<std::uint64_t>(opt.replicas)}});

    // The window is the caller's choice; a wrong one is an error, not a
    // silent refit over a different range.
    if (fit_hi >= nr || fit_hi < fit_lo)
        throw std::invalid_argument("one_arm fit window [" + std::to_string(fit_lo) + "," +
                                    std::to_string(fit_hi) + "] does not match the curve");
    curve.fit_lo = fit_lo;
    curve.fit_hi = fit_hi;
    std::vector<FitPoint> pts;
    for (std::size_t k = 0; k < nr; ++k)
        pts.push_back({radii[k],
                       static_cast<double>(hits[k]) / static_cast<double>(opt.replicas),
                       static_cast<double>(opt.replicas)});
    try {
        auto fit = fit_exponent(pts, fit_lo, fit_hi);
        fit.master_seed = opt.seed;
        fit.stream = prefix;
        curve.exponent = fit;
    } catch (const std::exception& e) {
        curve.note = std::string("exponent fit refused: ") + e.what();
    }
    return curve;
}

// ---- estimate_crossing -----------------------------------------------------------

std::vector<CrossingPoint> estimate_crossing(const ModelSpec& m, const RectSpec& base,
                                             const std::vector<double>& scales, int colour,
                                             const EstimatorOptions& opt) {
    m.validate();
    if (m.is_lattice())
        throw std::invalid_argument("crossing is defined for colouring models, not the lattice");
    if (scales.empty()) throw std::invalid_argument("crossing.scales is empty");
    const std::string prefix = opt.stream_prefix.empty() ? "crossing" : opt.stream_prefix;

    std::vector<CrossingPoint> out;
    for (std::size_t si = 0; si < scales.size(); ++si) {
        const double s = scales[si];
        if (!(s > 0)) throw std::invalid_argument("crossing.scales must be positive");
        RectSpec rect = base;
        for (int a = 0; a < m.dim; ++a) {
            rect.box.lo[a] = base.box.lo[a] * s;
            rect.box.hi[a] = base.box.hi[a] * s;
            if (!(rect.box.hi[a] > rect.box.lo[a]))
                throw std::invalid_argument("crossing rectangle has empty interior");
        }
        const std::string label = prefix + "/s" + std::to_string(si);
        std::vector<char> hit(static_cast<std::size_t>(opt.replicas), 0);
        parallel_for(opt.replicas, opt.threads, [&](std::int64_t r) {
            const auto sigma = realize_colouring(m, rect.box, opt.seed,
                                                 static_cast<std::uint32_t>(r), label);
            hit[static_cast<std::size_t>(r)] = rect_crossing(sigma, rect, colour) ? 1 : 0;
        });
        std::uint64_t k = 0;
        for (char c : hit) k += c;
        out.push_back({s, Proportion{k, static_cast<std::uint64_t>(opt.replicas)}});
    }
    return out;
}

// ---- estimate_ind ------------------------------------------------------------------

IndReport estimate_ind(const ModelSpec& m, double Q, double S, double delta,
                       const EstimatorOptions& opt) {
    m.validate();
    if (!(S > 2)) throw std::invalid_argument("ind.S must exceed 2 (unit inner spheres)");
    if (Q < 0) throw std::invalid_argument("ind.Q must be >= 0");
    if (!(delta > 0)) throw std::invalid_argument("ind.delta must be > 0");
    const double Ra = S / 2;
    const double cx = Q == 0 ? 0.0 : (Q + S) / 2;
    const std::array<double, 3> ca{-cx, 0, 0}, cb{cx, 0, 0};

    const std::string prefix = opt.stream_prefix.empty() ? "ind" : opt.stream_prefix;
    std::vector<char> ia(static_cast<std::size_t>(opt.replicas));
    std::vector<char> ib(static_cast<std::size_t>(opt.replicas));
    const double pad = 2 * (m.is_lattice() ? 1.0 : m.h);

    if (m.is_lattice()) {
        const auto L = static_cast<std::int64_t>(std::ceil(cx + Ra + pad));
        parallel_for(opt.replicas, opt.threads, [&](std::int64_t r) {
            const auto w =
                realize_lattice_centered(m, L, opt.seed, static_cast<std::uint32_t>(r), prefix);
            AnnulusSpec an;
            an.inner = 1.0;
            an.outer = Ra;
            an.center = ca;
            ia[static_cast<std::size_t>(r)] = lattice_annulus_time(w, an) < delta ? 1 : 0;
            an.center = cb;
            ib[static_cast<std::size_t>(r)] = lattice_annulus_time(w, an) < delta ? 1 : 0;
        });
    } else {
        Box domain;
        domain.dim = m.dim;
        domain.lo[0] = -(cx + Ra + pad);
        domain.hi[0] = cx + Ra + pad;
        for (int a = 1; a < m.dim; ++a) {
            domain.lo[a] = -(Ra + pad);
            domain.hi[a] = Ra + pad;
        }
        parallel_for(opt.replicas, opt.threads, [&](std::int64_t r) {
            const auto sigma =
                realize_colouring(m, domain, opt.seed, static_cast<std::uint32_t>(r), prefix);
            AnnulusSpec an;
            an.inner = 1.0;
            an.outer = Ra;
            an.center = ca;
            ia[static_cast<std::size_t>(r)] = annulus_time(sigma, an) < delta ? 1 : 0;
            an.center = cb;
            ib[static_cast<std::size_t>(r)] = annulus_time(sigma, an) < delta ? 1 : 0;
        });
    }

    IndReport rep;
    rep.Q = Q;
    rep.S = S;
    rep.delta = delta;
    std::uint64_t na = 0, nb = 0, nab = 0;
    for (int r = 0; r < opt.replicas; ++r) {
        na += ia[static_cast<std::size_t>(r)];
        nb += ib[static_cast<std::size_t>(r)];
        nab += ia[static_cast<std::size_t>(r)] && ib[static_cast<std::size_t>(r)];
    }
    rep.pa = {na, static_cast<std::uint64_t>(opt.replicas)};
    rep.pb = {nb, static_cast<std::uint64_t>(opt.replicas)};
    rep.pab = static_cast<double>(nab) / opt.replicas;

    // Signed defect per replica batch; |mean| reported, spread across batches
    // gives the stderr.
    const int nbatch = opt.replicas >= 40 ? 20 : std::max(2, opt.replicas / 2);
    std::vector<double> batch;
    for (int b = 0; b < nbatch; ++b) {
        const int lo = static_cast<int>(static_cast<std::int64_t>(b) * opt.replicas / nbatch);
        const int hi =
            static_cast<int>(static_cast<std::int64_t>(b + 1) * opt.replicas / nbatch);
        if (hi <= lo) continue;
        double sa = 0, sb = 0, sab = 0;
        for (int r = lo; r < hi; ++r) {
            sa += ia[static_cast<std::size_t>(r)];
            sb += ib[static_cast<std::size_t>(r)];
            sab += ia[static_cast<std::size_t>(r)] && ib[static_cast<std::size_t>(r)];
        }
        const double cnt = hi - lo;
        batch.push_back(sab / cnt - (sa / cnt) * (sb / cnt));
    }
    Estimate signed_est = mean_estimate(batch);
    rep.defect.mean = std::abs(signed_est.mean);
    rep.defect.stderr_ = signed_est.stderr_;
    rep.defect.replicas = static_cast<std::uint64_t>(opt.replicas);
    rep.defect.master_seed = opt.seed;
    rep.defect.stream = prefix;
    return rep;
}

// ---- renormalization ---------------------------------------------------------------

std::int64_t sphere_covering_count(int dim, double rho) {
    if (!(rho > 0)) throw std::invalid_argument("sphere radius must be positive");
    const double gamma = 2.0 * std::asin(std::min(1.0, 1.0 / (2.0 * rho)));
    if (dim == 2) {
        // Each unit ball centered on the circle covers an arc of width 2*gamma.
        return static_cast<std::int64_t>(std::ceil(3.14159265358979323846 / gamma));
    }
    // Latitude-longitude grid with angular spacing gamma/2; every sphere point
    // is within gamma of some center.
    const double s = gamma / 2;
    std::int64_t count = 0;
    const auto nlat = static_cast<std::int64_t>(std::ceil(3.14159265358979323846 / s));
    for (std::int64_t i = 0; i <= nlat; ++i) {
        const double theta = std::min(3.14159265358979323846, s * static_cast<double>(i));
        const double ring = 2 * 3.14159265358979323846 * std::sin(theta);
        count += std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(ring / s)));
    }
    return count;
}

RenormScales renorm_scales(double Q, double R, double S) {
    if (!(1 <= Q && Q < R && R < S))
        throw std::invalid_argument("renorm needs 1 <= Q < R < S");
    RenormScales sc;
    sc.N = static_cast<std::int64_t>(std::floor((S - 1) / (2 * R + Q)));
    sc.n = static_cast<std::int64_t>(std::floor(static_cast<double>(sc.N) * Q / (2 * R + 2 * Q)));
    return sc;
}

RenormReport check_renormalization(const ModelSpec& m, double Q, double R, double S,
                                   double delta, const EstimatorOptions& opt) {
    m.validate();
    if (!(delta > 0)) throw std::invalid_argument("renorm.delta must be > 0");

    RenormReport rep;
    rep.Q = Q;
    rep.R = R;
    rep.S = S;
    rep.delta = delta;
    const auto sc = renorm_scales(Q, R, S);
    rep.N = sc.N;
    rep.n = sc.n;
    rep.vacuous = rep.n == 0;

    for (std::int64_t j = 1; j <= rep.N; ++j) {
        const double mid = 1 + static_cast<double>(j - 1) * (2 * R + Q) + R;
        rep.covering_count = std::max(rep.covering_count, sphere_covering_count(m.dim, mid));
    }

    const std::string prefix = opt.stream_prefix.empty() ? "renorm" : opt.stream_prefix;
    const double lhs_threshold = delta / (1 + Q / R) * S;  // absolute time on A_S

    // LHS and the scale-R factor come from separate replica families.
    auto annulus_hits = [&](double outer, double threshold,
                            const std::string& label) -> Proportion {
        std::vector<char> hit(static_cast<std::size_t>(opt.replicas), 0);
        if (m.is_lattice()) {
            const auto L = static_cast<std::int64_t>(std::ceil(outer + 2));
            parallel_for(opt.replicas, opt.threads, [&](std::int64_t r) {
                const auto w = realize_lattice_centered(m, L, opt.seed,
                                                        static_cast<std::uint32_t>(r), label);
                AnnulusSpec an;
                an.inner = 1.0;
                an.outer = outer;
                hit[static_cast<std::size_t>(r)] = lattice_annulus_time(w, an) < threshold;
            });
        } else {
            const Box domain = centered_box(m.dim, outer + 2 * m.h);
            parallel_for(opt.replicas, opt.threads, [&](std::int64_t r) {
                const auto sigma = realize_colouring(m, domain, opt.seed,
                                                     static_cast<std::uint32_t>(r), label);
                AnnulusSpec an;
                an.inner = 1.0;
                an.outer = outer;
                hit[static_cast<std::size_t>(r)] = annulus_time(sigma, an) < threshold;
            });
        }
        std::uint64_t k = 0;
        for (char c : hit) k += c;
        return {k, static_cast<std::uint64_t>(opt.replicas)};
    };

    rep.lhs = annulus_hits(S, lhs_threshold, prefix + "/lhs");
    rep.p_r = annulus_hits(R, delta * R, prefix + "/pR");

    // The proof's E_j events live on copies of A_R at distance >= Q with the
    // renormalized threshold delta (1 + Q/R) R.
    EstimatorOptions ind_opt = opt;
    ind_opt.stream_prefix = prefix + "/ind";
    const auto ind = estimate_ind(m, Q, 2 * R, delta * (1 + Q / R) * R, ind_opt);
    rep.ind = ind.defect;

    if (rep.vacuous) {
        rep.c_d = 0.0;
        rep.rhs = 1.0;
        rep.rhs_lo = 1.0;
        rep.rhs_hi = 1.0;
        rep.verdict = "holds";
        rep.note = "n = 0: the inequality is trivially true at these scales";
        return rep;
    }

    const double nn = static_cast<double>(rep.n);
    const double binom = binom_exact(rep.N, rep.n);
    const double kmax = static_cast<double>(rep.covering_count);
    rep.c_d = kmax * std::pow(binom, 1.0 / nn) * Q / (R * std::pow(S, m.dim - 1));
    // factor^n = binom(N,n) * covering^n by construction of c_d.
    const double factor_n = binom * std::pow(kmax, nn);
    const double pr = rep.p_r.point();
    rep.rhs = factor_n * (std::pow(pr, nn) + nn * rep.ind.mean);
    const double d_pr = factor_n * nn * (rep.n >= 2 ? std::pow(pr, nn - 1) : 1.0);
    const double d_ind = factor_n * nn;
    const double se = std::sqrt(d_pr * d_pr * rep.p_r.stderr_() * rep.p_r.stderr_() +
                                d_ind * d_ind * rep.ind.stderr_ * rep.ind.stderr_);
    rep.rhs_lo = rep.rhs - 1.959963984540054 * se;
    rep.rhs_hi = rep.rhs + 1.959963984540054 * se;

    if (rep.lhs.hi95() <= rep.rhs_lo)
        rep.verdict = "holds";
    else if (rep.lhs.lo95() > rep.rhs_hi)
        rep.verdict = "violated";
    else
        rep.verdict = "inconclusive";
    if (rep.verdict == "violated")
        rep.note =
            "check, in order: (1) the constructive covering count, (2) grid "
            "discretization of T, (3) only then the inequality itself";
    return rep;
}

// ---- ball shape -------------------------------------------------------------------

std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                    const std::array<double, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

namespace {

double point_segment_dist(const std::array<double, 2>& p, const std::array<double, 2>& a,
                          const std::array<double, 2>& b) {
    const double vx = b[0] - a[0], vy = b[1] - a[1];
    const double wx = p[0] - a[0], wy = p[1] - a[1];
    const double vv = vx * vx + vy * vy;
    const double t = vv > 0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
    const double dx = wx - t * vx, dy = wy - t * vy;
    return std::sqrt(dx * dx + dy * dy);
}

bool point_in_polygon(const std::array<double, 2>& p,
                      const std::vector<std::array<double, 2>>& poly) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto& a = poly[i];
        const auto& b = poly[j];
        if ((a[1] > p[1]) != (b[1] > p[1])) {
            const double x = (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0];
            if (p[0] < x) inside = !inside;
        }
    }
    return inside;
}

double dist_to_region(const std::array<double, 2>& p,
                      const std::vector<std::array<double, 2>>& poly) {
    if (point_in_polygon(p, poly)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
        best = std::min(best, point_segment_dist(p, poly[j], poly[i]));
    return best;
}

std::vector<std::array<double, 2>> boundary_samples(
    const std::vector<std::array<double, 2>>& poly, int per_edge) {
    std::vector<std::array<double, 2>> out;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
        for (int k = 0; k < per_edge; ++k) {
            const double t = static_cast<double>(k) / per_edge;
            out.push_back({poly[j][0] + t * (poly[i][0] - poly[j][0]),
                           poly[j][1] + t * (poly[i][1] - poly[j][1])});
        }
    return out;
}

}  // namespace

double polygon_hausdorff(const std::vector<std::array<double, 2>>& a,
                         const std::vector<std::array<double, 2>>& b) {
    if (a.size() < 3 || b.size() < 3)
        throw std::invalid_argument("polygon_hausdorff needs proper polygons");
    double worst = 0;
    for (const auto& p : boundary_samples(a, 64)) worst = std::max(worst, dist_to_region(p, b));
    for (const auto& p : boundary_samples(b, 64)) worst = std::max(worst, dist_to_region(p, a));
    return worst;
}

BallShapeReport ball_shape(const ModelSpec& m, const std::vector<double>& t_list,
                           double half_extent, int bins, const EstimatorOptions& opt) {
    m.validate();
    if (m.dim != 2) throw std::invalid_argument("ball shape estimation is 2D only");
    if (m.is_lattice()) throw std::invalid_argument("ball shape needs a colouring model");
    if (t_list.empty()) throw std::invalid_argument("ball.t list is empty");
    for (std::size_t i = 1; i < t_list.size(); ++i)
        if (!(t_list[i] > t_list[i - 1]))
            throw std::invalid_argument("ball.t must be strictly increasing");
    if (bins < 16) throw std::invalid_argument("ball.bins must be >= 16");
    if (bins % 2) throw std::invalid_argument("ball.bins must be even");

    const double t_max = t_list.back();
    const std::string prefix = opt.stream_prefix.empty() ? "ball" : opt.stream_prefix;
    const Box domain = centered_box(2, half_extent);
    const std::size_t nt = t_list.size();

    // per replica, per t, per bin: max |x| over B_t in the bin
    std::vector<std::vector<std::vector<double>>> rad(static_cast<std::size_t>(opt.replicas));
    std::vector<char> clipped(static_cast<std::size_t>(opt.replicas), 0);

    parallel_for(opt.replicas, opt.threads, [&](std::int64_t r) {
        const auto sigma =
            realize_colouring(m, domain, opt.seed, static_cast<std::uint32_t>(r), prefix);
        const auto origin = sigma.grid.nearest_node({0, 0, 0});
        const std::int64_t src[1] = {origin};
        const auto tf = shortest_time_truncated(sigma, src, t_max);
        auto& mine = rad[static_cast<std::size_t>(r)];
        mine.assign(nt, std::vector<double>(static_cast<std::size_t>(bins), 0.0));
        const auto& g = sigma.grid;
        const std::int64_t n = g.node_count();
        for (std::int64_t k = 0; k < n; ++k) {
            const double tk = tf.time[static_cast<std::size_t>(k)];
            if (!std::isfinite(tk)) continue;
            const auto x = g.coordinate(k);
            const double rr = std::hypot(x[0], x[1]);
            if (rr == 0) continue;
            double ang = std::atan2(x[1], x[0]);
            if (ang < 0) ang += 6.283185307179586476925286766559;
            int b = static_cast<int>(ang / 6.283185307179586476925286766559 * bins);
            if (b >= bins) b = bins - 1;
            const auto mi = g.multi_index(k);
            const bool boundary = mi[0] == 0 || mi[0] == g.extent[0] - 1 || mi[1] == 0 ||
                                  mi[1] == g.extent[1] - 1;
            for (std::size_t ti = 0; ti < nt; ++ti) {
                if (tk <= t_list[ti]) {
                    auto& cell = mine[ti][static_cast<std::size_t>(b)];
                    cell = std::max(cell, rr);
                    if (boundary) clipped[static_cast<std::size_t>(r)] = 1;
                }
            }
        }
    });

    BallShapeReport rep;
    rep.t_list = t_list;
    rep.bins = bins;
    rep.radius.resize(nt);
    rep.growth_ratio.resize(nt);
    for (std::size_t ti = 0; ti < nt; ++ti) {
        rep.radius[ti].resize(static_cast<std::size_t>(bins));
        std::vector<double> maxr(static_cast<std::size_t>(opt.replicas), 0.0);
        for (int b = 0; b < bins; ++b) {
            std::vector<double> xs(static_cast<std::size_t>(opt.replicas));
            for (int r = 0; r < opt.replicas; ++r) {
                const double v = rad[static_cast<std::size_t>(r)][ti][static_cast<std::size_t>(b)];
                xs[static_cast<std::size_t>(r)] = v / t_list[ti];
                maxr[static_cast<std::size_t>(r)] =
                    std::max(maxr[static_cast<std::size_t>(r)], v);
            }
            rep.radius[ti][static_cast<std::size_t>(b)] = mean_estimate(xs);
            rep.radius[ti][static_cast<std::size_t>(b)].master_seed = opt.seed;
            rep.radius[ti][static_cast<std::size_t>(b)].stream = prefix;
        }
        double acc = 0;
        for (double v : maxr) acc += v / t_list[ti];
        rep.growth_ratio[ti] = acc / opt.replicas;
    }

    // Directional mu-hat from the largest t; resolution floor 2h/t_max.
    int clipped_count = 0;
    for (char c : clipped) clipped_count += c;
    rep.directional_mu.resize(static_cast<std::size_t>(bins));
    bool all_floor = true;
    for (int b = 0; b < bins; ++b) {
        const auto& rb = rep.radius[nt - 1][static_cast<std::size_t>(b)];
        Estimate mu;
        if (rb.mean > 0) {
            mu.mean = 1.0 / rb.mean;  // radius is already rescaled by t
            mu.stderr_ = rb.stderr_ / (rb.mean * rb.mean);
        } else {
            mu.mean = std::numeric_limits<double>::infinity();
        }
        mu.replicas = rb.replicas;
        rep.directional_mu[static_cast<std::size_t>(b)] = mu;
        if (mu.mean >= 2 * m.h / t_max) all_floor = false;
    }
    rep.vanishing_regime = clipped_count * 2 > opt.replicas || all_floor;
    if (rep.vanishing_regime) {
        rep.note = clipped_count * 2 > opt.replicas
                       ? "vanishing-mu regime: balls clipped by the grid"
                       : "vanishing-mu regime: directional estimates under the resolution floor";
        return rep;
    }

    // Fitted K: symmetrized, convexified polygon from the t_max profile.
    std::vector<std::array<double, 2>> verts;
    for (int b = 0; b < bins; ++b) {
        const double r1 = rep.radius[nt - 1][static_cast<std::size_t>(b)].mean;
        const double r2 =
            rep.radius[nt - 1][static_cast<std::size_t>((b + bins / 2) % bins)].mean;
        const double rho = 0.5 * (r1 + r2);
        const double ang = (b + 0.5) * 6.283185307179586476925286766559 / bins;
        verts.push_back({rho * std::cos(ang), rho * std::sin(ang)});
    }
    rep.fitted_k = convex_hull(verts);

    rep.hausdorff.resize(nt);
    for (std::size_t ti = 0; ti < nt; ++ti) {
        std::vector<std::array<double, 2>> poly;
        for (int b = 0; b < bins; ++b) {
            const double rho = rep.radius[ti][static_cast<std::size_t>(b)].mean;
            const double ang = (b + 0.5) * 6.283185307179586476925286766559 / bins;
            poly.push_back({rho * std::cos(ang), rho * std::sin(ang)});
        }
        rep.hausdorff[ti] = polygon_hausdorff(poly, rep.fitted_k);
    }
    return rep;
}

}  // namespace fpp
