#include "runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "metric.hpp"
#include "rng.hpp"

namespace fpp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

class ManifestWriter {
public:
    ManifestWriter(const std::string& path) : os_(path) {
        if (!os_) throw std::runtime_error("cannot open manifest " + path);
    }
    void line(const json& j) {
        os_ << j.dump() << '\n';
        os_.flush();
    }

private:
    std::ofstream os_;
};

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::string& header) : os_(path) {
        if (!os_) throw std::runtime_error("cannot open " + path.string());
        os_ << header << '\n';
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

private:
    std::ofstream os_;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }

double wall_ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

RunResult run_experiment(const ConfigDoc& doc, const std::string& out_root) {
    auto vr = validate_config(doc);
    if (!vr.ok()) throw ConfigError(vr.errors);
    ExperimentSpec& spec = vr.spec;
    if (spec.threads == 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        spec.threads = hc == 0 ? 1 : static_cast<int>(hc);
    }

    const std::string dir_name = hex64(doc.hash()) + "-s" + std::to_string(spec.seed);
    const fs::path out_dir = fs::path(out_root) / dir_name;
    if (fs::exists(out_dir))
        throw ResourceError("output directory already exists (runs never overwrite): " +
                            out_dir.string());
    fs::create_directories(out_dir);

    RunResult result;
    result.out_dir = out_dir.string();
    result.manifest_path = (out_dir / "manifest.jsonl").string();

    {
        std::ofstream cfg(out_dir / "config.txt");
        cfg << doc.canonical();
    }
    result.outputs.push_back("config.txt");

    ManifestWriter manifest(result.manifest_path);
    manifest.line(json{{"record", "run"},
                       {"tool", "fpplab"},
                       {"version", "0.1.0"},
                       {"task", task_kind_name(spec.task)},
                       {"config_hash", hex64(doc.hash())},
                       {"master_seed", spec.seed},
                       {"threads", spec.threads},
                       {"config", doc.canonical()}});

    EstimatorOptions opt;
    opt.replicas = spec.replicas;
    opt.seed = spec.seed;
    opt.threads = spec.threads;

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> streams;

    try {
        switch (spec.task) {
            case TaskKind::kSample: {
                const Box domain = [&] {
                    Box b;
                    b.dim = spec.model.dim;
                    for (int a = 0; a < spec.model.dim; ++a) {
                        b.lo[a] = -spec.half_extent;
                        b.hi[a] = spec.half_extent;
                    }
                    return b;
                }();
                streams.push_back("sample");
                for (int rep = 0; rep < spec.replicas; ++rep) {
                    const auto tag = "_r" + std::to_string(rep);
                    if (spec.model.is_lattice()) {
                        const auto w = realize_lattice_centered(
                            spec.model, static_cast<std::int64_t>(std::ceil(spec.half_extent)),
                            spec.seed, static_cast<std::uint32_t>(rep), "sample");
                        CsvWriter csv(out_dir / ("weights" + tag + ".csv"),
                                      spec.model.dim == 2 ? "x,y,axis,weight" : "x,y,z,axis,weight");
                        const std::int64_t n = w.vertex_count();
                        for (std::int64_t v = 0; v < n; ++v) {
                            const auto c = w.coords(v);
                            for (int a = 0; a < w.dim; ++a) {
                                auto cv = c;
                                cv[a] += 1;
                                if (w.vertex_at(cv) < 0) continue;  // edge leaves the lattice
                                std::vector<std::string> cells;
                                for (int b = 0; b < w.dim; ++b)
                                    cells.push_back(std::to_string(c[b]));
                                cells.push_back(std::to_string(a));
                                cells.push_back(
                                    fmt(w.weights[static_cast<std::size_t>(v * w.dim + a)]));
                                csv.row(cells);
                            }
                        }
                        result.outputs.push_back("weights" + tag + ".csv");
                    } else {
                        const auto sigma = realize_colouring(spec.model, domain, spec.seed,
                                                             static_cast<std::uint32_t>(rep),
                                                             "sample");
                        const std::string base = "colouring" + tag;
                        write_field_binary((out_dir / (base + ".bin")).string(), sigma.grid,
                                           sigma.density, PayloadKind::kColouring);
                        write_field_csv((out_dir / (base + ".csv")).string(), sigma.grid,
                                        sigma.density);
                        result.outputs.push_back(base + ".bin");
                        result.outputs.push_back(base + ".csv");
                        switch (spec.model.kind) {
                            case ModelKind::kBargmannFock:
                            case ModelKind::kSpectralGaussian:
                            case ModelKind::kGaussianPsi:
                            case ModelKind::kConformal: {
                                const auto f = realize_field(spec.model, domain, spec.seed,
                                                             static_cast<std::uint32_t>(rep),
                                                             "sample");
                                write_field_binary((out_dir / ("field" + tag + ".bin")).string(),
                                                   f.grid, f.values, PayloadKind::kField);
                                result.outputs.push_back("field" + tag + ".bin");
                                break;
                            }
                            case ModelKind::kVoronoi:
                            case ModelKind::kBoolean: {
                                auto cloud = realize_cloud(spec.model, domain, spec.seed,
                                                           static_cast<std::uint32_t>(rep),
                                                           "sample");
                                // export the same per-point randomness the
                                // colouring consumed: cell-colour uniforms for
                                // Voronoi, ball radii for Boolean
                                if (spec.model.kind == ModelKind::kVoronoi) {
                                    for (std::size_t i = 0; i < cloud.points.size(); ++i)
                                        cloud.marks[i] = coordinate_hash_uniform(
                                            spec.seed, "voronoi-cell", cloud.points[i],
                                            cloud.dim);
                                } else {
                                    cloud.radii.resize(cloud.points.size());
                                    for (std::size_t i = 0; i < cloud.points.size(); ++i)
                                        cloud.radii[i] = spec.model.radius.sample(
                                            coordinate_hash_uniform(spec.seed, "boolean-radius",
                                                                    cloud.points[i], cloud.dim));
                                }
                                write_cloud_csv((out_dir / ("cloud" + tag + ".csv")).string(),
                                                cloud);
                                result.outputs.push_back("cloud" + tag + ".csv");
                                break;
                            }
                            default:
                                break;
                        }
                    }
                }
                break;
            }
            case TaskKind::kMu: {
                const auto curve =
                    estimate_mu(spec.model, spec.direction, spec.n_list, spec.half_extent, opt);
                CsvWriter csv(out_dir / "mu.csv", "n,mean,stderr,replicas");
                for (const auto& pt : curve.points) {
                    csv.row({fmt(pt.n), fmt(pt.est.mean), fmt(pt.est.stderr_),
                             fmt(pt.est.replicas)});
                    streams.push_back(pt.est.stream);
                }
                result.outputs.push_back("mu.csv");
                if (!curve.subadditive_ok) result.warnings.push_back(curve.note);
                break;
            }
            case TaskKind::kOneArm: {
                const auto curve = estimate_one_arm(spec.model, spec.radii, spec.half_extent,
                                                    spec.fit_lo, spec.fit_hi, opt);
                CsvWriter csv(out_dir / "onearm.csv",
                              "radius,phat,lo95,hi95,successes,replicas");
                for (const auto& pt : curve.points)
                    csv.row({fmt(pt.radius), fmt(pt.prob.point()), fmt(pt.prob.lo95()),
                             fmt(pt.prob.hi95()), fmt(pt.prob.successes), fmt(pt.prob.trials)});
                result.outputs.push_back("onearm.csv");
                streams.push_back(opt.stream_prefix.empty() ? "one-arm" : opt.stream_prefix);
                if (curve.exponent) {
                    CsvWriter fitcsv(out_dir / "onearm_fit.csv",
                                     "exponent,stderr,lo95,hi95,fit_lo,fit_hi");
                    fitcsv.row({fmt(curve.exponent->mean), fmt(curve.exponent->stderr_),
                                fmt(curve.exponent->lo95()), fmt(curve.exponent->hi95()),
                                fmt(static_cast<std::uint64_t>(curve.fit_lo)),
                                fmt(static_cast<std::uint64_t>(curve.fit_hi))});
                    result.outputs.push_back("onearm_fit.csv");
                } else {
                    result.warnings.push_back(curve.note);
                }
                break;
            }
            case TaskKind::kCrossing: {
                const auto pts =
                    estimate_crossing(spec.model, spec.rect, spec.scales, spec.colour, opt);
                CsvWriter csv(out_dir / "crossing.csv",
                              "scale,phat,lo95,hi95,successes,replicas");
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    const auto& pt = pts[i];
                    csv.row({fmt(pt.scale), fmt(pt.prob.point()), fmt(pt.prob.lo95()),
                             fmt(pt.prob.hi95()), fmt(pt.prob.successes), fmt(pt.prob.trials)});
                    streams.push_back("crossing/s" + std::to_string(i));
                }
                result.outputs.push_back("crossing.csv");
                break;
            }
            case TaskKind::kInd: {
                const auto rep = estimate_ind(spec.model, spec.Q, spec.S, spec.delta, opt);
                CsvWriter csv(out_dir / "ind.csv",
                              "Q,S,delta,defect,stderr,pa,pb,pab,replicas");
                csv.row({fmt(rep.Q), fmt(rep.S), fmt(rep.delta), fmt(rep.defect.mean),
                         fmt(rep.defect.stderr_), fmt(rep.pa.point()), fmt(rep.pb.point()),
                         fmt(rep.pab), fmt(rep.defect.replicas)});
                result.outputs.push_back("ind.csv");
                streams.push_back(rep.defect.stream);
                break;
            }
            case TaskKind::kRenorm: {
                const auto rep =
                    check_renormalization(spec.model, spec.Q, spec.R, spec.S, spec.delta, opt);
                CsvWriter csv(
                    out_dir / "renorm.csv",
                    "Q,R,S,delta,N,n,vacuous,covering_count,c_d,lhs,lhs_lo95,lhs_hi95,p_r,"
                    "rhs,rhs_lo95,rhs_hi95,ind,verdict,replicas");
                csv.row({fmt(rep.Q), fmt(rep.R), fmt(rep.S), fmt(rep.delta), fmt(rep.N),
                         fmt(rep.n), rep.vacuous ? "1" : "0", fmt(rep.covering_count),
                         fmt(rep.c_d), fmt(rep.lhs.point()), fmt(rep.lhs.lo95()),
                         fmt(rep.lhs.hi95()), fmt(rep.p_r.point()), fmt(rep.rhs),
                         fmt(rep.rhs_lo), fmt(rep.rhs_hi), fmt(rep.ind.mean), rep.verdict,
                         fmt(static_cast<std::uint64_t>(spec.replicas))});
                result.outputs.push_back("renorm.csv");
                streams.insert(streams.end(), {"renorm/lhs", "renorm/pR", "renorm/ind"});
                if (!rep.note.empty()) result.warnings.push_back(rep.note);
                break;
            }
            case TaskKind::kBallShape: {
                const auto rep =
                    ball_shape(spec.model, spec.t_list, spec.half_extent, spec.bins, opt);
                CsvWriter prof(out_dir / "ball_profile.csv",
                               "t,bin,angle,radius_mean,radius_stderr,replicas");
                for (std::size_t ti = 0; ti < rep.t_list.size(); ++ti)
                    for (int b = 0; b < rep.bins; ++b) {
                        const auto& e = rep.radius[ti][static_cast<std::size_t>(b)];
                        const double ang =
                            (b + 0.5) * 6.283185307179586476925286766559 / rep.bins;
                        prof.row({fmt(rep.t_list[ti]), fmt(static_cast<std::int64_t>(b)),
                                  fmt(ang), fmt(e.mean), fmt(e.stderr_), fmt(e.replicas)});
                    }
                result.outputs.push_back("ball_profile.csv");
                CsvWriter summ(out_dir / "ball_summary.csv",
                               "t,hausdorff,growth_ratio,regime");
                for (std::size_t ti = 0; ti < rep.t_list.size(); ++ti)
                    summ.row({fmt(rep.t_list[ti]),
                              rep.vanishing_regime ? "nan" : fmt(rep.hausdorff[ti]),
                              fmt(rep.growth_ratio[ti]),
                              rep.vanishing_regime ? "vanishing" : "norm"});
                result.outputs.push_back("ball_summary.csv");
                streams.push_back("ball");
                if (!rep.note.empty()) result.warnings.push_back(rep.note);
                break;
            }
        }
    } catch (const std::length_error& e) {
        throw ResourceError(e.what());
    }

    if (!result.warnings.empty()) {
        CsvWriter w(out_dir / "warnings.csv", "message");
        for (const auto& msg : result.warnings) {
            std::string quoted = "\"";
            for (char c : msg) {
                if (c == '"') quoted += "\"\"";
                else quoted += c;
            }
            quoted += "\"";
            w.row({quoted});
        }
        result.outputs.push_back("warnings.csv");
    }

    manifest.line(json{{"record", "task"},
                       {"task", task_kind_name(spec.task)},
                       {"streams", streams},
                       {"replicas", spec.replicas},
                       {"master_seed", spec.seed},
                       {"wall_ms", wall_ms_since(t0)}});
    manifest.line(json{{"record", "done"},
                       {"outputs", result.outputs},
                       {"warnings", result.warnings},
                       {"total_wall_ms", wall_ms_since(t0)}});
    result.outputs.push_back("manifest.jsonl");
    return result;
}

RunResult replay_manifest(const std::string& manifest_path, const std::string& new_out_root) {
    std::ifstream is(manifest_path);
    if (!is) throw std::runtime_error("cannot open manifest " + manifest_path);
    std::string first;
    if (!std::getline(is, first)) throw std::runtime_error("empty manifest");
    const json j = json::parse(first);
    if (!j.contains("config")) throw std::runtime_error("manifest has no embedded config");
    const auto doc = ConfigDoc::parse(j["config"].get<std::string>());
    return run_experiment(doc, new_out_root);
}

}  // namespace fpp
