#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rng.hpp"

namespace fpp {

ConfigDoc ConfigDoc::parse(const std::string& text) {
    ConfigDoc doc;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        doc.kv_[key] = value;
    }
    return doc;
}

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
}

const std::string* ConfigDoc::find(const std::string& key) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? nullptr : &it->second;
}

void ConfigDoc::set(const std::string& key, const std::string& value) { kv_[key] = value; }

std::string ConfigDoc::canonical() const {
    std::string out;
    for (const auto& [k, v] : kv_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

std::uint64_t ConfigDoc::hash() const { return fnv1a64(canonical()); }

const char* task_kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::kSample: return "sample";
        case TaskKind::kMu: return "mu";
        case TaskKind::kOneArm: return "one-arm";
        case TaskKind::kCrossing: return "crossing";
        case TaskKind::kInd: return "ind";
        case TaskKind::kRenorm: return "renorm";
        case TaskKind::kBallShape: return "ball-shape";
    }
    return "?";
}

namespace {

class Reader {
public:
    Reader(const ConfigDoc& doc, std::vector<std::string>& errors)
        : doc_(doc), errors_(errors) {}

    void fail(const std::string& key, const std::string& what) {
        errors_.push_back(key + ": " + what);
    }

    std::string str(const std::string& key, const std::string& fallback) {
        const auto* v = doc_.find(key);
        return v ? *v : fallback;
    }

    std::string required(const std::string& key) {
        const auto* v = doc_.find(key);
        if (!v) {
            fail(key, "required field is missing");
            return {};
        }
        return *v;
    }

    double num(const std::string& key, double fallback) {
        const auto* v = doc_.find(key);
        if (!v) return fallback;
        return parse_num(key, *v).value_or(fallback);
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        const double d = num(key, static_cast<double>(fallback));
        if (d != std::floor(d)) {
            fail(key, "must be an integer");
            return fallback;
        }
        return static_cast<std::int64_t>(d);
    }

    std::uint64_t u64(const std::string& key) {
        const auto* v = doc_.find(key);
        if (!v) {
            fail(key, "required field is missing");
            return 0;
        }
        std::uint64_t out = 0;
        const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc() || p != v->data() + v->size())
            fail(key, "must be an unsigned 64-bit integer");
        return out;
    }

    std::vector<double> list(const std::string& key) {
        const auto* v = doc_.find(key);
        std::vector<double> out;
        if (!v) return out;
        std::istringstream is(*v);
        std::string tok;
        while (is >> tok) {
            try {
                out.push_back(std::stod(tok));
            } catch (...) {
                fail(key, "list entry '" + tok + "' is not a number");
                return {};
            }
        }
        return out;
    }

private:
    std::optional<double> parse_num(const std::string& key, const std::string& v) {
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument("");
            return d;
        } catch (...) {
            fail(key, "'" + v + "' is not a number");
            return std::nullopt;
        }
    }

    const ConfigDoc& doc_;
    std::vector<std::string>& errors_;
};

MonotoneMapSpec read_map(Reader& r, const std::string& section,
                         MonotoneMapSpec::Kind fallback) {
    MonotoneMapSpec spec;
    spec.kind = fallback;
    const std::string kind = r.str(section, "");
    if (!kind.empty()) {
        if (kind == "indicator")
            spec.kind = MonotoneMapSpec::Kind::kIndicator;
        else if (kind == "positive-part")
            spec.kind = MonotoneMapSpec::Kind::kPositivePart;
        else if (kind == "exp")
            spec.kind = MonotoneMapSpec::Kind::kExp;
        else if (kind == "affine-clamp")
            spec.kind = MonotoneMapSpec::Kind::kAffineClamp;
        else
            r.fail(section, "unknown map '" + kind +
                                "' (indicator | positive-part | exp | affine-clamp)");
    }
    spec.scale = r.num(section + ".scale", 1.0);
    spec.shift = r.num(section + ".shift", 0.0);
    spec.floor_ = r.num(section + ".floor", 0.0);
    spec.cap = r.num(section + ".cap", std::numeric_limits<double>::infinity());
    return spec;
}

}  // namespace

ValidationResult validate_config(const ConfigDoc& doc) {
    ValidationResult res;
    Reader r(doc, res.errors);
    ExperimentSpec& s = res.spec;

    // model
    const std::string kind = r.required("model.kind");
    if (!kind.empty()) {
        const auto mk = parse_model_kind(kind);
        if (!mk)
            r.fail("model.kind", "unknown model '" + kind + "'");
        else
            s.model.kind = *mk;
    }
    s.model.dim = static_cast<int>(r.integer("grid.dim", 2));
    if (s.model.dim != 2 && s.model.dim != 3) r.fail("grid.dim", "must be 2 or 3");
    s.model.h = r.num("grid.h", 0.25);
    if (!(s.model.h > 0)) r.fail("grid.h", "must be > 0");
    s.half_extent = r.num("grid.half_extent", 8.0);
    if (!(s.half_extent > 0)) r.fail("grid.half_extent", "must be > 0");
    s.model.node_budget = r.integer("run.node_budget", GridSpec::kDefaultNodeBudget);

    s.model.level = r.num("model.level", 0.0);
    s.model.p = r.num("model.p", 0.5);
    if (!(s.model.p >= 0 && s.model.p <= 1)) r.fail("model.p", "p must lie in [0,1]");
    s.model.lambda = r.num("model.lambda", 1.0);
    if (s.model.lambda < 0) r.fail("model.lambda", "must be >= 0");
    s.model.constant_value = r.num("model.value", 1.0);
    if (s.model.constant_value < 0) r.fail("model.value", "must be >= 0");

    const std::string trunc = r.str("model.truncation", "auto");
    if (trunc == "auto")
        s.model.truncation = -1;
    else
        s.model.truncation = static_cast<int>(r.integer("model.truncation", -1));
    s.model.truncation_tol = r.num("model.truncation_tol", 1e-6);
    if (!(s.model.truncation_tol > 0)) r.fail("model.truncation_tol", "must be > 0");

    const std::string kn = r.str("model.kernel", "gaussian");
    if (kn == "gaussian")
        s.model.kernel.kind = KernelSpec::Kind::kGaussian;
    else if (kn == "delta")
        s.model.kernel.kind = KernelSpec::Kind::kDelta;
    else
        r.fail("model.kernel", "unknown kernel '" + kn + "' (gaussian | delta)");
    s.model.kernel.length_scale = r.num("model.kernel.length_scale", 1.0);
    if (!(s.model.kernel.length_scale > 0)) r.fail("model.kernel.length_scale", "must be > 0");

    s.model.psi = read_map(r, "model.psi", MonotoneMapSpec::Kind::kIndicator);
    s.model.phi = read_map(r, "model.phi", MonotoneMapSpec::Kind::kExp);

    const std::string rl = r.str("model.radius", "constant");
    if (rl == "constant")
        s.model.radius.kind = RadiusLaw::Kind::kConstant;
    else if (rl == "exp-tail")
        s.model.radius.kind = RadiusLaw::Kind::kExpTail;
    else
        r.fail("model.radius", "unknown radius law '" + rl + "' (constant | exp-tail)");
    s.model.radius.r0 = r.num("model.radius.r0", 1.0);
    if (!(s.model.radius.r0 > 0)) r.fail("model.radius.r0", "must be > 0");
    s.model.radius.rate = r.num("model.radius.rate", 1.0);
    if (s.model.radius.kind == RadiusLaw::Kind::kExpTail && !(s.model.radius.rate > 0))
        r.fail("model.radius.rate",
               "must be > 0: the exponential-tail condition needs P(r >= t) <= exp(-c t) "
               "with c > 0");

    const std::string wl = r.str("model.law", "bernoulli");
    if (wl == "bernoulli")
        s.model.law.kind = WeightLaw::Kind::kBernoulli;
    else if (wl == "constant")
        s.model.law.kind = WeightLaw::Kind::kConstant;
    else
        r.fail("model.law", "unknown weight law '" + wl + "' (bernoulli | constant)");
    s.model.law.p = s.model.p;
    s.model.law.value = r.num("model.law.value", 1.0);
    if (s.model.law.value < 0)
        r.fail("model.law.value", "weights live on R+, value must be >= 0");

    // estimator selection
    const std::string task = r.str("estimator.kind", "mu");
    bool task_known = true;
    if (task == "sample")
        s.task = TaskKind::kSample;
    else if (task == "mu")
        s.task = TaskKind::kMu;
    else if (task == "one-arm")
        s.task = TaskKind::kOneArm;
    else if (task == "crossing")
        s.task = TaskKind::kCrossing;
    else if (task == "ind")
        s.task = TaskKind::kInd;
    else if (task == "renorm")
        s.task = TaskKind::kRenorm;
    else if (task == "ball-shape")
        s.task = TaskKind::kBallShape;
    else {
        task_known = false;
        r.fail("estimator.kind", "unknown estimator '" + task + "'");
    }

    // estimator parameters
    if (task_known) switch (s.task) {
        case TaskKind::kSample:
            break;
        case TaskKind::kMu: {
            auto dir = r.list("mu.direction");
            if (dir.empty()) dir = {1, 0};
            if (static_cast<int>(dir.size()) != s.model.dim)
                r.fail("mu.direction", "needs one component per dimension");
            else {
                double n2 = 0;
                for (std::size_t a = 0; a < dir.size(); ++a) {
                    s.direction[a] = dir[a];
                    n2 += dir[a] * dir[a];
                }
                if (!(n2 > 0)) r.fail("mu.direction", "must be nonzero");
            }
            s.n_list = r.list("mu.n");
            if (s.n_list.empty()) r.fail("mu.n", "needs at least one scale");
            for (std::size_t i = 1; i < s.n_list.size(); ++i)
                if (!(s.n_list[i] > s.n_list[i - 1])) {
                    r.fail("mu.n", "must be strictly increasing");
                    break;
                }
            break;
        }
        case TaskKind::kOneArm: {
            s.radii = r.list("one_arm.radii");
            if (s.radii.empty()) r.fail("one_arm.radii", "needs at least one radius");
            s.fit_lo = static_cast<std::size_t>(r.integer("one_arm.fit_lo", 0));
            s.fit_hi = static_cast<std::size_t>(
                r.integer("one_arm.fit_hi", static_cast<std::int64_t>(s.radii.empty() ? 0 : s.radii.size() - 1)));
            if (!s.radii.empty() && (s.fit_hi >= s.radii.size() || s.fit_lo > s.fit_hi))
                r.fail("one_arm.fit_lo", "fit window must lie inside the radii list");
            break;
        }
        case TaskKind::kCrossing: {
            auto box = r.list("crossing.rect");
            if (box.size() != static_cast<std::size_t>(2 * s.model.dim))
                r.fail("crossing.rect", "needs lo/hi per axis (2d values)");
            else {
                s.rect.box.dim = s.model.dim;
                for (int a = 0; a < s.model.dim; ++a) {
                    s.rect.box.lo[a] = box[static_cast<std::size_t>(a)];
                    s.rect.box.hi[a] = box[static_cast<std::size_t>(s.model.dim + a)];
                    if (!(s.rect.box.hi[a] > s.rect.box.lo[a]))
                        r.fail("crossing.rect", "axis " + std::to_string(a) + " is empty");
                }
            }
            s.rect.axis = static_cast<int>(r.integer("crossing.axis", 0));
            if (s.rect.axis < 0 || s.rect.axis >= s.model.dim)
                r.fail("crossing.axis", "must name an axis below grid.dim");
            s.scales = r.list("crossing.scales");
            if (s.scales.empty()) r.fail("crossing.scales", "needs at least one scale");
            s.colour = static_cast<int>(r.integer("crossing.colour", 0));
            if (s.colour != 0 && s.colour != 1) r.fail("crossing.colour", "must be 0 or 1");
            break;
        }
        case TaskKind::kInd:
            s.Q = r.num("ind.Q", 2);
            s.S = r.num("ind.S", 8);
            s.delta = r.num("ind.delta", 0.5);
            if (s.Q < 0) r.fail("ind.Q", "must be >= 0");
            if (!(s.S > 2)) r.fail("ind.S", "must exceed 2");
            if (!(s.delta > 0)) r.fail("ind.delta", "must be > 0");
            break;
        case TaskKind::kRenorm:
            s.Q = r.num("renorm.Q", 2);
            s.R = r.num("renorm.R", 4);
            s.S = r.num("renorm.S", 41);
            s.delta = r.num("renorm.delta", 0.1);
            if (!(1 <= s.Q && s.Q < s.R && s.R < s.S))
                r.fail("renorm.Q", "renormalization needs 1 <= Q < R < S");
            if (!(s.delta > 0)) r.fail("renorm.delta", "must be > 0");
            break;
        case TaskKind::kBallShape:
            s.t_list = r.list("ball.t");
            if (s.t_list.empty()) r.fail("ball.t", "needs at least one time");
            s.bins = static_cast<int>(r.integer("ball.bins", 32));
            if (s.bins < 16 || s.bins % 2) r.fail("ball.bins", "must be even and >= 16");
            break;
    }

    // run
    s.replicas = static_cast<int>(r.integer("run.replicas", 100));
    if (s.replicas < 1) r.fail("run.replicas", "must be >= 1");
    s.seed = r.u64("run.seed");
    s.threads = static_cast<int>(r.integer("run.threads", 0));
    if (s.threads < 0) r.fail("run.threads", "must be >= 0 (0 = auto)");

    if (res.errors.empty()) {
        try {
            s.model.validate();
        } catch (const std::exception& e) {
            res.errors.push_back(std::string("model: ") + e.what());
        }
    }
    return res;
}

}  // namespace fpp
