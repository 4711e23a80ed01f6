#include "lpt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "lpt/report.hpp"
#include "lpt/rng.hpp"
#include "lpt/sampler.hpp"

namespace lpt::model {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void require(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
}

// Adaptive Simpson, used for the gaussian |x|^p moment with nonzero mean.
double simpson(double (*f)(double, const double*), const double* ctx, double a, double m,
               double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm, ctx), frm = f(rm, ctx);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, ctx, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, ctx, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Pre-split into panels so the initial probe points cannot all miss the mass.
double adaptive_simpson(double (*f)(double, const double*), const double* ctx, double a, double b,
                        double tol_rel) {
    constexpr int kPanels = 32;
    const double h = (b - a) / kPanels;
    double coarse = 0.0;
    for (int k = 0; k < kPanels; ++k) {
        const double lo = a + k * h;
        coarse += h / 6.0 * (f(lo, ctx) + 4.0 * f(lo + 0.5 * h, ctx) + f(lo + h, ctx));
    }
    const double tol = std::max(1e-300, tol_rel * std::abs(coarse)) / kPanels;
    double total = 0.0;
    for (int k = 0; k < kPanels; ++k) {
        const double lo = a + k * h, hi = lo + h, mid = lo + 0.5 * h;
        const double fa = f(lo, ctx), fm = f(mid, ctx), fb = f(hi, ctx);
        const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson(f, ctx, lo, mid, hi, fa, fm, fb, whole, tol, 40);
    }
    return total;
}

double abs_pow_gauss_density(double x, const double* ctx) {
    const double p = ctx[0], mu = ctx[1], sd = ctx[2];
    const double z = (x - mu) / sd;
    return std::pow(std::abs(x), p) * std::exp(-0.5 * z * z) /
           (sd * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

// --- TabularSpace ----------------------------------------------------------

TabularSpace::TabularSpace(std::vector<double> probs) : probs_(std::move(probs)) {
    cum_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        cum_[i] = acc;
    }
    cum_.back() = 1.0;
}

std::shared_ptr<const TabularSpace> TabularSpace::create(std::vector<double> probs) {
    require(!probs.empty(), "TabularSpace: at least one atom required");
    double total = 0.0;
    for (double q : probs) {
        require(std::isfinite(q) && q >= 0.0, "TabularSpace: probabilities must be >= 0");
        total += q;
    }
    require(std::abs(total - 1.0) <= 1e-12, "TabularSpace: probabilities must sum to 1 (got " +
                                                report::fmt(total) + ")");
    return std::shared_ptr<const TabularSpace>(new TabularSpace(std::move(probs)));
}

// --- FunctionTable ----------------------------------------------------------

FunctionTable::FunctionTable(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {}

FunctionTable FunctionTable::create(SpacePtr space, std::vector<double> values) {
    require(static_cast<bool>(space), "FunctionTable: null space");
    require(values.size() == space->atom_count(),
            "FunctionTable: values length must equal atom count");
    for (double v : values)
        require(std::isfinite(v), "FunctionTable: all values must be finite");
    return FunctionTable(std::move(space), std::move(values));
}

// --- DrawCtx ----------------------------------------------------------------

DrawCtx::DrawCtx(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream)
    : key_(rng::CounterRng(seed, stream_id, substream).key()) {}

double DrawCtx::u01(std::uint64_t index) const {
    return (static_cast<double>(rng::mix64(rng::mix64(key_ + index * rng::kGolden)) >> 11) + 0.5) *
           0x1.0p-53;
}

// --- Distribution ------------------------------------------------------------

double Distribution::draw(const DrawCtx& ctx, std::uint64_t index) const {
    // Each variate owns two uniform slots; the second is only materialized by
    // the families that need it.
    const double u1 = ctx.u01(2 * index);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    switch (family) {
        case Family::gaussian:
            return a + b * std::sqrt(-2.0 * std::log(u1)) *
                           std::cos(two_pi * ctx.u01(2 * index + 1));
        case Family::student_t:
            // Bailey's polar method: exact Student-t from two uniforms.
            return b * std::sqrt(a * (std::pow(u1, -2.0 / a) - 1.0)) *
                   std::cos(two_pi * ctx.u01(2 * index + 1));
        case Family::pareto:
            return b * std::pow(u1, -1.0 / a);
        case Family::two_point:
            return u1 < b ? a : 0.0;
        case Family::sym_two_point:
            return u1 < b ? (ctx.u01(2 * index + 1) < 0.5 ? -a : a) : 0.0;
    }
    fail("Distribution::draw: unknown family");
}

double Distribution::mean() const {
    switch (family) {
        case Family::gaussian: return a;
        case Family::student_t: return 0.0;
        case Family::pareto: return a * b / (a - 1.0);
        case Family::two_point: return a * b;
        case Family::sym_two_point: return 0.0;
    }
    fail("Distribution::mean: unknown family");
}

double Distribution::second_moment() const {
    switch (family) {
        case Family::gaussian: return a * a + b * b;
        case Family::student_t: return b * b * a / (a - 2.0);
        case Family::pareto: return a * b * b / (a - 2.0);
        case Family::two_point: return a * a * b;
        case Family::sym_two_point: return a * a * b;
    }
    fail("Distribution::second_moment: unknown family");
}

bool Distribution::lp_finite(double q) const {
    switch (family) {
        case Family::gaussian: return true;
        case Family::student_t: return q < a;
        case Family::pareto: return q < a;
        case Family::two_point: return true;
        case Family::sym_two_point: return true;
    }
    return false;
}

double Distribution::lp_norm(double q) const {
    require(q >= 1.0, "lp_norm: q >= 1 required");
    require(lp_finite(q), "lp_norm: L_" + report::fmt(q) + " moment is infinite for " + describe());
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    switch (family) {
        case Family::gaussian: {
            if (a == 0.0) {
                // E|X|^q = sigma^q 2^{q/2} Gamma((q+1)/2) / sqrt(pi)
                const double logm = 0.5 * q * std::numbers::ln2 + std::lgamma(0.5 * (q + 1.0)) -
                                    std::log(sqrt_pi);
                return b * std::exp(logm / q);
            }
            const double ctx[3] = {q, a, b};
            const double lo = a - (50.0 + q) * b, hi = a + (50.0 + q) * b;
            const double mom = adaptive_simpson(abs_pow_gauss_density, ctx, lo, hi, 1e-12);
            return std::pow(mom, 1.0 / q);
        }
        case Family::student_t: {
            // E|T|^q = nu^{q/2} Gamma((q+1)/2) Gamma((nu-q)/2) / (sqrt(pi) Gamma(nu/2))
            const double logm = 0.5 * q * std::log(a) + std::lgamma(0.5 * (q + 1.0)) +
                                std::lgamma(0.5 * (a - q)) - std::log(sqrt_pi) -
                                std::lgamma(0.5 * a);
            return b * std::exp(logm / q);
        }
        case Family::pareto:
            return b * std::pow(a / (a - q), 1.0 / q);
        case Family::two_point:
        case Family::sym_two_point:
            return std::abs(a) * std::pow(b, 1.0 / q);
    }
    fail("lp_norm: unknown family");
}

std::optional<double> Distribution::tail_two_sided(double t) const {
    if (t <= 0.0) return 1.0;
    switch (family) {
        case Family::gaussian: {
            const double s = b * std::numbers::sqrt2;
            return 0.5 * std::erfc((t - a) / s) + 0.5 * std::erfc((t + a) / s);
        }
        case Family::pareto:
            return t <= b ? 1.0 : std::pow(b / t, a);
        case Family::two_point:
        case Family::sym_two_point:
            return t <= std::abs(a) ? b : 0.0;
        case Family::student_t:
            return std::nullopt;
    }
    return std::nullopt;
}

std::string Distribution::describe() const {
    const char* name = nullptr;
    switch (family) {
        case Family::gaussian: name = "gaussian"; break;
        case Family::student_t: name = "student_t"; break;
        case Family::pareto: name = "pareto"; break;
        case Family::two_point: name = "two_point"; break;
        case Family::sym_two_point: name = "sym_two_point"; break;
    }
    return std::string(name) + " " + report::fmt(a) + " " + report::fmt(b);
}

Distribution Distribution::parse(const std::string& text) {
    std::istringstream in(text);
    std::string name;
    Distribution d;
    in >> name >> d.a >> d.b;
    require(!in.fail(), "Distribution::parse: bad spec '" + text + "'");
    if (name == "gaussian") d.family = Family::gaussian;
    else if (name == "student_t") d.family = Family::student_t;
    else if (name == "pareto") d.family = Family::pareto;
    else if (name == "two_point") d.family = Family::two_point;
    else if (name == "sym_two_point") d.family = Family::sym_two_point;
    else fail("Distribution::parse: unknown family '" + name + "'");
    return d;
}

// --- GenerativeSource ---------------------------------------------------------

GenerativeSource::GenerativeSource(Distribution dist, double p, double M, std::size_t dim)
    : dist_(dist), p_(p), declared_M_(M), dim_(dim) {}

GenerativeSource GenerativeSource::create(Distribution dist, double p, double declared_M,
                                          std::size_t dim) {
    require(p > 0.0 && std::isfinite(p), "GenerativeSource: p must be positive and finite");
    require(declared_M > 0.0, "GenerativeSource: declared M must be positive");
    require(dim >= 1, "GenerativeSource: dim >= 1");
    require(dist.lp_finite(p), "GenerativeSource: " + dist.describe() +
                                   " has infinite L_" + report::fmt(p) + " moment");
    const double norm = dist.lp_norm(p);
    require(norm <= declared_M * (1.0 + 1e-12),
            "GenerativeSource: ||X||_" + report::fmt(p) + " = " + report::fmt(norm) +
                " exceeds declared M = " + report::fmt(declared_M));
    switch (dist.family) {
        case Family::gaussian: require(dist.b > 0.0, "gaussian: stddev > 0"); break;
        case Family::student_t:
            require(dist.a > 2.0 && dist.b > 0.0, "student_t: df > 2 and scale > 0");
            break;
        case Family::pareto:
            require(dist.a > 2.0 && dist.b > 0.0, "pareto: shape > 2 and scale > 0");
            break;
        case Family::two_point:
        case Family::sym_two_point:
            require(dist.b > 0.0 && dist.b <= 1.0, "two_point: q in (0,1]");
            break;
    }
    return GenerativeSource(dist, p, declared_M, dim);
}

// --- HypothesisClass ----------------------------------------------------------

std::size_t HypothesisClass::dim() const {
    return backend_ == Backend::tabular ? space_->atom_count() : features_->dim();
}

double HypothesisClass::member_lp_bound(std::size_t member) const {
    const auto& row = rows_[member];
    if (backend_ == Backend::tabular) {
        double acc = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a)
            acc += space_->prob(a) * std::pow(std::abs(row[a]), p_);
        return std::pow(acc, 1.0 / p_);
    }
    // Minkowski: ||sum w_k X_k||_p <= sum |w_k| ||X||_p  (i.i.d. coordinates)
    const double coord = features_->dist().lp_norm(p_);
    double l1 = 0.0;
    for (double w : row) l1 += std::abs(w);
    return l1 * coord;
}

void HypothesisClass::validate_lp_bound() const {
    for (std::size_t g = 0; g < rows_.size(); ++g) {
        const double bound = member_lp_bound(g);
        require(bound <= M_ * (1.0 + 1e-9),
                "HypothesisClass: member '" + labels_[g] + "' violates the L_p bound: " +
                    report::fmt(bound) + " > M = " + report::fmt(M_));
    }
}

HypothesisClass HypothesisClass::tabular(SpacePtr space,
                                         std::vector<std::vector<double>> member_values, double p,
                                         double M, std::vector<std::string> labels) {
    require(static_cast<bool>(space), "HypothesisClass: null space");
    require(!member_values.empty(), "HypothesisClass: size >= 1 required");
    require(p >= 1.0, "HypothesisClass: p >= 1 required");
    require(M > 0.0, "HypothesisClass: M > 0 required");
    HypothesisClass cls;
    cls.backend_ = Backend::tabular;
    cls.p_ = p;
    cls.M_ = M;
    cls.midpoint_closed_ = true;  // midpoints always representable on the same space
    cls.space_ = std::move(space);
    cls.rows_ = std::move(member_values);
    for (const auto& row : cls.rows_) {
        require(row.size() == cls.space_->atom_count(),
                "HypothesisClass: member length must equal atom count");
        for (double v : row) require(std::isfinite(v), "HypothesisClass: values must be finite");
    }
    if (labels.empty()) {
        for (std::size_t g = 0; g < cls.rows_.size(); ++g) labels.push_back("f" + std::to_string(g));
    }
    require(labels.size() == cls.rows_.size(), "HypothesisClass: one label per member");
    cls.labels_ = std::move(labels);
    cls.validate_lp_bound();
    return cls;
}

HypothesisClass HypothesisClass::linear(std::vector<std::vector<double>> weights,
                                        GenerativeSource features, double p, double M,
                                        std::vector<std::string> labels) {
    require(!weights.empty(), "HypothesisClass: size >= 1 required");
    require(p >= 1.0, "HypothesisClass: p >= 1 required");
    require(M > 0.0, "HypothesisClass: M > 0 required");
    require(features.p() == p, "HypothesisClass: feature source p must match class p");
    HypothesisClass cls;
    cls.backend_ = Backend::linear;
    cls.p_ = p;
    cls.M_ = M;
    cls.midpoint_closed_ = true;  // weight averages stay linear
    cls.features_ = std::move(features);
    cls.rows_ = std::move(weights);
    for (const auto& row : cls.rows_) {
        require(row.size() == cls.features_->dim(),
                "HypothesisClass: weight length must equal feature dim");
        for (double w : row) require(std::isfinite(w), "HypothesisClass: weights must be finite");
    }
    if (labels.empty()) {
        for (std::size_t g = 0; g < cls.rows_.size(); ++g) labels.push_back("f" + std::to_string(g));
    }
    require(labels.size() == cls.rows_.size(), "HypothesisClass: one label per member");
    cls.labels_ = std::move(labels);
    cls.validate_lp_bound();
    return cls;
}

std::vector<double> HypothesisClass::midpoint(std::size_t u, std::size_t v) const {
    require(u < size() && v < size(), "midpoint: member index out of range");
    const auto& ru = rows_[u];
    const auto& rv = rows_[v];
    std::vector<double> out(ru.size());
    for (std::size_t k = 0; k < ru.size(); ++k) out[k] = 0.5 * (ru[k] + rv[k]);
    return out;
}

HypothesisClass midpoint_closure(const HypothesisClass& cls,
                                 const std::vector<std::size_t>& subset) {
    require(!subset.empty(), "midpoint_closure: empty subset");
    for (std::size_t g : subset) require(g < cls.size(), "midpoint_closure: index out of range");

    HypothesisClass out;
    out.backend_ = cls.backend_;
    out.p_ = cls.p_;
    out.M_ = cls.M_;
    out.midpoint_closed_ = true;
    out.space_ = cls.space_;
    out.features_ = cls.features_;

    std::map<std::vector<double>, std::size_t> seen;
    auto add = [&](std::vector<double> row, const std::string& label) {
        auto [it, inserted] = seen.try_emplace(std::move(row), out.rows_.size());
        if (inserted) {
            out.rows_.push_back(it->first);
            out.labels_.push_back(label);
        }
    };
    // Originals first (u = v), then new midpoints in (i, j) order: stable ids.
    for (std::size_t i : subset) add(std::vector<double>(cls.row(i).begin(), cls.row(i).end()),
                                     cls.label(i));
    for (std::size_t a = 0; a < subset.size(); ++a)
        for (std::size_t b = a + 1; b < subset.size(); ++b) {
            const std::size_t i = subset[a], j = subset[b];
            add(cls.midpoint(i, j), "(" + cls.label(i) + "+" + cls.label(j) + ")/2");
        }
    return out;
}

HypothesisClass midpoint_closure(const HypothesisClass& cls) {
    std::vector<std::size_t> all(cls.size());
    for (std::size_t g = 0; g < all.size(); ++g) all[g] = g;
    return midpoint_closure(cls, all);
}

// --- Triplet --------------------------------------------------------------------

namespace detail {

std::size_t resolve_fstar(const Triplet& t);

}  // namespace detail

Triplet::Triplet(HypothesisClass cls, std::variant<FunctionTable, TargetRule> target,
                 OracleOptions opts)
    : cls_(std::move(cls)), target_(std::move(target)), opts_(opts) {}

Triplet Triplet::make(HypothesisClass cls, FunctionTable target, OracleOptions opts) {
    require(cls.backend() == HypothesisClass::Backend::tabular,
            "Triplet: FunctionTable target requires the tabular backend");
    require(target.space() == cls.space(), "Triplet: target must live on the class space");
    Triplet t(std::move(cls), std::move(target), opts);
    t.fstar_ = detail::resolve_fstar(t);
    return t;
}

Triplet Triplet::make(HypothesisClass cls, TargetRule rule, OracleOptions opts) {
    require(rule.f0_index < cls.size(), "Triplet: f0 index out of range");
    require(rule.noise.dim() == 1, "Triplet: noise source must be scalar");
    Triplet t(std::move(cls), std::move(rule), opts);
    t.fstar_ = detail::resolve_fstar(t);
    return t;
}

std::optional<double> Triplet::exact_risk(std::size_t member) const {
    return exact_risk_row(*this, cls_.row(member));
}

std::optional<double> exact_risk_row(const Triplet& t, std::span<const double> row) {
    const auto& cls = t.cls();
    require(row.size() == cls.dim(), "exact_risk_row: row length mismatch");
    if (cls.backend() == HypothesisClass::Backend::tabular) {
        const auto& space = *cls.space();
        if (t.target_is_table()) {
            const auto& y = t.target_table().values();
            double acc = 0.0;
            for (std::size_t a = 0; a < row.size(); ++a) {
                const double d = row[a] - y[a];
                acc += space.prob(a) * d * d;
            }
            return acc;
        }
        const auto& rule = t.target_rule();
        const auto f0 = cls.row(rule.f0_index);
        const double m1 = rule.noise.dist().mean();
        const double m2 = rule.noise.dist().second_moment();
        double sq = 0.0, lin = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a) {
            const double d = row[a] - f0[a];
            sq += space.prob(a) * d * d;
            lin += space.prob(a) * d;
        }
        return sq - 2.0 * m1 * lin + m2;
    }
    // linear backend: i.i.d. coordinates with known first two moments.
    const auto& rule = t.target_rule();
    const auto w0 = cls.row(rule.f0_index);
    const double mc = cls.features().dist().mean();
    const double m2c = cls.features().dist().second_moment();
    const double varc = m2c - mc * mc;
    double norm2 = 0.0, sumd = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        const double d = row[k] - w0[k];
        norm2 += d * d;
        sumd += d;
    }
    const double mean_f = mc * sumd;
    const double m1n = rule.noise.dist().mean();
    const double m2n = rule.noise.dist().second_moment();
    return varc * norm2 + mean_f * mean_f - 2.0 * m1n * mean_f + m2n;
}

std::size_t find_fstar(const Triplet& t) { return detail::resolve_fstar(t); }

// --- serialization -----------------------------------------------------------

void save_class(const std::string& path, const HypothesisClass& cls) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "save_class: cannot open " + path);
    out << "# lpt-class v1\n";
    const bool tab = cls.backend() == HypothesisClass::Backend::tabular;
    out << "backend " << (tab ? "tabular" : "linear") << "\n";
    out << "p " << report::fmt(cls.p()) << "\n";
    out << "M " << report::fmt(cls.M()) << "\n";
    if (tab) {
        out << "atoms " << cls.space()->atom_count() << "\n";
    } else {
        out << "dim " << cls.features().dim() << "\n";
        out << "features " << cls.features().dist().describe() << " "
            << report::fmt(cls.features().declared_M()) << "\n";
    }
    out << "members " << cls.size() << "\n";
    out << "labels";
    for (const auto& l : cls.labels()) out << " " << l;
    out << "\n";
    if (tab) {
        // column order: atom probability, then one value column per member
        for (std::size_t a = 0; a < cls.space()->atom_count(); ++a) {
            out << report::fmt(cls.space()->prob(a));
            for (std::size_t g = 0; g < cls.size(); ++g)
                out << " " << report::fmt(cls.row(g)[a]);
            out << "\n";
        }
    } else {
        // one row per member: weight per feature coordinate
        for (std::size_t g = 0; g < cls.size(); ++g) {
            const auto row = cls.row(g);
            for (std::size_t k = 0; k < row.size(); ++k)
                out << (k ? " " : "") << report::fmt(row[k]);
            out << "\n";
        }
    }
    require(static_cast<bool>(out), "save_class: write failed for " + path);
}

HypothesisClass load_class(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "load_class: cannot open " + path);
    std::string line;
    std::string backend;
    double p = 0, M = 0, feat_M = 0;
    std::size_t atoms = 0, dim = 0, members = 0;
    std::string feat_spec;
    std::vector<std::string> labels;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "backend") ls >> backend;
        else if (key == "p") ls >> p;
        else if (key == "M") ls >> M;
        else if (key == "atoms") ls >> atoms;
        else if (key == "dim") ls >> dim;
        else if (key == "members") ls >> members;
        else if (key == "features") {
            std::string fam;
            double a, b;
            ls >> fam >> a >> b >> feat_M;
            feat_spec = fam + " " + report::fmt(a) + " " + report::fmt(b);
        } else if (key == "labels") {
            std::string l;
            while (ls >> l) labels.push_back(l);
        } else {
            fail("load_class: unknown header key '" + key + "' in " + path);
        }
        if ((backend == "tabular" && atoms && members && !labels.empty()) ||
            (backend == "linear" && dim && members && !labels.empty() && !feat_spec.empty()))
            break;
    }
    require(members > 0, "load_class: missing member count in " + path);
    if (backend == "tabular") {
        std::vector<double> probs(atoms);
        std::vector<std::vector<double>> values(members, std::vector<double>(atoms));
        for (std::size_t a = 0; a < atoms; ++a) {
            in >> probs[a];
            for (std::size_t g = 0; g < members; ++g) in >> values[g][a];
        }
        require(!in.fail(), "load_class: truncated atom rows in " + path);
        return HypothesisClass::tabular(TabularSpace::create(std::move(probs)), std::move(values),
                                        p, M, std::move(labels));
    }
    require(backend == "linear", "load_class: unknown backend '" + backend + "'");
    std::vector<std::vector<double>> weights(members, std::vector<double>(dim));
    for (std::size_t g = 0; g < members; ++g)
        for (std::size_t k = 0; k < dim; ++k) in >> weights[g][k];
    require(!in.fail(), "load_class: truncated member rows in " + path);
    auto feats = GenerativeSource::create(Distribution::parse(feat_spec), p, feat_M, dim);
    return HypothesisClass::linear(std::move(weights), std::move(feats), p, M, std::move(labels));
}

}  // namespace lpt::model
