// model.hpp — probability spaces, hypothesis classes, learning triplets.
//
// Two backends: tabular (finite probability space, exact expectations — the
// ground-truth oracle) and linear-generative (weight vectors over an i.i.d.
// heavy-tailed feature sampler). All types are immutable after construction
// and safe to share read-only across parallel workers.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lpt::model {

// ---------------------------------------------------------------------------
// TabularSpace: atoms with probabilities summing to 1 (within 1e-12).
// Atom ids are the indices 0..atom_count()-1.
class TabularSpace {
public:
    static std::shared_ptr<const TabularSpace> create(std::vector<double> probs);

    std::size_t atom_count() const { return probs_.size(); }
    double prob(std::size_t atom) const { return probs_[atom]; }
    const std::vector<double>& probs() const { return probs_; }
    // cumulative()[a] = P(atom <= a); last entry pinned to 1 for sampling.
    const std::vector<double>& cumulative() const { return cum_; }

private:
    explicit TabularSpace(std::vector<double> probs);
    std::vector<double> probs_;
    std::vector<double> cum_;
};

using SpacePtr = std::shared_ptr<const TabularSpace>;

// ---------------------------------------------------------------------------
// FunctionTable: a real-valued function given by its value on every atom.
class FunctionTable {
public:
    static FunctionTable create(SpacePtr space, std::vector<double> values);

    const SpacePtr& space() const { return space_; }
    double value(std::size_t atom) const { return values_[atom]; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    FunctionTable(SpacePtr space, std::vector<double> values);
    SpacePtr space_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Scalar distribution families with analytic moments. Parameter meaning:
//   gaussian:      a = mean, b = stddev (> 0)
//   student_t:     a = degrees of freedom (> 2), b = scale (> 0)
//   pareto:        a = shape (> 2), b = scale (> 0); support [b, inf)
//   two_point:     value a with probability b, else 0    (a = K, b = q)
//   sym_two_point: value +-a each with probability b/2, else 0
enum class Family { gaussian, student_t, pareto, two_point, sym_two_point };

struct Distribution {
    Family family = Family::gaussian;
    double a = 0.0;
    double b = 1.0;

    // Exactly one variate per index; consumes two uniforms (2*index, 2*index+1).
    double draw(const class DrawCtx& ctx, std::uint64_t index) const;

    double mean() const;
    double second_moment() const;
    // ||X||_{L_q}; throws if the moment is infinite for this family/parameter.
    double lp_norm(double q) const;
    bool lp_finite(double q) const;
    // Pr(|X| >= t); closed form (used by generative small-ball where exact).
    std::optional<double> tail_two_sided(double t) const;

    std::string describe() const;
    static Distribution parse(const std::string& text);
};

// Thin wrapper binding a counter RNG key so Distribution::draw stays pure.
class DrawCtx {
public:
    DrawCtx(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream = 0);
    double u01(std::uint64_t index) const;

private:
    std::uint64_t key_;
};

// ---------------------------------------------------------------------------
// GenerativeSource: an i.i.d. sampler with a declared L_p bound, verified at
// construction (analytically where closed-form, by quadrature otherwise).
class GenerativeSource {
public:
    // dim = 1 for scalar sources (targets/noise); dim > 1 for feature vectors
    // with i.i.d. coordinates.
    static GenerativeSource create(Distribution dist, double p, double declared_M,
                                   std::size_t dim = 1);

    const Distribution& dist() const { return dist_; }
    double p() const { return p_; }
    double declared_M() const { return declared_M_; }
    std::size_t dim() const { return dim_; }

private:
    GenerativeSource(Distribution dist, double p, double M, std::size_t dim);
    Distribution dist_;
    double p_ = 0.0;
    double declared_M_ = 0.0;
    std::size_t dim_ = 1;
};

// ---------------------------------------------------------------------------
// HypothesisClass: finite set of functions with stable labels, bounded in L_p.
class HypothesisClass {
public:
    enum class Backend { tabular, linear };

    static HypothesisClass tabular(SpacePtr space, std::vector<std::vector<double>> member_values,
                                   double p, double M, std::vector<std::string> labels = {});
    static HypothesisClass linear(std::vector<std::vector<double>> weights,
                                  GenerativeSource features, double p, double M,
                                  std::vector<std::string> labels = {});

    Backend backend() const { return backend_; }
    std::size_t size() const { return rows_.size(); }
    double p() const { return p_; }
    double M() const { return M_; }
    bool midpoint_closed() const { return midpoint_closed_; }
    const std::string& label(std::size_t member) const { return labels_[member]; }
    const std::vector<std::string>& labels() const { return labels_; }

    // Member representation: per-atom values (tabular) or weights (linear).
    std::span<const double> row(std::size_t member) const { return rows_[member]; }

    const SpacePtr& space() const { return space_; }              // tabular only
    const GenerativeSource& features() const { return *features_; }  // linear only
    std::size_t dim() const;  // atoms (tabular) or feature dim (linear)

    // Pointwise average (u+v)/2 of two members, as a representation row.
    std::vector<double> midpoint(std::size_t u, std::size_t v) const;

    // Exact L_p norm of a member (tabular); Minkowski upper bound (linear).
    double member_lp_bound(std::size_t member) const;

private:
    HypothesisClass() = default;
    void validate_lp_bound() const;

    Backend backend_ = Backend::tabular;
    double p_ = 0.0;
    double M_ = 0.0;
    bool midpoint_closed_ = false;
    SpacePtr space_;
    std::optional<GenerativeSource> features_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::string> labels_;

    friend HypothesisClass midpoint_closure(const HypothesisClass& cls,
                                            const std::vector<std::size_t>& subset);
};

// {(u+v)/2 : u,v in subset} deduplicated by exact value equality; contains the
// subset itself (u = v). Labels of new members are "(lu+lv)/2".
HypothesisClass midpoint_closure(const HypothesisClass& cls,
                                 const std::vector<std::size_t>& subset);
HypothesisClass midpoint_closure(const HypothesisClass& cls);

// ---------------------------------------------------------------------------
// Triplet: (class, input, target) with the designated risk minimizer f*.
struct TargetRule {
    std::size_t f0_index = 0;
    GenerativeSource noise;
};

struct OracleOptions {
    std::size_t oracle_samples = 1'000'000;
    std::uint64_t oracle_seed = 0xA11CE5EEDull;  // namespace separate from experiments
};

class Triplet {
public:
    static Triplet make(HypothesisClass cls, FunctionTable target, OracleOptions opts = {});
    static Triplet make(HypothesisClass cls, TargetRule rule, OracleOptions opts = {});

    const HypothesisClass& cls() const { return cls_; }
    std::size_t fstar() const { return fstar_; }
    bool target_is_table() const { return std::holds_alternative<FunctionTable>(target_); }
    const FunctionTable& target_table() const { return std::get<FunctionTable>(target_); }
    const TargetRule& target_rule() const { return std::get<TargetRule>(target_); }
    const OracleOptions& oracle_options() const { return opts_; }

    // E (f(X)-Y)^2, exact where the backend admits it.
    std::optional<double> exact_risk(std::size_t member) const;

private:
    Triplet(HypothesisClass cls, std::variant<FunctionTable, TargetRule> target,
            OracleOptions opts);
    HypothesisClass cls_;
    std::variant<FunctionTable, TargetRule> target_;
    OracleOptions opts_;
    std::size_t fstar_ = 0;
};

// Lowest index minimizing the risk: exact expectations on the tabular backend,
// a dedicated oracle sample (opts.oracle_samples draws, oracle seed namespace)
// on the generative one. Throws if any member's risk is non-finite.
std::size_t find_fstar(const Triplet& t);

// E (f(X)-Y)^2 for an arbitrary representation row (atom values / weights).
std::optional<double> exact_risk_row(const Triplet& t, std::span<const double> row);

// ---------------------------------------------------------------------------
// Serialization (self-describing text, round-trip exact for tabular).
void save_class(const std::string& path, const HypothesisClass& cls);
HypothesisClass load_class(const std::string& path);

}  // namespace lpt::model
