#include "ide/stratification.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>

namespace ide {

using nlohmann::json;

namespace {

// Tolerance for testing a sampled witness of one locus against the
// generators of another.
constexpr double kCrossTol = 1e-6;

int svd_rank(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma[0] == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma[i] > tol * sigma[0]) ++rank;
    return rank;
}

std::vector<Polynomial> union_up_to_sign(std::vector<Polynomial> base,
                                         const std::vector<Polynomial>& extra) {
    for (const auto& g : extra) {
        Polynomial canon = g.sign_normalized();
        if (std::find(base.begin(), base.end(), canon) == base.end())
            base.push_back(std::move(canon));
    }
    return base;
}

bool has_nonzero_constant(const std::vector<Polynomial>& gens) {
    return std::any_of(gens.begin(), gens.end(),
                       [](const Polynomial& g) { return g.is_constant() && !g.is_zero(); });
}

bool vanishes_at(const std::vector<Polynomial>& gens, std::span<const double> x, double tol) {
    for (const auto& g : gens)
        if (std::abs(g.evaluate(x)) > tol) return false;
    return true;
}

}  // namespace

std::string to_string(Stratum s) {
    switch (s) {
        case Stratum::M0: return "M0";
        case Stratum::M1: return "M1";
        case Stratum::M2: return "M2";
    }
    return "?";
}

std::pair<std::vector<Polynomial>, std::vector<Polynomial>> minor_ideal_generators(
    const IdeSystem& s, int i) {
    if (i < 0) throw IdeError("minor_ideal_generators: negative rank bound");
    const std::size_t order = static_cast<std::size_t>(i) + 1;
    std::vector<Polynomial> s_gens;
    if (order <= std::min(s.a.rows(), s.a.cols())) s_gens = s.a.minors_of_order(order);
    std::vector<Polynomial> l_gens = s_gens;
    auto af = s.augmented();
    if (order <= std::min(af.rows(), af.cols()))
        l_gens = union_up_to_sign(std::move(l_gens), af.minors_of_order(order));
    return {std::move(s_gens), std::move(l_gens)};
}

std::vector<std::vector<double>> find_common_zeros(const std::vector<Polynomial>& gens,
                                                   const std::vector<std::string>& vars,
                                                   const SamplingOptions& opts) {
    std::vector<std::vector<double>> hits;
    std::vector<Polynomial> active;
    for (const auto& g : gens)
        if (!g.is_zero()) active.push_back(g);
    if (active.empty()) return hits;          // no conditions: nothing to search
    if (has_nonzero_constant(active)) return hits;  // provably empty

    const std::size_t n = vars.size();
    std::vector<Polynomial> jac;
    jac.reserve(active.size() * n);
    for (const auto& g : active)
        for (const auto& v : vars) jac.push_back(g.differentiate(v));

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> coord(-opts.box_half_width, opts.box_half_width);
    Eigen::VectorXd phi(static_cast<Eigen::Index>(active.size()));
    Eigen::MatrixXd J(static_cast<Eigen::Index>(active.size()), static_cast<Eigen::Index>(n));
    for (int start = 0; start < opts.budget; ++start) {
        std::vector<double> x(n);
        for (auto& c : x) c = coord(rng);
        bool converged = false;
        for (int iter = 0; iter < 60; ++iter) {
            double worst = 0.0;
            for (std::size_t i = 0; i < active.size(); ++i) {
                phi[static_cast<Eigen::Index>(i)] = active[i].evaluate(x);
                worst = std::max(worst, std::abs(phi[static_cast<Eigen::Index>(i)]));
            }
            if (worst < opts.zero_tol) {
                converged = true;
                break;
            }
            for (std::size_t i = 0; i < active.size(); ++i)
                for (std::size_t j = 0; j < n; ++j)
                    J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        jac[i * n + j].evaluate(x);
            Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(phi);
            if (!step.allFinite()) break;
            double norm2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                x[j] -= step[static_cast<Eigen::Index>(j)];
                norm2 += x[j] * x[j];
            }
            if (norm2 > 1e12) break;
        }
        if (converged) {
            hits.push_back(std::move(x));
            if (static_cast<int>(hits.size()) >= opts.max_hits) break;
        }
    }
    return hits;
}

bool sampled_locus_equal(const std::vector<Polynomial>& gens_a,
                         const std::vector<Polynomial>& gens_b,
                         const std::vector<std::string>& vars, const SamplingOptions& opts) {
    auto hits_a = find_common_zeros(gens_a, vars, opts);
    auto hits_b = find_common_zeros(gens_b, vars, opts);
    for (const auto& x : hits_a)
        if (!vanishes_at(gens_b, x, kCrossTol)) return false;
    for (const auto& x : hits_b)
        if (!vanishes_at(gens_a, x, kCrossTol)) return false;
    return true;
}

RankProfile rank_profile(const IdeSystem& s, const SamplingOptions& opts) {
    RankProfile profile;
    profile.generic_rank_a = s.a.generic_rank();
    profile.generic_rank_af = s.augmented().generic_rank();

    struct Candidate {
        int rank;
        std::vector<Polynomial> gens;
    };
    std::vector<Candidate> nonempty;
    for (int i = 0; i < profile.generic_rank_a; ++i) {
        const std::size_t order = static_cast<std::size_t>(i) + 1;
        std::vector<Polynomial> s_gens;
        if (order <= std::min(s.a.rows(), s.a.cols())) s_gens = s.a.minors_of_order(order);
        if (s_gens.empty()) continue;  // all minors vanish: locus is everything
        if (has_nonzero_constant(s_gens)) continue;  // provably empty
        if (!find_common_zeros(s_gens, s.variables, opts).empty())
            nonempty.push_back({i, std::move(s_gens)});
    }
    // Drop higher indices whose locus coincides with a lower one; the rank
    // attained on the shared locus is the smaller index.
    const Candidate* last_kept = nullptr;
    for (const auto& cand : nonempty) {
        if (last_kept && sampled_locus_equal(last_kept->gens, cand.gens, s.variables, opts))
            continue;
        profile.distinct_ranks.push_back(cand.rank);
        last_kept = &cand;
    }
    profile.distinct_ranks.push_back(profile.generic_rank_a);
    return profile;
}

StratumLabel classify_point(const IdeSystem& s, std::span<const double> x, double tol,
                            int generic_rank_a) {
    if (static_cast<int>(x.size()) != s.n())
        throw IdeError("classify_point: point dimension mismatch");
    if (!(tol > 0.0 && tol < 1.0)) throw IdeError("classify_point: tol must lie in (0, 1)");
    Eigen::MatrixXd A = s.eval_a(x);
    Eigen::MatrixXd AF(A.rows(), A.cols() + 1);
    AF << A, s.eval_f(x);
    StratumLabel label;
    label.rank_a = svd_rank(A, tol);
    label.rank_af = svd_rank(AF, tol);
    if (label.rank_a < generic_rank_a)
        label.stratum = Stratum::M0;
    else if (label.rank_af > label.rank_a)
        label.stratum = Stratum::M1;
    else
        label.stratum = Stratum::M2;
    return label;
}

StratumLabel classify_point(const IdeSystem& s, std::span<const double> x, double tol) {
    return classify_point(s, x, tol, s.a.generic_rank());
}

StratificationReport decompose_domain(const IdeSystem& s, const SamplingOptions& opts) {
    StratificationReport report;
    report.profile = rank_profile(s, opts);
    const int kr = report.profile.generic_rank_a;
    for (int i : report.profile.distinct_ranks) {
        auto [s_gens, l_gens] = minor_ideal_generators(s, i);
        report.s_generators[i] = std::move(s_gens);
        report.l_generators[i] = std::move(l_gens);
    }
    report.evidence.seed = opts.seed;
    report.evidence.budget = opts.budget;

    const auto& top = report.l_generators[kr];
    if (top.empty()) {
        // No conditions at the top rank: L_{k_r} is all of the domain.
        report.top_case = TopCase::C;
        report.evidence.level = "proven";
        int prev_rank = kr - 1;
        for (int r : report.profile.distinct_ranks)
            if (r < kr) prev_rank = r;
        if (prev_rank >= 0) {
            auto [s_gens, l_gens] = minor_ideal_generators(s, prev_rank);
            (void)l_gens;
            report.m0_generator_families.push_back(
                {"S_" + std::to_string(prev_rank), std::move(s_gens)});
        }
    } else if (has_nonzero_constant(top)) {
        report.top_case = TopCase::A;
        report.evidence.level = "proven";
    } else {
        auto hits = find_common_zeros(top, s.variables, opts);
        report.evidence.hits = static_cast<int>(hits.size());
        report.evidence.level = "sampled";
        if (hits.empty()) {
            report.top_case = TopCase::A;
        } else {
            report.top_case = TopCase::B;
            report.m0_generator_families.push_back({"L_" + std::to_string(kr), top});
            report.m0_witnesses = std::move(hits);
        }
    }
    if (report.top_case == TopCase::C && !report.m0_generator_families.empty())
        report.m0_witnesses =
            find_common_zeros(report.m0_generator_families[0].generators, s.variables, opts);
    return report;
}

std::vector<Polynomial> StratificationReport::m0_generators() const {
    std::vector<Polynomial> out;
    for (const auto& family : m0_generator_families)
        out = union_up_to_sign(std::move(out), family.generators);
    return out;
}

std::pair<IdeSystem, ConstraintSet> reduction_step(const IdeSystem& s, const ConstraintSet& c) {
    return {restrict_by_constraints(s, c, RestrictionForm::AppendedWithDerivative), c};
}

ReductionTrace iterate_reduction(const IdeSystem& s, const SamplingOptions& opts, int max_steps) {
    ReductionTrace trace;
    trace.accumulated.variables = s.variables;
    trace.steps.push_back({s, decompose_domain(s, opts)});
    for (int step = 0; step < max_steps; ++step) {
        const auto& current = trace.steps.back();
        auto m0 = current.report.m0_generators();
        // Empty singular locus: nothing left to restrict to.
        if (m0.empty() || current.report.m0_witnesses.empty()) {
            trace.fixed_point_step = step;
            trace.reached_fixed_point = true;
            return trace;
        }
        if (step > 0) {
            const auto& previous = trace.steps[trace.steps.size() - 2];
            if (sampled_locus_equal(previous.report.m0_generators(), m0, s.variables, opts)) {
                trace.fixed_point_step = step;
                trace.reached_fixed_point = true;
                return trace;
            }
        }
        ConstraintSet c(s.variables, m0);
        auto [restricted, used] = reduction_step(current.system, c);
        for (const auto& g : used.generators) trace.accumulated.generators.push_back(g);
        trace.steps.push_back({restricted, decompose_domain(restricted, opts)});
        trace.fixed_point_step = step + 1;
    }
    return trace;
}

std::string StratificationReport::to_json_string() const {
    json j;
    j["ranks"] = profile.distinct_ranks;
    j["generic_rank_a"] = profile.generic_rank_a;
    j["generic_rank_af"] = profile.generic_rank_af;
    switch (top_case) {
        case TopCase::A: j["case"] = "a"; break;
        case TopCase::B: j["case"] = "b"; break;
        case TopCase::C: j["case"] = "c"; break;
    }
    auto gens_to_json = [](const std::map<int, std::vector<Polynomial>>& gens) {
        json out = json::object();
        for (const auto& [i, list] : gens) {
            json arr = json::array();
            for (const auto& g : list) arr.push_back(g.to_string());
            out[std::to_string(i)] = arr;
        }
        return out;
    };
    j["s_generators"] = gens_to_json(s_generators);
    j["l_generators"] = gens_to_json(l_generators);
    json families = json::array();
    for (const auto& family : m0_generator_families) {
        json fam;
        fam["label"] = family.label;
        json arr = json::array();
        for (const auto& g : family.generators) arr.push_back(g.to_string());
        fam["generators"] = arr;
        families.push_back(fam);
    }
    j["m0_generator_families"] = families;
    j["evidence"] = {{"seed", evidence.seed},
                     {"budget", evidence.budget},
                     {"hits", evidence.hits},
                     {"level", evidence.level}};
    return j.dump(2);
}

}  // namespace ide
