#pragma once

#include "ide/ide_system.hpp"

#include <map>
#include <string>
#include <vector>

namespace ide {

// Distinct attainable ranks of a and the generic ranks of a and [a, f].
struct RankProfile {
    std::vector<int> distinct_ranks;  // ascending, ends with generic_rank_a
    int generic_rank_a = 0;
    int generic_rank_af = 0;
};

enum class Stratum { M0, M1, M2 };

struct StratumLabel {
    Stratum stratum = Stratum::M2;
    int rank_a = 0;
    int rank_af = 0;
};

std::string to_string(Stratum s);

enum class TopCase { A, B, C };

struct GeneratorFamily {
    std::string label;
    std::vector<Polynomial> generators;
};

// Options for every sampling-based decision; fully deterministic per seed.
struct SamplingOptions {
    std::uint64_t seed = 2024;
    int budget = 10000;       // random starts for common-zero searches
    double box_half_width = 2.0;
    double zero_tol = 1e-9;   // |g(x)| below this counts as vanishing
    int max_hits = 24;        // stop the search after this many witnesses
};

struct SamplingEvidence {
    std::uint64_t seed = 0;
    int budget = 0;
    int hits = 0;
    std::string level;  // "proven" or "sampled"
};

struct StratificationReport {
    RankProfile profile;
    std::map<int, std::vector<Polynomial>> s_generators;  // rank bound -> S_i gens
    std::map<int, std::vector<Polynomial>> l_generators;  // rank bound -> L_i gens
    TopCase top_case = TopCase::C;
    std::vector<GeneratorFamily> m0_generator_families;
    SamplingEvidence evidence;
    std::vector<std::vector<double>> m0_witnesses;  // sampled points on the M0 locus

    std::vector<Polynomial> m0_generators() const;  // union over the families
    std::string to_json_string() const;
};

// S_i generators = (i+1)-minors of a; L_i generators = S_i plus the
// (i+1)-minors of [a, f]. Orders beyond the matrix size yield empty lists.
std::pair<std::vector<Polynomial>, std::vector<Polynomial>> minor_ideal_generators(
    const IdeSystem& s, int i);

RankProfile rank_profile(const IdeSystem& s, const SamplingOptions& opts = {});

// Numerical stratum of a point: singular values above tol * sigma_1 count
// toward the rank.
StratumLabel classify_point(const IdeSystem& s, std::span<const double> x, double tol = 1e-8);
StratumLabel classify_point(const IdeSystem& s, std::span<const double> x, double tol,
                            int generic_rank_a);

StratificationReport decompose_domain(const IdeSystem& s, const SamplingOptions& opts = {});

// One pass of the reduction algorithm: restacks the system with the
// candidate invariant constraints (appended with their derivatives) and
// returns it together with the accumulated constraint set.
std::pair<IdeSystem, ConstraintSet> reduction_step(const IdeSystem& s, const ConstraintSet& c);

struct ReductionStep {
    IdeSystem system;
    StratificationReport report;
};

struct ReductionTrace {
    std::vector<ReductionStep> steps;   // step 0 is the input system
    int fixed_point_step = 0;           // steps taken until the locus repeats
    bool reached_fixed_point = false;
    ConstraintSet accumulated;
};

// Iterates decompose_domain / reduction_step until the sampled M0 locus
// stops changing (or becomes empty).
ReductionTrace iterate_reduction(const IdeSystem& s, const SamplingOptions& opts = {},
                                 int max_steps = 8);

// Gauss-Newton search for common zeros of the generators from random starts
// inside the sampling box. Returns up to opts.max_hits witnesses.
std::vector<std::vector<double>> find_common_zeros(const std::vector<Polynomial>& gens,
                                                   const std::vector<std::string>& vars,
                                                   const SamplingOptions& opts);

// Sampled-locus comparison: every witness of one side satisfies the other.
bool sampled_locus_equal(const std::vector<Polynomial>& gens_a,
                         const std::vector<Polynomial>& gens_b,
                         const std::vector<std::string>& vars, const SamplingOptions& opts);

}  // namespace ide
