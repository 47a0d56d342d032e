#include <CLI11.hpp>

#include "ide/desingularization.hpp"
#include "ide/elastic_sphere.hpp"
#include "ide/solver.hpp"
#include "ide/stratification.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace ide;

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw IdeError("cannot parse coordinate '" + item + "'");
        }
    }
    if (out.empty()) throw IdeError("empty coordinate list");
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw IdeError("cannot write '" + out_path + "'");
    out << text;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string chart_csv(const sphere::ChartTrajectory& traj, const std::string& header,
                      bool with_first_integral) {
    std::ostringstream os;
    os << header << "\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_number(traj.times[i]);
        for (Eigen::Index j = 0; j < traj.states[i].size(); ++j)
            os << ", " << format_number(traj.states[i][j]);
        if (with_first_integral)
            os << ", " << format_number(
                   sphere::first_integral(traj.states[i][0], traj.states[i][1]));
        os << "\n";
    }
    os << "# termination " << to_string(traj.termination) << "\n";
    return os.str();
}

struct CommonFlags {
    std::string out;
    double tol = 1e-8;
    std::uint64_t seed = 2024;
    int samples = 1000;
    int budget = 10000;
};

int cmd_stratify(const std::string& model_path, const CommonFlags& flags) {
    IdeSystem s = load_model(model_path);
    SamplingOptions opts;
    opts.seed = flags.seed;
    opts.budget = flags.budget;
    auto report = decompose_domain(s, opts);
    emit(report.to_json_string() + "\n", flags.out);
    return 0;
}

int cmd_classify(const std::string& model_path, const std::string& point_text, double tol) {
    IdeSystem s = load_model(model_path);
    auto point = parse_point(point_text);
    if (static_cast<int>(point.size()) != s.n())
        throw IdeError("point has " + std::to_string(point.size()) +
                       " coordinates but the model has " + std::to_string(s.n()) + " variables");
    auto label = classify_point(s, point, tol);
    std::cout << to_string(label.stratum) << " rank_a=" << label.rank_a
              << " rank_af=" << label.rank_af << "\n";
    return 0;
}

struct IntegrateFlags {
    std::string x0;
    double t0 = 0.0;
    double t1 = 1.0;
    double step = 1e-3;
    bool homogeneous = false;
    int direction = +1;
    std::string project_path;
    int project_every = 1;
};

int cmd_integrate(const std::string& model_path, const IntegrateFlags& iflags,
                  const CommonFlags& flags) {
    IdeSystem s = load_model(model_path);
    auto x0 = parse_point(iflags.x0);
    IntegrationOptions opts;
    opts.step = iflags.step;
    opts.t1 = iflags.t1;
    opts.rank_tol = flags.tol;
    opts.orientation = iflags.direction;
    opts.project_every = iflags.project_every;
    if (!iflags.project_path.empty())
        opts.projection_constraints = load_constraints(iflags.project_path);
    Trajectory traj;
    if (iflags.homogeneous) {
        opts.t0 = 0.0;  // curve parameter range [0, t1]
        traj = integrate_homogeneous(s, x0, iflags.t0, opts);
    } else {
        opts.t0 = iflags.t0;
        traj = integrate(s, x0, opts);
    }
    emit(trajectory_to_csv(traj), flags.out);
    return 0;
}

int cmd_lift(const std::string& model_path, const std::string& map_path,
             const std::string& constraints_path, const CommonFlags& flags) {
    IdeSystem s = load_model(model_path);
    PolynomialMap map = load_map(map_path);
    std::optional<ConstraintSet> constraints;
    if (!constraints_path.empty()) constraints = load_constraints(constraints_path);
    auto lifted = lift_system(s, DesingMap::from_map(std::move(map), std::move(constraints)));
    lifted.system.lineage->map_file = map_path;
    emit(model_to_json_string(lifted.system) + "\n", flags.out);
    return 0;
}

struct SphereFlags {
    std::string mode = "full";
    std::string alpha = "2", beta = "1", epsilon = "1";
    std::string x0;
    std::string chart0;
    double t0 = 0.0;
    double t1 = 1.0;
    double step = 1e-3;
};

int cmd_sphere(const SphereFlags& sflags, const CommonFlags& flags) {
    auto p = sphere::SphereParams::make(parse_rational(sflags.alpha), parse_rational(sflags.beta),
                                        parse_rational(sflags.epsilon));

    auto ambient_initial = [&]() -> std::vector<double> {
        if (!sflags.chart0.empty()) {
            auto c = parse_point(sflags.chart0);
            if (c.size() != 3) throw IdeError("chart initial data needs theta,phi,psi");
            auto x = sphere::chart_embed({c[0], c[1], c[2]}, p).as_vector();
            return {x.data(), x.data() + x.size()};
        }
        auto x = parse_point(sflags.x0);
        if (x.size() != 7) throw IdeError("ambient initial data needs 7 coordinates");
        return x;
    };
    auto integrate_ambient = [&](const IdeSystem& system, bool project) {
        IntegrationOptions opts;
        opts.step = sflags.step;
        opts.t0 = sflags.t0;
        opts.t1 = sflags.t1;
        opts.rank_tol = flags.tol;
        if (project) opts.projection_constraints = sphere::manifold_constraints(p);
        auto x0 = ambient_initial();
        return integrate(system, x0, opts);
    };

    const std::string& mode = sflags.mode;
    bool wants_integration = !sflags.x0.empty() || !sflags.chart0.empty();
    if (mode == "full") {
        if (wants_integration)
            emit(trajectory_to_csv(integrate_ambient(sphere::build_full_system(p), false)),
                 flags.out);
        else
            emit(model_to_json_string(sphere::build_full_system(p)) + "\n", flags.out);
    } else if (mode == "lifted" || mode == "extended") {
        if (wants_integration) {
            // The tangency-completed realization drives the motion; the
            // manifold constraints stabilize it.
            auto traj = integrate_ambient(sphere::build_extended_lifted_system(p), true);
            emit(trajectory_to_csv(traj), flags.out);
        } else if (mode == "lifted") {
            emit(model_to_json_string(sphere::build_lifted_system(p).system) + "\n", flags.out);
        } else {
            emit(model_to_json_string(sphere::build_extended_lifted_system(p)) + "\n", flags.out);
        }
    } else if (mode == "branch-z3") {
        emit(model_to_json_string(sphere::build_branch_z3_system(p)) + "\n", flags.out);
    } else if (mode == "branch-z12") {
        emit(model_to_json_string(sphere::build_branch_axis_system(p)) + "\n", flags.out);
    } else if (mode == "reduced") {
        auto c = parse_point(sflags.chart0.empty() ? sflags.x0 : sflags.chart0);
        if (c.size() != 3) throw IdeError("chart initial data needs theta,phi,psi");
        auto traj =
            sphere::integrate_reduced({c[0], c[1], c[2]}, p, sflags.t0, sflags.t1, sflags.step);
        emit(chart_csv(traj, "t, theta, phi, psi", false), flags.out);
    } else if (mode == "planar") {
        auto c = parse_point(sflags.chart0.empty() ? sflags.x0 : sflags.chart0);
        if (c.size() != 2) throw IdeError("planar initial data needs theta,w");
        auto traj = sphere::integrate_planar(c[0], c[1], p, sflags.t0, sflags.t1, sflags.step);
        emit(chart_csv(traj, "t, theta, w, first_integral", true), flags.out);
    } else if (mode == "verify-a") {
        auto report = sphere::verify_manifold_rank(p, flags.samples, flags.seed, flags.tol);
        emit(report.to_json_string() + "\n", flags.out);
    } else if (mode == "verify-b") {
        auto report = sphere::verify_chart_rank(p, flags.samples, flags.seed, flags.tol);
        emit(report.to_json_string() + "\n", flags.out);
    } else {
        throw IdeError("unknown sphere mode '" + mode + "'");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"implicit differential equations: stratification, desingularization lifts "
                 "and constant-rank integration"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string model_path, point_text, map_path, constraints_path;
    IntegrateFlags iflags;
    SphereFlags sflags;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", flags.out, "write the result to this file instead of stdout");
        cmd->add_option("--tol", flags.tol, "numerical rank tolerance (relative)");
        cmd->add_option("--seed", flags.seed, "seed for all sampling");
        cmd->add_option("--samples", flags.samples, "sample count for verification sweeps");
        cmd->add_option("--budget", flags.budget, "random starts for zero-locus searches");
    };

    auto* stratify = app.add_subcommand("stratify", "rank stratification report for a model");
    stratify->add_option("model", model_path, "model JSON file")->required();
    add_common(stratify);

    auto* classify = app.add_subcommand("classify", "stratum of a single point");
    classify->add_option("model", model_path, "model JSON file")->required();
    classify->add_option("--point", point_text, "comma-separated coordinates")->required();
    classify->add_option("--tol", flags.tol, "numerical rank tolerance (relative)");

    auto* integrate = app.add_subcommand("integrate", "integrate a model from an initial state");
    integrate->add_option("model", model_path, "model JSON file")->required();
    integrate->add_option("--x0", iflags.x0, "initial state, comma-separated")->required();
    integrate->add_option("--t0", iflags.t0, "initial time");
    integrate->add_option("--t1", iflags.t1, "final time (arc length in homogeneous mode)");
    integrate->add_option("--step", iflags.step, "fixed step size");
    integrate->add_flag("--homogeneous", iflags.homogeneous,
                        "follow the kernel of [a, -f] through impasse points");
    integrate->add_option("--direction", iflags.direction,
                          "initial orientation in homogeneous mode (+1/-1)");
    integrate->add_option("--project", iflags.project_path,
                          "constraint JSON file for Gauss-Newton projection");
    integrate->add_option("--project-every", iflags.project_every, "steps between projections");
    add_common(integrate);

    auto* lift = app.add_subcommand("lift", "pull a model back along a desingularization map");
    lift->add_option("model", model_path, "model JSON file")->required();
    lift->add_option("--map", map_path, "map JSON file")->required();
    lift->add_option("--constraints", constraints_path,
                     "constraints defining the source manifold");
    add_common(lift);

    auto* sphere_cmd = app.add_subcommand("sphere", "the symmetric elastic sphere example");
    sphere_cmd->add_option("--mode", sflags.mode,
                           "full|lifted|extended|branch-z3|branch-z12|reduced|planar|"
                           "verify-a|verify-b");
    sphere_cmd->add_option("--alpha", sflags.alpha, "I3/I1 as an exact rational");
    sphere_cmd->add_option("--beta", sflags.beta, "M r^2 / I1 as an exact rational");
    sphere_cmd->add_option("--epsilon", sflags.epsilon, "normalized energy, exact rational");
    sphere_cmd->add_option("--x0", sflags.x0, "initial state (mode-specific coordinates)");
    sphere_cmd->add_option("--chart0", sflags.chart0, "initial chart point theta,phi,psi");
    sphere_cmd->add_option("--t0", sflags.t0, "initial time");
    sphere_cmd->add_option("--t1", sflags.t1, "final time");
    sphere_cmd->add_option("--step", sflags.step, "fixed step size");
    add_common(sphere_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (stratify->parsed()) return cmd_stratify(model_path, flags);
        if (classify->parsed()) return cmd_classify(model_path, point_text, flags.tol);
        if (integrate->parsed()) return cmd_integrate(model_path, iflags, flags);
        if (lift->parsed()) return cmd_lift(model_path, map_path, constraints_path, flags);
        if (sphere_cmd->parsed()) return cmd_sphere(sflags, flags);
    } catch (const NoSolutionAtPoint& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
