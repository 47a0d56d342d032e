#include "ide/desingularization.hpp"

#include <algorithm>
#include <cmath>

namespace ide {

DesingMap DesingMap::from_map(PolynomialMap map, std::optional<ConstraintSet> source_constraints) {
    DesingMap out;
    out.jacobian = ide::jacobian(map.components(), map.domain_variables());
    if (source_constraints && source_constraints->variables != map.domain_variables())
        throw IdeError("source constraints must live over the map's domain variables");
    out.map = std::move(map);
    out.source_constraints = std::move(source_constraints);
    return out;
}

Eigen::MatrixXd DesingMap::jacobian_at(std::span<const double> y) const {
    auto flat = jacobian.evaluate(y);
    Eigen::MatrixXd out(jacobian.rows(), jacobian.cols());
    for (std::size_t i = 0; i < jacobian.rows(); ++i)
        for (std::size_t j = 0; j < jacobian.cols(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                flat[i * jacobian.cols() + j];
    return out;
}

LiftedSystem lift_system(const IdeSystem& parent, const DesingMap& m) {
    if (m.target_dimension() != static_cast<std::size_t>(parent.n()))
        throw IdeError("lift_system: map target dimension does not match the parent domain");
    IdeSystem lifted = pullback(parent, m.map);
    if (m.source_constraints && !m.source_constraints->generators.empty())
        lifted = restrict_by_constraints(lifted, *m.source_constraints, RestrictionForm::Appended);

    LiftedSystem out;
    out.level = parent.lineage ? parent.lineage->level + 1 : 1;
    out.parent = parent;
    out.map = m;
    lifted.name = parent.name + "_lift" + std::to_string(out.level);
    lifted.lineage = ModelLineage{out.level, parent.name, ""};
    out.system = std::move(lifted);
    return out;
}

Trajectory project_solution(const LiftedSystem& l, const Trajectory& traj) {
    Trajectory out;
    out.variables = l.parent.variables;
    for (const auto& seg : traj.segments) {
        TrajectorySegment pseg;
        pseg.system_id = l.parent.name;
        pseg.termination = seg.termination;
        for (std::size_t i = 0; i < seg.size(); ++i) {
            const Eigen::VectorXd& y = seg.states[i];
            std::span<const double> ys(y.data(), static_cast<std::size_t>(y.size()));
            auto xv = l.map.apply(ys);
            Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xv.data(), xv.size());
            Eigen::VectorXd xdot = l.map.jacobian_at(ys) * seg.derivs[i];
            std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));

            StepDiagnostics diag;
            diag.residual = l.parent.residual(xs, xdot).norm();
            Eigen::MatrixXd A = l.parent.eval_a(xs);
            Eigen::MatrixXd AF(A.rows(), A.cols() + 1);
            AF << A, l.parent.eval_f(xs);
            Eigen::JacobiSVD<Eigen::MatrixXd> sa(A);
            Eigen::JacobiSVD<Eigen::MatrixXd> saf(AF);
            auto rank_of = [](const Eigen::JacobiSVD<Eigen::MatrixXd>& svd) {
                const auto& sigma = svd.singularValues();
                if (sigma.size() == 0 || sigma[0] == 0.0) return 0;
                int r = 0;
                for (Eigen::Index k = 0; k < sigma.size(); ++k)
                    if (sigma[k] > 1e-8 * sigma[0]) ++r;
                return r;
            };
            diag.rank_a = rank_of(sa);
            diag.rank_af = rank_of(saf);

            pseg.times.push_back(seg.times[i]);
            pseg.states.push_back(std::move(x));
            pseg.derivs.push_back(std::move(xdot));
            pseg.diagnostics.push_back(diag);
        }
        out.segments.push_back(std::move(pseg));
    }
    return out;
}

namespace {

std::pair<double, double> time_endpoints(const Trajectory& traj) {
    if (traj.segments.empty() || traj.segments.front().times.empty())
        throw IdeError("glue_pieces: empty trajectory piece");
    return {traj.segments.front().times.front(), traj.segments.back().times.back()};
}

const Eigen::VectorXd& first_state(const Trajectory& traj) {
    return traj.segments.front().states.front();
}

const Eigen::VectorXd& last_state(const Trajectory& traj) {
    return traj.segments.back().states.back();
}

}  // namespace

PiecewiseSolution glue_pieces(std::vector<std::pair<int, Trajectory>> pieces, double glue_tol,
                              double time_tol) {
    PiecewiseSolution out;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        auto [start_i, end_i] = time_endpoints(pieces[i].second);
        auto [start_next, end_next] = time_endpoints(pieces[i + 1].second);
        if (std::abs(end_i - start_next) > time_tol) {
            double lo_i = std::min(start_i, end_i), hi_i = std::max(start_i, end_i);
            double lo_n = std::min(start_next, end_next), hi_n = std::max(start_next, end_next);
            if (std::max(lo_i, lo_n) < std::min(hi_i, hi_n))
                throw IdeError("glue_pieces: overlapping time intervals");
            throw IdeError("glue_pieces: adjacent pieces do not share an endpoint time");
        }
        const Eigen::VectorXd& left = last_state(pieces[i].second);
        const Eigen::VectorXd& right = first_state(pieces[i + 1].second);
        if (left.size() != right.size())
            throw IdeError("glue_pieces: pieces have different state dimensions");
        Junction junction;
        junction.left_state = left;
        junction.right_state = right;
        junction.gap = (left - right).norm();
        junction.continuous = junction.gap <= glue_tol;
        out.junctions.push_back(std::move(junction));
    }
    out.pieces = std::move(pieces);
    return out;
}

ProjectionResidualReport verify_projection_residual(const IdeSystem& parent, const DesingMap& m,
                                                    std::span<const double> y,
                                                    const Eigen::VectorXd& ydot) {
    if (y.size() != m.source_dimension() || ydot.size() != static_cast<Eigen::Index>(y.size()))
        throw IdeError("verify_projection_residual: dimension mismatch");
    ProjectionResidualReport report;

    IdeSystem lifted = pullback(parent, m.map);
    report.lifted_residual = lifted.residual(y, ydot).norm();

    auto xv = m.apply(y);
    Eigen::VectorXd xdot = m.jacobian_at(y) * ydot;
    report.chainrule_residual = parent.residual(xv, xdot).norm();
    report.identity_gap = std::abs(report.lifted_residual - report.chainrule_residual);

    // Central finite differences of pi against the symbolic Jacobian.
    const double h = 1e-6;
    double fd_err = 0.0;
    Eigen::MatrixXd J = m.jacobian_at(y);
    std::vector<double> yp(y.begin(), y.end()), ym(y.begin(), y.end());
    for (std::size_t j = 0; j < y.size(); ++j) {
        yp[j] += h;
        ym[j] -= h;
        auto fp = m.apply(yp);
        auto fm = m.apply(ym);
        for (std::size_t i = 0; i < m.target_dimension(); ++i) {
            double fd = (fp[i] - fm[i]) / (2.0 * h);
            fd_err = std::max(fd_err, std::abs(fd - J(static_cast<Eigen::Index>(i),
                                                      static_cast<Eigen::Index>(j))));
        }
        yp[j] = y[j];
        ym[j] = y[j];
    }
    report.jacobian_fd_error = fd_err;
    double scale = 1.0 + std::max(report.lifted_residual, report.chainrule_residual);
    report.pass = report.identity_gap < 1e-12 * scale && report.jacobian_fd_error < 1e-6;
    return report;
}

Trajectory eliminate_parameter(const Trajectory& homogeneous) {
    if (homogeneous.variables.empty())
        throw IdeError("eliminate_parameter: trajectory has no variables");
    Trajectory out;
    out.variables.assign(homogeneous.variables.begin(), homogeneous.variables.end() - 1);
    for (const auto& seg : homogeneous.segments) {
        TrajectorySegment x_seg;
        x_seg.system_id = seg.system_id;
        x_seg.termination = seg.termination;
        const Eigen::Index n = static_cast<Eigen::Index>(out.variables.size());
        for (std::size_t i = 0; i < seg.size(); ++i) {
            x_seg.times.push_back(seg.states[i][n]);  // the homogenization time
            x_seg.states.push_back(seg.states[i].head(n));
            x_seg.derivs.push_back(seg.derivs[i].head(n));
            x_seg.diagnostics.push_back(seg.diagnostics[i]);
        }
        out.segments.push_back(std::move(x_seg));
    }
    return out;
}

}  // namespace ide
