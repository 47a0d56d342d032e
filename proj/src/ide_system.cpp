#include "ide/ide_system.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ide {

using nlohmann::json;

// ---------------------------------------------------------------------------
// ConstraintSet / LinearRangeMap
// ---------------------------------------------------------------------------

ConstraintSet::ConstraintSet(std::vector<std::string> vars, std::vector<Polynomial> gens)
    : variables(std::move(vars)), generators(std::move(gens)) {
    for (const auto& g : generators)
        if (g.variables() != variables)
            throw IdeError("constraint generator uses a different variable list");
}

Eigen::VectorXd ConstraintSet::evaluate(std::span<const double> x) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(generators.size()));
    for (std::size_t i = 0; i < generators.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = generators[i].evaluate(x);
    return out;
}

PolynomialMatrix ConstraintSet::jacobian() const { return ide::jacobian(generators, variables); }

Eigen::MatrixXd ConstraintSet::jacobian_at(std::span<const double> x) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(generators.size()),
                        static_cast<Eigen::Index>(variables.size()));
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t j = 0; j < variables.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                generators[i].differentiate(variables[j]).evaluate(x);
    return out;
}

LinearRangeMap LinearRangeMap::identity(std::size_t m) {
    LinearRangeMap g;
    g.matrix.assign(m, std::vector<Rational>(m, Rational(0)));
    for (std::size_t i = 0; i < m; ++i) g.matrix[i][i] = 1;
    return g;
}

LinearRangeMap LinearRangeMap::from_doubles(const std::vector<std::vector<double>>& m) {
    LinearRangeMap g;
    g.matrix.reserve(m.size());
    for (const auto& row : m) {
        std::vector<Rational> r;
        r.reserve(row.size());
        for (double v : row) {
            if (!std::isfinite(v)) throw IdeError("range map entry is not finite");
            r.emplace_back(v);
        }
        g.matrix.push_back(std::move(r));
    }
    return g;
}

LinearRangeMap LinearRangeMap::selecting_rows(const std::vector<std::size_t>& rows,
                                              std::size_t m) {
    LinearRangeMap g;
    g.matrix.assign(rows.size(), std::vector<Rational>(m, Rational(0)));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= m) throw IdeError("row selection out of range");
        g.matrix[i][rows[i]] = 1;
    }
    return g;
}

// ---------------------------------------------------------------------------
// IdeSystem
// ---------------------------------------------------------------------------

Eigen::MatrixXd IdeSystem::eval_a(std::span<const double> x) const {
    auto flat = a.evaluate(x);
    Eigen::MatrixXd out(m(), n());
    for (int i = 0; i < m(); ++i)
        for (int j = 0; j < n(); ++j) out(i, j) = flat[static_cast<std::size_t>(i) * n() + j];
    return out;
}

Eigen::VectorXd IdeSystem::eval_f(std::span<const double> x) const {
    Eigen::VectorXd out(m());
    for (int i = 0; i < m(); ++i) out[i] = f[static_cast<std::size_t>(i)].evaluate(x);
    return out;
}

Eigen::VectorXd IdeSystem::residual(std::span<const double> x, const Eigen::VectorXd& v) const {
    if (v.size() != n()) throw IdeError("residual: velocity dimension mismatch");
    return eval_a(x) * v - eval_f(x);
}

IdeSystem make_system(std::string name, std::vector<std::string> vars, PolynomialMatrix a,
                      std::vector<Polynomial> f) {
    if (a.cols() != vars.size())
        throw IdeError("make_system: a has " + std::to_string(a.cols()) + " columns but " +
                       std::to_string(vars.size()) + " variables given");
    if (a.rows() != f.size())
        throw IdeError("make_system: a has " + std::to_string(a.rows()) + " rows but f has " +
                       std::to_string(f.size()) + " entries");
    if (a.variables() != vars) throw IdeError("make_system: a variable list mismatch");
    for (const auto& fi : f)
        if (fi.variables() != vars) throw IdeError("make_system: f variable list mismatch");
    IdeSystem s;
    s.name = std::move(name);
    s.variables = std::move(vars);
    s.a = std::move(a);
    s.f = std::move(f);
    return s;
}

IdeSystem restrict_by_constraints(const IdeSystem& s, const ConstraintSet& c,
                                  RestrictionForm form) {
    if (c.variables != s.variables)
        throw IdeError("restrict_by_constraints: constraint variables do not match the system");
    const std::size_t k = c.size();
    const std::size_t extra = form == RestrictionForm::Appended ? k : 2 * k;
    PolynomialMatrix a(s.a.rows() + extra, s.a.cols(), s.variables);
    std::vector<Polynomial> f = s.f;
    for (std::size_t i = 0; i < s.a.rows(); ++i)
        for (std::size_t j = 0; j < s.a.cols(); ++j) a.at(i, j) = s.a.at(i, j);
    std::size_t row = s.a.rows();
    if (form == RestrictionForm::AppendedWithDerivative) {
        // Rows Dphi_j(x) xdot = 0.
        for (std::size_t i = 0; i < k; ++i, ++row) {
            for (std::size_t j = 0; j < s.a.cols(); ++j)
                a.at(row, j) = c.generators[i].differentiate(s.variables[j]);
            f.push_back(Polynomial(s.variables));
        }
    }
    // Rows 0 = phi_j.
    for (std::size_t i = 0; i < k; ++i, ++row) f.push_back(c.generators[i]);
    return make_system(s.name + "_restricted", s.variables, std::move(a), std::move(f));
}

IdeSystem pullback(const IdeSystem& s, const PolynomialMap& pi) {
    if (pi.codomain_dimension() != static_cast<std::size_t>(s.n()))
        throw IdeError("pullback: map codomain dimension does not match the system domain");
    const auto& y = pi.domain_variables();
    PolynomialMatrix jac = jacobian(pi.components(), y);  // n x p
    PolynomialMatrix a(s.a.rows(), y.size(), y);
    for (std::size_t i = 0; i < s.a.rows(); ++i) {
        std::vector<Polynomial> row;  // a(pi(y)) row i
        row.reserve(s.a.cols());
        for (std::size_t kk = 0; kk < s.a.cols(); ++kk) row.push_back(s.a.at(i, kk).compose(pi));
        for (std::size_t j = 0; j < y.size(); ++j) {
            Polynomial sum(y);
            for (std::size_t kk = 0; kk < s.a.cols(); ++kk) sum += row[kk] * jac.at(kk, j);
            a.at(i, j) = std::move(sum);
        }
    }
    std::vector<Polynomial> f;
    f.reserve(s.f.size());
    for (const auto& fi : s.f) f.push_back(fi.compose(pi));
    return make_system(s.name + "_pullback", y, std::move(a), std::move(f));
}

IdeSystem project_range(const IdeSystem& s, const LinearRangeMap& g) {
    if (g.cols() != static_cast<std::size_t>(s.m()))
        throw IdeError("project_range: map has " + std::to_string(g.cols()) +
                       " columns but the system range has dimension " + std::to_string(s.m()));
    PolynomialMatrix a(g.rows(), s.a.cols(), s.variables);
    std::vector<Polynomial> f(g.rows(), Polynomial(s.variables));
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t kk = 0; kk < g.cols(); ++kk) {
            const Rational& w = g.matrix[i][kk];
            if (w == 0) continue;
            for (std::size_t j = 0; j < s.a.cols(); ++j) a.at(i, j) += s.a.at(kk, j) * w;
            f[i] += s.f[kk] * w;
        }
    }
    return make_system(s.name + "_projected", s.variables, std::move(a), std::move(f));
}

IdeSystem direct_sum(const IdeSystem& s1, const IdeSystem& s2) {
    if (s1.variables != s2.variables)
        throw IdeError("direct_sum: systems live over different variable lists");
    PolynomialMatrix a(s1.a.rows() + s2.a.rows(), s1.a.cols(), s1.variables);
    for (std::size_t i = 0; i < s1.a.rows(); ++i)
        for (std::size_t j = 0; j < s1.a.cols(); ++j) a.at(i, j) = s1.a.at(i, j);
    for (std::size_t i = 0; i < s2.a.rows(); ++i)
        for (std::size_t j = 0; j < s2.a.cols(); ++j) a.at(s1.a.rows() + i, j) = s2.a.at(i, j);
    std::vector<Polynomial> f = s1.f;
    f.insert(f.end(), s2.f.begin(), s2.f.end());
    return make_system(s1.name + "+" + s2.name, s1.variables, std::move(a), std::move(f));
}

IdeSystem homogenize(const IdeSystem& s) {
    std::string t = "t_hom";
    int suffix = 0;
    while (std::find(s.variables.begin(), s.variables.end(), t) != s.variables.end())
        t = "t_hom" + std::to_string(++suffix);
    std::vector<std::string> vars = s.variables;
    vars.push_back(t);
    PolynomialMatrix a(s.a.rows(), vars.size(), vars);
    for (std::size_t i = 0; i < s.a.rows(); ++i) {
        for (std::size_t j = 0; j < s.a.cols(); ++j) a.at(i, j) = s.a.at(i, j).with_variables(vars);
        a.at(i, s.a.cols()) = -s.f[i].with_variables(vars);
    }
    std::vector<Polynomial> f(s.a.rows(), Polynomial(vars));
    return make_system(s.name + "_hom", vars, std::move(a), std::move(f));
}

// ---------------------------------------------------------------------------
// JSON I/O
// ---------------------------------------------------------------------------

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IdeError("cannot open file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IdeError("malformed JSON in '" + path + "': " + e.what());
    }
    return j;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IdeError("cannot write file '" + path + "'");
    out << text;
}

IdeSystem model_from_json(const json& j) {
    try {
        std::string name = j.value("name", "model");
        std::vector<std::string> vars = j.at("variables").get<std::vector<std::string>>();
        std::map<std::string, Rational> params;
        std::vector<std::string> parse_vars = vars;
        if (j.contains("parameters")) {
            for (const auto& [key, value] : j.at("parameters").items()) {
                params[key] = parse_rational(value.get<std::string>());
                parse_vars.push_back(key);
            }
        }
        auto read_poly = [&](const std::string& text) {
            return parse_polynomial(text, parse_vars).substitute(params).with_variables(vars);
        };
        const auto& ja = j.at("a");
        const auto& jf = j.at("f");
        PolynomialMatrix a(ja.size(), vars.size(), vars);
        for (std::size_t i = 0; i < ja.size(); ++i) {
            if (ja[i].size() != vars.size())
                throw IdeError("model row " + std::to_string(i) + " has wrong length");
            for (std::size_t jj = 0; jj < vars.size(); ++jj)
                a.at(i, jj) = read_poly(ja[i][jj].get<std::string>());
        }
        std::vector<Polynomial> f;
        f.reserve(jf.size());
        for (const auto& e : jf) f.push_back(read_poly(e.get<std::string>()));
        IdeSystem s = make_system(name, vars, std::move(a), std::move(f));
        if (j.contains("lineage")) {
            ModelLineage lin;
            lin.level = j.at("lineage").value("level", 0);
            lin.parent_name = j.at("lineage").value("parent_name", "");
            lin.map_file = j.at("lineage").value("map_file", "");
            s.lineage = lin;
        }
        return s;
    } catch (const json::exception& e) {
        throw IdeError(std::string("invalid model file: ") + e.what());
    }
}

json model_to_json(const IdeSystem& s) {
    json j;
    j["name"] = s.name;
    j["variables"] = s.variables;
    j["parameters"] = json::object();
    json rows = json::array();
    for (std::size_t i = 0; i < s.a.rows(); ++i) {
        json row = json::array();
        for (std::size_t jj = 0; jj < s.a.cols(); ++jj) row.push_back(s.a.at(i, jj).to_string());
        rows.push_back(row);
    }
    j["a"] = rows;
    json f = json::array();
    for (const auto& fi : s.f) f.push_back(fi.to_string());
    j["f"] = f;
    if (s.lineage) {
        j["lineage"] = {{"level", s.lineage->level},
                        {"parent_name", s.lineage->parent_name},
                        {"map_file", s.lineage->map_file}};
    }
    return j;
}

}  // namespace

IdeSystem load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

IdeSystem model_from_json_string(const std::string& text) {
    try {
        return model_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw IdeError(std::string("malformed model JSON: ") + e.what());
    }
}

std::string model_to_json_string(const IdeSystem& s) { return model_to_json(s).dump(2); }

void save_model(const IdeSystem& s, const std::string& path) {
    write_file(path, model_to_json_string(s) + "\n");
}

PolynomialMap load_map(const std::string& path) {
    return map_from_json_string(read_json_file(path).dump());
}

PolynomialMap map_from_json_string(const std::string& text) {
    try {
        json j = json::parse(text);
        auto vars = j.at("domain_variables").get<std::vector<std::string>>();
        std::vector<Polynomial> comps;
        for (const auto& e : j.at("components"))
            comps.push_back(parse_polynomial(e.get<std::string>(), vars));
        return PolynomialMap(vars, std::move(comps));
    } catch (const json::exception& e) {
        throw IdeError(std::string("invalid map file: ") + e.what());
    }
}

std::string map_to_json_string(const PolynomialMap& map) {
    json j;
    j["domain_variables"] = map.domain_variables();
    json comps = json::array();
    for (const auto& c : map.components()) comps.push_back(c.to_string());
    j["components"] = comps;
    return j.dump(2);
}

ConstraintSet load_constraints(const std::string& path) {
    return constraints_from_json_string(read_json_file(path).dump());
}

ConstraintSet constraints_from_json_string(const std::string& text) {
    try {
        json j = json::parse(text);
        auto vars = j.at("variables").get<std::vector<std::string>>();
        std::vector<Polynomial> gens;
        for (const auto& e : j.at("generators"))
            gens.push_back(parse_polynomial(e.get<std::string>(), vars));
        return ConstraintSet(vars, std::move(gens));
    } catch (const json::exception& e) {
        throw IdeError(std::string("invalid constraint file: ") + e.what());
    }
}

std::string constraints_to_json_string(const ConstraintSet& c) {
    json j;
    j["variables"] = c.variables;
    json gens = json::array();
    for (const auto& g : c.generators) gens.push_back(g.to_string());
    j["generators"] = gens;
    return j.dump(2);
}

}  // namespace ide

