#include "chenverify/specfile.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace chenverify {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// "_<i>_<j>..." 1-based index suffix after a fixed prefix
bool parse_indices(const std::string& key, const std::string& prefix,
                   int count, std::vector<int>& out) {
    if (key.rfind(prefix, 0) != 0) return false;
    out.clear();
    size_t pos = prefix.size();
    for (int n = 0; n < count; ++n) {
        if (pos >= key.size() || key[pos] != '_') return false;
        ++pos;
        size_t start = pos;
        while (pos < key.size() && std::isdigit(key[pos])) ++pos;
        if (pos == start) return false;
        out.push_back(std::stoi(key.substr(start, pos - start)));
    }
    return pos == key.size();
}

DomainBox parse_domain(const std::string& value, int dim, int line) {
    std::vector<std::pair<double, double>> pairs;
    std::string token;
    std::istringstream is(value);
    std::string norm = value;
    for (char& ch : norm)
        if (ch == ';') ch = ' ';
    std::istringstream tok(norm);
    while (tok >> token) {
        size_t comma = token.find(',');
        if (comma == std::string::npos)
            throw SpecFileError("domain entry '" + token +
                                    "' is not of the form lo,hi",
                                line);
        try {
            double lo = std::stod(token.substr(0, comma));
            double hi = std::stod(token.substr(comma + 1));
            if (!(lo < hi))
                throw SpecFileError("domain entry '" + token +
                                        "' has lo >= hi",
                                    line);
            pairs.emplace_back(lo, hi);
        } catch (const SpecFileError&) {
            throw;
        } catch (const std::exception&) {
            throw SpecFileError("cannot parse domain entry '" + token + "'",
                                line);
        }
    }
    if (pairs.empty()) throw SpecFileError("empty domain", line);
    if (pairs.size() == 1) pairs.assign(static_cast<size_t>(dim), pairs[0]);
    if (static_cast<int>(pairs.size()) != dim)
        throw SpecFileError("domain has " + std::to_string(pairs.size()) +
                                " ranges, expected " + std::to_string(dim),
                            line);
    DomainBox box;
    box.lo = Eigen::VectorXd(dim);
    box.hi = Eigen::VectorXd(dim);
    for (int i = 0; i < dim; ++i) {
        box.lo[i] = pairs[static_cast<size_t>(i)].first;
        box.hi[i] = pairs[static_cast<size_t>(i)].second;
    }
    return box;
}

ExprAst parse_expr_checked(const std::string& text,
                           const std::vector<std::string>& vars, int line) {
    try {
        return ExprAst::parse(text, vars);
    } catch (const ParseError& e) {
        throw SpecFileError(std::string("expression error: ") + e.what(),
                            line);
    }
}

struct Line {
    int no;
    std::string key, value;
};

}  // namespace

ManifoldSpec parse_spec_text(const std::string& text, const std::string& name) {
    // split into (section, key=value) entries
    std::map<std::string, std::vector<Line>> sections;
    std::vector<std::string> section_order;
    {
        std::istringstream is(text);
        std::string raw;
        std::string current;
        int line_no = 0;
        while (std::getline(is, raw)) {
            ++line_no;
            size_t hash = raw.find('#');
            if (hash != std::string::npos) raw = raw.substr(0, hash);
            std::string line = trim(raw);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw SpecFileError("malformed section header", line_no);
                current = trim(line.substr(1, line.size() - 2));
                if (!sections.count(current)) section_order.push_back(current);
                sections[current];
                continue;
            }
            size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw SpecFileError("expected key=value", line_no);
            if (current.empty())
                throw SpecFileError("key outside of any [section]", line_no);
            sections[current].push_back(
                {line_no, trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
        }
    }
    for (const std::string& s : section_order)
        if (s != "manifold" && s != "metric" && s != "connection" &&
            s != "quaternionic" && s != "submanifold")
            throw SpecFileError("unknown section [" + s + "]", 0);

    if (!sections.count("manifold"))
        throw SpecFileError("missing [manifold] section", 0);

    ManifoldSpec spec;
    AmbientModel& m = spec.ambient;
    m.name = name;

    // [manifold]
    int dim = 0;
    std::string domain_value;
    int domain_line = 0;
    for (const Line& l : sections["manifold"]) {
        if (l.key == "dim") {
            try {
                dim = std::stoi(l.value);
            } catch (const std::exception&) {
                throw SpecFileError("bad dim '" + l.value + "'", l.no);
            }
        } else if (l.key == "domain") {
            domain_value = l.value;
            domain_line = l.no;
        } else {
            throw SpecFileError("unknown key '" + l.key + "' in [manifold]",
                                l.no);
        }
    }
    if (dim < 1) throw SpecFileError("dim must be a positive integer", 0);
    m.dim = dim;
    m.vars = chart_vars("x", dim);
    m.domain = domain_value.empty()
                   ? DomainBox::cube(dim, -1.0, 1.0)
                   : parse_domain(domain_value, dim, domain_line);

    // [metric]
    m.metric = ExprMatrix::zeros(dim, dim, m.vars);
    std::vector<bool> metric_set(static_cast<size_t>(dim * dim), false);
    if (sections.count("metric")) {
        for (const Line& l : sections["metric"]) {
            std::vector<int> idx;
            if (!parse_indices(l.key, "g", 2, idx))
                throw SpecFileError("unknown key '" + l.key + "' in [metric]",
                                    l.no);
            int i = idx[0] - 1, j = idx[1] - 1;
            if (i < 0 || j < 0 || i >= dim || j >= dim)
                throw SpecFileError("metric index out of range in '" + l.key +
                                        "'",
                                    l.no);
            size_t a = static_cast<size_t>(std::min(i, j) * dim +
                                           std::max(i, j));
            if (metric_set[a])
                throw SpecFileError("duplicate metric entry '" + l.key + "'",
                                    l.no);
            metric_set[a] = true;
            ExprAst e = parse_expr_checked(l.value, m.vars, l.no);
            m.metric(i, j) = e;
            m.metric(j, i) = e;
        }
    }
    for (int i = 0; i < dim; ++i)
        if (!metric_set[static_cast<size_t>(i * dim + i)])
            throw SpecFileError("missing required diagonal metric entry g_" +
                                    std::to_string(i + 1) + "_" +
                                    std::to_string(i + 1),
                                0);

    // [connection]
    m.mode = ConnectionMode::Skewness;
    m.skewness.assign(static_cast<size_t>(dim),
                      ExprMatrix::zeros(dim, dim, m.vars));
    if (sections.count("connection")) {
        // mode first
        for (const Line& l : sections["connection"]) {
            if (l.key != "mode") continue;
            if (l.value == "skewness")
                m.mode = ConnectionMode::Skewness;
            else if (l.value == "explicit")
                m.mode = ConnectionMode::Explicit;
            else
                throw SpecFileError("mode must be skewness or explicit", l.no);
        }
        if (m.mode == ConnectionMode::Explicit) {
            m.skewness.clear();
            m.gamma_expr.assign(static_cast<size_t>(dim),
                                ExprMatrix::zeros(dim, dim, m.vars));
        }
        std::map<std::array<int, 3>, int> seen;  // sorted K triple -> line
        for (const Line& l : sections["connection"]) {
            if (l.key == "mode") continue;
            std::vector<int> idx;
            if (m.mode == ConnectionMode::Skewness) {
                if (!parse_indices(l.key, "K", 3, idx))
                    throw SpecFileError(
                        "unknown key '" + l.key +
                            "' in [connection] (skewness mode expects "
                            "K_<i>_<j>_<k>)",
                        l.no);
                int a = idx[0] - 1, b = idx[1] - 1, c = idx[2] - 1;
                if (a < 0 || b < 0 || c < 0 || a >= dim || b >= dim ||
                    c >= dim)
                    throw SpecFileError("skewness index out of range", l.no);
                std::array<int, 3> key{a, b, c};
                std::sort(key.begin(), key.end());
                if (seen.count(key))
                    throw SpecFileError(
                        "duplicate skewness entry (the totally symmetric "
                        "orbit of '" +
                            l.key + "' already set on line " +
                            std::to_string(seen[key]) + ")",
                        l.no);
                seen[key] = l.no;
                ExprAst e = parse_expr_checked(l.value, m.vars, l.no);
                int p[6][3] = {{a, b, c}, {a, c, b}, {b, a, c},
                               {b, c, a}, {c, a, b}, {c, b, a}};
                for (auto& q : p)
                    m.skewness[static_cast<size_t>(q[0])](q[1], q[2]) = e;
            } else {
                if (!parse_indices(l.key, "Gamma", 3, idx))
                    throw SpecFileError(
                        "unknown key '" + l.key +
                            "' in [connection] (explicit mode expects "
                            "Gamma_<k>_<i>_<j>)",
                        l.no);
                int k = idx[0] - 1, i = idx[1] - 1, j = idx[2] - 1;
                if (k < 0 || i < 0 || j < 0 || k >= dim || i >= dim ||
                    j >= dim)
                    throw SpecFileError("gamma index out of range", l.no);
                m.gamma_expr[static_cast<size_t>(k)](i, j) =
                    parse_expr_checked(l.value, m.vars, l.no);
            }
        }
    }

    // [quaternionic]
    if (sections.count("quaternionic")) {
        m.has_J = true;
        if (dim % 4 != 0)
            throw SpecFileError(
                "quaternionic structure requires dim divisible by 4", 0);
        for (int a = 0; a < 3; ++a) {
            m.J[size_t(a)] = ExprMatrix::zeros(dim, dim, m.vars);
            m.omega[size_t(a)].assign(static_cast<size_t>(dim),
                                      ExprAst::constant(0.0, m.vars));
        }
        for (const Line& l : sections["quaternionic"]) {
            if (l.key == "c") {
                if (l.value == "unknown") {
                    m.c.reset();
                } else {
                    try {
                        m.c = std::stod(l.value);
                    } catch (const std::exception&) {
                        throw SpecFileError("bad c value '" + l.value + "'",
                                            l.no);
                    }
                }
                continue;
            }
            std::vector<int> idx;
            bool handled = false;
            for (int a = 1; a <= 3 && !handled; ++a) {
                if (parse_indices(l.key, "J" + std::to_string(a), 2, idx)) {
                    int i = idx[0] - 1, j = idx[1] - 1;
                    if (i < 0 || j < 0 || i >= dim || j >= dim)
                        throw SpecFileError("J index out of range", l.no);
                    m.J[static_cast<size_t>(a - 1)](i, j) =
                        parse_expr_checked(l.value, m.vars, l.no);
                    handled = true;
                } else if (parse_indices(l.key, "omega" + std::to_string(a),
                                         1, idx)) {
                    int i = idx[0] - 1;
                    if (i < 0 || i >= dim)
                        throw SpecFileError("omega index out of range", l.no);
                    m.omega[static_cast<size_t>(a - 1)][static_cast<size_t>(
                        i)] = parse_expr_checked(l.value, m.vars, l.no);
                    handled = true;
                }
            }
            if (!handled)
                throw SpecFileError(
                    "unknown key '" + l.key + "' in [quaternionic]", l.no);
        }
    }

    // [submanifold]
    if (sections.count("submanifold")) {
        SubmanifoldSpec sub;
        int n = 0;
        std::string dom;
        int dom_line = 0;
        for (const Line& l : sections["submanifold"]) {
            if (l.key == "n") {
                try {
                    n = std::stoi(l.value);
                } catch (const std::exception&) {
                    throw SpecFileError("bad n '" + l.value + "'", l.no);
                }
            } else if (l.key == "domain") {
                dom = l.value;
                dom_line = l.no;
            }
        }
        if (n < 1)
            throw SpecFileError("submanifold n must be a positive integer", 0);
        if (n > dim)
            throw SpecFileError("submanifold dimension exceeds ambient", 0);
        sub.n = n;
        sub.vars = chart_vars("u", n);
        sub.domain = dom.empty() ? DomainBox::cube(n, -1.0, 1.0)
                                 : parse_domain(dom, n, dom_line);
        sub.immersion.assign(static_cast<size_t>(dim),
                             ExprAst::constant(0.0, sub.vars));
        for (const Line& l : sections["submanifold"]) {
            if (l.key == "n" || l.key == "domain") continue;
            std::vector<int> idx;
            if (!parse_indices(l.key, "f", 1, idx))
                throw SpecFileError(
                    "unknown key '" + l.key + "' in [submanifold]", l.no);
            int k = idx[0] - 1;
            if (k < 0 || k >= dim)
                throw SpecFileError("immersion index out of range", l.no);
            sub.immersion[static_cast<size_t>(k)] =
                parse_expr_checked(l.value, sub.vars, l.no);
        }
        spec.submanifold = std::move(sub);
    }

    return spec;
}

ManifoldSpec read_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string stem = path;
    size_t slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    return parse_spec_text(buf.str(), stem);
}

namespace {

void write_domain(std::ostream& os, const DomainBox& box) {
    os << "domain=";
    for (int i = 0; i < box.dim(); ++i) {
        if (i) os << ";";
        os << fmt(box.lo[i]) << "," << fmt(box.hi[i]);
    }
    os << "\n";
}

}  // namespace

std::string write_spec_text(const ManifoldSpec& spec) {
    const AmbientModel& m = spec.ambient;
    std::ostringstream os;
    os << "[manifold]\n";
    os << "dim=" << m.dim << "\n";
    write_domain(os, m.domain);

    os << "[metric]\n";
    for (int i = 0; i < m.dim; ++i)
        for (int j = i; j < m.dim; ++j) {
            if (i != j && m.metric(i, j).is_constant_zero()) continue;
            os << "g_" << (i + 1) << "_" << (j + 1) << "="
               << m.metric(i, j).to_string() << "\n";
        }

    os << "[connection]\n";
    if (m.mode == ConnectionMode::Skewness) {
        os << "mode=skewness\n";
        for (int a = 0; a < m.dim; ++a)
            for (int b = a; b < m.dim; ++b)
                for (int c = b; c < m.dim; ++c) {
                    const ExprAst& e = m.skewness[static_cast<size_t>(a)](b, c);
                    if (e.is_constant_zero()) continue;
                    os << "K_" << (a + 1) << "_" << (b + 1) << "_" << (c + 1)
                       << "=" << e.to_string() << "\n";
                }
    } else {
        os << "mode=explicit\n";
        for (int k = 0; k < m.dim; ++k)
            for (int i = 0; i < m.dim; ++i)
                for (int j = 0; j < m.dim; ++j) {
                    const ExprAst& e =
                        m.gamma_expr[static_cast<size_t>(k)](i, j);
                    if (e.is_constant_zero()) continue;
                    os << "Gamma_" << (k + 1) << "_" << (i + 1) << "_"
                       << (j + 1) << "=" << e.to_string() << "\n";
                }
    }

    if (m.has_J) {
        os << "[quaternionic]\n";
        for (int a = 0; a < 3; ++a) {
            for (int i = 0; i < m.dim; ++i)
                for (int j = 0; j < m.dim; ++j) {
                    const ExprAst& e = m.J[static_cast<size_t>(a)](i, j);
                    if (e.is_constant_zero()) continue;
                    os << "J" << (a + 1) << "_" << (i + 1) << "_" << (j + 1)
                       << "=" << e.to_string() << "\n";
                }
            for (int i = 0; i < m.dim; ++i) {
                const ExprAst& e =
                    m.omega[static_cast<size_t>(a)][static_cast<size_t>(i)];
                if (e.is_constant_zero()) continue;
                os << "omega" << (a + 1) << "_" << (i + 1) << "="
                   << e.to_string() << "\n";
            }
        }
        if (m.c)
            os << "c=" << fmt(*m.c) << "\n";
        else
            os << "c=unknown\n";
    }

    if (spec.submanifold) {
        const SubmanifoldSpec& s = *spec.submanifold;
        os << "[submanifold]\n";
        os << "n=" << s.n << "\n";
        write_domain(os, s.domain);
        for (size_t k = 0; k < s.immersion.size(); ++k) {
            if (s.immersion[k].is_constant_zero()) continue;
            os << "f_" << (k + 1) << "=" << s.immersion[k].to_string() << "\n";
        }
    }
    return os.str();
}

void write_spec_file(const ManifoldSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write spec file '" + path + "'");
    out << write_spec_text(spec);
}

}  // namespace chenverify
