#include "chenverify/expression.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace chenverify {

namespace {

const char* kFunctionNames[] = {"sin", "cos", "exp", "log", "sqrt", "tanh"};
const UnaryFn kFunctionIds[] = {UnaryFn::Sin, UnaryFn::Cos, UnaryFn::Exp,
                                UnaryFn::Log, UnaryFn::Sqrt, UnaryFn::Tanh};

bool lookup_function(const std::string& name, UnaryFn& out) {
    for (size_t i = 0; i < 6; ++i) {
        if (name == kFunctionNames[i]) {
            out = kFunctionIds[i];
            return true;
        }
    }
    return false;
}

const char* function_name(UnaryFn fn) {
    switch (fn) {
        case UnaryFn::Sin: return "sin";
        case UnaryFn::Cos: return "cos";
        case UnaryFn::Exp: return "exp";
        case UnaryFn::Log: return "log";
        case UnaryFn::Sqrt: return "sqrt";
        case UnaryFn::Tanh: return "tanh";
        case UnaryFn::Neg: return "-";
    }
    return "?";
}

struct Parser {
    std::string_view text;
    const std::vector<std::string>& vars;
    std::vector<ExprNode>& nodes;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() &&
               (text[pos] == ' ' || text[pos] == '\t'))
            ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    int push(ExprNode n) {
        nodes.push_back(n);
        return static_cast<int>(nodes.size() - 1);
    }

    int number_node(double v) {
        ExprNode n;
        n.kind = ExprNode::Kind::Number;
        n.number = v;
        return push(n);
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                int rhs = parse_term();
                ExprNode n;
                n.kind = ExprNode::Kind::Binary;
                n.op = BinaryOp::Add;
                n.a = lhs;
                n.b = rhs;
                lhs = push(n);
            } else if (accept('-')) {
                int rhs = parse_term();
                ExprNode n;
                n.kind = ExprNode::Kind::Binary;
                n.op = BinaryOp::Sub;
                n.a = lhs;
                n.b = rhs;
                lhs = push(n);
            } else {
                return lhs;
            }
        }
    }

    int parse_term() {
        int lhs = parse_factor();
        for (;;) {
            if (accept('*')) {
                int rhs = parse_factor();
                ExprNode n;
                n.kind = ExprNode::Kind::Binary;
                n.op = BinaryOp::Mul;
                n.a = lhs;
                n.b = rhs;
                lhs = push(n);
            } else if (accept('/')) {
                int rhs = parse_factor();
                ExprNode n;
                n.kind = ExprNode::Kind::Binary;
                n.op = BinaryOp::Div;
                n.a = lhs;
                n.b = rhs;
                lhs = push(n);
            } else {
                return lhs;
            }
        }
    }

    int parse_factor() {
        if (accept('-')) {
            int a = parse_factor();
            ExprNode n;
            n.kind = ExprNode::Kind::Unary;
            n.fn = UnaryFn::Neg;
            n.a = a;
            return push(n);
        }
        return parse_power();
    }

    int parse_power() {
        int base = parse_atom();
        if (accept('^')) {
            int expo = parse_factor();
            ExprNode n;
            n.kind = ExprNode::Kind::Binary;
            n.op = BinaryOp::Pow;
            n.a = base;
            n.b = expo;
            return push(n);
        }
        return base;
    }

    int parse_atom() {
        skip_ws();
        if (pos >= text.size())
            throw ParseError("syntax error: expected expression", pos);
        char c = text[pos];
        if (c == '(') {
            ++pos;
            int e = parse_expr();
            skip_ws();
            if (!accept(')'))
                throw ParseError("syntax error: expected ')'", pos);
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_')
            return parse_ident();
        throw ParseError(std::string("syntax error: unexpected character '") +
                             c + "'",
                         pos);
    }

    int parse_number() {
        size_t start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9')
            ++pos;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9')
                ++pos;
        }
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            size_t mark = pos;
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-'))
                ++pos;
            if (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                while (pos < text.size() && text[pos] >= '0' &&
                       text[pos] <= '9')
                    ++pos;
            } else {
                pos = mark;  // "2e" with no digits: exponent not taken
            }
        }
        std::string tok(text.substr(start, pos - start));
        if (tok == ".")
            throw ParseError("syntax error: malformed number", start);
        return number_node(std::strtod(tok.c_str(), nullptr));
    }

    int parse_ident() {
        size_t start = pos;
        while (pos < text.size() &&
               ((text[pos] >= 'a' && text[pos] <= 'z') ||
                (text[pos] >= 'A' && text[pos] <= 'Z') ||
                (text[pos] >= '0' && text[pos] <= '9') || text[pos] == '_'))
            ++pos;
        std::string name(text.substr(start, pos - start));

        UnaryFn fn;
        if (lookup_function(name, fn)) {
            skip_ws();
            if (!accept('('))
                throw ParseError("arity error: function '" + name +
                                     "' requires a parenthesized argument",
                                 pos);
            int a = parse_expr();
            if (!accept(')'))
                throw ParseError("syntax error: expected ')'", pos);
            ExprNode n;
            n.kind = ExprNode::Kind::Unary;
            n.fn = fn;
            n.a = a;
            return push(n);
        }
        if (name == "pi") return number_node(M_PI);
        for (size_t i = 0; i < vars.size(); ++i) {
            if (vars[i] == name) {
                ExprNode n;
                n.kind = ExprNode::Kind::Variable;
                n.var_index = static_cast<int>(i);
                return push(n);
            }
        }
        if (peek('('))
            throw ParseError("unknown function '" + name + "'", start);
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

std::string format_number(double v) {
    if (v == M_PI) return "pi";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExprAst ExprAst::parse(std::string_view text,
                       const std::vector<std::string>& variables) {
    ExprAst ast;
    ast.variables_ = variables;
    Parser p{text, variables, ast.nodes_};
    if (text.empty()) throw ParseError("empty expression", 0);
    ast.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size())
        throw ParseError("syntax error: unexpected trailing input", p.pos);
    return ast;
}

ExprAst ExprAst::constant(double v, const std::vector<std::string>& variables) {
    ExprAst ast;
    ast.variables_ = variables;
    ExprNode n;
    n.kind = ExprNode::Kind::Number;
    n.number = v;
    ast.nodes_.push_back(n);
    ast.root_ = 0;
    return ast;
}

Jet2 ExprAst::eval_jet(const Eigen::VectorXd& point) const {
    if (point.size() != variable_count())
        throw EvalError("eval_jet: point dimension " +
                        std::to_string(point.size()) + " != variable count " +
                        std::to_string(variable_count()));
    try {
        return eval<Jet2>(jet2_seed_all(point));
    } catch (const std::domain_error& e) {
        throw EvalError(std::string(e.what()) + " in expression '" +
                        to_string() + "'");
    }
}

Dual ExprAst::eval_dual(const Eigen::VectorXd& point) const {
    if (point.size() != variable_count())
        throw EvalError("eval_dual: point dimension mismatch");
    try {
        return eval<Dual>(dual_seed_all(point));
    } catch (const std::domain_error& e) {
        throw EvalError(std::string(e.what()) + " in expression '" +
                        to_string() + "'");
    }
}

double ExprAst::eval_value(const Eigen::VectorXd& point) const {
    if (point.size() != variable_count())
        throw EvalError("eval_value: point dimension mismatch");
    std::vector<double> vals(point.data(), point.data() + point.size());
    try {
        return eval<double>(vals);
    } catch (const std::domain_error& e) {
        throw EvalError(std::string(e.what()) + " in expression '" +
                        to_string() + "'");
    }
}

bool ExprAst::is_constant() const {
    return root_ >= 0 &&
           nodes_[static_cast<size_t>(root_)].kind == ExprNode::Kind::Number;
}

bool ExprAst::is_constant_zero() const {
    return is_constant() &&
           nodes_[static_cast<size_t>(root_)].number == 0.0;
}

namespace {

bool node_equal(const std::vector<ExprNode>& an, int a,
                const std::vector<ExprNode>& bn, int b) {
    const ExprNode& x = an[static_cast<size_t>(a)];
    const ExprNode& y = bn[static_cast<size_t>(b)];
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case ExprNode::Kind::Number:
            return x.number == y.number;
        case ExprNode::Kind::Variable:
            return x.var_index == y.var_index;
        case ExprNode::Kind::Unary:
            return x.fn == y.fn && node_equal(an, x.a, bn, y.a);
        case ExprNode::Kind::Binary:
            return x.op == y.op && node_equal(an, x.a, bn, y.a) &&
                   node_equal(an, x.b, bn, y.b);
    }
    return false;
}

}  // namespace

bool ExprAst::operator==(const ExprAst& other) const {
    if (variables_ != other.variables_) return false;
    if ((root_ < 0) != (other.root_ < 0)) return false;
    if (root_ < 0) return true;
    return node_equal(nodes_, root_, other.nodes_, other.root_);
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

// Precedences: Add/Sub 1, Mul/Div 2, unary minus 3, Pow 4, atoms 5. Children
// get a minimum precedence so the printed string reparses to the same tree.
void print_node(const std::vector<ExprNode>& nodes,
                const std::vector<std::string>& vars, int id, int min_prec,
                std::string& out) {
    const ExprNode& n = nodes[static_cast<size_t>(id)];
    switch (n.kind) {
        case ExprNode::Kind::Number: {
            if (n.number < 0 || std::signbit(n.number)) {
                if (min_prec > 3) out += '(';
                out += '-';
                out += format_number(-n.number);
                if (min_prec > 3) out += ')';
            } else {
                out += format_number(n.number);
            }
            return;
        }
        case ExprNode::Kind::Variable:
            out += vars[static_cast<size_t>(n.var_index)];
            return;
        case ExprNode::Kind::Unary: {
            if (n.fn == UnaryFn::Neg) {
                if (min_prec > 3) out += '(';
                out += '-';
                print_node(nodes, vars, n.a, 4, out);
                if (min_prec > 3) out += ')';
            } else {
                out += function_name(n.fn);
                out += '(';
                print_node(nodes, vars, n.a, 1, out);
                out += ')';
            }
            return;
        }
        case ExprNode::Kind::Binary: {
            int prec = 0;
            const char* sym = "?";
            switch (n.op) {
                case BinaryOp::Add: prec = 1; sym = "+"; break;
                case BinaryOp::Sub: prec = 1; sym = "-"; break;
                case BinaryOp::Mul: prec = 2; sym = "*"; break;
                case BinaryOp::Div: prec = 2; sym = "/"; break;
                case BinaryOp::Pow: prec = 4; sym = "^"; break;
            }
            bool paren = prec < min_prec;
            if (paren) out += '(';
            if (n.op == BinaryOp::Pow) {
                print_node(nodes, vars, n.a, 5, out);
                out += sym;
                print_node(nodes, vars, n.b, 3, out);
            } else {
                print_node(nodes, vars, n.a, prec, out);
                out += sym;
                print_node(nodes, vars, n.b, prec + 1, out);
            }
            if (paren) out += ')';
            return;
        }
    }
}

}  // namespace

std::string ExprAst::to_string() const {
    if (root_ < 0) return "";
    std::string out;
    print_node(nodes_, variables_, root_, 1, out);
    return out;
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

int ExprBuilder::number(double v) {
    ExprNode n;
    n.kind = ExprNode::Kind::Number;
    n.number = v;
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
}

int ExprBuilder::variable(int index) {
    if (index < 0 || index >= static_cast<int>(variables_.size()))
        throw std::invalid_argument("ExprBuilder: variable index out of range");
    ExprNode n;
    n.kind = ExprNode::Kind::Variable;
    n.var_index = index;
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
}

int ExprBuilder::unary(UnaryFn fn, int a) {
    ExprNode n;
    n.kind = ExprNode::Kind::Unary;
    n.fn = fn;
    n.a = a;
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
}

int ExprBuilder::binary(BinaryOp op, int a, int b) {
    ExprNode n;
    n.kind = ExprNode::Kind::Binary;
    n.op = op;
    n.a = a;
    n.b = b;
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
}

bool ExprBuilder::is_const(int id, double v) const {
    const ExprNode& n = nodes_[static_cast<size_t>(id)];
    return n.kind == ExprNode::Kind::Number && n.number == v;
}

int ExprBuilder::add(int a, int b) {
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    const ExprNode &na = nodes_[size_t(a)], &nb = nodes_[size_t(b)];
    if (na.kind == ExprNode::Kind::Number && nb.kind == ExprNode::Kind::Number)
        return number(na.number + nb.number);
    return binary(BinaryOp::Add, a, b);
}

int ExprBuilder::sub(int a, int b) {
    if (is_const(b, 0)) return a;
    const ExprNode &na = nodes_[size_t(a)], &nb = nodes_[size_t(b)];
    if (na.kind == ExprNode::Kind::Number && nb.kind == ExprNode::Kind::Number)
        return number(na.number - nb.number);
    if (is_const(a, 0)) return unary(UnaryFn::Neg, b);
    return binary(BinaryOp::Sub, a, b);
}

int ExprBuilder::mul(int a, int b) {
    if (is_const(a, 0) || is_const(b, 0)) return number(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    const ExprNode &na = nodes_[size_t(a)], &nb = nodes_[size_t(b)];
    if (na.kind == ExprNode::Kind::Number && nb.kind == ExprNode::Kind::Number)
        return number(na.number * nb.number);
    return binary(BinaryOp::Mul, a, b);
}

int ExprBuilder::div(int a, int b) {
    if (is_const(a, 0)) return number(0);
    if (is_const(b, 1)) return a;
    return binary(BinaryOp::Div, a, b);
}

int ExprBuilder::import(const ExprAst& src) {
    if (src.root_ < 0) throw std::invalid_argument("import: empty expression");
    int offset = static_cast<int>(nodes_.size());
    for (const ExprNode& n : src.nodes_) {
        ExprNode copy = n;
        if (copy.a >= 0) copy.a += offset;
        if (copy.b >= 0) copy.b += offset;
        nodes_.push_back(copy);
    }
    return src.root_ + offset;
}

ExprAst ExprBuilder::finish(int root) && {
    ExprAst ast;
    ast.nodes_ = std::move(nodes_);
    ast.variables_ = std::move(variables_);
    ast.root_ = root;
    return ast;
}

// ---------------------------------------------------------------------------
// Symbolic derivative
// ---------------------------------------------------------------------------

namespace {

// Differentiates src node `id` with respect to `var`; `copies` memoizes the
// imported copy of each source node, `derivs` the derivative of each node.
struct Differ {
    const std::vector<ExprNode>& src;
    int var;
    ExprBuilder& b;
    std::vector<int> copies;
    std::vector<int> derivs;

    int copy_of(int id) {
        int& c = copies[static_cast<size_t>(id)];
        if (c >= 0) return c;
        const ExprNode& n = src[static_cast<size_t>(id)];
        switch (n.kind) {
            case ExprNode::Kind::Number: c = b.number(n.number); break;
            case ExprNode::Kind::Variable: c = b.variable(n.var_index); break;
            case ExprNode::Kind::Unary:
                c = b.unary(n.fn, copy_of(n.a));
                break;
            case ExprNode::Kind::Binary:
                c = b.binary(n.op, copy_of(n.a), copy_of(n.b));
                break;
        }
        return c;
    }

    int d(int id) {
        int& memo = derivs[static_cast<size_t>(id)];
        if (memo >= 0) return memo;
        const ExprNode& n = src[static_cast<size_t>(id)];
        int out = -1;
        switch (n.kind) {
            case ExprNode::Kind::Number:
                out = b.number(0);
                break;
            case ExprNode::Kind::Variable:
                out = b.number(n.var_index == var ? 1 : 0);
                break;
            case ExprNode::Kind::Unary: {
                int da = d(n.a);
                int a = copy_of(n.a);
                switch (n.fn) {
                    case UnaryFn::Sin:
                        out = b.mul(b.unary(UnaryFn::Cos, a), da);
                        break;
                    case UnaryFn::Cos:
                        out = b.sub(b.number(0),
                                    b.mul(b.unary(UnaryFn::Sin, a), da));
                        break;
                    case UnaryFn::Exp:
                        out = b.mul(b.unary(UnaryFn::Exp, a), da);
                        break;
                    case UnaryFn::Log:
                        out = b.div(da, a);
                        break;
                    case UnaryFn::Sqrt:
                        out = b.div(da, b.mul(b.number(2),
                                              b.unary(UnaryFn::Sqrt, a)));
                        break;
                    case UnaryFn::Tanh: {
                        int t = b.unary(UnaryFn::Tanh, a);
                        out = b.mul(b.sub(b.number(1), b.mul(t, t)), da);
                        break;
                    }
                    case UnaryFn::Neg:
                        out = b.sub(b.number(0), da);
                        break;
                }
                break;
            }
            case ExprNode::Kind::Binary: {
                switch (n.op) {
                    case BinaryOp::Add:
                        out = b.add(d(n.a), d(n.b));
                        break;
                    case BinaryOp::Sub:
                        out = b.sub(d(n.a), d(n.b));
                        break;
                    case BinaryOp::Mul:
                        out = b.add(b.mul(d(n.a), copy_of(n.b)),
                                    b.mul(copy_of(n.a), d(n.b)));
                        break;
                    case BinaryOp::Div: {
                        int bb = copy_of(n.b);
                        int num = b.sub(b.mul(d(n.a), bb),
                                        b.mul(copy_of(n.a), d(n.b)));
                        out = b.div(num, b.mul(bb, bb));
                        break;
                    }
                    case BinaryOp::Pow: {
                        const ExprNode& e = src[static_cast<size_t>(n.b)];
                        int base = copy_of(n.a);
                        if (e.kind == ExprNode::Kind::Number) {
                            // power rule keeps negative bases legal for
                            // integer exponents
                            double c = e.number;
                            int pw = b.binary(BinaryOp::Pow, base,
                                              b.number(c - 1));
                            out = b.mul(b.mul(b.number(c), pw), d(n.a));
                        } else {
                            // a^b = exp(b log a)
                            int expo = copy_of(n.b);
                            int self = b.binary(BinaryOp::Pow, base, expo);
                            int t1 = b.mul(d(n.b), b.unary(UnaryFn::Log, base));
                            int t2 = b.div(b.mul(expo, d(n.a)), base);
                            out = b.mul(self, b.add(t1, t2));
                        }
                        break;
                    }
                }
                break;
            }
        }
        memo = out;
        return out;
    }
};

}  // namespace

ExprAst ExprAst::derivative(int var) const {
    if (root_ < 0) throw EvalError("derivative: empty expression");
    if (var < 0 || var >= variable_count())
        throw std::invalid_argument("derivative: variable index out of range");
    ExprBuilder b(variables_);
    Differ diff{nodes_, var, b,
                std::vector<int>(nodes_.size(), -1),
                std::vector<int>(nodes_.size(), -1)};
    int root = diff.d(root_);
    return std::move(b).finish(root);
}

}  // namespace chenverify
