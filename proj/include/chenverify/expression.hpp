#pragma once

#include "chenverify/jets.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chenverify {

// Scalar expression language used by manifold spec files. Grammar:
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | power
//   power  := atom ("^" factor)?
//   atom   := number | ident | ident "(" expr ")" | "(" expr ")"
//
// Functions: sin cos exp log sqrt tanh. "pi" is a named constant. Variables
// come from a declared ordered list (ambient charts use x1..xd, submanifold
// charts u1..un) and are resolved to indices at parse time.

struct ParseError : std::runtime_error {
    size_t offset;
    ParseError(const std::string& msg, size_t off)
        : std::runtime_error(msg + " at offset " + std::to_string(off)),
          offset(off) {}
};

struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class UnaryFn { Sin, Cos, Exp, Log, Sqrt, Tanh, Neg };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct ExprNode {
    enum class Kind { Number, Variable, Unary, Binary } kind;
    double number = 0.0;
    int var_index = -1;
    UnaryFn fn = UnaryFn::Neg;
    BinaryOp op = BinaryOp::Add;
    int a = -1;  // child indices into the node pool
    int b = -1;
};

class ExprAst {
  public:
    ExprAst() = default;

    /// Parses `text` against the declared variable list. Throws ParseError
    /// with the byte offset of the failure.
    static ExprAst parse(std::string_view text,
                         const std::vector<std::string>& variables);

    /// Constant expression (used by generators and the differentiator).
    static ExprAst constant(double v,
                            const std::vector<std::string>& variables);

    template <typename Scalar>
    Scalar eval(const std::vector<Scalar>& values) const;

    /// Evaluates with second-order jets seeded at `point`.
    Jet2 eval_jet(const Eigen::VectorXd& point) const;
    Dual eval_dual(const Eigen::VectorXd& point) const;
    double eval_value(const Eigen::VectorXd& point) const;

    /// Symbolic partial derivative with respect to variable `var`, with
    /// light constant folding to keep repeated derivatives small.
    ExprAst derivative(int var) const;

    std::string to_string() const;

    int variable_count() const { return static_cast<int>(variables_.size()); }
    const std::vector<std::string>& variables() const { return variables_; }
    bool empty() const { return nodes_.empty(); }
    size_t node_count() const { return nodes_.size(); }

    /// True for a literal zero/constant (cheap structural checks used by
    /// callers to skip work on sparse spec files).
    bool is_constant_zero() const;
    bool is_constant() const;

    bool operator==(const ExprAst& other) const;

    // Structural builders (bottom-up; children must already be in `nodes`).
    friend class ExprBuilder;

  private:
    std::vector<ExprNode> nodes_;  // children precede parents
    int root_ = -1;
    std::vector<std::string> variables_;
};

/// Incremental AST construction over a fixed variable list. Used by the
/// differentiator, the model generators, and tests.
class ExprBuilder {
  public:
    explicit ExprBuilder(std::vector<std::string> variables)
        : variables_(std::move(variables)) {}

    int number(double v);
    int variable(int index);
    int unary(UnaryFn fn, int a);
    int binary(BinaryOp op, int a, int b);

    // Folding variants used for derivative construction.
    int add(int a, int b);
    int sub(int a, int b);
    int mul(int a, int b);
    int div(int a, int b);

    int import(const ExprAst& src);  // appends src's nodes, returns its root

    ExprAst finish(int root) &&;

  private:
    bool is_const(int id, double v) const;
    std::vector<ExprNode> nodes_;
    std::vector<std::string> variables_;
};

// ---------------------------------------------------------------------------
// Generic evaluation
// ---------------------------------------------------------------------------

template <typename Scalar>
Scalar ExprAst::eval(const std::vector<Scalar>& values) const {
    using std::sin; using std::cos; using std::exp; using std::log;
    using std::sqrt; using std::tanh; using std::pow;
    if (root_ < 0) throw EvalError("eval: empty expression");
    if (values.size() != variables_.size())
        throw EvalError("eval: expected " +
                        std::to_string(variables_.size()) + " values, got " +
                        std::to_string(values.size()));
    std::vector<Scalar> slot(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const ExprNode& n = nodes_[i];
        switch (n.kind) {
            case ExprNode::Kind::Number:
                slot[i] = Scalar(n.number);
                break;
            case ExprNode::Kind::Variable:
                slot[i] = values[static_cast<size_t>(n.var_index)];
                break;
            case ExprNode::Kind::Unary: {
                const Scalar& a = slot[static_cast<size_t>(n.a)];
                switch (n.fn) {
                    case UnaryFn::Sin: slot[i] = sin(a); break;
                    case UnaryFn::Cos: slot[i] = cos(a); break;
                    case UnaryFn::Exp: slot[i] = exp(a); break;
                    case UnaryFn::Log: slot[i] = log(a); break;
                    case UnaryFn::Sqrt: slot[i] = sqrt(a); break;
                    case UnaryFn::Tanh: slot[i] = tanh(a); break;
                    case UnaryFn::Neg: slot[i] = -a; break;
                }
                break;
            }
            case ExprNode::Kind::Binary: {
                const Scalar& a = slot[static_cast<size_t>(n.a)];
                const Scalar& b = slot[static_cast<size_t>(n.b)];
                switch (n.op) {
                    case BinaryOp::Add: slot[i] = a + b; break;
                    case BinaryOp::Sub: slot[i] = a - b; break;
                    case BinaryOp::Mul: slot[i] = a * b; break;
                    case BinaryOp::Div: slot[i] = a / b; break;
                    case BinaryOp::Pow: slot[i] = pow(a, b); break;
                }
                break;
            }
        }
    }
    return slot[static_cast<size_t>(root_)];
}

}  // namespace chenverify
