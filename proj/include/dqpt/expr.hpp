#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dqpt/errors.hpp"

namespace dqpt::expr {

enum class Op { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Tan, Sqrt, Atan, Abs };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Number;
    double value = 0.0;       // Number
    std::string name;         // Variable
    Func func = Func::Sin;    // Call
    std::vector<NodePtr> args;
    Span span;
};

/// Immutable parsed expression together with the text it came from.
class Expression {
public:
    Expression() = default;
    Expression(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

    const Node& root() const { return *root_; }
    const std::string& source() const { return source_; }

    /// Names of every variable node, momentum variables included.
    std::set<std::string> free_variables() const;

private:
    NodePtr root_;
    std::string source_;
};

using ParamEnv = std::map<std::string, double>;

/// Momentum variable names are reserved and cannot appear as parameter names.
bool is_momentum_variable(std::string_view name);

/// Rejects empty parameter names and reserved momentum names with ConfigError.
void validate_env(const ParamEnv& env);

Expression parse_expr(std::string_view source);

/// Fully parenthesized rendering that re-parses to the same tree.
std::string to_string(const Expression& e);

/// Structural equality ignoring source spans.
bool structurally_equal(const Node& a, const Node& b);

/// Evaluates e with momentum variables taken from `momenta` and parameters from
/// `env`. Division by zero, roots of negatives and other non-finite results
/// raise EvalError.
double eval_expr(const Expression& e, const ParamEnv& momenta, const ParamEnv& env);

/// Flat postfix program with variables resolved to slots. Slot 0 and 1 hold
/// momentum components; parameters follow.
class Compiled {
public:
    Compiled() = default;
    Compiled(const Expression& e, const std::vector<std::string>& slot_names);

    double operator()(const double* slots) const;

private:
    struct Instr {
        Op op;
        Func func;
        double value;
        int slot;
        Span span;
    };
    std::vector<Instr> code_;
    std::size_t max_stack_ = 0;
};

}  // namespace dqpt::expr
