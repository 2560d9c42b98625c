#include "dqpt/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

namespace dqpt::expr {

namespace {

struct FuncName {
    std::string_view name;
    Func func;
};

constexpr FuncName kFunctions[] = {
    {"sin", Func::Sin}, {"cos", Func::Cos},   {"tan", Func::Tan},
    {"sqrt", Func::Sqrt}, {"atan", Func::Atan}, {"abs", Func::Abs},
};

const FuncName* lookup_function(std::string_view name) {
    for (const auto& f : kFunctions)
        if (f.name == name) return &f;
    return nullptr;
}

std::string_view function_name(Func f) {
    for (const auto& entry : kFunctions)
        if (entry.func == f) return entry.name;
    return "?";
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Token(Tok k, Span s) : kind(k), span(s) {}
    Tok kind;
    Span span;
    double number = 0.0;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Tok::End, {start, 0}};
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            Token t{Tok::Ident, {start, pos_ - start}};
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        ++pos_;
        switch (c) {
            case '+': return {Tok::Plus, {start, 1}};
            case '-': return {Tok::Minus, {start, 1}};
            case '*': return {Tok::Star, {start, 1}};
            case '/': return {Tok::Slash, {start, 1}};
            case '^': return {Tok::Caret, {start, 1}};
            case '(': return {Tok::LParen, {start, 1}};
            case ')': return {Tok::RParen, {start, 1}};
            default: throw ParseError(std::string("unknown token '") + c + "'", start);
        }
    }

private:
    Token lex_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                digits();
            else
                pos_ = save;
        }
        Token t{Tok::Number, {start, pos_ - start}};
        const std::string_view text = src_.substr(start, pos_ - start);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t.number);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(t.number))
            throw ParseError("malformed numeric literal '" + std::string(text) + "'", start);
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

NodePtr make(Op op, Span span, std::vector<NodePtr> args = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->span = span;
    n->args = std::move(args);
    return n;
}

Span cover(Span a, Span b) {
    const std::size_t end = std::max(a.offset + a.length, b.offset + b.length);
    return {a.offset, end - a.offset};
}

// expr  := term (('+' | '-') term)*
// term  := unary (('*' | '/') unary)*
// unary := '-' unary | power
// power := primary ('^' unary)?
class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src), src_size_(src.size()) { advance(); }

    NodePtr parse() {
        if (cur_.kind == Tok::End) throw ParseError("empty expression", cur_.span.offset);
        NodePtr e = expression();
        if (cur_.kind != Tok::End) throw ParseError("unexpected trailing input", cur_.span.offset);
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    NodePtr expression() {
        NodePtr lhs = term();
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            const Op op = cur_.kind == Tok::Plus ? Op::Add : Op::Sub;
            advance();
            NodePtr rhs = term();
            const Span s = cover(lhs->span, rhs->span);
            lhs = make(op, s, {lhs, rhs});
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
            const Op op = cur_.kind == Tok::Star ? Op::Mul : Op::Div;
            advance();
            NodePtr rhs = unary();
            const Span s = cover(lhs->span, rhs->span);
            lhs = make(op, s, {lhs, rhs});
        }
        return lhs;
    }

    NodePtr unary() {
        if (cur_.kind == Tok::Minus) {
            const Span s = cur_.span;
            advance();
            NodePtr operand = unary();
            return make(Op::Neg, cover(s, operand->span), {operand});
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (cur_.kind == Tok::Caret) {
            advance();
            NodePtr exponent = unary();
            const Span s = cover(base->span, exponent->span);
            return make(Op::Pow, s, {base, exponent});
        }
        return base;
    }

    NodePtr primary() {
        const Token tok = cur_;
        switch (tok.kind) {
            case Tok::Number: {
                advance();
                auto n = std::make_shared<Node>();
                n->op = Op::Number;
                n->value = tok.number;
                n->span = tok.span;
                return n;
            }
            case Tok::Ident: {
                advance();
                if (const FuncName* f = lookup_function(tok.text)) {
                    if (cur_.kind != Tok::LParen)
                        throw ParseError("expected '(' after function '" + tok.text + "'", cur_.span.offset);
                    advance();
                    NodePtr arg = expression();
                    expect_rparen();
                    auto n = std::make_shared<Node>();
                    n->op = Op::Call;
                    n->func = f->func;
                    n->args = {arg};
                    n->span = {tok.span.offset, last_end_ - tok.span.offset};
                    return n;
                }
                if (cur_.kind == Tok::LParen)
                    throw ParseError("unknown function '" + tok.text + "'", tok.span.offset);
                auto n = std::make_shared<Node>();
                n->op = Op::Variable;
                n->name = tok.text;
                n->span = tok.span;
                return n;
            }
            case Tok::LParen: {
                advance();
                NodePtr inner = expression();
                expect_rparen();
                return inner;
            }
            case Tok::End:
                throw ParseError("unexpected end of input", src_size_);
            default:
                throw ParseError("unexpected token", tok.span.offset);
        }
    }

    void expect_rparen() {
        if (cur_.kind == Tok::End) throw ParseError("unbalanced parenthesis", src_size_);
        if (cur_.kind != Tok::RParen) throw ParseError("expected ')'", cur_.span.offset);
        last_end_ = cur_.span.offset + 1;
        advance();
    }

    Lexer lexer_;
    Token cur_{Tok::End, {}};
    std::size_t src_size_;
    std::size_t last_end_ = 0;
};

void collect_vars(const Node& n, std::set<std::string>& out) {
    if (n.op == Op::Variable) out.insert(n.name);
    for (const auto& a : n.args) collect_vars(*a, out);
}

void render(const Node& n, std::string& out) {
    switch (n.op) {
        case Op::Number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case Op::Variable: out += n.name; return;
        case Op::Neg:
            out += "(-";
            render(*n.args[0], out);
            out += ')';
            return;
        case Op::Call:
            out += function_name(n.func);
            out += '(';
            render(*n.args[0], out);
            out += ')';
            return;
        default: break;
    }
    const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? " * "
                                              : n.op == Op::Div ? " / "
                                                                : " ^ ";
    out += '(';
    render(*n.args[0], out);
    out += sym;
    render(*n.args[1], out);
    out += ')';
}

double apply_binary(Op op, double a, double b, Span span) {
    double r = 0.0;
    switch (op) {
        case Op::Add: r = a + b; break;
        case Op::Sub: r = a - b; break;
        case Op::Mul: r = a * b; break;
        case Op::Div:
            if (b == 0.0) throw EvalError("division by zero", span);
            r = a / b;
            break;
        case Op::Pow:
            r = std::pow(a, b);
            if (!std::isfinite(r)) throw EvalError("power", span);
            break;
        default: break;
    }
    if (!std::isfinite(r)) throw EvalError("arithmetic overflow", span);
    return r;
}

double apply_func(Func f, double x, Span span) {
    double r = 0.0;
    switch (f) {
        case Func::Sin: r = std::sin(x); break;
        case Func::Cos: r = std::cos(x); break;
        case Func::Tan: r = std::tan(x); break;
        case Func::Sqrt:
            if (x < 0.0) throw EvalError("sqrt of negative", span);
            r = std::sqrt(x);
            break;
        case Func::Atan: r = std::atan(x); break;
        case Func::Abs: r = std::abs(x); break;
    }
    if (!std::isfinite(r)) throw EvalError(std::string(function_name(f)), span);
    return r;
}

double eval_node(const Node& n, const std::function<const double*(const std::string&)>& lookup) {
    switch (n.op) {
        case Op::Number: return n.value;
        case Op::Variable: {
            const double* v = lookup(n.name);
            if (!v) throw UnboundVariable(n.name, n.span);
            return *v;
        }
        case Op::Neg: return -eval_node(*n.args[0], lookup);
        case Op::Call: return apply_func(n.func, eval_node(*n.args[0], lookup), n.span);
        default:
            return apply_binary(n.op, eval_node(*n.args[0], lookup), eval_node(*n.args[1], lookup), n.span);
    }
}

}  // namespace

std::set<std::string> Expression::free_variables() const {
    std::set<std::string> out;
    if (root_) collect_vars(*root_, out);
    return out;
}

bool is_momentum_variable(std::string_view name) { return name == "k" || name == "kx" || name == "ky"; }

void validate_env(const ParamEnv& env) {
    for (const auto& [name, value] : env) {
        if (name.empty()) throw ConfigError("params", "empty parameter name");
        if (is_momentum_variable(name))
            throw ConfigError("params." + name, "reserved momentum variable used as parameter");
        if (lookup_function(name)) throw ConfigError("params." + name, "function name used as parameter");
        if (!std::isfinite(value)) throw ConfigError("params." + name, "non-finite value");
    }
}

Expression parse_expr(std::string_view source) {
    Parser p(source);
    return Expression(p.parse(), std::string(source));
}

std::string to_string(const Expression& e) {
    std::string out;
    render(e.root(), out);
    return out;
}

bool structurally_equal(const Node& a, const Node& b) {
    if (a.op != b.op || a.args.size() != b.args.size()) return false;
    switch (a.op) {
        case Op::Number:
            if (a.value != b.value) return false;
            break;
        case Op::Variable:
            if (a.name != b.name) return false;
            break;
        case Op::Call:
            if (a.func != b.func) return false;
            break;
        default: break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(*a.args[i], *b.args[i])) return false;
    return true;
}

double eval_expr(const Expression& e, const ParamEnv& momenta, const ParamEnv& env) {
    return eval_node(e.root(), [&](const std::string& name) -> const double* {
        if (is_momentum_variable(name)) {
            auto it = momenta.find(name);
            return it == momenta.end() ? nullptr : &it->second;
        }
        auto it = env.find(name);
        return it == env.end() ? nullptr : &it->second;
    });
}

Compiled::Compiled(const Expression& e, const std::vector<std::string>& slot_names) {
    std::size_t depth = 0;
    std::function<void(const Node&)> emit = [&](const Node& n) {
        for (const auto& a : n.args) emit(*a);
        Instr in{n.op, n.func, n.value, -1, n.span};
        if (n.op == Op::Variable) {
            for (std::size_t i = 0; i < slot_names.size(); ++i)
                if (slot_names[i] == n.name) in.slot = static_cast<int>(i);
            if (in.slot < 0) throw UnboundVariable(n.name, n.span);
        }
        if (n.op == Op::Number || n.op == Op::Variable)
            ++depth;
        else if (n.args.size() == 2)
            --depth;
        max_stack_ = std::max(max_stack_, depth);
        code_.push_back(in);
    };
    emit(e.root());
}

double Compiled::operator()(const double* slots) const {
    // Expression trees from config files are shallow; a small fixed buffer covers them.
    double small[32] = {};
    std::vector<double> big;
    double* stack = small;
    if (max_stack_ > 32) {
        big.resize(max_stack_);
        stack = big.data();
    }
    std::size_t top = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
            case Op::Number: stack[top++] = in.value; break;
            case Op::Variable: stack[top++] = slots[in.slot]; break;
            case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
            case Op::Call: stack[top - 1] = apply_func(in.func, stack[top - 1], in.span); break;
            default:
                stack[top - 2] = apply_binary(in.op, stack[top - 2], stack[top - 1], in.span);
                --top;
                break;
        }
    }
    return stack[0];
}

}  // namespace dqpt::expr
