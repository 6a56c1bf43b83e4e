#include "harmonize/expr.hpp"

#include <cmath>
#include <sstream>

#include "harmonize/error.hpp"
#include "harmonize/text.hpp"

namespace harmonize::expr {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
    Number, String, Ident, If, Then, Else, And, Or, Not,
    Plus, Minus, Star, Slash, PlusPlus, Eq, Ne, Lt, Le, Gt, Ge, LParen, RParen, End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t pos = 0;
    bool quoted = false;  // `backquoted` identifier, never a builtin
};

Error syntax_error(std::size_t pos, const std::string& message) {
    return validation_error("SyntaxError", "syntax error at offset " + std::to_string(pos) + ": " + message,
                            std::to_string(pos));
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (true) {
        while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
        if (i >= src.size()) break;
        const std::size_t start = i;
        const char c = src[i];
        auto push = [&](Tok k, std::size_t len) {
            out.push_back({k, std::string(src.substr(start, len)), start});
            i = start + len;
        };
        auto next_is = [&](char n) { return i + 1 < src.size() && src[i + 1] == n; };

        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            if (j < src.size() && ident_char(src[j])) throw syntax_error(j, "malformed number");
            if (!parse_number(src.substr(i, j - i))) throw syntax_error(i, "number out of range");
            push(Tok::Number, j - i);
        } else if (c == '"') {
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < src.size()) {
                char d = src[j++];
                if (d == '"') {
                    closed = true;
                    break;
                }
                if (d == '\\') {
                    if (j >= src.size()) break;
                    char e = src[j++];
                    switch (e) {
                        case 'n': value += '\n'; break;
                        case 't': value += '\t'; break;
                        case '"': value += '"'; break;
                        case '\\': value += '\\'; break;
                        default: throw syntax_error(j - 2, std::string("unknown escape \\") + e);
                    }
                } else {
                    value += d;
                }
            }
            if (!closed) throw syntax_error(start, "unterminated string literal");
            out.push_back({Tok::String, std::move(value), start});
            i = j;
        } else if (c == '`') {
            auto close = src.find('`', i + 1);
            if (close == std::string_view::npos) throw syntax_error(start, "unterminated `identifier`");
            if (close == i + 1) throw syntax_error(start, "empty `identifier`");
            out.push_back({Tok::Ident, std::string(src.substr(i + 1, close - i - 1)), start, true});
            i = close + 1;
        } else if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            std::string word(src.substr(i, j - i));
            Tok k = Tok::Ident;
            if (word == "if") k = Tok::If;
            else if (word == "then") k = Tok::Then;
            else if (word == "else") k = Tok::Else;
            else if (word == "and") k = Tok::And;
            else if (word == "or") k = Tok::Or;
            else if (word == "not") k = Tok::Not;
            out.push_back({k, std::move(word), start});
            i = j;
        } else if (c == '+') {
            next_is('+') ? push(Tok::PlusPlus, 2) : push(Tok::Plus, 1);
        } else if (c == '-') {
            push(Tok::Minus, 1);
        } else if (c == '*') {
            push(Tok::Star, 1);
        } else if (c == '/') {
            push(Tok::Slash, 1);
        } else if (c == '(') {
            push(Tok::LParen, 1);
        } else if (c == ')') {
            push(Tok::RParen, 1);
        } else if (c == '=' && next_is('=')) {
            push(Tok::Eq, 2);
        } else if (c == '!' && next_is('=')) {
            push(Tok::Ne, 2);
        } else if (c == '<') {
            next_is('=') ? push(Tok::Le, 2) : push(Tok::Lt, 1);
        } else if (c == '>') {
            next_is('=') ? push(Tok::Ge, 2) : push(Tok::Gt, 1);
        } else {
            throw syntax_error(start, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", src.size()});
    return out;
}

// ---------------------------------------------------------------------------
// Parser

template <class Node>
ExprPtr make(std::size_t pos, Node node) {
    auto e = std::make_shared<Expr>();
    e->node = std::move(node);
    e->position = pos;
    return e;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    ExprPtr parse() {
        auto e = expression();
        if (peek().kind != Tok::End) throw syntax_error(peek().pos, "unexpected '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        advance();
        return true;
    }
    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) {
            throw syntax_error(peek().pos, std::string("expected ") + what +
                                               (peek().kind == Tok::End ? " at end of input" : ", got '" + peek().text + "'"));
        }
        return advance();
    }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : p_(p) {
            if (++p_.depth_ > kMaxDepth) throw syntax_error(p_.peek().pos, "expression nested too deeply");
        }
        ~DepthGuard() { --p_.depth_; }
        Parser& p_;
    };
    static constexpr int kMaxDepth = 256;

    ExprPtr expression() {
        DepthGuard guard(*this);
        if (peek().kind == Tok::If) return if_expr();
        return or_expr();
    }

    ExprPtr if_expr() {
        auto pos = expect(Tok::If, "if").pos;
        auto cond = expression();
        expect(Tok::Then, "'then'");
        auto then_branch = expression();
        expect(Tok::Else, "'else'");
        auto else_branch = expression();
        return make(pos, If{cond, then_branch, else_branch});
    }

    ExprPtr or_expr() {
        auto lhs = and_expr();
        while (peek().kind == Tok::Or) {
            auto pos = advance().pos;
            lhs = make(pos, Binary{BinaryOp::Or, lhs, and_expr()});
        }
        return lhs;
    }

    ExprPtr and_expr() {
        auto lhs = comparison();
        while (peek().kind == Tok::And) {
            auto pos = advance().pos;
            lhs = make(pos, Binary{BinaryOp::And, lhs, comparison()});
        }
        return lhs;
    }

    static bool comparison_op(Tok k, BinaryOp& op) {
        switch (k) {
            case Tok::Eq: op = BinaryOp::Eq; return true;
            case Tok::Ne: op = BinaryOp::Ne; return true;
            case Tok::Lt: op = BinaryOp::Lt; return true;
            case Tok::Le: op = BinaryOp::Le; return true;
            case Tok::Gt: op = BinaryOp::Gt; return true;
            case Tok::Ge: op = BinaryOp::Ge; return true;
            default: return false;
        }
    }

    ExprPtr comparison() {
        auto lhs = concat();
        BinaryOp op;
        if (comparison_op(peek().kind, op)) {
            auto pos = advance().pos;
            lhs = make(pos, Binary{op, lhs, concat()});
            if (comparison_op(peek().kind, op)) throw syntax_error(peek().pos, "comparisons cannot be chained");
        }
        return lhs;
    }

    ExprPtr concat() {
        auto first = sum();
        if (peek().kind != Tok::PlusPlus) return first;
        Concat node;
        node.parts.push_back(first);
        auto pos = peek().pos;
        while (accept(Tok::PlusPlus)) node.parts.push_back(sum());
        return make(pos, std::move(node));
    }

    ExprPtr sum() {
        auto lhs = product();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const auto& t = advance();
            lhs = make(t.pos, Binary{t.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub, lhs, product()});
        }
        return lhs;
    }

    ExprPtr product() {
        auto lhs = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const auto& t = advance();
            lhs = make(t.pos, Binary{t.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div, lhs, unary()});
        }
        return lhs;
    }

    ExprPtr unary() {
        DepthGuard guard(*this);
        if (peek().kind == Tok::Minus) {
            auto pos = advance().pos;
            return make(pos, Unary{UnaryOp::Neg, unary()});
        }
        if (peek().kind == Tok::Not) {
            auto pos = advance().pos;
            return make(pos, Unary{UnaryOp::Not, unary()});
        }
        return primary();
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number: {
                advance();
                return make(t.pos, NumberLit{*parse_number(t.text)});
            }
            case Tok::String: {
                advance();
                return make(t.pos, StringLit{t.text});
            }
            case Tok::LParen: {
                advance();
                auto inner = expression();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::If:
                return if_expr();
            case Tok::Ident: {
                const auto& next = toks_[pos_ + 1];
                const bool builtin = !t.quoted && next.kind == Tok::LParen;
                if (builtin && t.text == "na") {
                    auto pos = t.pos;
                    advance();
                    advance();
                    const Token& code = expect(Tok::Ident, "a, b or c");
                    NACode na;
                    if (code.text.size() != 1 || !na_from_letter(code.text[0], na)) {
                        throw syntax_error(code.pos, "NA code must be a, b or c");
                    }
                    expect(Tok::RParen, "')'");
                    return make(pos, NALit{na});
                }
                if (builtin && t.text == "is_na") {
                    auto pos = t.pos;
                    advance();
                    advance();
                    auto inner = expression();
                    expect(Tok::RParen, "')'");
                    return make(pos, IsNA{inner});
                }
                advance();
                return make(t.pos, Ident{t.text});
            }
            case Tok::End:
                throw syntax_error(t.pos, "unexpected end of expression");
            default:
                throw syntax_error(t.pos, "unexpected '" + t.text + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

const char* op_text(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::And: return "and";
        case BinaryOp::Or: return "or";
    }
    return "?";
}

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void collect_identifiers(const Expr& e, std::set<std::string>& out) {
    std::visit(overloaded{
                   [&](const Ident& n) { out.insert(n.name); },
                   [&](const Unary& n) { collect_identifiers(*n.operand, out); },
                   [&](const Binary& n) {
                       collect_identifiers(*n.lhs, out);
                       collect_identifiers(*n.rhs, out);
                   },
                   [&](const Concat& n) {
                       for (const auto& p : n.parts) collect_identifiers(*p, out);
                   },
                   [&](const If& n) {
                       collect_identifiers(*n.cond, out);
                       collect_identifiers(*n.then_branch, out);
                       collect_identifiers(*n.else_branch, out);
                   },
                   [&](const IsNA& n) { collect_identifiers(*n.operand, out); },
                   [](const auto&) {},
               },
               e.node);
}

}  // namespace

ExprPtr parse_expression(std::string_view src) { return Parser(tokenize(src)).parse(); }

std::string to_string(const Expr& e) {
    return std::visit(overloaded{
                          [](const NumberLit& n) { return format_number(n.value); },
                          [](const StringLit& n) {
                              std::string out = "\"";
                              for (char c : n.value) {
                                  if (c == '"' || c == '\\') out += '\\';
                                  out += c;
                              }
                              return out + "\"";
                          },
                          [](const NALit& n) { return std::string("na(") + na_letter(n.code) + ")"; },
                          [](const Ident& n) { return n.name; },
                          [](const Unary& n) {
                              return std::string(n.op == UnaryOp::Neg ? "(neg " : "(not ") + to_string(*n.operand) + ")";
                          },
                          [](const Binary& n) {
                              return std::string("(") + op_text(n.op) + " " + to_string(*n.lhs) + " " +
                                     to_string(*n.rhs) + ")";
                          },
                          [](const Concat& n) {
                              std::string out = "(++";
                              for (const auto& p : n.parts) out += " " + to_string(*p);
                              return out + ")";
                          },
                          [](const If& n) {
                              return "(if " + to_string(*n.cond) + " " + to_string(*n.then_branch) + " " +
                                     to_string(*n.else_branch) + ")";
                          },
                          [](const IsNA& n) { return "(is_na " + to_string(*n.operand) + ")"; },
                      },
                      e.node);
}

std::set<std::string> identifiers(const Expr& e) {
    std::set<std::string> out;
    collect_identifiers(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Type checking

std::string_view to_string(ValueType t) noexcept {
    switch (t) {
        case ValueType::Number: return "number";
        case ValueType::Text: return "text";
        case ValueType::Bool: return "bool";
        case ValueType::NA: return "na";
    }
    return "na";
}

namespace {

Error type_error(const Expr& node, std::string_view expected, ValueType got) {
    return validation_error("TypeError",
                            "type error at offset " + std::to_string(node.position) + ": expected " +
                                std::string(expected) + ", got " + std::string(to_string(got)),
                            std::to_string(node.position));
}

bool unify(ValueType a, ValueType b, ValueType& out) {
    if (a == ValueType::NA) {
        out = b;
        return true;
    }
    if (b == ValueType::NA || a == b) {
        out = a;
        return true;
    }
    return false;
}

class Checker {
public:
    explicit Checker(const std::map<std::string, VariableType>& types) : types_(types) {}

    ValueType check(const Expr& e) {
        return std::visit(overloaded{
                              [](const NumberLit&) { return ValueType::Number; },
                              [](const StringLit&) { return ValueType::Text; },
                              [](const NALit&) { return ValueType::NA; },
                              [&](const Ident& n) {
                                  auto it = types_.find(n.name);
                                  if (it == types_.end()) {
                                      throw validation_error("UnboundIdent",
                                                             "'" + n.name + "' is not a component of this variable",
                                                             std::to_string(e.position));
                                  }
                                  return it->second == VariableType::Continuous ? ValueType::Number : ValueType::Text;
                              },
                              [&](const Unary& n) {
                                  auto t = check(*n.operand);
                                  auto want = n.op == UnaryOp::Neg ? ValueType::Number : ValueType::Bool;
                                  if (t != want && t != ValueType::NA) throw type_error(*n.operand, to_string(want), t);
                                  return want;
                              },
                              [&](const Binary& n) { return check_binary(n); },
                              [&](const Concat& n) {
                                  for (const auto& p : n.parts) check(*p);
                                  return ValueType::Text;
                              },
                              [&](const If& n) {
                                  auto c = check(*n.cond);
                                  if (c != ValueType::Bool && c != ValueType::NA) throw type_error(*n.cond, "bool", c);
                                  auto a = check(*n.then_branch);
                                  auto b = check(*n.else_branch);
                                  ValueType out;
                                  if (!unify(a, b, out)) throw type_error(*n.else_branch, to_string(a), b);
                                  return out;
                              },
                              [&](const IsNA& n) {
                                  check(*n.operand);
                                  return ValueType::Bool;
                              },
                          },
                          e.node);
    }

private:
    ValueType check_binary(const Binary& n) {
        auto l = check(*n.lhs);
        auto r = check(*n.rhs);
        switch (n.op) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
            case BinaryOp::Mul:
            case BinaryOp::Div:
                if (l != ValueType::Number && l != ValueType::NA) throw type_error(*n.lhs, "number", l);
                if (r != ValueType::Number && r != ValueType::NA) throw type_error(*n.rhs, "number", r);
                return ValueType::Number;
            case BinaryOp::And:
            case BinaryOp::Or:
                if (l != ValueType::Bool && l != ValueType::NA) throw type_error(*n.lhs, "bool", l);
                if (r != ValueType::Bool && r != ValueType::NA) throw type_error(*n.rhs, "bool", r);
                return ValueType::Bool;
            case BinaryOp::Eq:
            case BinaryOp::Ne: {
                ValueType u;
                if (!unify(l, r, u)) throw type_error(*n.rhs, to_string(l), r);
                return ValueType::Bool;
            }
            default: {
                ValueType u;
                if (!unify(l, r, u)) throw type_error(*n.rhs, to_string(l), r);
                if (u == ValueType::Bool) throw type_error(*n.lhs, "number or text", u);
                return ValueType::Bool;
            }
        }
    }

    const std::map<std::string, VariableType>& types_;
};

}  // namespace

ValueType infer_type(const Expr& e, const std::map<std::string, VariableType>& component_types) {
    return Checker(component_types).check(e);
}

VariableType check_expr(const Expr& e, const std::map<std::string, VariableType>& component_types) {
    return infer_type(e, component_types) == ValueType::Number ? VariableType::Continuous : VariableType::Categorical;
}

// ---------------------------------------------------------------------------
// Evaluation

const OutputValue* MapBindings::find(std::string_view name) const {
    auto it = values_.find(std::string(name));
    return it == values_.end() ? nullptr : &it->second;
}

namespace {

struct Value {
    ValueType type = ValueType::NA;
    double number = 0.0;
    std::string text;
    bool flag = false;
    NACode na = NACode::B;

    static Value num(double v) {
        if (!std::isfinite(v)) return missing();
        Value out;
        out.type = ValueType::Number;
        out.number = v;
        return out;
    }
    static Value str(std::string s) {
        Value out;
        out.type = ValueType::Text;
        out.text = std::move(s);
        return out;
    }
    static Value boolean(bool b) {
        Value out;
        out.type = ValueType::Bool;
        out.flag = b;
        return out;
    }
    static Value missing(NACode code = NACode::B) {
        Value out;
        out.na = code;
        return out;
    }
    bool is_na() const { return type == ValueType::NA; }
};

Value from_output(const OutputValue& v) {
    return std::visit(overloaded{
                          [](const Category& c) { return Value::str(c.code); },
                          [](const Number& n) { return Value::num(n.value); },
                          [](const Copied& c) { return Value::str(c.raw); },
                          [](const MissingValue& m) { return Value::missing(m.code); },
                      },
                      v.storage());
}

std::string as_text(const Value& v) {
    switch (v.type) {
        case ValueType::Number: return format_number(v.number);
        case ValueType::Bool: return v.flag ? "true" : "false";
        case ValueType::Text: return v.text;
        case ValueType::NA: return std::string("NA(") + na_letter(v.na) + ")";
    }
    return {};
}

class Evaluator {
public:
    explicit Evaluator(const Bindings& b) : bindings_(b) {}

    Value eval(const Expr& e) const {
        return std::visit(overloaded{
                              [](const NumberLit& n) { return Value::num(n.value); },
                              [](const StringLit& n) { return Value::str(n.value); },
                              [](const NALit& n) { return Value::missing(n.code); },
                              [&](const Ident& n) {
                                  const OutputValue* v = bindings_.find(n.name);
                                  return v ? from_output(*v) : Value::missing();
                              },
                              [&](const Unary& n) {
                                  Value v = eval(*n.operand);
                                  if (n.op == UnaryOp::Neg) {
                                      return v.type == ValueType::Number ? Value::num(-v.number) : Value::missing();
                                  }
                                  return v.type == ValueType::Bool ? Value::boolean(!v.flag) : Value::missing();
                              },
                              [&](const Binary& n) { return eval_binary(n); },
                              [&](const Concat& n) {
                                  std::string out;
                                  for (const auto& p : n.parts) {
                                      Value v = eval(*p);
                                      if (v.is_na()) return Value::missing();
                                      out += as_text(v);
                                  }
                                  return Value::str(std::move(out));
                              },
                              [&](const If& n) {
                                  Value c = eval(*n.cond);
                                  if (c.type != ValueType::Bool) return Value::missing();
                                  return eval(c.flag ? *n.then_branch : *n.else_branch);
                              },
                              [&](const IsNA& n) { return Value::boolean(eval(*n.operand).is_na()); },
                          },
                          e.node);
    }

private:
    Value eval_binary(const Binary& n) const {
        if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
            // Kleene logic: a determined side decides even if the other is NA.
            const bool decisive = n.op == BinaryOp::Or;
            Value l = eval(*n.lhs);
            if (l.type == ValueType::Bool && l.flag == decisive) return l;
            Value r = eval(*n.rhs);
            if (r.type == ValueType::Bool && r.flag == decisive) return r;
            if (l.type != ValueType::Bool || r.type != ValueType::Bool) return Value::missing();
            return Value::boolean(!decisive);
        }

        Value l = eval(*n.lhs);
        Value r = eval(*n.rhs);
        if (l.is_na() || r.is_na() || l.type != r.type) return Value::missing();

        switch (n.op) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
            case BinaryOp::Mul:
            case BinaryOp::Div:
                if (l.type != ValueType::Number) return Value::missing();
                switch (n.op) {
                    case BinaryOp::Add: return Value::num(l.number + r.number);
                    case BinaryOp::Sub: return Value::num(l.number - r.number);
                    case BinaryOp::Mul: return Value::num(l.number * r.number);
                    default: return r.number == 0.0 ? Value::missing() : Value::num(l.number / r.number);
                }
            default:
                break;
        }

        int cmp = 0;
        switch (l.type) {
            case ValueType::Number: cmp = l.number < r.number ? -1 : (l.number > r.number ? 1 : 0); break;
            case ValueType::Text: cmp = l.text.compare(r.text); cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0); break;
            case ValueType::Bool:
                if (n.op != BinaryOp::Eq && n.op != BinaryOp::Ne) return Value::missing();
                cmp = l.flag == r.flag ? 0 : 1;
                break;
            case ValueType::NA: return Value::missing();
        }
        switch (n.op) {
            case BinaryOp::Eq: return Value::boolean(cmp == 0);
            case BinaryOp::Ne: return Value::boolean(cmp != 0);
            case BinaryOp::Lt: return Value::boolean(cmp < 0);
            case BinaryOp::Le: return Value::boolean(cmp <= 0);
            case BinaryOp::Gt: return Value::boolean(cmp > 0);
            case BinaryOp::Ge: return Value::boolean(cmp >= 0);
            default: return Value::missing();
        }
    }

    const Bindings& bindings_;
};

}  // namespace

OutputValue evaluate(const Expr& e, const Bindings& bindings) {
    Value v = Evaluator(bindings).eval(e);
    switch (v.type) {
        case ValueType::Number: return OutputValue::number(v.number);
        case ValueType::Text: return OutputValue::category(std::move(v.text));
        case ValueType::Bool: return OutputValue::category(v.flag ? "true" : "false");
        case ValueType::NA: return OutputValue::na(v.na);
    }
    return OutputValue::na();
}

OutputValue evaluate(const Expr& e, const std::map<std::string, OutputValue>& bindings) {
    return evaluate(e, MapBindings(bindings));
}

}  // namespace harmonize::expr
