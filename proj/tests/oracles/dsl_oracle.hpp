#pragma once

// Reference interpreter for the expression language. It evaluates while it
// parses (no AST) and keeps its own value model, so it shares nothing with
// the engine beyond the OutputValue type used for inputs and results.

#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "harmonize/values.hpp"
#include "match_oracle.hpp"

namespace oracle {

struct DslSyntaxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Dsl {
public:
    Dsl(std::string src, const std::map<std::string, harmonize::OutputValue>& env) : s_(std::move(src)), env_(env) {}

    harmonize::OutputValue run() {
        V v = expr();
        skip();
        if (i_ != s_.size()) throw DslSyntaxError("trailing input");
        switch (v.t) {
            case V::Num: return harmonize::OutputValue::number(v.n);
            case V::Str: return harmonize::OutputValue::category(v.s);
            case V::Bool: return harmonize::OutputValue::category(v.b ? "true" : "false");
            case V::Na: break;
        }
        harmonize::NACode code = harmonize::NACode::B;
        harmonize::na_from_letter(v.na, code);
        return harmonize::OutputValue::na(code);
    }

private:
    struct V {
        enum T { Num, Str, Bool, Na } t = Na;
        double n = 0;
        std::string s;
        bool b = false;
        char na = 'b';
    };
    static V na(char c = 'b') { V v; v.na = c; return v; }
    static V num(double d) {
        if (!std::isfinite(d)) return na();
        V v; v.t = V::Num; v.n = d; return v;
    }
    static V str(std::string s) { V v; v.t = V::Str; v.s = std::move(s); return v; }
    static V boolean(bool b) { V v; v.t = V::Bool; v.b = b; return v; }

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool word_char(char c) const { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }
    bool at_word(const char* w) {
        skip();
        std::size_t n = std::char_traits<char>::length(w);
        if (s_.compare(i_, n, w) != 0) return false;
        return i_ + n >= s_.size() || !word_char(s_[i_ + n]);
    }
    bool eat_word(const char* w) {
        if (!at_word(w)) return false;
        i_ += std::char_traits<char>::length(w);
        return true;
    }
    bool eat(const char* sym) {
        skip();
        std::size_t n = std::char_traits<char>::length(sym);
        if (s_.compare(i_, n, sym) != 0) return false;
        i_ += n;
        return true;
    }
    void need(const char* sym) {
        if (!eat(sym)) throw DslSyntaxError(std::string("expected ") + sym);
    }
    void need_word(const char* w) {
        if (!eat_word(w)) throw DslSyntaxError(std::string("expected ") + w);
    }

    V expr() {
        if (eat_word("if")) {
            V c = expr();
            need_word("then");
            V a = expr();
            need_word("else");
            V b = expr();
            if (c.t != V::Bool) return na();
            return c.b ? a : b;
        }
        return disj();
    }

    V disj() {
        V l = conj();
        while (eat_word("or")) l = kleene(l, conj(), true);
        return l;
    }
    V conj() {
        V l = cmp();
        while (eat_word("and")) l = kleene(l, cmp(), false);
        return l;
    }
    static V kleene(const V& l, const V& r, bool is_or) {
        const bool lb = l.t == V::Bool, rb = r.t == V::Bool;
        if (is_or) {
            if ((lb && l.b) || (rb && r.b)) return boolean(true);
            if (lb && rb) return boolean(false);
        } else {
            if ((lb && !l.b) || (rb && !r.b)) return boolean(false);
            if (lb && rb) return boolean(true);
        }
        return na();
    }

    V cmp() {
        V l = cat();
        const char* ops[] = {"==", "!=", "<=", ">=", "<", ">"};
        for (const char* op : ops) {
            if (!eat(op)) continue;
            V r = cat();
            if (l.t == V::Na || r.t == V::Na || l.t != r.t) return na();
            int c = 0;
            if (l.t == V::Num) c = (l.n > r.n) - (l.n < r.n);
            else if (l.t == V::Str) c = (l.s > r.s) - (l.s < r.s);
            else {
                if (std::string(op) != "==" && std::string(op) != "!=") return na();
                c = l.b == r.b ? 0 : 1;
            }
            std::string o = op;
            if (o == "==") return boolean(c == 0);
            if (o == "!=") return boolean(c != 0);
            if (o == "<=") return boolean(c <= 0);
            if (o == ">=") return boolean(c >= 0);
            if (o == "<") return boolean(c < 0);
            return boolean(c > 0);
        }
        return l;
    }

    static std::string text_of(const V& v) {
        if (v.t == V::Num) return shortest(v.n);
        if (v.t == V::Bool) return v.b ? "true" : "false";
        return v.s;
    }

    V cat() {
        V first = sum();
        skip();
        if (s_.compare(i_, 2, "++") != 0) return first;
        bool any_na = first.t == V::Na;
        std::string out = text_of(first);
        while (eat("++")) {
            V p = sum();
            any_na = any_na || p.t == V::Na;
            out += text_of(p);
        }
        return any_na ? na() : str(out);
    }

    V sum() {
        V l = prod();
        while (true) {
            skip();
            if (s_.compare(i_, 2, "++") == 0) return l;
            if (eat("+")) l = arith(l, prod(), '+');
            else if (eat("-")) l = arith(l, prod(), '-');
            else return l;
        }
    }
    V prod() {
        V l = un();
        while (true) {
            if (eat("*")) l = arith(l, un(), '*');
            else if (eat("/")) l = arith(l, un(), '/');
            else return l;
        }
    }
    static V arith(const V& l, const V& r, char op) {
        if (l.t != V::Num || r.t != V::Num) return na();
        switch (op) {
            case '+': return num(l.n + r.n);
            case '-': return num(l.n - r.n);
            case '*': return num(l.n * r.n);
            default: return r.n == 0 ? na() : num(l.n / r.n);
        }
    }

    V un() {
        if (eat("-")) {
            V v = un();
            return v.t == V::Num ? num(-v.n) : na();
        }
        if (eat_word("not")) {
            V v = un();
            return v.t == V::Bool ? boolean(!v.b) : na();
        }
        return prim();
    }

    V prim() {
        skip();
        if (i_ >= s_.size()) throw DslSyntaxError("unexpected end");
        const char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i_;
            while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.' ||
                                      s_[i_] == 'e' || s_[i_] == 'E' ||
                                      ((s_[i_] == '+' || s_[i_] == '-') && (s_[i_ - 1] == 'e' || s_[i_ - 1] == 'E')))) {
                ++i_;
            }
            auto n = as_number(s_.substr(start, i_ - start));
            if (!n) throw DslSyntaxError("bad number");
            return num(*n);
        }
        if (c == '"') {
            std::string out;
            ++i_;
            while (true) {
                if (i_ >= s_.size()) throw DslSyntaxError("unterminated string");
                char d = s_[i_++];
                if (d == '"') break;
                if (d == '\\') {
                    char e = s_.at(i_++);
                    out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                } else {
                    out += d;
                }
            }
            return str(out);
        }
        if (c == '(') {
            ++i_;
            V v = expr();
            need(")");
            return v;
        }
        if (c == '`') {
            auto close = s_.find('`', i_ + 1);
            if (close == std::string::npos) throw DslSyntaxError("unterminated identifier");
            std::string name = s_.substr(i_ + 1, close - i_ - 1);
            i_ = close + 1;
            return lookup(name);
        }
        if (at_word("if")) return expr();
        std::size_t start = i_;
        while (i_ < s_.size() && word_char(s_[i_])) ++i_;
        if (start == i_) throw DslSyntaxError("unexpected character");
        std::string name = s_.substr(start, i_ - start);
        skip();
        if (name == "na" && i_ < s_.size() && s_[i_] == '(') {
            ++i_;
            skip();
            char code = s_.at(i_++);
            need(")");
            if (code != 'a' && code != 'b' && code != 'c') throw DslSyntaxError("bad NA code");
            return na(code);
        }
        if (name == "is_na" && i_ < s_.size() && s_[i_] == '(') {
            ++i_;
            V v = expr();
            need(")");
            return boolean(v.t == V::Na);
        }
        return lookup(name);
    }

    V lookup(const std::string& name) const {
        auto it = env_.find(name);
        if (it == env_.end() || it->second.is_na()) {
            return it == env_.end() ? na() : na(harmonize::na_letter(it->second.na_code()));
        }
        const auto& st = it->second.storage();
        if (auto* c = std::get_if<harmonize::Category>(&st)) return str(c->code);
        if (auto* c = std::get_if<harmonize::Copied>(&st)) return str(c->raw);
        return num(std::get<harmonize::Number>(st).value);
    }

    std::string s_;
    std::size_t i_ = 0;
    const std::map<std::string, harmonize::OutputValue>& env_;
};

inline harmonize::OutputValue evaluate(const std::string& src, const std::map<std::string, harmonize::OutputValue>& env) {
    return Dsl(src, env).run();
}

}  // namespace oracle
