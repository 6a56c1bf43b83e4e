#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harmonize/values.hpp"

namespace corpus {

using harmonize::NACode;
using harmonize::OutputValue;

inline std::map<std::string, OutputValue> bindings() {
    return {
        {"a", OutputValue::category("normal")},
        {"b", OutputValue::category("graduated")},
        {"n", OutputValue::number(25)},
        {"m", OutputValue::number(7.5)},
        {"z", OutputValue::number(0)},
        {"na_b", OutputValue::na(NACode::B)},
        {"na_a", OutputValue::na(NACode::A)},
        {"s", OutputValue::copied("x y")},
        {"MMSE-CEP", OutputValue::category("normal_graduated")},
    };
}

struct Case {
    std::string src;
    std::optional<OutputValue> expected;  // hand-computed where unambiguous
};

inline OutputValue T() { return OutputValue::category("true"); }
inline OutputValue F() { return OutputValue::category("false"); }
inline OutputValue S(const char* s) { return OutputValue::category(s); }
inline OutputValue N(double v) { return OutputValue::number(v); }
inline OutputValue NA(NACode c = NACode::B) { return OutputValue::na(c); }

inline std::vector<Case> cases() {
    return {
        // concatenation
        {R"(a ++ "_" ++ b)", S("normal_graduated")},
        {R"(na_b ++ "_" ++ b)", NA()},
        {R"(na_a ++ "x")", NA()},
        {R"(n ++ "")", S("25")},
        {R"(s ++ "|")", S("x y|")},
        {R"(a ++ (n > 3))", S("normaltrue")},
        {R"(`MMSE-CEP` ++ "!")", S("normal_graduated!")},
        {R"("tab\there" ++ "\"q\"")", S("tab\there\"q\"")},
        // precedence
        {"1 + 2 * 3", N(7)},
        {"(1 + 2) * 3", N(9)},
        {"10 - 4 - 3", N(3)},
        {"100 / 10 / 5", N(2)},
        {"-n + 5", N(-20)},
        {"- - 3", N(3)},
        {"n - m * 2", N(10)},
        {"-(n - 30)", N(5)},
        {R"(1 + 2 ++ "x")", S("3x")},
        {R"("a" ++ 1 + 2)", S("a3")},
        {R"(m * 2 ++ "|" ++ m / 2)", S("15|3.75")},
        {"1 + 2 == 3", T()},
        {"1 == 1 and 2 == 2 or 1 == 2", T()},
        {"n == 25 or n == 26 and n == 27", T()},
        {"(n > 3) == (m > 3)", T()},
        {"1e2 + 0.5", N(100.5)},
        {"1 / 3", N(1.0 / 3.0)},
        // division by zero and non-finite results
        {"n / z", NA()},
        {"n / 0", NA()},
        {"0 / 0", NA()},
        {"1e308 * 10", NA()},
        {"is_na(n / z)", T()},
        // NA propagation
        {"n + na_b", NA()},
        {"na(a)", NA(NACode::A)},
        {"na_a", NA(NACode::A)},
        {"na(c) + 1", NA()},
        {"not na_b > 1", NA()},
        {"unknown + 1", NA()},
        // is_na
        {"is_na(na_b)", T()},
        {"is_na(a)", F()},
        {"is_na(na(a))", T()},
        // if / then / else
        {R"(if n >= 24 then "normal" else "impaired")", S("normal")},
        {R"(if m >= 24 then "normal" else "impaired")", S("impaired")},
        {R"(if na_b > 3 then "x" else "y")", NA()},
        {R"(if is_na(na_b) then "missing" else a)", S("missing")},
        {R"(if n > 20 then if m > 5 then "hi-hi" else "hi-lo" else "lo")", S("hi-hi")},
        {"(if n > 30 then 1 else 2) * 10", N(20)},
        {R"(if na_b > 1 or n > 1 then "yes" else "no")", S("yes")},
        // logic and comparison
        {"n > 3 and m < 10", T()},
        {"n > 3 and na_b > 1", NA()},
        {"n < 3 and na_b > 1", F()},
        {"n > 3 or na_b > 1", T()},
        {"n < 3 or na_b > 1", NA()},
        {"not (n > 3)", F()},
        {R"(a == "normal")", T()},
        {R"(a != b)", T()},
        {"a < b", F()},
        {"a == n", NA()},
    };
}

}  // namespace corpus
