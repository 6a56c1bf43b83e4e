#include <gtest/gtest.h>

#include <functional>

#include "harmonize/error.hpp"
#include "harmonize/expr.hpp"
#include "oracles/dsl_oracle.hpp"
#include "support/dsl_corpus.hpp"
#include "support/generators.hpp"

using namespace harmonize;
using namespace harmonize::expr;

namespace {

Error caught(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    return Error(ErrorClass::Internal, "none", "no error");
}

const std::map<std::string, VariableType> kTypes = {
    {"MMSE_category", VariableType::Categorical},
    {"CEP_bin", VariableType::Categorical},
    {"MMSE", VariableType::Continuous},
    {"age", VariableType::Continuous},
};

}  // namespace

TEST(Parse, ConcatOfThreeParts) {
    auto e = parse_expression(R"(MMSE_category ++ "_" ++ CEP_bin)");
    ASSERT_TRUE(std::holds_alternative<Concat>(e->node));
    EXPECT_EQ(std::get<Concat>(e->node).parts.size(), 3u);
    EXPECT_EQ(to_string(*e), R"((++ MMSE_category "_" CEP_bin))");
}

TEST(Parse, IfExpression) {
    auto e = parse_expression(R"(if MMSE >= 24 then "normal" else "impaired")");
    ASSERT_TRUE(std::holds_alternative<If>(e->node));
    EXPECT_EQ(identifiers(*e), std::set<std::string>{"MMSE"});
}

TEST(Parse, SyntaxErrorsCarryOffsets) {
    auto e = caught([] { parse_expression(R"(++ "x")"); });
    EXPECT_EQ(e.code(), "SyntaxError");
    EXPECT_EQ(e.location(), "0");
    EXPECT_EQ(caught([] { parse_expression("1 +"); }).location(), "3");
    EXPECT_EQ(caught([] { parse_expression("a < b < c"); }).code(), "SyntaxError");
    EXPECT_EQ(caught([] { parse_expression("\"open"); }).code(), "SyntaxError");
    EXPECT_EQ(caught([] { parse_expression("na(d)"); }).code(), "SyntaxError");
    EXPECT_EQ(caught([] { parse_expression("(1"); }).code(), "SyntaxError");
    EXPECT_EQ(caught([] { parse_expression("1 2"); }).code(), "SyntaxError");
    EXPECT_EQ(caught([] { parse_expression("12abc"); }).code(), "SyntaxError");
}

TEST(Parse, DepthLimit) {
    std::string deep(300, '(');
    deep += "1";
    deep += std::string(300, ')');
    EXPECT_EQ(caught([&] { parse_expression(deep); }).code(), "SyntaxError");
    std::string ok(100, '(');
    ok += "1" + std::string(100, ')');
    EXPECT_NO_THROW(parse_expression(ok));
}

TEST(Parse, BackquotedIdentifiersAreNeverBuiltins) {
    // `is_na` is a plain identifier, so "(x)" is trailing input
    EXPECT_EQ(caught([] { parse_expression("`is_na`(x)"); }).code(), "SyntaxError");
    auto e = parse_expression("`na`");
    EXPECT_TRUE(std::holds_alternative<Ident>(e->node));
}

TEST(Parse, NeverCrashesOnRandomInput) {
    gen::Rng rng(77);
    for (int i = 0; i < 20000; ++i) {
        const auto src = gen::any_string(rng, 20);
        try {
            auto e = parse_expression(src);
            (void)evaluate(*e, corpus::bindings());
        } catch (const Error& err) {
            EXPECT_EQ(err.code(), "SyntaxError") << src;
        }
    }
}

TEST(TypeCheck, Examples) {
    EXPECT_EQ(check_expr(*parse_expression(R"(MMSE_category ++ "_" ++ CEP_bin)"), kTypes), VariableType::Categorical);
    EXPECT_EQ(caught([] { check_expr(*parse_expression("MMSE_category + 1"), kTypes); }).code(), "TypeError");
    EXPECT_EQ(caught([] { check_expr(*parse_expression("XYZ ++ CEP_bin"), kTypes); }).code(), "UnboundIdent");
    EXPECT_EQ(check_expr(*parse_expression("MMSE / 3 + age"), kTypes), VariableType::Continuous);
    EXPECT_EQ(check_expr(*parse_expression("if MMSE > 3 then na(a) else 2"), kTypes), VariableType::Continuous);
    EXPECT_EQ(check_expr(*parse_expression("MMSE > 3"), kTypes), VariableType::Categorical);
    EXPECT_EQ(caught([] { check_expr(*parse_expression(R"(if MMSE > 3 then 1 else "x")"), kTypes); }).code(),
              "TypeError");
    EXPECT_EQ(caught([] { check_expr(*parse_expression("if MMSE then 1 else 2"), kTypes); }).code(), "TypeError");
    EXPECT_EQ(caught([] { check_expr(*parse_expression("not MMSE"), kTypes); }).code(), "TypeError");
}

TEST(Evaluate, MmseCepExamples) {
    auto e = parse_expression(R"(MMSE_category ++ "_" ++ CEP_bin)");
    EXPECT_EQ(evaluate(*e, {{"MMSE_category", OutputValue::category("normal")},
                            {"CEP_bin", OutputValue::category("graduated")}}),
              OutputValue::category("normal_graduated"));
    EXPECT_EQ(evaluate(*e, {{"MMSE_category", OutputValue::na()}, {"CEP_bin", OutputValue::category("graduated")}}),
              OutputValue::na());
    EXPECT_EQ(evaluate(*parse_expression("is_na(MMSE_category)"), {{"MMSE_category", OutputValue::na()}}),
              OutputValue::category("true"));
}

TEST(Evaluate, CorpusMatchesHandValuesAndOracle) {
    const auto env = corpus::bindings();
    const auto cases = corpus::cases();
    ASSERT_GE(cases.size(), 40u);
    for (const auto& c : cases) {
        const OutputValue engine = evaluate(*parse_expression(c.src), env);
        EXPECT_EQ(engine, oracle::evaluate(c.src, env)) << c.src << " engine=" << debug_string(engine);
        if (c.expected) EXPECT_EQ(engine, *c.expected) << c.src << " engine=" << debug_string(engine);
    }
}

namespace {

std::string random_expr(gen::Rng& rng, int depth) {
    static const char* leaves[] = {"a", "b", "n", "m", "z", "na_b", "na_a", "s", "0", "1", "2.5", "24", "\"x\"",
                                   "\"normal\"", "na(a)", "na(c)", "`MMSE-CEP`"};
    if (depth <= 0 || gen::coin(rng, 0.25)) return leaves[gen::pick(rng, std::size(leaves))];
    auto sub = [&] {
        std::string e = random_expr(rng, depth - 1);
        return gen::coin(rng, 0.6) ? "(" + e + ")" : e;
    };
    auto closed = [&] { return "(" + random_expr(rng, depth - 1) + ")"; };
    static const char* arith[] = {" + ", " - ", " * ", " / "};
    static const char* cmp[] = {" == ", " != ", " < ", " <= ", " > ", " >= "};
    switch (gen::pick(rng, 9)) {
        case 0: return sub() + arith[gen::pick(rng, 4)] + sub();
        case 1: return closed() + cmp[gen::pick(rng, 6)] + closed();
        case 2: return closed() + (gen::coin(rng) ? " and " : " or ") + closed();
        case 3: return sub() + " ++ " + sub();
        case 4: return "is_na(" + random_expr(rng, depth - 1) + ")";
        case 5: return "if " + random_expr(rng, depth - 1) + " then " + random_expr(rng, depth - 1) + " else " +
                       random_expr(rng, depth - 1);
        case 6: return "-" + closed();
        case 7: return "not " + closed();
        default: return sub();
    }
}

}  // namespace

TEST(Evaluate, RandomExpressionsAgreeWithOracle) {
    gen::Rng rng(4242);
    const auto env = corpus::bindings();
    int compared = 0;
    for (int i = 0; i < 5000; ++i) {
        const std::string src = random_expr(rng, 4);
        bool engine_ok = true;
        bool oracle_ok = true;
        OutputValue engine, ref;
        try {
            engine = evaluate(*parse_expression(src), env);
        } catch (const Error&) {
            engine_ok = false;
        }
        try {
            ref = oracle::evaluate(src, env);
        } catch (const oracle::DslSyntaxError&) {
            oracle_ok = false;
        }
        ASSERT_EQ(engine_ok, oracle_ok) << src;
        if (!engine_ok) continue;
        ++compared;
        ASSERT_EQ(engine, ref) << src << "\n engine=" << debug_string(engine) << " oracle=" << debug_string(ref);
    }
    EXPECT_GT(compared, 4000);
}

TEST(Evaluate, SeesOnlyBoundNames) {
    // an unbound identifier reads as NA(b), it never reaches outside the bindings
    auto e = parse_expression("is_na(MMSE)");
    EXPECT_EQ(evaluate(*e, std::map<std::string, OutputValue>{}), OutputValue::category("true"));
}
