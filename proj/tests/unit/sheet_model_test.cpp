#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "harmonize/error.hpp"
#include "harmonize/sheet_model.hpp"
#include "support/generators.hpp"
#include "support/test_support.hpp"

using namespace harmonize;

namespace {

std::string error_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

const std::string kDetailsHeader =
    "variable,typeEnd,typeStart,databaseStart,variableStart,recEnd,catLabel,catLabelLong,units,recStart,notes\n";
const std::string kVariablesHeader = "variable,variableType,databaseStart,variableStart\n";

}  // namespace

TEST(MatchRuleGrammar, Examples) {
    auto one = parse_match_rule("1");
    EXPECT_EQ(one.kind, RuleKind::ValueSet);
    EXPECT_EQ(one.values, std::vector<std::string>{"1"});

    auto normal = parse_match_rule("[24,30]");
    EXPECT_EQ(normal, MatchRule::interval(24, 30, true, true));

    EXPECT_EQ(parse_match_rule("else").kind, RuleKind::Else);
    EXPECT_EQ(parse_match_rule(" copy ").kind, RuleKind::Copy);
    EXPECT_EQ(parse_match_rule("NA::c"), MatchRule::explicit_na(NACode::C));
}

TEST(MatchRuleGrammar, AllClosednessForms) {
    EXPECT_EQ(parse_match_rule("(0, 9]"), MatchRule::interval(0, 9, false, true));
    EXPECT_EQ(parse_match_rule("[0,9)"), MatchRule::interval(0, 9, true, false));
    EXPECT_EQ(parse_match_rule(" ( -1.5 , 2e1 ) "), MatchRule::interval(-1.5, 20, false, false));
    auto open = parse_match_rule("[30, inf)");
    EXPECT_TRUE(std::isinf(open.high.value));
}

TEST(MatchRuleGrammar, ValueListsAndQuoting) {
    auto r = parse_match_rule(" a , b,\"c, d\", \"say \"\"x\"\"\"");
    EXPECT_EQ(r.values, (std::vector<std::string>{"a", "b", "c, d", "say \"x\""}));
    // quoting protects keywords
    EXPECT_EQ(parse_match_rule("\"else\"").values, std::vector<std::string>{"else"});
    EXPECT_EQ(parse_match_rule(to_string(MatchRule::value_set({"else", "[x", "a,b"}))),
              MatchRule::value_set({"else", "[x", "a,b"}));
}

TEST(MatchRuleGrammar, Rejections) {
    for (const char* bad : {"[9,0]", "", "  ", "[1,2", "[a,b]", "[1,2,3]", "a,,b", "a,a", "NA::d", "\"open", "\"x\"y"}) {
        EXPECT_EQ(error_code([&] { parse_match_rule(bad); }), "UnparseableRule") << bad;
    }
}

TEST(MatchRuleGrammar, TotalOverRandomText) {
    gen::Rng rng(101);
    for (int i = 0; i < 20000; ++i) {
        const std::string text = gen::any_string(rng, 16);
        try {
            auto r = parse_match_rule(text);
            // whatever parses, re-parses to itself
            EXPECT_EQ(parse_match_rule(to_string(r)), r) << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), "UnparseableRule") << text;
        }
    }
}

TEST(MatchRule, Matching) {
    auto iv = MatchRule::interval(0, 9, true, false);
    EXPECT_TRUE(iv.matches("0", 0.0));
    EXPECT_FALSE(iv.matches("9", 9.0));
    EXPECT_FALSE(iv.matches("x", std::nullopt));
    auto vs = MatchRule::value_set({"A1"});
    EXPECT_TRUE(vs.matches("A1", std::nullopt));
    EXPECT_FALSE(vs.matches("a1", std::nullopt));  // case-sensitive
    EXPECT_TRUE(MatchRule::explicit_na(NACode::A).matches("NA(a)", std::nullopt));
    EXPECT_FALSE(MatchRule::explicit_na(NACode::A).matches("NA(b)", std::nullopt));
}

TEST(VariableSheet, MinimalRow) {
    auto vs = parse_variable_sheet(kVariablesHeader + "sex,categorical,paquid,male\n");
    ASSERT_EQ(vs.entries.size(), 1u);
    const auto& e = vs.entries[0];
    EXPECT_EQ(e.variable, "sex");
    EXPECT_EQ(e.variable_type, VariableType::Categorical);
    EXPECT_EQ(e.database_start, std::vector<std::string>{"paquid"});
    EXPECT_EQ(e.variable_start.resolve("paquid"), "male");
}

TEST(VariableSheet, EmptyAndErrors) {
    EXPECT_TRUE(parse_variable_sheet(kVariablesHeader).entries.empty());
    EXPECT_EQ(error_code([] { parse_variable_sheet(kVariablesHeader + "sex,categorical,p,male\nsex,categorical,p,m\n"); }),
              "DuplicateVariable");
    EXPECT_EQ(error_code([] { parse_variable_sheet("variable,variableType,databaseStart\nsex,categorical,p\n"); }),
              "MissingColumn");
    EXPECT_EQ(error_code([] { parse_variable_sheet(kVariablesHeader + "sex,ordinal,p,male\n"); }), "BadType");
}

TEST(VariableSheet, MultiDatabaseStart) {
    auto vs = parse_variable_sheet(kVariablesHeader + "age,continuous,\"db1, db2, db3\",\"db1::AGE, db2::age_y, age\"\n");
    const auto& s = vs.entries[0].variable_start;
    EXPECT_EQ(s.resolve("db1"), "AGE");
    EXPECT_EQ(s.resolve("db2"), "age_y");
    EXPECT_EQ(s.resolve("db3"), "age");
    EXPECT_EQ(vs.entries[0].database_start.size(), 3u);
}

TEST(DetailsSheet, PaquidRows) {
    auto ds = parse_details_sheet(kDetailsHeader +
                                  "MMSE_category,categorical,continuous,paquid,paquid::MMSE,severe cognitive impairment,,,,"
                                  "\"[0,9]\",\n"
                                  "MMSE_category,categorical,continuous,paquid,paquid::MMSE,NA::b,,,,else,\n");
    ASSERT_EQ(ds.rows.size(), 2u);
    EXPECT_EQ(ds.rows[0].rec_start, MatchRule::interval(0, 9, true, true));
    EXPECT_EQ(ds.rows[0].rec_end.text, "severe cognitive impairment");
    EXPECT_EQ(ds.rows[1].rec_start.kind, RuleKind::Else);
    EXPECT_EQ(ds.rows[1].rec_end.kind, RecEnd::Kind::NA);
    EXPECT_EQ(ds.rows[1].rec_end.na_code, NACode::B);
}

TEST(DetailsSheet, Errors) {
    EXPECT_EQ(error_code([] {
                  parse_details_sheet(kDetailsHeader + "m,categorical,continuous,p,p::x,lo,,,,\"[9,0]\",\n");
              }),
              "UnparseableRule");
    EXPECT_EQ(error_code([] {
                  parse_details_sheet(kDetailsHeader + "m,categorical,categorical,p,p::x,lo,,,,\"[0,9]\",\n");
              }),
              "InconsistentTypes");
    EXPECT_EQ(error_code([] { parse_details_sheet("variable,typeEnd\nx,categorical\n"); }), "MissingColumn");
}

TEST(DetailsSheet, ErrorNamesRowAndColumn) {
    try {
        parse_details_sheet(kDetailsHeader + "a,categorical,categorical,p,p::x,1,,,,1,\n"
                                             "m,categorical,continuous,p,p::x,lo,,,,\"[1,\",\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(e.location().find("row 2"), std::string::npos) << e.location();
        EXPECT_NE(e.location().find("recStart"), std::string::npos) << e.location();
    }
}

TEST(Validation, GoldenSheetsAreClean) {
    auto report = validate_sheets(testing_support::paquid_variable_sheet(), testing_support::paquid_details_sheet());
    EXPECT_TRUE(report.ok()) << to_text(report);
    EXPECT_EQ(report.error_count(), 0u);
    EXPECT_EQ(report.warning_count(), 0u);
}

TEST(Validation, DanglingVariable) {
    auto vs = testing_support::paquid_variable_sheet();
    auto ds = testing_support::paquid_details_sheet();
    ds.rows.push_back(ds.rows[0]);
    ds.rows.back().variable = "ghost";
    auto report = validate_sheets(vs, ds);
    EXPECT_EQ(report.error_count(), 1u) << to_text(report);
}

TEST(Validation, TwoElseRows) {
    auto vs = testing_support::paquid_variable_sheet();
    auto ds = testing_support::paquid_details_sheet();
    auto extra = ds.rows[6];  // MMSE else row
    ASSERT_EQ(extra.rec_start.kind, RuleKind::Else);
    extra.rec_end = parse_rec_end("NA::a");
    ds.rows.push_back(extra);
    auto report = validate_sheets(vs, ds);
    EXPECT_EQ(report.error_count(), 1u) << to_text(report);
    EXPECT_FALSE(report.ok());
}

TEST(Validation, OverlapIsAWarning) {
    auto vs = testing_support::paquid_variable_sheet();
    auto ds = testing_support::paquid_details_sheet();
    ds.rows[3].rec_start = MatchRule::interval(5, 17, true, true);  // overlaps [0,9]
    auto report = validate_sheets(vs, ds);
    EXPECT_TRUE(report.ok());
    EXPECT_GE(report.warning_count(), 1u);
}

TEST(Validation, DerivedComponentMustBeRecoded) {
    auto vs = testing_support::paquid_variable_sheet();
    auto ds = testing_support::paquid_details_sheet();
    ds.rows.back().variable_start = parse_variable_start("DerivedVar::[MMSE_category, nope]");
    auto report = validate_sheets(vs, ds);
    EXPECT_FALSE(report.ok()) << to_text(report);
}

TEST(Validation, IsPure) {
    auto vs = testing_support::paquid_variable_sheet();
    auto ds = testing_support::paquid_details_sheet();
    ds.rows[3].rec_start = MatchRule::interval(5, 17, true, true);
    EXPECT_EQ(validate_sheets(vs, ds), validate_sheets(vs, ds));
}

TEST(Serialization, GoldenRoundTrip) {
    auto vs = testing_support::paquid_variable_sheet();
    auto ds = testing_support::paquid_details_sheet();
    EXPECT_EQ(parse_variable_sheet(serialize_variable_sheet(vs)), vs);
    EXPECT_EQ(parse_details_sheet(serialize_details_sheet(ds)), ds);
}

TEST(Serialization, EmptySheetIsHeaderOnly) {
    EXPECT_EQ(serialize_details_sheet({}), kDetailsHeader);
    EXPECT_TRUE(parse_details_sheet(serialize_details_sheet({})).rows.empty());
}

TEST(Serialization, ExtrasAndEscapingSurvive) {
    auto vs = parse_variable_sheet(
        "variable,label,variableType,databaseStart,variableStart,owner\n"
        "sex,\"Sex, at \"\"birth\"\"\",categorical,paquid,male,\"line1\nline2\"\n");
    EXPECT_EQ(vs.extra_columns, std::vector<std::string>{"owner"});
    auto again = parse_variable_sheet(serialize_variable_sheet(vs));
    EXPECT_EQ(again, vs);
    EXPECT_EQ(again.entries[0].label, "Sex, at \"birth\"");
    EXPECT_EQ(again.entries[0].extras[0], "line1\nline2");
}

TEST(Serialization, RandomSheetsRoundTrip) {
    gen::Rng rng(2024);
    for (int i = 0; i < 200; ++i) {
        auto [vs, ds] = gen::sheets(rng);
        const auto vs_text = serialize_variable_sheet(vs);
        const auto ds_text = serialize_details_sheet(ds);
        ASSERT_EQ(parse_variable_sheet(vs_text), vs) << vs_text;
        ASSERT_EQ(parse_details_sheet(ds_text), ds) << ds_text;
    }
}

TEST(Serialization, CanonicalColumnOrder) {
    // columns shuffled on input come back canonical, rows in order
    auto ds = parse_details_sheet(
        "recStart,variable,recEnd,typeEnd,typeStart,databaseStart,variableStart\n"
        "1,sex,Male,categorical,categorical,paquid,male\n"
        "0,sex,Female,categorical,categorical,paquid,male\n");
    auto text = serialize_details_sheet(ds);
    EXPECT_EQ(text.substr(0, kDetailsHeader.size()), kDetailsHeader);
    auto back = parse_details_sheet(text);
    EXPECT_EQ(back.rows[0].rec_end.text, "Male");
    EXPECT_EQ(back.rows[1].rec_end.text, "Female");
}
