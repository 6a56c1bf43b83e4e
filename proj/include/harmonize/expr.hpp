#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "harmonize/sheet_model.hpp"
#include "harmonize/values.hpp"

namespace harmonize::expr {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct NumberLit { double value; };
struct StringLit { std::string value; };
struct NALit { NACode code; };
struct Ident { std::string name; };
struct Unary { UnaryOp op; ExprPtr operand; };
struct Binary { BinaryOp op; ExprPtr lhs; ExprPtr rhs; };
struct Concat { std::vector<ExprPtr> parts; };
struct If { ExprPtr cond; ExprPtr then_branch; ExprPtr else_branch; };
struct IsNA { ExprPtr operand; };

struct Expr {
    std::variant<NumberLit, StringLit, NALit, Ident, Unary, Binary, Concat, If, IsNA> node;
    std::size_t position = 0;  // byte offset of the node in the source
};

/// Grammar, loosest binding first:
///   expr    := "if" expr "then" expr "else" expr | or
///   or      := and ("or" and)*
///   and     := cmp ("and" cmp)*
///   cmp     := concat (("=="|"!="|"<"|"<="|">"|">=") concat)?
///   concat  := sum ("++" sum)*
///   sum     := product (("+"|"-") product)*
///   product := unary (("*"|"/") unary)*
///   unary   := ("-"|"not") unary | primary
///   primary := number | "string" | na(a|b|c) | is_na(expr) | ident | `ident` | (expr) | if-expr
/// Throws Error{SyntaxError} with the byte offset in location().
ExprPtr parse_expression(std::string_view src);

/// S-expression rendering, e.g. (++ MMSE_category "_" CEP_bin).
std::string to_string(const Expr& e);

std::set<std::string> identifiers(const Expr& e);

enum class ValueType { Number, Text, Bool, NA };

std::string_view to_string(ValueType t) noexcept;

/// Static type of `e`. Throws Error{TypeError} or Error{UnboundIdent}.
ValueType infer_type(const Expr& e, const std::map<std::string, VariableType>& component_types);

/// Output variable type: Number is continuous, everything else categorical.
VariableType check_expr(const Expr& e, const std::map<std::string, VariableType>& component_types);

/// Read-only view of the values an expression may see.
class Bindings {
public:
    virtual ~Bindings() = default;
    virtual const OutputValue* find(std::string_view name) const = 0;
};

class MapBindings final : public Bindings {
public:
    explicit MapBindings(const std::map<std::string, OutputValue>& values) : values_(values) {}
    const OutputValue* find(std::string_view name) const override;

private:
    const std::map<std::string, OutputValue>& values_;
};

/// Total: never throws. NA operands of strict operators give NA(b), as do
/// division by zero, non-finite results and runtime type mismatches.
OutputValue evaluate(const Expr& e, const Bindings& bindings);
OutputValue evaluate(const Expr& e, const std::map<std::string, OutputValue>& bindings);

}  // namespace harmonize::expr
