#include "harmonize/values.hpp"

#include "harmonize/text.hpp"

namespace harmonize {

std::string_view na_meaning(NACode code) noexcept {
    switch (code) {
        case NACode::A: return "not applicable";
        case NACode::B: return "missing";
        case NACode::C: return "not asked";
    }
    return "missing";
}

char na_letter(NACode code) noexcept { return static_cast<char>(code); }

bool na_from_letter(char c, NACode& out) noexcept {
    switch (c) {
        case 'a': out = NACode::A; return true;
        case 'b': out = NACode::B; return true;
        case 'c': out = NACode::C; return true;
        default: return false;
    }
}

namespace {
template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;
}  // namespace

std::string OutputValue::render() const {
    return std::visit(overloaded{
                          [](const Category& c) { return c.code; },
                          [](const Number& n) { return format_number(n.value); },
                          [](const Copied& c) { return c.raw; },
                          [](const MissingValue& m) { return std::string("NA(") + na_letter(m.code) + ")"; },
                      },
                      value_);
}

std::string debug_string(const OutputValue& v) {
    return std::visit(overloaded{
                          [](const Category& c) { return "Category(" + c.code + ")"; },
                          [](const Number& n) { return "Number(" + format_number(n.value) + ")"; },
                          [](const Copied& c) { return "Copied(" + c.raw + ")"; },
                          [](const MissingValue& m) { return std::string("NA(") + na_letter(m.code) + ")"; },
                      },
                      v.storage());
}

}  // namespace harmonize
