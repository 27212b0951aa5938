#include "wit/extract.hpp"

namespace wit {

std::string show(ExtractMode m) { return m == ExtractMode::Plain ? "u" : "i"; }

ExtractMode extract_mode_from_string(const std::string& s) {
    if (s == "u" || s == "plain") return ExtractMode::Plain;
    if (s == "i" || s == "relativized") return ExtractMode::Relativized;
    throw extract_error("unknown extraction mode '" + s + "' (expected u or i)");
}

std::string bound_predicate_key(const std::string& x, const TyPtr& xty, const FormulaPtr& bound) {
    FormulaPtr canon = subst(bound, x, var("%bound", xty));
    return show(xty) + "|" + show(canon);
}

} // namespace wit
