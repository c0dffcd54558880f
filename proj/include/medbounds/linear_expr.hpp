#pragma once

// Affine expressions in the observed-probability symbols and max/min bound expressions.

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "medbounds/errors.hpp"
#include "medbounds/observed.hpp"
#include "medbounds/rational.hpp"
#include "medbounds/types.hpp"

namespace medbounds {

/// constant + sum_i coef[i] * p[i] over the flat cell indices.
///
/// Per-arm normalization makes the representation non-unique, so expressions are kept
/// in reduced form: the last cell of each arm (y = m [= l] = 1) carries coefficient 0
/// and its weight is folded into the constant and the other cells of that arm.
template <Setting S>
struct LinearExpr {
    static constexpr int n = kCells<S>;

    Rational constant = 0;
    std::array<Rational, n> coef{};

    static constexpr int last_cell(int a) { return cell_index(kCellsPerArm<S> - 1, a); }

    /// True when `idx` is one of the reduced-away cells.
    static constexpr bool is_folded_cell(int idx) { return (idx >> 1) == kCellsPerArm<S> - 1; }

    LinearExpr& canonicalize() {
        for (int a = 0; a < 2; ++a) {
            const int last = last_cell(a);
            if (coef[last] == 0) continue;
            const Rational c = coef[last];
            constant += c;
            for (int k = 0; k < kCellsPerArm<S>; ++k) coef[cell_index(k, a)] -= c;
        }
        return *this;
    }

    LinearExpr canonical() const {
        LinearExpr e = *this;
        e.canonicalize();
        return e;
    }

    bool is_constant() const {
        return std::all_of(coef.begin(), coef.end(), [](const Rational& r) { return r == 0; });
    }

    template <class T>
    T evaluate(const ObservedDist<T, S>& d) const {
        T v = scalar_cast<T>(constant);
        for (int i = 0; i < n; ++i)
            if (coef[i] != 0) v += scalar_cast<T>(coef[i]) * d[i];
        return v;
    }

    LinearExpr& operator+=(const LinearExpr& o) {
        constant += o.constant;
        for (int i = 0; i < n; ++i) coef[i] += o.coef[i];
        return *this;
    }
    LinearExpr& operator-=(const LinearExpr& o) {
        constant -= o.constant;
        for (int i = 0; i < n; ++i) coef[i] -= o.coef[i];
        return *this;
    }
    friend LinearExpr operator-(LinearExpr e) {
        e.constant = -e.constant;
        for (auto& c : e.coef) c = -c;
        return e;
    }

    /// Equality of the represented functions on valid distributions.
    friend bool operator==(const LinearExpr& a, const LinearExpr& b) {
        LinearExpr x = a.canonical(), y = b.canonical();
        return x.constant == y.constant && x.coef == y.coef;
    }

    /// Total order on canonical forms: coefficients in symbol order, then constant.
    friend bool operator<(const LinearExpr& a, const LinearExpr& b) {
        LinearExpr x = a.canonical(), y = b.canonical();
        for (int i = 0; i < n; ++i)
            if (x.coef[i] != y.coef[i]) return x.coef[i] < y.coef[i];
        return x.constant < y.constant;
    }
};

namespace detail {

inline std::string rational_text(const Rational& r) { return r.get_str(); }

inline std::string latex_symbol(Setting s, int idx) {
    const int a = idx & 1;
    const int k = idx >> 1;
    std::string out = "p_{";
    if (s == Setting::I) {
        out += std::to_string(k >> 1) + " " + std::to_string(k & 1);
    } else {
        out += std::to_string(k >> 2) + " " + std::to_string((k >> 1) & 1) + " " +
               std::to_string(k & 1);
    }
    return out + " \\cdot " + std::to_string(a) + "}";
}

inline std::string latex_rational(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return "\\frac{" + r.get_num().get_str() + "}{" + r.get_den().get_str() + "}";
}

}  // namespace detail

/// Plain-text form: constant first, then nonzero coefficients in canonical symbol order,
/// e.g. `-1 + p00_0 - p01_1 + p10_1`.
template <Setting S>
std::string to_text(const LinearExpr<S>& expr) {
    const LinearExpr<S> e = expr.canonical();
    std::string out;
    auto emit = [&out](const Rational& c, const std::string& sym) {
        const bool neg = c < 0;
        const Rational mag = neg ? Rational(-c) : c;
        if (out.empty()) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        if (sym.empty()) {
            out += detail::rational_text(mag);
        } else {
            if (mag != 1) out += detail::rational_text(mag) + "*";
            out += sym;
        }
    };
    if (e.constant != 0) emit(e.constant, "");
    for (int i = 0; i < LinearExpr<S>::n; ++i)
        if (e.coef[i] != 0) emit(e.coef[i], cell_symbol<S>(i));
    return out.empty() ? "0" : out;
}

template <Setting S>
std::string to_latex(const LinearExpr<S>& expr) {
    const LinearExpr<S> e = expr.canonical();
    std::string out;
    auto emit = [&out](const Rational& c, const std::string& sym) {
        const bool neg = c < 0;
        const Rational mag = neg ? Rational(-c) : c;
        if (out.empty()) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        if (sym.empty()) {
            out += detail::latex_rational(mag);
        } else {
            if (mag != 1) out += detail::latex_rational(mag) + " ";
            out += sym;
        }
    };
    if (e.constant != 0) emit(e.constant, "");
    for (int i = 0; i < LinearExpr<S>::n; ++i)
        if (e.coef[i] != 0) emit(e.coef[i], detail::latex_symbol(S, i));
    return out.empty() ? "0" : out;
}

namespace detail {

/// Recursive-descent reader for `[-]c[*sym] (+|-) ...` with c integer or a/b.
class ExprReader {
public:
    explicit ExprReader(std::string_view s) : s_(s) {}

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool done() {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    void expect(char ch) {
        if (peek() != ch) fail(std::string("expected '") + ch + "'");
        ++pos_;
    }

    std::string digits() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    Rational number() {
        std::string num = digits();
        if (num.empty()) fail("expected a number");
        Rational r{mpz_class(num)};
        if (peek() == '/') {
            ++pos_;
            std::string den = digits();
            if (den.empty() || mpz_class(den) == 0) fail("bad denominator");
            r = Rational(mpz_class(num), mpz_class(den));
            r.canonicalize();
        }
        return r;
    }

    /// Reads `p<digits>_<arm>` and returns (binary digits, arm).
    std::pair<std::string, int> symbol() {
        expect('p');
        std::string bits = digits();
        expect('_');
        std::string arm = digits();
        if (arm != "0" && arm != "1") fail("bad arm in symbol");
        for (char ch : bits)
            if (ch != '0' && ch != '1') fail("symbol indices must be 0 or 1");
        return {bits, arm[0] - '0'};
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) +
                         "'");
    }

    std::size_t pos() const { return pos_; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

template <Setting S>
int symbol_index(const std::string& bits, int arm) {
    const std::size_t want = S == Setting::I ? 2 : 3;
    if (bits.size() != want)
        throw SymbolMismatch("symbol p" + bits + "_" + std::to_string(arm) +
                             " does not belong to setting " + to_string(S));
    int k = 0;
    for (char ch : bits) k = k * 2 + (ch - '0');
    return cell_index(k, arm);
}

}  // namespace detail

/// Parses the plain-text form written by to_text (whitespace-insensitive).
template <Setting S>
LinearExpr<S> parse_linear_expr(std::string_view text) {
    detail::ExprReader r(text);
    LinearExpr<S> e;
    bool first = true;
    if (r.done()) r.fail("empty expression");
    while (!r.done()) {
        int sign = 1;
        char ch = r.peek();
        if (ch == '+' || ch == '-') {
            sign = ch == '-' ? -1 : 1;
            r.expect(ch);
        } else if (!first) {
            r.fail("expected '+' or '-'");
        }
        first = false;
        Rational c = 1;
        bool has_number = false;
        if (std::isdigit(static_cast<unsigned char>(r.peek()))) {
            c = r.number();
            has_number = true;
        }
        if (r.peek() == '*' || r.peek() == 'p') {
            if (r.peek() == '*') {
                if (!has_number) r.fail("dangling '*'");
                r.expect('*');
            }
            auto [bits, arm] = r.symbol();
            e.coef[detail::symbol_index<S>(bits, arm)] += sign * c;
        } else {
            if (!has_number) r.fail("expected a term");
            e.constant += sign * c;
        }
    }
    return e;
}

/// Symbolic bound: max over `lower` <= estimand <= min over `upper`.
template <Setting S>
struct BoundExpr {
    std::string estimand;
    std::vector<LinearExpr<S>> lower;
    std::vector<LinearExpr<S>> upper;

    template <class T>
    Interval<T> evaluate(const ObservedDist<T, S>& d) const {
        if (lower.empty() || upper.empty()) throw SymbolMismatch("bound expression has no terms");
        T lo = lower.front().evaluate(d);
        for (const auto& t : lower) lo = std::max(lo, t.evaluate(d));
        T hi = upper.front().evaluate(d);
        for (const auto& t : upper) hi = std::min(hi, t.evaluate(d));
        return {lo, hi};
    }

    /// Canonicalizes every term, removes exact duplicates and sorts.
    BoundExpr& normalize() {
        for (auto* list : {&lower, &upper}) {
            for (auto& t : *list) t.canonicalize();
            std::sort(list->begin(), list->end());
            list->erase(std::unique(list->begin(), list->end()), list->end());
        }
        return *this;
    }

    /// Same term sets after canonicalization (order and duplicates ignored).
    bool same_terms(const BoundExpr& other) const {
        BoundExpr a = *this, b = other;
        a.normalize();
        b.normalize();
        return a.lower == b.lower && a.upper == b.upper;
    }
};

/// Evaluates a bound expression, checking it was built for the distribution's setting.
template <Setting S, class T, Setting D>
Interval<T> evaluate(const BoundExpr<S>& expr, const ObservedDist<T, D>& d) {
    if constexpr (S != D) {
        throw SymbolMismatch("bound expression symbols belong to setting " + to_string(S) +
                             ", distribution is setting " + to_string(D));
    } else {
        return expr.evaluate(d);
    }
}

template <Setting S>
std::string to_text(const BoundExpr<S>& b) {
    auto list = [](const std::vector<LinearExpr<S>>& terms) {
        std::string out;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (i) out += " ; ";
            out += to_text(terms[i]);
        }
        return out;
    };
    return "max{ " + list(b.lower) + " } <= " + b.estimand + " <= min{ " + list(b.upper) + " }";
}

template <Setting S>
std::string to_latex(const BoundExpr<S>& b) {
    auto list = [](const std::vector<LinearExpr<S>>& terms) {
        std::string out;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            out += to_latex(terms[i]);
            out += i + 1 < terms.size() ? ", \\\\\n" : "\n";
        }
        return out;
    };
    std::string out = "\\begin{align}\n\\begin{split}\n";
    out += "\\max \\left\\{\\begin{array}{l}\n" + list(b.lower);
    out += "\\end{array}\\right\\} & \\leq " + b.estimand + " \\\\\n";
    out += "&\\leq \\min \\left\\{\\begin{array}{l}\n" + list(b.upper);
    out += "\\end{array}\\right\\}.\n\\end{split}\n\\end{align}\n";
    return out;
}

namespace detail {

template <Setting S>
std::vector<LinearExpr<S>> parse_term_list(std::string_view body) {
    std::vector<LinearExpr<S>> out;
    std::size_t start = 0;
    while (true) {
        std::size_t semi = body.find(';', start);
        out.push_back(parse_linear_expr<S>(body.substr(start, semi - start)));
        if (semi == std::string_view::npos) break;
        start = semi + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/// Parses `max{ t1 ; ... } <= EST <= min{ u1 ; ... }`.
template <Setting S>
BoundExpr<S> parse_bound_expr(std::string_view text) {
    text = detail::trim(text);
    auto bad = [&](const char* why) {
        return ParseError(std::string(why) + " in bound expression '" + std::string(text) + "'");
    };
    if (text.substr(0, 4) != "max{") throw bad("expected 'max{'");
    std::size_t close = text.find('}');
    if (close == std::string_view::npos) throw bad("unterminated max{");
    std::size_t open_min = text.rfind("min{");
    if (open_min == std::string_view::npos || open_min < close || text.back() != '}')
        throw bad("expected trailing 'min{ ... }'");
    std::string_view middle = detail::trim(text.substr(close + 1, open_min - close - 1));
    if (middle.substr(0, 2) != "<=" || middle.substr(middle.size() - 2) != "<=")
        throw bad("expected '<= ESTIMAND <='");
    BoundExpr<S> b;
    b.estimand = std::string(detail::trim(middle.substr(2, middle.size() - 4)));
    b.lower = detail::parse_term_list<S>(text.substr(4, close - 4));
    b.upper = detail::parse_term_list<S>(text.substr(open_min + 4, text.size() - open_min - 5));
    return b;
}

}  // namespace medbounds
