// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/scalar_mean.hpp"

#include <charconv>
#include <cmath>
#include <cctype>
#include <limits>
#include <utility>

#include "opmeans/errors.hpp"

namespace opmeans {

namespace {

constexpr double kNormalizationTol = 1e-12;
constexpr double kGridMonotoneSlack = 1e-10;
constexpr double kLeftTrivialTol = 1e-10;
constexpr double kAlphaDiffStep = 1e-6;

void require_weight(double t, const char* who) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw ParamOutOfRange(std::string(who) + ": weight t must lie in [0, 1], got " +
                              format_double(t));
    }
}

double central_difference_at_one(const std::function<double(double)>& f) {
    const double h = kAlphaDiffStep;
    return (f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

RepresentingMean::RepresentingMean(std::string name, std::function<double(double)> f,
                                   double alpha, bool validate_grid)
    : name_(std::move(name)), f_(std::move(f)), alpha_(alpha) {
    const double f1 = f_(1.0);
    if (!std::isfinite(f1) || std::abs(f1 - 1.0) > kNormalizationTol) {
        throw DomainError("representing function '" + name_ + "' is not normalized: f(1) = " +
                          format_double(f1));
    }
    if (!(alpha_ >= -1e-9 && alpha_ <= 1.0 + 1e-9)) {
        throw ParamOutOfRange("representing function '" + name_ + "' has weight f'(1) = " +
                              format_double(alpha_) + " outside [0, 1]");
    }
    alpha_ = std::min(std::max(alpha_, 0.0), 1.0);
    double max_dev_from_one = 0.0;
    if (validate_grid) {
        const auto grid = classify_default_grid();
        double prev = -std::numeric_limits<double>::infinity();
        for (double x : grid) {
            const double y = f_(x);
            if (!std::isfinite(y) || y <= 0.0) {
                throw DomainError("representing function '" + name_ +
                                  "' is not positive and finite at x = " + format_double(x));
            }
            if (y < prev - kGridMonotoneSlack * std::max(1.0, std::abs(prev))) {
                throw DomainError("representing function '" + name_ +
                                  "' is decreasing near x = " + format_double(x));
            }
            prev = y;
            max_dev_from_one = std::max(max_dev_from_one, std::abs(y - 1.0));
        }
    } else {
        max_dev_from_one = alpha_ > 0.0 ? 1.0 : 0.0;
    }
    left_trivial_ = max_dev_from_one <= kLeftTrivialTol;
}

RepresentingMean RepresentingMean::left() {
    return RepresentingMean("left", [](double) { return 1.0; }, 0.0, false);
}

RepresentingMean RepresentingMean::right() {
    return RepresentingMean("right", [](double x) { return x; }, 1.0, false);
}

RepresentingMean RepresentingMean::arithmetic(double t) {
    require_weight(t, "arithmetic");
    return RepresentingMean("arith(" + format_double(t) + ")",
                            [t](double x) { return 1.0 - t + t * x; }, t, false);
}

RepresentingMean RepresentingMean::harmonic(double t) {
    require_weight(t, "harmonic");
    return RepresentingMean("harm(" + format_double(t) + ")",
                            [t](double x) { return 1.0 / (1.0 - t + t / x); }, t, false);
}

RepresentingMean RepresentingMean::geometric(double t) {
    require_weight(t, "geometric");
    return RepresentingMean("geom(" + format_double(t) + ")",
                            [t](double x) { return std::pow(x, t); }, t, false);
}

RepresentingMean RepresentingMean::custom(std::string name, std::function<double(double)> f,
                                          std::optional<double> alpha) {
    const double a = alpha ? *alpha : central_difference_at_one(f);
    return RepresentingMean(std::move(name), std::move(f), a, true);
}

RepresentingMean RepresentingMean::from_expression(std::string name, std::string_view expr) {
    return custom(std::move(name), parse_scalar_expression(expr));
}

RepresentingMean RepresentingMean::adjoint() const {
    auto f = f_;
    // (f*)'(1) = f'(1): the weight is unchanged under taking adjoints.
    return RepresentingMean("adjoint(" + name_ + ")",
                            [f](double x) { return 1.0 / f(1.0 / x); }, alpha_, true);
}

RepresentingMean RepresentingMean::transposed() const {
    auto f = f_;
    return RepresentingMean("transpose(" + name_ + ")",
                            [f](double x) { return x * f(1.0 / x); }, 1.0 - alpha_, true);
}

RepresentingMean RepresentingMean::power_modified(double r) const {
    if (!(r > 0.0 && r <= 1.0)) {
        throw ParamOutOfRange("power_modified: exponent must lie in (0, 1], got " +
                              format_double(r));
    }
    auto f = f_;
    return RepresentingMean("pow(" + name_ + ", " + format_double(r) + ")",
                            [f, r](double x) { return f(std::pow(x, r)); }, r * alpha_, true);
}

HpdMatrix RepresentingMean::apply(const HpdMatrix& a, const HpdMatrix& b) const {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("RepresentingMean::apply: operands have dimensions " +
                                std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    }
    const HpdMatrix w(whiten(a, b), a.options());
    const Eigen::MatrixXd fw = fn_calculus(w, f_).mat();
    const Eigen::MatrixXd rt = matrix_sqrt(a).mat();
    Eigen::MatrixXd out = rt * fw * rt;
    out = ((out + out.transpose()) / 2.0).eval();
    return HpdMatrix(out, a.options());
}

std::vector<double> classify_default_grid() {
    std::vector<double> grid;
    grid.reserve(41);
    for (int i = 0; i <= 40; ++i) {
        // 41 log-spaced points covering [1e-4, 1e4].
        grid.push_back(std::pow(10.0, -4.0 + 8.0 * static_cast<double>(i) / 40.0));
    }
    return grid;
}

std::vector<double> classify_default_exponents() { return {1.5, 2.0, 4.0}; }

MeanClassification classify(const RepresentingMean& sigma, const std::vector<double>& grid,
                            const std::vector<double>& exponents, double rel_slack) {
    MeanClassification out;
    auto slack = [rel_slack](double lhs, double rhs) {
        return rel_slack * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    };
    for (double x : grid) {
        for (double r : exponents) {
            const double lhs = sigma.f(std::pow(x, r));
            const double rhs = std::pow(sigma.f(x), r);
            const double s = slack(lhs, rhs);
            if (out.pmi && lhs < rhs - s) {
                out.pmi = false;
                out.pmi_witness = ClassifyWitness{x, r, lhs, rhs};
            }
            if (out.pmd && lhs > rhs + s) {
                out.pmd = false;
                out.pmd_witness = ClassifyWitness{x, r, lhs, rhs};
            }
        }
    }
    for (double x : grid) {
        for (double y : grid) {
            const double lhs = sigma.f(std::sqrt(x * y));
            const double rhs = std::sqrt(sigma.f(x) * sigma.f(y));
            const double s = slack(lhs, rhs);
            if (out.gcv && lhs > rhs + s) {
                out.gcv = false;
                out.gcv_witness = ClassifyWitness{x, y, lhs, rhs};
            }
            if (out.gcc && lhs < rhs - s) {
                out.gcc = false;
                out.gcc_witness = ClassifyWitness{x, y, lhs, rhs};
            }
            if (!out.gcv && !out.gcc) break;
        }
        if (!out.gcv && !out.gcc) break;
    }
    return out;
}

namespace {

/// Recursive-descent parser state shared by the two grammars.
class Cursor {
  public:
    explicit Cursor(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    std::string ident() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (start == pos_) fail("expected identifier");
        return std::string(text_.substr(start, pos_ - start));
    }

    double number() {
        skip_ws();
        size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        bool any = false;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                any = true;
            }
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (any && pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            size_t expo = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ == expo) pos_ = mark; // bare 'e' belongs to the next token
        }
        if (!any) fail("expected number");
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc()) fail("malformed number");
        return value;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("parse error at offset " + std::to_string(pos_) + " of '" +
                         std::string(text_) + "': " + what);
    }

  private:
    std::string_view text_;
    size_t pos_ = 0;
};

RepresentingMean parse_mean_node(Cursor& cur) {
    const std::string head = cur.ident();
    if (head == "left") return RepresentingMean::left();
    if (head == "right") return RepresentingMean::right();
    if (head == "arith" || head == "harm" || head == "geom") {
        cur.expect('(');
        const double t = cur.number();
        cur.expect(')');
        if (head == "arith") return RepresentingMean::arithmetic(t);
        if (head == "harm") return RepresentingMean::harmonic(t);
        return RepresentingMean::geometric(t);
    }
    if (head == "adjoint" || head == "transpose") {
        cur.expect('(');
        RepresentingMean inner = parse_mean_node(cur);
        cur.expect(')');
        return head == "adjoint" ? inner.adjoint() : inner.transposed();
    }
    if (head == "pow") {
        cur.expect('(');
        RepresentingMean inner = parse_mean_node(cur);
        cur.expect(',');
        const double r = cur.number();
        cur.expect(')');
        return inner.power_modified(r);
    }
    cur.fail("unknown mean '" + head + "'");
}

using ScalarFn = std::function<double(double)>;

ScalarFn parse_expr(Cursor& cur);

ScalarFn parse_primary(Cursor& cur) {
    if (cur.eat('(')) {
        ScalarFn inner = parse_expr(cur);
        cur.expect(')');
        return inner;
    }
    const char c = cur.peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const double v = cur.number();
        return [v](double) { return v; };
    }
    const std::string id = cur.ident();
    if (id == "x") return [](double x) { return x; };
    if (id == "log" || id == "exp") {
        cur.expect('(');
        ScalarFn arg = parse_expr(cur);
        cur.expect(')');
        if (id == "log") return [arg](double x) { return std::log(arg(x)); };
        return [arg](double x) { return std::exp(arg(x)); };
    }
    if (id == "pow") {
        cur.expect('(');
        ScalarFn base = parse_expr(cur);
        cur.expect(',');
        ScalarFn expo = parse_expr(cur);
        cur.expect(')');
        return [base, expo](double x) { return std::pow(base(x), expo(x)); };
    }
    cur.fail("unknown symbol '" + id + "'");
}

ScalarFn parse_unary(Cursor& cur) {
    if (cur.eat('-')) {
        ScalarFn inner = parse_unary(cur);
        return [inner](double x) { return -inner(x); };
    }
    ScalarFn base = parse_primary(cur);
    if (cur.eat('^')) {
        ScalarFn expo = parse_unary(cur); // right-associative
        return [base, expo](double x) { return std::pow(base(x), expo(x)); };
    }
    return base;
}

ScalarFn parse_term(Cursor& cur) {
    ScalarFn acc = parse_unary(cur);
    for (;;) {
        if (cur.eat('*')) {
            ScalarFn rhs = parse_unary(cur);
            ScalarFn lhs = acc;
            acc = [lhs, rhs](double x) { return lhs(x) * rhs(x); };
        } else if (cur.eat('/')) {
            ScalarFn rhs = parse_unary(cur);
            ScalarFn lhs = acc;
            acc = [lhs, rhs](double x) { return lhs(x) / rhs(x); };
        } else {
            return acc;
        }
    }
}

ScalarFn parse_expr(Cursor& cur) {
    ScalarFn acc = parse_term(cur);
    for (;;) {
        if (cur.eat('+')) {
            ScalarFn rhs = parse_term(cur);
            ScalarFn lhs = acc;
            acc = [lhs, rhs](double x) { return lhs(x) + rhs(x); };
        } else if (cur.eat('-')) {
            ScalarFn rhs = parse_term(cur);
            ScalarFn lhs = acc;
            acc = [lhs, rhs](double x) { return lhs(x) - rhs(x); };
        } else {
            return acc;
        }
    }
}

} // namespace

RepresentingMean parse_mean_spec(std::string_view spec) {
    Cursor cur(spec);
    RepresentingMean out = parse_mean_node(cur);
    if (!cur.at_end()) cur.fail("trailing input after mean spec");
    return out;
}

std::function<double(double)> parse_scalar_expression(std::string_view expr) {
    Cursor cur(expr);
    ScalarFn out = parse_expr(cur);
    if (!cur.at_end()) cur.fail("trailing input after expression");
    return out;
}

} // namespace opmeans
